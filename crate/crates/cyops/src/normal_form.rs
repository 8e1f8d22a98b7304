//! The local normal form at the MUM point: structure series, special
//! coordinate, Y-invariants, Lambert coefficients and the product identity
//! linking them to the self-duality witness.

use crate::error::{CyError, Result};
use crate::frobenius::{mum_flag, Flag};
use crate::logseries::LogSeries;
use crate::operator::{self_dual_witness, ThetaOperator};
use crate::poly::pow_rat;
use crate::series::Series;
use crate::{rat, Rat};
use num_traits::{One, Zero};

/// Structure series, special coordinate and Y-invariants of one operator.
#[derive(Clone, Debug)]
pub struct NormalFormData {
    /// alpha_1 .. alpha_n, each a unit with constant term 1.
    pub alphas: Vec<Series>,
    /// q in z + z^2 Q[[z]].
    pub q: Series,
    /// Compositional inverse of q.
    pub q_inverse: Series,
    /// Y_1 .. Y_{n-2} (empty below order 4).
    pub y_invariants: Vec<Series>,
}

/// alpha_i = N_i(y_i)^{-1} from the normal-form recursion
/// N_{k+1} = theta (1/N_k(y_k)) N_k, run on the z^{-r}-normalized flag.
pub fn structure_series(flag: &Flag) -> Result<Vec<Series>> {
    let ord = flag.order();
    let r = flag.mum_exponent;
    let mut cur: Vec<LogSeries> = flag.solutions.iter().map(|y| y.shift(-r)).collect();
    let mut alphas = Vec::with_capacity(ord - 1);
    for k in 0..ord {
        let d = cur[k].clone();
        debug_assert!(d.is_log_free(), "N_k(y_k) must be log-free");
        let d0 = d.part(0);
        if k >= 1 {
            let a = d0.invert_unit()?;
            debug_assert!(a.coeff(0).is_one());
            alphas.push(a);
        }
        for j in k + 1..ord {
            cur[j] = cur[j].div_series(&d0)?.theta();
        }
    }
    Ok(alphas)
}

/// q = z exp(f_1/f_0) for the canonical flag; satisfies theta q = q/alpha_1.
pub fn q_coordinate(flag: &Flag) -> Result<Series> {
    if flag.order() < 2 {
        return Err(CyError::OrderTooSmall(flag.order()));
    }
    let f0 = flag.f_normalized(0);
    let f1 = flag.f_normalized(1);
    let u = f1.div(&f0)?;
    Ok(u.exp().shift(1))
}

/// Y_i = ((alpha_{i+1}/alpha_1) o q^inv)^{-1} for i = 1..n-2.
pub fn y_invariants(flag: &Flag) -> Result<Vec<Series>> {
    let ord = flag.order();
    if ord < 4 {
        return Err(CyError::OrderTooSmall(ord));
    }
    let data = normal_form_data(flag)?;
    Ok(data.y_invariants)
}

pub fn normal_form_data(flag: &Flag) -> Result<NormalFormData> {
    let alphas = structure_series(flag)?;
    let q = q_coordinate(flag)?;
    let q_inverse = q.reverse()?;
    let n = alphas.len();
    let mut ys = Vec::new();
    if n >= 2 {
        let a1_inv = alphas[0].invert_unit()?;
        for i in 1..n - 1 {
            let ratio = alphas[i].mul(&a1_inv);
            let pulled = ratio.compose(&q_inverse)?;
            ys.push(pulled.invert_unit()?);
        }
    }
    Ok(NormalFormData { alphas, q, q_inverse, y_invariants: ys })
}

/// Apply the normal form theta a_n theta ... theta a_1 theta to a log
/// series. It annihilates the y_0-gauged flag members y_k/y_0 (the trailing
/// 1/y_0 of the recursion cancels against the right factor y_0).
pub fn normal_form_apply(alphas: &[Series], y: &LogSeries) -> LogSeries {
    let mut v = y.theta();
    for a in alphas {
        v = v.mul_series(a).theta();
    }
    v
}

/// Reconstruction identity: the expanded normal form annihilates every
/// gauged flag member y_k/y_0 to truncation.
pub fn normal_form_annihilates_flag(alphas: &[Series], flag: &Flag) -> Result<bool> {
    let r = flag.mum_exponent;
    let f0 = flag.f_normalized(0);
    for y in &flag.solutions {
        let gauged = y.shift(-r).div_series(&f0)?;
        if !normal_form_apply(alphas, &gauged).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lambert expansion data: Y = 1 + sum_d N_d d^ell z^d/(1 - z^d).
#[derive(Clone, Debug)]
pub struct LambertExpansion {
    pub ell: u32,
    pub coefficients: Vec<Rat>,
}

/// N_d = (c_d - sum_{e | d, e < d} N_e e^ell) / d^ell for the coefficients
/// c_d of Y. The N_d may be non-integral; integrality is reported, not
/// required.
pub fn lambert_coefficients(y: &Series, ell: u32, depth: usize) -> Result<LambertExpansion> {
    if y.valuation() != 0 || !y.coeff(0).is_one() {
        return Err(CyError::Domain("Lambert expansion needs Y(0) = 1".into()));
    }
    if y.truncation() < depth as i64 + 1 {
        return Err(CyError::Domain(format!(
            "Lambert depth {depth} needs truncation at least {}",
            depth + 1
        )));
    }
    let mut ns: Vec<Rat> = Vec::with_capacity(depth);
    for d in 1..=depth {
        let mut acc = y.coeff(d as i64);
        for e in 1..d {
            if d % e == 0 {
                acc = acc - &ns[e - 1] * pow_rat(&rat(e as i64), ell);
            }
        }
        ns.push(acc / pow_rat(&rat(d as i64), ell));
    }
    Ok(LambertExpansion { ell, coefficients: ns })
}

/// Re-sum a Lambert expansion back into a series (for round-trip checks).
pub fn lambert_resum(exp: &LambertExpansion, trunc: i64) -> Series {
    let mut acc = Series::one(trunc);
    for (idx, n_d) in exp.coefficients.iter().enumerate() {
        let d = (idx + 1) as i64;
        let scale = n_d * pow_rat(&rat(d), exp.ell);
        if scale.is_zero() {
            continue;
        }
        // z^d / (1 - z^d) = z^d + z^{2d} + ...
        let mut k = d;
        let mut coeffs = Vec::new();
        let mut exps = Vec::new();
        while k < trunc {
            exps.push(k);
            coeffs.push(scale.clone());
            k += d;
        }
        if let Some(&first) = exps.first() {
            let mut dense = vec![Rat::zero(); (trunc - first) as usize];
            for (e, c) in exps.iter().zip(coeffs) {
                dense[(e - first) as usize] = c;
            }
            acc = acc.add(&Series::new(first, dense, trunc));
        }
    }
    acc
}

/// Special local normal forms coincide: same order and identical pulled-back
/// structure-series ratios (equivalently, identical Y-invariants).
pub fn special_normal_form_equal(
    l1: &ThetaOperator,
    l2: &ThetaOperator,
    truncation: i64,
) -> Result<bool> {
    for l in [l1, l2] {
        if self_dual_witness(&l.to_d_form())?.is_none() {
            return Err(CyError::NotSelfDual);
        }
    }
    let f1 = mum_flag(l1, truncation)?;
    let f2 = mum_flag(l2, truncation)?;
    if f1.order() != f2.order() {
        return Ok(false);
    }
    if f1.order() < 4 {
        return Ok(true);
    }
    let y1 = normal_form_data(&f1)?.y_invariants;
    let y2 = normal_form_data(&f2)?.y_invariants;
    Ok(y1
        .iter()
        .zip(&y2)
        .all(|(a, b)| a.eq_to_common_trunc(b)))
}

/// The product identity (z^n alpha)/(y_0^2 alpha_1^n) o q^inv = c prod Y_i.
/// Returns whether it holds to truncation together with the constant c.
pub fn prody_check(op: &ThetaOperator, truncation: i64) -> Result<(bool, Rat)> {
    let d = op.to_d_form();
    let alpha = self_dual_witness(&d)?.ok_or(CyError::NotSelfDual)?;
    let flag = mum_flag(op, truncation)?;
    let data = normal_form_data(&flag)?;
    let n = flag.order() - 1;
    let f0 = flag.f_normalized(0);
    let t = f0.truncation();
    let alpha_series = alpha.expand(t).shift(n as i64);
    if alpha_series.valuation() != 0 {
        return Ok((false, Rat::zero()));
    }
    // z^n alpha alpha_1^n / y_0^2, then pulled back through q.
    // (The printed form divides by alpha_1^n; with theta_q = alpha_1 theta
    // each of the n theta_q factors contributes one alpha_1 upstairs, and
    // only this placement closes against prod Y_i; see the quintic and R2.)
    let numer = alpha_series.mul(&data.alphas[0].pow(n as u32));
    let lhs = numer.div(&f0.mul(&f0))?.compose(&data.q_inverse)?;
    let mut rhs = Series::one(lhs.truncation());
    for y in &data.y_invariants {
        rhs = rhs.mul(y);
    }
    let ratio = lhs.div(&rhs)?;
    let c = ratio.coeff(0);
    let holds = !c.is_zero()
        && ratio.sub(&Series::constant(c.clone(), ratio.truncation())).is_zero();
    Ok((holds, c))
}

/// Pull a flag back along psi = z + c2 z^2 + ... (exponent-zero flags only);
/// produces the flag of psi^*(L) without constructing the operator.
pub fn pullback_flag(flag: &Flag, psi: &Series) -> Result<Flag> {
    assert_eq!(flag.mum_exponent, 0, "series pullback needs exponent 0");
    let solutions = flag
        .solutions
        .iter()
        .map(|y| y.compose_tangent(psi))
        .collect::<Result<Vec<_>>>()?;
    Ok(Flag { solutions, mum_exponent: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn quintic() -> ThetaOperator {
        let mut p1 = Poly::one();
        for k in 1..=4 {
            p1 = &p1 * &Poly::from_i64(&[k, 5]);
        }
        ThetaOperator::new(vec![Poly::from_i64(&[0, 0, 0, 0, 1]), p1.scale(&rat(-5))])
    }

    #[test]
    fn theta_power_normal_form_is_trivial() {
        let op = ThetaOperator::new(vec![Poly::from_i64(&[0, 0, 0, 0, 1])]);
        let flag = mum_flag(&op, 10).unwrap();
        let alphas = structure_series(&flag).unwrap();
        assert_eq!(alphas.len(), 3);
        for a in &alphas {
            assert!(a.eq_to_common_trunc(&Series::one(10)));
        }
    }

    #[test]
    fn quintic_alpha_and_q() {
        let flag = mum_flag(&quintic(), 12).unwrap();
        let alphas = structure_series(&flag).unwrap();
        // alpha_1 = 1 - 770 z + ...
        assert!(alphas[0].coeff(0).is_one());
        assert_eq!(alphas[0].coeff(1), rat(-770));
        // alpha symmetry alpha_k = alpha_{n+1-k}
        assert!(alphas[0].eq_to_common_trunc(&alphas[2]));
        // q = z + 770 z^2 + 1014275 z^3 + ...
        let q = q_coordinate(&flag).unwrap();
        assert_eq!(q.valuation(), 1);
        assert!(q.coeff(1).is_one());
        assert_eq!(q.coeff(2), rat(770));
        assert_eq!(q.coeff(3), rat(1014275));
        // theta q = q / alpha_1
        let lhs = q.theta();
        let rhs = q.mul(&alphas[0].invert_unit().unwrap());
        assert!(lhs.eq_to_common_trunc(&rhs));
    }

    #[test]
    fn quintic_yukawa_head() {
        let flag = mum_flag(&quintic(), 10).unwrap();
        let ys = y_invariants(&flag).unwrap();
        assert_eq!(ys.len(), 1); // order 4: Y_1 only
        assert!(ys[0].coeff(0).is_one());
        let lam = lambert_coefficients(&ys[0], 3, 3).unwrap();
        assert_eq!(lam.coefficients[0], rat(575)); // 5 * 575 = 2875 lines
    }

    #[test]
    fn normal_form_reconstruction_annihilates_flag() {
        let flag = mum_flag(&quintic(), 12).unwrap();
        let alphas = structure_series(&flag).unwrap();
        assert!(normal_form_annihilates_flag(&alphas, &flag).unwrap());
    }

    #[test]
    fn lambert_round_trip() {
        let y = Series::new(0, vec![rat(1), rat(17), rat(-3), rat(25), rat(4)], 5);
        let lam = lambert_coefficients(&y, 4, 4).unwrap();
        let back = lambert_resum(&lam, 5);
        assert!(back.eq_to_common_trunc(&y));
    }

    #[test]
    fn prody_on_quintic() {
        let (holds, c) = prody_check(&quintic(), 14).unwrap();
        assert!(holds);
        assert!(!c.is_zero());
    }

    #[test]
    fn normal_form_equal_under_tangent_pullback() {
        // compare Y-data of the flag with its psi-pullback, psi = z + z^2
        let flag = mum_flag(&quintic(), 14).unwrap();
        let psi = Series::new(1, vec![rat(1), rat(1)], 14);
        let pulled = pullback_flag(&flag, &psi).unwrap();
        let y1 = normal_form_data(&flag).unwrap().y_invariants;
        let y2 = normal_form_data(&pulled).unwrap().y_invariants;
        for (a, b) in y1.iter().zip(&y2) {
            assert!(a.eq_to_common_trunc(b));
        }
    }
}
