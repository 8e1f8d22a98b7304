//! The five CY-type properties and their witnesses.

use crate::arith::{factor, padic_valuation};
use crate::error::{CyError, Result};
use crate::frobenius::mum_flag;
use crate::normal_form::{normal_form_data, q_coordinate, structure_series};
use crate::operator::{indicial, self_dual_witness, Point, ThetaOperator};
use crate::poly::rat_to_text;
use crate::ratfunc::RatFunc;
use crate::series::Series;
use crate::{Int, Rat};
use num_traits::{One, ToPrimitive, Zero};

/// Outcome of one property check; a pass always carries its witness.
#[derive(Clone, Debug)]
pub struct PropertyResult {
    pub pass: bool,
    pub witness: Option<String>,
    pub note: String,
}

impl PropertyResult {
    fn fail(note: impl Into<String>) -> Self {
        PropertyResult { pass: false, witness: None, note: note.into() }
    }

    fn pass(witness: impl Into<String>, note: impl Into<String>) -> Self {
        PropertyResult { pass: true, witness: Some(witness.into()), note: note.into() }
    }
}

/// Per-operator verdicts for (P), (M), (N), (Q), (S).
#[derive(Clone, Debug)]
pub struct CYVerdict {
    pub order: usize,
    pub property_p: PropertyResult,
    pub property_m: PropertyResult,
    pub property_n: PropertyResult,
    pub property_q: PropertyResult,
    pub property_s: PropertyResult,
    /// Irreducibility is part of the CY-type definition but is not decided.
    pub irreducibility: &'static str,
    pub overall: bool,
    pub truncation: i64,
    pub depth: usize,
    pub prime_bound: u64,
    /// The self-duality witness, kept in exact form for re-verification.
    pub alpha: Option<RatFunc>,
    pub mum_exponent: Option<i64>,
    pub n_witness: Option<Int>,
    pub q_witness: Option<Int>,
    pub s_witnesses: Vec<Int>,
}

/// Minimal N with N^m A_m integral for all checked m, or None.
///
/// The check is a depth-bounded heuristic: it fails if any denominator
/// prime exceeds `prime_bound`, if new denominator primes keep appearing in
/// the second half of the window, or if more than 20 distinct primes occur
/// (an N-integral series has a fixed finite prime support).
pub fn n_integral_witness(f: &Series, prime_bound: u64, depth: usize) -> Option<Int> {
    assert!(f.truncation() >= depth as i64, "series too short for requested depth");
    assert!(f.valuation() >= 0);
    if !f.is_zero() && !f.coeff(0).denom().is_one() {
        return None;
    }
    // prime -> (required exponent, first occurrence)
    let mut primes: Vec<(Int, u32, usize)> = Vec::new();
    for m in 1..depth {
        let a = f.coeff(m as i64);
        if a.is_zero() || a.denom().is_one() {
            continue;
        }
        for (p, e) in factor(a.denom()) {
            // required exponent: ceil(e / m)
            let need = (e as usize).div_ceil(m) as u32;
            match primes.iter_mut().find(|(q, _, _)| q == &p) {
                Some((_, req, _)) => *req = (*req).max(need),
                None => primes.push((p, need, m)),
            }
        }
    }
    for (p, _, first) in &primes {
        if p.to_u64().map_or(true, |v| v > prime_bound) {
            return None;
        }
        if *first > depth / 2 {
            return None; // denominator primes still appearing late
        }
    }
    if primes.len() > 20 {
        return None;
    }
    let n: Int = primes.iter().map(|(p, e, _)| p.pow(*e)).product();
    // re-verify the witness directly
    let mut npow = Int::one();
    for m in 0..depth {
        if m > 0 {
            npow *= &n;
        }
        let a = f.coeff(m as i64);
        if !(&a * Rat::from(npow.clone())).denom().is_one() {
            return None;
        }
    }
    Some(n)
}

/// Run all five property checks. Failures are recorded, never thrown.
pub fn check_cy_type(
    op: &ThetaOperator,
    truncation: i64,
    prime_bound: u64,
    depth: usize,
) -> Result<CYVerdict> {
    let trunc = truncation.max(depth as i64 + 2);
    let d = op.to_d_form();
    let ord = d.order();

    // (P)
    let (alpha, property_p) = match self_dual_witness(&d) {
        Ok(Some(a)) => {
            let rendered = a.render();
            (Some(a), PropertyResult::pass(rendered, "L alpha = alpha L^dual verified exactly"))
        }
        Ok(None) => (None, PropertyResult::fail("no rational alpha with L alpha = alpha L^dual")),
        Err(CyError::NonIntegralResidue { residue, place }) => (
            None,
            PropertyResult::fail(format!(
                "non-integral residue {residue} of 2a_n/(n+1) at a root of {place}"
            )),
        ),
        Err(e) => return Err(e),
    };

    // (M)
    let ind0 = indicial(&op.z_stripped(), &Point::Finite(Rat::zero()))?;
    let mum = ind0.mum_exponent(ord);
    let property_m = match mum {
        Some(r) => PropertyResult::pass(
            format!("r = {r}"),
            format!("Ind_0 = (T - {r})^{ord}"),
        ),
        None => PropertyResult::fail(format!("Ind_0 = {}", ind0.polynomial.render("T"))),
    };

    if ord == 1 {
        return order_one_verdict(alpha, property_p, property_m, mum, trunc, prime_bound, depth);
    }

    let mut property_n = PropertyResult::fail("requires property (M)");
    let mut property_q = PropertyResult::fail("requires property (M)");
    let mut property_s = PropertyResult::fail("requires property (M)");
    let mut n_witness = None;
    let mut q_witness = None;
    let mut s_witnesses = Vec::new();
    if mum.is_some() {
        let flag = mum_flag(op, trunc)?;
        let f0 = flag.f_normalized(0);
        match n_integral_witness(&f0, prime_bound, depth) {
            Some(n) => {
                property_n = PropertyResult::pass(
                    format!("N = {n}"),
                    format!("N^m A_m in Z checked for m < {depth}"),
                );
                n_witness = Some(n);
            }
            None => {
                property_n =
                    PropertyResult::fail(format!("f_0 not N-integral to depth {depth}"));
            }
        }
        let q = q_coordinate(&flag)?;
        match n_integral_witness(&q.shift(-1), prime_bound, depth) {
            Some(n) => {
                property_q = PropertyResult::pass(
                    format!("N = {n}"),
                    format!("q/z checked to depth {depth}"),
                );
                q_witness = Some(n);
            }
            None => {
                property_q =
                    PropertyResult::fail(format!("q/z not N-integral to depth {depth}"));
            }
        }
        let alphas = structure_series(&flag)?;
        let mut all = Vec::new();
        let mut ok = true;
        for (i, a) in alphas.iter().enumerate() {
            match n_integral_witness(a, prime_bound, depth) {
                Some(n) => all.push(n),
                None => {
                    property_s = PropertyResult::fail(format!(
                        "alpha_{} not N-integral to depth {depth}",
                        i + 1
                    ));
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let rendered = all
                .iter()
                .enumerate()
                .map(|(i, n)| format!("N(alpha_{}) = {}", i + 1, n))
                .collect::<Vec<_>>()
                .join(", ");
            property_s = PropertyResult::pass(rendered, format!("depth {depth}"));
            s_witnesses = all;
        }
    }

    let overall = property_p.pass
        && property_m.pass
        && property_n.pass
        && property_q.pass
        && property_s.pass;
    Ok(CYVerdict {
        order: ord,
        property_p,
        property_m,
        property_n,
        property_q,
        property_s,
        irreducibility: "not checked",
        overall,
        truncation: trunc,
        depth,
        prime_bound,
        alpha,
        mum_exponent: mum,
        n_witness,
        q_witness,
        s_witnesses,
    })
}

/// Order one: CY-type means the solution is an N-integral algebraic
/// function y = sqrt(P/Q); (Q) and (S) are vacuous.
fn order_one_verdict(
    alpha: Option<RatFunc>,
    property_p: PropertyResult,
    property_m: PropertyResult,
    mum: Option<i64>,
    trunc: i64,
    prime_bound: u64,
    depth: usize,
) -> Result<CYVerdict> {
    let mut property_n = PropertyResult::fail("requires (P) and (M)");
    let mut n_witness = None;
    if let (Some(a), Some(r)) = (alpha.as_ref(), mum) {
        // y^2 = c * alpha: expand and take the square root of the unit part
        let s = a.expand(trunc + 2 * r.abs() + 2);
        let v = s.valuation();
        if v % 2 == 0 {
            let unit = s.shift(-v);
            let unit = unit.scale(&unit.coeff(0).recip());
            let y = unit.nth_root_unit(2)?;
            match n_integral_witness(&y, prime_bound, depth) {
                Some(n) => {
                    property_n = PropertyResult::pass(
                        format!("N = {n}"),
                        "square root of the witness is N-integral".to_string(),
                    );
                    n_witness = Some(n);
                }
                None => property_n = PropertyResult::fail("solution not N-integral"),
            }
        } else {
            property_n = PropertyResult::fail("witness has odd valuation; y is not meromorphic");
        }
    }
    let overall = property_p.pass && property_m.pass && property_n.pass;
    Ok(CYVerdict {
        order: 1,
        property_p,
        property_m,
        property_n,
        property_q: PropertyResult::pass("vacuous", "no q-coordinate below order 2"),
        property_s: PropertyResult::pass("vacuous", "no structure series below order 2"),
        irreducibility: "not checked",
        overall,
        truncation: trunc,
        depth,
        prime_bound,
        alpha,
        mum_exponent: mum,
        n_witness,
        q_witness: None,
        s_witnesses: Vec::new(),
    })
}

/// Re-verify a stored verdict from its witnesses alone (no searching).
pub fn reverify_from_witnesses(op: &ThetaOperator, verdict: &CYVerdict) -> Result<bool> {
    let d = op.to_d_form().monic();
    if let Some(alpha) = &verdict.alpha {
        let alpha_op = crate::operator::DOperator::function(alpha.clone());
        let lhs = d.multiply(&alpha_op);
        let rhs = alpha_op.multiply(&d.dual());
        if lhs.coeffs() != rhs.coeffs() {
            return Ok(false);
        }
    }
    if let Some(r) = verdict.mum_exponent {
        let ind = indicial(&op.z_stripped(), &Point::Finite(Rat::zero()))?;
        if ind.mum_exponent(d.order()) != Some(r) {
            return Ok(false);
        }
    }
    if verdict.order >= 2 && verdict.mum_exponent.is_some() {
        let flag = mum_flag(op, verdict.depth as i64 + 2)?;
        let data = normal_form_data(&flag)?;
        let mut checks: Vec<(Series, Option<&Int>)> = vec![
            (flag.f_normalized(0), verdict.n_witness.as_ref()),
            (data.q.shift(-1), verdict.q_witness.as_ref()),
        ];
        for (a, n) in data.alphas.iter().zip(verdict.s_witnesses.iter()) {
            checks.push((a.clone(), Some(n)));
        }
        for (series, witness) in checks {
            if let Some(n) = witness {
                for m in 1..verdict.depth {
                    let a = series.coeff(m as i64);
                    if a.is_zero() || a.denom().is_one() {
                        continue;
                    }
                    for (p, e) in factor(a.denom()) {
                        let have = padic_valuation(&Rat::from(n.clone()), &p) * m as i64;
                        if have < e as i64 {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Display helper: "p/q" strings for witnesses.
pub fn rat_str(x: &Rat) -> String {
    rat_to_text(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::rat;

    fn quintic() -> ThetaOperator {
        let mut p1 = Poly::one();
        for k in 1..=4 {
            p1 = &p1 * &Poly::from_i64(&[k, 5]);
        }
        ThetaOperator::new(vec![Poly::from_i64(&[0, 0, 0, 0, 1]), p1.scale(&rat(-5))])
    }

    #[test]
    fn quintic_f0_has_witness_one() {
        let flag = mum_flag(&quintic(), 60).unwrap();
        let w = n_integral_witness(&flag.f_normalized(0), 1_000_000, 60).unwrap();
        assert!(w.is_one());
    }

    #[test]
    fn factorial_series_has_no_witness() {
        let t = 120;
        let mut fact = Rat::one();
        let coeffs: Vec<Rat> = (0..t)
            .map(|m| {
                if m > 0 {
                    fact = &fact * &rat(m);
                }
                fact.clone().recip()
            })
            .collect();
        let f = Series::new(0, coeffs, t);
        assert!(n_integral_witness(&f, 1_000_000, 120).is_none());
    }

    #[test]
    fn hypergeometric_half_half_one_has_witness_sixteen() {
        // 2F1(1/2,1/2;1|z): A_m = (C(2m,m)/4^m)^2, recurrence
        // A_m = A_{m-1} * ((2m-1)/(2m))^2
        let depth = 200i64;
        let mut coeffs = vec![Rat::one()];
        for m in 1..depth {
            let f = crate::rat_frac(2 * m - 1, 2 * m);
            let next = coeffs.last().unwrap() * &f * &f;
            coeffs.push(next);
        }
        let f = Series::new(0, coeffs, depth);
        let w = n_integral_witness(&f, 1_000_000, depth as usize).unwrap();
        assert_eq!(w, Int::from(16));
    }

    #[test]
    fn quintic_passes_all_five() {
        let v = check_cy_type(&quintic(), 40, 1_000_000, 40).unwrap();
        assert!(v.property_p.pass);
        assert!(v.property_m.pass);
        assert!(v.property_n.pass);
        assert!(v.property_q.pass);
        assert!(v.property_s.pass);
        assert!(v.overall);
        assert_eq!(v.irreducibility, "not checked");
        assert!(reverify_from_witnesses(&quintic(), &v).unwrap());
    }

    #[test]
    fn order_one_algebraic_sqrt() {
        // (d - 1/(2(1-z))) annihilates 1/sqrt(1-z): N-integral with N = 4.
        let u = RatFunc::new(Poly::from_i64(&[1]), Poly::from_i64(&[2, -2]));
        let l = crate::operator::DOperator::d().twist(&u).to_theta_form();
        let v = check_cy_type(&l, 30, 1_000_000, 30).unwrap();
        assert!(v.overall, "{v:?}");
        assert_eq!(v.n_witness, Some(Int::from(4)));
    }

    #[test]
    fn exponential_fails_n() {
        // (d - 1) annihilates e^z
        let l = crate::operator::DOperator::new(vec![
            RatFunc::constant(rat(-1)),
            RatFunc::one(),
        ])
        .to_theta_form();
        let v = check_cy_type(&l, 150, 1_000_000, 140).unwrap();
        assert!(!v.overall);
        assert!(!v.property_p.pass);
    }
}
