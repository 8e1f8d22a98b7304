//! Local solutions at regular singular points.
//!
//! At a MUM point the full flag comes from one Frobenius run with the
//! exponent carried as a jet variable; at general points an exponent class
//! is solved slot by slot, extending the log degree exactly where the
//! recursion forces it.

use crate::error::{CyError, Result};
use crate::logseries::LogSeries;
use crate::operator::{indicial, Point, ThetaOperator};
use crate::poly::Poly;
use crate::series::Series;
use crate::{rat, Rat};
use num_traits::{One, ToPrimitive, Zero};

/// Canonical flag at the MUM point: y_k = sum_j ln(z)^j / j! * f_{k-j} with
/// z^{-r} f_0 in 1 + z Q[[z]] and z^{-r} f_1, ..., z^{-r} f_n in z Q[[z]].
#[derive(Clone, Debug)]
pub struct Flag {
    pub solutions: Vec<LogSeries>,
    pub mum_exponent: i64,
}

impl Flag {
    pub fn order(&self) -> usize {
        self.solutions.len()
    }

    /// The shared series f_i (including the z^r factor).
    pub fn f(&self, i: usize) -> Series {
        self.solutions[i].part(0)
    }

    /// f_i normalized by z^{-r}.
    pub fn f_normalized(&self, i: usize) -> Series {
        self.f(i).shift(-self.mum_exponent)
    }
}

/// Frobenius at a MUM point; requires Ind_0(L) = (T - r)^{order}.
pub fn mum_flag(op: &ThetaOperator, truncation: i64) -> Result<Flag> {
    let stripped = op.z_stripped();
    let ord = stripped.order();
    let ind = indicial(&stripped, &Point::Finite(Rat::zero()))?;
    let r = ind
        .mum_exponent(ord)
        .ok_or_else(|| CyError::NotMUM(ind.polynomial.render("T")))?;
    // the flag is y_0..y_{ord-1}, so jets are carried to eps^{ord-1}
    let jet_len = ord as i64;
    let slices = stripped.slices();
    // A_m as jets in eps = lambda - r, truncated at eps^{ord+1}
    let mut jets: Vec<Series> = vec![Series::one(jet_len)];
    for m in 1..truncation {
        let mut b = Series::zero(jet_len);
        let imax = (slices.len() as i64 - 1).min(m);
        for i in 1..=imax {
            let p = &slices[i as usize];
            if p.is_zero() {
                continue;
            }
            let pj = poly_at_jet(p, rat(r + m - i), jet_len);
            b = b.add(&pj.mul(&jets[(m - i) as usize]));
        }
        let p0 = poly_at_jet(&slices[0], rat(r + m), jet_len);
        let a = b.neg().mul(&p0.invert().expect("P0(r+m) != 0 for m >= 1"));
        jets.push(a);
    }
    // f_i = sum_m [eps^i] A_m z^{r+m}
    let mut fs = Vec::with_capacity(ord);
    for i in 0..ord as i64 {
        let coeffs: Vec<Rat> = jets
            .iter()
            .map(|a| if i < a.truncation() { a.coeff(i) } else { Rat::zero() })
            .collect();
        fs.push(Series::new(r, coeffs, r + truncation));
    }
    let solutions = (0..ord)
        .map(|k| LogSeries::new((0..=k).map(|j| fs[k - j].clone()).collect()))
        .collect();
    Ok(Flag { solutions, mum_exponent: r })
}

/// Evaluate a polynomial at c + eps in the jet ring Q[eps]/(eps^len).
fn poly_at_jet(p: &Poly, c: Rat, len: i64) -> Series {
    let arg = Series::new(0, vec![c, Rat::one()], len);
    let mut acc = Series::zero(len);
    for k in (0..=p.deg_or_zero()).rev() {
        acc = acc.mul(&arg).add(&Series::constant(p.coeff(k), len));
    }
    acc
}

/// Basis of local solutions at z = 0 for the integer exponent class,
/// produced deterministically slot by slot. The operator's indicial roots
/// must all be integers (shift/conjugate first otherwise).
pub fn integer_class_basis(op: &ThetaOperator, truncation: i64) -> Result<Vec<LogSeries>> {
    let stripped = op.z_stripped();
    let ord = stripped.order();
    let ind = indicial(&stripped, &Point::Finite(Rat::zero()))?;
    let total: usize = ind
        .rational_roots
        .iter()
        .filter(|(r, _)| r.denom().is_one())
        .map(|(_, m)| m)
        .sum();
    if total != ord {
        return Err(CyError::IrrationalExponents(
            "0".into(),
            ind.polynomial.render("T"),
        ));
    }
    integer_class_basis_of_class(&stripped, truncation)
}

/// Basis for the integer-exponent class only; other classes are ignored.
fn integer_class_basis_of_class(op: &ThetaOperator, truncation: i64) -> Result<Vec<LogSeries>> {
    let stripped = op.z_stripped();
    let ind = indicial(&stripped, &Point::Finite(Rat::zero()))?;
    let mut int_roots: Vec<(i64, usize)> = Vec::new();
    for (root, mult) in &ind.rational_roots {
        if root.denom().is_one() {
            int_roots.push((root.numer().to_i64().expect("small exponent"), *mult));
        }
    }
    if int_roots.is_empty() {
        return Ok(Vec::new());
    }
    let base = int_roots.iter().map(|(r, _)| *r).min().unwrap();
    let shifted = stripped.conjugate_z_power(&rat(base));
    let p0 = shifted.slices()[0].clone();
    let resonances: Vec<(i64, usize)> = int_roots.iter().map(|(r, m)| (r - base, *m)).collect();
    let mut basis = Vec::new();
    for &(m_star, mult) in &resonances {
        for j_star in 0..mult {
            let sol = slot_solution(&shifted, &p0, &resonances, m_star, j_star, truncation);
            basis.push(log_series_from_tpolys(&sol, base, truncation));
        }
    }
    Ok(basis)
}

/// One basis solution: u_m(t) per z-power, with the slot (m_star, j_star)
/// seeded and the kernel contribution at every other resonance set to zero.
fn slot_solution(
    op: &ThetaOperator,
    p0: &Poly,
    resonances: &[(i64, usize)],
    m_star: i64,
    j_star: usize,
    truncation: i64,
) -> Vec<Poly> {
    let slices = op.slices();
    let mut us: Vec<Poly> = Vec::with_capacity(truncation as usize);
    for m in 0..truncation {
        if m < m_star {
            us.push(Poly::zero());
            continue;
        }
        // right-hand side R_m = - sum_{i>=1} P_i(m - i + D) u_{m-i}
        let mut rhs = Poly::zero();
        let imax = (slices.len() as i64 - 1).min(m);
        for i in 1..=imax {
            let p = &slices[i as usize];
            if p.is_zero() {
                continue;
            }
            let term = apply_shifted_poly(p, rat(m - i), &us[(m - i) as usize]);
            rhs = &rhs - &term;
        }
        let mult = resonances
            .iter()
            .find(|(r, _)| *r == m)
            .map(|(_, mu)| *mu)
            .unwrap_or(0);
        let mut low = vec![Rat::zero(); mult];
        if m == m_star {
            low[j_star] = Rat::one();
        }
        us.push(solve_jet_equation(p0, rat(m), &rhs, mult, &low));
    }
    us
}

/// Apply Q(c + D) to u, where D = d/dt.
fn apply_shifted_poly(q: &Poly, c: Rat, u: &Poly) -> Poly {
    if u.is_zero() {
        return Poly::zero();
    }
    let taylor = q.shift(&c);
    let mut acc = Poly::zero();
    let mut du = u.clone();
    for i in 0..=taylor.deg_or_zero() {
        let tau = taylor.coeff(i);
        if !tau.is_zero() {
            acc = &acc + &du.scale(&tau);
        }
        if du.is_zero() {
            break;
        }
        du = du.derivative();
    }
    acc
}

/// Solve P0(c + D) u = rhs where c is a root of P0 of multiplicity `mult`;
/// the coefficients of t^0..t^{mult-1} in u are prescribed by `low`.
fn solve_jet_equation(p0: &Poly, c: Rat, rhs: &Poly, mult: usize, low: &[Rat]) -> Poly {
    let taylor = p0.shift(&c);
    debug_assert!((0..mult).all(|i| taylor.coeff(i).is_zero()));
    let lead = taylor.coeff(mult);
    debug_assert!(!lead.is_zero());
    let deg_r = rhs.degree().map(|d| d as i64).unwrap_or(-1);
    let deg_u = deg_r + mult as i64;
    let mut u = vec![Rat::zero(); (deg_u + 1).max(mult as i64) as usize];
    u[..mult].clone_from_slice(low);
    // determine u_{k+mult} from the t^k coefficient, top down
    let mut k = deg_r;
    while k >= 0 {
        let j = (k as usize) + mult;
        // [t^k] P0(c+D) u = sum_{i >= mult} taylor_i * (k+i)!/k! * u_{k+i}
        let mut acc = Rat::zero();
        for i in mult + 1..=taylor.deg_or_zero() {
            let idx = k as usize + i;
            if idx >= u.len() {
                break;
            }
            let tau = taylor.coeff(i);
            if !tau.is_zero() && !u[idx].is_zero() {
                acc += tau * falling(idx, i) * &u[idx];
            }
        }
        let rhs_k = rhs.coeff(k as usize);
        u[j] = (rhs_k - acc) / (&lead * falling(j, mult));
        k -= 1;
    }
    Poly::from_coeffs(u)
}

/// (n)(n-1)...(n-k+1) as a rational.
fn falling(n: usize, k: usize) -> Rat {
    let mut v = Rat::one();
    for i in 0..k {
        v = v * rat((n - i) as i64);
    }
    v
}

fn log_series_from_tpolys(us: &[Poly], base: i64, truncation: i64) -> LogSeries {
    let max_deg = us.iter().map(|u| u.deg_or_zero()).max().unwrap_or(0);
    let mut parts = Vec::with_capacity(max_deg + 1);
    let mut fact = Rat::one();
    for j in 0..=max_deg {
        if j > 0 {
            fact = &fact * &rat(j as i64);
        }
        let coeffs: Vec<Rat> = us.iter().map(|u| u.coeff(j) * &fact).collect();
        parts.push(Series::new(base, coeffs, base + truncation));
    }
    LogSeries::new(parts)
}

/// Exponent structure of one class modulo Z.
#[derive(Clone, Debug)]
pub struct ExponentClass {
    /// Exponents with multiplicities, ascending.
    pub exponents: Vec<(Rat, usize)>,
    /// Jordan block sizes of the local monodromy on this class, descending.
    pub block_sizes: Vec<usize>,
}

/// Local exponents and log-block structure at a point.
#[derive(Clone, Debug)]
pub struct LocalStructure {
    pub point: Point,
    pub classes: Vec<ExponentClass>,
    /// Monic indicial factor with no rational roots (1 if none).
    pub residual_factor: Poly,
}

/// Compute exponents and log-block sizes at p by moving p to the origin and
/// running resonant Frobenius per rational exponent class.
pub fn local_structure(op: &ThetaOperator, p: &Point, truncation: i64) -> Result<LocalStructure> {
    let moved = move_point_to_origin(op, p);
    let ind = indicial(&moved, &Point::Finite(Rat::zero()))?;
    // group rational exponents by class mod Z
    let mut classes: Vec<(Rat, Vec<(Rat, usize)>)> = Vec::new();
    for (root, mult) in &ind.rational_roots {
        let frac = root - Rat::from(root.floor().numer().clone());
        match classes.iter_mut().find(|(f, _)| f == &frac) {
            Some((_, list)) => list.push((root.clone(), *mult)),
            None => classes.push((frac, vec![(root.clone(), *mult)])),
        }
    }
    let mut out = Vec::new();
    for (frac, exps) in classes {
        let conj = moved.conjugate_z_power(&frac);
        let spread = {
            let ints: Vec<i64> = exps
                .iter()
                .map(|(r, _)| (r - &frac).to_integer().to_i64().unwrap_or(0))
                .collect();
            ints.iter().max().unwrap() - ints.iter().min().unwrap()
        };
        let basis = integer_class_basis_of_class(&conj, truncation + spread)?;
        let block_sizes = jordan_blocks_from_basis(&basis);
        out.push(ExponentClass { exponents: exps, block_sizes });
    }
    Ok(LocalStructure {
        point: p.clone(),
        classes: out,
        residual_factor: ind.residual_factor,
    })
}

pub fn move_point_to_origin(op: &ThetaOperator, p: &Point) -> ThetaOperator {
    match p {
        Point::Finite(q) if q.is_zero() => op.clone(),
        Point::Infinity => op.pullback_inversion(),
        Point::Finite(q) => {
            let d = op.to_d_form();
            let coeffs = d.coeffs().iter().map(|c| c.shift(q)).collect();
            crate::operator::DOperator::new(coeffs).to_theta_form()
        }
    }
}

/// Jordan block sizes from the log-degree filtration of a solution basis.
fn jordan_blocks_from_basis(basis: &[LogSeries]) -> Vec<usize> {
    let d = basis.len();
    if d == 0 {
        return Vec::new();
    }
    let max_deg = basis.iter().filter_map(|b| b.log_degree()).max().unwrap_or(0);
    // w[j] = dim of the subspace of solutions with log degree <= j
    let mut w = Vec::with_capacity(max_deg + 1);
    for j in 0..=max_deg {
        w.push(d - rank_of_high_parts(basis, j));
    }
    let mut blocks = Vec::new();
    for s in 1..=max_deg + 1 {
        let ge_s = w[s - 1] - if s >= 2 { w[s - 2] } else { 0 };
        let ge_s1 = if s <= max_deg { w[s] - w[s - 1] } else { 0 };
        for _ in 0..ge_s.saturating_sub(ge_s1) {
            blocks.push(s);
        }
    }
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    blocks
}

/// Rank over Q of the matrix of all part-coefficients with log index > j.
fn rank_of_high_parts(basis: &[LogSeries], j: usize) -> usize {
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for b in basis {
        let mut row = Vec::new();
        let t = b.truncation();
        for part_idx in (j + 1)..=b.log_degree().unwrap_or(0) {
            let part = b.part(part_idx);
            let mut k = part.valuation();
            while k < t {
                row.push(part.coeff(k));
                k += 1;
            }
        }
        rows.push(row);
    }
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    for r in rows.iter_mut() {
        r.resize(width, Rat::zero());
    }
    rank(rows)
}

use crate::linalg::rank;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DOperator;

    fn quintic() -> ThetaOperator {
        let mut p1 = Poly::one();
        for k in 1..=4 {
            p1 = &p1 * &Poly::from_i64(&[k, 5]);
        }
        ThetaOperator::new(vec![Poly::from_i64(&[0, 0, 0, 0, 1]), p1.scale(&rat(-5))])
    }

    fn binom_big(n: i64, k: i64) -> Rat {
        let mut v = Rat::one();
        for i in 0..k {
            v = v * rat(n - i) / rat(i + 1);
        }
        v
    }

    #[test]
    fn quintic_flag_matches_closed_form() {
        let flag = mum_flag(&quintic(), 21).unwrap();
        assert_eq!(flag.mum_exponent, 0);
        // f_0 coefficients are (5m)! / (m!)^5 = C(5m, m) C(4m, m) C(3m, m) C(2m, m)
        let f0 = flag.f(0);
        for m in 0..21 {
            let expect = binom_big(5 * m, m)
                * binom_big(4 * m, m)
                * binom_big(3 * m, m)
                * binom_big(2 * m, m);
            assert_eq!(f0.coeff(m), expect, "m = {m}");
        }
        assert_eq!(f0.coeff(1), rat(120));
        assert_eq!(f0.coeff(2), rat(113400));
        assert_eq!(flag.order(), 4);
        // f_1, f_2, f_3 vanish at z = 0; f_1 starts with the mirror-map 770
        for k in 1..=3 {
            assert!(flag.f(k).valuation() >= 1);
        }
        assert_eq!(flag.f(1).coeff(1), rat(770));
        // the operator annihilates every flag member
        for y in &flag.solutions {
            let out = quintic().apply(y);
            assert!(out.is_zero(), "flag member not annihilated: {:?}", out);
        }
    }

    #[test]
    fn theta_power_flag_is_pure_logs() {
        // theta^3: y_k = ln^k z / k!
        let op = ThetaOperator::new(vec![Poly::from_i64(&[0, 0, 0, 1])]);
        let flag = mum_flag(&op, 10).unwrap();
        for (k, y) in flag.solutions.iter().enumerate() {
            assert_eq!(y.log_degree(), Some(k));
            assert!(y.part(k).eq_to_common_trunc(&Series::one(10)));
            for j in 0..k {
                assert!(y.part(j).is_zero());
            }
        }
    }

    #[test]
    fn flag_extension_is_stable() {
        let f1 = mum_flag(&quintic(), 10).unwrap();
        let f2 = mum_flag(&quintic(), 20).unwrap();
        for k in 0..4 {
            assert!(f1.f(k).eq_to_common_trunc(&f2.f(k)));
        }
    }

    #[test]
    fn quintic_not_mum_after_shift() {
        // at a regular point the indicial polynomial is T(T-1)(T-2)(T-3)
        let d = quintic().to_d_form();
        let shifted = DOperator::new(d.coeffs().iter().map(|c| c.shift(&rat(1))).collect());
        assert!(matches!(
            mum_flag(&shifted.to_theta_form(), 5),
            Err(CyError::NotMUM(_))
        ));
    }

    #[test]
    fn regular_point_structure_no_logs() {
        let ls = local_structure(&quintic(), &Point::Finite(rat(7)), 12).unwrap();
        assert_eq!(ls.classes.len(), 1);
        let c = &ls.classes[0];
        assert_eq!(c.block_sizes, vec![1, 1, 1, 1]);
        assert_eq!(c.exponents.len(), 4);
    }

    #[test]
    fn quintic_conifold_block() {
        let p = Point::Finite(Rat::new(1.into(), 3125.into()));
        let ls = local_structure(&quintic(), &p, 16).unwrap();
        assert_eq!(ls.classes.len(), 1);
        let c = &ls.classes[0];
        assert_eq!(c.exponents, vec![(rat(0), 1), (rat(1), 2), (rat(2), 1)]);
        assert_eq!(c.block_sizes, vec![2, 1, 1]);
    }

    #[test]
    fn mum_structure_is_single_block() {
        let ls = local_structure(&quintic(), &Point::Finite(rat(0)), 12).unwrap();
        assert_eq!(ls.classes.len(), 1);
        assert_eq!(ls.classes[0].block_sizes, vec![4]);
    }

    #[test]
    fn basis_at_distinct_integer_exponents() {
        // d^2 at 0: exponents 0, 1; basis {1, z}, no logs
        let d2 = DOperator::d_power(2).to_theta_form();
        let basis = integer_class_basis(&d2, 8).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(basis.iter().all(|b| b.is_log_free()));
        let vals: Vec<i64> = basis.iter().map(|b| b.part(0).valuation()).collect();
        assert_eq!(vals, vec![0, 1]);
    }

    #[test]
    fn slot_basis_annihilated_by_operator() {
        let q = quintic();
        let p = Point::Finite(Rat::new(1.into(), 3125.into()));
        let moved = move_point_to_origin(&q, &p);
        let basis = integer_class_basis(&moved, 14).unwrap();
        assert_eq!(basis.len(), 4);
        for b in &basis {
            let out = moved.apply(b);
            assert!(out.is_zero(), "not annihilated: {:?}", out);
        }
    }
}
