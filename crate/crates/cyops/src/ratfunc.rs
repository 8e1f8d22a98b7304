//! Rational functions in z as reduced quotients of dense polynomials.

use crate::error::{CyError, Result};
use crate::poly::Poly;
use crate::series::Series;
use crate::{rat, Rat};
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// num/den with den monic and gcd(num, den) = 1. Zero is 0/1.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc { num: Poly::zero(), den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (num, r1) = num.divrem(&g);
        debug_assert!(r1.is_zero());
        let (den, r2) = den.divrem(&g);
        debug_assert!(r2.is_zero());
        let lc = den.leading_coeff();
        RatFunc { num: num.scale(&lc.recip()), den: den.scale(&lc.recip()) }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        RatFunc::constant(Rat::zero())
    }

    pub fn one() -> Self {
        RatFunc::constant(Rat::one())
    }

    pub fn var() -> Self {
        RatFunc::from_poly(Poly::var())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn recip(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(CyError::Domain("division by the zero rational function".into()));
        }
        Ok(RatFunc::new(self.den.clone(), self.num.clone()))
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den)
    }

    pub fn nth_derivative(&self, n: usize) -> RatFunc {
        let mut f = self.clone();
        for _ in 0..n {
            f = f.derivative();
        }
        f
    }

    pub fn pow_i(&self, e: i64) -> Result<RatFunc> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Substitute z + p for z.
    pub fn shift(&self, p: &Rat) -> RatFunc {
        RatFunc::new(self.num.shift(p), self.den.shift(p))
    }

    /// Substitute c*z for z (c nonzero).
    pub fn scale_arg(&self, c: &Rat) -> RatFunc {
        RatFunc::new(self.num.scale_arg(c), self.den.scale_arg(c))
    }

    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Order of the pole at z = p (0 if regular there).
    pub fn pole_order_at(&self, p: &Rat) -> usize {
        let mut d = self.den.shift(p);
        let mut k = 0;
        while !d.is_zero() && d.coeff(0).is_zero() {
            d = Poly::from_coeffs(d.coeffs()[1..].to_vec());
            k += 1;
        }
        k
    }

    /// Residue at z = p.
    pub fn residue_at(&self, p: &Rat) -> Rat {
        let num = self.num.shift(p);
        let den = self.den.shift(p);
        let mut unit = den.coeffs().to_vec();
        let mut k = 0usize;
        while !unit.is_empty() && unit[0].is_zero() {
            unit.remove(0);
            k += 1;
        }
        if k == 0 {
            return Rat::zero();
        }
        let t = k as i64;
        let ns = Series::from_poly(&num, t);
        let u = Series::from_poly(&Poly::from_coeffs(unit), t);
        let inv = u.invert_unit().expect("unit after stripping zeros");
        ns.mul(&inv).coeff(t - 1)
    }

    /// Laurent expansion at z = 0 with all coefficients of z^k, k < trunc.
    pub fn expand(&self, trunc: i64) -> Series {
        if self.is_zero() {
            return Series::zero(trunc);
        }
        let mut unit = self.den.coeffs().to_vec();
        let mut k = 0i64;
        while unit[0].is_zero() {
            unit.remove(0);
            k += 1;
        }
        let need = trunc + k;
        let n = Series::from_poly(&self.num, need.max(0));
        let u = Series::from_poly(&Poly::from_coeffs(unit), need.max(0));
        let inv = u.invert_unit().expect("unit part");
        n.mul(&inv).shift(-k).truncate(trunc)
    }

    pub fn render(&self) -> String {
        if self.is_polynomial() {
            self.num.render("z")
        } else {
            format!("({}) / ({})", self.num.render("z"), self.den.render("z"))
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Outcome of searching for a rational g with g'/g = u.
pub enum LogDeriv {
    Found(RatFunc),
    NonIntegralResidue { residue: Rat, place: String },
    NoSolution,
}

/// Rothstein-Trager style search for a rational function g with g'/g = u.
///
/// g exists iff u is proper with squarefree denominator and all residues
/// (read off as roots of Res_z(den, num - t den')) are integers; then
/// g = prod gcd(den, num - e den')^e over the integer roots e.
pub fn log_derivative_rational(u: &RatFunc) -> LogDeriv {
    if u.is_zero() {
        return LogDeriv::Found(RatFunc::one());
    }
    let Some((roots, residual)) = residue_spectrum(u) else {
        return LogDeriv::NoSolution;
    };
    let d = u.den().clone();
    let n = u.num().clone();
    let dp = d.derivative();
    let mut g = RatFunc::one();
    let mut covered = 0usize;
    for (root, _) in &roots {
        if root.is_zero() {
            continue;
        }
        if !root.denom().is_one() {
            return LogDeriv::NonIntegralResidue {
                residue: root.clone(),
                place: d.render("z"),
            };
        }
        let e = root.numer().to_i64().expect("residue exponent fits i64");
        let ge = d.gcd(&(&n - &dp.scale(root)));
        if ge.is_constant() {
            continue;
        }
        covered += ge.deg_or_zero();
        g = &g * &RatFunc::from_poly(ge).pow_i(e).expect("nonzero");
    }
    if covered < d.deg_or_zero() {
        if !residual.is_constant() {
            return LogDeriv::NonIntegralResidue {
                residue: Rat::zero(),
                place: format!("irrational residue roots of {}", residual.render("t")),
            };
        }
        return LogDeriv::NoSolution;
    }
    // exact verification
    let check = &g.derivative() / &g;
    if &check == u {
        LogDeriv::Found(g)
    } else {
        LogDeriv::NoSolution
    }
}

/// Rational roots of the Rothstein-Trager resultant (the candidate residues
/// of u at its poles) plus the residual factor with no rational roots.
/// None if u cannot be any log-derivative (improper, or non-simple poles).
fn residue_spectrum(u: &RatFunc) -> Option<(Vec<(Rat, usize)>, Poly)> {
    let d = u.den().clone();
    let n = u.num().clone();
    if d.degree() == Some(0) {
        // nonzero polynomial: exp of a polynomial is not algebraic
        return None;
    }
    if n.deg_or_zero() >= d.deg_or_zero() {
        return None;
    }
    if !d.gcd(&d.derivative()).is_constant() {
        return None;
    }
    let dp = d.derivative();
    // interpolate R(t) = Res_z(d, n - t d') from deg(d)+1 sample points
    let deg = d.deg_or_zero();
    let pts: Vec<Rat> = (0..=deg as i64).map(rat).collect();
    let vals: Vec<Rat> = pts
        .iter()
        .map(|t| {
            let shifted = &n - &dp.scale(t);
            d.resultant(&shifted)
        })
        .collect();
    let r_poly = lagrange_interpolate(&pts, &vals);
    Some(r_poly.rational_roots())
}

/// Whether u = g'/g for some algebraic function g over Q(z): u must be
/// proper with squarefree denominator and all residues rational.
pub fn is_algebraic_log_derivative(u: &RatFunc) -> bool {
    if u.is_zero() {
        return true;
    }
    let Some((roots, _)) = residue_spectrum(u) else {
        return false;
    };
    let d = u.den();
    let n = u.num();
    let dp = d.derivative();
    let mut covered = 0usize;
    for (root, _) in &roots {
        if root.is_zero() {
            continue;
        }
        let ge = d.gcd(&(n - &dp.scale(root)));
        covered += ge.deg_or_zero();
    }
    covered == d.deg_or_zero()
}

/// Recover a rational function from its Taylor expansion at 0 by an exact
/// linear solve on the denominator coefficients; the result is verified by
/// re-expansion against every known coefficient of the input.
pub fn pade_reconstruct(f: &Series, max_num_deg: usize, max_den_deg: usize) -> Result<RatFunc> {
    assert!(f.valuation() >= 0, "shift Laurent input before Pade");
    let t = f.truncation();
    let p = max_num_deg as i64;
    let q = max_den_deg;
    if t < p + q as i64 + 2 {
        return Err(CyError::Domain(format!(
            "Pade({max_num_deg},{max_den_deg}) needs truncation {} but got {t}",
            p + q as i64 + 2
        )));
    }
    // (f * B) has zero coefficients above degree p, for all known orders
    let mut rows = Vec::new();
    for e in p + 1..t {
        let row: Vec<Rat> = (0..=q as i64)
            .map(|j| if e - j >= 0 { f.coeff(e - j) } else { Rat::zero() })
            .collect();
        rows.push(row);
    }
    let b = crate::linalg::nullspace_vector(&rows, q + 1).ok_or(CyError::NoRationalFit)?;
    let den = Poly::from_coeffs(b);
    let num_series = f.mul(&Series::from_poly(&den, t));
    let num = Poly::from_coeffs((0..=p).map(|k| num_series.coeff(k)).collect());
    if num.is_zero() && !f.is_zero() {
        return Err(CyError::NoRationalFit);
    }
    let rf = RatFunc::new(num, den);
    // exact re-expansion check over the whole window
    let back = rf.expand(t);
    if back.eq_to_common_trunc(f) {
        Ok(rf)
    } else {
        Err(CyError::NoRationalFit)
    }
}

fn lagrange_interpolate(xs: &[Rat], ys: &[Rat]) -> Poly {
    let mut acc = Poly::zero();
    for (i, xi) in xs.iter().enumerate() {
        let mut basis = Poly::one();
        let mut denom = Rat::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = &basis * &Poly::from_coeffs(vec![-xj.clone(), Rat::one()]);
                denom *= xi - xj;
            }
        }
        acc = &acc + &basis.scale(&(&ys[i] / &denom));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_frac;

    fn rf(num: &[i64], den: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_i64(num), Poly::from_i64(den))
    }

    #[test]
    fn reduction_and_monic_denominator() {
        // (2z+2)/(2z^2-2) = 1/(z-1)
        let f = rf(&[2, 2], &[-2, 0, 2]);
        assert_eq!(f, rf(&[1], &[-1, 1]));
        assert!(f.den().leading_coeff().is_one());
    }

    #[test]
    fn residues_and_poles() {
        // 3/(z-2) + 5/(z+1)
        let f = &rf(&[3], &[-2, 1]) + &rf(&[5], &[1, 1]);
        assert_eq!(f.residue_at(&rat(2)), rat(3));
        assert_eq!(f.residue_at(&rat(-1)), rat(5));
        assert_eq!(f.residue_at(&rat(0)), rat(0));
        assert_eq!(f.pole_order_at(&rat(2)), 1);
        // double pole: residue of 1/z^2 at 0 is 0
        let g = rf(&[1], &[0, 0, 1]);
        assert_eq!(g.residue_at(&rat(0)), rat(0));
        assert_eq!(g.pole_order_at(&rat(0)), 2);
        let h = rf(&[1, 2], &[0, 0, 1]); // (1+2z)/z^2
        assert_eq!(h.residue_at(&rat(0)), rat(2));
    }

    #[test]
    fn expansion_matches_geometric() {
        let f = rf(&[1], &[1, -1]); // 1/(1-z)
        let s = f.expand(6);
        for k in 0..6 {
            assert_eq!(s.coeff(k), rat(1));
        }
        let g = rf(&[1], &[0, 1]); // 1/z
        let s = g.expand(3);
        assert_eq!(s.coeff(-1), rat(1));
        assert_eq!(s.coeff(0), rat(0));
    }

    #[test]
    fn log_derivative_recovers_rational_function() {
        // g = z^2 (z-1)^{-3}: g'/g = 2/z - 3/(z-1)
        let u = &rf(&[2], &[0, 1]) + &rf(&[-3], &[-1, 1]);
        match log_derivative_rational(&u) {
            LogDeriv::Found(g) => {
                let expect = &rf(&[0, 0, 1], &[1]) / &rf(&[-1, 3, -3, 1], &[1]);
                assert_eq!(g, expect);
            }
            _ => panic!("expected a rational solution"),
        }
    }

    #[test]
    fn log_derivative_rejects_half_residue() {
        let u = rf(&[1], &[0, 2]); // residue 1/2 at 0
        match log_derivative_rational(&u) {
            LogDeriv::NonIntegralResidue { residue, .. } => {
                assert_eq!(residue, rat_frac(1, 2));
            }
            _ => panic!("expected non-integral residue"),
        }
    }

    #[test]
    fn log_derivative_rejects_exponential() {
        // u = 1 would need g = e^z
        let u = RatFunc::one();
        assert!(matches!(log_derivative_rational(&u), LogDeriv::NoSolution));
    }

    #[test]
    fn pade_recovers_simple_fractions() {
        // (1+z)/(1-z) = 1 + 2z + 2z^2 + ...
        let mut coeffs = vec![rat(1)];
        coeffs.extend((1..8).map(|_| rat(2)));
        let f = Series::new(0, coeffs, 8);
        let r = pade_reconstruct(&f, 1, 1).unwrap();
        assert_eq!(r, rf(&[1, 1], &[1, -1]));
        // a plain polynomial with slack denominator bound
        let f = Series::new(0, vec![rat(1), rat(1)], 6);
        let r = pade_reconstruct(&f, 1, 0).unwrap();
        assert_eq!(r, rf(&[1, 1], &[1]));
    }

    #[test]
    fn pade_matches_squared_pole() {
        // 1/(1-5z)^2 = sum (m+1) 5^m z^m
        let t = 9;
        let coeffs: Vec<Rat> = (0..t)
            .map(|m| rat(m + 1) * crate::poly::pow_rat(&rat(5), m as u32))
            .collect();
        let f = Series::new(0, coeffs, t);
        let r = pade_reconstruct(&f, 0, 2).unwrap();
        assert_eq!(r, rf(&[1], &[1, -10, 25]));
    }

    #[test]
    fn pade_rejects_non_rational_window() {
        // factorial denominators cannot be matched by (2,2) within window 8
        let t = 10;
        let mut fact = Rat::one();
        let mut coeffs = Vec::new();
        for m in 0..t {
            if m > 0 {
                fact = fact * rat(m) * rat(m);
            }
            coeffs.push(fact.clone().recip());
        }
        let f = Series::new(0, coeffs, t);
        assert!(matches!(
            pade_reconstruct(&f, 2, 2),
            Err(CyError::NoRationalFit)
        ));
    }
}
