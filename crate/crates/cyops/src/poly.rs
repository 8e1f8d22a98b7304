//! Dense univariate polynomials over the rationals.
//!
//! Used both for polynomials in z (operator slices, rational function parts)
//! and for indicial polynomials in T.

use crate::arith::divisors;
use crate::{rat, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients indexed by degree; the highest-index coefficient is nonzero
/// unless the polynomial is zero (empty vector).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { coeffs: vec![c] }
        }
    }

    /// The variable itself (T or z depending on context).
    pub fn var() -> Self {
        Poly {
            coeffs: vec![Rat::zero(), Rat::one()],
        }
    }

    /// c * x^k
    pub fn monomial(c: Rat, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat(i as i64 + 1))
                .collect(),
        )
    }

    /// Substitute another polynomial for the variable.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Taylor shift: p(x + a).
    pub fn shift(&self, a: &Rat) -> Poly {
        let inner = Poly::from_coeffs(vec![a.clone(), Rat::one()]);
        self.compose(&inner)
    }

    /// p(c * x) for a nonzero scalar c.
    pub fn scale_arg(&self, c: &Rat) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut ck = Rat::one();
        for a in &self.coeffs {
            out.push(a * &ck);
            ck *= c;
        }
        Poly::from_coeffs(out)
    }

    /// p(-x)
    pub fn negate_arg(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.leading_coeff();
        self.scale(&lc.recip())
    }

    /// Euclidean division: self = q * d + r with deg r < deg d.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() < dd + 1 {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        let lc = d.leading_coeff();
        for k in (dd..r.len()).rev() {
            let c = &r[k] / &lc;
            if !c.is_zero() {
                for j in 0..=dd {
                    let t = &d.coeffs[j] * &c;
                    r[k - dd + j] = &r[k - dd + j] - &t;
                }
            }
            q[k - dd] = c;
        }
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Clear denominators and integer content: returns (primitive integer
    /// polynomial with positive leading coefficient as Poly, scalar s) with
    /// self = s * primitive.
    pub fn primitive_part(&self) -> (Poly, Rat) {
        if self.is_zero() {
            return (Poly::zero(), Rat::one());
        }
        let mut den_lcm = Int::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let ints: Vec<Int> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut content = Int::zero();
        for v in &ints {
            content = content.gcd(v);
        }
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        let prim = Poly::from_coeffs(ints.iter().map(|v| Rat::from(v / &content)).collect());
        let s = Rat::new(content, den_lcm);
        (prim, s)
    }

    /// Rational roots with multiplicities, plus the residual factor with no
    /// rational roots. Roots are sorted ascending.
    pub fn rational_roots(&self) -> (Vec<(Rat, usize)>, Poly) {
        assert!(!self.is_zero());
        let mut roots: Vec<(Rat, usize)> = Vec::new();
        let mut f = self.clone();
        // strip x^k
        let mut zero_mult = 0;
        while !f.is_zero() && f.coeff(0).is_zero() {
            f = Poly::from_coeffs(f.coeffs[1..].to_vec());
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((Rat::zero(), zero_mult));
        }
        if f.is_constant() {
            return (roots, f.monic_residual(self));
        }
        let (prim, _) = f.primitive_part();
        let lc: Int = prim.leading_coeff().numer().clone();
        let c0: Int = prim.coeff(0).numer().clone();
        let num_divs = divisors(&c0, 1 << 20).expect("divisor explosion in rational root search");
        let den_divs = divisors(&lc, 1 << 20).expect("divisor explosion in rational root search");
        let mut candidates: Vec<Rat> = Vec::new();
        for p in &num_divs {
            for q in &den_divs {
                if p.gcd(q).is_one() {
                    candidates.push(Rat::new(p.clone(), q.clone()));
                    candidates.push(Rat::new(-p.clone(), q.clone()));
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        for cand in candidates {
            if f.is_constant() {
                break;
            }
            let mut mult = 0;
            loop {
                if f.eval(&cand).is_zero() {
                    let lin = Poly::from_coeffs(vec![-cand.clone(), Rat::one()]);
                    let (q, r) = f.divrem(&lin);
                    debug_assert!(r.is_zero());
                    f = q;
                    mult += 1;
                } else {
                    break;
                }
            }
            if mult > 0 {
                roots.push((cand, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, f.monic())
    }

    fn monic_residual(&self, _orig: &Poly) -> Poly {
        self.monic()
    }

    /// Resultant Res(self, other) over Q (by the Euclidean remainder sequence).
    pub fn resultant(&self, other: &Poly) -> Rat {
        let mut a = self.clone();
        let mut b = other.clone();
        let mut res = Rat::one();
        loop {
            if b.is_zero() {
                return if a.is_constant() && !a.is_zero() {
                    // deg a = 0: res *= a^deg b(=0) handled below; Res(c, 0)=0 unless..
                    if a.degree() == Some(0) {
                        res
                    } else {
                        Rat::zero()
                    }
                } else {
                    Rat::zero()
                };
            }
            if b.is_constant() {
                let da = a.degree().unwrap_or(0) as u32;
                return res * pow_rat(&b.leading_coeff(), da);
            }
            let da = a.degree().unwrap_or(0);
            let db = b.degree().unwrap();
            if da < db {
                std::mem::swap(&mut a, &mut b);
                if da % 2 == 1 && db % 2 == 1 {
                    res = -res;
                }
                continue;
            }
            let (_, r) = a.divrem(&b);
            let dr = r.degree().map(|d| d as i64).unwrap_or(-1);
            // Res(a,b) = (-1)^{da db} Res(b,a); Res(b, r) relation:
            // Res(a, b) = lc(b)^{da - dr} * (-1)^{da*db} * Res(b, r)
            let lcb = b.leading_coeff();
            res = res * pow_rat(&lcb, (da as i64 - dr) as u32);
            if (da * db) % 2 == 1 {
                res = -res;
            }
            a = b;
            b = r;
        }
    }

    /// Render with the given variable name, grammar-compatible:
    /// coefficients as integers or p/q, explicit `*` and `^`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut term = String::new();
            let mag = c.abs();
            let sign = c.is_negative();
            let coeff_str = rat_to_text(&mag);
            if k == 0 {
                term.push_str(&coeff_str);
            } else {
                if mag.is_one() {
                    term.push_str(var);
                } else {
                    term.push_str(&coeff_str);
                    term.push('*');
                    term.push_str(var);
                }
                if k > 1 {
                    term.push('^');
                    term.push_str(&k.to_string());
                }
            }
            if parts.is_empty() {
                if sign {
                    parts.push(format!("-{term}"));
                } else {
                    parts.push(term);
                }
            } else if sign {
                parts.push(format!("- {term}"));
            } else {
                parts.push(format!("+ {term}"));
            }
        }
        parts.join(" ")
    }
}

pub fn pow_rat(x: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

pub fn rat_to_text(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Poly::from_coeffs(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        Poly::from_coeffs(out)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_frac;

    #[test]
    fn divrem_roundtrip() {
        let a = Poly::from_i64(&[1, 0, -3, 2, 5]);
        let b = Poly::from_i64(&[2, 1, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(&(&q * &b) + &r, a);
    }

    #[test]
    fn gcd_of_common_factor() {
        let f = Poly::from_i64(&[-1, 1]); // x - 1
        let a = &f * &Poly::from_i64(&[1, 1]);
        let b = &f * &Poly::from_i64(&[3, 0, 1]);
        assert_eq!(a.gcd(&b), f.monic());
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (x - 1/2)^2 (x + 3) x
        let f = Poly::from_coeffs(vec![rat_frac(-1, 2), Rat::one()]);
        let p = &(&f * &f) * &Poly::from_i64(&[3, 1]);
        let p = &p * &Poly::var();
        let (roots, residual) = p.rational_roots();
        assert!(residual.is_constant());
        assert_eq!(
            roots,
            vec![
                (rat(-3), 1),
                (rat(0), 1),
                (rat_frac(1, 2), 2),
            ]
        );
    }

    #[test]
    fn resultant_detects_common_roots() {
        let a = Poly::from_i64(&[-2, 1]); // x - 2
        let b = Poly::from_i64(&[-6, 5, -1]); // -(x-2)(x-3)
        assert!(a.resultant(&b).is_zero());
        let c = Poly::from_i64(&[-3, 1]);
        assert!(!a.resultant(&c).is_zero());
        // Res(x^2 - 1, x^2 - 4) = 9 (pairwise differences product)
        let f = Poly::from_i64(&[-1, 0, 1]);
        let g = Poly::from_i64(&[-4, 0, 1]);
        assert_eq!(f.resultant(&g), rat(9));
    }

    #[test]
    fn shift_and_eval() {
        let p = Poly::from_i64(&[1, 2, 1]); // (x+1)^2
        let q = p.shift(&rat(1)); // (x+2)^2
        assert_eq!(q.eval(&rat(0)), rat(4));
    }
}
