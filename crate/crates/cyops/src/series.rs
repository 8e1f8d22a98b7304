//! Truncated power series over Q with an explicit valuation shift.
//!
//! A `Series` represents z^val * (c_0 + c_1 z + ...) with all coefficients of
//! z^k known exactly for k < trunc. Binary operations propagate truncation
//! pessimistically; no operation ever fabricates a coefficient beyond the
//! window it can actually know.

use crate::error::{CyError, Result};
use crate::poly::{rat_to_text, Poly};
use crate::{rat, Rat};
use num_traits::{One, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    val: i64,
    coeffs: Vec<Rat>,
    trunc: i64,
}

impl Series {
    /// Build from coefficients of z^{val}, z^{val+1}, ... known below `trunc`.
    pub fn new(val: i64, coeffs: Vec<Rat>, trunc: i64) -> Self {
        assert!(val + coeffs.len() as i64 <= trunc, "coefficients beyond truncation");
        let mut s = Series { val, coeffs, trunc };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.val = self.trunc;
                self.coeffs.clear();
            }
            Some(k) => {
                if k > 0 {
                    self.coeffs.drain(..k);
                    self.val += k as i64;
                }
            }
        }
    }

    pub fn zero(trunc: i64) -> Self {
        Series { val: trunc, coeffs: Vec::new(), trunc }
    }

    pub fn one(trunc: i64) -> Self {
        Series::constant(Rat::one(), trunc)
    }

    pub fn constant(c: Rat, trunc: i64) -> Self {
        Series::new(0, vec![c], trunc)
    }

    /// z^k, exact to the given truncation.
    pub fn monomial(k: i64, trunc: i64) -> Self {
        Series::new(k, vec![Rat::one()], trunc)
    }

    pub fn from_poly(p: &Poly, trunc: i64) -> Self {
        let coeffs: Vec<Rat> = p
            .coeffs()
            .iter()
            .take(trunc.max(0) as usize)
            .cloned()
            .collect();
        Series::new(0, coeffs, trunc)
    }

    pub fn truncation(&self) -> i64 {
        self.trunc
    }

    /// Valuation of the first known nonzero coefficient; `trunc` if zero.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of z^k. Panics if k is at or beyond the truncation.
    pub fn coeff(&self, k: i64) -> Rat {
        assert!(k < self.trunc, "coefficient z^{k} beyond truncation {}", self.trunc);
        if k < self.val || k >= self.val + self.coeffs.len() as i64 {
            Rat::zero()
        } else {
            self.coeffs[(k - self.val) as usize].clone()
        }
    }

    /// Iterate over (exponent, coefficient) pairs of stored coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.val + i as i64, c))
    }

    pub fn truncate(&self, trunc: i64) -> Series {
        assert!(trunc <= self.trunc);
        let keep = ((trunc - self.val).max(0) as usize).min(self.coeffs.len());
        Series::new(self.val.min(trunc), self.coeffs[..keep].to_vec(), trunc)
    }

    pub fn add(&self, other: &Series) -> Series {
        let trunc = self.trunc.min(other.trunc);
        let val = self.val.min(other.val).min(trunc);
        let mut coeffs = vec![Rat::zero(); (trunc - val) as usize];
        for (k, c) in self.iter() {
            if k < trunc {
                coeffs[(k - val) as usize] = c.clone();
            }
        }
        for (k, c) in other.iter() {
            if k < trunc {
                let idx = (k - val) as usize;
                coeffs[idx] = &coeffs[idx] + c;
            }
        }
        Series::new(val, coeffs, trunc)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        Series {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &Rat) -> Series {
        if c.is_zero() {
            return Series::zero(self.trunc);
        }
        Series {
            val: self.val,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiply by z^k.
    pub fn shift(&self, k: i64) -> Series {
        Series {
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            trunc: self.trunc + k,
        }
    }

    pub fn mul(&self, other: &Series) -> Series {
        // product coefficients are reliable strictly below this bound
        let trunc = (self.trunc + other.val).min(other.trunc + self.val);
        if self.is_zero() || other.is_zero() {
            return Series::zero(trunc);
        }
        let val = self.val + other.val;
        let n = (trunc - val).max(0) as usize;
        let mut out = vec![Rat::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if i >= n {
                break;
            }
            let jmax = n - i;
            for (j, b) in other.coeffs.iter().take(jmax).enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Series::new(val, out, trunc)
    }

    /// Multiplicative inverse of z^v * u with u a unit; result has valuation -v.
    pub fn invert(&self) -> Result<Series> {
        if self.is_zero() {
            return Err(CyError::NotAUnit);
        }
        let n = (self.trunc - self.val) as usize;
        let u = |k: usize| -> Rat {
            self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
        };
        let u0 = u(0);
        let mut inv = Vec::with_capacity(n);
        inv.push(u0.recip());
        for m in 1..n {
            let mut acc = Rat::zero();
            for k in 1..=m.min(self.coeffs.len() - 1) {
                let uk = &self.coeffs[k];
                if !uk.is_zero() {
                    acc += uk * &inv[m - k];
                }
            }
            inv.push(-acc / &u0);
        }
        let trunc = self.trunc - 2 * self.val;
        Ok(Series::new(-self.val, inv, trunc))
    }

    /// Inverse of a unit series (valuation 0, nonzero constant term).
    pub fn invert_unit(&self) -> Result<Series> {
        if self.val != 0 {
            return Err(CyError::NotAUnit);
        }
        self.invert()
    }

    pub fn div(&self, other: &Series) -> Result<Series> {
        Ok(self.mul(&other.invert()?))
    }

    /// d/dz
    pub fn derivative(&self) -> Series {
        let coeffs: Vec<Rat> = self
            .iter()
            .map(|(k, c)| c * rat(k))
            .collect();
        Series::new(self.val - 1, coeffs, self.trunc - 1)
    }

    /// z d/dz
    pub fn theta(&self) -> Series {
        let coeffs: Vec<Rat> = self.iter().map(|(k, c)| c * rat(k)).collect();
        Series::new(self.val, coeffs, self.trunc)
    }

    /// Substitute g (with g(0) = 0) into self; self must have valuation >= 0.
    pub fn compose(&self, g: &Series) -> Result<Series> {
        if !g.is_zero() && g.val < 1 {
            return Err(CyError::CompositionAtNonzeroPoint);
        }
        assert!(self.val >= 0, "composition of a Laurent series");
        let trunc = self.trunc.min(g.trunc);
        let mut acc = Series::zero(trunc);
        let mut pw = Series::one(trunc);
        for m in 0..trunc {
            if m >= self.trunc {
                break;
            }
            if m >= self.val {
                let c = self.coeff(m);
                if !c.is_zero() {
                    acc = acc.add(&pw.scale(&c));
                }
            }
            if pw.valuation() >= trunc {
                break;
            }
            pw = pw.mul(g).truncate_at_most(trunc);
        }
        Ok(acc.truncate_at_most(trunc))
    }

    fn truncate_at_most(&self, t: i64) -> Series {
        if self.trunc > t {
            self.truncate(t)
        } else {
            self.clone()
        }
    }

    /// Compositional inverse of f in z Q[[z]] with f'(0) != 0, by Newton
    /// iteration on `compose`.
    pub fn reverse(&self) -> Result<Series> {
        if self.val != 1 {
            return Err(CyError::NotReversible);
        }
        let t = self.trunc;
        if t < 2 {
            return Err(CyError::NotReversible);
        }
        let f1 = self.coeff(1);
        let fp = self.derivative();
        let mut g = Series::new(1, vec![f1.recip()], 2);
        // g agrees with the true inverse through degree c; each Newton step
        // doubles c. All work happens at truncation c_new + 1.
        let mut c: i64 = 1;
        let target = t - 1;
        while c < target {
            let c_new = (2 * c).min(target);
            let w = c_new + 1;
            // zero-pad g to the new working precision
            g = Series::new(g.val, g.coeffs.clone(), w);
            let fg = self.truncate_at_most(w).compose(&g)?;
            let err = fg.sub(&Series::monomial(1, w));
            let deriv = fp.truncate_at_most(w).compose(&g)?;
            let corr = err.div(&deriv)?;
            g = g.sub(&corr.truncate_at_most(w));
            debug_assert!(g.truncation() >= w);
            g = g.truncate(w);
            c = c_new;
        }
        Ok(g)
    }

    /// exp of a series with positive valuation.
    pub fn exp(&self) -> Series {
        assert!(self.val >= 1 || self.is_zero(), "exp needs a zero constant term");
        let t = self.trunc;
        let n = t.max(0) as usize;
        let mut e = vec![Rat::zero(); n];
        if n == 0 {
            return Series::zero(t);
        }
        e[0] = Rat::one();
        for m in 1..n {
            let mut acc = Rat::zero();
            for k in 1..=m {
                let sk = if (k as i64) < self.val || (k as i64) >= self.trunc {
                    Rat::zero()
                } else {
                    self.coeff(k as i64)
                };
                if !sk.is_zero() {
                    acc += sk * rat(k as i64) * &e[m - k];
                }
            }
            e[m] = acc / rat(m as i64);
        }
        Series::new(0, e, t)
    }

    /// log of a unit series with constant term 1.
    pub fn log(&self) -> Result<Series> {
        if self.val != 0 || !self.coeff(0).is_one() {
            return Err(CyError::NonUnitConstantTerm(
                if self.val != 0 { "0".into() } else { rat_to_text(&self.coeff(0)) },
            ));
        }
        let h = self.theta().div(self)?; // theta(log f)
        let coeffs: Vec<Rat> = h.iter().map(|(k, c)| c / rat(k)).collect();
        Ok(Series::new(h.valuation().max(1), coeffs, h.truncation()))
    }

    /// n-th root of a unit series with constant term 1, normalized to
    /// constant term 1.
    pub fn nth_root_unit(&self, n: u32) -> Result<Series> {
        assert!(n > 0);
        if self.val != 0 || !self.coeff(0).is_one() {
            return Err(CyError::NonUnitConstantTerm(
                if self.val != 0 { "0".into() } else { rat_to_text(&self.coeff(0)) },
            ));
        }
        let l = self.log()?;
        Ok(l.scale(&Rat::new(1.into(), n.into())).exp())
    }

    pub fn pow(&self, e: u32) -> Series {
        let mut acc = Series::one(if e == 0 { self.trunc } else { i64::MAX / 4 });
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Equality of all coefficients below the smaller truncation.
    pub fn eq_to_common_trunc(&self, other: &Series) -> bool {
        let t = self.trunc.min(other.trunc);
        self.truncate_at_most(t) == other.truncate_at_most(t)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.iter().take(8) {
            if !c.is_zero() {
                parts.push(format!("{}*z^{}", rat_to_text(c), k));
            }
        }
        write!(f, "{} + O(z^{})", parts.join(" + "), self.trunc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_frac;

    fn geom(t: i64) -> Series {
        // 1/(1-z)
        Series::new(0, (0..t).map(|_| Rat::one()).collect(), t)
    }

    #[test]
    fn invert_one_minus_z_is_geometric() {
        let f = Series::new(0, vec![rat(1), rat(-1)], 10);
        assert_eq!(f.invert_unit().unwrap(), geom(10));
        assert_eq!(Series::one(10).invert_unit().unwrap(), Series::one(10));
    }

    #[test]
    fn invert_square_of_unit() {
        // 1/(1+z)^2 = 1 - 2z + 3z^2 - 4z^3 + ...
        let f = Series::new(0, vec![rat(1), rat(2), rat(1)], 8);
        let inv = f.invert_unit().unwrap();
        for m in 0..8 {
            let expect = if m % 2 == 0 { rat(m + 1) } else { rat(-(m + 1)) };
            assert_eq!(inv.coeff(m), expect);
        }
    }

    #[test]
    fn invert_is_involution() {
        let f = Series::new(0, vec![rat(2), rat(3), rat_frac(1, 5), rat(-7)], 12);
        let back = f.invert_unit().unwrap().invert_unit().unwrap();
        assert!(back.eq_to_common_trunc(&f));
    }

    #[test]
    fn mul_truncation_respects_valuation() {
        // (z^2 * unit known to z^5) * z^3 exact: products reliable below 5+3
        let a = Series::new(2, vec![rat(1), rat(4), rat(9)], 5);
        let b = Series::monomial(3, 40);
        let p = a.mul(&b);
        assert_eq!(p.truncation(), 8);
        assert_eq!(p.coeff(5), rat(1));
    }

    #[test]
    fn compose_with_square() {
        // f = sum z^m, g = z^2 -> sum z^{2m}
        let f = geom(10);
        let g = Series::monomial(2, 10);
        let c = f.compose(&g).unwrap();
        for m in 0..10 {
            assert_eq!(c.coeff(m), if m % 2 == 0 { rat(1) } else { rat(0) });
        }
        // identity inner series
        let id = Series::monomial(1, 10);
        assert!(f.compose(&id).unwrap().eq_to_common_trunc(&f));
        // direct substitution: (1+z) o (z + z^2) = 1 + z + z^2
        let f = Series::new(0, vec![rat(1), rat(1)], 10);
        let g = Series::new(1, vec![rat(1), rat(1)], 10);
        let c = f.compose(&g).unwrap();
        assert_eq!(c.coeff(0), rat(1));
        assert_eq!(c.coeff(1), rat(1));
        assert_eq!(c.coeff(2), rat(1));
        assert_eq!(c.coeff(3), rat(0));
    }

    #[test]
    fn reverse_of_z_plus_z2() {
        // Lagrange inversion oracle: coefficients of the inverse of z + z^2
        // are signed Catalan numbers: z - z^2 + 2z^3 - 5z^4 + 14z^5 - ...
        let f = Series::new(1, vec![rat(1), rat(1)], 8);
        let g = f.reverse().unwrap();
        let catalan = [1i64, -1, 2, -5, 14, -42, 132];
        for (i, c) in catalan.iter().enumerate() {
            assert_eq!(g.coeff(i as i64 + 1), rat(*c), "coefficient {}", i + 1);
        }
        let idd = f.compose(&g).unwrap();
        assert!(idd.eq_to_common_trunc(&Series::monomial(1, idd.truncation())));
    }

    #[test]
    fn reverse_moebius() {
        // reverse of z/(1-z) is z/(1+z)
        let t = 12;
        let f = Series::new(1, (0..t - 1).map(|_| Rat::one()).collect(), t);
        let g = f.reverse().unwrap();
        for m in 1..t {
            let expect = if m % 2 == 1 { rat(1) } else { rat(-1) };
            assert_eq!(g.coeff(m), expect);
        }
    }

    #[test]
    fn roots_and_exp_log() {
        let t = 10;
        // (1+z)^3 cube root
        let one_plus_z = Series::new(0, vec![rat(1), rat(1)], t);
        let cube = one_plus_z.pow(3).truncate(t);
        assert!(cube.nth_root_unit(3).unwrap().eq_to_common_trunc(&one_plus_z));
        assert_eq!(Series::one(t).nth_root_unit(5).unwrap(), Series::one(t));
        // sqrt(1+z) binomial series
        let r = one_plus_z.nth_root_unit(2).unwrap();
        assert_eq!(r.coeff(1), rat_frac(1, 2));
        assert_eq!(r.coeff(2), rat_frac(-1, 8));
        assert_eq!(r.coeff(3), rat_frac(1, 16));
        // log and exp are mutually inverse
        let s = Series::new(1, vec![rat(3), rat_frac(-2, 7), rat(5)], t);
        assert!(s.exp().log().unwrap().eq_to_common_trunc(&s));
    }

    #[test]
    fn theta_and_derivative() {
        let f = Series::new(0, vec![rat(7), rat(5), rat(3)], 3);
        let th = f.theta();
        assert_eq!(th.coeff(0), rat(0));
        assert_eq!(th.coeff(1), rat(5));
        assert_eq!(th.coeff(2), rat(6));
        let d = f.derivative();
        assert_eq!(d.coeff(0), rat(5));
        assert_eq!(d.coeff(1), rat(6));
    }
}
