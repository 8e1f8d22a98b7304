//! Elements of Q[[z]][ln z] truncated in z.
//!
//! `parts[j]` is the series coefficient of ln(z)^j / j!; the 1/j!
//! normalization is baked into the representation, which makes the theta
//! action and flag triangularity coefficient-friendly.

use crate::error::Result;
use crate::series::Series;
use crate::{rat, Rat};
use num_traits::One;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct LogSeries {
    parts: Vec<Series>,
}

impl LogSeries {
    pub fn new(mut parts: Vec<Series>) -> Self {
        assert!(!parts.is_empty(), "log series needs at least one part");
        let t = parts.iter().map(|p| p.truncation()).min().unwrap();
        for p in parts.iter_mut() {
            *p = p.truncate(t);
        }
        while parts.len() > 1 && parts.last().unwrap().is_zero() {
            parts.pop();
        }
        LogSeries { parts }
    }

    pub fn from_series(s: Series) -> Self {
        LogSeries { parts: vec![s] }
    }

    pub fn zero(trunc: i64) -> Self {
        LogSeries { parts: vec![Series::zero(trunc)] }
    }

    pub fn truncation(&self) -> i64 {
        self.parts[0].truncation()
    }

    /// Largest j with a nonzero ln^j part, if any.
    pub fn log_degree(&self) -> Option<usize> {
        (0..self.parts.len()).rev().find(|&j| !self.parts[j].is_zero())
    }

    pub fn parts(&self) -> &[Series] {
        &self.parts
    }

    pub fn part(&self, j: usize) -> Series {
        self.parts
            .get(j)
            .cloned()
            .unwrap_or_else(|| Series::zero(self.truncation()))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    pub fn is_log_free(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn add(&self, other: &LogSeries) -> LogSeries {
        let n = self.parts.len().max(other.parts.len());
        let parts = (0..n).map(|j| self.part(j).add(&other.part(j))).collect();
        LogSeries::new(parts)
    }

    pub fn sub(&self, other: &LogSeries) -> LogSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LogSeries {
        LogSeries { parts: self.parts.iter().map(|p| p.neg()).collect() }
    }

    pub fn scale(&self, c: &Rat) -> LogSeries {
        LogSeries::new(self.parts.iter().map(|p| p.scale(c)).collect())
    }

    pub fn mul_series(&self, s: &Series) -> LogSeries {
        LogSeries::new(self.parts.iter().map(|p| p.mul(s)).collect())
    }

    pub fn div_series(&self, s: &Series) -> Result<LogSeries> {
        let inv = s.invert()?;
        Ok(self.mul_series(&inv))
    }

    /// Multiply by z^k.
    pub fn shift(&self, k: i64) -> LogSeries {
        LogSeries { parts: self.parts.iter().map(|p| p.shift(k)).collect() }
    }

    /// Product, with the binomial convolution induced by the 1/j! parts.
    pub fn mul(&self, other: &LogSeries) -> LogSeries {
        let na = self.parts.len();
        let nb = other.parts.len();
        let mut parts: Vec<Option<Series>> = vec![None; na + nb - 1];
        for a in 0..na {
            for b in 0..nb {
                let c = a + b;
                let term = self.parts[a].mul(&other.parts[b]).scale(&binom(c, a));
                parts[c] = Some(match parts[c].take() {
                    None => term,
                    Some(acc) => acc.add(&term),
                });
            }
        }
        LogSeries::new(parts.into_iter().map(|p| p.unwrap()).collect())
    }

    pub fn pow(&self, e: u32) -> LogSeries {
        assert!(e > 0);
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// z d/dz, using theta(ln^j z / j!) = ln^{j-1} z / (j-1)!.
    pub fn theta(&self) -> LogSeries {
        let n = self.parts.len();
        let parts = (0..n)
            .map(|j| {
                let mut s = self.parts[j].theta();
                if j + 1 < n {
                    s = s.add(&self.parts[j + 1]);
                }
                s
            })
            .collect();
        LogSeries::new(parts)
    }

    /// Substitute psi = z + c2 z^2 + ... (tangent to the identity) for z.
    pub fn compose_tangent(&self, psi: &Series) -> Result<LogSeries> {
        assert_eq!(psi.valuation(), 1, "pullback needs psi in z + z^2 Q[[z]]");
        let t = self.truncation().min(psi.truncation());
        let unit = psi.shift(-1);
        assert!(unit.coeff(0).is_one(), "pullback needs psi'(0) = 1");
        let u = unit.log()?; // ln(psi/z), vanishes at 0
        let n = self.parts.len();
        let mut parts = Vec::with_capacity(n);
        let mut u_pows: Vec<Series> = vec![Series::one(t)];
        for k in 1..n {
            u_pows.push(u_pows[k - 1].mul(&u));
        }
        for i in 0..n {
            let mut acc = Series::zero(t);
            let mut fact = Rat::from(crate::Int::from(1));
            for j in i..n {
                let term = self.parts[j]
                    .compose(psi)?
                    .mul(&u_pows[j - i])
                    .scale(&fact.recip());
                acc = acc.add(&term);
                fact *= rat((j - i + 1) as i64);
            }
            parts.push(acc);
        }
        Ok(LogSeries::new(parts))
    }

    pub fn eq_to_common_trunc(&self, other: &LogSeries) -> bool {
        let n = self.parts.len().max(other.parts.len());
        (0..n).all(|j| self.part(j).eq_to_common_trunc(&other.part(j)))
    }

    pub fn truncate(&self, t: i64) -> LogSeries {
        LogSeries::new(self.parts.iter().map(|p| p.truncate(t)).collect())
    }
}

fn binom(n: usize, k: usize) -> Rat {
    let mut num = Rat::from(crate::Int::from(1));
    for i in 0..k {
        num = num * rat((n - i) as i64) / rat((i + 1) as i64);
    }
    num
}

impl fmt::Debug for LogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, p) in self.parts.iter().enumerate() {
            if !p.is_zero() {
                writeln!(f, "  ln^{j}/{j}! * {:?}", p)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_of_log_is_one() {
        // y = ln z: parts [0, 1]
        let t = 6;
        let y = LogSeries::new(vec![Series::zero(t), Series::one(t)]);
        let th = y.theta();
        assert!(th.is_log_free());
        assert!(th.part(0).eq_to_common_trunc(&Series::one(t)));
    }

    #[test]
    fn theta_of_monomial() {
        let t = 6;
        let y = LogSeries::from_series(Series::monomial(3, t));
        let th = y.theta();
        assert_eq!(th.part(0).coeff(3), rat(3));
    }

    #[test]
    fn product_mixes_log_parts_binomially() {
        let t = 5;
        // (ln z) * (ln z) = ln^2 z = 2 * (ln^2 z / 2!)
        let lnz = LogSeries::new(vec![Series::zero(t), Series::one(t)]);
        let sq = lnz.mul(&lnz);
        assert_eq!(sq.log_degree(), Some(2));
        assert!(sq.part(2).eq_to_common_trunc(&Series::constant(rat(2), t)));
    }

    #[test]
    fn compose_tangent_on_pure_log() {
        // ln(psi) with psi = z + z^2: parts become [ln(1+z), 1]
        let t = 6;
        let lnz = LogSeries::new(vec![Series::zero(t), Series::one(t)]);
        let psi = Series::new(1, vec![rat(1), rat(1)], t);
        let c = lnz.compose_tangent(&psi).unwrap();
        let expect = Series::new(0, vec![rat(1), rat(1)], t).log().unwrap();
        assert!(c.part(0).eq_to_common_trunc(&expect));
        assert!(c.part(1).eq_to_common_trunc(&Series::one(t)));
    }
}
