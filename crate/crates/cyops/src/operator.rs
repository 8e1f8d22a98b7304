//! The noncommutative algebra Q(z)[d/dz]: the two presentations of an
//! operator, products, duals, indicial data, pullbacks, twists and the
//! self-duality witness.

use crate::error::{CyError, Result};
use crate::logseries::LogSeries;
use crate::poly::{rat_to_text, Poly};
use crate::ratfunc::{log_derivative_rational, LogDeriv, RatFunc};
use crate::{rat, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A point of P^1(Q) at which local data is computed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Point {
    Finite(Rat),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(p) => write!(f, "{}", rat_to_text(p)),
            Point::Infinity => write!(f, "infinity"),
        }
    }
}

/// Operator in the form sum_i z^i P_i(theta), slices content-normalized.
#[derive(Clone, PartialEq, Eq)]
pub struct ThetaOperator {
    slices: Vec<Poly>,
}

/// Operator in the form sum_i a_i(z) (d/dz)^i with a nonzero leading entry.
#[derive(Clone, PartialEq, Eq)]
pub struct DOperator {
    coeffs: Vec<RatFunc>,
}

impl ThetaOperator {
    /// Normalizes: clears rational content and makes the leading coefficient
    /// of the first nonzero slice positive. Common powers of z are kept (the
    /// product ring is honest); `z_stripped` removes them where only the
    /// annihilated solutions matter.
    pub fn new(mut slices: Vec<Poly>) -> Self {
        while slices.last().map_or(false, |p| p.is_zero()) {
            slices.pop();
        }
        assert!(!slices.is_empty(), "zero operator has no theta form");
        // rational content: lcm of denominators / gcd of numerators
        let mut den_lcm = Int::one();
        let mut num_gcd = Int::zero();
        for s in &slices {
            for c in s.coeffs() {
                den_lcm = den_lcm.lcm(c.denom());
            }
        }
        for s in &slices {
            for c in s.coeffs() {
                if !c.is_zero() {
                    num_gcd = num_gcd.gcd(&(c.numer() * (&den_lcm / c.denom())));
                }
            }
        }
        let mut scale = Rat::new(den_lcm, num_gcd);
        let lead_sign = slices
            .iter()
            .find(|s| !s.is_zero())
            .unwrap()
            .leading_coeff();
        if (lead_sign * &scale).is_negative() {
            scale = -scale;
        }
        let slices = slices.iter().map(|s| s.scale(&scale)).collect();
        ThetaOperator { slices }
    }

    /// The same operator with common left powers of z removed; annihilates
    /// exactly the same solutions.
    pub fn z_stripped(&self) -> ThetaOperator {
        let strip = self.slices.iter().position(|p| !p.is_zero()).unwrap();
        if strip == 0 {
            return self.clone();
        }
        ThetaOperator { slices: self.slices[strip..].to_vec() }
    }

    pub fn from_slices_i64(slices: &[&[i64]]) -> Self {
        ThetaOperator::new(slices.iter().map(|s| Poly::from_i64(s)).collect())
    }

    pub fn slices(&self) -> &[Poly] {
        &self.slices
    }

    /// Order in theta.
    pub fn order(&self) -> usize {
        self.slices.iter().map(|p| p.deg_or_zero()).max().unwrap_or(0)
    }

    /// Degree in z of the theta presentation.
    pub fn z_degree(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn multiply(&self, other: &ThetaOperator) -> ThetaOperator {
        // P(T) z^j = z^j P(T + j)
        let mut slices = vec![Poly::zero(); self.slices.len() + other.slices.len() - 1];
        for (j, q) in other.slices.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (i, p) in self.slices.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let shifted = p.shift(&rat(j as i64));
                slices[i + j] = &slices[i + j] + &(&shifted * q);
            }
        }
        ThetaOperator::new(slices)
    }

    /// Conjugation z^{-r} L z^{r}: slice-wise T -> T + r.
    pub fn conjugate_z_power(&self, r: &Rat) -> ThetaOperator {
        ThetaOperator::new(self.slices.iter().map(|p| p.shift(r)).collect())
    }

    /// Pullback along z -> lambda z^h.
    pub fn pullback_monomial(&self, lambda: &Rat, h: u32) -> ThetaOperator {
        assert!(!lambda.is_zero(), "pullback scale must be nonzero");
        assert!(h >= 1);
        let mut slices = vec![Poly::zero(); (self.slices.len() - 1) * h as usize + 1];
        let hh = rat(h as i64).recip();
        let mut lam = Rat::one();
        for (i, p) in self.slices.iter().enumerate() {
            if !p.is_zero() {
                slices[i * h as usize] = p.scale_arg(&hh).scale(&lam);
            }
            lam *= lambda;
        }
        ThetaOperator::new(slices)
    }

    /// Pullback along z -> 1/z.
    pub fn pullback_inversion(&self) -> ThetaOperator {
        ThetaOperator::new(self.slices.iter().rev().map(|p| p.negate_arg()).collect())
    }

    /// Apply to an element of Q[[z]][ln z].
    pub fn apply(&self, y: &LogSeries) -> LogSeries {
        let mut acc: Option<LogSeries> = None;
        for (i, p) in self.slices.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let term = apply_theta_poly(p, y).shift(i as i64);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.unwrap_or_else(|| LogSeries::zero(y.truncation()))
    }

    pub fn to_d_form(&self) -> DOperator {
        let ord = self.order();
        let s2 = stirling2(ord);
        let mut coeffs = vec![Poly::zero(); ord + 1];
        for (i, p) in self.slices.iter().enumerate() {
            for (k, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                // theta^k = sum_j S2(k,j) z^j d^j
                for j in 0..=k {
                    let s = &s2[k][j];
                    if !s.is_zero() {
                        let term = Poly::monomial(c * s, i + j);
                        coeffs[j] = &coeffs[j] + &term;
                    }
                }
            }
        }
        DOperator::new(coeffs.into_iter().map(RatFunc::from_poly).collect())
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, p) in self.slices.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let body = p.render("T");
            let head = match i {
                0 => format!("({body})"),
                1 => format!("z*({body})"),
                _ => format!("z^{i}*({body})"),
            };
            parts.push(head);
        }
        parts.join(" + ")
    }
}

fn apply_theta_poly(p: &Poly, y: &LogSeries) -> LogSeries {
    // Horner in theta; rational scalars commute with theta.
    let d = p.deg_or_zero();
    let mut acc = y.scale(&p.coeff(d));
    for k in (0..d).rev() {
        acc = acc.theta();
        let c = p.coeff(k);
        if !c.is_zero() {
            acc = acc.add(&y.scale(&c));
        }
    }
    acc
}

/// Stirling numbers of the second kind up to n, as rationals.
fn stirling2(n: usize) -> Vec<Vec<Rat>> {
    let mut s = vec![vec![Rat::zero(); n + 1]; n + 1];
    s[0][0] = Rat::one();
    for k in 1..=n {
        for j in 1..=k {
            let a = s[k - 1][j].clone();
            let b = s[k - 1][j - 1].clone();
            s[k][j] = a * rat(j as i64) + b;
        }
    }
    s
}

impl fmt::Debug for ThetaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl DOperator {
    pub fn new(mut coeffs: Vec<RatFunc>) -> Self {
        while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
            coeffs.pop();
        }
        assert!(!coeffs.is_empty());
        DOperator { coeffs }
    }

    pub fn zero() -> Self {
        DOperator { coeffs: vec![RatFunc::zero()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn constant(c: Rat) -> Self {
        DOperator::new(vec![RatFunc::constant(c)])
    }

    pub fn function(f: RatFunc) -> Self {
        DOperator::new(vec![f])
    }

    /// d/dz
    pub fn d() -> Self {
        DOperator::new(vec![RatFunc::zero(), RatFunc::one()])
    }

    /// theta = z d/dz
    pub fn theta() -> Self {
        DOperator::new(vec![RatFunc::zero(), RatFunc::var()])
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RatFunc {
        self.coeffs.get(i).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &RatFunc {
        self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().as_constant().map_or(false, |c| c.is_one())
    }

    pub fn monic(&self) -> DOperator {
        assert!(!self.is_zero());
        let lead = self.leading().clone();
        DOperator::new(
            self.coeffs
                .iter()
                .map(|c| &(c.clone()) / &lead)
                .collect(),
        )
    }

    pub fn add(&self, other: &DOperator) -> DOperator {
        let n = self.coeffs.len().max(other.coeffs.len());
        DOperator::new((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &DOperator) -> DOperator {
        let n = self.coeffs.len().max(other.coeffs.len());
        DOperator::new((0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect())
    }

    /// Left multiplication by a rational function.
    pub fn scale_left(&self, f: &RatFunc) -> DOperator {
        DOperator::new(self.coeffs.iter().map(|c| c * f).collect())
    }

    /// Noncommutative product: self composed after other.
    pub fn multiply(&self, other: &DOperator) -> DOperator {
        if self.is_zero() || other.is_zero() {
            return DOperator::zero();
        }
        let p = self.order();
        // derivatives of the right factor's coefficients up to order p
        let mut derivs: Vec<Vec<RatFunc>> = vec![other.coeffs.clone()];
        for k in 1..=p {
            let prev = &derivs[k - 1];
            derivs.push(prev.iter().map(|c| c.derivative()).collect());
        }
        let q = other.order();
        let mut out = vec![RatFunc::zero(); p + q + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, _b) in other.coeffs.iter().enumerate() {
                // d^i (b_j d^j) = sum_k C(i,k) b_j^{(k)} d^{i+j-k}
                for k in 0..=i {
                    let b_k = &derivs[k][j];
                    if b_k.is_zero() {
                        continue;
                    }
                    let c = binom_rat(i, k);
                    let term = &(a * b_k) * &RatFunc::constant(c);
                    let m = i + j - k;
                    out[m] = &out[m] + &term;
                }
            }
        }
        DOperator::new(out)
    }

    /// d^k as an operator.
    pub fn d_power(k: usize) -> DOperator {
        let mut coeffs = vec![RatFunc::zero(); k + 1];
        coeffs[k] = RatFunc::one();
        DOperator::new(coeffs)
    }

    /// The dual sum_i (-1)^{n+1+i} d^i a_i where n+1 is the order.
    pub fn dual(&self) -> DOperator {
        let n1 = self.order();
        let mut acc = DOperator::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut term = DOperator::d_power(i).multiply(&DOperator::function(a.clone()));
            if (n1 + i) % 2 == 1 {
                term = term.scale_left(&RatFunc::constant(-Rat::one()));
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// The sign-free formal adjoint sum_i (-1)^i d^i a_i.
    pub fn formal_adjoint(&self) -> DOperator {
        let mut acc = DOperator::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut term = DOperator::d_power(i).multiply(&DOperator::function(a.clone()));
            if i % 2 == 1 {
                term = term.scale_left(&RatFunc::constant(-Rat::one()));
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Substitute d -> d - u; solutions get multiplied by f with f'/f = u.
    pub fn twist(&self, u: &RatFunc) -> DOperator {
        let base = DOperator::new(vec![-u, RatFunc::one()]);
        let mut acc = DOperator::zero();
        let mut pw = DOperator::constant(Rat::one());
        for a in self.coeffs.iter() {
            if !a.is_zero() {
                acc = acc.add(&pw.scale_left(a));
            }
            pw = base.multiply(&pw);
        }
        acc
    }

    pub fn to_theta_form(&self) -> ThetaOperator {
        let n1 = self.order();
        // clear denominators
        let mut den = Poly::one();
        for c in &self.coeffs {
            let g = den.gcd(c.den());
            let (q, r) = c.den().divrem(&g);
            debug_assert!(r.is_zero());
            den = &den * &q;
        }
        let mut slices: Vec<Poly> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cleared = c * &RatFunc::from_poly(den.clone());
            assert!(cleared.is_polynomial(), "denominator clearing failed");
            let b = cleared.num().clone();
            // z^{n1} b d^i = b z^{n1-i} [theta]_i
            let falling = falling_factorial_theta(i);
            let zfac = &b * &Poly::monomial(Rat::one(), n1 - i);
            for (a, cz) in zfac.coeffs().iter().enumerate() {
                if cz.is_zero() {
                    continue;
                }
                if slices.len() <= a {
                    slices.resize(a + 1, Poly::zero());
                }
                slices[a] = &slices[a] + &falling.scale(cz);
            }
        }
        ThetaOperator::new(slices).z_stripped()
    }

    /// Apply to an element of Q[[z]][ln z]; coefficients are expanded exactly
    /// as Laurent series around 0.
    pub fn apply(&self, y: &LogSeries) -> LogSeries {
        let t = y.truncation();
        let mut acc: Option<LogSeries> = None;
        let mut dy = y.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                let s = a.expand(t);
                let term = dy.mul_series(&s);
                acc = Some(match acc {
                    None => term,
                    Some(prev) => prev.add(&term),
                });
            }
            if i < self.order() {
                dy = dy.theta().shift(-1); // d/dz
            }
        }
        acc.unwrap_or_else(|| LogSeries::zero(t))
    }

    /// Operators are compared as elements of the left Q(z)[d]-module, i.e.
    /// via their monic forms.
    pub fn equivalent(&self, other: &DOperator) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.monic().coeffs == other.monic().coeffs
    }

    /// Rational singular points (roots of the cleared leading coefficient)
    /// plus infinity; the residual factor collects irrational singularities.
    pub fn singular_points(&self) -> (Vec<Point>, Poly) {
        let cleared = self.to_theta_form().to_d_form();
        let lead = cleared.leading().num().clone();
        let mut pts = Vec::new();
        let (roots, residual) = lead.rational_roots();
        for (r, _) in roots {
            pts.push(Point::Finite(r));
        }
        pts.push(Point::Infinity);
        (pts, residual)
    }
}

fn binom_rat(n: usize, k: usize) -> Rat {
    let mut v = Rat::one();
    for i in 0..k {
        v = v * rat((n - i) as i64) / rat((i + 1) as i64);
    }
    v
}

/// [theta]_i = theta (theta - 1) ... (theta - i + 1) as a polynomial in T.
fn falling_factorial_theta(i: usize) -> Poly {
    let mut p = Poly::one();
    for j in 0..i {
        p = &p * &Poly::from_coeffs(vec![rat(-(j as i64)), Rat::one()]);
    }
    p
}

impl fmt::Debug for DOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("[{}] d^{}", c.render(), i))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Indicial polynomial data at a point.
#[derive(Clone, Debug)]
pub struct IndicialData {
    pub point: Point,
    /// Monic indicial polynomial in T.
    pub polynomial: Poly,
    pub rational_roots: Vec<(Rat, usize)>,
    /// Monic factor with no rational roots.
    pub residual_factor: Poly,
}

impl IndicialData {
    /// The MUM exponent r when the polynomial is (T - r)^{order} with r an integer.
    pub fn mum_exponent(&self, order: usize) -> Option<i64> {
        if self.rational_roots.len() == 1 && self.rational_roots[0].1 == order {
            let r = &self.rational_roots[0].0;
            if r.denom().is_one() {
                return r.numer().try_into().ok();
            }
        }
        None
    }

    pub fn exponents_flat(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        for (r, m) in &self.rational_roots {
            for _ in 0..*m {
                out.push(r.clone());
            }
        }
        out
    }
}

/// Indicial polynomial of a theta-form operator at a point.
///
/// At 0 and infinity this reads the first/last theta slice; at finite p != 0
/// it evaluates the residue formula on the monic d-form.
pub fn indicial(op: &ThetaOperator, point: &Point) -> Result<IndicialData> {
    let op = op.z_stripped();
    let ord = op.order();
    let poly = match point {
        Point::Finite(p) if p.is_zero() => op.slices()[0].clone(),
        Point::Infinity => op.slices().last().unwrap().negate_arg(),
        Point::Finite(p) => {
            let monic = op.to_d_form().monic();
            let n = ord - 1;
            let mut acc = falling_factorial_theta(ord);
            for i in 0..=n {
                let a = monic.coeff(i);
                if a.is_zero() {
                    continue;
                }
                if a.pole_order_at(p) > ord - i {
                    return Err(CyError::IrregularSingularity(rat_to_text(p)));
                }
                // (z - p)^{n - i} a_i
                let shift_pow =
                    Poly::from_coeffs(vec![-p.clone(), Rat::one()]).pow((n - i) as u32);
                let res = (&a * &RatFunc::from_poly(shift_pow)).residue_at(p);
                if !res.is_zero() {
                    acc = &acc + &falling_factorial_theta(i).scale(&res);
                }
            }
            acc
        }
    };
    if poly.degree() != Some(ord) {
        return Err(CyError::IrregularSingularity(point.to_string()));
    }
    let monic_poly = poly.monic();
    let (rational_roots, residual_factor) = monic_poly.rational_roots();
    Ok(IndicialData {
        point: point.clone(),
        polynomial: monic_poly,
        rational_roots,
        residual_factor,
    })
}

/// Self-duality witness: alpha in Q(z) with L alpha = alpha L^dual, where L
/// is made monic first. Returns the witness with monic numerator.
pub fn self_dual_witness(op: &DOperator) -> Result<Option<RatFunc>> {
    let monic = op.monic();
    let n1 = monic.order();
    if n1 == 0 {
        return Ok(Some(RatFunc::one()));
    }
    let a_n = monic.coeff(n1 - 1);
    let u = &a_n * &RatFunc::constant(Rat::new(Int::from(-2), Int::from(n1 as i64)));
    let g = match log_derivative_rational(&u) {
        LogDeriv::Found(g) => g,
        LogDeriv::NonIntegralResidue { residue, place } => {
            return Err(CyError::NonIntegralResidue {
                residue: rat_to_text(&residue),
                place,
            })
        }
        LogDeriv::NoSolution => return Ok(None),
    };
    // normalize to a monic numerator
    let lc = g.num().leading_coeff();
    let alpha = &g * &RatFunc::constant(lc.recip());
    let alpha_op = DOperator::function(alpha.clone());
    let lhs = monic.multiply(&alpha_op);
    let rhs = alpha_op.multiply(&monic.dual());
    if lhs.coeffs() == rhs.coeffs() {
        Ok(Some(alpha))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_frac;
    use crate::series::Series;

    pub fn quintic() -> ThetaOperator {
        // T^4 - 5z (5T+1)(5T+2)(5T+3)(5T+4)
        let mut p1 = Poly::one();
        for k in 1..=4 {
            p1 = &p1 * &Poly::from_i64(&[k, 5]);
        }
        ThetaOperator::new(vec![Poly::from_i64(&[0, 0, 0, 0, 1]), p1.scale(&rat(-5))])
    }

    #[test]
    fn leibniz_rule() {
        // d * z = z d + 1
        let d = DOperator::d();
        let z = DOperator::function(RatFunc::var());
        let prod = d.multiply(&z);
        assert_eq!(prod.coeff(0), RatFunc::one());
        assert_eq!(prod.coeff(1), RatFunc::var());
        // theta * z = z(theta + 1): in d-form z*(z d + 1)
        let th = DOperator::theta();
        let prod = th.multiply(&z);
        assert_eq!(prod.coeff(0), RatFunc::var());
        assert_eq!(
            prod.coeff(1),
            &RatFunc::var() * &RatFunc::var()
        );
        // (theta+1)(theta-1) = theta^2 - 1
        let a = th.add(&DOperator::constant(rat(1)));
        let b = th.sub(&DOperator::constant(rat(1)));
        let p = a.multiply(&b);
        let q = th.multiply(&th).sub(&DOperator::constant(rat(1)));
        assert_eq!(p.coeffs(), q.coeffs());
    }

    #[test]
    fn theta_product_rule_matches_theta_form() {
        // theta * z in theta form: z (theta + 1)
        let th = ThetaOperator::new(vec![Poly::var()]);
        let z = ThetaOperator::new(vec![Poly::zero(), Poly::one()]);
        let prod = th.multiply(&z);
        assert_eq!(prod.slices().len(), 2);
        assert!(prod.slices()[0].is_zero());
        assert_eq!(prod.slices()[1], Poly::from_i64(&[1, 1]));
    }

    #[test]
    fn dual_is_involution_and_antihomomorphism() {
        let l = DOperator::new(vec![
            RatFunc::from_poly(Poly::from_i64(&[1, 3])),
            RatFunc::new(Poly::from_i64(&[2]), Poly::from_i64(&[0, 1])),
            RatFunc::one(),
        ]);
        assert_eq!(l.dual().dual().coeffs(), l.coeffs());
        let p = DOperator::new(vec![RatFunc::var(), RatFunc::one()]);
        let lhs = p.multiply(&l).dual();
        let rhs = l.dual().multiply(&p.dual());
        assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn dual_of_simple_operators() {
        // dual(d^2) = d^2
        let d2 = DOperator::d_power(2);
        assert_eq!(d2.dual().coeffs(), d2.coeffs());
        // dual(d^2 + a d) = d^2 - a d - a'
        let a = RatFunc::from_poly(Poly::from_i64(&[0, 0, 7]));
        let l = DOperator::new(vec![RatFunc::zero(), a.clone(), RatFunc::one()]);
        let dl = l.dual();
        assert_eq!(dl.coeff(2), RatFunc::one());
        assert_eq!(dl.coeff(1), -&a);
        assert_eq!(dl.coeff(0), -&a.derivative());
        // theta adjoint: formal adjoint of theta is -theta - 1
        let th = DOperator::theta();
        let adj = th.formal_adjoint();
        let expect = DOperator::new(vec![
            RatFunc::constant(rat(-1)),
            -&RatFunc::var(),
        ]);
        assert_eq!(adj.coeffs(), expect.coeffs());
    }

    #[test]
    fn theta_d_roundtrip() {
        let q = quintic();
        let back = q.to_d_form().to_theta_form();
        assert_eq!(q.slices(), back.slices());
        // d^2 + (1/z) d is theta^2 after clearing
        let l = DOperator::new(vec![
            RatFunc::zero(),
            RatFunc::new(Poly::one(), Poly::var()),
            RatFunc::one(),
        ]);
        let th = l.to_theta_form();
        assert_eq!(th.slices().len(), 1);
        assert_eq!(th.slices()[0], Poly::from_i64(&[0, 0, 1]));
        // theta -> z d
        let th = ThetaOperator::new(vec![Poly::var()]);
        let d = th.to_d_form();
        assert_eq!(d.coeff(1), RatFunc::var());
        assert!(d.coeff(0).is_zero());
    }

    #[test]
    fn indicial_quintic() {
        let q = quintic();
        let at0 = indicial(&q, &Point::Finite(Rat::zero())).unwrap();
        assert_eq!(at0.rational_roots, vec![(Rat::zero(), 4)]);
        assert_eq!(at0.mum_exponent(4), Some(0));
        let atinf = indicial(&q, &Point::Infinity).unwrap();
        let expect: Vec<(Rat, usize)> = (1..=4).map(|k| (rat_frac(k, 5), 1)).collect();
        assert_eq!(atinf.rational_roots, expect);
        // conifold point 1/3125
        let conifold = indicial(&q, &Point::Finite(rat_frac(1, 3125))).unwrap();
        assert_eq!(
            conifold.rational_roots,
            vec![(rat(0), 1), (rat(1), 2), (rat(2), 1)]
        );
        // regular point: exponents 0..3
        let reg = indicial(&q, &Point::Finite(rat(7))).unwrap();
        assert_eq!(
            reg.rational_roots,
            vec![(rat(0), 1), (rat(1), 1), (rat(2), 1), (rat(3), 1)]
        );
    }

    #[test]
    fn pullbacks() {
        // (lambda z)^* theta = theta
        let th = ThetaOperator::new(vec![Poly::var()]);
        let pb = th.pullback_monomial(&rat(7), 1);
        assert_eq!(pb.slices(), th.slices());
        // (z^2)^* doubles exponents at 0
        let q = quintic();
        let pb = q.pullback_monomial(&Rat::one(), 2);
        let ind = indicial(&pb, &Point::Finite(Rat::zero())).unwrap();
        assert_eq!(ind.rational_roots, vec![(rat(0), 4)]);
        let atinf = indicial(&pb, &Point::Infinity).unwrap();
        let expect: Vec<(Rat, usize)> = (1..=4).map(|k| (rat_frac(2 * k, 5), 1)).collect();
        assert_eq!(atinf.rational_roots, expect);
    }

    #[test]
    fn twist_by_half_over_z() {
        // twist(d, 1/(2z)) = d - 1/(2z), annihilating z^{1/2}
        let d = DOperator::d();
        let u = RatFunc::new(Poly::one(), Poly::from_i64(&[0, 2]));
        let tw = d.twist(&u);
        assert_eq!(tw.coeff(1), RatFunc::one());
        assert_eq!(tw.coeff(0), -&u);
        // twist by zero is the identity
        let q = quintic().to_d_form().monic();
        let tw = q.twist(&RatFunc::zero());
        assert_eq!(tw.coeffs(), q.coeffs());
        // twist is inverted by the opposite twist
        let u = RatFunc::new(Poly::from_i64(&[1, 2]), Poly::from_i64(&[0, 0, 3]));
        let back = q.twist(&u).twist(&(-&u));
        assert_eq!(back.coeffs(), q.coeffs());
    }

    #[test]
    fn self_dual_witness_cases() {
        // d^2 is self dual with alpha = 1
        let d2 = DOperator::d_power(2);
        let w = self_dual_witness(&d2).unwrap().unwrap();
        assert_eq!(w, RatFunc::one());
        // d^2 + d has no rational witness (alpha would be exp(-z))
        let l = DOperator::new(vec![RatFunc::zero(), RatFunc::one(), RatFunc::one()]);
        assert!(self_dual_witness(&l).unwrap().is_none());
        // the quintic has a witness, verified exactly inside
        let q = quintic().to_d_form();
        let w = self_dual_witness(&q).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn apply_theta_to_logs() {
        let t = 8;
        // theta(ln z) = 1
        let th = ThetaOperator::new(vec![Poly::var()]);
        let lnz = LogSeries::new(vec![Series::zero(t), Series::one(t)]);
        let out = th.apply(&lnz);
        assert!(out.is_log_free());
        assert!(out.part(0).eq_to_common_trunc(&Series::one(t)));
        // theta(z^m) = m z^m
        let zm = LogSeries::from_series(Series::monomial(5, t));
        let out = th.apply(&zm);
        assert_eq!(out.part(0).coeff(5), rat(5));
    }
}
