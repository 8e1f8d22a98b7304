//! Minimal annihilating operators of series tuples, symmetric powers and
//! the symmetric-square order.
//!
//! The linear system in the unknown polynomial coefficients is solved
//! modulo word-size primes; the kernel vector is lifted by CRT and rational
//! reconstruction and then re-verified exactly by applying the operator to
//! every input series. A trivial kernel modulo a good prime certifies a
//! trivial kernel over Q (a nonzero rational kernel vector scales to a
//! primitive integer one, which survives reduction).

use crate::arith::{inv_mod, mul_mod, primes_from, rat_mod_p, rational_reconstruct};
use crate::error::{CyError, Result};
use crate::frobenius::integer_class_basis;
use crate::logseries::LogSeries;
use crate::operator::DOperator;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Lowest-order operator annihilating every input to its reliable window.
///
/// The ansatz is the theta form sum c_{i,k} z^k theta^i with i <= max_order
/// and k <= max_coeff_deg (theta powers do not lower valuations, so the
/// window stays whole); the result is returned in d-form.
pub fn min_operator_of_series(
    ys: &[LogSeries],
    max_order: usize,
    max_coeff_deg: usize,
) -> Result<DOperator> {
    assert!(!ys.is_empty());
    // clearing denominators once makes every downstream big-integer
    // operation gcd-free; annihilators are invariant under scaling
    let scaled: Vec<LogSeries> = ys.iter().map(integerize).collect();
    let towers = theta_towers(&scaled, max_order);
    for ord in 1..=max_order {
        if let Some(op) = annihilator_of_order(&towers, &scaled, ord, max_coeff_deg)? {
            return Ok(op);
        }
    }
    Err(CyError::NoOperatorInBounds { max_order, max_deg: max_coeff_deg })
}

/// Scale a log series by the lcm of its coefficient denominators.
fn integerize(y: &LogSeries) -> LogSeries {
    let mut lcm = Int::one();
    for part in y.parts() {
        for (_, c) in part.iter() {
            lcm = lcm.lcm(c.denom());
        }
    }
    y.scale(&Rat::from(lcm))
}

/// Exact columns: theta^i y for i <= ord, per input series.
fn theta_towers(ys: &[LogSeries], ord: usize) -> Vec<Vec<LogSeries>> {
    ys.iter()
        .map(|y| {
            let mut tower = vec![y.clone()];
            for i in 1..=ord {
                tower.push(tower[i - 1].theta());
            }
            tower
        })
        .collect()
}

fn annihilator_of_order(
    full_towers: &[Vec<LogSeries>],
    ys: &[LogSeries],
    ord: usize,
    deg: usize,
) -> Result<Option<DOperator>> {
    let towers: Vec<&[LogSeries]> = full_towers.iter().map(|t| &t[..=ord]).collect();
    let ncols = (ord + 1) * (deg + 1);
    let nrows: i64 = towers
        .iter()
        .map(|tower| {
            let tmin = tower.iter().map(|d| d.truncation()).min().unwrap();
            let vmin = tower
                .iter()
                .flat_map(|d| d.parts().iter().map(|s| s.valuation()))
                .min()
                .unwrap();
            let parts = tower.iter().map(|d| d.parts().len()).max().unwrap() as i64;
            (tmin - vmin).max(0) * parts
        })
        .sum();
    if nrows < ncols as i64 + 4 {
        return Err(CyError::Domain(format!(
            "truncation gives {nrows} equations for {ncols} unknowns; extend the series"
        )));
    }
    let t_start = std::time::Instant::now();
    let primes = primes_from((1 << 62) - 1, 40);
    let mut lifted: Option<(Vec<Int>, Int, Vec<usize>)> = None;
    let mut last_candidate: Option<Vec<Rat>> = None;
    for &p in &primes {
        let t_k = std::time::Instant::now();
        let Some(kernel) = kernel_mod_p(&towers, ord, deg, p) else {
            continue; // p divides some denominator; try the next prime
        };
        eprintln!("[dbg] ord={ord} kernel_mod_p {:?} (total {:?})", t_k.elapsed(), t_start.elapsed());
        let Some((vector, pivots)) = kernel else {
            // trivial kernel mod a good prime: trivial over Q
            return Ok(None);
        };
        let bp = Int::from(p);
        lifted = Some(match lifted {
            Some((prev, m, prev_piv)) if prev_piv == pivots => {
                let combined: Vec<Int> = prev
                    .iter()
                    .zip(&vector)
                    .map(|(a, &b)| crate::arith::crt(a, &m, &Int::from(b), &bp))
                    .collect();
                (combined, &m * &bp, prev_piv)
            }
            _ => (vector.iter().map(|&v| Int::from(v)).collect(), bp, pivots),
        });
        let (residues, modulus, _) = lifted.as_ref().unwrap();
        let rec: Option<Vec<Rat>> = residues
            .iter()
            .map(|r| rational_reconstruct(r, modulus))
            .collect();
        if let Some(rec) = rec {
            if last_candidate.as_ref() == Some(&rec) {
                // stabilized; verify exactly
                let t_v = std::time::Instant::now();
                let v = verify_candidate(&rec, ys, ord, deg);
                eprintln!("[dbg] ord={ord} verify {:?} ok={}", t_v.elapsed(), v.is_some());
                if let Some(op) = v {
                    return Ok(Some(op));
                }
            }
            last_candidate = Some(rec);
        } else {
            last_candidate = None;
        }
    }
    Err(CyError::Domain(
        "modular kernel reconstruction did not stabilize".into(),
    ))
}

/// Kernel of the annihilation system mod p.
/// Returns None if p divides a denominator; Some(None) for a trivial kernel;
/// otherwise the canonical kernel vector (first free column) and the pivot
/// column list that identifies the elimination shape.
#[allow(clippy::type_complexity)]
fn kernel_mod_p(
    towers: &[&[LogSeries]],
    ord: usize,
    deg: usize,
    p: u64,
) -> Option<Option<(Vec<u64>, Vec<usize>)>> {
    let ncols = (ord + 1) * (deg + 1);
    let mut rref: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for tower in towers {
        // reliable window across all columns of this tower
        let tmin = tower.iter().map(|d| d.truncation()).min().unwrap();
        let vmin = tower
            .iter()
            .flat_map(|d| d.parts().iter().map(|s| s.valuation()))
            .min()
            .unwrap();
        let max_parts = tower.iter().map(|d| d.parts().len()).max().unwrap();
        // reduce this tower's coefficients mod p once
        let mut red: Vec<Vec<Vec<u64>>> = Vec::with_capacity(ord + 1);
        for d in tower.iter() {
            let mut parts = Vec::with_capacity(max_parts);
            for j in 0..max_parts {
                let part = d.part(j);
                let mut v = vec![0u64; (tmin - vmin).max(0) as usize];
                for (e, c) in part.iter() {
                    if e < tmin {
                        v[(e - vmin) as usize] = rat_mod_p(c, p)?;
                    }
                }
                parts.push(v);
            }
            red.push(parts);
        }
        // rows: one per (log part j, exponent e in [vmin, tmin))
        for j in 0..max_parts {
            for e in vmin..tmin {
                let mut row = vec![0u64; ncols];
                let mut nonzero = false;
                for i in 0..=ord {
                    for k in 0..=deg {
                        // coefficient of z^e in z^k theta^i y = coeff_{e-k}(theta^i y)
                        let idx = e - k as i64 - vmin;
                        if idx >= 0 && (idx as usize) < red[i][j].len() {
                            let v = red[i][j][idx as usize];
                            if v != 0 {
                                row[i * (deg + 1) + k] = v;
                                nonzero = true;
                            }
                        }
                    }
                }
                if nonzero {
                    reduce_into_rref(&mut rref, &mut pivots, row, p);
                    if pivots.len() == ncols {
                        return Some(None);
                    }
                }
            }
        }
    }
    if pivots.len() == ncols {
        return Some(None);
    }
    // canonical kernel vector from the first free column
    let free = (0..ncols).find(|c| !pivots.contains(c)).unwrap();
    let mut x = vec![0u64; ncols];
    x[free] = 1;
    for (row, &pc) in rref.iter().zip(&pivots) {
        if row[free] != 0 {
            x[pc] = p - row[free];
        }
    }
    Some(Some((x, pivots)))
}

fn reduce_into_rref(rref: &mut Vec<Vec<u64>>, pivots: &mut Vec<usize>, mut row: Vec<u64>, p: u64) {
    let ncols = row.len();
    loop {
        let Some(lead) = row.iter().position(|&v| v != 0) else {
            return;
        };
        match pivots.iter().position(|&pc| pc == lead) {
            Some(ri) => {
                let factor = row[lead];
                let base = rref[ri].clone();
                for c in lead..ncols {
                    if base[c] != 0 {
                        row[c] = sub_mod(row[c], mul_mod(factor, base[c], p), p);
                    }
                }
            }
            None => {
                // normalize, insert, eliminate from existing rows
                let inv = inv_mod(row[lead], p);
                for c in lead..ncols {
                    if row[c] != 0 {
                        row[c] = mul_mod(row[c], inv, p);
                    }
                }
                for r in rref.iter_mut() {
                    let f = r[lead];
                    if f != 0 {
                        for c in lead..ncols {
                            if row[c] != 0 {
                                r[c] = sub_mod(r[c], mul_mod(f, row[c], p), p);
                            }
                        }
                    }
                }
                rref.push(row);
                pivots.push(lead);
                return;
            }
        }
    }
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

/// Build the theta-form operator from a solved coefficient vector and verify
/// exactly that it annihilates every input; returns the d-form.
fn verify_candidate(x: &[Rat], ys: &[LogSeries], ord: usize, deg: usize) -> Option<DOperator> {
    if x.iter().all(|v| v.is_zero()) {
        return None;
    }
    // slice k collects the theta polynomial multiplying z^k
    let slices: Vec<Poly> = (0..=deg)
        .map(|k| Poly::from_coeffs((0..=ord).map(|i| x[i * (deg + 1) + k].clone()).collect()))
        .collect();
    let theta = crate::operator::ThetaOperator::new(slices);
    if theta.order() != ord {
        return None;
    }
    for y in ys {
        let t_a = std::time::Instant::now();
        let out = theta.apply(y);
        eprintln!("[dbg-apply] one product {:?}", t_a.elapsed());
        if !out.is_zero() {
            return None;
        }
    }
    Some(theta.to_d_form())
}

/// n-th symmetric power of an order-2 operator, built from the products of
/// its local solution basis at 0 and verified exactly.
pub fn sym_power_order2(p: &DOperator, n: u32) -> Result<DOperator> {
    assert!(n >= 1);
    if p.order() != 2 {
        return Err(CyError::Domain(format!(
            "symmetric power input must have order 2, got {}",
            p.order()
        )));
    }
    let theta = p.to_theta_form();
    let zdeg = theta.z_degree();
    let mut deg = (n as usize) * (zdeg + 1) + 2;
    for attempt in 0..2 {
        let trunc = ((n as usize + 2) * (deg + 3) + 12) as i64;
        let basis = integer_class_basis(&theta, trunc)?;
        debug_assert_eq!(basis.len(), 2);
        let wks = product_powers(&basis[0], &basis[1], n);
        match min_operator_of_series(&wks, n as usize + 1, deg) {
            Ok(op) => {
                if op.order() < n as usize + 1 {
                    return Err(CyError::DegenerateSymmetricPower);
                }
                return Ok(op);
            }
            Err(CyError::NoOperatorInBounds { .. }) if attempt == 0 => {
                deg *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(CyError::NoOperatorInBounds { max_order: n as usize + 1, max_deg: deg })
}

/// w_k = y0^{n-k} y1^k / k! for k = 0..n.
pub fn product_powers(y0: &LogSeries, y1: &LogSeries, n: u32) -> Vec<LogSeries> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut fact = Rat::one();
    for k in 0..=n {
        if k > 0 {
            fact = fact * Rat::from(Int::from(k));
        }
        let w = match (n - k, k) {
            (0, 0) => unreachable!("n >= 1"),
            (a, 0) => y0.pow(a),
            (0, b) => y1.pow(b),
            (a, b) => y0.pow(a).mul(&y1.pow(b)),
        };
        out.push(w.scale(&fact.clone().recip()));
    }
    out
}

/// Order of the minimal operator annihilating all pairwise products of the
/// given solutions; equals the dimension of the differential module they
/// generate (at most (n+1)(n+2)/2 for n+1 solutions).
pub fn sym_square_order(solutions: &[LogSeries], max_coeff_deg: usize) -> Result<usize> {
    let n1 = solutions.len();
    let mut products = Vec::new();
    for i in 0..n1 {
        for j in i..n1 {
            products.push(solutions[i].mul(&solutions[j]));
        }
    }
    let op = min_operator_of_series(&products, n1 * (n1 + 1) / 2, max_coeff_deg)?;
    Ok(op.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use crate::series::Series;

    #[test]
    fn min_operator_of_monomials_is_d3() {
        let t = 24;
        let ys: Vec<LogSeries> = (0..3)
            .map(|k| LogSeries::from_series(Series::monomial(k, t)))
            .collect();
        let op = min_operator_of_series(&ys, 4, 2).unwrap();
        assert_eq!(op.order(), 3);
        assert!(op.equivalent(&DOperator::d_power(3)));
    }

    #[test]
    fn min_operator_of_geometric_series() {
        let t = 24;
        let geom = Series::new(0, (0..t).map(|_| Rat::one()).collect(), t);
        let op = min_operator_of_series(&[LogSeries::from_series(geom)], 3, 2).unwrap();
        // (1 - z) d - 1
        assert_eq!(op.order(), 1);
        let expect = DOperator::new(vec![
            RatFunc::constant(rat(-1)),
            RatFunc::from_poly(Poly::from_i64(&[1, -1])),
        ]);
        assert!(op.equivalent(&expect));
    }

    #[test]
    fn no_low_order_annihilator_in_bounds() {
        // 1/(m!)^2 coefficients admit no order-1 annihilator of degree <= 1
        let t = 20;
        let mut coeffs = vec![Rat::one()];
        let mut fact = Rat::one();
        for m in 1..t {
            fact = fact * rat(m) * rat(m);
            coeffs.push(fact.clone().recip());
        }
        let f = LogSeries::from_series(Series::new(0, coeffs, t));
        assert!(matches!(
            min_operator_of_series(&[f], 1, 1),
            Err(CyError::NoOperatorInBounds { .. })
        ));
    }

    #[test]
    fn sym_powers_of_d2() {
        let d2 = DOperator::d_power(2);
        let s2 = sym_power_order2(&d2, 2).unwrap();
        assert!(s2.equivalent(&DOperator::d_power(3)));
        let s3 = sym_power_order2(&d2, 3).unwrap();
        assert!(s3.equivalent(&DOperator::d_power(4)));
    }

    #[test]
    fn sym_square_order_of_d2_is_three() {
        let t = 40;
        let basis: Vec<LogSeries> = (0..2)
            .map(|k| LogSeries::from_series(Series::monomial(k, t)))
            .collect();
        assert_eq!(sym_square_order(&basis, 3).unwrap(), 3);
    }
}
