//! Small exact linear algebra over Q (the modular solver in `annihilator`
//! handles the large systems).

use crate::Rat;
use num_traits::Zero;

pub fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = rows[r][c].clone().recip();
        for i in r + 1..nrows {
            if !rows[i][c].is_zero() {
                let factor = &rows[i][c] * &inv;
                for k in c..ncols {
                    let t = &rows[r][k] * &factor;
                    rows[i][k] = &rows[i][k] - &t;
                }
            }
        }
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}

/// A canonical nonzero kernel vector of the row system (None if trivial):
/// RREF, then the vector attached to the first free column.
pub fn nullspace_vector(rows: &[Vec<Rat>], ncols: usize) -> Option<Vec<Rat>> {
    let mut rref: Vec<Vec<Rat>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in rows {
        let mut row = row.clone();
        loop {
            let Some(lead) = row.iter().position(|v| !v.is_zero()) else {
                break;
            };
            if let Some(ri) = pivots.iter().position(|&pc| pc == lead) {
                let factor = row[lead].clone();
                for c in lead..ncols {
                    let t = &rref[ri][c] * &factor;
                    row[c] = &row[c] - &t;
                }
            } else {
                let inv = row[lead].clone().recip();
                for c in lead..ncols {
                    row[c] = &row[c] * &inv;
                }
                for r in rref.iter_mut() {
                    if !r[lead].is_zero() {
                        let f = r[lead].clone();
                        for c in lead..ncols {
                            let t = &row[c] * &f;
                            r[c] = &r[c] - &t;
                        }
                    }
                }
                rref.push(row);
                pivots.push(lead);
                break;
            }
        }
        if pivots.len() == ncols {
            return None;
        }
    }
    let free = (0..ncols).find(|c| !pivots.contains(c))?;
    let mut x = vec![Rat::zero(); ncols];
    x[free] = Rat::from(crate::Int::from(1));
    for (row, &pc) in rref.iter().zip(&pivots) {
        if !row[free].is_zero() {
            x[pc] = -row[free].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn rank_and_kernel() {
        let rows = vec![
            vec![rat(1), rat(2), rat(3)],
            vec![rat(2), rat(4), rat(6)],
            vec![rat(0), rat(1), rat(1)],
        ];
        assert_eq!(rank(rows.clone()), 2);
        let x = nullspace_vector(&rows, 3).unwrap();
        for row in &rows {
            let dot: Rat = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn full_rank_has_no_kernel() {
        let rows = vec![vec![rat(1), rat(0)], vec![rat(1), rat(1)]];
        assert!(nullspace_vector(&rows, 2).is_none());
    }
}
