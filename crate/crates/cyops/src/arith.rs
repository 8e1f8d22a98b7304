//! Integer utilities: factorization, divisor enumeration, word-size prime
//! fields and rational reconstruction for the modular kernel solver.

use crate::{Int, Rat};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // Sufficient witness set for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    pow_mod(a, p - 2, p)
}

/// Descending sequence of word-size primes for modular computations.
pub fn primes_from(start: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = start | 1;
    while out.len() < count {
        if is_prime_u64(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// Miller-Rabin for big integers (probabilistic with a fixed witness set;
/// deterministic below 2^64).
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = BigUint::one();
    let two = &one + &one;
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while (&d % &two).is_zero() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67] {
        let a = BigUint::from(a);
        if &a % n == BigUint::zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent rho; returns a nontrivial factor of composite n.
fn pollard_brent(n: &BigUint, seed: u64) -> BigUint {
    let one = BigUint::one();
    let two = &one + &one;
    if (n % &two).is_zero() {
        return two;
    }
    let mut c = BigUint::from(seed);
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(seed + 2);
        let mut g = BigUint::one();
        let mut q = BigUint::one();
        let mut xs = BigUint::zero();
        let mut y = BigUint::zero();
        let m = 128u32;
        let mut r = 1u32;
        while g == one {
            y = x.clone();
            for _ in 0..r {
                x = f(&x);
            }
            let mut k = 0u32;
            while k < r && g == one {
                xs = x.clone();
                for _ in 0..m.min(r - k) {
                    x = f(&x);
                    let diff = if y > x { &y - &x } else { &x - &y };
                    q = (&q * &diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if g == *n {
            // back up and retry step by step
            g = BigUint::one();
            let mut z = xs.clone();
            while g == one {
                z = f(&z);
                let diff = if y > z { &y - &z } else { &z - &y };
                g = diff.gcd(n);
                if diff.is_zero() {
                    break;
                }
            }
        }
        if g != one && g != *n {
            return g;
        }
        c += BigUint::one();
    }
}

/// Full factorization of |n| as (prime, exponent) pairs, ascending.
pub fn factor(n: &Int) -> Vec<(Int, u32)> {
    let mut u = n.magnitude().clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    if u.is_zero() || u.is_one() {
        return Vec::new();
    }
    // trial division over small primes
    let mut p = 2u64;
    while p < 1 << 16 {
        let bp = BigUint::from(p);
        if (&bp * &bp) > u {
            break;
        }
        let mut e = 0;
        while (&u % &bp).is_zero() {
            u /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    // remaining cofactor: split recursively
    let mut stack = vec![u];
    let mut big: Vec<BigUint> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            big.push(m);
        } else {
            let d = pollard_brent(&m, 1);
            let q = &m / &d;
            stack.push(d);
            stack.push(q);
        }
    }
    big.sort();
    let mut i = 0;
    while i < big.len() {
        let mut e = 1;
        while i + (e as usize) < big.len() && big[i + e as usize] == big[i] {
            e += 1;
        }
        out.push((big[i].clone(), e));
        i += e as usize;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter()
        .map(|(p, e)| (BigInt::from_biguint(Sign::Plus, p), e))
        .collect()
}

/// All positive divisors of |n|, unsorted. Errors out (None) if more than `cap`.
pub fn divisors(n: &Int, cap: usize) -> Option<Vec<Int>> {
    let f = factor(n);
    let mut divs: Vec<Int> = vec![Int::one()];
    for (p, e) in f {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        let mut pk = Int::one();
        for _ in 0..=e {
            for d in &divs {
                next.push(d * &pk);
                if next.len() > cap {
                    return None;
                }
            }
            pk *= &p;
        }
        divs = next;
    }
    Some(divs)
}

/// p-adic valuation of a nonzero rational (negative for denominators).
pub fn padic_valuation(x: &Rat, p: &Int) -> i64 {
    fn val(mut n: Int, p: &Int) -> i64 {
        let mut v = 0;
        while (&n % p).is_zero() {
            n /= p;
            v += 1;
        }
        v
    }
    debug_assert!(!x.is_zero());
    val(x.numer().abs(), p) - val(x.denom().abs(), p)
}

/// Reduce a rational mod p. None if p divides the denominator.
pub fn rat_mod_p(x: &Rat, p: u64) -> Option<u64> {
    let bp = Int::from(p);
    let den = (x.denom().mod_floor(&bp)).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = (x.numer().mod_floor(&bp)).to_u64()?;
    Some(mul_mod(num, inv_mod(den, p), p))
}

/// CRT-combine residues (r1 mod m1) and (r2 mod m2) with coprime moduli.
pub fn crt(r1: &Int, m1: &Int, r2: &Int, m2: &Int) -> Int {
    // r = r1 + m1 * ((r2 - r1) * m1^{-1} mod m2)
    let e = m1.extended_gcd(m2);
    debug_assert!(e.gcd.is_one());
    let inv = e.x.mod_floor(m2);
    let t = ((r2 - r1) * inv).mod_floor(m2);
    r1 + m1 * t
}

/// Rational reconstruction: find a/b with |a|, b <= sqrt(m/2), b coprime to m,
/// and a = b*r mod m. Returns None if no such fraction exists.
pub fn rational_reconstruct(r: &Int, m: &Int) -> Option<Rat> {
    let bound = {
        let half = m / Int::from(2);
        half.sqrt()
    };
    let mut r0 = m.clone();
    let mut r1 = r.mod_floor(m);
    let mut t0 = Int::zero();
    let mut t1 = Int::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if t1.gcd(m) != Int::one() {
        return None;
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    Some(Rat::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_smooth_and_semiprime() {
        let n = Int::from(557_256_278_016i64);
        let f = factor(&n);
        let back: Int = f.iter().map(|(p, e)| p.pow(*e)).product();
        assert_eq!(back, n);
        let n = Int::from(1_000_003i64) * Int::from(999_983i64);
        let f = factor(&n);
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn divisors_of_120() {
        let d = divisors(&Int::from(120), 1000).unwrap();
        assert_eq!(d.len(), 16);
    }

    #[test]
    fn reconstruct_simple_fraction() {
        let p = 1_000_000_007i64;
        let m = Int::from(p);
        // 3/7 mod p
        let r = Int::from(3) * Int::from(inv_mod(7, p as u64)) % &m;
        let rec = rational_reconstruct(&r, &m).unwrap();
        assert_eq!(rec, Rat::new(Int::from(3), Int::from(7)));
    }

    #[test]
    fn padic() {
        let x = Rat::new(Int::from(8), Int::from(9));
        assert_eq!(padic_valuation(&x, &Int::from(2)), 3);
        assert_eq!(padic_valuation(&x, &Int::from(3)), -2);
    }
}
