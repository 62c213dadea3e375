//! Exact counts of quadrangulations, with and without a boundary.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::real::Real;

/// Product of `lo..hi` by balanced splitting.
fn range_product(lo: u64, hi: u64) -> BigUint {
    match hi.saturating_sub(lo) {
        0 => BigUint::one(),
        1 => BigUint::from(lo),
        2 => BigUint::from(lo) * BigUint::from(lo + 1),
        len => {
            let mid = lo + len / 2;
            range_product(lo, mid) * range_product(mid, hi)
        }
    }
}

pub fn factorial(n: u64) -> BigUint {
    range_product(1, n + 1)
}

/// Rooted quadrangulations with `n` faces: `3^n · 2(2n)! / (n!(n+2)!)`.
pub fn count_quads(n: u64) -> BigUint {
    let num = BigUint::from(3u8).pow(n as u32) * 2u8 * factorial(2 * n);
    let den = factorial(n) * factorial(n + 2);
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero());
    q
}

/// Quadrangulations with `n` inner faces and a simple boundary of length
/// `2p`: `3^(n-p) (3p)!(2n+p-1)! / ((n+1-p)! p! (2p-1)! (n+2p)!)`, zero when
/// `p > n + 1`.
pub fn count_boundary_quads(n: u64, p: u64) -> BigUint {
    assert!(p >= 1, "boundary half-length must be positive");
    if p > n + 1 {
        return BigUint::zero();
    }
    let mut num = factorial(3 * p) * factorial(2 * n + p - 1);
    let mut den = factorial(n + 1 - p) * factorial(p) * factorial(2 * p - 1) * factorial(n + 2 * p);
    if n >= p {
        num *= BigUint::from(3u8).pow((n - p) as u32);
    } else {
        den *= 3u8;
    }
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero());
    q
}

/// Natural logarithm of a positive big integer, to double precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "logarithm of zero");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().expect("fits").to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `count / (n^{-5/2} 12^n)`, evaluated through logarithms.
pub fn normalized_count(count: &BigUint, n: u64) -> f64 {
    let nf = n as f64;
    (ln_biguint(count) + 2.5 * nf.ln() - nf * 12f64.ln()).exp()
}

/// `2^p 3^{-p} (3p)! / (p!(2p-1)!) / (2√π)`.
pub fn cp_constant(p: u64) -> Real {
    assert!(p >= 1, "boundary half-length must be positive");
    let num = BigUint::from(2u8).pow(p as u32) * factorial(3 * p);
    let den = BigUint::from(3u8).pow(p as u32) * factorial(p) * factorial(2 * p - 1);
    Real::from_biguint(&num) / Real::from_biguint(&den) / (Real::pi().sqrt() * 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(10), BigUint::from(3_628_800u32));
        let naive = (1..=40u32).fold(BigUint::one(), |a, k| a * k);
        assert_eq!(factorial(40), naive);
    }

    #[test]
    fn small_counts() {
        let c: Vec<u64> = (0..6).map(|n| count_quads(n).to_u64().unwrap()).collect();
        assert_eq!(c, vec![1, 2, 9, 54, 378, 2916]);
        assert_eq!(count_boundary_quads(0, 1), BigUint::one());
        assert_eq!(count_boundary_quads(3, 5), BigUint::zero());
        // one inner face inside a 4-cycle: every rooting of the square is equivalent
        assert_eq!(count_boundary_quads(1, 2), BigUint::one());
    }

    #[test]
    fn log_of_large_integers() {
        let x = BigUint::from(10u8).pow(400);
        assert!((ln_biguint(&x) - 400.0 * 10f64.ln()).abs() < 1e-10);
    }
}
