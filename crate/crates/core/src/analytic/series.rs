//! Truncated power series with exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::AnalyticError;

/// Coefficients `c[0], c[1], …` of a series truncated after `len` terms.
pub type Series = Vec<BigRational>;

/// Extra terms carried beyond the requested index.
pub const GUARD_TERMS: usize = 4;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_poly(coeffs: &[BigRational], len: usize) -> Series {
    (0..len)
        .map(|i| coeffs.get(i).cloned().unwrap_or_else(BigRational::zero))
        .collect()
}

pub fn mul(a: &[BigRational], b: &[BigRational], len: usize) -> Series {
    let mut out = vec![BigRational::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub fn scale(a: &[BigRational], c: &BigRational) -> Series {
    a.iter().map(|x| x * c).collect()
}

pub fn add(a: &[BigRational], b: &[BigRational]) -> Series {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x + y
        })
        .collect()
}

/// Multiplicative inverse; the constant term must be nonzero.
pub fn inverse(a: &[BigRational], len: usize) -> Result<Series, AnalyticError> {
    if a.first().map_or(true, |c| c.is_zero()) {
        return Err(AnalyticError::Domain("series has no constant term".into()));
    }
    let c0 = a[0].recip();
    let mut out: Series = Vec::with_capacity(len);
    out.push(c0.clone());
    for n in 1..len {
        let mut s = BigRational::zero();
        for k in 1..=n.min(a.len() - 1) {
            s += &a[k] * &out[n - k];
        }
        out.push(-s * &c0);
    }
    Ok(out)
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// Square root with positive constant term, which must be a rational square.
pub fn sqrt(a: &[BigRational], len: usize) -> Result<Series, AnalyticError> {
    let c0 = a
        .first()
        .and_then(rational_sqrt)
        .filter(|c| !c.is_zero())
        .ok_or_else(|| AnalyticError::Domain("constant term is not a nonzero rational square".into()))?;
    let two_c0 = &c0 * BigInt::from(2);
    let mut out: Series = vec![c0];
    for n in 1..len {
        let mut s = a.get(n).cloned().unwrap_or_else(BigRational::zero);
        for k in 1..n {
            s -= &out[k] * &out[n - k];
        }
        out.push(s / &two_c0);
    }
    Ok(out)
}

/// Coefficients of `(4/3)(2√(1-12x) + 1)/(√(1-12x) + 1)²` up to `x^order`.
pub fn quad_gf_coefficients(order: usize) -> Series {
    let len = order + 1 + GUARD_TERMS;
    let s = sqrt(&[rat(1, 1), rat(-12, 1)], len).expect("constant term 1");
    let num = add(&scale(&s, &rat(2, 1)), &[rat(1, 1)]);
    let s1 = add(&s, &[rat(1, 1)]);
    let den = mul(&s1, &s1, len);
    let mut q = mul(&num, &inverse(&den, len).expect("constant term 4"), len);
    q = scale(&q, &rat(4, 3));
    q.truncate(order + 1);
    q
}

/// Coefficients of `((18-y)(2-y)³)^{-1/2}` up to `y^order`. Multiplied by
/// `128√3/√π` and shifted by one they give the boundary constants.
pub fn kappa_base_coefficients(order: usize) -> Series {
    let len = order + 1 + GUARD_TERMS;
    let a = [rat(18, 1), rat(-1, 1)];
    let b = [rat(2, 1), rat(-1, 1)];
    let b3 = mul(&mul(&b, &b, len), &b, len);
    let poly = mul(&a, &b3, len);
    let root = sqrt(&poly, len).expect("constant term 144");
    let mut inv = inverse(&root, len).expect("constant term 12");
    inv.truncate(order + 1);
    inv
}

/// Offspring probabilities `Θ(0..=order)`: the coefficients in `u` of the
/// hull generating function at rational `p ∈ (0,1)`.
pub fn theta_coefficients(p: &BigRational, order: usize) -> Result<Series, AnalyticError> {
    if !(p.is_positive() && p < &BigRational::one()) {
        return Err(AnalyticError::Domain(format!("p = {p} outside (0,1)")));
    }
    let len = order + 2 + GUARD_TERMS;
    let one = BigRational::one();
    let c = |k: i64| BigRational::from_integer(BigInt::from(k));
    // radicand p²u² + 2p²u − 2pu² + 9p² + 8pu + u² + 18p − 10u + 9
    let d0 = c(9) * p * p + c(18) * p + c(9);
    let d1 = c(2) * p * p + c(8) * p - c(10);
    let d2 = p * p - c(2) * p + &one;
    let root = sqrt(&[d0, d1, d2], len)?;
    let one_minus_u = [one.clone(), -one.clone()];
    let mut n = mul(&one_minus_u, &root, len);
    // + u²p − u² − 3p + 6u − 3
    n[0] += -(c(3) * p) - c(3);
    n[1] += c(6);
    n[2] += p - &one;
    debug_assert!(n[0].is_zero());
    let denom = c(2) * (&one - p);
    Ok(n[1..=order + 1].iter().map(|x| x / &denom).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_sqrt_agree() {
        let a = vec![rat(4, 1), rat(3, 1), rat(-1, 2)];
        let s = sqrt(&a, 8).unwrap();
        let back = mul(&s, &s, 8);
        assert_eq!(back, from_poly(&a, 8));
        let inv = inverse(&a, 8).unwrap();
        assert_eq!(mul(&a, &inv, 8), from_poly(&[rat(1, 1)], 8));
        assert!(sqrt(&[rat(2, 1), rat(1, 1)], 4).is_err());
    }

    #[test]
    fn quad_series_small_terms() {
        let q = quad_gf_coefficients(4);
        let want: Vec<_> = [1, 2, 9, 54, 378].iter().map(|&k| rat(k, 1)).collect();
        assert_eq!(q, want);
    }

    #[test]
    fn kappa_base_leading_terms() {
        let k = kappa_base_coefficients(1);
        assert_eq!(k[0], rat(1, 12));
        // d/dy of (144 - 224y + …)^{-1/2} at 0 is 112/144^{3/2}
        assert_eq!(k[1], rat(112, 1728));
    }
}
