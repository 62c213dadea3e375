//! The exponent `f_n(x)` bounding boundary counts against their asymptotics,
//! and its splitting into values of the convex function
//! `χ_n(u) = (u + 1/(2n)) ln u`.

use super::real::Real;
use super::{domain, AnalyticError};

fn check(n: u64, x: &Real) -> Result<(), AnalyticError> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    if x.is_negative() || *x >= Real::one() {
        return Err(domain(format!("x = {x:.6} outside [0,1)")));
    }
    Ok(())
}

fn chi(n: &Real, u: &Real) -> Real {
    (u + Real::one() / (n * 2)) * u.ln()
}

/// `(2 + x + 3/(2n)) ln(1 + x/2 + 1/n) - (1 - x + 1/(2n)) ln(1 - x)
///  - (1 + 2x + 5/(2n)) ln(1 + 2x + 2/n)`.
pub fn f_direct(n: u64, x: &Real) -> Result<Real, AnalyticError> {
    check(n, x)?;
    let nr = Real::from_i64(n as i64);
    let inv = nr.recip();
    let m = 1 + x / 2 + &inv;
    let a = 1 - x;
    let b = 1 + x * 2 + &inv * 2;
    let t1 = (2 + x + &inv * 3 / 2) * m.ln();
    let t2 = (&a + &inv / 2) * a.ln();
    let t3 = (1 + x * 2 + &inv * 5 / 2) * b.ln();
    Ok(t1 - t2 - t3)
}

/// `2χ(m) - χ(a) - χ(b) - c/n · ln m` with `a = 1-x`, `b = 1+2x+2/n`,
/// `m = (a+b)/2`. Matching `f_direct` needs `c = 3/2`.
fn f_split(n: u64, x: &Real, c: &Real) -> Result<Real, AnalyticError> {
    check(n, x)?;
    let nr = Real::from_i64(n as i64);
    let a = 1 - x;
    let b = 1 + x * 2 + Real::from_i64(2) / &nr;
    let m = (&a + &b) / 2;
    let tail = c / &nr * m.ln();
    Ok(chi(&nr, &m) * 2 - chi(&nr, &a) - chi(&nr, &b) - tail)
}

/// Convexity splitting with the correct `3/(2n)` remainder.
pub fn f_decomposed(n: u64, x: &Real) -> Result<Real, AnalyticError> {
    f_split(n, x, &Real::ratio(3, 2))
}

/// The splitting with a `1/(2n)` remainder; off from `f_direct` by
/// `ln(1 + x/2 + 1/n)/n`. Kept to document the discrepancy.
pub fn f_decomposed_half(n: u64, x: &Real) -> Result<Real, AnalyticError> {
    f_split(n, x, &Real::ratio(1, 2))
}

/// `f_n((p-1)/n)` with the argument formed exactly; `1 ≤ p ≤ n`.
pub fn f_at_boundary(n: u64, p: u64) -> Result<Real, AnalyticError> {
    if p == 0 || p > n {
        return Err(domain(format!("need 1 ≤ p ≤ n, got p = {p}, n = {n}")));
    }
    f_direct(n, &Real::ratio(p as i64 - 1, n as i64))
}
