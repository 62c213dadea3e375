//! Closed forms of the quadrangulation and truncated-quadrangulation
//! generating functions.

use super::real::Real;
use super::{domain, AnalyticError};

/// Radicands below this magnitude are treated as rounding noise.
pub(crate) fn clamp_radicand(x: Real, what: &str) -> Result<Real, AnalyticError> {
    if !x.is_negative() {
        return Ok(x);
    }
    if x > Real::parse("-1e-70") {
        Ok(Real::zero())
    } else {
        Err(domain(format!("{what}: negative radicand {x:.6}")))
    }
}

fn check_x(x: &Real) -> Result<(), AnalyticError> {
    let bound = Real::ratio(1, 12);
    if x.abs() >= bound {
        return Err(domain(format!("|x| = {:.6} is not below 1/12", x.abs())));
    }
    Ok(())
}

/// `q(x) = (4/3)(2√(1-12x) + 1)/(√(1-12x) + 1)²` for `|x| < 1/12`.
pub fn q_eval(x: &Real) -> Result<Real, AnalyticError> {
    check_x(x)?;
    let s = (1 - x * 12).sqrt();
    let den = (&s + 1).powi(2);
    Ok((&s * 2 + 1) * 4 / (den * 3))
}

/// `U(x, y) = (y - xy² - 1 + √(y² - 2xy³ - 2y + 4xy q(x) + (xy² - 1)²)) / 2`.
pub fn u_eval(x: &Real, y: &Real) -> Result<Real, AnalyticError> {
    let q = q_eval(x)?;
    let y2 = y * y;
    let xy2 = x * &y2;
    let rad = &y2 - &xy2 * y * 2 - y * 2 + x * y * &q * 4 + (&xy2 - 1).powi(2);
    let root = clamp_radicand(rad, "U")?.sqrt();
    Ok((y - &xy2 - 1 + root) / 2)
}
