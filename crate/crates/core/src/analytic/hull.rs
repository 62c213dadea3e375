//! Offspring generating function of the hull skeleton, its iterates, and the
//! Laplace transform of the truncated hull volume.
//!
//! Everything is evaluated in forms that avoid the `p → 0` cancellations:
//! `arccosh z` is computed as `ln(z + √((z-1)(z+1)))` with `z - 1` formed
//! directly, and `-1 + k cosh w` as `2k sinh²(w/2) - (1 - k)`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::gf::{clamp_radicand, u_eval};
use super::real::Real;
use super::series::kappa_base_coefficients;
use super::{domain, AnalyticError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterateMode {
    /// Compose `phi` with itself.
    Numeric,
    /// The cosh closed form.
    Closed,
}

fn check_p(p: &Real) -> Result<(), AnalyticError> {
    if p.is_positive() && *p < Real::one() {
        Ok(())
    } else {
        Err(domain(format!("p = {p:.6} outside (0,1)")))
    }
}

fn check_u(u: &Real) -> Result<(), AnalyticError> {
    if u.is_negative() || *u > Real::one() {
        Err(domain(format!("u = {u:.6} outside [0,1]")))
    } else {
        Ok(())
    }
}

fn finite(x: Real, what: &str) -> Result<Real, AnalyticError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(AnalyticError::Overflow(what.into()))
    }
}

/// Quantities that depend on `p` only.
struct Params {
    p: Real,
    one_minus_p: Real,
    /// `√(2(1-p)/(p+2))`
    k: Real,
    inv_k: Real,
    /// `arccosh((2p+1)/(1-p))`
    y: Real,
}

impl Params {
    fn new(p: &Real) -> Result<Self, AnalyticError> {
        check_p(p)?;
        let one_minus_p = 1 - p;
        let k = (&one_minus_p * 2 / (p + 2)).sqrt();
        let inv_k = k.recip();
        let zm1 = p * 3 / &one_minus_p;
        let zp1 = (p + 2) / &one_minus_p;
        let y = (&zm1 + 1 + (zm1 * zp1).sqrt()).ln();
        Ok(Params { p: p.clone(), one_minus_p, k, inv_k, y })
    }

    /// `z_B(u) - 1` where `B(u) = arccosh z_B(u)`; requires `u < 1`.
    fn zb_minus_one(&self, u: &Real) -> Real {
        let c = &self.p * 6 / ((1 - u) * &self.one_minus_p);
        // 1/k - 1 = (1/k² - 1)/(1/k + 1)
        let inv_k_m1 = &self.p * 3 / (&self.one_minus_p * 2) / (&self.inv_k + 1);
        inv_k_m1 + &self.inv_k * c
    }

    fn b(&self, u: &Real) -> Real {
        let zm1 = self.zb_minus_one(u);
        let zp1 = &zm1 + 2;
        (&zm1 + 1 + (zm1 * zp1).sqrt()).ln()
    }

    /// `B'(0)`.
    fn b_prime_at_zero(&self) -> Real {
        let zm1 = self.zb_minus_one(&Real::zero());
        let zp1 = &zm1 + 2;
        let dz = &self.inv_k * &self.p * 6 / &self.one_minus_p;
        dz / (zm1 * zp1).sqrt()
    }

    /// `-1 + k cosh(w)`.
    fn e(&self, w: &Real) -> Real {
        let half = (w / 2).sinh();
        let one_minus_k = &self.p * 3 / ((&self.p + 2) * (&self.k + 1));
        &self.k * 2 * &half * &half - one_minus_k
    }

    fn w(&self, u: &Real, r: u32) -> Real {
        self.b(u) + &self.y * i64::from(r)
    }

    /// `ψ_r(u) = p + 6p/(-1 + k cosh(B(u) + ry))`.
    fn psi(&self, u: &Real, r: u32) -> Result<Real, AnalyticError> {
        let e = finite(self.e(&self.w(u, r)), "cosh(B + ry)")?;
        Ok(&self.p + &self.p * 6 / e)
    }
}

/// The closed form with `u = 0` taken as a limit; `u ∈ [0,1]`, `p ∈ (0,1)`.
pub fn phi(u: &Real, p: &Real) -> Result<Real, AnalyticError> {
    check_p(p)?;
    check_u(u)?;
    if u.is_zero() {
        return Ok((p * 4 + 2) / ((p + 1) * 3));
    }
    let u2 = u * u;
    let d = p * p * &u2 + p * p * u * 2 - p * &u2 * 2 + p * p * 9 + p * u * 8 + &u2 + p * 18
        - u * 10
        + 9;
    let root = clamp_radicand(d, "phi")?.sqrt();
    let n = &u2 * p - &u2 - p * 3 + u * 6 - 3 + (1 - u) * root;
    Ok(n / (u * (1 - p) * 2))
}

/// `(12/(s t² u))(U(s/12, tu) - U(s/12, 0))` with `s = 1 - p²`,
/// `t = 2/(1+p)`; requires `u > 0`.
pub fn phi_via_u(u: &Real, p: &Real) -> Result<Real, AnalyticError> {
    check_p(p)?;
    check_u(u)?;
    if u.is_zero() {
        return Err(domain("u = 0 is a removable singularity of this route"));
    }
    let s = 1 - p * p;
    let t = Real::from_i64(2) / (p + 1);
    let x = &s / 12;
    let diff = u_eval(&x, &(&t * u))? - u_eval(&x, &Real::zero())?;
    Ok(diff * 12 / (s * &t * &t * u))
}

/// `T_r(u) = 2/(1 - Φ^{(r)}(u))` from the cosh closed form; `u < 1`.
pub fn t_closed(u: &Real, p: &Real, r: u32) -> Result<Real, AnalyticError> {
    let pr = Params::new(p)?;
    if *u >= Real::one() {
        return Err(domain("T_r is infinite at u = 1"));
    }
    let e = finite(pr.e(&pr.w(u, r)), "cosh(B + ry)")?;
    Ok(&pr.one_minus_p * e / (p * 3))
}

fn g(t: &Real, p: &Real, omp: &Real) -> Real {
    let rad = p * (p + 2) * 3 * t * t + omp * (p + 2) * 2 * t + omp * omp;
    ((p * 2 + 1) * t + omp + rad.sqrt()) / omp
}

fn g_prime(t: &Real, p: &Real, omp: &Real) -> Real {
    let rad = p * (p + 2) * 3 * t * t + omp * (p + 2) * 2 * t + omp * omp;
    let inner = p * (p + 2) * 3 * t + omp * (p + 2);
    ((p * 2 + 1) + inner / rad.sqrt()) / omp
}

/// `T_r(u)` by iterating `T ↦ g(T)` from `T_0 = 2/(1-u)`.
pub fn t_recurrence(u: &Real, p: &Real, r: u32) -> Result<Real, AnalyticError> {
    check_p(p)?;
    if *u >= Real::one() {
        return Err(domain("T_r is infinite at u = 1"));
    }
    let omp = 1 - p;
    let mut t = Real::from_i64(2) / (1 - u);
    for _ in 0..r {
        t = g(&t, p, &omp);
    }
    finite(t, "T_r recurrence")
}

/// `Φ^{(r)}(u)`.
pub fn phi_iterate(u: &Real, p: &Real, r: u32, mode: IterateMode) -> Result<Real, AnalyticError> {
    check_p(p)?;
    check_u(u)?;
    match mode {
        IterateMode::Numeric => {
            let mut v = u.clone();
            for _ in 0..r {
                v = phi(&v, p)?;
            }
            Ok(v)
        }
        IterateMode::Closed => {
            if *u == Real::one() {
                return Ok(Real::one());
            }
            Ok(1 - Real::from_i64(2) / t_closed(u, p, r)?)
        }
    }
}

/// `(3/4)√((8+t)/t)`.
fn k_cal(t: &Real) -> Real {
    ((t + 8) / t).sqrt() * 3 / 4
}

/// `-3 ψ' / ((1-p) ψ^{3/2} (8+ψ)^{1/2})`, the chain rule through `K'`.
fn laplace_from_psi(psi: &Real, dpsi: &Real, omp: &Real) -> Real {
    -(dpsi * 3) / (omp * psi * psi.sqrt() * (psi + 8).sqrt())
}

/// `E[(1-p²)^{|H(r)|}]` for the truncated hull of radius `r ≥ 1`, with the
/// derivative in `u` taken analytically through `B` and `cosh`.
pub fn laplace_hull(r: u32, p: &Real) -> Result<Real, AnalyticError> {
    if r == 0 {
        return Err(domain("radius must be at least 1"));
    }
    let pr = Params::new(p)?;
    let w = pr.w(&Real::zero(), r);
    let e = finite(pr.e(&w), "cosh(B + ry)")?;
    let psi = p + p * 6 / &e;
    // ψ' = -6p k sinh(w) B' / E²
    let dpsi = -(p * 6 * &pr.k * w.sinh() * pr.b_prime_at_zero()) / (&e * &e);
    finite(laplace_from_psi(&psi, &dpsi, &pr.one_minus_p), "laplace")
}

/// Same quantity, with `T_r(0)` and `T_r'(0)` propagated through the
/// recurrence instead of the closed form.
pub fn laplace_hull_recurrence(r: u32, p: &Real) -> Result<Real, AnalyticError> {
    if r == 0 {
        return Err(domain("radius must be at least 1"));
    }
    check_p(p)?;
    let omp = 1 - p;
    let mut t = Real::from_i64(2);
    let mut dt = Real::from_i64(2);
    for _ in 0..r {
        dt = g_prime(&t, p, &omp) * dt;
        t = g(&t, p, &omp);
    }
    let psi = p + &omp * 2 / &t;
    let dpsi = -(&omp * 2 * dt) / (&t * &t);
    finite(laplace_from_psi(&psi, &dpsi, &omp), "laplace recurrence")
}

/// Same quantity from a central difference of `u ↦ K(ψ_r(u))` at 0 with step `h`.
pub fn laplace_hull_finite_difference(r: u32, p: &Real, h: &Real) -> Result<Real, AnalyticError> {
    if r == 0 {
        return Err(domain("radius must be at least 1"));
    }
    let pr = Params::new(p)?;
    let plus = k_cal(&pr.psi(h, r)?);
    let minus = k_cal(&pr.psi(&-h, r)?);
    Ok((plus - minus) / (h * 2) / &pr.one_minus_p)
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// `r(r+3)(6r⁴+36r³+87r²+99r+44) / (4(2r+3)²)`.
pub fn mean_hull(r: u64) -> BigRational {
    let poly = big(6) * big(r).pow(4) + big(36) * big(r).pow(3) + big(87) * big(r).pow(2) + big(99) * big(r) + big(44);
    let num = big(r) * big(r + 3) * poly;
    let den = big(4) * big(2 * r + 3).pow(2);
    BigRational::new(num, den)
}

/// Constant of the `t^{-3/2}` tail of the hull volume:
/// `r(r+3)(r+1)³(r+2)³ / (4√π (2r+3)²)`.
pub fn tail_constant(r: u64) -> Real {
    let num = big(r) * big(r + 3) * big(r + 1).pow(3) * big(r + 2).pow(3);
    let den = big(4) * big(2 * r + 3).pow(2);
    Real::from_rational(&BigRational::new(num, den)) / Real::pi().sqrt()
}

/// `(a1, a32)` of the expansion `1 - a1 λ + a32 λ^{3/2}` for `E[e^{-λ|H(r)|/r⁴}]`.
pub fn expansion_coefficients(r: u64) -> (BigRational, BigRational) {
    assert!(r >= 1, "radius must be at least 1");
    let poly = big(6) * big(r).pow(4) + big(36) * big(r).pow(3) + big(87) * big(r).pow(2) + big(99) * big(r) + big(44);
    let sq = big(2 * r + 3).pow(2);
    let a1 = BigRational::new(big(r + 3) * poly, big(4) * big(r).pow(3) * &sq);
    let a32 = BigRational::new(
        big(r + 3) * big(r + 1).pow(3) * big(r + 2).pow(3),
        big(2) * big(r).pow(5) * sq,
    );
    (a1, a32)
}

/// `(a1, a32, 1 - a1 λ + a32 λ^{3/2})`.
pub fn expansion_predict(r: u64, lambda: &Real) -> (BigRational, BigRational, Real) {
    let (a1, a32) = expansion_coefficients(r);
    let pred = 1 - Real::from_rational(&a1) * lambda + Real::from_rational(&a32) * lambda * lambda.sqrt();
    (a1, a32, pred)
}

/// `E[e^{-λ|H(r)|/r⁴}]`, i.e. the transform at `p = √(1 - e^{-λ/r⁴})`.
pub fn laplace_scaled(r: u32, lambda: &Real) -> Result<Real, AnalyticError> {
    let mu = lambda / Real::from_i64(i64::from(r)).powi(4);
    laplace_hull(r, &(1 - (-mu).exp()).sqrt())
}

/// `E[|H(r)|] = -d/dλ E[e^{-λ|H(r)|}]` at 0, by Richardson extrapolation of
/// `(1 - L(s²))/s²`, which is a power series in `s`.
pub fn mean_hull_from_laplace(r: u32) -> Result<Real, AnalyticError> {
    const LEVELS: usize = 8;
    let rr = Real::from_i64(i64::from(r));
    let mut s = Real::one() / (&rr * &rr * 16);
    let mut table: Vec<Vec<Real>> = Vec::with_capacity(LEVELS + 1);
    for level in 0..=LEVELS {
        let s2 = &s * &s;
        let l = laplace_hull(r, &(1 - (-&s2).exp()).sqrt())?;
        let mut row = vec![(1 - l) / &s2];
        for j in 1..=level {
            let prev = &row[j - 1];
            let factor = Real::from_i64((1i64 << j) - 1);
            let next = prev + (prev - &table[level - 1][j - 1]) / factor;
            row.push(next);
        }
        table.push(row);
        s = s / 2;
    }
    Ok(table[LEVELS][LEVELS].clone())
}

/// Coefficient `κ_p` of `y^p` in `128√3/√π · y/√((18-y)(2-y)³)`.
pub fn kappa_coeff(p: usize) -> Real {
    assert!(p >= 1, "index must be positive");
    let base = kappa_base_coefficients(p - 1);
    let c = Real::from_rational(&base[p - 1]);
    c * 128 * Real::from_i64(3).sqrt() / Real::pi().sqrt()
}
