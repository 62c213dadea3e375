//! Binary floating point with a fixed 320-bit mantissa (about 96 decimal digits).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

pub const PRECISION: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn zero() -> Self {
        Real(BigFloat::from_u8(0, PRECISION))
    }

    pub fn one() -> Self {
        Real(BigFloat::from_u8(1, PRECISION))
    }

    pub fn from_i64(i: i64) -> Self {
        Real(BigFloat::from_i64(i, PRECISION))
    }

    pub fn from_f64(f: f64) -> Self {
        Real(BigFloat::from_f64(f, PRECISION))
    }

    /// `num / den`, rounded once.
    pub fn ratio(num: i64, den: i64) -> Self {
        Real::from_i64(num) / Real::from_i64(den)
    }

    pub fn from_bigint(i: &BigInt) -> Self {
        Real::parse(&i.to_string())
    }

    pub fn from_biguint(i: &BigUint) -> Self {
        Real::parse(&i.to_string())
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Real::from_bigint(r.numer()) / Real::from_bigint(r.denom())
    }

    /// Parses a decimal literal such as `-1.25e-3`.
    pub fn parse(s: &str) -> Self {
        Real(with_consts(|cc| BigFloat::parse(s, Radix::Dec, PRECISION, RM, cc)))
    }

    pub fn pi() -> Self {
        Real(with_consts(|cc| cc.pi(PRECISION, RM)))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(PRECISION, RM))
    }

    pub fn ln(&self) -> Self {
        Real(with_consts(|cc| self.0.ln(PRECISION, RM, cc)))
    }

    pub fn exp(&self) -> Self {
        Real(with_consts(|cc| self.0.exp(PRECISION, RM, cc)))
    }

    pub fn cosh(&self) -> Self {
        Real(with_consts(|cc| self.0.cosh(PRECISION, RM, cc)))
    }

    pub fn sinh(&self) -> Self {
        Real(with_consts(|cc| self.0.sinh(PRECISION, RM, cc)))
    }

    pub fn powi(&self, n: usize) -> Self {
        Real(self.0.powi(n, PRECISION, RM))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Real::one() / self
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Nearest double, up to one extra rounding in the last place.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exponent, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        // value = 0.m × 2^exponent, most significant word last
        let mut acc = 0.0f64;
        let mut scale = 1.0f64;
        let step = (2.0f64).powi(-(WORD_BIT_SIZE as i32));
        for &w in words.iter().rev().take(128 / WORD_BIT_SIZE) {
            scale *= step;
            acc += w as f64 * scale;
        }
        let mut e = exponent;
        while e > 1000 {
            acc *= (2.0f64).powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            acc *= (2.0f64).powi(-1000);
            e += 1000;
        }
        let v = acc * (2.0f64).powi(e);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// Scientific notation with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return format!("{:.*}e0", digits.saturating_sub(1), 0.0);
        }
        let text = with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).unwrap_or_default();
        round_decimal(&text, digits).unwrap_or(text)
    }
}

/// Rounds a `[-]d.ddde±x` literal to `digits` significant digits.
fn round_decimal(text: &str, digits: usize) -> Option<String> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (mant, exp) = body.split_once('e')?;
    let mut exp: i64 = exp.parse().ok()?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let mut ds: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes())
        .map(|b| b - b'0')
        .collect();
    // normalise to one leading digit
    exp += int_part.len() as i64 - 1;
    while ds.len() > 1 && ds[0] == 0 {
        ds.remove(0);
        exp -= 1;
    }
    let digits = digits.max(1);
    ds.resize(ds.len().max(digits + 1), 0);
    let round_up = ds[digits] >= 5;
    ds.truncate(digits);
    if round_up {
        let mut i = digits;
        loop {
            if i == 0 {
                ds.insert(0, 1);
                ds.truncate(digits);
                exp += 1;
                break;
            }
            i -= 1;
            if ds[i] == 9 {
                ds[i] = 0;
            } else {
                ds[i] += 1;
                break;
            }
        }
    }
    let s: String = ds.iter().map(|d| (b'0' + d) as char).collect();
    let (head, tail) = s.split_at(1);
    let sign = if neg { "-" } else { "" };
    Some(if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    })
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sci_string(30))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl From<i64> for Real {
    fn from(i: i64) -> Self {
        Real::from_i64(i)
    }
}

impl From<f64> for Real {
    fn from(f: f64) -> Self {
        Real::from_f64(f)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(self.0.$inner(&rhs.0, PRECISION, RM))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $trait<i64> for &Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                self.$method(&Real::from_i64(rhs))
            }
        }
        impl $trait<i64> for Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                (&self).$method(&Real::from_i64(rhs))
            }
        }
        impl $trait<&Real> for i64 {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&Real::from_i64(self)).$method(rhs)
            }
        }
        impl $trait<Real> for i64 {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&Real::from_i64(self)).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.neg())
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.clone().neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_round_trip() {
        for x in [0.1, -2.5, 1e-300, 3.0e250, 12345.678, -7.0e-12, 1.0] {
            assert_eq!(Real::from_f64(x).to_f64(), x);
        }
        assert_eq!(Real::zero().to_f64(), 0.0);
    }

    #[test]
    fn arithmetic_and_functions() {
        let third = Real::ratio(1, 3);
        assert!(((&third * 3) - 1).abs() < Real::parse("1e-90"));
        assert!((Real::pi().to_f64() - std::f64::consts::PI).abs() < 1e-16);
        let two = Real::from_i64(2);
        assert!((two.sqrt().to_f64() - 2f64.sqrt()).abs() < 1e-16);
        assert!((two.ln().exp() - &two).abs() < Real::parse("1e-90"));
        let w = Real::parse("0.75");
        let id = w.cosh().powi(2) - w.sinh().powi(2);
        assert!((id - 1).abs() < Real::parse("1e-90"));
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(Real::ratio(1, 3).to_sci_string(5), "3.3333e-1");
        assert_eq!(Real::ratio(2, 3).to_sci_string(3), "6.67e-1");
        assert_eq!(Real::from_i64(-1250).to_sci_string(2), "-1.3e3");
        assert_eq!(Real::parse("9.9999").to_sci_string(3), "1.00e1");
        assert_eq!(round_decimal("1.5e0", 1).unwrap(), "2e0");
    }
}
