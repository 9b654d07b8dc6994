//! Exact rational scalars and small helpers around them.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_big(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let trimmed = s.trim();
    Rational::from_str(trimmed).map_err(|_| Error::Parse {
        field: "rational".into(),
        value: s.to_string(),
    })
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &Rational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    if rem.is_zero() {
        q
    } else {
        q + 1
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn pow(r: &Rational, e: usize) -> Rational {
    let mut out = Rational::one();
    for _ in 0..e {
        out *= r;
    }
    out
}

/// Positional decimal rendering with `sig` significant digits, rounded half away from zero.
pub fn to_decimal(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let a = r.abs();
    // exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    loop {
        let lo = pow10(e);
        if a < lo {
            e -= 1;
        } else if a >= &lo * &ten {
            e += 1;
        } else {
            break;
        }
    }
    let shift = sig as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    let half = rat(1, 2);
    let mut digits = floor(&(scaled + half));
    let mut shift = shift;
    // rounding may carry into a new leading digit
    if digits.to_string().len() > sig {
        digits /= BigInt::from(10);
        shift -= 1;
    }
    let mut s = digits.to_string();
    let body = if shift <= 0 {
        for _ in 0..(-shift) {
            s.push('0');
        }
        s
    } else {
        let shift = shift as usize;
        if s.len() <= shift {
            let mut z = "0.".to_string();
            z.push_str(&"0".repeat(shift - s.len()));
            z.push_str(&s);
            z
        } else {
            let (i, f) = s.split_at(s.len() - shift);
            format!("{i}.{f}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn pow10(e: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Lossy conversion for display and plotting only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `-1`, `0` or `1`.
pub fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int(a: &[Rational], u: &[BigInt]) -> Rational {
    debug_assert_eq!(a.len(), u.len());
    a.iter()
        .zip(u)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * from_big(y))
}
