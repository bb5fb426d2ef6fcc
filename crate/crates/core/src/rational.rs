//! Exact rational scalars and the small combinatorial helpers built on them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`; panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn factorial_q(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

/// Falling factorial `x (x-1) ... (x-k+1)`.
pub fn falling(x: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc *= &term;
        term -= Rational::one();
    }
    acc
}

/// Rising factorial `x (x+1) ... (x+k-1)`.
pub fn rising(x: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

/// Generalized binomial coefficient `C(top, k) = (top)_k / k!` for any
/// rational top and `k >= 0`.
pub fn binom_q(top: &Rational, k: usize) -> Rational {
    falling(top, k) / factorial_q(k)
}

/// Integer binomial with the generalized convention: `C(n, k) = 0` for
/// `k < 0`, and `C(n, k) = (n)_k / k!` otherwise (so `C(-1, 0) = 1`).
pub fn binom(n: i64, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    if n >= 0 && k > n {
        return Rational::zero();
    }
    binom_q(&int(n), k as usize)
}

/// `x^e` for a signed integer exponent. `0^0 = 1`; a negative power of
/// zero panics.
pub fn powi(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        assert!(!x.is_zero(), "negative power of zero");
        num_traits::pow(x.recip(), e.unsigned_abs() as usize)
    }
}

pub fn sign(n: usize) -> Rational {
    if n.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Returns the value as an `i64` when it is an integer that fits.
pub fn as_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// Exact text form: `"num/den"`, or just `"num"` when the denominator is 1.
pub fn to_exact_string(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"`, a signed integer, or a finite decimal such as `"-0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole_digits}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(digits, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Best-effort conversion to `f64` for reporting; exact values stay rational.
pub fn to_f64(x: &Rational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale down huge numerators and denominators before dividing.
    let n = x.numer().bits() as i64;
    let d = x.denom().bits() as i64;
    let shift = (n.max(d) - 1000).max(0) as usize;
    let num = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let den = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    num / den
}
