//! Rational approximations of the few irrational constants that appear in
//! printed closed forms (`A^lambda`, `ln A`). Everything is computed with
//! integer arithmetic to a fixed number of decimal digits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{as_i64, int, Rational};

/// Default number of decimal digits for constants.
pub const DIGITS: u32 = 60;

fn ten_pow(d: u32) -> BigInt {
    BigInt::from(10u32).pow(d)
}

/// Rounds `x` to the nearest multiple of `10^-digits`.
pub fn round_to(x: &Rational, digits: u32) -> Rational {
    let scale = ten_pow(digits);
    let scaled = x * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_mod_floor(scaled.denom());
    let twice: BigInt = r * 2;
    let q = if &twice >= scaled.denom() { q + 1 } else { q };
    Rational::new(q, scale)
}

/// `x^(1/b)` for `x > 0`, exact when it is rational.
pub fn root(x: &Rational, b: u32, digits: u32) -> Result<Rational> {
    if !x.is_positive() {
        return Err(Error::InvalidParameter(
            "root of a non-positive number".into(),
        ));
    }
    if let Some(exact) = exact_root(x, b) {
        return Ok(exact);
    }
    // floor(x * 10^(b*digits))^(1/b) / 10^digits
    let scale = ten_pow(digits);
    let big = (x * Rational::from_integer(scale.pow(b)))
        .floor()
        .to_integer();
    Ok(Rational::new(big.nth_root(b), scale))
}

/// `x^(1/b)` when it is rational.
pub fn exact_root(x: &Rational, b: u32) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().nth_root(b);
    let d = x.denom().nth_root(b);
    if n.pow(b) == *x.numer() && d.pow(b) == *x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// `x^e` for `x > 0` and rational `e`, exact when possible.
pub fn pow(x: &Rational, e: &Rational, digits: u32) -> Result<Rational> {
    let a = as_i64(&Rational::from_integer(e.numer().clone()))
        .ok_or_else(|| Error::InvalidParameter("exponent numerator too large".into()))?;
    let b = u32::try_from(e.denom().clone())
        .map_err(|_| Error::InvalidParameter("exponent denominator too large".into()))?;
    let base = crate::rational::powi(x, a);
    root(&base, b, digits)
}

/// `x^e` only if it is rational.
pub fn exact_pow(x: &Rational, e: &Rational) -> Option<Rational> {
    let a = as_i64(&Rational::from_integer(e.numer().clone()))?;
    let b = u32::try_from(e.denom().clone()).ok()?;
    if x.is_zero() {
        return if e.is_positive() {
            Some(Rational::zero())
        } else {
            None
        };
    }
    exact_root(&crate::rational::powi(x, a), b)
}

/// `atanh(z) = z + z^3/3 + ...` for `|z| <= 1/2`.
fn atanh_small(z: &Rational, digits: u32) -> Rational {
    let guard = digits + 10;
    let eps = Rational::new(BigInt::one(), ten_pow(guard));
    let z2 = round_to(&(z * z), guard);
    let mut power = z.clone();
    let mut acc = Rational::zero();
    let mut k = 1i64;
    while power.abs() > eps {
        acc += &power / int(k);
        power = round_to(&(&power * &z2), guard);
        k += 2;
    }
    round_to(&acc, digits)
}

/// Natural logarithm of `x > 0`.
pub fn ln(x: &Rational, digits: u32) -> Result<Rational> {
    if !x.is_positive() {
        return Err(Error::InvalidParameter(
            "logarithm of a non-positive number".into(),
        ));
    }
    if x.is_one() {
        return Ok(Rational::zero());
    }
    let guard = digits + 10;
    let two = int(2);
    let mut y = x.clone();
    let mut k: i64 = 0;
    while y > two {
        y /= &two;
        k += 1;
    }
    while y < Rational::new(BigInt::one(), BigInt::from(2)) {
        y *= &two;
        k -= 1;
    }
    let one = Rational::one();
    let z = (&y - &one) / (&y + &one);
    let ln2 = atanh_small(&Rational::new(BigInt::one(), BigInt::from(3)), guard) * &two;
    let v = atanh_small(&z, guard) * &two + ln2 * int(k);
    Ok(round_to(&v, digits))
}

/// `log_lambda(x) = (x^lambda - 1)/lambda`, or `ln x` at `lambda = 0`.
pub fn log_lambda(x: &Rational, lambda: &Rational, digits: u32) -> Result<Rational> {
    if lambda.is_zero() {
        return ln(x, digits);
    }
    Ok((pow(x, lambda, digits + 5)? - Rational::one()) / lambda)
}

/// Decimal rendering with `sig` significant digits, e.g. `1.23456789012e-3`.
pub fn to_decimal(x: &Rational, sig: usize) -> String {
    let f = crate::rational::to_f64(x);
    format_sig(f, sig)
}

/// Formats a float with `sig` significant digits in plain or exponent form.
pub fn format_sig(f: f64, sig: usize) -> String {
    if f == 0.0 || !f.is_finite() {
        return format!("{f}");
    }
    let exp = f.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let s = format!("{f:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", sig - 1, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, to_f64};

    #[test]
    fn ln_two() {
        let v = ln(&int(2), 40).unwrap();
        let expected: Rational =
            crate::rational::parse_rational("0.6931471805599453094172321214581765680755").unwrap();
        assert!((v - expected).abs() < Rational::new(BigInt::one(), ten_pow(38)));
    }

    #[test]
    fn ln_matches_float() {
        for x in [rat(1, 7), rat(3, 2), int(10), rat(1000, 3)] {
            let v = to_f64(&ln(&x, 30).unwrap());
            assert!((v - to_f64(&x).ln()).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn roots() {
        assert_eq!(exact_root(&rat(4, 9), 2), Some(rat(2, 3)));
        assert_eq!(exact_root(&int(2), 2), None);
        let r = root(&int(2), 2, 30).unwrap();
        assert!((to_f64(&r) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(pow(&int(8), &rat(2, 3), 20).unwrap(), int(4));
        assert_eq!(exact_pow(&int(2), &int(-2)), Some(rat(1, 4)));
        let p = pow(&int(2), &rat(-1, 3), 30).unwrap();
        assert!((to_f64(&p) - 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn log_lambda_limits() {
        assert_eq!(log_lambda(&int(2), &int(1), 20).unwrap(), int(1));
        assert_eq!(log_lambda(&int(4), &rat(1, 2), 20).unwrap(), int(2));
    }

    #[test]
    fn decimal_format() {
        assert_eq!(format_sig(0.5, 12), "0.5");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(123456.0, 12), "123456");
        assert_eq!(format_sig(1.5e-9, 3), "1.50e-9");
    }
}
