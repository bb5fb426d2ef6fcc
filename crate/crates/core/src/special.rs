//! Deterministic number families: degenerate factorials, degenerate
//! exponentials and logarithms, the Stirling-type triangles, partial Bell
//! polynomials and the order-gamma Bernoulli, Daehee and Cauchy numbers.
//!
//! `lambda = 0` always selects the classical formulas directly.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{factorial_q, int, Rational};
use crate::series::Series;
use crate::triangle::{divided_powers, Family, Triangle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorialKind {
    Falling,
    Rising,
}

/// `(x)_{n,lambda} = x (x - lambda) ... (x - (n-1) lambda)` or the rising
/// analogue with `+ lambda`. Both are computed from the product itself.
pub fn deg_factorial(x: &Rational, n: usize, lambda: &Rational, kind: FactorialKind) -> Rational {
    let step = match kind {
        FactorialKind::Falling => -lambda,
        FactorialKind::Rising => lambda.clone(),
    };
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..n {
        acc *= &term;
        term += &step;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpLog {
    Exp,
    Log,
}

/// `e_lambda^x(t) = sum (x)_{n,lambda} t^n / n!`; `e^{xt}` at `lambda = 0`.
pub fn deg_exp(lambda: &Rational, x: &Rational, order: usize) -> Series {
    let egf: Vec<Rational> = (0..=order)
        .map(|n| deg_factorial(x, n, lambda, FactorialKind::Falling))
        .collect();
    Series::from_egf(&egf)
}

/// `log_lambda(1 + t) = ((1 + t)^lambda - 1) / lambda`; `log(1 + t)` at
/// `lambda = 0`.
pub fn deg_log(lambda: &Rational, order: usize) -> Series {
    let t = Series::var(order);
    if lambda.is_zero() {
        return t.log1p().expect("t has zero constant term");
    }
    let w = t.add_constant(&Rational::one());
    deg_log_of(&w, lambda).expect("1 + t has unit constant term")
}

/// `deg_exp` or `deg_log` by tag; `x` is ignored for the logarithm.
pub fn deg_exp_log(lambda: &Rational, x: &Rational, kind: ExpLog, order: usize) -> Series {
    match kind {
        ExpLog::Exp => deg_exp(lambda, x, order),
        ExpLog::Log => deg_log(lambda, order),
    }
}

/// `log_lambda(w) = (w^lambda - 1) / lambda` for a series with unit
/// constant term; plain `log(w)` at `lambda = 0`.
pub fn deg_log_of(w: &Series, lambda: &Rational) -> Result<Series> {
    if lambda.is_zero() {
        return w.ln();
    }
    if !w.constant_term().is_one() {
        return Err(Error::Precondition(
            "degenerate logarithm needs a unit constant term".into(),
        ));
    }
    Ok(w.pow(lambda)?
        .add_constant(&-Rational::one())
        .scale(&lambda.recip()))
}

/// `log e_lambda(t) = log(1 + lambda t) / lambda`; `t` at `lambda = 0`.
pub fn log_deg_exp(lambda: &Rational, order: usize) -> Series {
    let t = Series::var(order);
    if lambda.is_zero() {
        return t;
    }
    t.scale(lambda)
        .log1p()
        .expect("zero constant term")
        .scale(&lambda.recip())
}

/// The series whose divided powers generate a deterministic family.
pub fn family_base(family: Family, lambda: &Rational, order: usize) -> Result<Series> {
    let zero = Rational::zero();
    let minus_one = -Rational::one();
    let one = Rational::one();
    let base = match family {
        Family::S2 => deg_exp(&zero, &one, order).add_constant(&minus_one),
        Family::S1 => deg_log(&zero, order),
        Family::DegS2 => deg_exp(lambda, &one, order).add_constant(&minus_one),
        Family::DegS1 => deg_log(lambda, order),
        Family::Lah => {
            let t = Series::var(order);
            t.div(&Series::one(order).sub(&t)?)?
        }
        Family::HeteroS2 => deg_exp(&-lambda, &one, order).add_constant(&minus_one),
        Family::HeteroS1 => deg_log(&-lambda, order),
        _ => {
            return Err(Error::Unsupported(format!(
                "{family} depends on a random variable; use prob_triangle"
            )))
        }
    };
    Ok(base)
}

/// Builds a deterministic triangle from its generating function
/// `(1/k!) base(t)^k`.
pub fn triangle(family: Family, lambda: &Rational, nmax: usize) -> Result<Triangle> {
    let base = family_base(family, lambda, nmax)?;
    let lambda = match family {
        Family::S1 | Family::S2 | Family::Lah => Rational::zero(),
        _ => lambda.clone(),
    };
    Ok(Triangle::new(
        family,
        lambda,
        None,
        divided_powers(&base, nmax)?,
    ))
}

/// Partial Bell polynomial `B_{n,k}(x_1, ..., x_{n-k+1})`, read off the
/// generating function `(1/k!) (sum x_m t^m / m!)^k`. `x[0]` is `x_1`.
pub fn partial_bell(x: &[Rational], n: usize, k: usize) -> Result<Rational> {
    if k > n {
        return Ok(Rational::zero());
    }
    if k == 0 {
        return Ok(if n == 0 {
            Rational::one()
        } else {
            Rational::zero()
        });
    }
    let needed = n - k + 1;
    if x.len() < needed {
        return Err(Error::Precondition(format!(
            "B_{{{n},{k}}} needs {needed} arguments, got {}",
            x.len()
        )));
    }
    let mut egf = vec![Rational::zero(); n + 1];
    egf[1..=needed].clone_from_slice(&x[..needed]);
    let base = Series::from_egf(&egf);
    Ok(base.powi(k as i64)?.coeff_egf(n)? / factorial_q(k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NumberFamily {
    Bernoulli,
    Daehee,
    Cauchy,
}

impl std::str::FromStr for NumberFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bernoulli" => Ok(NumberFamily::Bernoulli),
            "daehee" => Ok(NumberFamily::Daehee),
            "cauchy" => Ok(NumberFamily::Cauchy),
            other => Err(Error::Parse(format!("unknown number family {other:?}"))),
        }
    }
}

/// Series whose EGF coefficients are the degenerate Bernoulli polynomials
/// `beta_{n,lambda}^{(gamma)}(x)`, or the Daehee / Cauchy numbers of order
/// `gamma` (`x` only affects Bernoulli).
pub fn order_numbers(
    lambda: &Rational,
    gamma: &Rational,
    x: &Rational,
    family: NumberFamily,
    order: usize,
) -> Result<Series> {
    let one = Rational::one();
    match family {
        NumberFamily::Bernoulli => {
            let ratio = deg_exp(lambda, &one, order + 1)
                .add_constant(&-one.clone())
                .shift_down(1)?;
            let core = ratio.recip()?.pow(gamma)?;
            if x.is_zero() {
                Ok(core)
            } else {
                core.mul(&deg_exp(lambda, x, order))
            }
        }
        NumberFamily::Daehee => deg_log(lambda, order + 1).shift_down(1)?.pow(gamma),
        NumberFamily::Cauchy => deg_log(lambda, order + 1)
            .shift_down(1)?
            .recip()?
            .pow(gamma),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxKind {
    /// Bernoulli-Pade numbers `A_{2,n}`: `(t^2/2) / (e^t - 1 - t)`.
    BernoulliPadeA2,
    /// Degenerate Frobenius-Euler numbers `h_{n,lambda}^{(r)}(u)`:
    /// `((1 - u) / (e_lambda(t) - u))^r`, `u != 1`.
    FrobeniusEuler {
        lambda: Rational,
        r: i64,
        u: Rational,
    },
}

pub fn aux_numbers(kind: &AuxKind, order: usize) -> Result<Series> {
    match kind {
        AuxKind::BernoulliPadeA2 => {
            let e = Series::var(order + 2).exp()?;
            let denom = e
                .sub(&Series::one(order + 2))?
                .sub(&Series::var(order + 2))?;
            denom.shift_down(2)?.scale(&int(2)).recip()
        }
        AuxKind::FrobeniusEuler { lambda, r, u } => {
            if u.is_one() {
                return Err(Error::InvalidParameter(
                    "Frobenius-Euler numbers need u != 1".into(),
                ));
            }
            let denom = deg_exp(lambda, &Rational::one(), order).add_constant(&-u);
            Series::constant(Rational::one() - u, order)
                .div(&denom)?
                .powi(*r)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyKind {
    /// `LB_n(x) = sum_k L(n,k) x^k`.
    LahBell { x: Rational },
    /// `H_{n,lambda}(x) = sum_k H_lambda(n,k) x^k`.
    HeteroBell { lambda: Rational, x: Rational },
}

/// Evaluates a finite-sum polynomial family at a rational point.
pub fn poly_family(kind: &PolyKind, n: usize) -> Result<Rational> {
    let (tri, x) = match kind {
        PolyKind::LahBell { x } => (triangle(Family::Lah, &Rational::zero(), n)?, x),
        PolyKind::HeteroBell { lambda, x } => (triangle(Family::HeteroS2, lambda, n)?, x),
    };
    let mut acc = Rational::zero();
    let mut xp = Rational::one();
    for k in 0..=n {
        acc += tri.get(n, k) * &xp;
        xp *= x;
    }
    Ok(acc)
}
