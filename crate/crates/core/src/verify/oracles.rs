//! Independent reference computations: raw moments from each
//! distribution's textbook formula, partial Bell polynomials by their row
//! recurrence, and moment transforms. None of this goes through the
//! moment generating series built by the probabilistic layer.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::probabilistic::RandomVariable;
use crate::rational::{binom, factorial_q, falling, int, powi, rat, rising, Rational};
use crate::recurrence::{at_q, stirling1, stirling2};

/// `B_{n,k}(x_1, x_2, ...)` for all `0 <= k <= n <= nmax`, from
/// `B_{n,k} = sum_{i=1}^{n-k+1} C(n-1, i-1) x_i B_{n-i,k-1}`. `x[0]` is `x_1`.
pub fn partial_bell_table(x: &[Rational], nmax: usize) -> Vec<Vec<Rational>> {
    let mut b: Vec<Vec<Rational>> = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let mut row = vec![Rational::zero(); n + 1];
        row[0] = if n == 0 {
            Rational::one()
        } else {
            Rational::zero()
        };
        for k in 1..=n {
            let mut acc = Rational::zero();
            for i in 1..=(n - k + 1) {
                let Some(xi) = x.get(i - 1) else { break };
                let prev = &b[n - i];
                if k - 1 < prev.len() && !xi.is_zero() {
                    acc += binom(n as i64 - 1, i as i64 - 1) * xi * &prev[k - 1];
                }
            }
            row[k] = acc;
        }
        b.push(row);
    }
    b
}

/// `E[Y^n]` for `0 <= n <= nmax` from the distribution's own moment formula.
pub fn raw_moments(rv: &RandomVariable, nmax: usize) -> Result<Vec<Rational>> {
    rv.validate()?;
    let s2 = stirling2(nmax, nmax);
    // sum_k S2(n,k) f(k): moments from factorial moments f(k) = E[(Y)_k]
    let from_factorial = |f: &dyn Fn(usize) -> Rational| -> Vec<Rational> {
        (0..=nmax)
            .map(|n| (0..=n).map(|k| at_q(&s2, n, k) * f(k)).sum())
            .collect()
    };
    let moments = match rv {
        RandomVariable::Bernoulli { p } => (0..=nmax)
            .map(|n| if n == 0 { Rational::one() } else { p.clone() })
            .collect(),
        RandomVariable::Binomial { m, p } => {
            from_factorial(&|k| falling(&int(*m as i64), k) * powi(p, k as i64))
        }
        RandomVariable::Poisson { alpha } => from_factorial(&|k| powi(alpha, k as i64)),
        RandomVariable::Exponential { alpha } => (0..=nmax)
            .map(|n| factorial_q(n) / powi(alpha, n as i64))
            .collect(),
        RandomVariable::Gamma { alpha, beta } => (0..=nmax)
            .map(|n| rising(alpha, n) / powi(beta, n as i64))
            .collect(),
        RandomVariable::Geometric { p } => {
            // Y = 1 + X with X the number of failures: E[(X)_k] = k! (q/p)^k.
            let ratio = (Rational::one() - p) / p;
            let x = from_factorial(&|k| factorial_q(k) * powi(&ratio, k as i64));
            (0..=nmax)
                .map(|n| (0..=n).map(|m| binom(n as i64, m as i64) * &x[m]).sum())
                .collect()
        }
        RandomVariable::Normal { mu, sigma2 } => (0..=nmax)
            .map(|n| {
                let mut acc = Rational::zero();
                let mut double_fact = Rational::one(); // (2k-1)!!
                for k in 0..=n / 2 {
                    if k > 0 {
                        double_fact *= int(2 * k as i64 - 1);
                    }
                    acc += binom(n as i64, 2 * k as i64)
                        * powi(mu, (n - 2 * k) as i64)
                        * powi(sigma2, k as i64)
                        * &double_fact;
                }
                acc
            })
            .collect(),
        RandomVariable::NegBinomial { r, p } => {
            let ratio = (Rational::one() - p) / p;
            from_factorial(&|k| rising(&int(*r as i64), k) * powi(&ratio, k as i64))
        }
        RandomVariable::Uniform01 => (0..=nmax).map(|n| rat(1, n as i64 + 1)).collect(),
        RandomVariable::PointMass { c } => (0..=nmax).map(|n| powi(c, n as i64)).collect(),
        RandomVariable::Custom { moments } => {
            if moments.len() <= nmax {
                return Err(Error::MissingMoments {
                    needed: nmax,
                    available: moments.len() - 1,
                });
            }
            moments[..=nmax].to_vec()
        }
    };
    Ok(moments)
}

/// `E[(Y)_{n,lambda}] = sum_m S1(n,m) lambda^{n-m} E[Y^m]`. Passing `-lambda`
/// gives the rising version `E[<Y>_{n,lambda}]`.
pub fn degenerate_moments(raw: &[Rational], lambda: &Rational) -> Vec<Rational> {
    let nmax = raw.len() - 1;
    let s1 = stirling1(nmax, nmax);
    (0..=nmax)
        .map(|n| {
            (0..=n)
                .map(|m| at_q(&s1, n, m) * powi(lambda, (n - m) as i64) * &raw[m])
                .sum()
        })
        .collect()
}

/// Raw moments of `S_j = Y_1 + ... + Y_j` for i.i.d. copies, by repeated
/// binomial convolution.
pub fn sum_moments(raw: &[Rational], j: usize) -> Vec<Rational> {
    let nmax = raw.len() - 1;
    let mut cur: Vec<Rational> = (0..=nmax)
        .map(|n| {
            if n == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    for _ in 0..j {
        cur = (0..=nmax)
            .map(|n| {
                (0..=n)
                    .map(|m| binom(n as i64, m as i64) * &raw[m] * &cur[n - m])
                    .sum()
            })
            .collect();
    }
    cur
}
