//! Literal evaluation of the per-distribution closed forms for the
//! probabilistic Stirling numbers and logarithms. These are written out term
//! by term from classical tables (built by recurrence), never through the
//! series engine, so they serve as an independent check of it.
//!
//! Most forms are finite sums and come back exact. A few are printed as
//! sums over an unbounded auxiliary index; those are cut at a caller-chosen
//! depth and returned together with a convergence flag.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::numeric;
use super::RandomVariable;
use crate::error::{Error, Result};
use crate::rational::{binom, factorial_q, falling, int, powi, rat, sign, Rational};
use crate::recurrence::{at, at_q, deg_stirling1, deg_stirling2, lah, stirling1, stirling2};
use crate::series::Series;
use crate::special::{aux_numbers, deg_factorial, deg_log, deg_log_of, AuxKind, FactorialKind};

/// Default depth for sums over an unbounded index.
pub const DEFAULT_DEPTH: usize = 200;
/// Smallest accepted depth.
pub const MIN_DEPTH: usize = 8;

/// Relative tolerance `10^-9` for truncated sums.
pub fn tolerance() -> Rational {
    rat(1, 1_000_000_000)
}

/// `|a - e| <= tol |e|`, or `|a| <= tol` when `e = 0`.
pub fn within_tolerance(approx: &Rational, exact: &Rational) -> bool {
    let tol = tolerance();
    if exact.is_zero() {
        return approx.abs() <= tol;
    }
    (approx - exact).abs() <= tol * exact.abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedFamily {
    S2,
    S1,
    /// First kind through the binomial expansion of
    /// `log_lambda(A B) = A^lambda log_lambda(B) + log_lambda(A)`
    /// (negative binomial only; exact when `A^lambda` is rational).
    S1Derived,
    Log,
}

impl fmt::Display for ClosedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosedFamily::S2 => "s2",
            ClosedFamily::S1 => "s1",
            ClosedFamily::S1Derived => "s1-derived",
            ClosedFamily::Log => "log",
        })
    }
}

impl FromStr for ClosedFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s2" => Ok(ClosedFamily::S2),
            "s1" => Ok(ClosedFamily::S1),
            "s1-derived" => Ok(ClosedFamily::S1Derived),
            "log" => Ok(ClosedFamily::Log),
            other => Err(Error::Parse(format!(
                "unknown closed-form family {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedValue {
    Exact(Rational),
    /// Partial sum up to `depth`; `stable` when it agrees with the partial
    /// sum at `3/4` of the depth within [`tolerance`].
    Truncated {
        value: Rational,
        depth: usize,
        stable: bool,
    },
}

impl ClosedValue {
    pub fn value(&self) -> &Rational {
        match self {
            ClosedValue::Exact(v) | ClosedValue::Truncated { value: v, .. } => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ClosedValue::Exact(_))
    }
}

/// Sums `prefix + terms[0..]`, reporting stability between the full sum and
/// the sum over the first three quarters of the terms.
fn settle(terms: &[Rational], depth: usize) -> ClosedValue {
    let cut = terms.len() - terms.len() / 4;
    let early: Rational = terms[..cut].iter().sum();
    let late: Rational = terms[cut..].iter().sum();
    let value = &early + &late;
    let stable = within_tolerance(&early, &value);
    ClosedValue::Truncated {
        value,
        depth,
        stable,
    }
}

fn check_depth(depth: usize, n: usize) -> Result<()> {
    if depth < MIN_DEPTH.max(n + 1) {
        return Err(Error::Precondition(format!(
            "truncation depth {depth} is too small (need at least {})",
            MIN_DEPTH.max(n + 1)
        )));
    }
    Ok(())
}

fn unsupported(rv: &RandomVariable, family: ClosedFamily) -> Error {
    Error::Unsupported(format!("no closed form for {family} of {}", rv.name()))
}

/// One closed-form entry. For `Log`, `k` is ignored and the `n`-th EGF
/// coefficient of `log_lambda^Y(1 + t)` is returned.
pub fn closed_form(
    rv: &RandomVariable,
    lambda: &Rational,
    family: ClosedFamily,
    n: usize,
    k: usize,
    depth: usize,
) -> Result<ClosedValue> {
    if family == ClosedFamily::Log {
        return Ok(closed_form_log(rv, lambda, n, depth)?.swap_remove(n));
    }
    if k > n {
        return Ok(ClosedValue::Exact(Rational::zero()));
    }
    let mut table = closed_form_table(rv, lambda, family, n, depth)?;
    Ok(table.swap_remove(n).swap_remove(k))
}

/// All entries `0 <= k <= n <= nmax` of a closed-form triangle, sharing the
/// classical tables between entries.
pub fn closed_form_table(
    rv: &RandomVariable,
    lambda: &Rational,
    family: ClosedFamily,
    nmax: usize,
    depth: usize,
) -> Result<Vec<Vec<ClosedValue>>> {
    rv.validate()?;
    let exact = |f: &dyn Fn(usize, usize) -> Rational| -> Vec<Vec<ClosedValue>> {
        (0..=nmax)
            .map(|n| (0..=n).map(|k| ClosedValue::Exact(f(n, k))).collect())
            .collect()
    };
    let width = nmax + 1;
    let s1 = stirling1(nmax, nmax);
    let s2 = stirling2(nmax, nmax);
    let s1l = deg_stirling1(lambda, nmax, nmax);
    let s2l = deg_stirling2(lambda, nmax, nmax);
    use ClosedFamily::{S1, S2};
    use RandomVariable as R;
    if family != ClosedFamily::S1Derived && matches!(rv, R::Custom { .. } | R::PointMass { .. }) {
        return Err(unsupported(rv, family));
    }
    if family == S1 && rv.mean().is_zero() {
        return Err(Error::ZeroMean);
    }
    let table = match (rv, family) {
        (R::Bernoulli { p }, S2) => exact(&|n, k| powi(p, k as i64) * &s2l[n][k]),
        (R::Bernoulli { p }, S1) => exact(&|n, k| powi(p, -(n as i64)) * &s1l[n][k]),
        (R::Binomial { m, p }, S2) => {
            let m = int(*m as i64);
            exact(&|n, k| {
                let mut acc = Rational::zero();
                for j in k..=n {
                    for i in j..=n {
                        acc += powi(&m, j as i64)
                            * powi(p, i as i64)
                            * at_q(&s2, j, k)
                            * at_q(&s1, i, j)
                            * &s2l[n][i];
                    }
                }
                acc
            })
        }
        (R::Binomial { m, p }, S1) => {
            let m = int(*m as i64);
            exact(&|n, k| {
                let mut acc = Rational::zero();
                for j in k..=n {
                    for i in j..=n {
                        acc += powi(p, -(j as i64))
                            * powi(&m, -(i as i64))
                            * at_q(&s2, i, j)
                            * at_q(&s1, n, i)
                            * &s1l[j][k];
                    }
                }
                acc
            })
        }
        (R::Poisson { alpha }, S2) => exact(&|n, k| {
            (k..=n)
                .map(|j| powi(alpha, j as i64) * at_q(&s2, j, k) * &s2l[n][j])
                .sum()
        }),
        (R::Poisson { alpha }, S1) => exact(&|n, k| {
            (k..=n)
                .map(|j| powi(alpha, -(j as i64)) * &s1l[j][k] * at_q(&s1, n, j))
                .sum()
        }),
        (R::Exponential { alpha }, S2) => exact(&|n, k| {
            (k..=n)
                .map(|j| {
                    binom(j as i64, k as i64)
                        * falling(&int(j as i64 - 1), j - k)
                        * powi(alpha, -(j as i64))
                        * powi(lambda, (n - j) as i64)
                        * at_q(&s1, n, j)
                })
                .sum()
        }),
        (R::Exponential { alpha }, S1) => {
            let l = lah(nmax, nmax);
            exact(&|n, k| {
                (k..=n)
                    .map(|j| {
                        sign(n - j)
                            * at_q(&l, n, j)
                            * powi(alpha, j as i64)
                            * powi(lambda, (j - k) as i64)
                            * at_q(&s2, j, k)
                    })
                    .sum()
            })
        }
        (R::Gamma { alpha, beta }, S2) => exact(&|n, k| {
            let mut acc = Rational::zero();
            for l in 0..=n {
                let outer =
                    powi(beta, -(l as i64)) * powi(lambda, (n - l) as i64) * at_q(&s1, n, l);
                if outer.is_zero() {
                    continue;
                }
                for j in 0..=k {
                    acc += sign(k - j)
                        * binom(k as i64, j as i64)
                        * falling(&(alpha * int(j as i64) + int(l as i64 - 1)), l)
                        * &outer;
                }
            }
            acc / factorial_q(k)
        }),
        (R::Gamma { alpha, beta }, S1) => gamma_s1(alpha, beta, lambda, nmax, depth)?,
        (R::Geometric { p }, S2) => {
            let u = (Rational::one() - p).recip();
            let h: Vec<Series> = (0..width)
                .map(|j| {
                    aux_numbers(
                        &AuxKind::FrobeniusEuler {
                            lambda: lambda.clone(),
                            r: j as i64,
                            u: u.clone(),
                        },
                        nmax,
                    )
                })
                .collect::<Result<_>>()?;
            let c = (p - Rational::one()).recip();
            exact(&|n, k| {
                let sum: Rational = (0..=k)
                    .map(|j| {
                        binom(k as i64, j as i64) * sign(j) * h[j].coeff_egf(n).expect("in range")
                    })
                    .sum();
                powi(&c, k as i64) * sum / factorial_q(k)
            })
        }
        (R::Geometric { p }, S1) => {
            let l = lah(nmax, nmax);
            let pm1 = p - Rational::one();
            exact(&|n, k| {
                (k..=n)
                    .map(|j| {
                        at_q(&l, n, j) * powi(p, j as i64) * powi(&pm1, (n - j) as i64) * &s1l[j][k]
                    })
                    .sum()
            })
        }
        (R::Normal { mu, sigma2 }, S2) => {
            let half = sigma2 / int(2);
            exact(&|n, k| {
                let mut acc = Rational::zero();
                for m in k..=n {
                    for j in k..=m {
                        let c = binom(j as i64, (m - j) as i64);
                        if c.is_zero() {
                            continue;
                        }
                        acc += factorial_q(m) / factorial_q(j)
                            * c
                            * powi(mu, 2 * j as i64 - m as i64)
                            * powi(&half, (m - j) as i64)
                            * powi(lambda, (n - m) as i64)
                            * at_q(&s2, j, k)
                            * at_q(&s1, n, m);
                    }
                }
                acc
            })
        }
        (R::Normal { mu, sigma2 }, S1) => normal_s1(mu, sigma2, lambda, nmax, depth)?,
        (R::NegBinomial { r, p }, S2) => negbin_s2(*r, p, lambda, nmax, depth)?,
        (R::NegBinomial { r, p }, S1) => negbin_s1(*r, p, lambda, nmax, depth)?,
        (R::NegBinomial { r, p }, ClosedFamily::S1Derived) => {
            negbin_s1_derived(*r, p, lambda, nmax)?
        }
        (R::Uniform01, S2) => {
            let s1w = stirling1(2 * nmax, 2 * nmax);
            let s2w = stirling2(2 * nmax, 2 * nmax);
            exact(&|n, k| {
                let mut acc = Rational::zero();
                for m in 0..=n {
                    for j in 0..=k {
                        acc += binom(k as i64, j as i64) / binom((m + j) as i64, j as i64)
                            * sign(k - j)
                            * powi(lambda, (n - m) as i64)
                            * at_q(&s2w, m + j, j)
                            * at_q(&s1w, n, m);
                    }
                }
                acc / factorial_q(k)
            })
        }
        (R::Uniform01, S1) => {
            let pade = uniform_pade_powers(nmax)?;
            exact(&|n, k| uniform_s1(&pade, lambda, n, k))
        }
        _ => return Err(unsupported(rv, family)),
    };
    Ok(table)
}

/// Gamma, first kind: sum over `l >= k` of
/// `sum_j (-1)^j C(l,j) (-j/alpha)_n / l! * beta^l lambda^{l-k} S2(l,k)`.
fn gamma_s1(
    alpha: &Rational,
    beta: &Rational,
    lambda: &Rational,
    nmax: usize,
    depth: usize,
) -> Result<Vec<Vec<ClosedValue>>> {
    check_depth(depth, nmax)?;
    let s2 = stirling2(depth, nmax);
    // diff[l][n] = sum_j (-1)^j C(l,j) (-j/alpha)_n / l!; an l-th difference
    // of a degree-n polynomial in j vanishes for l > n, so only l <= nmax matter.
    let top = depth.min(nmax);
    let fall: Vec<Vec<Rational>> = (0..=top)
        .map(|j| {
            let x = -int(j as i64) / alpha;
            (0..=nmax).map(|n| falling(&x, n)).collect()
        })
        .collect();
    let diff: Vec<Vec<Rational>> = (0..=top)
        .map(|l| {
            (0..=nmax)
                .map(|n| {
                    let s: Rational = (0..=l)
                        .map(|j| sign(j) * binom(l as i64, j as i64) * &fall[j][n])
                        .sum();
                    s / factorial_q(l)
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let mut row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let terms: Vec<Rational> = (k..=depth)
                .map(|l| {
                    if l > top || diff[l][n].is_zero() {
                        return Rational::zero();
                    }
                    &diff[l][n]
                        * powi(beta, l as i64)
                        * powi(lambda, (l - k) as i64)
                        * at_q(&s2, l, k)
                })
                .collect();
            row.push(settle(&terms, depth));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `delta[j][m] = sum_l (-1)^{j+l} C(j,l) (l/2)_m`. The j-th difference of a
/// degree-m polynomial is zero for j > m, so rows past `nmax` are zero.
fn half_falling_differences(depth: usize, nmax: usize) -> Vec<Vec<Rational>> {
    let top = depth.min(nmax);
    let fall: Vec<Vec<Rational>> = (0..=top)
        .map(|l| {
            let x = rat(l as i64, 2);
            (0..=nmax).map(|m| falling(&x, m)).collect()
        })
        .collect();
    (0..=depth)
        .map(|j| {
            (0..=nmax)
                .map(|m| {
                    if j > top {
                        return Rational::zero();
                    }
                    (0..=j)
                        .map(|l| sign(j + l) * binom(j as i64, l as i64) * &fall[l][m])
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn normal_needs(mu: &Rational, lambda: &Rational) -> Result<()> {
    if mu.is_zero() {
        return Err(Error::ZeroMean);
    }
    if lambda.is_zero() {
        return Err(Error::Unsupported(
            "the normal first-kind closed form divides by lambda".into(),
        ));
    }
    Ok(())
}

/// Normal, first kind:
/// `lambda^{-k} sum_m sum_{j>=k} sum_l (-1)^{j+l} / j! (lambda mu/sigma^2)^j
///  (l/2)_m 2^m (sigma^2/mu^2)^m C(j,l) S2(j,k) S1(n,m)`.
fn normal_s1(
    mu: &Rational,
    sigma2: &Rational,
    lambda: &Rational,
    nmax: usize,
    depth: usize,
) -> Result<Vec<Vec<ClosedValue>>> {
    normal_needs(mu, lambda)?;
    check_depth(depth, nmax)?;
    let s1 = stirling1(nmax, nmax);
    let s2 = stirling2(depth, nmax);
    let delta = half_falling_differences(depth, nmax);
    let ratio = lambda * mu / sigma2;
    let scale = int(2) * sigma2 / (mu * mu);
    let mut rows = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        // inner[j] = sum_m S1(n,m) (2 sigma^2/mu^2)^m delta[j][m]
        let inner: Vec<Rational> = (0..=depth)
            .map(|j| {
                (0..=n)
                    .map(|m| at_q(&s1, n, m) * powi(&scale, m as i64) * &delta[j][m])
                    .sum()
            })
            .collect();
        let mut row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let lk = powi(lambda, -(k as i64));
            let terms: Vec<Rational> = (k..=depth)
                .map(|j| {
                    if inner[j].is_zero() {
                        return Rational::zero();
                    }
                    &lk * powi(&ratio, j as i64) / factorial_q(j) * at_q(&s2, j, k) * &inner[j]
                })
                .collect();
            row.push(settle(&terms, depth));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Normal, logarithm coefficients:
/// `lambda^{-1} sum_m sum_{j>=1} sum_{l>=1} (-1)^{j+l} / j! C(j,l)
///  (lambda mu/sigma^2)^j (l/2)_m 2^m (sigma/mu)^{2m} S1(n,m)`.
fn normal_log(
    mu: &Rational,
    sigma2: &Rational,
    lambda: &Rational,
    nmax: usize,
    depth: usize,
) -> Result<Vec<ClosedValue>> {
    normal_needs(mu, lambda)?;
    check_depth(depth, nmax)?;
    let s1 = stirling1(nmax, nmax);
    // l starts at 1 here; the l = 0 term of (l/2)_m only matters for m = 0.
    let delta = half_falling_differences(depth, nmax);
    let ratio = lambda * mu / sigma2;
    let scale = int(2) * sigma2 / (mu * mu);
    let mut out = vec![ClosedValue::Exact(Rational::zero())];
    for n in 1..=nmax {
        let terms: Vec<Rational> = (1..=depth)
            .map(|j| {
                let inner: Rational = (0..=n)
                    .map(|m| {
                        // drop l = 0: its contribution is (-1)^j (0/2)_m = (-1)^j [m = 0]
                        let d = if m == 0 {
                            &delta[j][0] - sign(j)
                        } else {
                            delta[j][m].clone()
                        };
                        at_q(&s1, n, m) * powi(&scale, m as i64) * d
                    })
                    .sum();
                if inner.is_zero() {
                    return Rational::zero();
                }
                powi(&ratio, j as i64) / factorial_q(j) * inner / lambda
            })
            .collect();
        out.push(settle(&terms, depth));
    }
    Ok(out)
}

/// `c[j][l] = sum_m S1(j,m) (-r)^m S2(m,l)` for `l <= kmax`.
fn negbin_mixed(r: u32, depth: usize, kmax: usize) -> Vec<Vec<Rational>> {
    let s1 = stirling1(depth, depth);
    let s2 = stirling2(depth, kmax);
    let neg_r = num_bigint::BigInt::from(-(r as i64));
    (0..=depth)
        .map(|j| {
            (0..=kmax)
                .map(|l| {
                    let mut acc = num_bigint::BigInt::zero();
                    let mut pow = num_bigint::BigInt::one();
                    for m in 0..=j {
                        let b = at(&s2, m, l);
                        if !b.is_zero() {
                            acc += at(&s1, j, m) * &pow * b;
                        }
                        pow *= &neg_r;
                    }
                    Rational::from_integer(acc)
                })
                .collect()
        })
        .collect()
}

/// Negative binomial, second kind:
/// `sum_{j>=0} sum_m sum_{l<=m} (p-1)^j (p^r-1)^{k-l} p^{rl} (-r)^m
///  (j)_{n,lambda} / (j! (k-l)!) S1(j,m) S2(m,l)`.
fn negbin_s2(
    r: u32,
    p: &Rational,
    lambda: &Rational,
    nmax: usize,
    depth: usize,
) -> Result<Vec<Vec<ClosedValue>>> {
    check_depth(depth, nmax)?;
    let mixed = negbin_mixed(r, depth, nmax);
    let pr = powi(p, r as i64);
    let prm1 = &pr - Rational::one();
    let pm1 = p - Rational::one();
    let mut rows = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let weight: Vec<Rational> = (0..=depth)
            .map(|j| {
                powi(&pm1, j as i64)
                    * deg_factorial(&int(j as i64), n, lambda, FactorialKind::Falling)
                    / factorial_q(j)
            })
            .collect();
        let mut row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let coef: Vec<Rational> = (0..=k)
                .map(|l| powi(&prm1, (k - l) as i64) * powi(&pr, l as i64) / factorial_q(k - l))
                .collect();
            let terms: Vec<Rational> = (0..=depth)
                .map(|j| {
                    let s: Rational = (0..=k.min(j)).map(|l| &coef[l] * &mixed[j][l]).sum();
                    &weight[j] * s
                })
                .collect();
            row.push(settle(&terms, depth));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Negative binomial, first kind:
/// `sum_{l<=k} sum_{m>=l} (-p)^m/(k-l)! (-m/r)_n/m! A^{lambda l}
///  (log_lambda A)^{k-l} S1_lambda(m,l)` with `A = 1/(1-p)`. `A^lambda` and
/// `log_lambda A` are irrational in general and enter as
/// [`numeric::DIGITS`]-digit approximations.
fn negbin_s1(
    r: u32,
    p: &Rational,
    lambda: &Rational,
    nmax: usize,
    depth: usize,
) -> Result<Vec<Vec<ClosedValue>>> {
    check_depth(depth, nmax)?;
    let a = (Rational::one() - p).recip();
    let (a_pow, a_log) = match numeric::exact_pow(&a, lambda) {
        Some(v) if !lambda.is_zero() => {
            let log = (&v - Rational::one()) / lambda;
            (v, log)
        }
        _ => (
            numeric::pow(&a, lambda, numeric::DIGITS)?,
            numeric::log_lambda(&a, lambda, numeric::DIGITS)?,
        ),
    };
    let approximate = numeric::exact_pow(&a, lambda).is_none() || lambda.is_zero();
    let s1l = deg_stirling1(lambda, depth, nmax);
    let neg_p = -p.clone();
    let r_q = int(r as i64);
    let mut rows = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        // base[m] = (-p)^m (-m/r)_n / m!
        let base: Vec<Rational> = (0..=depth)
            .map(|m| powi(&neg_p, m as i64) * falling(&(-int(m as i64) / &r_q), n) / factorial_q(m))
            .collect();
        let mut row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let coef: Vec<Rational> = (0..=k)
                .map(|l| powi(&a_pow, l as i64) * powi(&a_log, (k - l) as i64) / factorial_q(k - l))
                .collect();
            let terms: Vec<Rational> = (0..=depth)
                .map(|m| {
                    let s: Rational = (0..=k.min(m)).map(|l| &coef[l] * &s1l[m][l]).sum();
                    &base[m] * s
                })
                .collect();
            let mut v = settle(&terms, depth);
            if approximate {
                if let ClosedValue::Truncated { value, .. } = &mut v {
                    *value = numeric::round_to(value, numeric::DIGITS);
                }
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Negative binomial, first kind, as
/// `(1/k!) sum_l C(k,l) (log_lambda A)^{k-l} A^{lambda l} log_lambda(B(t))^l`
/// with `B(t) = 1 - p (1+t)^{-1/r}`, evaluated as exact series. Only
/// available when `A^lambda` is rational and `lambda != 0`.
fn negbin_s1_derived(
    r: u32,
    p: &Rational,
    lambda: &Rational,
    nmax: usize,
) -> Result<Vec<Vec<ClosedValue>>> {
    let a = (Rational::one() - p).recip();
    let a_pow = match numeric::exact_pow(&a, lambda) {
        Some(v) if !lambda.is_zero() => v,
        _ => {
            return Err(Error::Unsupported(format!(
                "(1/(1-p))^lambda is irrational for p = {p}, lambda = {lambda}"
            )))
        }
    };
    let a_log = (&a_pow - Rational::one()) / lambda;
    // B^lambda = (A B)^lambda / A^lambda, and A B has constant term 1.
    let order = nmax;
    let w = Series::var(order)
        .add_constant(&Rational::one())
        .pow(&-int(r as i64).recip())?
        .scale(&-p.clone())
        .add_constant(&Rational::one())
        .scale(&a);
    let log_b = w
        .pow(lambda)?
        .scale(&a_pow.recip())
        .add_constant(&-Rational::one())
        .scale(&lambda.recip());
    let mut rows = Vec::with_capacity(nmax + 1);
    let mut powers = vec![Series::one(order)];
    for l in 1..=nmax {
        powers.push(powers[l - 1].mul(&log_b)?);
    }
    for n in 0..=nmax {
        let mut row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = Rational::zero();
            for (l, pw) in powers.iter().enumerate().take(k + 1) {
                acc += binom(k as i64, l as i64)
                    * powi(&a_log, (k - l) as i64)
                    * powi(&a_pow, l as i64)
                    * pw.coeff_egf(n)?;
            }
            row.push(ClosedValue::Exact(acc / factorial_q(k)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `pade[q][m] = sum over j_1+..+j_q = m of multinomial(m; j) prod A_{2,j_i}`.
fn uniform_pade_powers(nmax: usize) -> Result<Vec<Vec<Rational>>> {
    let a2 = aux_numbers(&AuxKind::BernoulliPadeA2, nmax)?.egf_coeffs();
    let mut out = vec![{
        let mut v = vec![Rational::zero(); nmax + 1];
        v[0] = Rational::one();
        v
    }];
    for q in 1..=nmax {
        let prev = &out[q - 1];
        let next: Vec<Rational> = (0..=nmax)
            .map(|m| {
                (0..=m)
                    .map(|j| binom(m as i64, j as i64) * &a2[j] * &prev[m - j])
                    .sum()
            })
            .collect();
        out.push(next);
    }
    Ok(out)
}

/// `sum over l_1+..+l_k = s of multinomial(s; l) lambda^s / prod (l_i + 1)`.
fn uniform_lambda_power(lambda: &Rational, k: usize, s: usize) -> Rational {
    let e: Vec<Rational> = (0..=s)
        .map(|l| powi(lambda, l as i64) / int(l as i64 + 1))
        .collect();
    let mut cur = vec![Rational::zero(); s + 1];
    cur[0] = Rational::one();
    for _ in 0..k {
        cur = (0..=s)
            .map(|m| {
                (0..=m)
                    .map(|j| binom(m as i64, j as i64) * &e[j] * &cur[m - j])
                    .sum()
            })
            .collect();
    }
    cur.swap_remove(s)
}

/// Uniform first kind:
/// `(2^n/n) C(n,k) sum_m (n-m) C(n-k,m) P_n(m) Q_k(n-k-m)`.
fn uniform_s1(pade: &[Vec<Rational>], lambda: &Rational, n: usize, k: usize) -> Rational {
    if n == 0 {
        return if k == 0 {
            Rational::one()
        } else {
            Rational::zero()
        };
    }
    let mut acc = Rational::zero();
    for m in 0..=(n - k) {
        acc += int((n - m) as i64)
            * binom((n - k) as i64, m as i64)
            * &pade[n][m]
            * uniform_lambda_power(lambda, k, n - k - m);
    }
    powi(&int(2), n as i64) / int(n as i64) * binom(n as i64, k as i64) * acc
}

/// The classical (`lambda = 0`) uniform first kind:
/// `k (2^n/n) C(n,k) P_n(n-k)`.
pub fn uniform_s1_classical(n: usize, k: usize) -> Result<Rational> {
    if n == 0 {
        return Ok(if k == 0 {
            Rational::one()
        } else {
            Rational::zero()
        });
    }
    if k > n {
        return Ok(Rational::zero());
    }
    let pade = uniform_pade_powers(n)?;
    Ok(int(k as i64) * powi(&int(2), n as i64) / int(n as i64)
        * binom(n as i64, k as i64)
        * &pade[n][n - k])
}

/// Coefficients `0..=nmax` of the closed-form `log_lambda^Y(1 + t)`.
pub fn closed_form_log(
    rv: &RandomVariable,
    lambda: &Rational,
    nmax: usize,
    depth: usize,
) -> Result<Vec<ClosedValue>> {
    rv.validate()?;
    match rv {
        RandomVariable::Normal { mu, sigma2 } => normal_log(mu, sigma2, lambda, nmax, depth),
        RandomVariable::Uniform01 => {
            let pade = uniform_pade_powers(nmax)?;
            let mut out = vec![ClosedValue::Exact(Rational::zero())];
            for n in 1..=nmax {
                let s: Rational = (0..n)
                    .map(|m| {
                        binom(n as i64 - 1, m as i64)
                            * &pade[n][m]
                            * powi(lambda, (n - m - 1) as i64)
                    })
                    .sum();
                out.push(ClosedValue::Exact(powi(&int(2), n as i64) * s));
            }
            Ok(out)
        }
        _ => Ok(closed_form_log_series(rv, lambda, nmax)?
            .egf_coeffs()
            .into_iter()
            .map(ClosedValue::Exact)
            .collect()),
    }
}

/// The closed-form `log_lambda^Y(1 + t)` as an exact series, for the
/// distributions where it is a finite pipeline of series operations.
pub fn closed_form_log_series(
    rv: &RandomVariable,
    lambda: &Rational,
    order: usize,
) -> Result<Series> {
    rv.validate()?;
    let one = Rational::one();
    let t = Series::var(order);
    let one_plus_t = t.add_constant(&one);
    let series = match rv {
        RandomVariable::Bernoulli { p } => deg_log(lambda, order).scale_var(&p.recip()),
        RandomVariable::Binomial { m, p } => {
            let inner = one_plus_t
                .pow(&int(*m as i64).recip())?
                .add_constant(&-one.clone())
                .scale(&p.recip());
            deg_log(lambda, order).compose(&inner)?
        }
        RandomVariable::Poisson { alpha } => {
            deg_log(lambda, order).compose(&t.log1p()?.scale(&alpha.recip()))?
        }
        RandomVariable::Exponential { alpha } => {
            let arg = t.div(&one_plus_t)?.scale(alpha);
            deg_log_of(&arg.exp()?, lambda)?
        }
        RandomVariable::Gamma { alpha, beta } => {
            let arg = Series::one(order)
                .sub(&one_plus_t.pow(&-alpha.recip())?)?
                .scale(beta);
            deg_log_of(&arg.exp()?, lambda)?
        }
        RandomVariable::Geometric { p } => {
            let den = t.scale(&(&one - p)).add_constant(&one);
            deg_log_of(&one_plus_t.div(&den)?, lambda)?
        }
        RandomVariable::NegBinomial { r, p } => {
            let w = one_plus_t
                .pow(&-int(*r as i64).recip())?
                .scale(&-p.clone())
                .add_constant(&one)
                .scale(&(&one - p).recip());
            deg_log_of(&w, lambda)?
        }
        RandomVariable::Uniform01 => {
            let coeffs: Vec<Rational> = closed_form_log(rv, lambda, order, MIN_DEPTH)?
                .into_iter()
                .map(|v| v.value().clone())
                .collect();
            Series::from_egf(&coeffs)
        }
        _ => return Err(unsupported(rv, ClosedFamily::Log)),
    };
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probabilistic::{prob_log, prob_triangle};
    use crate::triangle::Family;

    fn engine(
        rv: &RandomVariable,
        lambda: &Rational,
        family: ClosedFamily,
        nmax: usize,
    ) -> Vec<Vec<Rational>> {
        let fam = match family {
            ClosedFamily::S2 => Family::ProbS2,
            _ => Family::ProbS1,
        };
        prob_triangle(rv, lambda, fam, nmax)
            .unwrap()
            .rows()
            .to_vec()
    }

    fn assert_exact_match(
        rv: &RandomVariable,
        lambda: &Rational,
        family: ClosedFamily,
        nmax: usize,
    ) {
        let table = closed_form_table(rv, lambda, family, nmax, DEFAULT_DEPTH).unwrap();
        let eng = engine(rv, lambda, family, nmax);
        for n in 0..=nmax {
            for k in 0..=n {
                let v = &table[n][k];
                assert!(v.is_exact(), "{rv} {family} ({n},{k})");
                assert_eq!(
                    v.value(),
                    &eng[n][k],
                    "{rv} {family} ({n},{k}) lambda={lambda}"
                );
            }
        }
    }

    #[test]
    fn finite_forms_match_engine() {
        let lambdas = [Rational::zero(), rat(1, 2), rat(-1, 3)];
        for rv in RandomVariable::builtin() {
            for lambda in &lambdas {
                let s2_exact = !matches!(rv, RandomVariable::NegBinomial { .. });
                if s2_exact {
                    assert_exact_match(&rv, lambda, ClosedFamily::S2, 6);
                }
                let s1_exact = matches!(
                    rv,
                    RandomVariable::Bernoulli { .. }
                        | RandomVariable::Binomial { .. }
                        | RandomVariable::Poisson { .. }
                        | RandomVariable::Exponential { .. }
                        | RandomVariable::Geometric { .. }
                        | RandomVariable::Uniform01
                );
                if s1_exact {
                    assert_exact_match(&rv, lambda, ClosedFamily::S1, 6);
                }
            }
        }
    }

    #[test]
    fn exponential_second_kind_example() {
        // S2^Y(2,1) for Exp(alpha), lambda: sum_j C(j,1)(j-1)_{j-1} alpha^-j lambda^{2-j} S1(2,j)
        let rv = RandomVariable::Exponential { alpha: int(3) };
        let lambda = rat(1, 2);
        let v = closed_form(&rv, &lambda, ClosedFamily::S2, 2, 1, DEFAULT_DEPTH).unwrap();
        // j=1: 1*1*(1/3)*(1/2)*(-1) = -1/6 ; j=2: 2*1*(1/9)*1*1 = 2/9
        assert_eq!(v, ClosedValue::Exact(rat(-1, 6) + rat(2, 9)));
    }

    #[test]
    fn truncated_forms_converge() {
        let gamma = RandomVariable::Gamma {
            alpha: rat(3, 2),
            beta: int(2),
        };
        let normal = RandomVariable::Normal {
            mu: int(1),
            sigma2: int(2),
        };
        let lambda = rat(1, 2);
        for rv in [&gamma, &normal] {
            let table = closed_form_table(rv, &lambda, ClosedFamily::S1, 5, 60).unwrap();
            let eng = engine(rv, &lambda, ClosedFamily::S1, 5);
            for n in 0..=5 {
                for k in 0..=n {
                    match &table[n][k] {
                        ClosedValue::Truncated { value, stable, .. } => {
                            assert!(*stable);
                            assert!(within_tolerance(value, &eng[n][k]), "{rv} ({n},{k})");
                        }
                        other => panic!("expected truncated, got {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn normal_log_coefficients() {
        let rv = RandomVariable::Normal {
            mu: int(1),
            sigma2: int(2),
        };
        let lambda = rat(-1, 3);
        let coeffs = closed_form_log(&rv, &lambda, 6, 60).unwrap();
        let eng = prob_log(&rv, &lambda, 6).unwrap().egf_coeffs();
        for n in 0..=6 {
            assert!(within_tolerance(coeffs[n].value(), &eng[n]), "n={n}");
        }
        assert!(closed_form_log(&rv, &Rational::zero(), 3, 60).is_err());
    }

    #[test]
    fn negative_binomial_forms() {
        let rv = RandomVariable::NegBinomial { r: 2, p: rat(1, 2) };
        let lambda = rat(1, 2);
        for family in [ClosedFamily::S2, ClosedFamily::S1] {
            let table = closed_form_table(&rv, &lambda, family, 4, DEFAULT_DEPTH).unwrap();
            let eng = engine(&rv, &lambda, family, 4);
            for n in 0..=4 {
                for k in 0..=n {
                    assert!(
                        within_tolerance(table[n][k].value(), &eng[n][k]),
                        "{family} ({n},{k})"
                    );
                }
            }
        }
        // A = 1/(1-p) = 64 makes A^(1/2) and A^(-1/3) rational.
        let rv = RandomVariable::NegBinomial {
            r: 2,
            p: rat(63, 64),
        };
        for lambda in [rat(1, 2), rat(-1, 3), int(1)] {
            assert_exact_match(&rv, &lambda, ClosedFamily::S1Derived, 5);
        }
        assert!(closed_form(&rv, &rat(1, 5), ClosedFamily::S1Derived, 2, 1, 20).is_err());
    }

    #[test]
    fn log_series_match_engine() {
        for rv in RandomVariable::builtin() {
            if matches!(rv, RandomVariable::Normal { .. }) {
                continue;
            }
            for lambda in [Rational::zero(), rat(1, 2), rat(-1, 3)] {
                assert_eq!(
                    closed_form_log_series(&rv, &lambda, 7).unwrap(),
                    prob_log(&rv, &lambda, 7).unwrap(),
                    "{rv} lambda={lambda}"
                );
            }
        }
    }

    #[test]
    fn uniform_classical_first_kind() {
        let rv = RandomVariable::Uniform01;
        let eng = engine(&rv, &Rational::zero(), ClosedFamily::S1, 7);
        for n in 0..=7 {
            for k in 0..=n {
                assert_eq!(uniform_s1_classical(n, k).unwrap(), eng[n][k]);
            }
        }
    }

    #[test]
    fn errors() {
        let pm = RandomVariable::PointMass { c: int(1) };
        assert!(matches!(
            closed_form(&pm, &Rational::zero(), ClosedFamily::S2, 2, 1, 20),
            Err(Error::Unsupported(_))
        ));
        let gamma = RandomVariable::Gamma {
            alpha: int(1),
            beta: int(1),
        };
        assert!(matches!(
            closed_form(&gamma, &Rational::zero(), ClosedFamily::S1, 5, 1, 3),
            Err(Error::Precondition(_))
        ));
    }
}
