//! Exact identity suites over the number families, the classical limits,
//! and Monte Carlo cross-checks of the expectation identities.
//!
//! Every check compares values produced by at least two independent routes:
//! the generating-function engine, closed forms, row recurrences, textbook
//! moment formulas (see [`oracles`]) or Lagrange extraction. A failing
//! comparison is recorded in the report, never raised.

pub mod mc;
pub mod oracles;
pub mod report;

pub use mc::{mc_check, McEstimate};
pub use report::{Check, Index, Record, Status, VerificationReport};

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::probabilistic::closed_form::{
    closed_form_log, closed_form_table, uniform_s1_classical, DEFAULT_DEPTH,
};
use crate::probabilistic::{
    from_mgf, mgf_deg, moment, neg_mgf, prob_log, prob_order_numbers, prob_triangle,
    schlomilch_triangle, sj_moment, ClosedFamily, RandomVariable,
};
use crate::rational::{
    binom, binom_q, factorial_q, falling, int, powi, rat, rising, sign, Rational,
};
use crate::recurrence::{at_q, deg_stirling1, deg_stirling2, lah, stirling1, stirling2};
use crate::series::{lagrange_extract, DeltaSeries, LagrangeFormula, Series};
use crate::special::{
    deg_exp, deg_factorial, deg_log, order_numbers, poly_family, triangle, FactorialKind,
    NumberFamily, PolyKind,
};
use crate::triangle::{divided_powers, Family, Triangle};

use oracles::{degenerate_moments, partial_bell_table, raw_moments, sum_moments};

/// Seed of the random test sequences used for the inverse relations.
const SEQUENCE_SEED: u64 = 0x5eed_2024;

/// `lambda` grid used by the full verification run.
pub fn default_lambdas() -> Vec<Rational> {
    vec![int(0), int(1), rat(1, 2), rat(-1, 3), int(2)]
}

/// Integer orders used for the Bernoulli, Daehee and Cauchy identities.
pub fn default_gammas() -> Vec<i64> {
    (-3..=4).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub gammas: Vec<i64>,
    /// Truncation depth for closed forms with an unbounded sum.
    pub depth: usize,
    /// Adds `delta` to the oracle's `E[Y^m]`. Only useful as a negative
    /// control: the oracle then disagrees with the engine.
    pub perturb_moment: Option<(usize, Rational)>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            gammas: default_gammas(),
            depth: DEFAULT_DEPTH,
            perturb_moment: None,
        }
    }
}

/// `C(n-1, k-1)` with the convention that it is `1` at `n = k = 0`, so that
/// `C(n-1, k-1) a_{n-k}` describes a first-kind triangle on the whole range.
fn lead_binom(n: usize, k: usize) -> Rational {
    if k == 0 {
        return if n == 0 {
            Rational::one()
        } else {
            Rational::zero()
        };
    }
    binom(n as i64 - 1, k as i64 - 1)
}

fn kronecker(a: usize, b: usize) -> Rational {
    if a == b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

fn cloned<T>(r: &Result<T>) -> Result<&T> {
    r.as_ref().map_err(Clone::clone)
}

/// Runs `body` against a fresh [`Check`]; an error marks the record failed.
fn run(mut check: Check, body: impl FnOnce(&mut Check) -> Result<()>) -> Record {
    if let Err(e) = body(&mut check) {
        check.error(&e);
    }
    check.finish()
}

fn random_sequence(len: usize, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| rat(rng.random_range(-50..=50), rng.random_range(1..=9)))
        .collect()
}

/// Checks that `t2` and `t1` are mutually inverse lower-triangular matrices
/// (both products), and the two inverse-pair relations on a random rational
/// sequence.
pub fn check_orthogonality(t2: &Triangle, t1: &Triangle) -> Result<VerificationReport> {
    use Family::*;
    let compatible = matches!(
        (t2.family(), t1.family()),
        (S2, S1) | (DegS2, DegS1) | (HeteroS2, HeteroS1) | (ProbS2, ProbS1) | (ProbH, ProbG)
    );
    if !compatible {
        return Err(Error::Precondition(format!(
            "{} and {} are not an inverse pair",
            t2.family(),
            t1.family()
        )));
    }
    if t2.nmax() != t1.nmax() {
        return Err(Error::Precondition(format!(
            "shape mismatch: {} rows vs {} rows",
            t2.nmax() + 1,
            t1.nmax() + 1
        )));
    }
    if t2.lambda() != t1.lambda() || t2.rv() != t1.rv() {
        return Err(Error::Precondition(
            "triangles belong to different (Y, lambda)".into(),
        ));
    }
    let nmax = t2.nmax();
    let rv = t2.rv();
    let lambda = Some(t2.lambda());
    let pair = format!("{}/{}", t2.family(), t1.family());
    let new = |id: &str| Check::new(id, rv, lambda, nmax).with_detail(pair.clone());
    let mut report = VerificationReport::new("orthogonality");

    for (id, a, b) in [
        ("orthogonality", t2, t1),
        ("orthogonality-transposed", t1, t2),
    ] {
        let mut c = new(id);
        for n in 0..=nmax {
            for l in 0..=nmax {
                let sum: Rational = (0..=nmax).map(|k| a.get(n, k) * b.get(k, l)).sum();
                c.eq(Index::nk(n, l), &sum, &kronecker(n, l));
            }
        }
        report.push(c.finish());
    }

    // a_n = sum_k T2(n,k) b_k  <=>  b_n = sum_k T1(n,k) a_k
    let mut c = new("inverse-relation");
    let b = random_sequence(nmax + 1, SEQUENCE_SEED);
    let a: Vec<Rational> = (0..=nmax)
        .map(|n| (0..=n).map(|k| t2.get(n, k) * &b[k]).sum())
        .collect();
    for n in 0..=nmax {
        let back: Rational = (0..=n).map(|k| t1.get(n, k) * &a[k]).sum();
        c.eq(Index::n(n), &back, &b[n]);
    }
    report.push(c.finish());

    // a_n = sum_{k>=n} T2(k,n) b_k  <=>  b_n = sum_{k>=n} T1(k,n) a_k
    let mut c = new("inverse-relation-upper");
    let b = random_sequence(nmax + 1, SEQUENCE_SEED + 1);
    let a: Vec<Rational> = (0..=nmax)
        .map(|n| (n..=nmax).map(|k| t2.get(k, n) * &b[k]).sum())
        .collect();
    for n in 0..=nmax {
        let back: Rational = (n..=nmax).map(|k| t1.get(k, n) * &a[k]).sum();
        c.eq(Index::n(n), &back, &b[n]);
    }
    report.push(c.finish());
    Ok(report)
}

/// Everything the per-`(Y, lambda)` identities share.
struct Ctx<'a> {
    rv: &'a RandomVariable,
    lambda: &'a Rational,
    nmax: usize,
    opts: &'a SuiteOptions,
    /// Oracle `E[Y^n]`, `n <= nmax + 2`, possibly perturbed.
    raw: Result<Vec<Rational>>,
    /// Second kind and heterogeneous second kind to `2 nmax` rows.
    s2_wide: Result<Triangle>,
    h_wide: Result<Triangle>,
    s1: Result<Triangle>,
    g: Result<Triangle>,
    /// `beta_{n,lambda}^{(e,Y)}`, `n <= nmax`, by order `e`.
    bern: BTreeMap<i64, Result<Vec<Rational>>>,
}

impl<'a> Ctx<'a> {
    fn new(
        rv: &'a RandomVariable,
        lambda: &'a Rational,
        nmax: usize,
        opts: &'a SuiteOptions,
    ) -> Self {
        let raw = raw_moments(rv, nmax + 2).map(|mut m| {
            if let Some((i, delta)) = &opts.perturb_moment {
                if let Some(slot) = m.get_mut(*i) {
                    *slot += delta;
                }
            }
            m
        });
        let mut orders: BTreeSet<i64> = (1..=nmax as i64).collect();
        for &g in &opts.gammas {
            orders.insert(g);
            orders.insert(-g);
            for n in 0..=nmax as i64 {
                orders.insert(n + g);
                orders.insert(n - g);
            }
        }
        let mgf = mgf_deg(rv, lambda, nmax + 1);
        let bern = orders
            .into_iter()
            .map(|e| {
                let value = cloned(&mgf).and_then(|m| {
                    Ok(from_mgf::bernoulli(m, &int(e), &Rational::zero(), nmax)?.egf_coeffs())
                });
                (e, value)
            })
            .collect();
        Ctx {
            rv,
            lambda,
            nmax,
            opts,
            raw,
            s2_wide: prob_triangle(rv, lambda, Family::ProbS2, 2 * nmax),
            h_wide: prob_triangle(rv, lambda, Family::ProbH, 2 * nmax),
            s1: prob_triangle(rv, lambda, Family::ProbS1, nmax),
            g: prob_triangle(rv, lambda, Family::ProbG, nmax),
            bern,
        }
    }

    fn check(&self, id: &str) -> Check {
        Check::new(id, Some(self.rv), Some(self.lambda), self.nmax)
    }

    fn check_gamma(&self, id: &str, gamma: i64) -> Check {
        self.check(id).with_detail(format!("gamma={gamma}"))
    }

    fn bern(&self, e: i64) -> Result<&Vec<Rational>> {
        match self.bern.get(&e) {
            Some(v) => cloned(v),
            None => Err(Error::Precondition(format!(
                "Bernoulli order {e} not prepared"
            ))),
        }
    }

    fn raw(&self) -> Result<&Vec<Rational>> {
        cloned(&self.raw)
    }

    fn mean(&self) -> Result<Rational> {
        let m = self.raw()?[1].clone();
        if m.is_zero() {
            return Err(Error::ZeroMean);
        }
        Ok(m)
    }
}

/// Oracle moments against the engine: `E[Y^n]`, the closed-form mean, and
/// `E[(Y)_{n,lambda}]` read off `E[e_lambda^Y(t)]`.
fn moment_checks(ctx: &Ctx) -> Vec<Record> {
    let nmax = ctx.nmax;
    let moments = run(ctx.check("moments"), |c| {
        let raw = ctx.raw()?;
        c.eq(Index::n(1), &ctx.rv.mean(), &raw[1]);
        for n in 0..=nmax {
            c.eq(Index::n(n), &moment(ctx.rv, n)?, &raw[n]);
        }
        Ok(())
    });
    let degenerate = run(ctx.check("degenerate-moments"), |c| {
        let oracle = degenerate_moments(&ctx.raw()?[..=nmax], ctx.lambda);
        let engine = mgf_deg(ctx.rv, ctx.lambda, nmax)?.egf_coeffs();
        for n in 0..=nmax {
            c.eq(Index::n(n), &engine[n], &oracle[n]);
        }
        Ok(())
    });
    let sums = run(ctx.check("partial-sum-moments"), |c| {
        let raw = &ctx.raw()?[..=nmax];
        for j in 0..=3 {
            let oracle = degenerate_moments(&sum_moments(raw, j), ctx.lambda);
            for n in 0..=nmax {
                c.eq(
                    Index::nkj(n, 0, j),
                    &sj_moment(ctx.rv, ctx.lambda, j, n)?,
                    &oracle[n],
                );
            }
        }
        Ok(())
    });
    vec![moments, degenerate, sums]
}

/// `(1/k!) sum_j C(k,j) (-1)^{k-j} m_j(n)` for a family of moment sequences.
fn inclusion_exclusion(moments_of_sum: &[Vec<Rational>], n: usize, k: usize) -> Rational {
    let s: Rational = (0..=k)
        .map(|j| binom(k as i64, j as i64) * sign(k - j) * &moments_of_sum[j][n])
        .sum();
    s / factorial_q(k)
}

/// Second kind: generating function, inclusion-exclusion over partial sums,
/// partial Bell polynomial of the degenerate moments.
fn second_kind_three_way(ctx: &Ctx) -> Record {
    run(ctx.check("second-kind-three-way"), |c| {
        let nmax = ctx.nmax;
        let s2 = cloned(&ctx.s2_wide)?;
        let raw = &ctx.raw()?[..=nmax];
        let sums: Vec<Vec<Rational>> = (0..=nmax)
            .map(|j| degenerate_moments(&sum_moments(raw, j), ctx.lambda))
            .collect();
        let x = degenerate_moments(raw, ctx.lambda)[1..].to_vec();
        let bell = partial_bell_table(&x, nmax);
        for n in 0..=nmax {
            for k in 0..=n {
                let ie = inclusion_exclusion(&sums, n, k);
                c.all_eq(
                    Index::nk(n, k),
                    &[
                        ("gf", &s2.get(n, k)),
                        ("incl-excl", &ie),
                        ("bell", &bell[n][k]),
                    ],
                );
            }
        }
        Ok(())
    })
}

/// First kind: reversion, `C(n-1,k-1) beta^{(n,Y)}_{n-k}`, and the partial
/// Bell polynomial of `beta^{(m,Y)}_{m-1}`.
fn first_kind_bernoulli_bell(ctx: &Ctx) -> Record {
    run(ctx.check("first-kind-bernoulli-bell"), |c| {
        let nmax = ctx.nmax;
        let s1 = cloned(&ctx.s1)?;
        let x = (1..=nmax as i64)
            .map(|m| Ok(ctx.bern(m)?[m as usize - 1].clone()))
            .collect::<Result<Vec<_>>>()?;
        let bell = partial_bell_table(&x, nmax);
        for n in 0..=nmax {
            for k in 0..=n {
                let via_bern = if n == 0 {
                    kronecker(n, k)
                } else {
                    lead_binom(n, k) * &ctx.bern(n as i64)?[n - k]
                };
                c.all_eq(
                    Index::nk(n, k),
                    &[
                        ("reversion", &s1.get(n, k)),
                        ("bernoulli", &via_bern),
                        ("bell", &bell[n][k]),
                    ],
                );
            }
        }
        Ok(())
    })
}

/// Heterogeneous second kind by four routes, including `-Y`.
fn hetero_second_kind(ctx: &Ctx) -> Record {
    run(ctx.check("hetero-second-kind-four-way"), |c| {
        let nmax = ctx.nmax;
        let h = cloned(&ctx.h_wide)?;
        let neg = from_mgf::second_kind(&neg_mgf(ctx.rv, ctx.lambda, nmax)?, nmax)?;
        let flipped = -ctx.lambda;
        let s2_flipped = prob_triangle(ctx.rv, &flipped, Family::ProbS2, nmax)?;
        let raw = &ctx.raw()?[..=nmax];
        // E[<S_j>_{n,lambda}] = E[(S_j)_{n,-lambda}]
        let sums: Vec<Vec<Rational>> = (0..=nmax)
            .map(|j| degenerate_moments(&sum_moments(raw, j), &flipped))
            .collect();
        let x = degenerate_moments(raw, &flipped)[1..].to_vec();
        let bell = partial_bell_table(&x, nmax);
        for n in 0..=nmax {
            for k in 0..=n {
                let via_neg = sign(n) * &neg[n][k];
                let ie = inclusion_exclusion(&sums, n, k);
                c.all_eq(
                    Index::nk(n, k),
                    &[
                        ("H", &h.get(n, k)),
                        ("(-1)^n S2^{-Y}", &via_neg),
                        ("S2 at -lambda", &s2_flipped.get(n, k)),
                        ("incl-excl", &ie),
                        ("bell", &bell[n][k]),
                    ],
                );
            }
        }
        Ok(())
    })
}

/// Heterogeneous first kind by six routes through `Y` at `-lambda` and `-Y`.
fn hetero_first_kind(ctx: &Ctx) -> Record {
    run(ctx.check("hetero-first-kind-six-way"), |c| {
        let nmax = ctx.nmax;
        let g = cloned(&ctx.g)?;
        let flipped = -ctx.lambda;
        let mgf_flipped = mgf_deg(ctx.rv, &flipped, nmax + 1)?;
        let mgf_neg = neg_mgf(ctx.rv, ctx.lambda, nmax + 1)?;
        let zero = Rational::zero();
        // beta^{(e)}_m for Y at -lambda and for -Y at lambda
        let bern_flipped = |e: usize| -> Result<Vec<Rational>> {
            Ok(from_mgf::bernoulli(&mgf_flipped, &int(e as i64), &zero, nmax)?.egf_coeffs())
        };
        let bern_neg = |e: usize| -> Result<Vec<Rational>> {
            Ok(from_mgf::bernoulli(&mgf_neg, &int(e as i64), &zero, nmax)?.egf_coeffs())
        };
        let flipped_rows: Vec<Vec<Rational>> =
            (0..=nmax).map(bern_flipped).collect::<Result<_>>()?;
        let neg_rows: Vec<Vec<Rational>> = (0..=nmax).map(bern_neg).collect::<Result<_>>()?;
        let x_neg: Vec<Rational> = (1..=nmax).map(|m| -&neg_rows[m][m - 1]).collect();
        let x_flipped: Vec<Rational> = (1..=nmax).map(|m| flipped_rows[m][m - 1].clone()).collect();
        let bell_neg = partial_bell_table(&x_neg, nmax);
        let bell_flipped = partial_bell_table(&x_flipped, nmax);
        let s1_neg = from_mgf::first_kind(&mgf_neg.truncate(nmax.max(1))?, nmax)?;
        let s1_flipped = prob_triangle(ctx.rv, &flipped, Family::ProbS1, nmax)?;
        for n in 0..=nmax {
            for k in 0..=n {
                let lead = lead_binom(n, k);
                let via_neg_bern = sign(k) * &lead * &neg_rows[n][n - k];
                let via_flipped_bern = &lead * &flipped_rows[n][n - k];
                let via_neg_s1 = sign(k) * &s1_neg[n][k];
                c.all_eq(
                    Index::nk(n, k),
                    &[
                        ("G", &g.get(n, k)),
                        ("bell -Y", &bell_neg[n][k]),
                        ("bell -lambda", &bell_flipped[n][k]),
                        ("bernoulli -Y", &via_neg_bern),
                        ("(-1)^k S1^{-Y}", &via_neg_s1),
                        ("bernoulli -lambda", &via_flipped_bern),
                        ("S1 at -lambda", &s1_flipped.get(n, k)),
                    ],
                );
            }
        }
        Ok(())
    })
}

/// `x_i = E[(Y)_{i+1,lambda}] / (i+1)`, `i = 1..=len`.
fn moment_ratios(ctx: &Ctx, len: usize) -> Result<Vec<Rational>> {
    let raw = ctx.raw()?;
    let deg = degenerate_moments(raw, ctx.lambda);
    if deg.len() < len + 2 {
        return Err(Error::MissingMoments {
            needed: len + 1,
            available: deg.len() - 1,
        });
    }
    Ok((1..=len).map(|i| &deg[i + 1] / int(i as i64 + 1)).collect())
}

/// Partial Bell polynomial of the moment ratios against a finite sum over
/// the second kind.
fn bell_moment_ratio(ctx: &Ctx) -> Record {
    run(ctx.check("bell-moment-ratio"), |c| {
        let nmax = ctx.nmax;
        let s2 = cloned(&ctx.s2_wide)?;
        let mean = ctx.raw()?[1].clone();
        let bell = partial_bell_table(&moment_ratios(ctx, nmax)?, nmax);
        for n in 0..=nmax {
            for k in 0..=n {
                let rhs: Rational = (0..=k)
                    .map(|j| {
                        binom((n + k) as i64, (k - j) as i64) * factorial_q(n) / factorial_q(n + k)
                            * powi(&-&mean, (k - j) as i64)
                            * s2.get(n + j, j)
                    })
                    .sum();
                c.eq(Index::nk(n, k), &bell[n][k], &rhs);
            }
        }
        Ok(())
    })
}

/// Bernoulli numbers of order `gamma` from the moment ratios, and from the
/// second kind.
fn bernoulli_expansions(ctx: &Ctx) -> Vec<Record> {
    let nmax = ctx.nmax;
    let mut out = Vec::new();
    for &gamma in &ctx.opts.gammas {
        let gq = int(gamma);
        out.push(run(
            ctx.check_gamma("bernoulli-bell-expansion", gamma),
            |c| {
                let mean = ctx.mean()?;
                let beta = ctx.bern(gamma)?;
                let bell = partial_bell_table(&moment_ratios(ctx, nmax)?, nmax);
                for n in 0..=nmax {
                    let rhs: Rational = (0..=n)
                        .map(|k| falling(&-&gq, k) * powi(&mean, -gamma - k as i64) * &bell[n][k])
                        .sum();
                    c.eq(Index::n(n), &beta[n], &rhs);
                }
                Ok(())
            },
        ));
        out.push(run(
            ctx.check_gamma("bernoulli-from-second-kind", gamma),
            |c| {
                let mean = ctx.mean()?;
                let beta = ctx.bern(gamma)?;
                let s2 = cloned(&ctx.s2_wide)?;
                for n in 0..=nmax {
                    let mut rhs = Rational::zero();
                    for k in 0..=n {
                        let outer = binom_q(&int(gamma + k as i64 - 1), k);
                        for j in 0..=k {
                            rhs += &outer * binom(k as i64, j as i64)
                                / binom((n + j) as i64, j as i64)
                                * sign(j)
                                * powi(&mean, -gamma - j as i64)
                                * s2.get(n + j, j);
                        }
                    }
                    c.eq(Index::n(n), &beta[n], &rhs);
                }
                Ok(())
            },
        ));
    }
    out
}

/// First kind (ordinary and heterogeneous) from second-kind data only.
fn schlomilch_checks(ctx: &Ctx) -> Vec<Record> {
    [
        ("schlomilch", false, &ctx.s1),
        ("schlomilch-hetero", true, &ctx.g),
    ]
    .into_iter()
    .map(|(id, hetero, target)| {
        run(ctx.check(id), |c| {
            let target = cloned(target)?;
            let formula = schlomilch_triangle(ctx.rv, ctx.lambda, ctx.nmax, hetero)?;
            for (n, k, v) in formula.entries() {
                c.eq(Index::nk(n, k), v, &target.get(n, k));
            }
            Ok(())
        })
    })
    .collect()
}

/// Coefficients of `log_lambda^Y(1+t)`: reversion, first column of the first
/// kind, `beta^{(n,Y)}_{n-1}`, and a finite sum over the second kind.
fn log_checks(ctx: &Ctx) -> Record {
    run(ctx.check("log-from-second-kind"), |c| {
        let nmax = ctx.nmax;
        let log = prob_log(ctx.rv, ctx.lambda, nmax)?.egf_coeffs();
        let s1 = cloned(&ctx.s1)?;
        let s2 = cloned(&ctx.s2_wide)?;
        let mean = ctx.mean()?;
        c.eq(Index::n(0), &log[0], &Rational::zero());
        for n in 1..=nmax {
            let ni = n as i64;
            let sum: Rational = (0..n)
                .map(|j| {
                    let ji = j as i64;
                    binom(2 * ni - 1, ni - 1 - ji)
                        * sign(j)
                        * powi(&mean, -ni - ji)
                        * s2.get(n - 1 + j, j)
                })
                .sum();
            let beta = &ctx.bern(ni)?[n - 1];
            c.all_eq(
                Index::n(n),
                &[
                    ("log", &log[n]),
                    ("S1(n,1)", &s1.get(n, 1)),
                    ("bernoulli", beta),
                    ("second-kind", &sum),
                ],
            );
        }
        Ok(())
    })
}

/// Daehee and Cauchy numbers of order `gamma` against Bernoulli numbers.
fn daehee_cauchy_checks(ctx: &Ctx) -> Vec<Record> {
    let nmax = ctx.nmax;
    let mut out = Vec::new();
    let zero = Rational::zero();
    for &gamma in &ctx.opts.gammas {
        let gq = int(gamma);
        let numbers = |family| -> Result<Vec<Rational>> {
            Ok(prob_order_numbers(ctx.rv, ctx.lambda, &gq, &zero, family, nmax)?.egf_coeffs())
        };
        out.push(run(ctx.check_gamma("daehee-bernoulli-sum", gamma), |c| {
            let d = numbers(NumberFamily::Daehee)?;
            let beta = ctx.bern(gamma)?;
            let s1 = cloned(&ctx.s1)?;
            let s2 = cloned(&ctx.s2_wide)?;
            for n in 0..=nmax {
                let via_s1: Rational = (0..=n).map(|k| &beta[k] * s1.get(n, k)).sum();
                c.eq(Index::n(n), &d[n], &via_s1);
                // and the forward relation beta = sum D S2
                let via_s2: Rational = (0..=n).map(|k| &d[k] * s2.get(n, k)).sum();
                c.eq(Index::n(n), &beta[n], &via_s2);
            }
            Ok(())
        }));
        out.push(run(ctx.check_gamma("cauchy-bernoulli-sum", gamma), |c| {
            let cn = numbers(NumberFamily::Cauchy)?;
            let beta = ctx.bern(-gamma)?;
            let s1 = cloned(&ctx.s1)?;
            for n in 0..=nmax {
                let via_s1: Rational = (0..=n).map(|k| &beta[k] * s1.get(n, k)).sum();
                c.eq(Index::n(n), &cn[n], &via_s1);
            }
            Ok(())
        }));
        out.push(run(ctx.check_gamma("daehee-bernoulli-shift", gamma), |c| {
            let d = numbers(NumberFamily::Daehee)?;
            for n in 0..=nmax {
                let shift = n as i64 + gamma;
                if shift == 0 {
                    continue;
                }
                let rhs = &gq / int(shift) * &ctx.bern(shift)?[n];
                c.eq(Index::n(n), &d[n], &rhs);
            }
            Ok(())
        }));
        out.push(run(ctx.check_gamma("cauchy-bernoulli-shift", gamma), |c| {
            let cn = numbers(NumberFamily::Cauchy)?;
            for n in 0..=nmax {
                let ni = n as i64;
                if gamma == ni {
                    continue;
                }
                let rhs = &gq / int(gamma - ni) * &ctx.bern(ni - gamma)?[n];
                c.eq(Index::n(n), &cn[n], &rhs);
            }
            Ok(())
        }));
    }
    out
}

/// Lagrange extraction against explicit reversion of `E[e_lambda^Y(t)] - 1`,
/// and formula (A) against Daehee numbers and `exp` of the reversion.
pub fn lagrange_suite(
    rv: &RandomVariable,
    lambda: &Rational,
    nmax: usize,
    gammas: &[i64],
) -> VerificationReport {
    let mut report = VerificationReport::new("lagrange");
    let check = |id: &str| Check::new(id, Some(rv), Some(lambda), nmax);
    let f: Result<DeltaSeries> = mgf_deg(rv, lambda, nmax.max(1)).and_then(|m| from_mgf::delta(&m));
    let rev: Result<Series> = cloned(&f).map(|f| f.revert().into_series());

    report.push(run(check("lagrange-c"), |c| {
        let f = cloned(&f)?;
        let rev = cloned(&rev)?;
        for n in 1..=nmax {
            let value = lagrange_extract(f.series(), f, n, 0, LagrangeFormula::C)?;
            c.eq(Index::n(n), &value, rev.coeff(n)?);
        }
        Ok(())
    }));
    report.push(run(check("lagrange-b"), |c| {
        let f = cloned(&f)?;
        let rev = cloned(&rev)?;
        let s1 = prob_triangle(rv, lambda, Family::ProbS1, nmax)?;
        let mut power = Series::one(nmax);
        for k in 1..=nmax {
            power = power.mul(rev)?;
            for n in k..=nmax {
                let value = lagrange_extract(f.series(), f, n, k, LagrangeFormula::B)?;
                let scaled = &value * factorial_q(n) / factorial_q(k);
                c.eq(Index::nk(n, k), &value, power.coeff(n)?);
                c.eq(Index::nk(n, k), &scaled, &s1.get(n, k));
            }
        }
        Ok(())
    }));
    report.push(run(check("lagrange-a").with_detail("g = exp(t)"), |c| {
        let f = cloned(&f)?;
        let rev = cloned(&rev)?;
        let g = Series::var(nmax).exp()?;
        let composed = g.compose(rev)?;
        for n in 0..=nmax {
            let value = lagrange_extract(&g, f, n, 0, LagrangeFormula::A)?;
            c.eq(Index::n(n), &value, composed.coeff(n)?);
        }
        Ok(())
    }));
    for &gamma in gammas {
        let detail = format!("g = (t/f)^gamma, gamma={gamma}");
        report.push(run(check("lagrange-a").with_detail(detail), |c| {
            let f = cloned(&f)?;
            let zero = Rational::zero();
            let gq = int(gamma);
            let g = prob_order_numbers(rv, lambda, &gq, &zero, NumberFamily::Bernoulli, nmax)?;
            let d = prob_order_numbers(rv, lambda, &gq, &zero, NumberFamily::Daehee, nmax)?;
            for n in 0..=nmax {
                let value = lagrange_extract(&g, f, n, 0, LagrangeFormula::A)?;
                c.eq(Index::n(n), &(value * factorial_q(n)), &d.coeff_egf(n)?);
            }
            Ok(())
        }));
    }
    report
}

/// Per-distribution closed forms against the engine. Forms that do not
/// exist for the distribution (or for this `lambda`) are skipped.
fn closed_form_checks(ctx: &Ctx) -> Vec<Record> {
    let nmax = ctx.nmax;
    let depth = ctx.opts.depth;
    let mut out = Vec::new();
    let families = [
        ("closed-form-s2", ClosedFamily::S2, &ctx.s2_wide),
        ("closed-form-s1", ClosedFamily::S1, &ctx.s1),
        ("closed-form-s1-derived", ClosedFamily::S1Derived, &ctx.s1),
    ];
    for (id, family, engine) in families {
        let table = match closed_form_table(ctx.rv, ctx.lambda, family, nmax, depth) {
            Err(Error::Unsupported(_)) => continue,
            other => other,
        };
        out.push(run(ctx.check(id), |c| {
            let table = table?;
            let engine = cloned(engine)?;
            for (n, row) in table.iter().enumerate() {
                for (k, value) in row.iter().enumerate() {
                    c.closed(Index::nk(n, k), value, &engine.get(n, k));
                }
            }
            Ok(())
        }));
    }
    match closed_form_log(ctx.rv, ctx.lambda, nmax, depth) {
        Err(Error::Unsupported(_)) => {}
        closed => out.push(run(ctx.check("closed-form-log"), |c| {
            let closed = closed?;
            let engine = prob_log(ctx.rv, ctx.lambda, nmax)?.egf_coeffs();
            for (n, value) in closed.iter().enumerate() {
                c.closed(Index::n(n), value, &engine[n]);
            }
            Ok(())
        })),
    }
    if *ctx.rv == RandomVariable::Uniform01 && ctx.lambda.is_zero() {
        out.push(run(ctx.check("closed-form-s1-classical"), |c| {
            let engine = cloned(&ctx.s1)?;
            for n in 0..=nmax {
                for k in 0..=n {
                    c.eq(
                        Index::nk(n, k),
                        &uniform_s1_classical(n, k)?,
                        &engine.get(n, k),
                    );
                }
            }
            Ok(())
        }));
    }
    out
}

/// Every identity for one `(Y, lambda)` with the default options.
pub fn identity_suite(
    rv: &RandomVariable,
    lambda: &Rational,
    nmax: usize,
    gammas: &[i64],
    depth: usize,
) -> VerificationReport {
    let opts = SuiteOptions {
        gammas: gammas.to_vec(),
        depth,
        perturb_moment: None,
    };
    identity_suite_with(rv, lambda, nmax, &opts)
}

/// Every identity for one `(Y, lambda)`.
pub fn identity_suite_with(
    rv: &RandomVariable,
    lambda: &Rational,
    nmax: usize,
    opts: &SuiteOptions,
) -> VerificationReport {
    let ctx = Ctx::new(rv, lambda, nmax, opts);
    let mut report = VerificationReport::new(format!("identities {rv} lambda={lambda}"));
    report.records.extend(moment_checks(&ctx));
    for (t2, t1) in [(&ctx.s2_wide, &ctx.s1), (&ctx.h_wide, &ctx.g)] {
        let pair = cloned(t2).and_then(|t2| {
            let t1 = cloned(t1)?;
            check_orthogonality(&t2.truncated(nmax), t1)
        });
        match pair {
            Ok(r) => report.extend(r),
            Err(e) => report.push(run(ctx.check("orthogonality"), |_| Err(e))),
        }
    }
    report.push(second_kind_three_way(&ctx));
    report.push(first_kind_bernoulli_bell(&ctx));
    report.push(hetero_second_kind(&ctx));
    report.push(hetero_first_kind(&ctx));
    report.push(bell_moment_ratio(&ctx));
    report.records.extend(bernoulli_expansions(&ctx));
    report.records.extend(schlomilch_checks(&ctx));
    report.push(log_checks(&ctx));
    report.records.extend(daehee_cauchy_checks(&ctx));
    report.extend(lagrange_suite(rv, lambda, nmax, &opts.gammas));
    report.records.extend(closed_form_checks(&ctx));
    report
}

/// Deterministic (non-probabilistic) identities at one `lambda`.
pub fn degenerate_suite(lambda: &Rational, nmax: usize) -> VerificationReport {
    let mut report = VerificationReport::new(format!("degenerate lambda={lambda}"));
    let check = |id: &str| Check::new(id, None, Some(lambda), nmax);
    let flipped = -lambda;
    let tri = |family| triangle(family, lambda, nmax);
    let (s2l, s1l, h, g, l) = match (
        tri(Family::DegS2),
        tri(Family::DegS1),
        tri(Family::HeteroS2),
        tri(Family::HeteroS1),
        tri(Family::Lah),
    ) {
        (Ok(a), Ok(b), Ok(c), Ok(d), Ok(e)) => (a, b, c, d, e),
        (a, b, c, d, e) => {
            let err = [a.err(), b.err(), c.err(), d.err(), e.err()]
                .into_iter()
                .flatten()
                .next();
            report.push(run(check("triangles"), |_| Err(err.expect("one failed"))));
            return report;
        }
    };
    let s1 = stirling1(nmax, nmax);
    let s2 = stirling2(nmax, nmax);

    report.push(run(check("degenerate-recurrence"), |c| {
        let r2 = deg_stirling2(lambda, nmax, nmax);
        let r1 = deg_stirling1(lambda, nmax, nmax);
        for n in 0..=nmax {
            for k in 0..=n {
                c.eq(Index::nk(n, k), &s2l.get(n, k), &r2[n][k]);
                c.eq(Index::nk(n, k), &s1l.get(n, k), &r1[n][k]);
            }
        }
        Ok(())
    }));
    for (t2, t1) in [(&s2l, &s1l), (&h, &g)] {
        match check_orthogonality(t2, t1) {
            Ok(r) => report.extend(r),
            Err(e) => report.push(run(check("orthogonality"), |_| Err(e))),
        }
    }

    let zero = Rational::zero();
    let numbers = |lam: &Rational, e: usize, family| -> Result<Vec<Rational>> {
        Ok(order_numbers(lam, &int(e as i64), &zero, family, nmax)?.egf_coeffs())
    };
    report.push(run(check("first-kind-via-bernoulli"), |c| {
        let f = DeltaSeries::new(
            deg_exp(lambda, &Rational::one(), nmax).add_constant(&-Rational::one()),
        )?;
        for n in 0..=nmax {
            let beta = numbers(lambda, n, NumberFamily::Bernoulli)?;
            let beta_flipped = numbers(&flipped, n, NumberFamily::Bernoulli)?;
            for k in 0..=n {
                let lead = lead_binom(n, k);
                let via_lagrange = if k == 0 {
                    kronecker(n, k)
                } else {
                    lagrange_extract(f.series(), &f, n, k, LagrangeFormula::B)? * factorial_q(n)
                        / factorial_q(k)
                };
                c.all_eq(
                    Index::nk(n, k),
                    &[
                        ("S1_lambda", &s1l.get(n, k)),
                        ("bernoulli", &(&lead * &beta[n - k])),
                        ("lagrange", &via_lagrange),
                    ],
                );
                c.eq(
                    Index::nk(n, k),
                    &g.get(n, k),
                    &(&lead * &beta_flipped[n - k]),
                );
            }
        }
        Ok(())
    }));
    report.push(run(check("degenerate-log"), |c| {
        let log = deg_log(lambda, nmax).egf_coeffs();
        for n in 1..=nmax {
            let beta = numbers(lambda, n, NumberFamily::Bernoulli)?;
            let falling_form = falling(&(lambda - Rational::one()), n - 1);
            c.all_eq(
                Index::n(n),
                &[
                    ("log", &log[n]),
                    ("S1(n,1)", &s1l.get(n, 1)),
                    ("(lambda-1)_{n-1}", &falling_form),
                    ("bernoulli", &beta[n - 1]),
                ],
            );
        }
        Ok(())
    }));
    report.push(run(check("cauchy-second-kind"), |c| {
        for n in 0..=nmax {
            let cauchy = numbers(lambda, n, NumberFamily::Cauchy)?;
            let cauchy_flipped = numbers(&flipped, n, NumberFamily::Cauchy)?;
            for k in 0..=n {
                let lead = lead_binom(n, k);
                c.eq(
                    Index::nk(n, k),
                    &h.get(n, k),
                    &(&lead * &cauchy_flipped[n - k]),
                );
                c.eq(Index::nk(n, k), &s2l.get(n, k), &(&lead * &cauchy[n - k]));
            }
        }
        Ok(())
    }));
    report.push(run(check("hetero-reflection"), |c| {
        let s2_flipped = triangle(Family::DegS2, &flipped, nmax)?;
        let minus_one = -Rational::one();
        let reflected = divided_powers(
            &deg_exp(lambda, &minus_one, nmax).add_constant(&minus_one),
            nmax,
        )?;
        for n in 0..=nmax {
            for k in 0..=n {
                let via_reflection = sign(n) * &reflected[n][k];
                c.all_eq(
                    Index::nk(n, k),
                    &[
                        ("H", &h.get(n, k)),
                        ("S2 at -lambda", &s2_flipped.get(n, k)),
                        ("(-1)^n S2^{-1}", &via_reflection),
                    ],
                );
            }
        }
        Ok(())
    }));
    report.push(run(check("hetero-connection"), |c| {
        for n in 0..=nmax {
            for k in 0..=n {
                let sum: Rational = (k..=n)
                    .map(|l| {
                        sign(n - l)
                            * at_q(&s2, l, k)
                            * at_q(&s1, n, l)
                            * powi(lambda, (n - l) as i64)
                    })
                    .sum();
                c.eq(Index::nk(n, k), &h.get(n, k), &sum);
            }
        }
        Ok(())
    }));
    report.push(run(check("lah-connection"), |c| {
        for n in 0..=nmax {
            for k in 0..=n {
                let sum: Rational = (k..=n)
                    .map(|m| sign(n - m) * s1l.get(n, m) * h.get(m, k))
                    .sum();
                c.eq(Index::nk(n, k), &l.get(n, k), &sum);
            }
        }
        Ok(())
    }));
    report.push(run(check("inclusion-exclusion"), |c| {
        for n in 0..=nmax {
            for k in 0..=n {
                let fall: Vec<Vec<Rational>> = (0..=k)
                    .map(|j| {
                        vec![
                            deg_factorial(&int(j as i64), n, lambda, FactorialKind::Falling);
                            n + 1
                        ]
                    })
                    .collect();
                let rise: Vec<Vec<Rational>> = (0..=k)
                    .map(|j| {
                        vec![deg_factorial(&int(j as i64), n, lambda, FactorialKind::Rising); n + 1]
                    })
                    .collect();
                c.eq(
                    Index::nk(n, k),
                    &s2l.get(n, k),
                    &inclusion_exclusion(&fall, n, k),
                );
                c.eq(
                    Index::nk(n, k),
                    &h.get(n, k),
                    &inclusion_exclusion(&rise, n, k),
                );
            }
        }
        Ok(())
    }));
    report.push(run(check("factorial-expansion"), |c| {
        for x in [rat(7, 2), rat(-5, 3), int(4)] {
            let fall = |m: usize| falling(&x, m);
            let deg_fall = |m: usize| deg_factorial(&x, m, lambda, FactorialKind::Falling);
            let deg_rise = |m: usize| deg_factorial(&x, m, lambda, FactorialKind::Rising);
            for n in 0..=nmax {
                let sum = |t: &Triangle, basis: &dyn Fn(usize) -> Rational| -> Rational {
                    (0..=n).map(|k| t.get(n, k) * basis(k)).sum()
                };
                c.eq(Index::n(n), &deg_fall(n), &sum(&s2l, &fall));
                c.eq(Index::n(n), &fall(n), &sum(&s1l, &deg_fall));
                c.eq(Index::n(n), &deg_rise(n), &sum(&h, &fall));
                c.eq(Index::n(n), &fall(n), &sum(&g, &deg_rise));
                c.eq(Index::n(n), &rising(&x, n), &sum(&l, &fall));
            }
        }
        Ok(())
    }));
    report.push(run(check("bell-polynomials"), |c| {
        let x = rat(3, 2);
        let t = Series::var(nmax);
        let lah_gf = t
            .div(&Series::one(nmax).sub(&t)?)?
            .scale(&x)
            .exp()?
            .egf_coeffs();
        let hetero_gf = deg_exp(&flipped, &Rational::one(), nmax)
            .add_constant(&-Rational::one())
            .scale(&x)
            .exp()?
            .egf_coeffs();
        for n in 0..=nmax {
            let lb = poly_family(&PolyKind::LahBell { x: x.clone() }, n)?;
            let hb = poly_family(
                &PolyKind::HeteroBell {
                    lambda: lambda.clone(),
                    x: x.clone(),
                },
                n,
            )?;
            c.eq(Index::n(n), &lb, &lah_gf[n]);
            c.eq(Index::n(n), &hb, &hetero_gf[n]);
            for k in 0..=n {
                let closed = factorial_q(n) / factorial_q(k) * lead_binom(n, k);
                c.eq(Index::nk(n, k), &l.get(n, k), &closed);
            }
        }
        Ok(())
    }));
    report
}

/// The two binomial identities behind the Schlomilch-type formula, for
/// `1 <= n <= nmax`, `0 <= k <= n`, `0 <= j <= n - k`.
pub fn binomial_suite(nmax: usize) -> VerificationReport {
    let mut report = VerificationReport::new("binomial");
    let mut first = Check::new("binomial-sum", None, None, nmax);
    let mut second = Check::new("binomial-product", None, None, nmax);
    for n in 1..=nmax as i64 {
        for k in 0..=n {
            for j in 0..=(n - k) {
                let at = Index::nkj(n as usize, k as usize, j as usize);
                let lhs: Rational = (j..=n - k).map(|i| binom(n + i - 1, i) * binom(i, j)).sum();
                let ratio = int(n) / int(n + j);
                let rhs = &ratio * binom(2 * n - k, n) * binom(n - k, j);
                first.eq(at, &lhs, &rhs);
                let lhs = binom(n - 1, k - 1) * binom(2 * n - k, n) * &ratio * binom(n - k, j)
                    / binom(n - k + j, j);
                let rhs = binom(n + j - 1, n + j - k) * binom(2 * n - k, n - k - j);
                second.eq(at, &lhs, &rhs);
            }
        }
    }
    report.push(first.finish());
    report.push(second.finish());
    report
}

/// Classical limits: `lambda = 0` gives the classical tables, `lambda = 1`
/// turns the heterogeneous numbers into Lah numbers, `Y = 1` turns every
/// probabilistic family into its deterministic counterpart, and at
/// `lambda = 0` the probabilistic families agree with the ones built from
/// the ordinary moment generating function.
pub fn limit_suite(nmax: usize) -> VerificationReport {
    let mut report = VerificationReport::new("limits");
    let zero = Rational::zero();
    let one = Rational::one();
    let s1 = stirling1(nmax, nmax);
    let s2 = stirling2(nmax, nmax);
    let l = lah(nmax, nmax);

    report.push(run(
        Check::new("classical-limit", None, Some(&zero), nmax),
        |c| {
            let d2 = triangle(Family::DegS2, &zero, nmax)?;
            let d1 = triangle(Family::DegS1, &zero, nmax)?;
            let h = triangle(Family::HeteroS2, &zero, nmax)?;
            let g = triangle(Family::HeteroS1, &zero, nmax)?;
            for n in 0..=nmax {
                for k in 0..=n {
                    let at = Index::nk(n, k);
                    c.all_eq(
                        at,
                        &[
                            ("S2", &at_q(&s2, n, k)),
                            ("S2_0", &d2.get(n, k)),
                            ("H_0", &h.get(n, k)),
                        ],
                    );
                    c.all_eq(
                        at,
                        &[
                            ("S1", &at_q(&s1, n, k)),
                            ("S1_0", &d1.get(n, k)),
                            ("G_0", &g.get(n, k)),
                        ],
                    );
                }
            }
            Ok(())
        },
    ));
    report.push(run(Check::new("lah-limit", None, Some(&one), nmax), |c| {
        let h = triangle(Family::HeteroS2, &one, nmax)?;
        let g = triangle(Family::HeteroS1, &one, nmax)?;
        for n in 0..=nmax {
            for k in 0..=n {
                c.eq(Index::nk(n, k), &h.get(n, k), &at_q(&l, n, k));
                c.eq(
                    Index::nk(n, k),
                    &g.get(n, k),
                    &(sign(n - k) * at_q(&l, n, k)),
                );
            }
        }
        Ok(())
    }));
    report.push(run(Check::new("factorial-limit", None, None, nmax), |c| {
        let x = rat(7, 2);
        for n in 0..=nmax {
            let at = Index::n(n);
            c.eq(
                at,
                &deg_factorial(&x, n, &one, FactorialKind::Falling),
                &falling(&x, n),
            );
            c.eq(
                at,
                &deg_factorial(&x, n, &one, FactorialKind::Rising),
                &rising(&x, n),
            );
            let power = powi(&x, n as i64);
            c.eq(
                at,
                &deg_factorial(&x, n, &zero, FactorialKind::Falling),
                &power,
            );
            c.eq(
                at,
                &deg_factorial(&x, n, &zero, FactorialKind::Rising),
                &power,
            );
        }
        Ok(())
    }));
    report.push(run(
        Check::new("bernoulli-diagonal", None, Some(&zero), nmax),
        |c| {
            for n in 1..=nmax {
                let b = order_numbers(&zero, &int(n as i64), &zero, NumberFamily::Bernoulli, nmax)?
                    .egf_coeffs();
                let diag = sign(n - 1) * factorial_q(n - 1);
                c.eq(Index::n(n), &b[n - 1], &diag);
                for k in 0..=n {
                    c.eq(
                        Index::nk(n, k),
                        &at_q(&s1, n, k),
                        &(lead_binom(n, k) * &b[n - k]),
                    );
                }
            }
            Ok(())
        },
    ));

    let classical: Vec<Record> = RandomVariable::builtin()
        .par_iter()
        .map(|rv| {
            run(
                Check::new("probabilistic-classical-limit", Some(rv), Some(&zero), nmax),
                |c| classical_limit(c, rv, nmax),
            )
        })
        .collect();
    report.records.extend(classical);

    let point = RandomVariable::PointMass { c: one.clone() };
    let reductions: Vec<Record> = default_lambdas()
        .par_iter()
        .map(|lambda| {
            run(
                Check::new("point-mass-reduction", Some(&point), Some(lambda), nmax),
                |c| point_mass_reduction(c, &point, lambda, nmax),
            )
        })
        .collect();
    report.records.extend(reductions);
    report
}

/// Probabilistic families at `lambda = 0` against the same constructions
/// applied to `sum E[Y^n] t^n / n!` built from oracle moments.
fn classical_limit(c: &mut Check, rv: &RandomVariable, nmax: usize) -> Result<()> {
    let zero = Rational::zero();
    let mgf = Series::from_egf(&raw_moments(rv, nmax + 1)?);
    let s2 = from_mgf::second_kind(&mgf, nmax)?;
    let s1 = from_mgf::first_kind(&mgf, nmax)?;
    for (family, reference) in [
        (Family::ProbS2, &s2),
        (Family::ProbH, &s2),
        (Family::ProbS1, &s1),
        (Family::ProbG, &s1),
    ] {
        let t = prob_triangle(rv, &zero, family, nmax)?;
        for (n, k, v) in t.entries() {
            c.eq(Index::nk(n, k), v, &reference[n][k]);
        }
    }
    let rev = from_mgf::delta(&mgf)?.revert().into_series();
    let ratio = rev.shift_down(1)?;
    for gamma in default_gammas() {
        let gq = int(gamma);
        let bern = from_mgf::bernoulli(&mgf, &gq, &zero, nmax)?;
        let daehee = ratio.powi(gamma)?;
        let cauchy = ratio.recip()?.powi(gamma)?;
        for (family, reference) in [
            (NumberFamily::Bernoulli, &bern),
            (NumberFamily::Daehee, &daehee),
            (NumberFamily::Cauchy, &cauchy),
        ] {
            let engine = prob_order_numbers(rv, &zero, &gq, &zero, family, nmax)?;
            for n in 0..=nmax {
                c.eq(Index::n(n), &engine.coeff_egf(n)?, &reference.coeff_egf(n)?);
            }
        }
    }
    Ok(())
}

/// `Y = 1`: every probabilistic family equals its deterministic counterpart.
fn point_mass_reduction(
    c: &mut Check,
    point: &RandomVariable,
    lambda: &Rational,
    nmax: usize,
) -> Result<()> {
    for (prob, det) in [
        (Family::ProbS2, Family::DegS2),
        (Family::ProbS1, Family::DegS1),
        (Family::ProbH, Family::HeteroS2),
        (Family::ProbG, Family::HeteroS1),
    ] {
        let p = prob_triangle(point, lambda, prob, nmax)?;
        let d = triangle(det, lambda, nmax)?;
        for (n, k, v) in p.entries() {
            c.eq(Index::nk(n, k), v, &d.get(n, k));
        }
    }
    let log = prob_log(point, lambda, nmax)?;
    let det_log = deg_log(lambda, nmax);
    for n in 0..=nmax {
        c.eq(Index::n(n), log.coeff(n)?, det_log.coeff(n)?);
    }
    let x = rat(2, 3);
    for gamma in default_gammas() {
        let gq = int(gamma);
        for family in [
            NumberFamily::Bernoulli,
            NumberFamily::Daehee,
            NumberFamily::Cauchy,
        ] {
            let p = prob_order_numbers(point, lambda, &gq, &x, family, nmax)?;
            let d = order_numbers(lambda, &gq, &x, family, nmax)?;
            for n in 0..=nmax {
                c.eq(Index::n(n), p.coeff(n)?, d.coeff(n)?);
            }
        }
    }
    Ok(())
}

/// Identity suites for every `(Y, lambda)` pair, the deterministic suite for
/// every `lambda`, the limit suite and the binomial identities. Pairs run in
/// parallel; records keep the grid order.
pub fn grid_suite(
    rvs: &[RandomVariable],
    lambdas: &[Rational],
    nmax: usize,
    opts: &SuiteOptions,
) -> VerificationReport {
    let pairs: Vec<(&RandomVariable, &Rational)> = rvs
        .iter()
        .flat_map(|rv| lambdas.iter().map(move |l| (rv, l)))
        .collect();
    let per_pair: Vec<VerificationReport> = pairs
        .par_iter()
        .map(|(rv, l)| identity_suite_with(rv, l, nmax, opts))
        .collect();
    let per_lambda: Vec<VerificationReport> = lambdas
        .par_iter()
        .map(|l| degenerate_suite(l, nmax))
        .collect();
    let mut report = VerificationReport::new("verify");
    per_pair.into_iter().for_each(|r| report.extend(r));
    per_lambda.into_iter().for_each(|r| report.extend(r));
    report.extend(limit_suite(nmax));
    report.extend(binomial_suite(nmax));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_passes(report: &VerificationReport) {
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn orthogonality_of_classical_pair() {
        let l = rat(1, 3);
        let t2 = triangle(Family::DegS2, &l, 10).unwrap();
        let t1 = triangle(Family::DegS1, &l, 10).unwrap();
        let report = check_orthogonality(&t2, &t1).unwrap();
        assert_eq!(report.records.len(), 4);
        assert_passes(&report);
    }

    #[test]
    fn orthogonality_catches_corruption() {
        let rv = RandomVariable::Poisson { alpha: int(2) };
        let l = rat(1, 2);
        let t2 = prob_triangle(&rv, &l, Family::ProbS2, 8).unwrap();
        let t1 = prob_triangle(&rv, &l, Family::ProbS1, 8).unwrap();
        assert_passes(&check_orthogonality(&t2, &t1).unwrap());
        let bad = t2.with_entry(5, 2, t2.get(5, 2) + int(1));
        let report = check_orthogonality(&bad, &t1).unwrap();
        let first = report
            .records
            .iter()
            .find(|r| r.id == "orthogonality")
            .unwrap();
        assert_eq!(first.status, Status::Fail);
        assert_eq!(first.first_failure.unwrap().n, 5);
    }

    #[test]
    fn orthogonality_rejects_bad_shapes() {
        let l = rat(1, 3);
        let t2 = triangle(Family::DegS2, &l, 6).unwrap();
        let t1 = triangle(Family::DegS1, &l, 5).unwrap();
        assert!(matches!(
            check_orthogonality(&t2, &t1),
            Err(Error::Precondition(_))
        ));
        let lah = triangle(Family::Lah, &l, 6).unwrap();
        assert!(check_orthogonality(&t2, &lah).is_err());
    }

    #[test]
    fn bernoulli_suite_passes() {
        let rv = RandomVariable::Bernoulli { p: rat(1, 2) };
        let report = identity_suite(&rv, &rat(1, 3), 6, &[-2, 0, 1, 3], 60);
        assert_passes(&report);
        assert!(report.by_id("closed-form-s2").count() == 1);
    }

    #[test]
    fn perturbed_moment_fails() {
        let rv = RandomVariable::Geometric { p: rat(1, 3) };
        let opts = SuiteOptions {
            gammas: vec![1],
            depth: 60,
            perturb_moment: Some((3, rat(1, 1000))),
        };
        let report = identity_suite_with(&rv, &rat(1, 2), 5, &opts);
        assert!(!report.passed());
        assert!(report
            .by_id("second-kind-three-way")
            .all(|r| r.status == Status::Fail));
    }

    #[test]
    fn zero_mean_is_reported() {
        let rv: RandomVariable = "custom:moments=0,1,0,3,0,15,0,105,0,945,0,10395,0,135135,0"
            .parse()
            .unwrap();
        let report = identity_suite(&rv, &int(0), 4, &[1], 60);
        assert!(report
            .by_id("second-kind-three-way")
            .all(|r| r.status == Status::Pass));
        assert!(report.by_id("schlomilch").all(|r| r.status == Status::Fail));
    }

    #[test]
    fn deterministic_suites_pass() {
        for l in default_lambdas() {
            assert_passes(&degenerate_suite(&l, 7));
        }
        assert_passes(&binomial_suite(9));
        assert_passes(&limit_suite(6));
    }
}
