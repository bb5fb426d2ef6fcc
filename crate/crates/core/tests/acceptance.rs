#![allow(clippy::needless_range_loop)]

//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use probstir::probabilistic::closed_form::{closed_form_table, DEFAULT_DEPTH};
use probstir::probabilistic::{prob_triangle, ClosedFamily};
use probstir::rational::{int, rat};
use probstir::verify::{
    binomial_suite, check_orthogonality, degenerate_suite, identity_suite_with, lagrange_suite,
    limit_suite, mc_check, Check, Index, Record, Status, SuiteOptions, VerificationReport,
};
use probstir::{Family, RandomVariable, Rational};
use rayon::prelude::*;

/// The nine named distributions plus the point mass at 1.
fn test_rvs() -> Vec<RandomVariable> {
    let mut rvs = RandomVariable::builtin();
    rvs.push(RandomVariable::PointMass { c: int(1) });
    rvs
}

fn acceptance_lambdas() -> Vec<Rational> {
    vec![int(0), rat(1, 2), rat(-1, 3)]
}

fn grid() -> Vec<(RandomVariable, Rational)> {
    test_rvs()
        .into_iter()
        .flat_map(|rv| {
            acceptance_lambdas()
                .into_iter()
                .map(move |l| (rv.clone(), l))
        })
        .collect()
}

struct Outcome {
    pass: bool,
    summary: String,
}

fn summarize<'a>(
    records: impl IntoIterator<Item = &'a Record>,
    allow_inconclusive: bool,
) -> Outcome {
    let (mut pass, mut fail, mut inconclusive, mut checked) = (0, 0, 0, 0);
    let mut first_failure = None;
    for r in records {
        checked += r.checked;
        match r.status {
            Status::Pass => pass += 1,
            Status::Inconclusive => inconclusive += 1,
            Status::Fail => {
                fail += 1;
                first_failure.get_or_insert_with(|| {
                    let mut one = VerificationReport::new("first failure");
                    one.push(r.clone());
                    one.to_string()
                        .lines()
                        .nth(1)
                        .unwrap_or_default()
                        .trim()
                        .to_string()
                });
            }
        }
    }
    let ok = fail == 0 && (allow_inconclusive || inconclusive == 0) && pass > 0;
    let mut summary = format!(
        "{pass} records pass, {fail} fail, {inconclusive} inconclusive; {checked} comparisons"
    );
    if let Some(f) = first_failure {
        summary.push_str(&format!("; first failure: {f}"));
    }
    Outcome { pass: ok, summary }
}

fn by_ids<'a>(
    reports: &'a [VerificationReport],
    ids: &'a [&str],
) -> impl Iterator<Item = &'a Record> + 'a {
    reports
        .iter()
        .flat_map(|r| r.records.iter())
        .filter(move |r| ids.contains(&r.id.as_str()))
}

fn main() -> ExitCode {
    let mut lines: Vec<(String, Outcome, f64)> = Vec::new();
    let mut record = |name: &str, start: Instant, outcome: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} {name} [{secs:.1}s]: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.summary
        );
        lines.push((name.to_string(), outcome, secs));
    };

    // Orthogonality, n <= 12.
    let start = Instant::now();
    let reports: Vec<VerificationReport> = grid()
        .par_iter()
        .map(|(rv, l)| {
            let mut report = VerificationReport::new("orthogonality");
            for (f2, f1) in [
                (Family::ProbS2, Family::ProbS1),
                (Family::ProbH, Family::ProbG),
            ] {
                let pair = prob_triangle(rv, l, f2, 12)
                    .and_then(|t2| check_orthogonality(&t2, &prob_triangle(rv, l, f1, 12)?));
                match pair {
                    Ok(r) => report.extend(r),
                    Err(e) => {
                        let mut c = Check::new("orthogonality", Some(rv), Some(l), 12);
                        c.error(&e);
                        report.push(c.finish());
                    }
                }
            }
            report
        })
        .collect();
    let outcome = summarize(reports.iter().flat_map(|r| r.records.iter()), false);
    record(
        "orthogonality and inverse relations, 10 rvs x lambda {0,1/2,-1/3}, n<=12",
        start,
        outcome,
    );

    // Schlomilch-type formulas, n <= 12.
    let start = Instant::now();
    let reports: Vec<VerificationReport> = grid()
        .par_iter()
        .map(|(rv, l)| {
            let mut report = VerificationReport::new("schlomilch");
            for (hetero, target, id) in [
                (false, Family::ProbS1, "schlomilch"),
                (true, Family::ProbG, "schlomilch-hetero"),
            ] {
                let mut c = Check::new(id, Some(rv), Some(l), 12);
                let result = probstir::probabilistic::schlomilch_triangle(rv, l, 12, hetero)
                    .and_then(|f| Ok((f, prob_triangle(rv, l, target, 12)?)));
                match result {
                    Ok((formula, engine)) => {
                        for (n, k, v) in formula.entries() {
                            c.eq(Index::nk(n, k), v, &engine.get(n, k));
                        }
                    }
                    Err(e) => c.error(&e),
                }
                report.push(c.finish());
            }
            report
        })
        .collect();
    let outcome = summarize(reports.iter().flat_map(|r| r.records.iter()), false);
    record(
        "Schlomilch formula for S1 and G from S2 and H, n<=12",
        start,
        outcome,
    );

    // Identity suites, n <= 10, on the same grid.
    let start = Instant::now();
    let opts = SuiteOptions::default();
    let suites: Vec<VerificationReport> = grid()
        .par_iter()
        .map(|(rv, l)| identity_suite_with(rv, l, 10, &opts))
        .collect();
    let suite_secs = start.elapsed().as_secs_f64();
    println!("(identity suites over the grid took {suite_secs:.1}s)");

    let start = Instant::now();
    let outcome = summarize(
        by_ids(
            &suites,
            &[
                "second-kind-three-way",
                "first-kind-bernoulli-bell",
                "degenerate-moments",
                "partial-sum-moments",
            ],
        ),
        false,
    );
    record(
        "second kind three ways and first kind via Bernoulli/Bell, n<=10",
        start,
        outcome,
    );

    let start = Instant::now();
    let outcome = summarize(
        by_ids(
            &suites,
            &["hetero-second-kind-four-way", "hetero-first-kind-six-way"],
        ),
        false,
    );
    record(
        "heterogeneous numbers through Y, -Y and -lambda, n<=10",
        start,
        outcome,
    );

    let start = Instant::now();
    let ids = [
        "bell-moment-ratio",
        "bernoulli-bell-expansion",
        "bernoulli-from-second-kind",
        "log-from-second-kind",
        "daehee-bernoulli-sum",
        "cauchy-bernoulli-sum",
        "daehee-bernoulli-shift",
        "cauchy-bernoulli-shift",
    ];
    let outcome = summarize(by_ids(&suites, &ids), false);
    record(
        "Bell/Bernoulli/log/Daehee/Cauchy identities, gamma in -3..=4, n<=10",
        start,
        outcome,
    );

    // Closed forms, n <= 10, plus the exact negative binomial first kind at p = 63/64.
    let start = Instant::now();
    let mut closed: Vec<Record> = by_ids(
        &suites,
        &[
            "closed-form-s2",
            "closed-form-s1",
            "closed-form-s1-derived",
            "closed-form-log",
            "closed-form-s1-classical",
            "moments",
        ],
    )
    .cloned()
    .collect();
    let nb = RandomVariable::NegBinomial {
        r: 3,
        p: rat(63, 64),
    };
    for l in [rat(1, 2), rat(-1, 3), int(1), int(2)] {
        let mut c = Check::new("closed-form-s1-derived", Some(&nb), Some(&l), 10);
        let result = closed_form_table(&nb, &l, ClosedFamily::S1Derived, 10, DEFAULT_DEPTH)
            .and_then(|t| Ok((t, prob_triangle(&nb, &l, Family::ProbS1, 10)?)));
        match result {
            Ok((table, engine)) => {
                for (n, row) in table.iter().enumerate() {
                    for (k, v) in row.iter().enumerate() {
                        if !v.is_exact() {
                            c.error(&probstir::Error::Precondition(
                                "expected an exact value".into(),
                            ));
                        }
                        c.closed(Index::nk(n, k), v, &engine.get(n, k));
                    }
                }
            }
            Err(e) => c.error(&e),
        }
        closed.push(c.finish());
    }
    let outcome = summarize(closed.iter(), true);
    record(&format!("closed forms vs engine, n<=10, depth {DEFAULT_DEPTH} (inconclusive allowed for unbounded sums)"), start, outcome);

    // Lagrange extraction, n <= 14, plus the deterministic Bernoulli/Cauchy forms.
    let start = Instant::now();
    let mut lag: Vec<VerificationReport> = grid()
        .par_iter()
        .map(|(rv, l)| lagrange_suite(rv, l, 14, &[-2, 1, 3]))
        .collect();
    lag.extend(
        probstir::verify::default_lambdas()
            .par_iter()
            .map(|l| degenerate_suite(l, 14))
            .collect::<Vec<_>>(),
    );
    let outcome = summarize(
        by_ids(
            &lag,
            &[
                "lagrange-a",
                "lagrange-b",
                "lagrange-c",
                "first-kind-via-bernoulli",
                "cauchy-second-kind",
                "degenerate-log",
            ],
        ),
        false,
    );
    record("Lagrange extraction vs reversion, and Bernoulli/Cauchy forms of the degenerate numbers, n<=14", start, outcome);

    let start = Instant::now();
    let mut all_det: Vec<Record> = lag
        .iter()
        .flat_map(|r| r.records.iter())
        .filter(|r| r.rv.is_none())
        .cloned()
        .collect();
    let limits = limit_suite(12);
    all_det.extend(limits.records.iter().cloned());
    let outcome = summarize(all_det.iter(), false);
    record(
        "limits (lambda=0, lambda=1, Y=1) and deterministic connection identities, n<=12",
        start,
        outcome,
    );

    let start = Instant::now();
    let outcome = summarize(binomial_suite(14).records.iter(), false);
    record("binomial identities, 0<=j<=n-k, k<=n<=14", start, outcome);

    // Monte Carlo.
    let start = Instant::now();
    let configs = [
        (
            RandomVariable::Poisson { alpha: int(2) },
            rat(1, 2),
            3,
            2,
            7,
        ),
        (
            RandomVariable::Bernoulli { p: rat(1, 2) },
            rat(1, 3),
            2,
            3,
            11,
        ),
        (
            RandomVariable::Exponential { alpha: int(3) },
            rat(-1, 3),
            3,
            1,
            13,
        ),
        (
            RandomVariable::Gamma {
                alpha: rat(3, 2),
                beta: int(2),
            },
            rat(1, 2),
            4,
            2,
            17,
        ),
        (
            RandomVariable::Normal {
                mu: int(1),
                sigma2: int(2),
            },
            rat(1, 2),
            4,
            1,
            19,
        ),
        (RandomVariable::Geometric { p: rat(1, 3) }, int(2), 2, 3, 23),
    ];
    let mut mc_ok = true;
    let mut detail = Vec::new();
    for (rv, l, n, j, seed) in &configs {
        match mc_check(rv, l, *n, *j, 1_000_000, *seed) {
            Ok(est) => {
                mc_ok &= est.within_band();
                detail.push(format!("{} z={}", rv.name(), est.z));
            }
            Err(e) => {
                mc_ok = false;
                detail.push(format!("{}: {e}", rv.name()));
            }
        }
    }
    record(
        "Monte Carlo, 6 configurations, 10^6 samples, |z|<=5",
        start,
        Outcome {
            pass: mc_ok,
            summary: detail.join(", "),
        },
    );

    // Negative controls.
    let start = Instant::now();
    let rv = RandomVariable::Poisson { alpha: int(2) };
    let l = rat(1, 2);
    let t2 = prob_triangle(&rv, &l, Family::ProbS2, 12).expect("engine");
    let t1 = prob_triangle(&rv, &l, Family::ProbS1, 12).expect("engine");
    let bad = t2.with_entry(7, 3, t2.get(7, 3) + rat(1, 1000));
    let triangle_caught = check_orthogonality(&bad, &t1)
        .map(|r| !r.passed())
        .unwrap_or(false);
    let perturbed = SuiteOptions {
        perturb_moment: Some((4, rat(1, 1_000_000))),
        ..SuiteOptions::default()
    };
    let moment_report = identity_suite_with(
        &RandomVariable::Geometric { p: rat(1, 3) },
        &l,
        8,
        &perturbed,
    );
    let moment_caught = moment_report.count(Status::Fail) > 0;
    record(
        "negative controls (perturbed triangle entry, perturbed moment)",
        start,
        Outcome {
            pass: triangle_caught && moment_caught,
            summary: format!(
                "triangle perturbation detected: {triangle_caught}; moment perturbation detected: {moment_caught} ({} failing records)",
                moment_report.count(Status::Fail)
            ),
        },
    );

    let failed = lines.iter().filter(|(_, o, _)| !o.pass).count();
    println!("{} of {} criteria pass", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
