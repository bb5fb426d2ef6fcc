use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::probabilistic::{ClosedValue, RandomVariable};
use crate::rational::{to_exact_string, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A truncated numeric sum had not settled at the configured depth.
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// Index of the first failing comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index {
    pub n: usize,
    pub k: Option<usize>,
    pub j: Option<usize>,
}

impl Index {
    pub fn n(n: usize) -> Self {
        Index {
            n,
            k: None,
            j: None,
        }
    }

    pub fn nk(n: usize, k: usize) -> Self {
        Index {
            n,
            k: Some(k),
            j: None,
        }
    }

    pub fn nkj(n: usize, k: usize, j: usize) -> Self {
        Index {
            n,
            k: Some(k),
            j: Some(j),
        }
    }
}

/// Outcome of one identity over one configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    pub nmax: usize,
    pub status: Status,
    /// Number of individual comparisons made.
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Index>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub records: Vec<Record>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            records: Vec::new(),
        }
    }

    /// True iff every record passed.
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    /// True iff no record failed (inconclusive records allowed).
    pub fn no_failures(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.records.extend(other.records);
    }

    /// Records with the given identity id.
    pub fn by_id<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.id == id)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} pass, {} fail, {} inconclusive",
            self.suite,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Inconclusive)
        )?;
        for r in self.records.iter().filter(|r| r.status != Status::Pass) {
            write!(f, "  {} {}", r.status, r.id)?;
            if let Some(rv) = &r.rv {
                write!(f, " rv={rv}")?;
            }
            if let Some(l) = &r.lambda {
                write!(f, " lambda={l}")?;
            }
            if let Some(ix) = r.first_failure {
                write!(f, " at n={}", ix.n)?;
                if let Some(k) = ix.k {
                    write!(f, " k={k}")?;
                }
                if let Some(j) = ix.j {
                    write!(f, " j={j}")?;
                }
            }
            if let (Some(l), Some(r)) = (&r.lhs, &r.rhs) {
                write!(f, ": {l} != {r}")?;
            }
            if let Some(d) = &r.detail {
                write!(f, " ({d})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Accumulates comparisons for one identity and turns them into a
/// [`Record`].
#[derive(Debug)]
pub struct Check {
    record: Record,
}

impl Check {
    pub fn new(
        id: &str,
        rv: Option<&RandomVariable>,
        lambda: Option<&Rational>,
        nmax: usize,
    ) -> Self {
        Check {
            record: Record {
                id: id.to_string(),
                rv: rv.map(|r| r.to_string()),
                lambda: lambda.map(to_exact_string),
                nmax,
                status: Status::Pass,
                checked: 0,
                first_failure: None,
                lhs: None,
                rhs: None,
                detail: None,
            },
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.record.detail = Some(detail.into());
        self
    }

    fn note_failure(&mut self, at: Index, lhs: String, rhs: String, status: Status) {
        let already_failed = self.record.status == Status::Fail;
        if already_failed
            || (self.record.status == Status::Inconclusive && status == Status::Inconclusive)
        {
            return;
        }
        self.record.status = status;
        self.record.first_failure = Some(at);
        self.record.lhs = Some(lhs);
        self.record.rhs = Some(rhs);
    }

    /// Exact comparison.
    pub fn eq(&mut self, at: Index, lhs: &Rational, rhs: &Rational) -> bool {
        self.record.checked += 1;
        if lhs == rhs {
            return true;
        }
        self.note_failure(at, to_exact_string(lhs), to_exact_string(rhs), Status::Fail);
        false
    }

    /// Every value must equal the first; names label the routes.
    pub fn all_eq(&mut self, at: Index, routes: &[(&str, &Rational)]) -> bool {
        let (first_name, first) = routes[0];
        for &(name, value) in &routes[1..] {
            self.record.checked += 1;
            if value != first {
                self.note_failure(
                    at,
                    format!("{first_name}={}", to_exact_string(first)),
                    format!("{name}={}", to_exact_string(value)),
                    Status::Fail,
                );
                return false;
            }
        }
        true
    }

    /// Closed-form value against the exact engine value: exact values must
    /// match exactly; truncated ones within tolerance, or the check is
    /// inconclusive if the partial sums had not settled.
    pub fn closed(&mut self, at: Index, closed: &ClosedValue, exact: &Rational) {
        self.record.checked += 1;
        match closed {
            ClosedValue::Exact(v) => {
                self.record.checked -= 1;
                self.eq(at, v, exact);
            }
            ClosedValue::Truncated {
                value,
                stable,
                depth,
            } => {
                if crate::probabilistic::closed_form::within_tolerance(value, exact) {
                    return;
                }
                let status = if *stable {
                    Status::Fail
                } else {
                    Status::Inconclusive
                };
                self.note_failure(
                    at,
                    format!(
                        "{} (depth {depth})",
                        crate::probabilistic::numeric::to_decimal(value, 15)
                    ),
                    crate::probabilistic::numeric::to_decimal(exact, 15),
                    status,
                );
            }
        }
    }

    /// A computation that should have succeeded raised an error.
    pub fn error(&mut self, err: &Error) {
        self.record.status = Status::Fail;
        self.record.detail = Some(format!("error: {err}"));
    }

    pub fn status(&self) -> Status {
        self.record.status
    }

    pub fn finish(self) -> Record {
        self.record
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn first_failure_is_kept() {
        let mut c = Check::new("demo", None, Some(&rat(1, 2)), 3);
        assert!(c.eq(Index::nk(1, 1), &int(1), &int(1)));
        assert!(!c.eq(Index::nk(2, 1), &int(1), &int(2)));
        assert!(!c.eq(Index::nk(3, 1), &int(5), &int(6)));
        let r = c.finish();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.first_failure, Some(Index::nk(2, 1)));
        assert_eq!(r.lhs.as_deref(), Some("1"));
        assert_eq!(r.checked, 3);
        assert_eq!(r.lambda.as_deref(), Some("1/2"));
    }

    #[test]
    fn fail_overrides_inconclusive() {
        let mut c = Check::new("demo", None, None, 1);
        let loose = ClosedValue::Truncated {
            value: int(2),
            depth: 10,
            stable: false,
        };
        c.closed(Index::n(0), &loose, &int(1));
        assert_eq!(c.status(), Status::Inconclusive);
        c.eq(Index::n(1), &int(0), &int(1));
        assert_eq!(c.status(), Status::Fail);
        let mut report = VerificationReport::new("s");
        report.push(c.finish());
        assert!(!report.passed());
        assert_eq!(report.count(Status::Fail), 1);
    }

    #[test]
    fn report_serializes() {
        let mut report = VerificationReport::new("s");
        report.push(Check::new("x", None, None, 2).finish());
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"status\":\"pass\""));
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
