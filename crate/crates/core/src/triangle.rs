//! Lower-triangular tables `T(n, k)`, `0 <= k <= n <= nmax`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probabilistic::RandomVariable;
use crate::rational::Rational;
use crate::series::Series;

/// Which number family a [`Triangle`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Stirling numbers of the first kind `S1(n,k)`.
    S1,
    /// Stirling numbers of the second kind `S2(n,k)`.
    S2,
    /// Degenerate first kind `S1_lambda(n,k)`.
    DegS1,
    /// Degenerate second kind `S2_lambda(n,k)`.
    DegS2,
    /// Lah numbers `L(n,k)`.
    Lah,
    /// Heterogeneous second kind `H_lambda(n,k)`.
    HeteroS2,
    /// Heterogeneous first kind `G_lambda(n,k)`.
    HeteroS1,
    ProbS2,
    ProbS1,
    ProbH,
    ProbG,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::S1,
        Family::S2,
        Family::DegS1,
        Family::DegS2,
        Family::Lah,
        Family::HeteroS2,
        Family::HeteroS1,
        Family::ProbS2,
        Family::ProbS1,
        Family::ProbH,
        Family::ProbG,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::S1 => "s1",
            Family::S2 => "s2",
            Family::DegS1 => "s1-deg",
            Family::DegS2 => "s2-deg",
            Family::Lah => "lah",
            Family::HeteroS2 => "hetero-s2",
            Family::HeteroS1 => "hetero-s1",
            Family::ProbS2 => "prob-s2",
            Family::ProbS1 => "prob-s1",
            Family::ProbH => "prob-h",
            Family::ProbG => "prob-g",
        }
    }

    pub fn is_probabilistic(self) -> bool {
        matches!(
            self,
            Family::ProbS2 | Family::ProbS1 | Family::ProbH | Family::ProbG
        )
    }

    /// First-kind families are built by reversion.
    pub fn is_first_kind(self) -> bool {
        matches!(
            self,
            Family::S1 | Family::DegS1 | Family::HeteroS1 | Family::ProbS1 | Family::ProbG
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.tag() == lower)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    family: Family,
    lambda: Rational,
    rv: Option<RandomVariable>,
    rows: Vec<Vec<Rational>>,
}

impl Triangle {
    /// Rows must have lengths `1, 2, ..., nmax + 1`.
    pub fn new(
        family: Family,
        lambda: Rational,
        rv: Option<RandomVariable>,
        rows: Vec<Vec<Rational>>,
    ) -> Self {
        assert!(!rows.is_empty());
        for (n, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n + 1, "row {n} has the wrong length");
        }
        Triangle {
            family,
            lambda,
            rv,
            rows,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn rv(&self) -> Option<&RandomVariable> {
        self.rv.as_ref()
    }

    pub fn nmax(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Entry `(n, k)`; zero outside `0 <= k <= n`. Panics past `nmax`.
    pub fn get(&self, n: usize, k: usize) -> Rational {
        assert!(n <= self.nmax(), "row {n} beyond nmax {}", self.nmax());
        self.rows[n].get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Copy with one entry replaced.
    pub fn with_entry(&self, n: usize, k: usize, value: Rational) -> Triangle {
        let mut t = self.clone();
        t.rows[n][k] = value;
        t
    }

    /// Keeps rows `0..=nmax`.
    pub fn truncated(&self, nmax: usize) -> Triangle {
        let mut t = self.clone();
        t.rows.truncate(nmax + 1);
        t
    }

    /// Iterates `(n, k, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, row)| row.iter().enumerate().map(move |(k, v)| (n, k, v)))
    }
}

/// `rows[n][k] = n!/k! [t^n] base(t)^k` for `0 <= k <= n <= nmax`: the
/// EGF coefficients of the divided powers `base^k / k!`.
pub fn divided_powers(base: &Series, nmax: usize) -> Result<Vec<Vec<Rational>>> {
    if !base.constant_term().is_zero() {
        return Err(Error::NonZeroConstantTerm);
    }
    let base = base.truncate(nmax)?;
    let mut rows: Vec<Vec<Rational>> = (0..=nmax).map(|n| Vec::with_capacity(n + 1)).collect();
    let mut power = Series::one(nmax);
    let mut kfact = Rational::from_integer(1.into());
    for k in 0..=nmax {
        if k > 0 {
            power = power.mul(&base)?;
            kfact *= Rational::from_integer(k.into());
        }
        for (n, row) in rows.iter_mut().enumerate().skip(k) {
            row.push(power.coeff_egf(n)? / &kfact);
        }
    }
    Ok(rows)
}
