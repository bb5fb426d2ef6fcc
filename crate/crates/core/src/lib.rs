//! Exact computation of classical, degenerate, heterogeneous and
//! probabilistic Stirling-type numbers over truncated power series with
//! rational coefficients, together with a harness that checks their
//! identities through independent routes.

// Triangles are indexed by (n, k) throughout; index loops read closest to the maths.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod probabilistic;
pub mod rational;
pub mod recurrence;
pub mod series;
pub mod special;
pub mod triangle;
pub mod verify;

pub use error::{Error, Result};
pub use probabilistic::{ProbSeriesBundle, RandomVariable};
pub use rational::Rational;
pub use series::{DeltaSeries, LagrangeFormula, Series};
pub use triangle::{Family, Triangle};
