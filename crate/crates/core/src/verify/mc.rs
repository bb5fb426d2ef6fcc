//! Monte Carlo estimates of `E[(S_j)_{n,lambda}]` compared against the exact
//! value. Sampling is split into a fixed number of chunks, each with its own
//! ChaCha stream, and the chunk statistics are merged in chunk order, so the
//! result does not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Exp, Gamma, Geometric, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probabilistic::{numeric::format_sig, sj_moment, RandomVariable};
use crate::rational::{to_exact_string, to_f64, Rational};

/// Number of independently seeded chunks.
pub const CHUNKS: u64 = 16;
/// Acceptance band on the z-score.
pub const Z_BAND: f64 = 5.0;
/// Fewest samples accepted.
pub const MIN_SAMPLES: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub target: String,
    pub samples: u64,
    pub seed: u64,
    /// Decimal strings with 12 significant digits.
    pub estimate: String,
    pub std_error: String,
    pub exact: String,
    pub z: String,
    #[serde(skip)]
    pub estimate_f64: f64,
    #[serde(skip)]
    pub std_error_f64: f64,
    #[serde(skip)]
    pub z_f64: f64,
}

impl McEstimate {
    pub fn within_band(&self) -> bool {
        self.z_f64.abs() <= Z_BAND
    }
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }
}

enum Sampler {
    Bernoulli(f64),
    Binomial(Binomial),
    Poisson(Poisson<f64>),
    Exponential(Exp<f64>),
    Gamma(Gamma<f64>),
    /// Failures before the first success, shifted by one.
    Geometric(Geometric),
    Normal(Normal<f64>),
    NegBinomial(Geometric, u32),
    Uniform,
    Constant(f64),
}

impl Sampler {
    fn new(rv: &RandomVariable) -> Result<Sampler> {
        let bad = |e: &dyn std::fmt::Display| Error::InvalidParameter(e.to_string());
        Ok(match rv {
            RandomVariable::Bernoulli { p } => Sampler::Bernoulli(to_f64(p)),
            RandomVariable::Binomial { m, p } => {
                Sampler::Binomial(Binomial::new(*m as u64, to_f64(p)).map_err(|e| bad(&e))?)
            }
            RandomVariable::Poisson { alpha } => {
                Sampler::Poisson(Poisson::new(to_f64(alpha)).map_err(|e| bad(&e))?)
            }
            RandomVariable::Exponential { alpha } => {
                Sampler::Exponential(Exp::new(to_f64(alpha)).map_err(|e| bad(&e))?)
            }
            RandomVariable::Gamma { alpha, beta } => {
                Sampler::Gamma(Gamma::new(to_f64(alpha), 1.0 / to_f64(beta)).map_err(|e| bad(&e))?)
            }
            RandomVariable::Geometric { p } => {
                Sampler::Geometric(Geometric::new(to_f64(p)).map_err(|e| bad(&e))?)
            }
            RandomVariable::Normal { mu, sigma2 } => Sampler::Normal(
                Normal::new(to_f64(mu), to_f64(sigma2).sqrt()).map_err(|e| bad(&e))?,
            ),
            RandomVariable::NegBinomial { r, p } => {
                Sampler::NegBinomial(Geometric::new(to_f64(p)).map_err(|e| bad(&e))?, *r)
            }
            RandomVariable::Uniform01 => Sampler::Uniform,
            RandomVariable::PointMass { c } => Sampler::Constant(to_f64(c)),
            RandomVariable::Custom { .. } => {
                return Err(Error::Unsupported(
                    "a custom moment sequence cannot be sampled".into(),
                ))
            }
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Bernoulli(p) => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Sampler::Binomial(d) => d.sample(rng) as f64,
            Sampler::Poisson(d) => d.sample(rng),
            Sampler::Exponential(d) => d.sample(rng),
            Sampler::Gamma(d) => d.sample(rng),
            Sampler::Geometric(d) => d.sample(rng) as f64 + 1.0,
            Sampler::Normal(d) => d.sample(rng),
            Sampler::NegBinomial(d, r) => (0..*r).map(|_| d.sample(rng) as f64).sum(),
            Sampler::Uniform => rng.random::<f64>(),
            Sampler::Constant(c) => *c,
        }
    }
}

/// `(x)_{n,lambda}` in floating point.
fn deg_falling(x: f64, n: usize, lambda: f64) -> f64 {
    (0..n).map(|i| x - i as f64 * lambda).product()
}

/// Estimates `E[(S_j)_{n,lambda}]` from `samples` draws of `S_j`.
pub fn mc_check(
    rv: &RandomVariable,
    lambda: &Rational,
    n: usize,
    j: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    rv.validate()?;
    let sampler = Sampler::new(rv)?;
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let exact = sj_moment(rv, lambda, j, n)?;
    let lam = to_f64(lambda);
    let per_chunk = samples / CHUNKS;
    let extra = samples % CHUNKS;
    let chunks: Vec<Moments> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = per_chunk + u64::from(c < extra);
            let mut acc = Moments::default();
            for _ in 0..count {
                let s: f64 = (0..j).map(|_| sampler.draw(&mut rng)).sum();
                acc.push(deg_falling(s, n, lam));
            }
            acc
        })
        .collect();
    let total = chunks.into_iter().fold(Moments::default(), Moments::merge);
    let estimate = total.mean;
    let variance = if total.count > 1 {
        total.m2 / (total.count - 1) as f64
    } else {
        0.0
    };
    let std_error = (variance / total.count as f64).sqrt();
    let exact_f = to_f64(&exact);
    let diff = estimate - exact_f;
    let z = if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-9 * exact_f.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    Ok(McEstimate {
        target: format!("E[(S_{j})_{{{n},{}}}], {rv}", to_exact_string(lambda)),
        samples,
        seed,
        estimate: format_sig(estimate, 12),
        std_error: format_sig(std_error, 12),
        exact: to_exact_string(&exact),
        z: format_sig(z, 12),
        estimate_f64: estimate,
        std_error_f64: std_error,
        z_f64: z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin() * 10.0).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert_eq!(merged.count, whole.count);
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-9);
    }

    #[test]
    fn point_mass_has_zero_error() {
        let est = mc_check(
            &RandomVariable::PointMass { c: int(1) },
            &rat(1, 2),
            3,
            2,
            2000,
            1,
        )
        .unwrap();
        assert_eq!(est.std_error_f64, 0.0);
        assert_eq!(est.z_f64, 0.0);
        assert_eq!(est.exact, "3"); // S_2 = 2: 2 * 3/2 * 1
    }

    #[test]
    fn reproducible() {
        let rv = RandomVariable::Poisson { alpha: int(2) };
        let a = mc_check(&rv, &rat(1, 2), 3, 2, 20_000, 7).unwrap();
        let b = mc_check(&rv, &rat(1, 2), 3, 2, 20_000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.estimate_f64.to_bits(), b.estimate_f64.to_bits());
        let c = mc_check(&rv, &rat(1, 2), 3, 2, 20_000, 8).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn bernoulli_mean() {
        let est = mc_check(
            &RandomVariable::Bernoulli { p: rat(1, 2) },
            &Rational::from_integer(0.into()),
            1,
            1,
            100_000,
            3,
        )
        .unwrap();
        assert!(est.within_band(), "{est:?}");
        assert!((est.estimate_f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn rejects_custom_and_small_samples() {
        let custom: RandomVariable = "custom:moments=1,2".parse().unwrap();
        assert!(matches!(
            mc_check(&custom, &int(0), 1, 1, 5000, 1),
            Err(Error::Unsupported(_))
        ));
        let pois = RandomVariable::Poisson { alpha: int(1) };
        assert!(mc_check(&pois, &int(0), 1, 1, 10, 1).is_err());
    }
}
