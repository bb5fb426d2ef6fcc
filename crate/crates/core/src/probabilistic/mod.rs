//! Random-variable layer. Everything here is driven by the series
//! `E[e_lambda^Y(t)] = sum E[(Y)_{n,lambda}] t^n / n!`, built exactly for
//! each supported distribution.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{as_i64, binom, int, parse_rational, powi, sign, to_exact_string, Rational};
use crate::series::{DeltaSeries, Series};
use crate::special::{deg_exp, log_deg_exp, NumberFamily};
use crate::triangle::{divided_powers, Family, Triangle};

pub mod closed_form;
pub mod numeric;

pub use closed_form::{closed_form, closed_form_log_series, ClosedFamily, ClosedValue};

/// The distribution of `Y`. All scalar parameters are exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RandomVariable {
    Bernoulli {
        p: Rational,
    },
    Binomial {
        m: u32,
        p: Rational,
    },
    Poisson {
        alpha: Rational,
    },
    /// Rate `alpha`, so `E[Y] = 1/alpha`.
    Exponential {
        alpha: Rational,
    },
    /// Shape `alpha`, rate `beta`.
    Gamma {
        alpha: Rational,
        beta: Rational,
    },
    /// Supported on `{1, 2, 3, ...}`, so `E[Y] = 1/p`.
    Geometric {
        p: Rational,
    },
    Normal {
        mu: Rational,
        sigma2: Rational,
    },
    /// Number of failures before the `r`-th success.
    NegBinomial {
        r: u32,
        p: Rational,
    },
    Uniform01,
    PointMass {
        c: Rational,
    },
    /// `moments[n] = E[Y^n]`, with `moments[0] = 1`.
    Custom {
        moments: Vec<Rational>,
    },
}

impl RandomVariable {
    /// The nine named distributions, with the parameters used throughout the
    /// test grids.
    pub fn builtin() -> Vec<RandomVariable> {
        use crate::rational::rat;
        vec![
            RandomVariable::Bernoulli { p: rat(1, 2) },
            RandomVariable::Binomial { m: 3, p: rat(1, 3) },
            RandomVariable::Poisson { alpha: int(2) },
            RandomVariable::Exponential { alpha: int(3) },
            RandomVariable::Gamma {
                alpha: rat(3, 2),
                beta: int(2),
            },
            RandomVariable::Geometric { p: rat(1, 3) },
            RandomVariable::Normal {
                mu: int(1),
                sigma2: int(2),
            },
            RandomVariable::NegBinomial { r: 2, p: rat(1, 2) },
            RandomVariable::Uniform01,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            RandomVariable::Bernoulli { .. } => "bernoulli",
            RandomVariable::Binomial { .. } => "binomial",
            RandomVariable::Poisson { .. } => "poisson",
            RandomVariable::Exponential { .. } => "exponential",
            RandomVariable::Gamma { .. } => "gamma",
            RandomVariable::Geometric { .. } => "geometric",
            RandomVariable::Normal { .. } => "normal",
            RandomVariable::NegBinomial { .. } => "negbinomial",
            RandomVariable::Uniform01 => "uniform",
            RandomVariable::PointMass { .. } => "pointmass",
            RandomVariable::Custom { .. } => "custom",
        }
    }

    /// Named parameters in display order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        let s = to_exact_string;
        match self {
            RandomVariable::Bernoulli { p } => vec![("p", s(p))],
            RandomVariable::Binomial { m, p } => vec![("m", m.to_string()), ("p", s(p))],
            RandomVariable::Poisson { alpha } | RandomVariable::Exponential { alpha } => {
                vec![("alpha", s(alpha))]
            }
            RandomVariable::Gamma { alpha, beta } => vec![("alpha", s(alpha)), ("beta", s(beta))],
            RandomVariable::Geometric { p } => vec![("p", s(p))],
            RandomVariable::Normal { mu, sigma2 } => vec![("mu", s(mu)), ("sigma2", s(sigma2))],
            RandomVariable::NegBinomial { r, p } => vec![("r", r.to_string()), ("p", s(p))],
            RandomVariable::Uniform01 => vec![],
            RandomVariable::PointMass { c } => vec![("c", s(c))],
            RandomVariable::Custom { moments } => vec![(
                "moments",
                moments[1..].iter().map(s).collect::<Vec<_>>().join(","),
            )],
        }
    }

    /// Checks the parameter ranges of each distribution.
    pub fn validate(&self) -> Result<()> {
        let zero = Rational::zero();
        let one = Rational::one();
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("{}: {msg}", self.name())));
        match self {
            RandomVariable::Bernoulli { p } | RandomVariable::Binomial { p, .. } => {
                if !(*p > zero && *p <= one) {
                    return bad("need 0 < p <= 1");
                }
                if let RandomVariable::Binomial { m: 0, .. } = self {
                    return bad("need m >= 1");
                }
            }
            RandomVariable::Geometric { p } | RandomVariable::NegBinomial { p, .. } => {
                if !(*p > zero && *p < one) {
                    return bad("need 0 < p < 1");
                }
                if let RandomVariable::NegBinomial { r: 0, .. } = self {
                    return bad("need r >= 1");
                }
            }
            RandomVariable::Poisson { alpha } | RandomVariable::Exponential { alpha } => {
                if *alpha <= zero {
                    return bad("need alpha > 0");
                }
            }
            RandomVariable::Gamma { alpha, beta } => {
                if *alpha <= zero || *beta <= zero {
                    return bad("need alpha > 0 and beta > 0");
                }
            }
            RandomVariable::Normal { sigma2, .. } => {
                if *sigma2 <= zero {
                    return bad("need sigma^2 > 0");
                }
            }
            RandomVariable::Custom { moments } => {
                if moments.first() != Some(&one) {
                    return bad("need moments[0] = E[Y^0] = 1");
                }
            }
            RandomVariable::Uniform01 | RandomVariable::PointMass { .. } => {}
        }
        Ok(())
    }

    /// `E[Y]` from the closed form of each distribution.
    pub fn mean(&self) -> Rational {
        match self {
            RandomVariable::Bernoulli { p } => p.clone(),
            RandomVariable::Binomial { m, p } => int(*m as i64) * p,
            RandomVariable::Poisson { alpha } => alpha.clone(),
            RandomVariable::Exponential { alpha } => alpha.recip(),
            RandomVariable::Gamma { alpha, beta } => alpha / beta,
            RandomVariable::Geometric { p } => p.recip(),
            RandomVariable::Normal { mu, .. } => mu.clone(),
            RandomVariable::NegBinomial { r, p } => int(*r as i64) * (Rational::one() - p) / p,
            RandomVariable::Uniform01 => crate::rational::rat(1, 2),
            RandomVariable::PointMass { c } => c.clone(),
            RandomVariable::Custom { moments } => {
                moments.get(1).cloned().unwrap_or_else(Rational::zero)
            }
        }
    }

    /// Whether `mc_check` can draw from this distribution.
    pub fn is_samplable(&self) -> bool {
        !matches!(self, RandomVariable::Custom { .. })
    }

    pub fn require_nonzero_mean(&self) -> Result<()> {
        if self.mean().is_zero() {
            return Err(Error::ZeroMean);
        }
        Ok(())
    }
}

impl fmt::Display for RandomVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            return f.write_str(self.name());
        }
        let body: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}:{}", self.name(), body.join(","))
    }
}

impl FromStr for RandomVariable {
    type Err = Error;

    /// Parses `name[:key=value,...]`, e.g. `binomial:m=5,p=1/3`. Custom
    /// variables list `E[Y], E[Y^2], ...` after `moments=`; `E[Y^0] = 1` is
    /// implied.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let name = name.trim().to_ascii_lowercase();
        if name == "custom" {
            let list = rest
                .trim()
                .strip_prefix("moments=")
                .ok_or_else(|| Error::Parse("custom needs moments=m1,m2,...".into()))?;
            let mut moments = vec![Rational::one()];
            for item in list.split(',').filter(|s| !s.trim().is_empty()) {
                moments.push(parse_rational(item)?);
            }
            let rv = RandomVariable::Custom { moments };
            rv.validate()?;
            return Ok(rv);
        }
        let mut kv: Vec<(String, Rational)> = Vec::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            kv.push((k.trim().to_ascii_lowercase(), parse_rational(v)?));
        }
        let take = |key: &str| -> Result<Rational> {
            kv.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Parse(format!("{name}: missing parameter {key}")))
        };
        let take_count = |key: &str| -> Result<u32> {
            let v = take(key)?;
            as_i64(&v)
                .and_then(|i| u32::try_from(i).ok())
                .ok_or_else(|| Error::Parse(format!("{name}: {key} must be a positive integer")))
        };
        let rv = match name.as_str() {
            "bernoulli" => RandomVariable::Bernoulli { p: take("p")? },
            "binomial" => RandomVariable::Binomial {
                m: take_count("m")?,
                p: take("p")?,
            },
            "poisson" => RandomVariable::Poisson {
                alpha: take("alpha")?,
            },
            "exponential" => RandomVariable::Exponential {
                alpha: take("alpha")?,
            },
            "gamma" => RandomVariable::Gamma {
                alpha: take("alpha")?,
                beta: take("beta")?,
            },
            "geometric" => RandomVariable::Geometric { p: take("p")? },
            "normal" => RandomVariable::Normal {
                mu: take("mu")?,
                sigma2: take("sigma2")?,
            },
            "negbinomial" | "negative-binomial" | "nb" => RandomVariable::NegBinomial {
                r: take_count("r")?,
                p: take("p")?,
            },
            "uniform" | "uniform01" => RandomVariable::Uniform01,
            "pointmass" | "point-mass" => RandomVariable::PointMass { c: take("c")? },
            other => return Err(Error::Parse(format!("unknown random variable {other:?}"))),
        };
        rv.validate()?;
        Ok(rv)
    }
}

/// `E[e_lambda^Y(t)]` as an exact series of the given order.
pub fn mgf_deg(rv: &RandomVariable, lambda: &Rational, order: usize) -> Result<Series> {
    rv.validate()?;
    let one = Rational::one();
    let e = || deg_exp(lambda, &one, order);
    let em1 = || e().add_constant(&-one.clone());
    let log_e = || log_deg_exp(lambda, order);
    let unit = Series::one(order);
    let series = match rv {
        RandomVariable::Bernoulli { p } => em1().scale(p).add_constant(&one),
        RandomVariable::Binomial { m, p } => em1().scale(p).add_constant(&one).powi(*m as i64)?,
        RandomVariable::Poisson { alpha } => em1().scale(alpha).exp()?,
        RandomVariable::Exponential { alpha } => {
            unit.sub(&log_e().scale(&alpha.recip()))?.recip()?
        }
        RandomVariable::Gamma { alpha, beta } => {
            unit.sub(&log_e().scale(&beta.recip()))?.pow(&-alpha)?
        }
        RandomVariable::Geometric { p } => {
            let q = &one - p;
            e().scale(p).div(&unit.sub(&e().scale(&q))?)?
        }
        RandomVariable::Normal { mu, sigma2 } => {
            let l = log_e();
            let quad = l.mul(&l)?.scale(&(sigma2 / int(2)));
            l.scale(mu).add(&quad)?.exp()?
        }
        RandomVariable::NegBinomial { r, p } => {
            let q = &one - p;
            Series::constant(p.clone(), order)
                .div(&unit.sub(&e().scale(&q))?)?
                .powi(*r as i64)?
        }
        RandomVariable::Uniform01 => {
            // (e_lambda(t) - 1) / log e_lambda(t), both divided by t first.
            let num = deg_exp(lambda, &one, order + 1)
                .add_constant(&-one.clone())
                .shift_down(1)?;
            let den = log_deg_exp(lambda, order + 1).shift_down(1)?;
            num.div(&den)?
        }
        RandomVariable::PointMass { c } => deg_exp(lambda, c, order),
        RandomVariable::Custom { moments } => custom_mgf(moments, lambda, order)?,
    };
    Ok(series)
}

/// `E[(Y)_{n,lambda}] = sum_k S1(n,k) lambda^{n-k} E[Y^k]`.
fn custom_mgf(moments: &[Rational], lambda: &Rational, order: usize) -> Result<Series> {
    if moments.len() <= order {
        return Err(Error::MissingMoments {
            needed: order,
            available: moments.len().saturating_sub(1),
        });
    }
    let s1 = crate::special::triangle(Family::S1, &Rational::zero(), order)?;
    let egf: Vec<Rational> = (0..=order)
        .map(|n| {
            (0..=n)
                .map(|k| s1.get(n, k) * powi(lambda, (n - k) as i64) * &moments[k])
                .sum()
        })
        .collect();
    Ok(Series::from_egf(&egf))
}

/// `E[Y^n]`, read from the classical (`lambda = 0`) moment generating series.
pub fn moment(rv: &RandomVariable, n: usize) -> Result<Rational> {
    if let RandomVariable::Custom { moments } = rv {
        rv.validate()?;
        return moments.get(n).cloned().ok_or(Error::MissingMoments {
            needed: n,
            available: moments.len() - 1,
        });
    }
    mgf_deg(rv, &Rational::zero(), n)?.coeff_egf(n)
}

/// `E[e_lambda^{-Y}(t)]`, obtained as `E[e_{-lambda}^Y(-t)]`.
pub fn neg_mgf(rv: &RandomVariable, lambda: &Rational, order: usize) -> Result<Series> {
    Ok(mgf_deg(rv, &-lambda, order)?.negate_var())
}

/// Functions that only need a moment generating series (constant term 1),
/// so they apply equally to `Y`, `-Y` or a hand-built series.
pub mod from_mgf {
    use super::*;

    fn check_unit(mgf: &Series) -> Result<()> {
        if !mgf.constant_term().is_one() {
            return Err(Error::Precondition(
                "a moment generating series has constant term 1".into(),
            ));
        }
        Ok(())
    }

    /// `mgf - 1` as a delta series; fails with `ZeroMean` when `E[Y] = 0`.
    pub fn delta(mgf: &Series) -> Result<DeltaSeries> {
        check_unit(mgf)?;
        let d = mgf.add_constant(&-Rational::one());
        if d.coeff(1)?.is_zero() {
            return Err(Error::ZeroMean);
        }
        DeltaSeries::new(d)
    }

    /// Second-kind triangle: `(1/k!) (mgf - 1)^k`.
    pub fn second_kind(mgf: &Series, nmax: usize) -> Result<Vec<Vec<Rational>>> {
        check_unit(mgf)?;
        divided_powers(&mgf.truncate(nmax)?.add_constant(&-Rational::one()), nmax)
    }

    /// First-kind triangle: `(1/k!) rev(mgf - 1)^k`.
    pub fn first_kind(mgf: &Series, nmax: usize) -> Result<Vec<Vec<Rational>>> {
        let rev = delta(&mgf.truncate(nmax.max(1))?)?.revert();
        divided_powers(rev.series(), nmax)
    }

    /// `t / (mgf - 1)` at the given order; needs `mgf` of order `order + 1`.
    pub fn t_over_delta(mgf: &Series, order: usize) -> Result<Series> {
        let d = delta(&mgf.truncate(order + 1)?)?;
        d.series().shift_down(1)?.recip()
    }

    /// `(t / (mgf - 1))^gamma mgf^x`, whose EGF coefficients are the
    /// Bernoulli polynomials of order `gamma` attached to `mgf`.
    /// Non-integer `gamma` needs `E[Y] = 1`.
    pub fn bernoulli(mgf: &Series, gamma: &Rational, x: &Rational, order: usize) -> Result<Series> {
        let base = t_over_delta(mgf, order)?;
        let core = pow_with_mean_check(&base, gamma)?;
        if x.is_zero() {
            return Ok(core);
        }
        core.mul(&mgf.truncate(order)?.pow(x)?)
    }

    pub(crate) fn pow_with_mean_check(base: &Series, gamma: &Rational) -> Result<Series> {
        if as_i64(gamma).is_none() && !base.constant_term().is_one() {
            return Err(Error::InvalidParameter(format!(
                "order {gamma} is not an integer, which needs E[Y] = 1"
            )));
        }
        base.pow(gamma)
    }
}

/// `mgf`, `mgf - 1` and its compositional inverse `log_lambda^Y(1 + t)` for
/// one `(Y, lambda, order)`.
#[derive(Clone, Debug)]
pub struct ProbSeriesBundle {
    rv: RandomVariable,
    lambda: Rational,
    mgf: Series,
    delta: DeltaSeries,
    reverted: DeltaSeries,
}

impl ProbSeriesBundle {
    /// Needs `order >= 1` and `E[Y] != 0`.
    pub fn new(rv: &RandomVariable, lambda: &Rational, order: usize) -> Result<Self> {
        rv.require_nonzero_mean()?;
        let mgf = mgf_deg(rv, lambda, order.max(1))?.truncate(order.max(1))?;
        let delta = from_mgf::delta(&mgf)?;
        let reverted = delta.revert();
        Ok(ProbSeriesBundle {
            rv: rv.clone(),
            lambda: lambda.clone(),
            mgf,
            delta,
            reverted,
        })
    }

    pub fn rv(&self) -> &RandomVariable {
        &self.rv
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn order(&self) -> usize {
        self.mgf.order()
    }

    pub fn mgf(&self) -> &Series {
        &self.mgf
    }

    pub fn delta(&self) -> &DeltaSeries {
        &self.delta
    }

    pub fn reverted(&self) -> &DeltaSeries {
        &self.reverted
    }
}

/// Probabilistic triangle for `family` in `{ProbS2, ProbS1, ProbH, ProbG}`.
/// `H` and `G` are the second and first kinds at `-lambda`.
pub fn prob_triangle(
    rv: &RandomVariable,
    lambda: &Rational,
    family: Family,
    nmax: usize,
) -> Result<Triangle> {
    let flipped = -lambda;
    let rows = match family {
        Family::ProbS2 => from_mgf::second_kind(&mgf_deg(rv, lambda, nmax)?, nmax)?,
        Family::ProbH => from_mgf::second_kind(&mgf_deg(rv, &flipped, nmax)?, nmax)?,
        Family::ProbS1 => {
            rv.require_nonzero_mean()?;
            from_mgf::first_kind(&mgf_deg(rv, lambda, nmax.max(1))?, nmax)?
        }
        Family::ProbG => {
            rv.require_nonzero_mean()?;
            from_mgf::first_kind(&mgf_deg(rv, &flipped, nmax.max(1))?, nmax)?
        }
        other => {
            return Err(Error::Unsupported(format!(
                "{other} is not a probabilistic family"
            )))
        }
    };
    Ok(Triangle::new(
        family,
        lambda.clone(),
        Some(rv.clone()),
        rows,
    ))
}

/// `E[(S_j)_{n,lambda}]` for the partial sum `S_j` of `j` independent copies,
/// read from `E[e_lambda^Y(t)]^j`.
pub fn sj_moment(rv: &RandomVariable, lambda: &Rational, j: usize, n: usize) -> Result<Rational> {
    mgf_deg(rv, lambda, n)?.powi(j as i64)?.coeff_egf(n)
}

/// EGF series of the probabilistic degenerate Bernoulli polynomials
/// `beta_{n,lambda}^{(gamma,Y)}(x)` or the Daehee / Cauchy numbers
/// `D_{n,lambda}^{(gamma,Y)}`, `C_{n,lambda}^{(gamma,Y)}`.
pub fn prob_order_numbers(
    rv: &RandomVariable,
    lambda: &Rational,
    gamma: &Rational,
    x: &Rational,
    family: NumberFamily,
    order: usize,
) -> Result<Series> {
    rv.require_nonzero_mean()?;
    match family {
        NumberFamily::Bernoulli => {
            from_mgf::bernoulli(&mgf_deg(rv, lambda, order + 1)?, gamma, x, order)
        }
        NumberFamily::Daehee | NumberFamily::Cauchy => {
            let bundle = ProbSeriesBundle::new(rv, lambda, order + 1)?;
            let mut ratio = bundle.reverted().series().shift_down(1)?;
            if family == NumberFamily::Cauchy {
                ratio = ratio.recip()?;
            }
            from_mgf::pow_with_mean_check(&ratio, gamma)
        }
    }
}

/// `log_lambda^Y(1 + t)`: the compositional inverse of `E[e_lambda^Y(t)] - 1`.
pub fn prob_log(rv: &RandomVariable, lambda: &Rational, order: usize) -> Result<Series> {
    let bundle = ProbSeriesBundle::new(rv, lambda, order.max(1))?;
    bundle.reverted().series().truncate(order)
}

/// The Schlomilch-type sum
/// `sum_j C(n+j-1, n+j-k) C(2n-k, n-k-j) (-1)^j mean^{-n-j} T2(n-k+j, j)`
/// over a second-kind triangle `T2` with at least `2(n-k)` rows.
pub fn schlomilch_sum(
    second_kind: &Triangle,
    mean: &Rational,
    n: usize,
    k: usize,
) -> Result<Rational> {
    if k > n {
        return Ok(Rational::zero());
    }
    if mean.is_zero() {
        return Err(Error::ZeroMean);
    }
    let needed = 2 * (n - k);
    if second_kind.nmax() < needed {
        return Err(Error::Precondition(format!(
            "second-kind triangle needs {needed} rows, has {}",
            second_kind.nmax()
        )));
    }
    let (n_i, k_i) = (n as i64, k as i64);
    let mut acc = Rational::zero();
    for j in 0..=(n - k) {
        let j_i = j as i64;
        let coeff = binom(n_i + j_i - 1, n_i + j_i - k_i) * binom(2 * n_i - k_i, n_i - k_i - j_i);
        if coeff.is_zero() {
            continue;
        }
        acc += coeff * sign(j) * powi(mean, -(n_i + j_i)) * second_kind.get(n - k + j, j);
    }
    Ok(acc)
}

/// `S1_lambda^Y(n, k)` from second-kind data only.
pub fn schlomilch_s1(
    rv: &RandomVariable,
    lambda: &Rational,
    n: usize,
    k: usize,
) -> Result<Rational> {
    rv.require_nonzero_mean()?;
    let rows = 2 * n.saturating_sub(k);
    let s2 = prob_triangle(rv, lambda, Family::ProbS2, rows)?;
    schlomilch_sum(&s2, &rv.mean(), n, k)
}

/// The full first-kind triangle through the Schlomilch sum, built from a
/// single second-kind triangle of `2 nmax` rows. With `heterogeneous` set it
/// gives `G_lambda^Y` from `H_lambda^Y`.
pub fn schlomilch_triangle(
    rv: &RandomVariable,
    lambda: &Rational,
    nmax: usize,
    heterogeneous: bool,
) -> Result<Triangle> {
    rv.require_nonzero_mean()?;
    let (src, out) = if heterogeneous {
        (Family::ProbH, Family::ProbG)
    } else {
        (Family::ProbS2, Family::ProbS1)
    };
    let s2 = prob_triangle(rv, lambda, src, 2 * nmax)?;
    let mean = rv.mean();
    let rows = (0..=nmax)
        .map(|n| (0..=n).map(|k| schlomilch_sum(&s2, &mean, n, k)).collect())
        .collect::<Result<Vec<Vec<Rational>>>>()?;
    Ok(Triangle::new(out, lambda.clone(), Some(rv.clone()), rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::special::{deg_log, triangle};

    fn zero() -> Rational {
        Rational::zero()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for rv in RandomVariable::builtin() {
            let text = rv.to_string();
            assert_eq!(text.parse::<RandomVariable>().unwrap(), rv, "{text}");
        }
        let custom: RandomVariable = "custom:moments=1,2,6".parse().unwrap();
        assert_eq!(custom.to_string(), "custom:moments=1,2,6");
        assert_eq!(custom.mean(), int(1));
        assert!("bernoulli:p=3/2".parse::<RandomVariable>().is_err());
        assert!("geometric:p=1".parse::<RandomVariable>().is_err());
        assert!("binomial:m=1/2,p=1/2".parse::<RandomVariable>().is_err());
        assert!("cauchy:x=1".parse::<RandomVariable>().is_err());
        assert!("poisson".parse::<RandomVariable>().is_err());
    }

    #[test]
    fn bernoulli_mgf_shape() {
        let lambda = rat(1, 3);
        let p = rat(1, 4);
        let rv = RandomVariable::Bernoulli { p: p.clone() };
        let mgf = mgf_deg(&rv, &lambda, 6).unwrap();
        let expected = deg_exp(&lambda, &int(1), 6)
            .add_constant(&int(-1))
            .scale(&p)
            .add_constant(&int(1));
        assert_eq!(mgf, expected);
    }

    #[test]
    fn point_mass_one_is_degenerate_exponential() {
        let lambda = rat(-2, 3);
        let rv = RandomVariable::PointMass { c: int(1) };
        assert_eq!(
            mgf_deg(&rv, &lambda, 7).unwrap(),
            deg_exp(&lambda, &int(1), 7)
        );
        // e_lambda^{-1}(t) = e_{-lambda}(-t)
        let neg = neg_mgf(&rv, &lambda, 7).unwrap();
        assert_eq!(neg, deg_exp(&lambda, &int(-1), 7));
    }

    #[test]
    fn neg_first_coefficient_is_minus_mean() {
        for rv in RandomVariable::builtin() {
            let neg = neg_mgf(&rv, &rat(1, 2), 3).unwrap();
            assert_eq!(neg.coeff_egf(1).unwrap(), -rv.mean(), "{rv}");
        }
    }

    #[test]
    fn uniform_moments() {
        for n in 0..=8 {
            assert_eq!(
                moment(&RandomVariable::Uniform01, n).unwrap(),
                rat(1, n as i64 + 1)
            );
        }
        let c = rat(-3, 2);
        for n in 0..=5 {
            assert_eq!(
                moment(&RandomVariable::PointMass { c: c.clone() }, n).unwrap(),
                powi(&c, n as i64)
            );
        }
        assert_eq!(
            moment(&RandomVariable::Bernoulli { p: rat(2, 7) }, 1).unwrap(),
            rat(2, 7)
        );
    }

    #[test]
    fn closed_form_means_match_first_moment() {
        for rv in RandomVariable::builtin() {
            assert_eq!(moment(&rv, 1).unwrap(), rv.mean(), "{rv}");
        }
    }

    #[test]
    fn custom_needs_enough_moments() {
        let rv = RandomVariable::Custom {
            moments: vec![int(1), int(2)],
        };
        assert!(matches!(
            mgf_deg(&rv, &zero(), 3),
            Err(Error::MissingMoments { .. })
        ));
        assert!(mgf_deg(&rv, &zero(), 1).is_ok());
    }

    #[test]
    fn zero_mean_is_rejected_for_first_kind() {
        let rv: RandomVariable = "custom:moments=0,1,0,3".parse().unwrap();
        assert_eq!(
            prob_triangle(&rv, &zero(), Family::ProbS1, 3).unwrap_err(),
            Error::ZeroMean
        );
        assert_eq!(prob_log(&rv, &zero(), 3).unwrap_err(), Error::ZeroMean);
        // The second kind does not need a nonzero mean.
        assert!(prob_triangle(&rv, &zero(), Family::ProbS2, 3).is_ok());
    }

    #[test]
    fn bernoulli_triangles_scale() {
        let p = rat(1, 2);
        let lambda = rat(1, 3);
        let rv = RandomVariable::Bernoulli { p: p.clone() };
        let s2y = prob_triangle(&rv, &lambda, Family::ProbS2, 8).unwrap();
        let s1y = prob_triangle(&rv, &lambda, Family::ProbS1, 8).unwrap();
        let s2 = triangle(Family::DegS2, &lambda, 8).unwrap();
        let s1 = triangle(Family::DegS1, &lambda, 8).unwrap();
        for n in 0..=8usize {
            for k in 0..=n {
                assert_eq!(s2y.get(n, k), powi(&p, k as i64) * s2.get(n, k));
                assert_eq!(s1y.get(n, k), powi(&p, -(n as i64)) * s1.get(n, k));
            }
        }
    }

    #[test]
    fn point_mass_reduces_to_degenerate() {
        let lambda = rat(2, 5);
        let rv = RandomVariable::PointMass { c: int(1) };
        for (pf, df) in [
            (Family::ProbS2, Family::DegS2),
            (Family::ProbS1, Family::DegS1),
            (Family::ProbH, Family::HeteroS2),
            (Family::ProbG, Family::HeteroS1),
        ] {
            let a = prob_triangle(&rv, &lambda, pf, 7).unwrap();
            let b = triangle(df, &lambda, 7).unwrap();
            assert_eq!(a.rows(), b.rows(), "{pf}");
        }
        assert_eq!(prob_log(&rv, &lambda, 7).unwrap(), deg_log(&lambda, 7));
    }

    #[test]
    fn poisson_sum_of_two_is_poisson_of_double_rate() {
        let lambda = rat(1, 2);
        let a = RandomVariable::Poisson { alpha: int(2) };
        let b = RandomVariable::Poisson { alpha: int(4) };
        for n in 0..=6 {
            assert_eq!(
                sj_moment(&a, &lambda, 2, n).unwrap(),
                mgf_deg(&b, &lambda, n).unwrap().coeff_egf(n).unwrap()
            );
        }
    }

    #[test]
    fn sj_moment_edge_cases() {
        let rv = RandomVariable::Gamma {
            alpha: rat(3, 2),
            beta: int(2),
        };
        let lambda = rat(-1, 3);
        for n in 0..=5 {
            let expected = if n == 0 { int(1) } else { int(0) };
            assert_eq!(sj_moment(&rv, &lambda, 0, n).unwrap(), expected);
            assert_eq!(
                sj_moment(&rv, &lambda, 1, n).unwrap(),
                mgf_deg(&rv, &lambda, n).unwrap().coeff_egf(n).unwrap()
            );
        }
    }

    #[test]
    fn bernoulli_prob_log_closed_form() {
        let p = rat(1, 3);
        let lambda = rat(1, 2);
        let rv = RandomVariable::Bernoulli { p: p.clone() };
        let expected = deg_log(&lambda, 8).scale_var(&p.recip());
        assert_eq!(prob_log(&rv, &lambda, 8).unwrap(), expected);
    }

    #[test]
    fn poisson_prob_log_closed_form() {
        let alpha = int(2);
        let rv = RandomVariable::Poisson {
            alpha: alpha.clone(),
        };
        for lambda in [zero(), rat(1, 2)] {
            let inner = Series::var(8).log1p().unwrap().scale(&alpha.recip());
            let expected = deg_log(&lambda, 8).compose(&inner).unwrap();
            assert_eq!(prob_log(&rv, &lambda, 8).unwrap(), expected);
        }
    }

    #[test]
    fn prob_bernoulli_constant_term_is_inverse_mean() {
        for rv in RandomVariable::builtin() {
            let b = prob_order_numbers(
                &rv,
                &rat(1, 2),
                &int(1),
                &zero(),
                NumberFamily::Bernoulli,
                3,
            )
            .unwrap();
            assert_eq!(b.coeff_egf(0).unwrap(), rv.mean().recip(), "{rv}");
        }
    }

    #[test]
    fn non_integer_order_needs_unit_mean() {
        let rv = RandomVariable::Poisson { alpha: int(2) };
        let err = prob_order_numbers(
            &rv,
            &zero(),
            &rat(1, 2),
            &zero(),
            NumberFamily::Bernoulli,
            3,
        );
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
        let unit = RandomVariable::Poisson { alpha: int(1) };
        assert!(
            prob_order_numbers(&unit, &zero(), &rat(1, 2), &zero(), NumberFamily::Cauchy, 3)
                .is_ok()
        );
    }

    #[test]
    fn daehee_of_point_mass_at_lambda_zero() {
        let rv = RandomVariable::PointMass { c: int(1) };
        let d =
            prob_order_numbers(&rv, &zero(), &int(1), &zero(), NumberFamily::Daehee, 6).unwrap();
        for n in 0..=6usize {
            assert_eq!(
                d.coeff_egf(n).unwrap(),
                sign(n) * crate::rational::factorial_q(n) / int(n as i64 + 1)
            );
        }
    }

    #[test]
    fn schlomilch_diagonal_and_bernoulli() {
        let p = rat(1, 2);
        let lambda = rat(1, 3);
        let rv = RandomVariable::Bernoulli { p: p.clone() };
        let s1 = triangle(Family::DegS1, &lambda, 6).unwrap();
        for n in 0..=6usize {
            // diagonal: E[Y]^{-n}
            assert_eq!(
                schlomilch_s1(&rv, &lambda, n, n).unwrap(),
                powi(&p, -(n as i64))
            );
            for k in 0..=n {
                assert_eq!(
                    schlomilch_s1(&rv, &lambda, n, k).unwrap(),
                    powi(&p, -(n as i64)) * s1.get(n, k)
                );
            }
        }
        let unit = RandomVariable::PointMass { c: int(1) };
        assert_eq!(schlomilch_s1(&unit, &lambda, 5, 5).unwrap(), int(1));
    }
}
