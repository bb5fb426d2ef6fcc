//! Truncated formal power series over exact rationals.
//!
//! A [`Series`] of order `N` stores `c_0..c_N` and stands for
//! `sum c_n t^n mod t^(N+1)`. Every binary operation requires both operands
//! to have the same order; nothing is silently re-truncated.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{as_i64, factorial_q, int, powi, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Rational>,
}

/// Ring operations accepted by [`Series::arith`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arith {
    Add,
    Sub,
    Mul,
    Div,
    Scale(Rational),
}

/// Transcendental operations accepted by [`Series::transcend`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transcend {
    Exp,
    Log1p,
    Pow(Rational),
}

fn mul_trunc(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

impl Series {
    /// Builds a series from raw coefficients; the order is `coeffs.len() - 1`.
    ///
    /// Panics when `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least one coefficient"
        );
        Series { coeffs }
    }

    /// Builds `sum a_n t^n / n!` from EGF values `a_0..a_N`.
    pub fn from_egf(values: &[Rational]) -> Self {
        Self::from_coeffs(
            values
                .iter()
                .enumerate()
                .map(|(n, a)| a / factorial_q(n))
                .collect(),
        )
    }

    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// `c t^k` at the given order (zero when `k > order`).
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The formal variable `t`.
    pub fn var(order: usize) -> Self {
        Self::monomial(Rational::one(), 1, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    /// Raw coefficient `c_n`.
    pub fn coeff(&self, n: usize) -> Result<&Rational> {
        self.coeffs.get(n).ok_or(Error::IndexOutOfRange {
            index: n,
            order: self.order(),
        })
    }

    /// EGF coefficient `a_n = n! c_n`.
    pub fn coeff_egf(&self, n: usize) -> Result<Rational> {
        Ok(self.coeff(n)? * factorial_q(n))
    }

    pub fn egf_coeffs(&self) -> Vec<Rational> {
        let mut fact = Rational::one();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n > 0 {
                    fact *= int(n as i64);
                }
                c * &fact
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_order(&self, other: &Series) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// Dispatches one of the ring operations. `Scale` ignores `other`
    /// except for the order check.
    pub fn arith(&self, other: &Series, op: Arith) -> Result<Series> {
        match op {
            Arith::Add => self.add(other),
            Arith::Sub => self.sub(other),
            Arith::Mul => self.mul(other),
            Arith::Div => self.div(other),
            Arith::Scale(c) => {
                self.check_order(other)?;
                Ok(self.scale(&c))
            }
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        Ok(Series {
            coeffs: mul_trunc(&self.coeffs, &other.coeffs, self.coeffs.len()),
        })
    }

    pub fn div(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        let g0 = other.constant_term();
        if g0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = g0.recip();
        let len = self.coeffs.len();
        let mut q: Vec<Rational> = Vec::with_capacity(len);
        for n in 0..len {
            let mut acc = self.coeffs[n].clone();
            for k in 1..=n {
                if !other.coeffs[k].is_zero() {
                    acc -= &other.coeffs[k] * &q[n - k];
                }
            }
            q.push(acc * &inv0);
        }
        Ok(Series { coeffs: q })
    }

    pub fn recip(&self) -> Result<Series> {
        Series::one(self.order()).div(self)
    }

    pub fn scale(&self, c: &Rational) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn add_constant(&self, c: &Rational) -> Series {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    /// Substitutes `t -> c t`.
    pub fn scale_var(&self, c: &Rational) -> Series {
        let mut pow = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a * &pow;
                pow *= c;
                v
            })
            .collect();
        Series { coeffs }
    }

    /// Substitutes `t -> -t`.
    pub fn negate_var(&self) -> Series {
        self.scale_var(&-Rational::one())
    }

    /// Drops coefficients above `order`. Asking for a larger order is an error.
    pub fn truncate(&self, order: usize) -> Result<Series> {
        if order > self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: order,
            });
        }
        Ok(Series {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// Pads with zero coefficients up to `order`. Only sound when the
    /// caller knows the padded coefficients are multiplied away.
    pub(crate) fn pad(&self, order: usize) -> Series {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(self.order()) + 1, Rational::zero());
        Series { coeffs }
    }

    /// Divides by `t^k`; the first `k` coefficients must vanish. The result
    /// has order `N - k`.
    pub fn shift_down(&self, k: usize) -> Result<Series> {
        if k > self.order() {
            return Err(Error::Precondition(format!(
                "cannot divide a series of order {} by t^{k}",
                self.order()
            )));
        }
        if let Some(i) = self.coeffs[..k].iter().position(|c| !c.is_zero()) {
            return Err(Error::Precondition(format!(
                "division by t^{k} needs c_{i} = 0"
            )));
        }
        Ok(Series {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Multiplies by `t^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Series {
        let mut s = Series::zero(self.order());
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k <= self.order() {
                s.coeffs[i + k] = c.clone();
            }
        }
        s
    }

    /// Formal derivative; the result has order `N - 1` (order 0 gives the
    /// zero series of order 0).
    pub fn derivative(&self) -> Series {
        if self.order() == 0 {
            return Series::zero(0);
        }
        Series {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c * int(n as i64))
                .collect(),
        }
    }

    /// Formal antiderivative with zero constant term; order `N + 1`.
    pub fn integral(&self) -> Series {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c / int(n as i64 + 1)),
        );
        Series { coeffs }
    }

    pub fn transcend(&self, kind: Transcend) -> Result<Series> {
        match kind {
            Transcend::Exp => self.exp(),
            Transcend::Log1p => self.log1p(),
            Transcend::Pow(g) => self.pow(&g),
        }
    }

    /// `exp(f)` for `c_0 = 0`.
    pub fn exp(&self) -> Result<Series> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonZeroConstantTerm);
        }
        let len = self.coeffs.len();
        let mut g: Vec<Rational> = Vec::with_capacity(len);
        g.push(Rational::one());
        for n in 1..len {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * int(k as i64) * &g[n - k];
                }
            }
            g.push(acc / int(n as i64));
        }
        Ok(Series { coeffs: g })
    }

    /// `log(1 + f)` for `c_0 = 0`.
    pub fn log1p(&self) -> Result<Series> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonZeroConstantTerm);
        }
        self.add_constant(&Rational::one()).ln()
    }

    /// `log(f)` for `c_0 = 1`.
    pub fn ln(&self) -> Result<Series> {
        if !self.constant_term().is_one() {
            return Err(Error::Precondition("log needs a unit constant term".into()));
        }
        let len = self.coeffs.len();
        let mut h = vec![Rational::zero(); len];
        for n in 1..len {
            let mut acc = &self.coeffs[n] * int(n as i64);
            for k in 1..n {
                if !self.coeffs[n - k].is_zero() {
                    acc -= &h[k] * int(k as i64) * &self.coeffs[n - k];
                }
            }
            h[n] = acc / int(n as i64);
        }
        Ok(Series { coeffs: h })
    }

    /// Integer power; negative exponents need a nonzero constant term.
    pub fn powi(&self, e: i64) -> Result<Series> {
        if e < 0 {
            return self.recip()?.powi(-e);
        }
        let mut result = Series::one(self.order());
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `f^gamma` for rational `gamma`. Integer exponents accept any nonzero
    /// constant term (and zero for `gamma >= 0`); other exponents need
    /// `c_0 = 1`, since `c_0^gamma` would otherwise be irrational in general.
    pub fn pow(&self, gamma: &Rational) -> Result<Series> {
        let c0 = self.constant_term();
        let g0 = if let Some(e) = as_i64(gamma) {
            if c0.is_zero() {
                return self.powi(e);
            }
            powi(c0, e)
        } else if c0.is_one() {
            Rational::one()
        } else {
            return Err(Error::IrrationalPower {
                exponent: gamma.to_string(),
                constant: c0.to_string(),
            });
        };
        // f g' = gamma f' g, solved coefficient by coefficient.
        let len = self.coeffs.len();
        let inv0 = c0.recip();
        let mut g: Vec<Rational> = Vec::with_capacity(len);
        g.push(g0);
        for n in 1..len {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                let w = gamma * int(k as i64) - int((n - k) as i64);
                acc += w * &self.coeffs[k] * &g[n - k];
            }
            g.push(acc * &inv0 / int(n as i64));
        }
        Ok(Series { coeffs: g })
    }

    /// `f(g(t))` by Horner evaluation; `g` must have zero constant term.
    pub fn compose(&self, inner: &Series) -> Result<Series> {
        self.check_order(inner)?;
        if !inner.constant_term().is_zero() {
            return Err(Error::NonZeroConstantTerm);
        }
        let n = self.order();
        let mut acc = Series::constant(self.coeffs[n].clone(), n);
        for i in (0..n).rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] += &self.coeffs[i];
        }
        Ok(acc)
    }
}

impl std::fmt::Display for Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

/// A series with `c_0 = 0` and `c_1 != 0`; these are exactly the series
/// that admit a compositional inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSeries(Series);

impl DeltaSeries {
    pub fn new(series: Series) -> Result<Self> {
        if series.order() < 1 {
            return Err(Error::NotDelta("order must be at least 1"));
        }
        if !series.coeffs[0].is_zero() {
            return Err(Error::NotDelta("constant term is nonzero"));
        }
        if series.coeffs[1].is_zero() {
            return Err(Error::NotDelta("linear coefficient is zero"));
        }
        Ok(DeltaSeries(series))
    }

    pub fn series(&self) -> &Series {
        &self.0
    }

    pub fn into_series(self) -> Series {
        self.0
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    /// Compositional inverse, by Newton iteration on `f(g) = t` with the
    /// working precision doubled each round.
    pub fn revert(&self) -> DeltaSeries {
        let f = &self.0;
        let order = f.order();
        let fprime = f.derivative().pad(order);
        let mut g = Series::monomial(f.coeffs[1].recip(), 1, order);
        let mut prec = 1;
        while prec < order {
            prec = (2 * prec).min(order);
            let ft = f.truncate(prec).expect("prec <= order");
            let fpt = fprime.truncate(prec).expect("prec <= order");
            let gt = g.truncate(prec).expect("prec <= order");
            let residual = ft
                .compose(&gt)
                .and_then(|s| s.sub(&Series::var(prec)))
                .expect("orders agree");
            let slope = fpt.compose(&gt).expect("orders agree");
            let step = residual
                .div(&slope)
                .expect("slope has unit-like constant term");
            g = gt.sub(&step).expect("orders agree").pad(order);
        }
        DeltaSeries(g)
    }
}

/// Which Lagrange inversion extractor to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LagrangeFormula {
    /// `[t^n] g(fbar(t)) = (1/n) [t^(n-1)] g'(t) (t/f(t))^n`
    A,
    /// `[t^n] fbar(t)^k = (k/n) [t^(n-k)] (t/f(t))^n`
    B,
    /// `[t^n] fbar(t) = (1/n) [t^(n-1)] (t/f(t))^n`
    C,
}

/// `(t / f(t))^n` truncated at `t^deg`, read from `f` alone.
fn t_over_f_power(f: &DeltaSeries, n: usize, deg: usize) -> Result<Series> {
    let ratio = f.series().shift_down(1)?.truncate(deg)?;
    ratio.recip()?.powi(n as i64)
}

/// Raw coefficient extracted through one of the Lagrange inversion
/// formulas, using only `f` (and `g` for formula A); never reverts.
pub fn lagrange_extract(
    g: &Series,
    f: &DeltaSeries,
    n: usize,
    k: usize,
    formula: LagrangeFormula,
) -> Result<Rational> {
    if f.order() < n {
        return Err(Error::IndexOutOfRange {
            index: n,
            order: f.order(),
        });
    }
    match formula {
        LagrangeFormula::A => {
            if g.order() < n {
                return Err(Error::IndexOutOfRange {
                    index: n,
                    order: g.order(),
                });
            }
            if n == 0 {
                return Ok(g.constant_term().clone());
            }
            let p = t_over_f_power(f, n, n - 1)?;
            let dg = g.derivative().truncate(n - 1)?;
            let prod = dg.mul(&p)?;
            Ok(prod.coeff(n - 1)? / int(n as i64))
        }
        LagrangeFormula::B => {
            if k < 1 || n < k {
                return Err(Error::Precondition(format!(
                    "formula B needs 1 <= k <= n, got n={n}, k={k}"
                )));
            }
            let p = t_over_f_power(f, n, n - k)?;
            Ok(p.coeff(n - k)? * int(k as i64) / int(n as i64))
        }
        LagrangeFormula::C => {
            if n < 1 {
                return Err(Error::Precondition("formula C needs n >= 1".into()));
            }
            let p = t_over_f_power(f, n, n - 1)?;
            Ok(p.coeff(n - 1)? / int(n as i64))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn s(v: &[i64]) -> Series {
        Series::from_coeffs(v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn square_of_one_plus_t() {
        let f = s(&[1, 1, 0, 0]);
        assert_eq!(f.mul(&f).unwrap(), s(&[1, 2, 1, 0]));
    }

    #[test]
    fn geometric_series() {
        let q = Series::one(6).div(&s(&[1, -1, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(q, s(&[1; 7]));
    }

    #[test]
    fn additive_identity() {
        let f = s(&[3, -1, 4, 1]);
        assert_eq!(f.add(&Series::zero(3)).unwrap(), f);
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let e = s(&[1, 1]).add(&s(&[1, 1, 1])).unwrap_err();
        assert_eq!(e, Error::OrderMismatch { left: 1, right: 2 });
        assert!(s(&[1, 1]).mul(&s(&[1])).is_err());
    }

    #[test]
    fn division_by_zero_constant_term() {
        assert_eq!(
            s(&[1, 1]).div(&s(&[0, 1])).unwrap_err(),
            Error::ZeroConstantTerm
        );
    }

    #[test]
    fn compose_polynomials() {
        let f = s(&[0, 0, 1, 0, 0]);
        let g = s(&[0, 1, 1, 0, 0]);
        assert_eq!(f.compose(&g).unwrap(), s(&[0, 0, 1, 2, 1]));
        let h = s(&[2, -1, 5, 7, 1]);
        assert_eq!(h.compose(&Series::var(4)).unwrap(), h);
        assert_eq!(
            f.compose(&s(&[1, 1, 0, 0, 0])).unwrap_err(),
            Error::NonZeroConstantTerm
        );
    }

    #[test]
    fn log_of_expm1_is_identity() {
        let n = 12;
        let expm1 = Series::var(n).exp().unwrap().add_constant(&int(-1));
        let log = Series::var(n).log1p().unwrap();
        assert_eq!(log.compose(&expm1).unwrap(), Series::var(n));
        assert_eq!(expm1.log1p().unwrap(), Series::var(n));
    }

    #[test]
    fn log1p_egf_coefficients() {
        let log = Series::var(8).log1p().unwrap();
        assert_eq!(log.coeff_egf(4).unwrap(), int(-6));
        for n in 1..=8usize {
            let expected = crate::rational::sign(n - 1) * factorial_q(n - 1);
            assert_eq!(log.coeff_egf(n).unwrap(), expected);
        }
    }

    #[test]
    fn exp_egf_is_all_ones() {
        let e = Series::var(10).exp().unwrap();
        assert!(e.egf_coeffs().iter().all(|c| c.is_one()));
        assert!(Series::zero(5).coeff_egf(3).unwrap().is_zero());
        assert!(e.coeff_egf(11).is_err());
    }

    #[test]
    fn square_root_squares_back() {
        let f = s(&[1, 1]).pad(16);
        let root = f.pow(&rat(1, 2)).unwrap();
        assert_eq!(root.mul(&root).unwrap(), f);
    }

    #[test]
    fn pow_rejects_irrational_results() {
        let f = s(&[2, 1, 0]);
        assert!(matches!(
            f.pow(&rat(1, 2)),
            Err(Error::IrrationalPower { .. })
        ));
        // Integer powers of a non-unit constant term are fine.
        let cube = f.pow(&int(3)).unwrap();
        assert_eq!(cube, f.mul(&f).unwrap().mul(&f).unwrap());
        let inv = f.pow(&int(-1)).unwrap();
        assert_eq!(inv.mul(&f).unwrap(), Series::one(2));
    }

    #[test]
    fn revert_identity_and_mobius() {
        let t = DeltaSeries::new(Series::var(9)).unwrap();
        assert_eq!(t.revert(), t);
        // t/(1-t) reverts to t/(1+t).
        let n = 16;
        let f = Series::var(n).div(&s(&[1, -1]).pad(n)).unwrap();
        let g = Series::var(n).div(&s(&[1, 1]).pad(n)).unwrap();
        let fd = DeltaSeries::new(f.clone()).unwrap();
        assert_eq!(fd.revert().series(), &g);
        assert_eq!(f.compose(&g).unwrap(), Series::var(n));
        assert_eq!(g.compose(&f).unwrap(), Series::var(n));
    }

    #[test]
    fn delta_validation() {
        assert!(DeltaSeries::new(s(&[1, 1, 0])).is_err());
        assert!(DeltaSeries::new(s(&[0, 0, 1])).is_err());
        assert!(DeltaSeries::new(s(&[0])).is_err());
    }

    #[test]
    fn lagrange_with_identity_reversion() {
        let g = s(&[5, -2, 3, 7, 11]);
        let t = DeltaSeries::new(Series::var(4)).unwrap();
        for n in 0..=4 {
            let v = lagrange_extract(&g, &t, n, 0, LagrangeFormula::A).unwrap();
            assert_eq!(&v, g.coeff(n).unwrap());
        }
    }

    #[test]
    fn lagrange_preconditions() {
        let t = DeltaSeries::new(Series::var(4)).unwrap();
        let g = Series::one(4);
        assert!(lagrange_extract(&g, &t, 2, 0, LagrangeFormula::B).is_err());
        assert!(lagrange_extract(&g, &t, 2, 3, LagrangeFormula::B).is_err());
        assert!(lagrange_extract(&g, &t, 0, 0, LagrangeFormula::C).is_err());
        assert!(lagrange_extract(&g, &t, 5, 1, LagrangeFormula::C).is_err());
    }

    #[test]
    fn shifts_and_truncation() {
        let f = s(&[0, 0, 3, 4]);
        assert_eq!(f.shift_down(2).unwrap(), s(&[3, 4]));
        assert!(f.shift_down(3).is_err());
        assert_eq!(s(&[1, 2, 3]).shift_up(1), s(&[0, 1, 2]));
        assert_eq!(s(&[1, 2, 3]).truncate(1).unwrap(), s(&[1, 2]));
        assert!(s(&[1, 2]).truncate(3).is_err());
        assert_eq!(s(&[1, 2, 3]).negate_var(), s(&[1, -2, 3]));
    }
}
