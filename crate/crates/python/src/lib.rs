//! Python bindings. Exact values cross the boundary as `fractions.Fraction`;
//! rational arguments may be given as `int`, `Fraction` or text like `"1/3"`.

use num_bigint::BigInt;
use pyo3::exceptions::{PyTypeError, PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::PyList;

use probstir::probabilistic::{
    self, closed_form::ClosedFamily, prob_log, prob_order_numbers, prob_triangle, sj_moment,
};
use probstir::rational::{parse_rational, to_exact_string};
use probstir::series::lagrange_extract;
use probstir::special::{self, NumberFamily};
use probstir::verify::{self, SuiteOptions};
use probstir::{DeltaSeries, Error, Family, LagrangeFormula, Rational};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::ZeroConstantTerm => PyZeroDivisionError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(text) = obj.extract::<String>() {
        return parse_rational(&text).map_err(to_py_err);
    }
    if let Ok(n) = obj.extract::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    if let (Ok(num), Ok(den)) = (obj.getattr("numerator"), obj.getattr("denominator")) {
        let num: BigInt = num.extract()?;
        let den: BigInt = den.extract()?;
        if den == BigInt::from(0) {
            return Err(PyZeroDivisionError::new_err("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    Err(PyTypeError::new_err(
        "expected an int, a fractions.Fraction or a string like \"1/3\"",
    ))
}

fn opt_rational(obj: Option<&Bound<'_, PyAny>>) -> PyResult<Rational> {
    obj.map(rational)
        .transpose()
        .map(|q| q.unwrap_or_else(|| Rational::from_integer(0.into())))
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((q.numer().clone(), q.denom().clone()))
}

fn fractions<'py>(py: Python<'py>, qs: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = qs
        .iter()
        .map(|q| fraction(py, q))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A distribution with exact rational parameters, e.g.
/// `RandomVariable("binomial:m=5,p=1/3")` or `RandomVariable("custom:moments=1,2,6")`.
#[pyclass(name = "RandomVariable", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRandomVariable {
    inner: probstir::RandomVariable,
}

#[pymethods]
impl PyRandomVariable {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyRandomVariable {
            inner: spec.parse().map_err(to_py_err)?,
        })
    }

    /// The nine named distributions with their default parameters.
    #[staticmethod]
    fn builtin() -> Vec<PyRandomVariable> {
        probstir::RandomVariable::builtin()
            .into_iter()
            .map(|inner| PyRandomVariable { inner })
            .collect()
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    #[getter]
    fn params(&self) -> Vec<(&'static str, String)> {
        self.inner.params()
    }

    fn mean<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.mean())
    }

    /// `E[Y^n]`.
    fn moment<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
        fraction(
            py,
            &probabilistic::moment(&self.inner, n).map_err(to_py_err)?,
        )
    }

    /// EGF coefficients of `E[e_lambda^Y(t)]` up to `t^order`.
    #[pyo3(signature = (order, lam=None))]
    fn mgf<'py>(
        &self,
        py: Python<'py>,
        order: usize,
        lam: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyList>> {
        let s =
            probabilistic::mgf_deg(&self.inner, &opt_rational(lam)?, order).map_err(to_py_err)?;
        fractions(py, &s.egf_coeffs())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RandomVariable({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .cast::<PyRandomVariable>()
            .map(|o| o.get().inner == self.inner)
            .unwrap_or(false)
    }
}

fn random_variable(obj: &Bound<'_, PyAny>) -> PyResult<probstir::RandomVariable> {
    if let Ok(rv) = obj.cast::<PyRandomVariable>() {
        return Ok(rv.get().inner.clone());
    }
    let text: String = obj
        .extract()
        .map_err(|_| PyTypeError::new_err("expected a RandomVariable or a spec string"))?;
    text.parse().map_err(to_py_err)
}

/// Truncated power series with rational coefficients, stored raw.
#[pyclass(name = "Series", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySeries {
    inner: probstir::Series,
}

#[pymethods]
impl PySeries {
    /// From raw coefficients `c_0, ..., c_N`; the order is `N`.
    #[new]
    fn new(coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let coeffs = coeffs.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(PyValueError::new_err(
                "a series needs at least one coefficient",
            ));
        }
        Ok(PySeries {
            inner: probstir::Series::from_coeffs(coeffs),
        })
    }

    /// From EGF values `a_n`, i.e. `sum a_n t^n / n!`.
    #[staticmethod]
    fn from_egf(values: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let values = values.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        if values.is_empty() {
            return Err(PyValueError::new_err(
                "a series needs at least one coefficient",
            ));
        }
        Ok(PySeries {
            inner: probstir::Series::from_egf(&values),
        })
    }

    #[staticmethod]
    fn var(order: usize) -> Self {
        PySeries {
            inner: probstir::Series::var(order),
        }
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn coeffs<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, self.inner.coeffs())
    }

    fn egf_coeffs<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, &self.inner.egf_coeffs())
    }

    fn __add__(&self, other: &PySeries) -> PyResult<PySeries> {
        wrap(self.inner.add(&other.inner))
    }

    fn __sub__(&self, other: &PySeries) -> PyResult<PySeries> {
        wrap(self.inner.sub(&other.inner))
    }

    fn __mul__(&self, other: &PySeries) -> PyResult<PySeries> {
        wrap(self.inner.mul(&other.inner))
    }

    fn __truediv__(&self, other: &PySeries) -> PyResult<PySeries> {
        wrap(self.inner.div(&other.inner))
    }

    fn __neg__(&self) -> PySeries {
        PySeries {
            inner: self.inner.neg(),
        }
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .cast::<PySeries>()
            .map(|o| o.get().inner == self.inner)
            .unwrap_or(false)
    }

    /// `self(inner(t))`; `inner` must have zero constant term.
    fn compose(&self, inner: &PySeries) -> PyResult<PySeries> {
        wrap(self.inner.compose(&inner.inner))
    }

    /// Compositional inverse of a delta series.
    fn revert(&self) -> PyResult<PySeries> {
        let d = DeltaSeries::new(self.inner.clone()).map_err(to_py_err)?;
        Ok(PySeries {
            inner: d.revert().into_series(),
        })
    }

    fn exp(&self) -> PyResult<PySeries> {
        wrap(self.inner.exp())
    }

    fn log1p(&self) -> PyResult<PySeries> {
        wrap(self.inner.log1p())
    }

    fn pow(&self, gamma: &Bound<'_, PyAny>) -> PyResult<PySeries> {
        wrap(self.inner.pow(&rational(gamma)?))
    }

    /// Coefficient through Lagrange inversion of `self` (a delta series),
    /// without reverting: formula "A" gives `[t^n] g(fbar)`, "B" gives
    /// `[t^n] fbar^k`, "C" gives `[t^n] fbar`.
    #[pyo3(signature = (formula, n, k=1, g=None))]
    fn lagrange<'py>(
        &self,
        py: Python<'py>,
        formula: &str,
        n: usize,
        k: usize,
        g: Option<&PySeries>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let f = DeltaSeries::new(self.inner.clone()).map_err(to_py_err)?;
        let formula = match formula.to_ascii_uppercase().as_str() {
            "A" => LagrangeFormula::A,
            "B" => LagrangeFormula::B,
            "C" => LagrangeFormula::C,
            other => return Err(PyValueError::new_err(format!("unknown formula {other:?}"))),
        };
        let zero = probstir::Series::zero(self.inner.order());
        let g = g.map(|s| &s.inner).unwrap_or(&zero);
        fraction(
            py,
            &lagrange_extract(g, &f, n, k, formula).map_err(to_py_err)?,
        )
    }

    fn __repr__(&self) -> String {
        let body: Vec<String> = self.inner.coeffs().iter().map(to_exact_string).collect();
        format!("Series([{}])", body.join(", "))
    }
}

fn wrap(r: probstir::Result<probstir::Series>) -> PyResult<PySeries> {
    r.map(|inner| PySeries { inner }).map_err(to_py_err)
}

/// A lower-triangular table `T(n,k)`, `0 <= k <= n <= nmax`.
#[pyclass(name = "Triangle", frozen, skip_from_py_object)]
struct PyTriangle {
    inner: probstir::Triangle,
}

#[pymethods]
impl PyTriangle {
    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().tag()
    }

    #[getter]
    fn nmax(&self) -> usize {
        self.inner.nmax()
    }

    #[getter]
    fn lam<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.lambda())
    }

    #[getter]
    fn rv(&self) -> Option<PyRandomVariable> {
        self.inner
            .rv()
            .map(|rv| PyRandomVariable { inner: rv.clone() })
    }

    fn get<'py>(&self, py: Python<'py>, n: usize, k: usize) -> PyResult<Bound<'py, PyAny>> {
        if n > self.inner.nmax() {
            return Err(PyValueError::new_err(format!(
                "row {n} is beyond nmax = {}",
                self.inner.nmax()
            )));
        }
        fraction(py, &self.inner.get(n, k))
    }

    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyList>>> {
        self.inner.rows().iter().map(|r| fractions(py, r)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.nmax() + 1
    }

    fn __repr__(&self) -> String {
        format!(
            "Triangle(family={:?}, lambda={}, nmax={})",
            self.inner.family().tag(),
            to_exact_string(self.inner.lambda()),
            self.inner.nmax()
        )
    }
}

/// Builds a triangle. Families: s1, s2, s1-deg, s2-deg, lah, hetero-s1,
/// hetero-s2, and (with `rv`) prob-s1, prob-s2, prob-g, prob-h.
#[pyfunction]
#[pyo3(signature = (family, nmax, lam=None, rv=None))]
fn triangle(
    family: &str,
    nmax: usize,
    lam: Option<&Bound<'_, PyAny>>,
    rv: Option<&Bound<'_, PyAny>>,
) -> PyResult<PyTriangle> {
    let family: Family = family.parse().map_err(to_py_err)?;
    let lambda = opt_rational(lam)?;
    let inner = match (family.is_probabilistic(), rv) {
        (true, Some(rv)) => prob_triangle(&random_variable(rv)?, &lambda, family, nmax),
        (true, None) => return Err(PyValueError::new_err(format!("{family} needs rv"))),
        (false, None) => special::triangle(family, &lambda, nmax),
        (false, Some(_)) => {
            return Err(PyValueError::new_err(format!("{family} does not take rv")))
        }
    }
    .map_err(to_py_err)?;
    Ok(PyTriangle { inner })
}

/// EGF coefficients of `prob-log`, `daehee`, `cauchy` or `bernoulli`
/// series; without `rv` the deterministic series.
#[pyfunction]
#[pyo3(signature = (kind, order, rv=None, lam=None, gamma=None, x=None))]
fn series<'py>(
    py: Python<'py>,
    kind: &str,
    order: usize,
    rv: Option<&Bound<'py, PyAny>>,
    lam: Option<&Bound<'py, PyAny>>,
    gamma: Option<&Bound<'py, PyAny>>,
    x: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyList>> {
    let rv = rv.map(random_variable).transpose()?;
    let lambda = opt_rational(lam)?;
    let gamma = gamma
        .map(rational)
        .transpose()?
        .unwrap_or_else(|| Rational::from_integer(1.into()));
    let x = opt_rational(x)?;
    let s = if kind == "prob-log" {
        match &rv {
            Some(rv) => prob_log(rv, &lambda, order),
            None => special::deg_log(&lambda, order).truncate(order),
        }
    } else {
        let family: NumberFamily = kind.parse().map_err(to_py_err)?;
        match &rv {
            Some(rv) => prob_order_numbers(rv, &lambda, &gamma, &x, family, order),
            None => special::order_numbers(&lambda, &gamma, &x, family, order),
        }
    }
    .map_err(to_py_err)?;
    fractions(py, &s.egf_coeffs())
}

/// `E[(S_j)_{n,lambda}]` for the sum of `j` independent copies of `rv`.
#[pyfunction]
#[pyo3(name = "sj_moment", signature = (rv, j, n, lam=None))]
fn py_sj_moment<'py>(
    py: Python<'py>,
    rv: &Bound<'py, PyAny>,
    j: usize,
    n: usize,
    lam: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let v = sj_moment(&random_variable(rv)?, &opt_rational(lam)?, j, n).map_err(to_py_err)?;
    fraction(py, &v)
}

/// Closed-form entry `(n, k)` for `family` in s2, s1, s1-derived, log.
/// Returns `(value, exact)`; inexact values are truncated sums.
#[pyfunction]
#[pyo3(signature = (rv, family, n, k, lam=None, depth=probabilistic::closed_form::DEFAULT_DEPTH))]
fn closed_form<'py>(
    py: Python<'py>,
    rv: &Bound<'py, PyAny>,
    family: &str,
    n: usize,
    k: usize,
    lam: Option<&Bound<'py, PyAny>>,
    depth: usize,
) -> PyResult<(Bound<'py, PyAny>, bool)> {
    let family: ClosedFamily = family.parse().map_err(to_py_err)?;
    let v = probabilistic::closed_form(
        &random_variable(rv)?,
        &opt_rational(lam)?,
        family,
        n,
        k,
        depth,
    )
    .map_err(to_py_err)?;
    Ok((fraction(py, v.value())?, v.is_exact()))
}

/// Runs the identity suites and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (rvs=None, lambdas=None, nmax=10, gammas=None))]
fn verify_identities<'py>(
    py: Python<'py>,
    rvs: Option<Vec<Bound<'py, PyAny>>>,
    lambdas: Option<Vec<Bound<'py, PyAny>>>,
    nmax: usize,
    gammas: Option<Vec<i64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let rvs = rvs
        .unwrap_or_default()
        .iter()
        .map(random_variable)
        .collect::<PyResult<Vec<_>>>()?;
    for rv in &rvs {
        rv.require_nonzero_mean().map_err(to_py_err)?;
    }
    let lambdas = match lambdas {
        Some(ls) => ls.iter().map(rational).collect::<PyResult<Vec<_>>>()?,
        None => verify::default_lambdas(),
    };
    let opts = SuiteOptions {
        gammas: gammas.unwrap_or_else(verify::default_gammas),
        ..SuiteOptions::default()
    };
    let report = py.detach(|| verify::grid_suite(&rvs, &lambdas, nmax, &opts));
    let text = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = json_to_py(py, &text)?;
    out.set_item("passed", report.passed())?;
    Ok(out)
}

/// Monte Carlo estimate of `E[(S_j)_{n,lambda}]`; returns a dict with the
/// estimate, standard error, exact value and z-score.
#[pyfunction]
#[pyo3(signature = (rv, n, j, samples=1_000_000, seed=0, lam=None))]
fn mc_check<'py>(
    py: Python<'py>,
    rv: &Bound<'py, PyAny>,
    n: usize,
    j: usize,
    samples: u64,
    seed: u64,
    lam: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let rv = random_variable(rv)?;
    let lambda = opt_rational(lam)?;
    let est = py
        .detach(|| verify::mc_check(&rv, &lambda, n, j, samples, seed))
        .map_err(to_py_err)?;
    let text = serde_json::to_string(&est).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = json_to_py(py, &text)?;
    out.set_item("within_band", est.within_band())?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "probstir")]
fn probstir_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRandomVariable>()?;
    m.add_class::<PySeries>()?;
    m.add_class::<PyTriangle>()?;
    m.add_function(wrap_pyfunction!(triangle, m)?)?;
    m.add_function(wrap_pyfunction!(series, m)?)?;
    m.add_function(wrap_pyfunction!(py_sj_moment, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(verify_identities, m)?)?;
    m.add_function(wrap_pyfunction!(mc_check, m)?)?;
    Ok(())
}
