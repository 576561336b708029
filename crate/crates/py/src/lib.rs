//! Python bindings: contexts and elements, homomorphisms γ, λ(γ), the
//! a/J tables, the Lie rings `L_{i,m}(γ)` and the verification suites.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use pring_core as core;
use pring_core::survey::{table_rows, with_escalation};
use pring_core::{Error, JacobiCheck, TableKind};

create_exception!(pring, PringError, PyException);
create_exception!(pring, PrecisionExhausted, PringError);

fn err(e: Error) -> PyErr {
    match e {
        Error::PrecisionExhausted(_) => PrecisionExhausted::new_err(e.to_string()),
        Error::Parse(_) | Error::NotPrime(_) | Error::UnknownSuite(_) | Error::IndexOutOfRange { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PringError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PringError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Working context for `Z_p[θ]` with coefficients mod `p^N`.
#[pyclass(frozen, from_py_object, name = "PrimeCtx", module = "pring")]
#[derive(Clone)]
struct PyPrimeCtx(Arc<core::PrimeCtx>);

#[pymethods]
impl PyPrimeCtx {
    #[new]
    fn new(p: u64, precision: u32) -> PyResult<Self> {
        Ok(PyPrimeCtx(Arc::new(core::PrimeCtx::new(p, precision).map_err(err)?)))
    }

    /// Context with the default precision for level `i`.
    #[staticmethod]
    fn for_level(p: u64, i: i64) -> PyResult<Self> {
        Ok(PyPrimeCtx(Arc::new(core::PrimeCtx::for_level(p, i).map_err(err)?)))
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.0.precision()
    }

    #[getter]
    fn r(&self) -> u64 {
        self.0.r()
    }

    #[getter]
    fn omega(&self) -> u64 {
        self.0.omega()
    }

    fn kappa_pow(&self, e: i64) -> PyKElem {
        self.wrap(self.0.kappa_pow(e))
    }

    fn theta(&self) -> PyKElem {
        self.wrap(self.0.theta())
    }

    fn int(&self, x: i64) -> PyKElem {
        self.wrap(self.0.int(x))
    }

    /// `κ^shift · Σ c_t κ^t`.
    #[pyo3(signature = (coeffs, shift = 0))]
    fn element(&self, coeffs: Vec<i64>, shift: i64) -> PyResult<PyKElem> {
        Ok(self.wrap(self.0.from_coeffs(shift, &coeffs).map_err(err)?))
    }

    /// Eigenvector `e_x` of `σ_r` with eigenvalue `ω^x`.
    fn eigenvector(&self, x: i64) -> PyResult<PyKElem> {
        Ok(self.wrap(self.0.eigenvector(x).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("PrimeCtx(p={}, precision={})", self.0.p(), self.0.precision())
    }
}

impl PyPrimeCtx {
    fn wrap(&self, e: core::KElem) -> PyKElem {
        PyKElem { ctx: self.0.clone(), e }
    }
}

/// Element of `Q_p(θ)` known to a finite κ-adic precision.
#[pyclass(frozen, skip_from_py_object, name = "KElem", module = "pring")]
#[derive(Clone)]
struct PyKElem {
    ctx: Arc<core::PrimeCtx>,
    e: core::KElem,
}

impl PyKElem {
    fn lift(&self, f: impl FnOnce(&core::PrimeCtx) -> core::Result<core::KElem>) -> PyResult<PyKElem> {
        Ok(PyKElem { ctx: self.ctx.clone(), e: f(&self.ctx).map_err(err)? })
    }
}

#[pymethods]
impl PyKElem {
    #[getter]
    fn shift(&self) -> i64 {
        self.e.shift()
    }

    #[getter]
    fn coeffs(&self) -> Vec<u64> {
        self.e.coeffs().to_vec()
    }

    /// The element is known modulo `𝔭^abs_prec`.
    #[getter]
    fn abs_prec(&self) -> i64 {
        self.e.abs_prec()
    }

    /// κ-adic valuation, `None` when zero to known precision.
    fn val(&self) -> Option<i64> {
        self.ctx.val(&self.e).finite()
    }

    fn is_zero(&self) -> bool {
        self.ctx.is_zero(&self.e)
    }

    /// `σ_j : θ ↦ θ^j`.
    fn galois(&self, j: i64) -> PyResult<PyKElem> {
        self.lift(|c| c.galois(j, &self.e))
    }

    fn leading_coeff(&self, t: i64) -> PyResult<u64> {
        self.ctx.leading_coeff(&self.e, t).map_err(err)
    }

    fn __add__(&self, o: &PyKElem) -> PyResult<PyKElem> {
        self.lift(|c| c.add(&self.e, &o.e))
    }

    fn __sub__(&self, o: &PyKElem) -> PyResult<PyKElem> {
        self.lift(|c| c.sub(&self.e, &o.e))
    }

    fn __mul__(&self, o: &PyKElem) -> PyResult<PyKElem> {
        self.lift(|c| c.mul(&self.e, &o.e))
    }

    fn __neg__(&self) -> PyResult<PyKElem> {
        self.lift(|c| c.neg(&self.e))
    }

    fn __pow__(&self, e: i64, _modulo: Option<i64>) -> PyResult<PyKElem> {
        self.lift(|c| c.pow(&self.e, e))
    }

    /// Equality to the smaller known precision.
    fn __eq__(&self, o: &PyKElem) -> PyResult<bool> {
        self.ctx.eq_within(&self.e, &o.e).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("KElem(shift={}, coeffs={:?}, abs_prec={})", self.e.shift(), self.e.coeffs(), self.e.abs_prec())
    }
}

/// A surjective homomorphism `γ = Σ c_a ϑ_a` at level i.
#[pyclass(frozen, skip_from_py_object, name = "HomGamma", module = "pring")]
#[derive(Clone)]
struct PyHomGamma(core::HomGamma);

#[pymethods]
impl PyHomGamma {
    /// `ϑ_a` at level i, in a context sized for that level unless one is given.
    #[staticmethod]
    #[pyo3(signature = (p, a, i = 0, ctx = None))]
    fn theta_a(p: u64, a: i64, i: i64, ctx: Option<PyPrimeCtx>) -> PyResult<Self> {
        let ctx = match ctx {
            Some(c) => c.0,
            None => Arc::new(core::PrimeCtx::for_level(p, i).map_err(err)?),
        };
        Ok(PyHomGamma(core::HomGamma::theta_a(ctx, i, a).map_err(err)?))
    }

    /// `c·ϑ_a`.
    #[staticmethod]
    #[pyo3(signature = (a, c, i = 0))]
    fn one_param(a: i64, c: &PyKElem, i: i64) -> PyResult<Self> {
        Ok(PyHomGamma(core::HomGamma::one_param(c.ctx.clone(), i, a, c.e.clone()).map_err(err)?))
    }

    /// Random surjective γ at level i, reproducible from `seed`.
    #[staticmethod]
    #[pyo3(signature = (p, i, seed))]
    fn random(p: u64, i: i64, seed: u64) -> PyResult<Self> {
        let ctx = Arc::new(core::PrimeCtx::for_level(p, i).map_err(err)?);
        let sampler = core::GammaSampler::new(ctx, i).map_err(err)?;
        Ok(PyHomGamma(sampler.sample(&mut core::rng_from_seed(seed)).map_err(err)?))
    }

    /// Parses the coefficient-form JSON used by the command line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: core::GammaFile = serde_json::from_str(text).map_err(|e| err(e.into()))?;
        let start = file.precision.max(core::padic::default_precision(file.p, file.i));
        // Keep the first context that carries γ without exhausting precision.
        let g = with_escalation(file.p, start, |ctx| {
            let g = core::HomGamma::from_file_in(ctx, &file)?;
            g.coeff_table()?;
            Ok(g)
        })
        .map_err(err)?;
        Ok(PyHomGamma(g))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_file()).expect("plain data serializes")
    }

    #[getter]
    fn ctx(&self) -> PyPrimeCtx {
        PyPrimeCtx(self.0.ctx_arc().clone())
    }

    #[getter]
    fn level(&self) -> i64 {
        self.0.level()
    }

    /// `min_a val(c_a)`.
    fn val(&self) -> i64 {
        self.0.val()
    }

    /// The offset ρ(γ).
    fn offset(&self) -> PyResult<i64> {
        self.0.offset().map_err(err)
    }

    fn eval(&self, x: &PyKElem, y: &PyKElem) -> PyResult<PyKElem> {
        Ok(PyKElem { ctx: x.ctx.clone(), e: self.0.eval(&x.e, &y.e).map_err(err)? })
    }

    /// Rows `a(j, k)` for `j, k` in the first `span` levels of the window.
    #[pyo3(signature = (span = None))]
    fn a_table(&self, span: Option<usize>) -> PyResult<Vec<Vec<u64>>> {
        self.table(TableKind::A, span)
    }

    /// Rows `J(j, j+1, l)`.
    #[pyo3(signature = (span = None))]
    fn j_table(&self, span: Option<usize>) -> PyResult<Vec<Vec<u64>>> {
        self.table(TableKind::J, span)
    }

    fn lambda_report(&self) -> PyResult<PyLambdaReport> {
        Ok(PyLambdaReport(core::lambda(&self.0).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("HomGamma({})", self.to_json())
    }
}

impl PyHomGamma {
    fn table(&self, kind: TableKind, span: Option<usize>) -> PyResult<Vec<Vec<u64>>> {
        let span = span.unwrap_or(self.0.d() as usize);
        Ok(table_rows(&self.0, kind, span).map_err(err)?.1)
    }
}

/// λ(γ) with its witness and certified bounds.
#[pyclass(frozen, name = "LambdaReport", module = "pring")]
struct PyLambdaReport(core::LambdaReport);

#[pymethods]
impl PyLambdaReport {
    #[getter]
    fn lambda_(&self) -> i64 {
        self.0.lambda
    }

    #[getter]
    fn rho(&self) -> i64 {
        self.0.rho
    }

    #[getter]
    fn v(&self) -> i64 {
        self.0.v
    }

    /// `λ - (3i + 13 - 2p)`.
    #[getter]
    fn y(&self) -> i64 {
        self.0.y_main
    }

    /// `λ - (3i + 3)`.
    #[getter]
    fn y_one_param(&self) -> i64 {
        self.0.y_one_param()
    }

    #[getter]
    fn witness(&self) -> (i64, i64, i64) {
        let [j, k, l] = self.0.witness;
        (j, k, l)
    }

    #[getter]
    fn bounds(&self) -> (i64, i64) {
        (self.0.lower_bound, self.0.upper_bound)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("LambdaReport(lambda={}, y={}, witness={:?})", self.0.lambda, self.0.y_main, self.0.witness)
    }
}

/// The finite Lie ring `L_{i,m}(γ) = 𝔭^i / 𝔭^m`.
#[pyclass(frozen, name = "LieRing", module = "pring")]
struct PyLieRing(core::LieRingPresentation);

#[pymethods]
impl PyLieRing {
    /// Builds at level `m`, by default `m = λ(γ)`.
    #[new]
    #[pyo3(signature = (gamma, m = None))]
    fn new(gamma: &PyHomGamma, m: Option<i64>) -> PyResult<Self> {
        let m = match m {
            Some(m) => m,
            None => core::lambda(&gamma.0).map_err(err)?.lambda,
        };
        Ok(PyLieRing(core::LieRingPresentation::build(&gamma.0, m).map_err(err)?))
    }

    #[getter]
    fn m(&self) -> i64 {
        self.0.m()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `o_j` with `g_j` of additive order `p^{o_j}`.
    #[getter]
    fn orders(&self) -> Vec<u32> {
        self.0.orders().to_vec()
    }

    /// `log_p |L|`.
    #[getter]
    fn order_exponent(&self) -> u32 {
        self.0.order_exponent()
    }

    fn structure_constant(&self, j: usize, k: usize) -> PyResult<Vec<u64>> {
        let n = self.0.dim();
        if j >= n || k >= n {
            return Err(PyValueError::new_err(format!("generator index out of range 0..{n}")));
        }
        Ok(self.0.structure_constant(j, k).0.clone())
    }

    /// Bracket of two coordinate vectors.
    fn bracket(&self, x: Vec<i64>, y: Vec<i64>) -> PyResult<Vec<u64>> {
        let n = self.0.dim();
        if x.len() != n || y.len() != n {
            return Err(PyValueError::new_err(format!("expected {n} coordinates")));
        }
        Ok(self.0.bracket(&self.0.elem(&x), &self.0.elem(&y)).0)
    }

    /// `None` when the Jacobi identity holds, else a failing generator triple.
    fn check_jacobi(&self) -> Option<(usize, usize, usize)> {
        match self.0.check_jacobi() {
            JacobiCheck::Pass => None,
            JacobiCheck::Fail([a, b, c]) => Some((a, b, c)),
        }
    }

    /// `(orders, class)`; class is `None` when the series stalls above zero.
    fn lower_central_series(&self) -> PyResult<(Vec<u32>, Option<usize>)> {
        let cs = self.0.lower_central_series().map_err(err)?;
        Ok((cs.orders, cs.class))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

/// Runs a verification suite; returns `{suite, trials, passed, failures}`.
#[pyfunction]
#[pyo3(signature = (suite, trials = 100, seed = 0))]
fn verify<'py>(py: Python<'py>, suite: &str, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let suite: core::Suite = suite.parse().map_err(err)?;
    let report = py.detach(|| core::verify(suite, trials, seed)).map_err(err)?;
    to_py(py, &report)
}

/// The constants `F_1, G_1, F_2, G_2` with their closed forms.
#[pyfunction]
fn fg_constants<'py>(py: Python<'py>, p: u64, a: i64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &core::fg_constants(p, a).map_err(err)?)
}

/// λ rows for `ϑ_a`, one per `(a, i)` with `i` in `levels`.
#[pyfunction]
#[pyo3(signature = (p, a, levels, jobs = None))]
fn survey<'py>(
    py: Python<'py>,
    p: u64,
    a: Vec<i64>,
    levels: Vec<i64>,
    jobs: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let tasks = core::survey::theta_tasks(p, &a, levels);
    let rows = py.detach(|| core::survey(&tasks, None, jobs)).map_err(err)?;
    to_py(py, &rows)
}

#[pymodule]
fn pring(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPrimeCtx>()?;
    m.add_class::<PyKElem>()?;
    m.add_class::<PyHomGamma>()?;
    m.add_class::<PyLambdaReport>()?;
    m.add_class::<PyLieRing>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(fg_constants, m)?)?;
    m.add_function(wrap_pyfunction!(survey, m)?)?;
    m.add("PringError", m.py().get_type::<PringError>())?;
    m.add("PrecisionExhausted", m.py().get_type::<PrecisionExhausted>())?;
    Ok(())
}
