//! Python bindings: grids, weights, measures, the embedding verdict and the
//! operator classifiers. Errors surface as `fock_summing_py.FockError`.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use fock_summing::grammar::{self, MeasureContext};
use fock_summing::measures::Tri;
use fock_summing::operators::{self, CompositionSymbol, OperatorReport};
use fock_summing::weights::Membership;
use fock_summing::{cli, fock, oracle, summing, weights};
use fock_summing::{AffineSymbol, Atom, Complex64, PolynomialSymbol};

create_exception!(
    fock_summing_py,
    FockError,
    PyValueError,
    "Domain, grid, parse or quadrature failure."
);

fn err(e: fock_summing::FockError) -> PyErr {
    FockError::new_err(e.to_string())
}

fn tri(t: Tri) -> &'static str {
    match t {
        Tri::True => "true",
        Tri::False => "false",
        Tri::Inconclusive => "inconclusive",
    }
}

/// Quadrature step, truncation radius and lattice window.
#[pyclass(name = "GridSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyGridSpec {
    inner: fock_summing::GridSpec,
}

#[pymethods]
impl PyGridSpec {
    #[new]
    #[pyo3(signature = (step = 0.05, radius = 16.0, window = 12))]
    fn new(step: f64, radius: f64, window: i64) -> PyResult<Self> {
        Ok(Self {
            inner: fock_summing::GridSpec::new(step, radius, window).map_err(err)?,
        })
    }

    #[getter]
    fn step(&self) -> f64 {
        self.inner.step
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    #[getter]
    fn window(&self) -> i64 {
        self.inner.window.n_max
    }

    fn __repr__(&self) -> String {
        format!(
            "GridSpec(step={}, radius={}, window={})",
            self.inner.step, self.inner.radius, self.inner.window.n_max
        )
    }
}

fn grid_or_default(grid: Option<&PyGridSpec>) -> fock_summing::GridSpec {
    grid.map(|g| g.inner).unwrap_or_default()
}

/// A weight parsed from the weight mini-language, e.g. `"poly:2"`.
#[pyclass(name = "Weight", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyWeight {
    inner: fock_summing::Weight,
}

#[pymethods]
impl PyWeight {
    #[new]
    #[pyo3(signature = (spec, grid = None))]
    fn new(spec: &str, grid: Option<&PyGridSpec>) -> PyResult<Self> {
        Ok(Self {
            inner: grammar::parse_weight(spec, &grid_or_default(grid)).map_err(err)?,
        })
    }

    fn density(&self, z: Complex64) -> f64 {
        self.inner.density(z)
    }

    #[pyo3(signature = (z, t = 1.0, grid = None))]
    fn mass_on_square(&self, z: Complex64, t: f64, grid: Option<&PyGridSpec>) -> PyResult<f64> {
        weights::mass_on_square(&self.inner, z, t, &grid_or_default(grid)).map_err(err)
    }

    #[pyo3(signature = (z, t = 1.0, grid = None))]
    fn mass_on_disk(&self, z: Complex64, t: f64, grid: Option<&PyGridSpec>) -> PyResult<f64> {
        weights::mass_on_disk(&self.inner, z, t, &grid_or_default(grid)).map_err(err)
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Weight({:?})", self.inner.label())
    }
}

/// A measure parsed from the measure mini-language or built from atoms.
#[pyclass(name = "Measure", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMeasure {
    inner: fock_summing::Measure,
}

#[pymethods]
impl PyMeasure {
    /// `p` and `alpha` only matter for `pullback:` and `volterra:` specs.
    #[new]
    #[pyo3(signature = (spec, p = 2.0, alpha = 1.0))]
    fn new(spec: &str, p: f64, alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: grammar::parse_measure(spec, MeasureContext { p, alpha }).map_err(err)?,
        })
    }

    /// Atoms as `(x, y, mass)` triples.
    #[staticmethod]
    fn from_atoms(atoms: Vec<(f64, f64, f64)>) -> PyResult<Self> {
        let atoms = atoms
            .into_iter()
            .map(|(x, y, m)| Atom::new(Complex64::new(x, y), m))
            .collect();
        Ok(Self {
            inner: fock_summing::Measure::from_atoms(atoms).map_err(err)?,
        })
    }

    fn scaled(&self, c: f64) -> Self {
        Self {
            inner: self.inner.scaled(c),
        }
    }

    fn atoms(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .atoms()
            .iter()
            .map(|a| (a.z.re, a.z.im, a.mass))
            .collect()
    }

    #[getter]
    fn atom_mass(&self) -> f64 {
        self.inner.atom_mass()
    }

    #[pyo3(signature = (z, r = 1.0, grid = None))]
    fn mass_on_disk(&self, z: Complex64, r: f64, grid: Option<&PyGridSpec>) -> PyResult<f64> {
        Ok(
            fock_summing::measures::mass_on_disk(&self.inner, z, r, &grid_or_default(grid))
                .map_err(err)?
                .value,
        )
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Measure({:?})", self.inner.label())
    }
}

/// Outcome of `classify_embedding`.
#[pyclass(name = "SummingVerdict", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySummingVerdict {
    inner: fock_summing::SummingVerdict,
}

#[pymethods]
impl PySummingVerdict {
    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn regime(&self) -> String {
        self.inner.regime.to_string()
    }

    #[getter]
    fn s(&self) -> f64 {
        self.inner.s
    }

    #[getter]
    fn lattice_norm(&self) -> f64 {
        self.inner.lattice_norm
    }

    #[getter]
    fn integral_norm(&self) -> f64 {
        self.inner.integral_norm
    }

    #[getter]
    fn pi_low(&self) -> f64 {
        self.inner.pi_r_low
    }

    #[getter]
    fn pi_high(&self) -> f64 {
        self.inner.pi_r_high
    }

    #[getter]
    fn classification(&self) -> String {
        self.inner.classification.to_string()
    }

    /// Tail bound and its source, or `None`.
    #[getter]
    fn tail_certificate(&self) -> Option<(f64, String)> {
        self.inner
            .tail_certificate
            .as_ref()
            .map(|t| (t.bound, t.source.to_string()))
    }

    /// `(n_max, sum of lambda^s)` over the growth windows.
    #[getter]
    fn growth(&self) -> Vec<(i64, f64)> {
        self.inner.growth.clone()
    }

    #[pyo3(signature = (case_id = 0))]
    fn csv_row(&self, case_id: usize) -> String {
        cli::csv_row(case_id, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "SummingVerdict(regime={}, s={}, pi=[{}, {}], classification={})",
            self.inner.regime,
            self.inner.s,
            self.inner.pi_r_low,
            self.inner.pi_r_high,
            self.inner.classification
        )
    }
}

fn operator_dict<'py>(
    py: Python<'py>,
    rep: OperatorReport,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let d = pyo3::types::PyDict::new(py);
    d.set_item("verdict", rep.verdict.to_string())?;
    d.set_item("agreement", format!("{:?}", rep.agreement).to_lowercase())?;
    d.set_item("reason", rep.reason)?;
    d.set_item(
        "cross_check",
        rep.cross_check.map(|v| PySummingVerdict { inner: v }),
    )?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (p, r, alpha, weight, measure, grid = None))]
fn classify_embedding(
    p: f64,
    r: f64,
    alpha: f64,
    weight: &PyWeight,
    measure: &PyMeasure,
    grid: Option<&PyGridSpec>,
) -> PyResult<PySummingVerdict> {
    let g = grid_or_default(grid);
    Ok(PySummingVerdict {
        inner: fock_summing::classify_embedding(p, r, alpha, &weight.inner, &measure.inner, &g)
            .map_err(err)?,
    })
}

/// `(regime, s)`.
#[pyfunction]
fn target_exponent(p: f64, r: f64) -> PyResult<(String, f64)> {
    let (regime, s) = fock_summing::target_exponent(p, r).map_err(err)?;
    Ok((regime.to_string(), s))
}

/// Composition with `phi(z) = a z + b`.
#[pyfunction]
#[pyo3(signature = (a, b, p, r, alpha = 1.0, grid = None))]
fn classify_composition<'py>(
    py: Python<'py>,
    a: Complex64,
    b: Complex64,
    p: f64,
    r: f64,
    alpha: f64,
    grid: Option<&PyGridSpec>,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let sym = CompositionSymbol::Affine(AffineSymbol::new(a, b));
    operator_dict(
        py,
        operators::classify_composition(&sym, p, r, alpha, &grid_or_default(grid)).map_err(err)?,
    )
}

/// Volterra operator with `g = c0 + c1 z + ...`.
#[pyfunction]
#[pyo3(signature = (g, p, r, alpha = 1.0, grid = None))]
fn classify_volterra<'py>(
    py: Python<'py>,
    g: Vec<f64>,
    p: f64,
    r: f64,
    alpha: f64,
    grid: Option<&PyGridSpec>,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let g = PolynomialSymbol::from_real(&g);
    operator_dict(
        py,
        operators::classify_volterra(&g, p, r, alpha, &grid_or_default(grid)).map_err(err)?,
    )
}

/// `(verdict, reason, embedding verdict or None)`.
#[pyfunction]
#[pyo3(signature = (k, p, r, alpha, weight, measure, grid = None))]
fn reduce_differentiation(
    k: i64,
    p: f64,
    r: f64,
    alpha: f64,
    weight: &PyWeight,
    measure: &PyMeasure,
    grid: Option<&PyGridSpec>,
) -> PyResult<(String, String, Option<PySummingVerdict>)> {
    let rep = operators::reduce_differentiation(
        k,
        p,
        r,
        alpha,
        &weight.inner,
        &measure.inner,
        &grid_or_default(grid),
    )
    .map_err(err)?;
    Ok((
        rep.verdict.to_string(),
        rep.reason,
        rep.embedding.map(|v| PySummingVerdict { inner: v }),
    ))
}

/// `(log direct, log proxy, direct / proxy)` for `||K_u||^p`.
#[pyfunction]
#[pyo3(signature = (u, p, alpha, weight, grid = None))]
fn kernel_norm(
    u: Complex64,
    p: f64,
    alpha: f64,
    weight: &PyWeight,
    grid: Option<&PyGridSpec>,
) -> PyResult<(f64, f64, f64)> {
    let k = fock::kernel_norm(u, p, alpha, &weight.inner, &grid_or_default(grid)).map_err(err)?;
    Ok((k.log_direct, k.log_proxy, k.ratio()))
}

/// `(value, membership)`; membership is `stable`, `divergent` or `inconclusive`.
#[pyfunction]
#[pyo3(signature = (weight, p, t = 1.0, grid = None))]
fn apr_constant(
    weight: &PyWeight,
    p: f64,
    t: f64,
    grid: Option<&PyGridSpec>,
) -> PyResult<(f64, String)> {
    match weights::apr_constant(&weight.inner, p, t, &grid_or_default(grid)) {
        Ok(rep) => {
            let m = match rep.membership {
                Membership::Stable => "stable",
                Membership::Divergent => "divergent",
                Membership::Inconclusive => "inconclusive",
            };
            Ok((rep.value, m.to_string()))
        }
        Err(fock_summing::FockError::DivergentConstant { trace }) => Ok((
            trace.last().copied().unwrap_or(f64::INFINITY),
            "divergent".to_string(),
        )),
        Err(e) => Err(err(e)),
    }
}

#[pyfunction]
fn diag_summing_estimate(values: Vec<f64>, p: f64, r: f64) -> PyResult<f64> {
    summing::diag_summing_estimate(&values, p, r).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (values, p, r, families = 8, seed = 0))]
fn diag_summing_bruteforce(
    values: Vec<f64>,
    p: f64,
    r: f64,
    families: usize,
    seed: u64,
) -> PyResult<f64> {
    summing::diag_summing_bruteforce(&values, p, r, families, seed).map_err(err)
}

/// `(status, value of the integral of mu_hat)`; status is `true`, `false` or `inconclusive`.
#[pyfunction]
#[pyo3(signature = (measure, weight, p = 2.0, alpha = 1.0, grid = None))]
fn order_bounded_check(
    measure: &PyMeasure,
    weight: &PyWeight,
    p: f64,
    alpha: f64,
    grid: Option<&PyGridSpec>,
) -> PyResult<(String, f64)> {
    let rep = summing::order_bounded_check(
        &measure.inner,
        &weight.inner,
        p,
        alpha,
        &grid_or_default(grid),
    )
    .map_err(err)?;
    Ok((tri(rep.status).to_string(), rep.value))
}

/// `(passed, rendered report)` for a named verification suite.
#[pyfunction]
#[pyo3(signature = (suite, seed = 1))]
fn verify(suite: &str, seed: u64) -> PyResult<(bool, String)> {
    let reports = oracle::run_suite(suite, seed).map_err(err)?;
    let text: String = reports.iter().map(|r| r.render()).collect();
    Ok((reports.iter().all(|r| r.pass), text))
}

/// Run the command line with `argv` (without the program name);
/// returns `(exit code, stdout, stderr)`.
#[pyfunction]
fn run_cli(argv: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let args = std::iter::once("fock-summing".to_string()).chain(argv);
    let code = cli::run(args, &mut out, &mut errs);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&errs).into_owned(),
    )
}

#[pymodule]
fn fock_summing_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Add every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FockError", m.py().get_type::<FockError>())?;
    m.add("CSV_HEADER", cli::CSV_HEADER)?;
    m.add_class::<PyGridSpec>()?;
    m.add_class::<PyWeight>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PySummingVerdict>()?;
    m.add_function(wrap_pyfunction!(classify_embedding, m)?)?;
    m.add_function(wrap_pyfunction!(target_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(classify_composition, m)?)?;
    m.add_function(wrap_pyfunction!(classify_volterra, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_differentiation, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_norm, m)?)?;
    m.add_function(wrap_pyfunction!(apr_constant, m)?)?;
    m.add_function(wrap_pyfunction!(diag_summing_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(diag_summing_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(order_bounded_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
