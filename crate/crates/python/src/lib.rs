//! Python bindings: `import pyboolcube`.

use boolcube::calculus::build_profile_with;
use boolcube::entropy::{entropy, min_entropy};
use boolcube::families::{self, TribesParams};
use boolcube::verify::sweep::{sweep as run_sweep, Generator};
use boolcube::verify::{registry, run_check as run_one, select_checks, CheckParams};
use boolcube::{bfn1, cli, transform, PointIndex, SubsetMask};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: boolcube::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn mask(elements: &[u32], n: u32) -> PyResult<SubsetMask> {
    if elements.iter().any(|&e| e == 0 || e > n) {
        return Err(PyValueError::new_err(format!("set elements must lie in 1..={n}")));
    }
    Ok(SubsetMask::from_elements(elements))
}

/// Boolean function on {-1,1}^n stored as a truth table.
#[pyclass(frozen, name = "TruthTable", module = "pyboolcube")]
struct PyTruthTable {
    inner: boolcube::TruthTable,
}

fn wrap(r: boolcube::Result<boolcube::TruthTable>) -> PyResult<PyTruthTable> {
    r.map(|inner| PyTruthTable { inner }).map_err(err)
}

#[pymethods]
impl PyTruthTable {
    /// Values in point order; point i has x_k = -1 iff bit k-1 of i is set.
    #[new]
    fn new(values: Vec<i8>) -> PyResult<Self> {
        wrap(boolcube::TruthTable::from_signs(&values))
    }

    #[staticmethod]
    fn from_bfn1(text: &str) -> PyResult<Self> {
        wrap(bfn1::parse(text))
    }

    #[staticmethod]
    #[pyo3(name = "and_")]
    fn and(n: u32) -> PyResult<Self> {
        wrap(families::make_and(n))
    }

    #[staticmethod]
    #[pyo3(name = "or_")]
    fn or(n: u32) -> PyResult<Self> {
        wrap(families::make_or(n))
    }

    /// Parity on `elements` (1-based); all coordinates when omitted.
    #[staticmethod]
    #[pyo3(signature = (n, elements=None))]
    fn parity(n: u32, elements: Option<Vec<u32>>) -> PyResult<Self> {
        let s = match elements {
            Some(e) => mask(&e, n)?,
            None => SubsetMask::full(n),
        };
        wrap(families::make_parity(n, s))
    }

    #[staticmethod]
    fn dictator(n: u32, k: u32) -> PyResult<Self> {
        wrap(families::make_dictator(n, k))
    }

    #[staticmethod]
    fn majority(n: u32) -> PyResult<Self> {
        wrap(families::make_majority(n))
    }

    #[staticmethod]
    #[pyo3(signature = (m, count=None))]
    fn tribes(m: u32, count: Option<u32>) -> PyResult<Self> {
        let params = match count {
            Some(c) => TribesParams::new(m, c),
            None => TribesParams::with_default_count(m),
        }
        .map_err(err)?;
        wrap(families::make_tribes(params))
    }

    #[staticmethod]
    fn example_h() -> Self {
        PyTruthTable { inner: families::make_example_h() }
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed=0))]
    fn random(n: u32, seed: u64) -> PyResult<Self> {
        wrap(families::make_random(n, seed))
    }

    /// `outer(inner(block_1), ..., inner(block_n))`.
    fn compose(&self, inner: &PyTruthTable) -> PyResult<Self> {
        wrap(families::compose(&self.inner, &inner.inner))
    }

    fn iterate(&self, depth: u32) -> PyResult<Self> {
        wrap(families::iterate_compose(&self.inner, depth))
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &PyTruthTable) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("TruthTable(n={}, hex={})", self.inner.n(), bfn1::payload_hex(&self.inner))
    }

    fn to_bfn1(&self) -> String {
        bfn1::serialize(&self.inner)
    }

    fn digest(&self) -> String {
        cli::digest(&self.inner)
    }

    fn values(&self) -> Vec<i64> {
        self.inner.to_signs()
    }

    fn __call__(&self, x: Vec<i8>) -> PyResult<i64> {
        if x.len() != self.inner.n() as usize {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.inner.n())));
        }
        let p = PointIndex::from_coords(&x).map_err(err)?;
        self.inner.evaluate(p).map_err(err)
    }

    fn is_monotone(&self) -> bool {
        self.inner.is_monotone()
    }

    fn degree(&self) -> u32 {
        transform(&self.inner).degree()
    }

    /// Fourier coefficients in mask order as floats.
    fn coefficients(&self) -> Vec<f64> {
        transform(&self.inner).coefficients()
    }

    /// Fourier coefficients in mask order as reduced "num/den" strings.
    fn exact_coefficients(&self) -> Vec<String> {
        let spec = transform(&self.inner);
        (0..spec.len() as u32).map(|s| spec.exact_coefficient(SubsetMask(s)).expect("exact").to_string()).collect()
    }

    fn coefficient(&self, elements: Vec<u32>) -> PyResult<f64> {
        Ok(transform(&self.inner).coefficient(mask(&elements, self.inner.n())?))
    }

    /// `I_k` for k = 1..n.
    fn influences(&self) -> PyResult<Vec<f64>> {
        let spec = transform(&self.inner);
        Ok(build_profile_with(&self.inner, &spec).map_err(err)?.per_bit_f64())
    }

    fn total_influence(&self) -> PyResult<f64> {
        let spec = transform(&self.inner);
        Ok(build_profile_with(&self.inner, &spec).map_err(err)?.total.to_f64())
    }

    /// Spectral entropy in bits.
    fn entropy(&self) -> PyResult<f64> {
        entropy(&transform(&self.inner)).map_err(err)
    }

    /// `(max |f̂(S)|, S as 1-based elements)`.
    fn max_coefficient(&self) -> (f64, Vec<u32>) {
        let m = min_entropy(&transform(&self.inner));
        (m.max_coef, SubsetMask(m.argmax).bits().map(|b| b + 1).collect())
    }

    /// Spectral sample draws as 1-based element lists.
    #[pyo3(signature = (count, seed=0))]
    fn sample(&self, count: usize, seed: u64) -> PyResult<Vec<Vec<u32>>> {
        let dist = transform(&self.inner).sample_distribution().map_err(err)?;
        Ok(dist.draw(seed, count).into_iter().map(|s| s.bits().map(|b| b + 1).collect()).collect())
    }

    /// Full analysis as a dict (same content as `boolcube analyze --json`).
    #[pyo3(signature = (eps=0.25, checks=None))]
    fn analyze<'py>(&self, py: Python<'py>, eps: f64, checks: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
        let bundle = cli::analysis_bundle("python", &self.inner, eps, checks).map_err(err)?;
        json_to_py(py, &serde_json::to_string(&bundle).expect("serializable"))
    }
}

/// Ids of every registered check.
#[pyfunction]
fn check_ids() -> Vec<&'static str> {
    registry().iter().map(|c| c.id).collect()
}

/// Run one check on one function; returns the report as a dict.
#[pyfunction]
fn run_check<'py>(py: Python<'py>, check_id: &str, f: &PyTruthTable) -> PyResult<Bound<'py, PyAny>> {
    let report = run_one(check_id, &f.inner, &CheckParams::default()).map_err(err)?;
    json_to_py(py, &serde_json::to_string(&report).expect("serializable"))
}

/// Sweep checks over every function on `n <= 4` variables, or over `count`
/// random functions when `random` is set.
#[pyfunction]
#[pyo3(signature = (checks="all", exhaustive=None, random=None, count=100, seed=0))]
fn sweep<'py>(
    py: Python<'py>,
    checks: &str,
    exhaustive: Option<u32>,
    random: Option<u32>,
    count: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let generator = match (exhaustive, random) {
        (Some(n), None) => Generator::Exhaustive(n),
        (None, Some(n)) => Generator::Random { n, count, seed },
        _ => return Err(PyValueError::new_err("give exactly one of exhaustive= or random=")),
    };
    let selected = select_checks(checks).map_err(err)?;
    let report = py.detach(|| run_sweep(&selected, &generator, &CheckParams::default(), None)).map_err(err)?;
    json_to_py(py, &report.to_json())
}

#[pymodule]
fn pyboolcube(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTruthTable>()?;
    m.add_function(wrap_pyfunction!(check_ids, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
