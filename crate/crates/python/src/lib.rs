//! Python module `dirset`: set specs, truncations and diagnostics.
//!
//! Specs are passed as the same strings the CLI accepts. Heavy calls release
//! the interpreter lock while they run.

use std::collections::HashMap;

use dirset_core::arith::{representable_count_segmented, SieveKind};
use dirset_core::diagnostics::{self, DensityVerdict, GapMode};
use dirset_core::engine::{self, BuildOptions, DirectionSetTruncation, EnumerationMode, PrimitiveDirection, TupleSpace};
use dirset_core::geometry::{self, NormKind, OpenBox, ProbeScheme};
use dirset_core::intsets::IntegerSetSpec;
use dirset_core::scenarios::{self, ScenarioOptions};
use num_rational::Ratio;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(dirset, ConfigError, PyValueError, "Invalid parameters or set spec.");
create_exception!(dirset, ResourceError, PyRuntimeError, "A computation exceeded its budget.");

fn py_err(e: dirset_core::Error) -> PyErr {
    match e {
        dirset_core::Error::Resource(m) => ResourceError::new_err(m),
        other => ConfigError::new_err(other.to_string()),
    }
}

fn parse_spec(s: &str) -> PyResult<IntegerSetSpec> {
    s.parse().map_err(py_err)
}

fn parse_specs(specs: &[String]) -> PyResult<Vec<IntegerSetSpec>> {
    specs.iter().map(|s| parse_spec(s)).collect()
}

fn parse_norm(norm: &str) -> PyResult<NormKind> {
    norm.parse().map_err(py_err)
}

fn parse_ratio(s: &str) -> PyResult<Ratio<u64>> {
    s.parse().map_err(|_| ConfigError::new_err(format!("`{s}` is not a rational p/q")))
}

fn fmt_ratio(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn mode(seed: Option<u64>, samples: Option<u64>) -> PyResult<EnumerationMode> {
    match (seed, samples) {
        (None, None) => Ok(EnumerationMode::Exhaustive),
        (Some(seed), Some(count)) => Ok(EnumerationMode::Sampled { seed, count }),
        _ => Err(ConfigError::new_err("sampled mode needs both `seed` and `samples`")),
    }
}

/// One integer set, e.g. `IntegerSet("primes-ap(4, 1)")`.
#[pyclass(name = "IntegerSet", frozen)]
struct PyIntegerSet {
    spec: IntegerSetSpec,
}

#[pymethods]
impl PyIntegerSet {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let spec = parse_spec(spec)?;
        spec.validate().map_err(py_err)?;
        Ok(PyIntegerSet { spec })
    }

    /// Ascending elements up to `bound`.
    fn enumerate(&self, py: Python<'_>, bound: u64) -> PyResult<Vec<u64>> {
        py.detach(|| self.spec.enumerate(bound)).map_err(py_err)
    }

    fn __contains__(&self, n: u64) -> bool {
        self.spec.contains(n)
    }

    fn __str__(&self) -> String {
        self.spec.to_string()
    }

    fn __repr__(&self) -> String {
        format!("IntegerSet('{}')", self.spec)
    }
}

/// A truncated direction set: primitive integer directions, sorted.
#[pyclass(name = "DirectionSet", frozen)]
struct PyDirectionSet {
    inner: DirectionSetTruncation,
}

#[pymethods]
impl PyDirectionSet {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, tuple: Vec<u64>) -> PyResult<bool> {
        Ok(self.inner.contains(&PrimitiveDirection::new(&tuple).map_err(py_err)?))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    /// Primitive integer directions as tuples.
    fn directions(&self) -> Vec<Vec<u64>> {
        self.inner.points.iter().map(|p| p.coords().to_vec()).collect()
    }

    /// Directions as points of the sphere octant.
    #[pyo3(signature = (norm = "euclidean"))]
    fn points(&self, norm: &str) -> PyResult<Vec<Vec<f64>>> {
        let n = parse_norm(norm)?;
        Ok(self.inner.float_points(n).into_iter().map(|p| p.into_coords()).collect())
    }

    /// The sorted text export, one direction per line.
    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("DirectionSet(k={}, bound={}, len={})", self.inner.dim(), self.inner.bound, self.inner.len())
    }
}

/// Builds the truncation at `bound`; pass `seed` and `samples` for sampled mode.
#[pyfunction]
#[pyo3(signature = (specs, bound, distinct = false, seed = None, samples = None, workers = 0))]
fn build_truncation(
    py: Python<'_>,
    specs: Vec<String>,
    bound: u64,
    distinct: bool,
    seed: Option<u64>,
    samples: Option<u64>,
    workers: usize,
) -> PyResult<PyDirectionSet> {
    let specs = parse_specs(&specs)?;
    let m = mode(seed, samples)?;
    let opts = BuildOptions { workers, ..BuildOptions::default() };
    let inner = py.detach(|| engine::build_truncation(&specs, bound, distinct, m, opts)).map_err(py_err)?;
    Ok(PyDirectionSet { inner })
}

/// Brute-force reference truncation, as sorted tuples.
#[pyfunction]
#[pyo3(signature = (specs, bound, distinct = false))]
fn oracle_truncation(specs: Vec<String>, bound: u64, distinct: bool) -> PyResult<Vec<Vec<u64>>> {
    let specs = parse_specs(&specs)?;
    let set = engine::oracle_truncation(&specs, bound, distinct).map_err(py_err)?;
    Ok(set.into_iter().map(|p| p.coords().to_vec()).collect())
}

#[pyfunction]
#[pyo3(signature = (x, norm = "euclidean"))]
fn rho(x: Vec<f64>, norm: &str) -> PyResult<Vec<f64>> {
    Ok(geometry::rho(&x, parse_norm(norm)?).map_err(py_err)?.into_coords())
}

/// Probe points; a `seed` switches from the grid to random probes.
#[pyfunction]
#[pyo3(signature = (k, resolution, seed = None, norm = "euclidean"))]
fn probe_grid(k: usize, resolution: usize, seed: Option<u64>, norm: &str) -> PyResult<Vec<Vec<f64>>> {
    let scheme = seed.map_or(ProbeScheme::Grid, |seed| ProbeScheme::Random { seed });
    let probes = geometry::probe_grid(k, resolution, scheme, parse_norm(norm)?).map_err(py_err)?;
    Ok(probes.into_iter().map(|p| p.into_coords()).collect())
}

/// Epsilon-coverage of the grid probes by the direction set, streamed.
#[pyfunction]
#[pyo3(signature = (specs, bound, epsilon, resolution, distinct = false, seed = None, samples = None, workers = 0))]
#[allow(clippy::too_many_arguments)]
fn coverage<'py>(
    py: Python<'py>,
    specs: Vec<String>,
    bound: u64,
    epsilon: f64,
    resolution: usize,
    distinct: bool,
    seed: Option<u64>,
    samples: Option<u64>,
    workers: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let specs = parse_specs(&specs)?;
    let m = mode(seed, samples)?;
    let r = py
        .detach(|| {
            let (space, _) = TupleSpace::new(&specs, bound, distinct)?;
            if m == EnumerationMode::Exhaustive {
                space.check_budget(engine::DEFAULT_TUPLE_BUDGET)?;
            }
            let probes = geometry::probe_grid(specs.len(), resolution, ProbeScheme::Grid, NormKind::Euclidean)?;
            diagnostics::coverage_streaming(&space, m, epsilon, &probes, workers)
        })
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("probes", r.probe_count)?;
    d.set_item("covered", r.covered)?;
    d.set_item("fraction", r.fraction)?;
    d.set_item("axis_adjacent_probes", r.axis_adjacent_probes)?;
    d.set_item("fraction_excluding_axis", r.fraction_excluding_axis)?;
    d.set_item("covered_mask", r.covered_mask)?;
    d.set_item("source", r.source)?;
    Ok(d)
}

/// Gaps `(lo, hi)` of the ratio set inside the scan, as `p/q` strings.
#[pyfunction]
#[pyo3(signature = (spec, bound, lo, hi, resolution, method = "auto", workers = 0))]
#[allow(clippy::too_many_arguments)]
fn ratio_gaps(
    py: Python<'_>,
    spec: &str,
    bound: u64,
    lo: &str,
    hi: &str,
    resolution: u64,
    method: &str,
    workers: usize,
) -> PyResult<Vec<(String, String)>> {
    let spec = parse_spec(spec)?;
    let (lo, hi) = (parse_ratio(lo)?, parse_ratio(hi)?);
    let method: GapMode = method.parse().map_err(py_err)?;
    let r = py.detach(|| diagnostics::ratio_gaps(&spec, bound, lo, hi, resolution, method, workers)).map_err(py_err)?;
    Ok(r.gaps.iter().map(|g| (fmt_ratio(g.lo), fmt_ratio(g.hi))).collect())
}

#[pyfunction]
#[pyo3(signature = (spec, bound, limit = None, workers = 0))]
fn find_3aps(py: Python<'_>, spec: &str, bound: u64, limit: Option<usize>, workers: usize) -> PyResult<Vec<(u64, u64, u64)>> {
    let spec = parse_spec(spec)?;
    py.detach(|| diagnostics::find_3aps(&spec, bound, limit, workers)).map_err(py_err)
}

/// `(checkpoints [(x, count, ratio)], verdict, value)`; value is the limit
/// estimate when converging, `None` otherwise.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn estimate_density(spec: &str, bound: u64, checkpoints: Vec<u64>) -> PyResult<(Vec<(u64, u64, f64)>, String, Option<f64>)> {
    let e = diagnostics::estimate_density(&parse_spec(spec)?, bound, &checkpoints).map_err(py_err)?;
    let cps = e.checkpoints.iter().map(|c| (c.x, c.count, c.ratio)).collect();
    let (verdict, value) = match e.verdict {
        DensityVerdict::Converging { delta } => ("converging", Some(delta)),
        DensityVerdict::Oscillating { .. } => ("oscillating", None),
        DensityVerdict::Inconclusive => ("inconclusive", None),
    };
    Ok((cps, verdict.into(), value))
}

#[pyfunction]
fn ratio_profile<'py>(py: Python<'py>, spec: &str, bound: u64, window: usize) -> PyResult<Bound<'py, PyDict>> {
    let p = diagnostics::ratio_profile(&parse_spec(spec)?, bound, window).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("min_pair", p.min_pair)?;
    d.set_item("min", p.min)?;
    d.set_item("max", p.max)?;
    d.set_item("mean", p.mean)?;
    d.set_item("approaches_one", p.approaches_one)?;
    Ok(d)
}

/// Checkpoints `(x, f_X, ratio)` of the count of `n = k f(k) <= X`.
#[pyfunction]
#[pyo3(signature = (function, bound, workers = 0))]
fn representable_count(py: Python<'_>, function: &str, bound: u64, workers: usize) -> PyResult<Vec<(u64, u64, Option<f64>)>> {
    let kind: SieveKind = function.parse().map_err(py_err)?;
    let cps = py.detach(|| representable_count_segmented(kind, bound, workers)).map_err(py_err)?;
    Ok(cps.into_iter().map(|c| (c.x, c.count, c.ratio_to_reference)).collect())
}

/// A tuple whose direction lies in the open box, or `None`.
#[pyfunction]
#[pyo3(signature = (specs, intervals, search_bound, distinct = false))]
fn witness_in_box(specs: Vec<String>, intervals: Vec<(f64, f64)>, search_bound: u64, distinct: bool) -> PyResult<Option<Vec<u64>>> {
    let specs = parse_specs(&specs)?;
    let bx = OpenBox::new(&intervals).map_err(py_err)?;
    match engine::witness_in_box(&specs, &bx, search_bound, distinct, NormKind::Euclidean).map_err(py_err)? {
        engine::WitnessOutcome::Found { tuple, .. } => Ok(Some(tuple)),
        engine::WitnessOutcome::NotFound { .. } => Ok(None),
    }
}

/// Runs a `reproduce` scenario: `(passed, [(check, passed, detail)], {file: contents})`.
#[pyfunction]
#[pyo3(signature = (name, workers = 0, seed = scenarios::DEFAULT_SEED))]
#[allow(clippy::type_complexity)]
fn run_scenario(
    py: Python<'_>,
    name: &str,
    workers: usize,
    seed: u64,
) -> PyResult<(bool, Vec<(String, bool, String)>, HashMap<String, String>)> {
    let o = py.detach(|| scenarios::run_scenario(name, &ScenarioOptions { workers, seed })).map_err(py_err)?;
    let checks = o.checks.iter().map(|c| (c.name.clone(), c.passed, c.detail.clone())).collect();
    let files = o.artifacts.into_iter().map(|a| (a.file_name, a.contents)).collect();
    Ok((o.checks.iter().all(|c| c.passed), checks, files))
}

#[pymodule]
fn dirset(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIntegerSet>()?;
    m.add_class::<PyDirectionSet>()?;
    m.add("ConfigError", m.py().get_type::<ConfigError>())?;
    m.add("ResourceError", m.py().get_type::<ResourceError>())?;
    m.add("SCENARIOS", scenarios::SCENARIOS.to_vec())?;
    m.add_function(wrap_pyfunction!(build_truncation, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_truncation, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(probe_grid, m)?)?;
    m.add_function(wrap_pyfunction!(coverage, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(find_3aps, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_density, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_profile, m)?)?;
    m.add_function(wrap_pyfunction!(representable_count, m)?)?;
    m.add_function(wrap_pyfunction!(witness_in_box, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
