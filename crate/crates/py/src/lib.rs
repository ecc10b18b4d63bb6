//! Python bindings: lattices, the `S_Z` comparison surface, the feasibility
//! solver, the degree test, family counts and scenario runs.
//!
//! Integers cross the boundary as Python `int`s of any size. Reports and
//! certificates come back as plain dicts built from their JSON form, where
//! integers beyond 64 bits appear as decimal strings.

use cremona_core::family;
use cremona_core::lattice::{BlowupMap, DivisorClass, IntersectionLattice};
use cremona_core::log_kodaira;
use cremona_core::obstruction::{self, FeasibilityCertificate, FeasibilitySystem, LinearEquation};
use cremona_core::scenario::{self, ScenarioReport};
use cremona_core::surfaces::{make_sz, SZModel};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: cremona_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(xs) => {
            let list = PyList::empty(py);
            for x in xs {
                list.append(json_to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, json_to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

/// An integral lattice with a canonical class.
#[pyclass(name = "Lattice", module = "cremona", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyLattice {
    inner: IntersectionLattice,
}

impl PyLattice {
    fn class(&self, coeffs: Vec<BigInt>) -> PyResult<DivisorClass> {
        self.inner.class(coeffs).map_err(err)
    }
}

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (labels, gram, canonical, id = "custom".to_string()))]
    fn new(labels: Vec<String>, gram: Vec<Vec<BigInt>>, canonical: Vec<BigInt>, id: String) -> PyResult<Self> {
        IntersectionLattice::new(id, labels, gram, canonical, None)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn projective_plane() -> Self {
        Self { inner: IntersectionLattice::projective_plane() }
    }

    #[staticmethod]
    fn quadric() -> Self {
        Self { inner: IntersectionLattice::quadric() }
    }

    #[staticmethod]
    pub fn blown_up_plane(n: usize) -> Self {
        Self { inner: IntersectionLattice::blown_up_plane(n) }
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id().as_str().to_string()
    }

    #[getter]
    pub fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.basis_labels().to_vec()
    }

    #[getter]
    fn gram(&self) -> Vec<Vec<BigInt>> {
        self.inner.gram().clone()
    }

    #[getter]
    fn canonical(&self) -> Vec<BigInt> {
        self.inner.canonical().coeffs().to_vec()
    }

    fn pair(&self, x: Vec<BigInt>, y: Vec<BigInt>) -> PyResult<BigInt> {
        self.inner.pair(&self.class(x)?, &self.class(y)?).map_err(err)
    }

    /// Arithmetic genus by adjunction; raises on odd `C·(C + K)`.
    fn genus(&self, c: Vec<BigInt>) -> PyResult<BigInt> {
        self.inner.genus(&self.class(c)?).map_err(err)
    }

    /// Blow up a general point. Returns the new lattice and the pullback map.
    fn blow_up(&self) -> (PyLattice, PyBlowupMap) {
        let (inner, map) = self.inner.blow_up_point();
        (PyLattice { inner }, PyBlowupMap { inner: map })
    }

    fn __repr__(&self) -> String {
        format!("Lattice(id={:?}, labels={:?})", self.inner.id().as_str(), self.inner.basis_labels())
    }
}

#[pyclass(name = "BlowupMap", module = "cremona", frozen)]
pub struct PyBlowupMap {
    inner: BlowupMap,
}

#[pymethods]
impl PyBlowupMap {
    #[getter]
    fn matrix(&self) -> Vec<Vec<BigInt>> {
        self.inner.pullback.clone()
    }

    fn pullback(&self, source: &PyLattice, x: Vec<BigInt>) -> PyResult<Vec<BigInt>> {
        let d = source.class(x)?;
        self.inner.pullback(&d).map(|c| c.coeffs().to_vec()).map_err(err)
    }
}

/// The surface `S_Z`, seen both as a blown-up quadric and a blown-up plane.
#[pyclass(name = "SZModel", module = "cremona", frozen)]
pub struct PySZModel {
    inner: SZModel,
}

impl Default for PySZModel {
    fn default() -> Self {
        Self::new()
    }
}

#[pymethods]
#[allow(clippy::wrong_self_convention)]
impl PySZModel {
    #[new]
    pub fn new() -> Self {
        Self { inner: make_sz() }
    }

    #[getter]
    fn lattice(&self) -> PyLattice {
        PyLattice { inner: self.inner.lattice().clone() }
    }

    pub fn from_f0(&self, alpha: BigInt, beta: BigInt) -> PyResult<Vec<BigInt>> {
        let f0 = IntersectionLattice::quadric();
        let d = f0.class(vec![alpha, beta]).map_err(err)?;
        self.inner.from_f0(&d).map(|c| c.coeffs().to_vec()).map_err(err)
    }

    fn from_plane(&self, degree: BigInt) -> PyResult<Vec<BigInt>> {
        self.inner.from_plane(&degree).map(|c| c.coeffs().to_vec()).map_err(err)
    }

    fn is_st_pullback(&self, x: Vec<BigInt>) -> PyResult<bool> {
        let d = self.inner.lattice().class(x).map_err(err)?;
        self.inner.is_st_pullback(&d).map_err(err)
    }
}

/// Linear equations `Σ c_i x_i = k` in nonnegative integer unknowns.
#[pyclass(name = "FeasibilitySystem", module = "cremona", frozen)]
pub struct PyFeasibilitySystem {
    inner: FeasibilitySystem,
}

#[pymethods]
impl PyFeasibilitySystem {
    /// `equations` is a list of `(coefficients, constant)` pairs.
    #[new]
    pub fn new(unknowns: Vec<String>, equations: Vec<(Vec<BigInt>, BigInt)>) -> PyResult<Self> {
        let eqs = equations.into_iter().map(|(c, k)| LinearEquation::new(c, k)).collect();
        FeasibilitySystem::new(unknowns, eqs).map(|inner| Self { inner }).map_err(err)
    }

    /// The system used for the ruled sextic: built on `S_Z` from the
    /// pullbacks of `S`, `H` and the double curve.
    #[staticmethod]
    #[pyo3(signature = (s_pullback, h_pullback, e_gamma_total, multiplicity = BigInt::from(2)))]
    fn obstruction(
        s_pullback: Vec<BigInt>,
        h_pullback: Vec<BigInt>,
        e_gamma_total: Vec<BigInt>,
        multiplicity: BigInt,
    ) -> PyResult<Self> {
        let sz = make_sz();
        let lat = sz.lattice();
        let cls = |v: Vec<BigInt>| lat.class(v).map_err(err);
        obstruction::build_obstruction_system(
            &sz,
            &cls(s_pullback)?,
            &cls(h_pullback)?,
            &cls(e_gamma_total)?,
            &multiplicity,
        )
        .map(|inner| Self { inner })
        .map_err(err)
    }

    #[getter]
    fn unknowns(&self) -> Vec<String> {
        self.inner.unknowns().to_vec()
    }

    #[getter]
    fn constants(&self) -> Vec<BigInt> {
        self.inner.equations().iter().map(|e| e.constant.clone()).collect()
    }

    pub fn satisfied_by(&self, x: Vec<BigInt>) -> bool {
        self.inner.satisfied_by(&x)
    }

    /// Decide the system. `bound` caps the box search and defaults to one
    /// more than the largest constant.
    #[pyo3(signature = (bound = None))]
    pub fn solve(&self, bound: Option<u64>) -> PyCertificate {
        let bound = bound.unwrap_or_else(|| obstruction::default_bound(&self.inner));
        PyCertificate {
            inner: obstruction::solve_nonneg(&self.inner, bound),
            system: self.inner.clone(),
        }
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }
}

#[pyclass(name = "Certificate", module = "cremona", frozen)]
pub struct PyCertificate {
    inner: FeasibilityCertificate,
    system: FeasibilitySystem,
}

#[pymethods]
impl PyCertificate {
    /// `FEASIBLE`, `INFEASIBLE` or `UNKNOWN_UP_TO_BOUND`.
    #[getter]
    pub fn status(&self) -> &'static str {
        self.inner.status.as_str()
    }

    #[getter]
    fn bound(&self) -> u64 {
        self.inner.bound
    }

    #[getter]
    pub fn witness(&self) -> Option<Vec<(String, BigInt)>> {
        self.inner.witness_named()
    }

    #[getter]
    fn final_line(&self) -> Option<String> {
        self.inner.final_line().map(str::to_string)
    }

    /// Re-derive every chain step from the system; raises on mismatch.
    fn replay(&self) -> PyResult<()> {
        self.inner.replay(&self.system).map_err(err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.render(&self.system)
    }
}

#[pyclass(name = "Report", module = "cremona", frozen)]
pub struct PyReport {
    inner: ScenarioReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn scenario(&self) -> String {
        self.inner.scenario.clone()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    #[getter]
    fn verdict(&self) -> Option<String> {
        self.inner.verdict().map(str::to_string)
    }

    #[getter]
    fn computed<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.computed)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn to_json(&self) -> String {
        self.inner.to_json_pretty()
    }

    fn to_markdown(&self) -> String {
        self.inner.to_markdown()
    }
}

#[pyfunction]
fn list_scenarios() -> Vec<&'static str> {
    scenario::list_scenarios()
}

/// Run a built-in scenario by name, or a scenario file by path.
#[pyfunction]
#[pyo3(signature = (name_or_path, bound = None))]
fn run_scenario(name_or_path: &str, bound: Option<u64>) -> PyResult<PyReport> {
    let s = scenario::resolve(name_or_path).map_err(err)?;
    Ok(PyReport { inner: scenario::run_scenario(&s, bound) })
}

#[pyfunction]
fn negativity_certificate<'py>(py: Python<'py>, deg_s: BigInt, deg_gamma: BigInt) -> PyResult<Bound<'py, PyAny>> {
    let cert = log_kodaira::negativity_certificate(&deg_s, &deg_gamma).map_err(err)?;
    to_py(py, &cert)
}

#[pyfunction]
fn monoid_ce_predicate(degree: BigInt, multiplicity: BigInt) -> PyResult<bool> {
    family::monoid_ce_predicate(&degree, &multiplicity).map_err(err)
}

#[pyfunction]
fn grassmannian_dim(k: BigInt, n: BigInt) -> PyResult<BigInt> {
    family::grassmannian_dim(&k, &n).map_err(err)
}

#[pyfunction]
fn dominance_count<'py>(py: Python<'py>, dims: Vec<BigInt>, k: BigInt, n: BigInt) -> PyResult<Bound<'py, PyAny>> {
    let c = family::dominance_count(&dims, &k, &n).map_err(err)?;
    to_py(py, &c)
}

#[pymodule]
fn cremona(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Adds every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyBlowupMap>()?;
    m.add_class::<PySZModel>()?;
    m.add_class::<PyFeasibilitySystem>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(negativity_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(monoid_ce_predicate, m)?)?;
    m.add_function(wrap_pyfunction!(grassmannian_dim, m)?)?;
    m.add_function(wrap_pyfunction!(dominance_count, m)?)?;
    Ok(())
}
