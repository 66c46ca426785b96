//! Python module `mvmfem`.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mvmfem::assembly::LoadData;
use mvmfem::report::{report_rows, to_csv, to_markdown};
use mvmfem::study::evaluate_solution;
use mvmfem::{exact_fields, FemError, Method, SimplicialMesh, StokesProblem, StudyConfig};

fn to_py(e: FemError) -> PyErr {
    if e.is_solver_failure() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse_method(s: &str) -> PyResult<Method> {
    s.parse::<Method>().map_err(PyValueError::new_err)
}

/// Structured simplicial mesh of the unit square or cube.
#[pyclass(name = "Mesh", frozen)]
struct PyMesh {
    inner: Arc<SimplicialMesh>,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(dim: usize, n: usize) -> PyResult<Self> {
        Ok(PyMesh {
            inner: Arc::new(SimplicialMesh::structured(dim, n).map_err(to_py)?),
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.n_vertices()
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.inner.n_cells()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.inner.n_edges()
    }

    #[getter]
    fn n_faces(&self) -> usize {
        self.inner.n_faces()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.mesh_size()
    }

    fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.inner.dim();
        self.inner
            .vertices()
            .iter()
            .map(|x| x[..d].to_vec())
            .collect()
    }

    fn cells(&self) -> Vec<Vec<usize>> {
        (0..self.inner.n_cells())
            .map(|c| self.inner.cell(c).to_vec())
            .collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(dim={}, vertices={}, cells={})",
            self.inner.dim(),
            self.inner.n_vertices(),
            self.inner.n_cells()
        )
    }
}

/// Assembled discretization on a mesh, loaded with the manufactured solution.
#[pyclass(name = "Problem", frozen)]
struct PyProblem {
    inner: StokesProblem,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (mesh, mu = 1.0))]
    fn new(mesh: &PyMesh, mu: f64) -> PyResult<Self> {
        Ok(PyProblem {
            inner: StokesProblem::new(mesh.inner.clone(), mu).map_err(to_py)?,
        })
    }

    /// Dof counts of the vorticity, velocity and pressure spaces.
    fn n_dofs(&self) -> (usize, usize, usize) {
        (
            self.inner.space_r.n_dofs(),
            self.inner.space_q.n_dofs(),
            self.inner.space_p.n_dofs(),
        )
    }

    /// Solves with `method` ("mv" or "3f") and returns the coefficient
    /// vectors together with relative L2 errors.
    #[pyo3(signature = (method = "mv", tol = mvmfem::solver::DEFAULT_TOL))]
    fn solve<'py>(&self, py: Python<'py>, method: &str, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let method = parse_method(method)?;
        let p = &self.inner;
        let exact = exact_fields(p.mesh.dim(), p.mu);
        let rhs = p
            .load(&LoadData {
                g: &exact.g,
                p0: None,
                q0: None,
                degree: mvmfem::fespace::DATA_QUAD_DEGREE,
            })
            .map_err(to_py)?;
        let sol = p.solve(method, &rhs, tol).map_err(to_py)?;
        let (err_r, err_q, err_p, err_curl, div_q) = evaluate_solution(p, &exact, &sol);
        let d = PyDict::new(py);
        d.set_item("r", sol.r)?;
        d.set_item("q", sol.q)?;
        d.set_item("p", sol.p)?;
        d.set_item("n_dof", sol.n_dof)?;
        d.set_item("residual", sol.residual)?;
        d.set_item("err_r", err_r.value)?;
        d.set_item("err_q", err_q.value)?;
        d.set_item("err_p", err_p.value)?;
        d.set_item("err_curl_r", err_curl)?;
        d.set_item("div_q", div_q)?;
        Ok(d)
    }
}

/// Result of a convergence study.
#[pyclass(name = "Report", frozen)]
struct PyReport {
    inner: mvmfem::ConvergenceReport,
}

#[pymethods]
impl PyReport {
    fn to_csv(&self) -> String {
        to_csv(&self.inner)
    }

    fn to_markdown(&self) -> String {
        to_markdown(&self.inner)
    }

    /// CSV rows as dictionaries; missing rates and invariants are None.
    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        report_rows(&self.inner)
            .into_iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("method", r.method)?;
                d.set_item("dim", r.dim)?;
                d.set_item("level", r.level)?;
                d.set_item("h", r.h)?;
                d.set_item("n_dof", r.n_dof)?;
                d.set_item("err_r", r.err_r)?;
                d.set_item("rate_r", r.rate_r)?;
                d.set_item("err_q", r.err_q)?;
                d.set_item("rate_q", r.rate_q)?;
                d.set_item("err_p", r.err_p)?;
                d.set_item("rate_p", r.rate_p)?;
                d.set_item("inv_p", r.inv_p)?;
                d.set_item("inv_curl", r.inv_curl)?;
                d.set_item("inv_r2d", r.inv_r2d)?;
                d.set_item("max_div", r.max_div)?;
                Ok(d)
            })
            .collect()
    }

    fn assertion_failures(&self) -> Vec<String> {
        self.inner.assertion_failures()
    }
}

#[pyfunction]
#[pyo3(signature = (dim, base, levels, methods = vec!["mv".to_string(), "3f".to_string()], mu = 1.0, tol = mvmfem::solver::DEFAULT_TOL, perturb_pressure = false))]
fn run_convergence(
    py: Python<'_>,
    dim: usize,
    base: usize,
    levels: usize,
    methods: Vec<String>,
    mu: f64,
    tol: f64,
    perturb_pressure: bool,
) -> PyResult<PyReport> {
    let mut config = StudyConfig::new(dim, base, levels);
    config.methods = methods
        .iter()
        .map(|m| parse_method(m))
        .collect::<PyResult<_>>()?;
    config.mu = mu;
    config.tol = tol;
    config.perturb_pressure = perturb_pressure;
    let report = py
        .detach(|| mvmfem::run_convergence(&config))
        .map_err(to_py)?;
    Ok(PyReport { inner: report })
}

#[pymodule(name = "mvmfem")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(run_convergence, m)?)?;
    Ok(())
}
