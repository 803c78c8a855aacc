//! Python bindings: dimension formulas, spectra, tables and the oracle.

use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lichnerowicz::dims::{self, PrimitiveCase, SpaceQuery};
use lichnerowicz::oracle::{self, Grid, Status, Suite};
use lichnerowicz::spectra::{self, TableName};
use lichnerowicz::{linalg, spaces, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Usage(_) => PyValueError::new_err(e.to_string()),
        Error::Resource { .. } => PyMemoryError::new_err(e.to_string()),
        Error::Verification { .. } => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn parse_case(name: &str) -> PyResult<PrimitiveCase> {
    PrimitiveCase::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown case {name:?}")))
}

/// Index tuple `(n, p, q, k, l)` of a polynomial tensor space.
#[pyclass(name = "SpaceQuery", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PySpaceQuery {
    inner: SpaceQuery,
}

#[pymethods]
impl PySpaceQuery {
    #[new]
    fn new(n: usize, p: i64, q: i64, k: i64, l: i64) -> PyResult<Self> {
        if n == 0 || p < 0 || q < 0 || k < 0 || l < 0 {
            return Err(PyValueError::new_err("need n >= 1 and nonnegative p, q, k, l"));
        }
        Ok(PySpaceQuery {
            inner: SpaceQuery::new(n, p, q, k, l),
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }
    #[getter]
    fn p(&self) -> i64 {
        self.inner.p
    }
    #[getter]
    fn q(&self) -> i64 {
        self.inner.q
    }
    #[getter]
    fn k(&self) -> i64 {
        self.inner.k
    }
    #[getter]
    fn l(&self) -> i64 {
        self.inner.l
    }

    fn is_circle_invariant(&self) -> bool {
        self.inner.is_circle_invariant()
    }

    /// Closed-form dimension of `SP`.
    fn dim_sp(&self) -> num_bigint::BigInt {
        dims::dim_sp(&self.inner)
    }

    /// Closed-form dimension of `SH`.
    fn dim_sh(&self) -> num_bigint::BigInt {
        dims::dim_sh(&self.inner)
    }

    /// Closed-form dimension of `T`.
    fn dim_t(&self) -> num_bigint::BigInt {
        dims::dim_t(&self.inner)
    }

    /// Dimension of a primitive subspace, e.g. `case="grad-grad"`.
    fn dim_primitive(&self, case: &str) -> PyResult<num_bigint::BigUint> {
        dims::dim_primitive(&self.inner, parse_case(case)?).map_err(py_err)
    }

    /// Dimension of `T` by exact elimination.
    fn brute_dim_t(&self, py: Python<'_>) -> PyResult<usize> {
        let q = self.inner;
        py.detach(|| spaces::brute_dim_t(&q)).map_err(py_err)
    }

    /// Dimension of a primitive subspace by exact elimination.
    fn brute_dim_primitive(&self, py: Python<'_>, case: &str) -> PyResult<usize> {
        let (q, c) = (self.inner, parse_case(case)?);
        py.detach(|| spaces::brute_dim_primitive(&q, c)).map_err(py_err)
    }

    /// `(r, s, case, dim)` for each piece of the `T`-space.
    fn decompose_t(&self, py: Python<'_>) -> PyResult<Vec<(i64, i64, String, usize)>> {
        let q = self.inner;
        let pieces = py.detach(|| spaces::decompose_t(&q)).map_err(py_err)?;
        Ok(pieces.iter().map(|pc| (pc.r, pc.s, pc.case.name().to_string(), pc.space.dim())).collect())
    }

    fn __repr__(&self) -> String {
        let q = &self.inner;
        format!("SpaceQuery(n={}, p={}, q={}, k={}, l={})", q.n, q.p, q.q, q.k, q.l)
    }
}

#[pyfunction]
fn lambda_lemma34(n: i64, p: i64, q: i64, k: i64, l: i64, r: i64, s: i64) -> PyResult<i64> {
    spectra::lambda_lemma34(n, p, q, k, l, r, s).map_err(py_err)
}

#[pyfunction]
fn lambda_thm32(n: i64, p: i64, l: i64, m: i64, k: i64, r: i64, s: i64) -> i64 {
    spectra::lambda_thm32(n, p, l, m, k, r, s)
}

/// `[(eigenvalue, multiplicity), ...]` up to `max_eig`.
#[pyfunction]
fn spectrum(py: Python<'_>, n: usize, p: i64, q: i64, max_eig: i64) -> PyResult<Vec<(i64, num_bigint::BigUint)>> {
    let report = py.detach(|| spectra::spectrum(n, p, q, max_eig)).map_err(py_err)?;
    Ok(report.lines.into_iter().map(|l| (l.eigenvalue, l.multiplicity)).collect())
}

/// Full spectrum report, with pieces and discrepancies, as JSON.
#[pyfunction]
fn spectrum_json(py: Python<'_>, n: usize, p: i64, q: i64, max_eig: i64) -> PyResult<String> {
    let report = py.detach(|| spectra::spectrum(n, p, q, max_eig)).map_err(py_err)?;
    json(&report)
}

/// A named table (`"II"` ... `"VIII"`) as JSON.
#[pyfunction]
#[pyo3(signature = (name, n, index_max = 2))]
fn table_json(py: Python<'_>, name: &str, n: usize, index_max: i64) -> PyResult<String> {
    let name = TableName::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown table {name:?}")))?;
    let table = py.detach(|| spectra::render_named_table(name, n, index_max)).map_err(py_err)?;
    json(&table)
}

/// Apply the Laplacian to the piece `(r, s)` of the traceless core at
/// `(n, p, l, k)`; returns the realized eigenvalue or `None`.
#[pyfunction]
fn eigencheck(py: Python<'_>, n: usize, p: i64, l: i64, k: i64, r: i64, s: i64) -> PyResult<Option<i64>> {
    let entry = py.detach(|| oracle::verify_eigen_piece(n, p, l, k, r, s)).map_err(py_err)?;
    Ok(entry.witness.get("realized").and_then(|v| v.parse().ok()))
}

/// Run an oracle suite; returns `(pass, fail, paper_discrepancy)` counts.
#[pyfunction]
#[pyo3(signature = (suite = "all", grid = "small"))]
fn verify(py: Python<'_>, suite: &str, grid: &str) -> PyResult<(usize, usize, usize)> {
    let suite = Suite::parse(suite).ok_or_else(|| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
    let grid = Grid::parse(grid).ok_or_else(|| PyValueError::new_err(format!("unknown grid {grid:?}")))?;
    let report = py.detach(|| oracle::verify(suite, grid)).map_err(py_err)?;
    Ok((report.count(Status::Pass), report.count(Status::Fail), report.count(Status::PaperDiscrepancy)))
}

/// Largest ambient dimension a basis may have before elimination refuses.
#[pyfunction]
fn set_ambient_cap(cap: usize) {
    linalg::set_ambient_cap(cap);
}

#[pymodule]
#[pyo3(name = "lichnerowicz")]
fn lichnerowicz_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpaceQuery>()?;
    m.add_function(wrap_pyfunction!(lambda_lemma34, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_thm32, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_json, m)?)?;
    m.add_function(wrap_pyfunction!(table_json, m)?)?;
    m.add_function(wrap_pyfunction!(eigencheck, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(set_ambient_cap, m)?)?;
    Ok(())
}
