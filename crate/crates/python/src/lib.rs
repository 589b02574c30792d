//! Python bindings. Vectors cross the boundary as lists of residues and
//! matrices as lists of rows.

use std::sync::Arc;

use gid_core::experiment::{run_easy_weights, ExperimentConfig};
use gid_core::geninv;
use gid_core::instance::{self, GenMode};
use gid_core::minsat;
use gid_core::oracle;
use gid_core::rng;
use gid_core::solvers::{
    self, Budget, DecodeResult, Instance, LwpInstance, Outcome, SdpInstance, StrategyConfig,
    StrategyKind,
};
use gid_core::{FieldVector, Form, Matrix, PrimeField, Transformation};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: gid_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(q: u64) -> PyResult<PrimeField> {
    PrimeField::new(q).map_err(err)
}

fn vector(f: PrimeField, v: &[u32]) -> PyResult<FieldVector> {
    FieldVector::from_residues(f, v).map_err(err)
}

#[pyclass(name = "Matrix", module = "gid", frozen)]
struct PyMatrix {
    inner: Matrix,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(q: u64, rows: Vec<Vec<u32>>) -> PyResult<Self> {
        let inner = Matrix::from_rows(field(q)?, &rows).map_err(err)?;
        Ok(PyMatrix { inner })
    }

    /// Uniform full-row-rank `m x n` matrix.
    #[staticmethod]
    fn random_full_rank(q: u64, m: usize, n: usize, seed: u64) -> PyResult<Self> {
        let inner = Matrix::random_full_row_rank(field(q)?, m, n, &mut rng::stream(seed, 0))
            .map_err(err)?;
        Ok(PyMatrix { inner })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.field().q()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.n_rows(), self.inner.n_cols())
    }

    fn rows(&self) -> Vec<Vec<u32>> {
        self.inner.to_residues()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn mul_vec(&self, v: Vec<u32>) -> PyResult<Vec<u32>> {
        let v = vector(self.inner.field(), &v)?;
        Ok(self.inner.mul_vec(&v).map_err(err)?.to_residues())
    }

    fn __matmul__(&self, other: PyRef<'_, PyMatrix>) -> PyResult<Self> {
        let inner = self.inner.mul(&other.inner).map_err(err)?;
        Ok(PyMatrix { inner })
    }

    fn __eq__(&self, other: PyRef<'_, PyMatrix>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let (m, n) = self.shape();
        format!("Matrix(q={}, shape=({m}, {n}))", self.q())
    }
}

#[pyclass(name = "Transformation", module = "gid", frozen)]
struct PyTransformation {
    inner: Arc<Transformation>,
}

#[pymethods]
impl PyTransformation {
    #[getter]
    fn form(&self) -> String {
        self.inner.form().to_string()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn p(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.p().clone(),
        }
    }

    /// Column permutation as 0-based images: `Q e_i = e_{perm[i]}`.
    fn q_map(&self) -> Vec<usize> {
        self.inner.q().map().to_vec()
    }

    /// `P·A·Q`.
    fn canonical(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.canonical(),
        }
    }

    fn transform_rhs(&self, b: Vec<u32>) -> PyResult<Vec<u32>> {
        let b = vector(self.inner.field(), &b)?;
        Ok(self.inner.transform_rhs(&b).map_err(err)?.to_residues())
    }

    fn verify(&self, a: PyRef<'_, PyMatrix>) -> bool {
        self.inner.verify(&a.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Transformation(form={}, m={}, n={}, rank={})",
            self.inner.form(),
            self.inner.m(),
            self.inner.n(),
            self.inner.rank()
        )
    }
}

fn parse_form(form: &str, ell: Option<usize>, ells: Option<Vec<usize>>) -> PyResult<Form> {
    Ok(match form {
        "right_id_full" => Form::RightIdFull,
        "left_id_full" => Form::LeftIdFull,
        "right_id_deficient" => Form::RightIdDeficient,
        "left_id_deficient" => Form::LeftIdDeficient,
        "partial_ge" => {
            Form::PartialGe(ell.ok_or_else(|| PyValueError::new_err("partial_ge needs ell"))?)
        }
        "multi_id" => {
            Form::MultiId(ells.ok_or_else(|| PyValueError::new_err("multi_id needs ells"))?)
        }
        other => return Err(PyValueError::new_err(format!("unknown form '{other}'"))),
    })
}

/// Random decomposition `P·A·Q` of the requested form.
#[pyfunction]
#[pyo3(signature = (a, form = "right_id_full", seed = 0, ell = None, ells = None))]
fn decompose(
    a: PyRef<'_, PyMatrix>,
    form: &str,
    seed: u64,
    ell: Option<usize>,
    ells: Option<Vec<usize>>,
) -> PyResult<PyTransformation> {
    let form = parse_form(form, ell, ells)?;
    let t = gid_core::decompose(&a.inner, form, &mut rng::stream(seed, 0)).map_err(err)?;
    Ok(PyTransformation { inner: Arc::new(t) })
}

#[pyfunction]
fn is_gi(a: PyRef<'_, PyMatrix>, x: PyRef<'_, PyMatrix>) -> PyResult<bool> {
    geninv::is_gi(&a.inner, &x.inner).map_err(err)
}

#[pyfunction]
fn gi_from_x1(t: PyRef<'_, PyTransformation>, x1: PyRef<'_, PyMatrix>) -> PyResult<PyMatrix> {
    let gi = geninv::gi_from_x1(&t.inner, x1.inner.clone()).map_err(err)?;
    Ok(PyMatrix {
        inner: gi.matrix().clone(),
    })
}

/// Every generalized inverse reachable from `t` (small cases only).
#[pyfunction]
fn enumerate_gi(t: PyRef<'_, PyTransformation>) -> PyResult<Vec<PyMatrix>> {
    Ok(geninv::enumerate_gi(&t.inner)
        .map_err(err)?
        .map(|g| PyMatrix {
            inner: g.matrix().clone(),
        })
        .collect())
}

#[pyfunction]
fn null_from_w(t: PyRef<'_, PyTransformation>, bbar: Vec<u32>, w: Vec<u32>) -> PyResult<Vec<u32>> {
    let f = t.inner.field();
    let v = geninv::null_from_w(&t.inner, &vector(f, &bbar)?, &vector(f, &w)?).map_err(err)?;
    Ok(v.to_residues())
}

#[pyclass(name = "SdpInstance", module = "gid", frozen)]
struct PySdp {
    inner: SdpInstance,
}

#[pymethods]
impl PySdp {
    #[new]
    fn new(h: PyRef<'_, PyMatrix>, s: Vec<u32>, t: usize) -> PyResult<Self> {
        let s = vector(h.inner.field(), &s)?;
        let inner = SdpInstance::new(h.inner.clone(), s, t).map_err(err)?;
        Ok(PySdp { inner })
    }

    #[getter]
    fn h(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.h.clone(),
        }
    }

    #[getter]
    fn s(&self) -> Vec<u32> {
        self.inner.s.to_residues()
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn verify(&self, x: Vec<u32>) -> PyResult<bool> {
        let x = vector(self.inner.h.field(), &x)?;
        Ok(solvers::verify_sdp(&self.inner, &x))
    }

    fn to_text(&self) -> String {
        instance::write_instance(&Instance::Sdp(self.inner.clone()))
    }

    fn __repr__(&self) -> String {
        format!(
            "SdpInstance(n={}, k={}, q={}, t={})",
            self.inner.n(),
            self.inner.k(),
            self.inner.h.field().q(),
            self.inner.t
        )
    }
}

#[pyclass(name = "LwpInstance", module = "gid", frozen)]
struct PyLwp {
    inner: LwpInstance,
}

#[pymethods]
impl PyLwp {
    #[new]
    fn new(h: PyRef<'_, PyMatrix>, t: usize) -> PyResult<Self> {
        let inner = LwpInstance::new(h.inner.clone(), t).map_err(err)?;
        Ok(PyLwp { inner })
    }

    #[getter]
    fn h(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.h.clone(),
        }
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t
    }

    fn verify(&self, x: Vec<u32>) -> PyResult<bool> {
        let x = vector(self.inner.h.field(), &x)?;
        Ok(solvers::verify_lwp(&self.inner, &x))
    }

    fn to_text(&self) -> String {
        instance::write_instance(&Instance::Lwp(self.inner.clone()))
    }

    fn __repr__(&self) -> String {
        format!(
            "LwpInstance(n={}, k={}, q={}, t={})",
            self.inner.n(),
            self.inner.k(),
            self.inner.h.field().q(),
            self.inner.t
        )
    }
}

#[pyclass(name = "DecodeResult", module = "gid", frozen, get_all)]
struct PyDecodeResult {
    found: bool,
    x: Option<Vec<u32>>,
    weight: Option<usize>,
    decompositions_used: usize,
    samples_used: u64,
    elapsed: f64,
    seed: u64,
}

#[pymethods]
impl PyDecodeResult {
    fn __repr__(&self) -> String {
        match self.weight {
            Some(w) => format!(
                "DecodeResult(found, weight={w}, decompositions={})",
                self.decompositions_used
            ),
            None => format!(
                "DecodeResult(fail, decompositions={})",
                self.decompositions_used
            ),
        }
    }
}

impl From<DecodeResult> for PyDecodeResult {
    fn from(r: DecodeResult) -> Self {
        let (x, weight) = match &r.outcome {
            Outcome::Found { x, weight } => (Some(x.to_residues()), Some(*weight)),
            Outcome::Fail => (None, None),
        };
        PyDecodeResult {
            found: x.is_some(),
            x,
            weight,
            decompositions_used: r.decompositions_used,
            samples_used: r.samples_used,
            elapsed: r.elapsed.as_secs_f64(),
            seed: r.seed,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn search_config(
    strategy: &str,
    seed: u64,
    p: Option<usize>,
    ell: Option<usize>,
    ell_list: Option<Vec<usize>>,
    samples: Option<usize>,
    budget_decomps: usize,
    budget_samples: Option<usize>,
    threads: usize,
) -> PyResult<(StrategyConfig, Budget)> {
    let kind: StrategyKind = strategy.parse().map_err(err)?;
    let mut cfg = StrategyConfig::new(kind, seed).with_ell_list(ell_list.unwrap_or_default());
    cfg.p = p;
    cfg.ell = ell;
    cfg.samples_per_decomposition = samples;
    let budget = Budget {
        max_decompositions: budget_decomps,
        max_samples_per_decomposition: budget_samples,
        wall_clock_limit: None,
        workers: threads,
    };
    Ok((cfg, budget))
}

/// Search `x` with `H·x = s` and `|x| <= t`.
#[pyfunction]
#[pyo3(signature = (inst, strategy = "lee_brickell", seed = 0, p = None, ell = None, ell_list = None, samples = None, budget_decomps = 100, budget_samples = None, threads = 1))]
#[allow(clippy::too_many_arguments)]
fn solve_cwp(
    py: Python<'_>,
    inst: PyRef<'_, PySdp>,
    strategy: &str,
    seed: u64,
    p: Option<usize>,
    ell: Option<usize>,
    ell_list: Option<Vec<usize>>,
    samples: Option<usize>,
    budget_decomps: usize,
    budget_samples: Option<usize>,
    threads: usize,
) -> PyResult<PyDecodeResult> {
    let (cfg, budget) = search_config(
        strategy,
        seed,
        p,
        ell,
        ell_list,
        samples,
        budget_decomps,
        budget_samples,
        threads,
    )?;
    let inst = inst.inner.clone();
    let res = py.detach(|| solvers::solve_cwp(&inst, &cfg, &budget));
    Ok(res.map_err(err)?.into())
}

/// Search a nonzero codeword of weight at most `t`.
#[pyfunction]
#[pyo3(signature = (inst, strategy = "lee_brickell", seed = 0, p = None, ell = None, ell_list = None, samples = None, budget_decomps = 100, budget_samples = None, threads = 1))]
#[allow(clippy::too_many_arguments)]
fn solve_swp(
    py: Python<'_>,
    inst: PyRef<'_, PyLwp>,
    strategy: &str,
    seed: u64,
    p: Option<usize>,
    ell: Option<usize>,
    ell_list: Option<Vec<usize>>,
    samples: Option<usize>,
    budget_decomps: usize,
    budget_samples: Option<usize>,
    threads: usize,
) -> PyResult<PyDecodeResult> {
    let (cfg, budget) = search_config(
        strategy,
        seed,
        p,
        ell,
        ell_list,
        samples,
        budget_decomps,
        budget_samples,
        threads,
    )?;
    let inst = inst.inner.clone();
    let res = py.detach(|| solvers::solve_swp(&inst, &cfg, &budget));
    Ok(res.map_err(err)?.into())
}

/// Returns `(instance, planted_error)`; the error is `None` in random mode.
#[pyfunction]
#[pyo3(signature = (n, k, q, t, seed, mode = "random"))]
fn gen_instance(
    n: usize,
    k: usize,
    q: u64,
    t: usize,
    seed: u64,
    mode: &str,
) -> PyResult<(PySdp, Option<Vec<u32>>)> {
    let mode: GenMode = mode.parse().map_err(err)?;
    let g = instance::gen_instance(n, k, q, t, mode, seed).map_err(err)?;
    Ok((
        PySdp { inner: g.instance },
        g.planted.map(|e| e.to_residues()),
    ))
}

#[pyfunction]
fn gen_lwp_instance(n: usize, k: usize, q: u64, t: usize, seed: u64) -> PyResult<PyLwp> {
    let inner = instance::gen_lwp_instance(n, k, q, t, seed).map_err(err)?;
    Ok(PyLwp { inner })
}

/// Parses `.gid` text into an `SdpInstance` or an `LwpInstance`.
#[pyfunction]
fn read_instance(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(match instance::read_instance(text).map_err(err)? {
        Instance::Sdp(inner) => Py::new(py, PySdp { inner })?.into_any(),
        Instance::Lwp(inner) => Py::new(py, PyLwp { inner })?.into_any(),
    })
}

fn reduce(
    h: &Matrix,
    s: Option<Vec<u32>>,
) -> PyResult<(minsat::MinSatInstance, minsat::LiftContext)> {
    match s {
        Some(s) => minsat::reduce_cwp(h, &vector(h.field(), &s)?),
        None => minsat::reduce_swp(h),
    }
    .map_err(err)
}

/// Affine MIN-SAT text for `H·x = s` (or the code of `H` when `s` is omitted).
#[pyfunction]
#[pyo3(signature = (h, s = None))]
fn to_minsat(h: PyRef<'_, PyMatrix>, s: Option<Vec<u32>>) -> PyResult<String> {
    Ok(reduce(&h.inner, s)?.0.to_affsat())
}

/// Brute-force optimum of the reduced instance, lifted back:
/// `(weight, solution)`. Without `s` the zero codeword is skipped and the
/// result is `None` when the code is trivial.
#[pyfunction]
#[pyo3(signature = (h, s = None))]
fn brute_minsat(
    h: PyRef<'_, PyMatrix>,
    s: Option<Vec<u32>>,
) -> PyResult<Option<(usize, Vec<u32>)>> {
    let codeword = s.is_none();
    let (inst, ctx) = reduce(&h.inner, s)?;
    let best = if codeword {
        minsat::brute_minsat_nonzero(&inst).map_err(err)?
    } else {
        Some(minsat::brute_minsat(&inst).map_err(err)?)
    };
    best.map(|(g, mu)| Ok((mu, minsat::lift(&ctx, &g).map_err(err)?.to_residues())))
        .transpose()
}

/// Every solution of `A·x = b`, by exhaustive enumeration.
#[pyfunction]
fn enum_coset(a: PyRef<'_, PyMatrix>, b: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
    let b = vector(a.inner.field(), &b)?;
    let rep = oracle::enum_coset(&a.inner, &b).map_err(err)?;
    Ok(rep.solutions.iter().map(FieldVector::to_residues).collect())
}

#[pyfunction]
fn gv_threshold(n: u64, k: u64, q: u64) -> PyResult<u64> {
    oracle::gv_threshold(n, k, q).map_err(err)
}

/// Weight coverage experiment; returns a dict with the reached weights,
/// their interval and the CSV report.
#[pyfunction]
#[pyo3(signature = (n, k, q, seed, iterations = 10, decompositions = 1))]
fn easy_weights<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    q: u64,
    seed: u64,
    iterations: usize,
    decompositions: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = ExperimentConfig::new(n, k, q, seed);
    cfg.iterations = iterations;
    cfg.decompositions = decompositions;
    let out = py.detach(|| run_easy_weights(&cfg)).map_err(err)?;
    let mut csv = Vec::new();
    out.report.write_csv(&mut csv).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item(
        "reached",
        out.report.reached().into_iter().collect::<Vec<_>>(),
    )?;
    d.set_item("interval", out.report.interval())?;
    d.set_item("elapsed_ms", out.report.elapsed_ms)?;
    d.set_item("csv", String::from_utf8_lossy(&csv).into_owned())?;
    Ok(d)
}

#[pymodule]
fn gid(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyTransformation>()?;
    m.add_class::<PySdp>()?;
    m.add_class::<PyLwp>()?;
    m.add_class::<PyDecodeResult>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(is_gi, m)?)?;
    m.add_function(wrap_pyfunction!(gi_from_x1, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_gi, m)?)?;
    m.add_function(wrap_pyfunction!(null_from_w, m)?)?;
    m.add_function(wrap_pyfunction!(solve_cwp, m)?)?;
    m.add_function(wrap_pyfunction!(solve_swp, m)?)?;
    m.add_function(wrap_pyfunction!(gen_instance, m)?)?;
    m.add_function(wrap_pyfunction!(gen_lwp_instance, m)?)?;
    m.add_function(wrap_pyfunction!(read_instance, m)?)?;
    m.add_function(wrap_pyfunction!(to_minsat, m)?)?;
    m.add_function(wrap_pyfunction!(brute_minsat, m)?)?;
    m.add_function(wrap_pyfunction!(enum_coset, m)?)?;
    m.add_function(wrap_pyfunction!(gv_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(easy_weights, m)?)?;
    Ok(())
}
