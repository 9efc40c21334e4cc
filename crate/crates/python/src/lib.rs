use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use outwalk_core::freegroup::{Automorphism, CyclicWord, Elementary, Rank, ReducedWord};
use outwalk_core::outer_space::{self, LengthLiteral, RosePoint, RosePointSpec};
use outwalk_core::report::{self, Command};
use outwalk_core::tree::{self, BoundaryPoint, Point, TreePoint};
use outwalk_core::verify::{run_suite, Suite};
use outwalk_core::walk::{self, Experiment, DEFAULT_SEARCH_DEPTH};

create_exception!(outwalk, OutwalkError, PyValueError);

fn err(e: outwalk_core::Error) -> PyErr {
    OutwalkError::new_err(e.to_string())
}

fn rank(n: usize) -> PyResult<Rank> {
    Rank::new(n).map_err(err)
}

/// A reduced word in F_n; letters `a..p` are generators, `A..P` inverses.
#[pyclass(name = "Word", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyWord {
    inner: ReducedWord,
    rank: Rank,
}

#[pymethods]
impl PyWord {
    #[new]
    #[pyo3(signature = (text, rank = 2))]
    fn new(text: &str, rank: usize) -> PyResult<Self> {
        let r = self::rank(rank)?;
        Ok(PyWord {
            inner: ReducedWord::parse(text, r).map_err(err)?,
            rank: r,
        })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.rank.get()
    }

    fn inverse(&self) -> Self {
        PyWord {
            inner: self.inner.inverse(),
            rank: self.rank,
        }
    }

    /// The class of this word up to conjugacy, as its canonical cyclic word.
    fn conjugacy_class(&self) -> String {
        CyclicWord::from_word(&self.inner).to_string()
    }

    fn __mul__(&self, other: &PyWord) -> PyResult<Self> {
        if self.rank != other.rank {
            return Err(PyValueError::new_err("rank mismatch"));
        }
        Ok(PyWord {
            inner: self.inner.mul(&other.inner),
            rank: self.rank,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word('{}', rank={})", self.inner, self.rank.get())
    }
}

/// An automorphism of F_n stored as a trace of elementary Nielsen moves.
#[pyclass(name = "Automorphism", frozen, from_py_object)]
#[derive(Clone)]
struct PyAutomorphism {
    inner: Automorphism,
}

#[pymethods]
impl PyAutomorphism {
    #[staticmethod]
    fn identity(rank: usize) -> PyResult<Self> {
        Ok(PyAutomorphism {
            inner: Automorphism::identity(self::rank(rank)?),
        })
    }

    /// From ids such as `["rmul(1,2,+)", "swap(1,2)"]`, applied left to right.
    #[staticmethod]
    #[pyo3(signature = (trace, rank = 2))]
    fn from_trace(trace: Vec<String>, rank: usize) -> PyResult<Self> {
        let steps = trace
            .iter()
            .map(|s| s.parse::<Elementary>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(PyAutomorphism {
            inner: Automorphism::from_trace(self::rank(rank)?, &steps).map_err(err)?,
        })
    }

    /// From an images literal such as `"a>ab; b>b"`.
    #[staticmethod]
    #[pyo3(signature = (literal, rank = 2, search_depth = DEFAULT_SEARCH_DEPTH))]
    fn from_images(literal: &str, rank: usize, search_depth: usize) -> PyResult<Self> {
        Ok(PyAutomorphism {
            inner: Automorphism::parse_literal(literal, self::rank(rank)?, search_depth).map_err(err)?,
        })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank().get()
    }

    #[getter]
    fn images(&self) -> Vec<String> {
        self.inner.images().iter().map(|w| w.to_string()).collect()
    }

    #[getter]
    fn trace(&self) -> Vec<String> {
        self.inner.trace().iter().map(|e| e.to_string()).collect()
    }

    fn apply(&self, word: &str) -> PyResult<String> {
        let w = ReducedWord::parse(word, self.inner.rank()).map_err(err)?;
        Ok(self.inner.apply(&w).map_err(err)?.to_string())
    }

    /// Image of a conjugacy class, as a canonical cyclic word.
    fn apply_class(&self, class: &str) -> PyResult<String> {
        let g = CyclicWord::parse(class, self.inner.rank()).map_err(err)?;
        Ok(self.inner.apply_cyclic(&g).map_err(err)?.to_string())
    }

    /// `self ∘ other`.
    fn compose(&self, other: &PyAutomorphism) -> PyResult<Self> {
        Ok(PyAutomorphism {
            inner: self.inner.compose(&other.inner).map_err(err)?,
        })
    }

    fn invert(&self) -> Self {
        PyAutomorphism {
            inner: self.inner.invert(),
        }
    }

    /// `κ(Φ) = d(Φ·o, o)` from the unit rose.
    fn kappa(&self) -> f64 {
        outer_space::kappa(&self.inner)
    }

    /// `σ(Φ, g) = log ‖Φ(g)‖ / ‖g‖`.
    fn length_cocycle(&self, class: &str) -> PyResult<f64> {
        let g = CyclicWord::parse_nontrivial(class, self.inner.rank()).map_err(err)?;
        outer_space::length_cocycle(&self.inner, &g).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.images_literal()
    }

    fn __repr__(&self) -> String {
        format!("Automorphism('{}')", self.inner.images_literal())
    }
}

/// A marked metric rose of volume one.
#[pyclass(name = "Rose", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRose {
    inner: RosePoint,
}

#[pymethods]
impl PyRose {
    /// `lengths` are rationals such as `"9/10"` (exact) or floats.
    #[new]
    #[pyo3(signature = (lengths, marking = None))]
    fn new(lengths: Vec<Bound<'_, PyAny>>, marking: Option<PyAutomorphism>) -> PyResult<Self> {
        let lengths = lengths
            .iter()
            .map(|l| match l.extract::<String>() {
                Ok(s) => Ok(LengthLiteral::Rational(s)),
                Err(_) => l.extract::<f64>().map(LengthLiteral::Float),
            })
            .collect::<PyResult<Vec<_>>>()?;
        let r = rank(lengths.len())?;
        let spec = RosePointSpec {
            lengths,
            marking_trace: Vec::new(),
        };
        let mut inner = spec.build(r).map_err(err)?;
        if let Some(m) = marking {
            inner = RosePoint::from_weights(inner.weights().to_vec(), m.inner).map_err(err)?;
        }
        Ok(PyRose { inner })
    }

    #[staticmethod]
    fn unit(rank: usize) -> PyResult<Self> {
        Ok(PyRose {
            inner: RosePoint::unit(self::rank(rank)?),
        })
    }

    #[getter]
    fn lengths(&self) -> Vec<f64> {
        self.inner.lengths()
    }

    #[getter]
    fn marking(&self) -> PyAutomorphism {
        PyAutomorphism {
            inner: self.inner.marking().clone(),
        }
    }

    /// `Φ·T`: the marking becomes `Φ ∘ Ψ`.
    fn act(&self, phi: &PyAutomorphism) -> PyResult<Self> {
        Ok(PyRose {
            inner: self.inner.act(&phi.inner).map_err(err)?,
        })
    }

    fn translation_length(&self, class: &str) -> PyResult<f64> {
        let g = CyclicWord::parse_nontrivial(class, self.inner.rank()).map_err(err)?;
        outer_space::translation_length(&g, &self.inner).map_err(err)
    }

    /// Asymmetric Lipschitz distance `d(self, other)`.
    fn distance_to(&self, other: &PyRose) -> PyResult<f64> {
        outer_space::lipschitz_distance(&self.inner, &other.inner).map_err(err)
    }

    /// `exp d(self, other)` as a reduced fraction `"p/q"`.
    fn stretch_to(&self, other: &PyRose) -> PyResult<String> {
        Ok(outer_space::lipschitz_ratio(&self.inner, &other.inner)
            .map_err(err)?
            .reduced()
            .to_string())
    }

    fn symmetric_distance(&self, other: &PyRose) -> PyResult<f64> {
        outer_space::sym_distance(&self.inner, &other.inner).map_err(err)
    }
}

/// An eventually periodic point of the tree's boundary, e.g. `"pre:ab per:b"`.
#[pyclass(name = "Boundary", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyBoundary {
    inner: BoundaryPoint,
}

#[pymethods]
impl PyBoundary {
    #[new]
    #[pyo3(signature = (text, rank = 2))]
    fn new(text: &str, rank: usize) -> PyResult<Self> {
        Ok(PyBoundary {
            inner: BoundaryPoint::parse(text, self::rank(rank)?).map_err(err)?,
        })
    }

    fn prefix(&self, len: usize) -> PyResult<String> {
        Ok(self.inner.prefix(len).map_err(err)?.to_string())
    }

    /// `g·ξ`.
    fn act(&self, g: &PyWord) -> PyResult<Self> {
        Ok(PyBoundary {
            inner: tree::boundary_action(&g.inner, &self.inner).map_err(err)?,
        })
    }

    /// `β(g, ξ)`.
    fn busemann(&self, g: &PyWord) -> PyResult<i64> {
        tree::busemann(&g.inner, &self.inner).map_err(err)
    }

    /// `(ξ|η)_o`; `None` when the points coincide.
    fn gromov_product(&self, other: &PyBoundary) -> PyResult<Option<u64>> {
        let (x, y) = (Point::from(self.inner.clone()), Point::from(other.inner.clone()));
        Ok(tree::gromov_product(&x, &y).map_err(err)?.finite())
    }

    /// Distance from the vertex `w·o` to the ray from `o` to `ξ`.
    fn tracking_distance(&self, w: &PyWord) -> PyResult<u64> {
        tree::tracking_distance(&TreePoint::from(w.inner.clone()), &self.inner).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Boundary('{}')", self.inner)
    }
}

/// Runs an invariant suite; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 0))]
fn verify(suite: &str, seed: u64) -> PyResult<String> {
    let suite: Suite = suite.parse().map_err(err)?;
    let report = run_suite(suite, seed, None);
    serde_json::to_string(&report).map_err(|e| OutwalkError::new_err(e.to_string()))
}

/// Samples every trial of a JSON experiment config.
///
/// Returns one dict per trial with `steps`, `kappa` and `sigma` (one list per
/// tracked observable).
#[pyfunction]
#[pyo3(signature = (config, threads = 0, seed = None))]
fn sample_paths<'py>(
    py: Python<'py>,
    config: &str,
    threads: usize,
    seed: Option<u64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut exp = Experiment::from_json(config).map_err(err)?;
    if let Some(s) = seed {
        exp.config.seed = s;
        exp.walk_config.master_seed = s;
    }
    let records = py
        .detach(|| walk::run_experiment(&exp.walk, &exp.walk_config, threads))
        .map_err(err)?;
    records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("trial", r.trial)?;
            d.set_item("steps", r.checkpoints.iter().map(|c| c.step).collect::<Vec<_>>())?;
            d.set_item("kappa", r.checkpoints.iter().map(|c| c.kappa).collect::<Vec<_>>())?;
            let width = r.checkpoints.first().map_or(0, |c| c.sigma.len());
            let sigma: Vec<Vec<f64>> = (0..width)
                .map(|j| r.checkpoints.iter().map(|c| c.sigma[j]).collect())
                .collect();
            d.set_item("sigma", sigma)?;
            Ok(d)
        })
        .collect()
}

/// Runs a CLI command on a config file, writing artifacts to `out`.
/// Returns the JSON summary.
#[pyfunction]
#[pyo3(signature = (command, config_path, out, threads = 0))]
fn run(py: Python<'_>, command: &str, config_path: PathBuf, out: PathBuf, threads: usize) -> PyResult<String> {
    let command: Command = command.parse().map_err(err)?;
    let bytes = std::fs::read(&config_path).map_err(|e| err(outwalk_core::Error::io(&config_path, e)))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| err(outwalk_core::Error::io(&config_path, e)))?;
    let exp = Experiment::from_json(text).map_err(err)?;
    let outcome = py
        .detach(|| report::run_command(command, &exp, &bytes, &out, threads))
        .map_err(err)?;
    serde_json::to_string(&outcome.summary).map_err(|e| OutwalkError::new_err(e.to_string()))
}

#[pymodule]
fn outwalk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("OutwalkError", m.py().get_type::<OutwalkError>())?;
    m.add_class::<PyWord>()?;
    m.add_class::<PyAutomorphism>()?;
    m.add_class::<PyRose>()?;
    m.add_class::<PyBoundary>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sample_paths, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
