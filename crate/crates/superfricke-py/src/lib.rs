//! Python bindings. Pairs travel as JSON text in the same format the CLI
//! reads; results come back as plain Python objects.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use superfricke::charvar::{evaluate_word, parse_word, RepresentationPair};
use superfricke::cli;
use superfricke::invariants::census::{generator_census, CensusConfig};
use superfricke::sample::DEFAULT_SEED;
use superfricke::scalar::Mode;
use superfricke::verify::{run as run_suite, Suite, VerifyConfig, DEFAULT_SAMPLES};
use superfricke::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Json(_) | Error::Syntax { .. } | Error::Precondition(_) | Error::Central => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Serializes to JSON and hands the text to Python's json module.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn pair(text: &str) -> PyResult<RepresentationPair> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    RepresentationPair::from_json(v.get("pair").unwrap_or(&v)).map_err(to_py_err)
}

fn mode(s: &str) -> PyResult<Mode> {
    match s {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        _ => Err(PyValueError::new_err(format!("mode must be 'exact' or 'float', got {s:?}"))),
    }
}

/// Runs a verification suite and returns one dict per check.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = DEFAULT_SEED, samples = DEFAULT_SAMPLES, mode = "exact"))]
fn verify<'py>(py: Python<'py>, suite: &str, seed: u64, samples: usize, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(PyValueError::new_err)?;
    let cfg = VerifyConfig { seed, samples, mode: self::mode(mode)? };
    let results = py.detach(|| run_suite(suite, &cfg));
    to_py(py, &results)
}

/// Triangulation record of a pair given as JSON text.
#[pyfunction]
fn normal_form<'py>(py: Python<'py>, pair_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let rho = pair(pair_json)?;
    to_py(py, &cli::normal_form(&rho).map_err(to_py_err)?)
}

/// Supertraces of the given words, keyed in the order given.
#[pyfunction]
fn invariants<'py>(py: Python<'py>, pair_json: &str, words: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    let rho = pair(pair_json)?;
    to_py(py, &cli::word_invariants(&rho, &words.join(",")).map_err(to_py_err)?)
}

/// Image of a word as a matrix.
#[pyfunction]
#[pyo3(signature = (pair_json, word = ""))]
fn eval_word<'py>(py: Python<'py>, pair_json: &str, word: &str) -> PyResult<Bound<'py, PyAny>> {
    let rho = pair(pair_json)?;
    let w = parse_word(word).map_err(to_py_err)?;
    to_py(py, &evaluate_word(&w, &rho).map_err(to_py_err)?)
}

#[pyfunction]
#[pyo3(signature = (degree = 4, samples = 1024, seed = DEFAULT_SEED, n = 8))]
fn census<'py>(py: Python<'py>, degree: u32, samples: usize, seed: u64, n: u8) -> PyResult<Bound<'py, PyAny>> {
    if !(1..=16).contains(&n) {
        return Err(PyValueError::new_err(format!("n must be in 1..=16, got {n}")));
    }
    let cfg = CensusConfig { degree, samples, seed, n, ..CensusConfig::default() };
    let report = py.detach(|| generator_census(&cfg)).map_err(to_py_err)?;
    to_py(py, &report)
}

/// Runs the command-line interface in-process: (exit code, stdout, stderr).
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    py.detach(|| {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run(std::iter::once("superfricke".to_string()).chain(args), &mut out, &mut err);
        (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
    })
}

#[pymodule]
#[pyo3(name = "superfricke")]
fn superfricke_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(eval_word, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
