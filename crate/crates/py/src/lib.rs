//! Python bindings: exponent pairs, field Gamma/Beta, closed-form right-hand
//! sides, domain checks, and Monte Carlo verification.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::json;

use cselberg::exponents::{complex_power, FieldExponent};
use cselberg::gamma::{beta_field, gamma_field, Classification};
use cselberg::verify::{verify as run_verify, IdentitySpec};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_exponent(s: &str) -> PyResult<FieldExponent> {
    s.parse().map_err(value_err)
}

fn load_spec(identity: &str, params_json: &str) -> PyResult<IdentitySpec> {
    let params: serde_json::Value = serde_json::from_str(params_json).map_err(value_err)?;
    serde_json::from_value(json!({"identity": identity, "params": params})).map_err(value_err)
}

/// Exponent pair a|a' with integer offset a - a'.
#[pyclass(name = "FieldExponent")]
#[derive(Clone)]
struct PyFieldExponent {
    inner: FieldExponent,
}

#[pymethods]
impl PyFieldExponent {
    #[new]
    #[pyo3(signature = (re, im = 0.0, offset = 0))]
    fn new(re: f64, im: f64, offset: i64) -> Self {
        PyFieldExponent {
            inner: FieldExponent::new(Complex64::new(re, im), offset),
        }
    }

    /// Parse the text form "a_re+a_im i|k".
    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        Ok(PyFieldExponent {
            inner: parse_exponent(s)?,
        })
    }

    #[getter]
    fn floor(&self) -> f64 {
        self.inner.floor()
    }

    #[getter]
    fn offset(&self) -> i64 {
        self.inner.offset
    }

    fn __add__(&self, other: &PyFieldExponent) -> Self {
        PyFieldExponent {
            inner: self.inner.add(&other.inner),
        }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("FieldExponent({})", self.inner)
    }
}

/// Gamma of the complex field; returns ((re, im), classification).
#[pyfunction]
fn gamma(exponent: &str) -> PyResult<((f64, f64), String)> {
    let e = parse_exponent(exponent)?;
    let g = gamma_field(&e);
    let class = match g.classification {
        Classification::Regular => "regular",
        Classification::Pole => "pole",
        Classification::Zero => "zero",
    };
    Ok(((g.value.re, g.value.im), class.to_string()))
}

/// Beta of the complex field.
#[pyfunction]
fn beta(a: &str, b: &str) -> PyResult<(f64, f64)> {
    let v = beta_field(&parse_exponent(a)?, &parse_exponent(b)?).map_err(value_err)?;
    Ok((v.re, v.im))
}

/// z^(a|a') as ((re, im)).
#[pyfunction]
fn power(z_re: f64, z_im: f64, exponent: &str) -> PyResult<(f64, f64)> {
    let v = complex_power(Complex64::new(z_re, z_im), &parse_exponent(exponent)?)
        .map_err(value_err)?;
    Ok((v.re, v.im))
}

/// Closed-form right-hand side of an identity; params is the JSON record.
#[pyfunction]
fn rhs(identity: &str, params_json: &str) -> PyResult<(f64, f64)> {
    let spec = load_spec(identity, params_json)?;
    let v = spec.rhs().map_err(value_err)?;
    Ok((v.re, v.im))
}

/// Convergence-domain verdict as a JSON string.
#[pyfunction]
fn domain(identity: &str, params_json: &str) -> PyResult<String> {
    let spec = load_spec(identity, params_json)?;
    serde_json::to_string(&spec.domain()).map_err(value_err)
}

/// Monte Carlo verification; returns the full report as a JSON string.
#[pyfunction]
#[pyo3(signature = (identity, params_json, samples = 1_000_000, seed = 1, chunks = 100))]
fn verify(
    identity: &str,
    params_json: &str,
    samples: u64,
    seed: u64,
    chunks: u64,
) -> PyResult<String> {
    let spec = load_spec(identity, params_json)?;
    let report = run_verify(&spec, samples, seed, chunks, None).map_err(value_err)?;
    serde_json::to_string(&report).map_err(value_err)
}

#[pymodule]
fn selberg_complex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFieldExponent>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(power, m)?)?;
    m.add_function(wrap_pyfunction!(rhs, m)?)?;
    m.add_function(wrap_pyfunction!(domain, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
