use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qtlattice::combinat::{Partition, SequencePair};
use qtlattice::modmac::{self, CauchyIdentity, HRoute, ModmacError};
use qtlattice::phi::{self, Route};
use qtlattice::{symoracle, Poly};

fn partition(parts: Vec<usize>) -> PyResult<Partition> {
    if parts.windows(2).any(|w| w[0] < w[1]) {
        return Err(PyValueError::new_err(format!("{parts:?} is not weakly decreasing")));
    }
    Partition::new(parts).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn route(s: &str) -> PyResult<HRoute> {
    s.parse().map_err(PyValueError::new_err)
}

fn modmac_err(e: ModmacError) -> PyErr {
    match e {
        ModmacError::NegativeCoefficient(_) => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn texts(t: &BTreeMap<Partition, Poly>) -> BTreeMap<String, String> {
    t.iter().map(|(k, v)| (k.to_string(), v.to_text())).collect()
}

/// Φ_{ν|ν̃}(z; t) as text; `form` is series, finite, positive or prime.
#[pyfunction]
#[pyo3(signature = (nu, nutilde, form = "series"))]
fn phi_poly(nu: Vec<usize>, nutilde: Vec<usize>, form: &str) -> PyResult<String> {
    let sp = SequencePair::new(nu, nutilde).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let v = if form == "prime" {
        phi::phi_prime(&sp)
    } else {
        let r: Route = form.parse().map_err(PyValueError::new_err)?;
        phi::phi(&sp, r).map(|r| r.value)
    };
    v.map(|p| p.to_text()).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Monomial coefficients of H_λ keyed by partition strings such as "2,1".
#[pyfunction]
#[pyo3(signature = (lam, nvars = None, route = "lattice"))]
fn modified_h(lam: Vec<usize>, nvars: Option<usize>, route: &str) -> PyResult<BTreeMap<String, String>> {
    let h = modmac::modified_h(&partition(lam)?, nvars, self::route(route)?).map_err(modmac_err)?;
    Ok(texts(&h.coeffs))
}

/// The same table in the JSON polynomial format.
#[pyfunction]
#[pyo3(signature = (lam, nvars = None, route = "lattice"))]
fn modified_h_json(lam: Vec<usize>, nvars: Option<usize>, route: &str) -> PyResult<String> {
    let h = modmac::modified_h(&partition(lam)?, nvars, self::route(route)?).map_err(modmac_err)?;
    Ok(h.to_json().to_string())
}

#[pyfunction]
#[pyo3(signature = (lam, nvars = None))]
fn modified_hl(lam: Vec<usize>, nvars: Option<usize>) -> PyResult<BTreeMap<String, String>> {
    Ok(texts(&modmac::modified_hl(&partition(lam)?, nvars).map_err(modmac_err)?))
}

/// K_{ν,λ}(q,t) keyed by ν.
#[pyfunction]
#[pyo3(signature = (lam, route = "lattice"))]
fn kostka_qt(lam: Vec<usize>, route: &str) -> PyResult<BTreeMap<String, String>> {
    Ok(texts(&modmac::kostka_qt(&partition(lam)?, self::route(route)?).map_err(modmac_err)?))
}

#[pyfunction]
#[pyo3(signature = (lam, route = "lattice"))]
fn duality_check(lam: Vec<usize>, route: &str) -> PyResult<bool> {
    modmac::duality_check(&partition(lam)?, self::route(route)?).map_err(modmac_err)
}

#[pyfunction]
#[pyo3(signature = (identity, nx = 1, ny = 1, degree = 2))]
fn cauchy_check(identity: &str, nx: usize, ny: usize, degree: usize) -> PyResult<bool> {
    let id: CauchyIdentity = identity.parse().map_err(PyValueError::new_err)?;
    modmac::cauchy_check(id, nx, ny, degree).map_err(modmac_err)
}

/// W_λ on x1..xn, z1..zn as text.
#[pyfunction]
fn w_polynomial(lam: Vec<usize>, n: usize) -> PyResult<String> {
    symoracle::w_oracle(&partition(lam)?, n)
        .map(|p| p.to_text())
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn qtlattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(phi_poly, m)?)?;
    m.add_function(wrap_pyfunction!(modified_h, m)?)?;
    m.add_function(wrap_pyfunction!(modified_h_json, m)?)?;
    m.add_function(wrap_pyfunction!(modified_hl, m)?)?;
    m.add_function(wrap_pyfunction!(kostka_qt, m)?)?;
    m.add_function(wrap_pyfunction!(duality_check, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_check, m)?)?;
    m.add_function(wrap_pyfunction!(w_polynomial, m)?)?;
    Ok(())
}
