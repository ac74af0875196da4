//! Python bindings for the coupling toolkit.
//!
//! Exact rationals cross the boundary as strings (`"2/3"`, `"1"`); Python
//! ints are accepted wherever a rational is expected. Approximate values
//! (entropy, theta, rho) are returned as floats alongside exact decimal
//! strings where that matters.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use trisum_core::io::{format_rat, parse_rat};
use trisum_core::real::{decimal_string, to_f64};
use trisum_core::{constants, couple, decompose, dist, oracle, sumfree};

fn value_err(msg: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(msg.to_string())
}

fn rat_from_py(value: &Bound<'_, PyAny>) -> PyResult<dist::Rat> {
    if let Ok(i) = value.extract::<i64>() {
        return Ok(dist::rat_int(i));
    }
    let text: String = value.extract()?;
    parse_rat(text.trim()).ok_or_else(|| value_err(format!("bad rational `{text}`")))
}

fn precision(digits: u32) -> PyResult<dist::PrecisionParam> {
    if digits == 0 {
        return Err(value_err("digits must be at least 1"));
    }
    Ok(dist::PrecisionParam::new(digits))
}

/// Probability distribution on `{0..p-1}` with exact rational masses.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Dist {
    inner: dist::Dist,
}

#[pymethods]
impl Dist {
    /// Dist(p, masses) with masses as ints or strings like "1/3".
    #[new]
    fn new(p: usize, masses: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let values = masses
            .iter()
            .map(rat_from_py)
            .collect::<PyResult<Vec<_>>>()?;
        let inner = dist::Dist::new(p, values).map_err(value_err)?;
        Ok(Dist { inner })
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    fn masses(&self) -> Vec<String> {
        self.inner.masses().iter().map(format_rat).collect()
    }

    fn mean(&self) -> String {
        format_rat(&self.inner.mean())
    }

    fn is_decreasing(&self) -> bool {
        self.inner.is_decreasing()
    }

    /// Entropy (natural log) as a float, accurate to `digits` decimals.
    #[pyo3(signature = (digits = 12))]
    fn entropy(&self, digits: u32) -> PyResult<f64> {
        Ok(to_f64(&self.inner.entropy(precision(digits)?)))
    }

    fn hat(&self) -> Dist {
        Dist {
            inner: self.inner.hat(),
        }
    }

    fn unhat(&self) -> PyResult<Dist> {
        Ok(Dist {
            inner: self.inner.unhat().map_err(value_err)?,
        })
    }

    fn pad(&self, p: usize) -> PyResult<Dist> {
        Ok(Dist {
            inner: self.inner.pad(p).map_err(value_err)?,
        })
    }

    fn __eq__(&self, other: &Dist) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Dist(p={}, [{}])", self.inner.p(), self.masses().join(", "))
    }
}

/// Sparse joint distribution of three coordinates with constant sum `s`.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Coupling {
    inner: couple::Coupling,
}

#[pymethods]
impl Coupling {
    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s()
    }

    /// Entries as a list of ((a, b, c), "mass") pairs in key order.
    fn entries(&self) -> Vec<((usize, usize, usize), String)> {
        self.inner
            .entries()
            .iter()
            .map(|(k, v)| (*k, format_rat(v)))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.entries().len()
    }

    fn __eq__(&self, other: &Coupling) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Coupling(p={}, s={}, {} entries)",
            self.inner.p(),
            self.inner.s(),
            self.inner.entries().len()
        )
    }
}

/// The uniform distribution on `{0..k}`.
#[pyfunction]
fn uniform(k: usize) -> Dist {
    Dist {
        inner: dist::uniform(k),
    }
}

/// Blend of uniforms on `{0..k}` and `{0..l}` with mean exactly `x/2`.
#[pyfunction]
fn v_dist(k: usize, l: usize, x: &Bound<'_, PyAny>) -> PyResult<Dist> {
    let x = rat_from_py(x)?;
    Ok(Dist {
        inner: dist::v_dist(k, l, &x).map_err(value_err)?,
    })
}

/// Couples a decreasing triple with means summing to `p-1` into a joint
/// distribution with constant coordinate sum `p-1`.
#[pyfunction]
fn couple_triple(d1: &Dist, d2: &Dist, d3: &Dist) -> PyResult<Coupling> {
    let inner = couple::couple(&d1.inner, &d2.inner, &d3.inner).map_err(value_err)?;
    Ok(Coupling { inner })
}

/// Exact verification report as a dict with an overall "pass" key.
#[pyfunction]
fn verify_coupling<'py>(
    py: Python<'py>,
    c: &Coupling,
    d1: &Dist,
    d2: &Dist,
    d3: &Dist,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let report = couple::verify_coupling(&c.inner, &d1.inner, &d2.inner, &d3.inner);
    let out = pyo3::types::PyDict::new(py);
    out.set_item("mass_total_ok", report.mass_total_ok)?;
    out.set_item("support_on_plane", report.support_on_plane)?;
    out.set_item("masses_positive", report.masses_positive)?;
    out.set_item("marginals_ok", report.marginals_ok.to_vec())?;
    out.set_item("pass", report.pass())?;
    Ok(out)
}

/// Convex decomposition into simple tuples: returns (weight, [Dist, ...])
/// pairs that recombine exactly to the inputs.
#[pyfunction]
fn simple_decompose(dists: Vec<Dist>) -> PyResult<Vec<(String, Vec<Dist>)>> {
    if dists.is_empty() {
        return Err(value_err("need at least one distribution"));
    }
    let inner: Vec<dist::Dist> = dists.iter().map(|d| d.inner.clone()).collect();
    let p = inner[0].p();
    if inner.iter().any(|d| d.p() != p) {
        return Err(value_err("distributions must share an alphabet"));
    }
    let dec = decompose::simple_decompose(&inner);
    Ok(dec
        .terms()
        .iter()
        .map(|(w, tuple)| {
            (
                format_rat(w),
                tuple
                    .components()
                    .iter()
                    .map(|d| Dist { inner: d.clone() })
                    .collect(),
            )
        })
        .collect())
}

/// ("FEASIBLE", witness, None) or ("INFEASIBLE", None, certificate), the
/// certificate being (constraint, value) string pairs.
type OracleVerdict = (String, Option<Coupling>, Option<Vec<(String, String)>>);

/// Decides compatibility at sum `s` for arbitrary (not necessarily
/// decreasing) triples.
#[pyfunction]
fn compatible_oracle(d1: &Dist, d2: &Dist, d3: &Dist, s: usize) -> PyResult<OracleVerdict> {
    let res = oracle::compatible_oracle(&d1.inner, &d2.inner, &d3.inner, s).map_err(value_err)?;
    Ok(match res {
        oracle::FeasibilityResult::Feasible { witness } => {
            ("FEASIBLE".into(), Some(Coupling { inner: witness }), None)
        }
        oracle::FeasibilityResult::Infeasible { certificate } => {
            let cert = certificate
                .components
                .iter()
                .map(|(label, v)| (label.to_string(), format_rat(v)))
                .collect();
            ("INFEASIBLE".into(), None, Some(cert))
        }
    })
}

/// theta_p as a dict: {"theta": float, "beta_star": float,
/// "theta_decimal": str} at the requested precision.
#[pyfunction]
#[pyo3(signature = (p, digits = 12))]
fn theta<'py>(py: Python<'py>, p: usize, digits: u32) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    if p == 0 {
        return Err(value_err("p must be positive"));
    }
    let t = constants::theta(p, precision(digits)?);
    let out = pyo3::types::PyDict::new(py);
    out.set_item("theta", to_f64(&t.theta()))?;
    out.set_item("beta_star", to_f64(&t.beta_star()))?;
    out.set_item("theta_decimal", decimal_string(&t.theta(), digits))?;
    Ok(out)
}

/// The geometric parameter with mean `(p-1)/3`.
#[pyfunction]
#[pyo3(signature = (p, digits = 12))]
fn rho(p: usize, digits: u32) -> PyResult<f64> {
    let r = constants::rho(p, precision(digits)?).map_err(value_err)?;
    Ok(to_f64(&r.rho()))
}

/// Componentwise float approximation of the max-entropy distribution.
#[pyfunction]
#[pyo3(signature = (p, digits = 12))]
fn psi(p: usize, digits: u32) -> PyResult<Vec<f64>> {
    let v = constants::psi(p, precision(digits)?).map_err(value_err)?;
    Ok(v.iter().map(to_f64).collect())
}

/// Exact-rational surrogate of psi: decreasing, mean exactly `(p-1)/3`.
#[pyfunction]
#[pyo3(signature = (p, digits = 12))]
fn psi_rational(p: usize, digits: u32) -> PyResult<Dist> {
    let d = constants::psi_rational(p, precision(digits)?).map_err(value_err)?;
    Ok(Dist { inner: d })
}

/// Maximal entropy at mean `(p-1)/3`; equals `ln(theta_p)`.
#[pyfunction]
#[pyo3(signature = (p, digits = 12))]
fn lambda_prime(p: usize, digits: u32) -> PyResult<f64> {
    if p == 0 {
        return Err(value_err("p must be positive"));
    }
    Ok(to_f64(&constants::lambda_prime(p, precision(digits)?)))
}

/// `ln(theta_p)` computed from the theta enclosure.
#[pyfunction]
#[pyo3(signature = (p, digits = 12))]
fn ln_theta(p: usize, digits: u32) -> PyResult<f64> {
    if p == 0 {
        return Err(value_err("p must be positive"));
    }
    Ok(to_f64(&constants::ln_theta(p, precision(digits)?)))
}

type ResidueTriple = (Vec<i64>, Vec<i64>, Vec<i64>);
type TrisystemVerdict = (bool, Option<(usize, usize, usize)>);

fn group_vec(p: u32, coords: &[i64]) -> PyResult<sumfree::GroupVec> {
    if p < 2 {
        return Err(value_err("modulus must be at least 2"));
    }
    Ok(sumfree::GroupVec::new(p, coords))
}

/// Checks `a_i + b_j + c_k = 0  <=>  i = j = k` over `Z_p^n`. Triples are
/// (a, b, c) with each element a list of n residues. Returns
/// (ok, first_violation_or_None) with zero-based indices.
#[pyfunction]
fn verify_trisystem(p: u32, triples: Vec<ResidueTriple>) -> PyResult<TrisystemVerdict> {
    let Some(first) = triples.first() else {
        return Ok((true, None));
    };
    let n = first.0.len();
    let mut converted = Vec::with_capacity(triples.len());
    for (a, b, c) in &triples {
        if a.len() != n || b.len() != n || c.len() != n {
            return Err(value_err("all triples must have the same dimension"));
        }
        converted.push([group_vec(p, a)?, group_vec(p, b)?, group_vec(p, c)?]);
    }
    let ts = sumfree::TripleSystem::new(p, n, converted);
    let report = sumfree::verify_trisystem(&ts);
    Ok((report.ok, report.violation))
}

/// True iff no three distinct elements satisfy `x + z = 2y` in `Z_p^n`.
#[pyfunction]
fn ap_free_check(p: u32, elements: Vec<Vec<i64>>) -> PyResult<bool> {
    let converted = elements
        .iter()
        .map(|e| group_vec(p, e))
        .collect::<PyResult<Vec<_>>>()?;
    sumfree::ap_free_check(&converted).map_err(value_err)
}

type EmbeddedTriple = (Vec<u32>, Vec<u32>, Vec<u32>);

/// The diagonal embedding `x -> (x, x, -2x)` as a list of residue triples.
#[pyfunction]
fn embed_diagonal(p: u32, elements: Vec<Vec<i64>>) -> PyResult<Vec<EmbeddedTriple>> {
    if elements.is_empty() {
        return Err(value_err("need at least one element"));
    }
    let converted = elements
        .iter()
        .map(|e| group_vec(p, e))
        .collect::<PyResult<Vec<_>>>()?;
    let ts = sumfree::embed_diagonal(&converted);
    Ok(ts
        .triples()
        .iter()
        .map(|t| {
            (
                t[0].coords().to_vec(),
                t[1].coords().to_vec(),
                t[2].coords().to_vec(),
            )
        })
        .collect())
}

#[pymodule]
fn trisum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dist>()?;
    m.add_class::<Coupling>()?;
    m.add_function(wrap_pyfunction!(uniform, m)?)?;
    m.add_function(wrap_pyfunction!(v_dist, m)?)?;
    m.add_function(wrap_pyfunction!(couple_triple, m)?)?;
    m.add_function(wrap_pyfunction!(verify_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(simple_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(compatible_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(psi_rational, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_prime, m)?)?;
    m.add_function(wrap_pyfunction!(ln_theta, m)?)?;
    m.add_function(wrap_pyfunction!(verify_trisystem, m)?)?;
    m.add_function(wrap_pyfunction!(ap_free_check, m)?)?;
    m.add_function(wrap_pyfunction!(embed_diagonal, m)?)?;
    Ok(())
}
