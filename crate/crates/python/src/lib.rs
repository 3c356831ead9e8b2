use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use kergin_core::derivative::{DerivativeMethod, DerivativeRequest};
use kergin_core::experiments::{self, config::ExperimentConfig, format_exact};
use kergin_core::kergin::{KerginConfig, NodeSet};
use kergin_core::oracle::FunctionOracle;
use kergin_core::poly::MultiPoly;
use kergin_core::simplex::RuleKind;
use kergin_core::space::{NormKind, Point};
use kergin_core::KerginError;

fn err(e: KerginError) -> PyErr {
    match e {
        KerginError::DomainViolation { .. } | KerginError::InvalidArgument(_) | KerginError::Config(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn point(coords: Vec<Complex64>) -> PyResult<Point<Complex64>> {
    Point::new(coords).map_err(err)
}

fn node_set(nodes: Vec<Vec<Complex64>>) -> PyResult<NodeSet<Complex64>> {
    NodeSet::new(nodes.into_iter().map(point).collect::<PyResult<_>>()?).map_err(err)
}

fn norm(name: &str) -> PyResult<NormKind> {
    match name {
        "l1" => Ok(NormKind::L1),
        "l2" => Ok(NormKind::L2),
        "linf" => Ok(NormKind::Linf),
        other => Err(PyValueError::new_err(format!("unknown norm `{other}`"))),
    }
}

fn config(rule_degree: Option<u32>, contour_radius: Option<f64>, nodes_per_circle: Option<usize>) -> KerginConfig {
    let mut cfg = match rule_degree {
        Some(degree) => KerginConfig::fixed_rule(RuleKind::Gm { degree }),
        None => KerginConfig::default(),
    };
    cfg.derivative.contour_radius = contour_radius;
    cfg.derivative.nodes_per_circle = nodes_per_circle;
    cfg
}

/// Sparse polynomial with complex coefficients.
#[pyclass(name = "Poly", frozen)]
struct PyPoly {
    inner: MultiPoly<Complex64>,
}

#[pymethods]
impl PyPoly {
    /// `terms` is a list of `(exponents, coefficient)` pairs.
    #[new]
    fn new(dim: usize, terms: Vec<(Vec<u32>, Complex64)>) -> PyResult<Self> {
        Ok(PyPoly {
            inner: MultiPoly::from_terms(dim, terms).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn degree(&self) -> Option<u32> {
        self.inner.degree()
    }

    fn terms(&self) -> Vec<(Vec<u32>, Complex64)> {
        self.inner.terms().map(|(e, c)| (e.clone(), *c)).collect()
    }

    fn __call__(&self, x: Vec<Complex64>) -> PyResult<Complex64> {
        self.inner.eval(&point(x)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Poly(dim={}, terms={})", self.inner.dim(), self.inner.num_terms())
    }
}

/// A holomorphic function together with its domain of definition.
#[pyclass(name = "Oracle", frozen)]
struct PyOracle {
    inner: FunctionOracle,
}

#[pymethods]
impl PyOracle {
    #[staticmethod]
    fn polynomial(p: &PyPoly) -> Self {
        PyOracle {
            inner: FunctionOracle::polynomial(p.inner.clone()),
        }
    }

    /// `1 / (1 - <u, x>)` on the ball where `|<u, x>| < 1`.
    #[staticmethod]
    #[pyo3(signature = (u, norm = "l1"))]
    fn rational_pole(u: Vec<Complex64>, norm: &str) -> PyResult<Self> {
        Ok(PyOracle {
            inner: FunctionOracle::rational_pole(point(u)?, self::norm(norm)?).map_err(err)?,
        })
    }

    /// `exp(<u, x>)`, entire.
    #[staticmethod]
    fn exp_linear(u: Vec<Complex64>) -> PyResult<Self> {
        Ok(PyOracle {
            inner: FunctionOracle::exp_linear(point(u)?),
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn __call__(&self, x: Vec<Complex64>) -> PyResult<Complex64> {
        self.inner.eval(&point(x)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Oracle({}, dim={})", self.inner.name(), self.inner.dim())
    }
}

/// `K_n f(x)` and the list of terms `T_0, ..., T_n`.
#[pyfunction]
#[pyo3(signature = (f, nodes, x, n, rule_degree = None, contour_radius = None, nodes_per_circle = None))]
fn interpolate(
    f: &PyOracle,
    nodes: Vec<Vec<Complex64>>,
    x: Vec<Complex64>,
    n: usize,
    rule_degree: Option<u32>,
    contour_radius: Option<f64>,
    nodes_per_circle: Option<usize>,
) -> PyResult<(Complex64, Vec<Complex64>)> {
    let cfg = config(rule_degree, contour_radius, nodes_per_circle);
    let (value, report) =
        kergin_core::kergin::kergin_interpolant(&f.inner, &node_set(nodes)?, &point(x)?, n, &cfg).map_err(err)?;
    Ok((value, report.terms.iter().map(|t| t.value).collect()))
}

/// `R_k(x)` with its Monte Carlo standard error (when sampled) and provenance.
#[pyfunction]
#[pyo3(signature = (f, nodes, x, k, rule_degree = None, contour_radius = None, nodes_per_circle = None))]
fn remainder(
    f: &PyOracle,
    nodes: Vec<Vec<Complex64>>,
    x: Vec<Complex64>,
    k: usize,
    rule_degree: Option<u32>,
    contour_radius: Option<f64>,
    nodes_per_circle: Option<usize>,
) -> PyResult<(Complex64, Option<f64>, String)> {
    let cfg = config(rule_degree, contour_radius, nodes_per_circle);
    let r = kergin_core::kergin::kergin_remainder(&f.inner, &node_set(nodes)?, &point(x)?, k, &cfg).map_err(err)?;
    Ok((r.value, r.std_error, r.provenance))
}

#[pyfunction]
fn newton_1d(f: &PyOracle, nodes: Vec<Complex64>, x: Complex64) -> PyResult<Complex64> {
    kergin_core::kergin::newton_1d(&f.inner, &nodes, x).map_err(err)
}

/// Degree-`n` Taylor polynomial of `p` at `a`, evaluated at `x`.
#[pyfunction]
fn taylor_sum(p: &PyPoly, a: Vec<Complex64>, x: Vec<Complex64>, n: usize) -> PyResult<Complex64> {
    kergin_core::kergin::taylor_sum(&p.inner, &point(a)?, &point(x)?, n).map_err(err)
}

/// `d^k f(a; v_1, ..., v_k)`. `method` is one of auto, exact, cauchy,
/// polarized or fd.
#[pyfunction]
#[pyo3(signature = (f, a, directions, method = "auto"))]
fn dk(f: &PyOracle, a: Vec<Complex64>, directions: Vec<Vec<Complex64>>, method: &str) -> PyResult<Complex64> {
    let dirs = directions.into_iter().map(point).collect::<PyResult<Vec<_>>>()?;
    let mut req = DerivativeRequest::new(point(a)?, dirs).map_err(err)?;
    req = match method {
        "auto" => req,
        "exact" => req.method(DerivativeMethod::Exact),
        "cauchy" => req.method(DerivativeMethod::Cauchy),
        "polarized" => req.method(DerivativeMethod::Polarized),
        "fd" => req.method(DerivativeMethod::FiniteDifference),
        other => return Err(PyValueError::new_err(format!("unknown derivative method `{other}`"))),
    };
    kergin_core::derivative::dk(&f.inner, &req).map_err(err)
}

/// Exact integral of `s^alpha` over the standard simplex, as `"num/den"`.
#[pyfunction]
fn monomial_simplex_integral(alpha: Vec<u32>) -> PyResult<String> {
    if alpha.is_empty() {
        return Err(PyValueError::new_err("alpha must be nonempty"));
    }
    Ok(kergin_core::simplex::monomial_simplex_integral(&alpha).to_string())
}

/// Radius condition for origin balls of radii `r` and `r_prime`, as a dict.
#[pyfunction]
fn example1_check(py: Python<'_>, r: f64, r_prime: f64) -> PyResult<Py<PyAny>> {
    let c = kergin_core::geometry::example1_check(r, r_prime).map_err(err)?;
    let json = serde_json::to_string(&c).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
}

/// `(rigorous, asymptotic)` forms of the error bound.
#[pyfunction]
fn stirling_error_bound(k: usize, rho: f64, m: f64) -> PyResult<(f64, f64)> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be at least 1"));
    }
    let b = kergin_core::geometry::stirling_error_bound(k, rho, m);
    Ok((b.rigorous, b.asymptotic))
}

/// Exact terms `T_0, ..., T_n` of the divergent example in dimension `d`.
#[pyfunction]
fn divergence_terms(d: usize, n: usize) -> PyResult<Vec<String>> {
    let terms = experiments::diverge::divergence_terms(d, n).map_err(err)?;
    Ok(terms.iter().map(format_exact).collect())
}

/// Run an experiment from TOML text; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (config_toml, seed = None))]
fn run_experiment(config_toml: &str, seed: Option<u64>) -> PyResult<(bool, String)> {
    let mut cfg = ExperimentConfig::from_toml_str(config_toml).map_err(err)?;
    if let Some(s) = seed {
        cfg = cfg.with_seed(s);
    }
    let report = experiments::run(&cfg).map_err(err)?;
    Ok((report.passed(), report.to_json()))
}

#[pymodule]
fn kergin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoly>()?;
    m.add_class::<PyOracle>()?;
    m.add_function(wrap_pyfunction!(interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(remainder, m)?)?;
    m.add_function(wrap_pyfunction!(newton_1d, m)?)?;
    m.add_function(wrap_pyfunction!(taylor_sum, m)?)?;
    m.add_function(wrap_pyfunction!(dk, m)?)?;
    m.add_function(wrap_pyfunction!(monomial_simplex_integral, m)?)?;
    m.add_function(wrap_pyfunction!(example1_check, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_error_bound, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_terms, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
