//! Python bindings for `lobflux`.
//!
//! Regimes cross the boundary either as `HcParams` objects or as the JSON
//! regime document used by the CLI; reports come back as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use lobflux::analytics::{self, DriftMethod};
use lobflux::estimate;
use lobflux::model;
use lobflux::simulate;
use lobflux::verify::{self, CheckName, VerifySettings};

create_exception!(pylobflux, LobfluxError, PyException);

fn err(e: lobflux::Error) -> PyErr {
    LobfluxError::new_err(format!("{}: {}", e.kind(), e))
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<PyObject> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any().unbind(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any().unbind(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any().unbind()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any().unbind()
        }
    })
}

fn ser_to_py(py: Python<'_>, x: &impl serde::Serialize) -> PyResult<PyObject> {
    let v = serde_json::to_value(x).map_err(|e| err(e.into()))?;
    to_py(py, &v)
}

/// Rates of the highly competitive regime.
#[pyclass(name = "HcParams", frozen, module = "pylobflux")]
#[derive(Clone, Copy)]
struct PyHcParams(model::HcParams);

#[pymethods]
impl PyHcParams {
    #[new]
    fn new(alpha_plus: f64, alpha_minus: f64, beta_plus: f64, beta_minus: f64) -> PyResult<Self> {
        model::HcParams::new(alpha_plus, alpha_minus, beta_plus, beta_minus).map(Self).map_err(err)
    }

    #[getter]
    fn alpha_plus(&self) -> f64 {
        self.0.alpha_plus
    }
    #[getter]
    fn alpha_minus(&self) -> f64 {
        self.0.alpha_minus
    }
    #[getter]
    fn beta_plus(&self) -> f64 {
        self.0.beta_plus
    }
    #[getter]
    fn beta_minus(&self) -> f64 {
        self.0.beta_minus
    }
    #[getter]
    fn gamma_plus(&self) -> f64 {
        self.0.gamma_plus()
    }
    #[getter]
    fn gamma_minus(&self) -> f64 {
        self.0.gamma_minus()
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    /// Regime document `{"regime": "hc", ...}` with uniform catastrophes.
    fn regime_json(&self) -> String {
        serde_json::to_string(&model::RegimeSpec::hc(self.0)).expect("regime serializes")
    }

    fn __repr__(&self) -> String {
        let p = self.0;
        format!("HcParams({}, {}, {}, {})", p.alpha_plus, p.alpha_minus, p.beta_plus, p.beta_minus)
    }
}

fn regime(doc: &str) -> PyResult<model::RegimeSpec> {
    model::RegimeSpec::from_json(doc).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (params, eps = analytics::SERIES_EPS))]
fn stationary_mu(params: &PyHcParams, eps: f64) -> PyResult<Vec<f64>> {
    analytics::stationary_mu(&params.0, eps).map(|t| t.values).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (params, eps = analytics::SERIES_EPS))]
fn stationary_pi(params: &PyHcParams, eps: f64) -> PyResult<Vec<f64>> {
    analytics::stationary_pi(&params.0, eps).map(|t| t.values).map_err(err)
}

#[pyfunction]
fn mean_spread(params: &PyHcParams) -> PyResult<f64> {
    analytics::mean_spread(&params.0).map_err(err)
}

#[pyfunction]
fn embedded_drift_v(params: &PyHcParams) -> PyResult<f64> {
    analytics::embedded_drift_v(&params.0).map_err(err)
}

/// Drift of `P_b(t)/t`; `method` is one of `theorem`, `lemma_times_gamma`,
/// `lemma_times_jump_rate`, `generator`.
#[pyfunction]
#[pyo3(signature = (params, method = "generator"))]
fn drift_d(params: &PyHcParams, method: &str) -> PyResult<f64> {
    let m: DriftMethod = method.parse().map_err(err)?;
    analytics::drift_d(&params.0, m).map_err(err)
}

#[pyfunction]
fn clt_variance_embedded(params: &PyHcParams) -> PyResult<f64> {
    analytics::clt_variance_embedded(&params.0).map_err(err)
}

#[pyfunction]
fn clt_variance_markov(params: &PyHcParams) -> PyResult<f64> {
    analytics::clt_variance_markov(&params.0).map_err(err)
}

#[pyfunction]
fn clt_variance_continuous(params: &PyHcParams) -> PyResult<f64> {
    analytics::clt_variance_continuous(&params.0).map_err(err)
}

#[pyfunction]
fn volatility_sigma_n(params: &PyHcParams, n: u64) -> PyResult<f64> {
    analytics::volatility_sigma_n(&params.0, n).map_err(err)
}

#[pyfunction]
fn next_move_prob(params: &PyHcParams) -> PyResult<f64> {
    analytics::next_move_prob(&params.0).map_err(err)
}

#[pyfunction]
fn ldp_exponent(x: f64, params: &PyHcParams) -> PyResult<f64> {
    analytics::ldp_exponent(x, &params.0).map_err(err)
}

/// Breakpoints `[(t, y), ...]` of the optimal spread trajectory.
#[pyfunction]
fn optimal_spread_trajectory(x: f64, params: &PyHcParams) -> PyResult<Vec<(f64, f64)>> {
    analytics::optimal_spread_trajectory(x, &params.0).map(|f| f.points().to_vec()).map_err(err)
}

type Points = Vec<(f64, f64)>;
type EventRow = (f64, &'static str, &'static str, u64, i64, i64);

/// `(bid, ask)` breakpoint lists.
#[pyfunction]
fn optimal_price_trajectories(x: f64, params: &PyHcParams) -> PyResult<(Points, Points)> {
    analytics::optimal_price_trajectories(x, &params.0)
        .map(|(b, a)| (b.points().to_vec(), a.points().to_vec()))
        .map_err(err)
}

/// Rate function of a piecewise-linear trajectory given by its breakpoints.
#[pyfunction]
fn rate_function(points: Vec<(f64, f64)>, params: &PyHcParams) -> PyResult<f64> {
    let f = analytics::PiecewiseLinearTrajectory::new(points).map_err(err)?;
    Ok(analytics::rate_function(&f, &params.0).value)
}

/// Book path as `[(t, side, direction, delta, bid, ask), ...]`.
#[pyfunction]
fn simulate_book(
    regime_json: &str,
    bid: i64,
    ask: i64,
    horizon: f64,
    seed: u64,
) -> PyResult<Vec<EventRow>> {
    let spec = regime(regime_json)?;
    let init = model::BookState::new(bid, ask).map_err(err)?;
    let path = simulate::simulate_book(&spec, init, horizon, seed).map_err(err)?;
    Ok(path
        .events
        .iter()
        .map(|e| {
            (e.t, e.side.as_str(), e.direction.as_str(), e.delta, e.state_after.bid(), e.state_after.ask())
        })
        .collect())
}

/// Spread jumps `[(t, spread), ...]` starting from `k0`.
#[pyfunction]
fn simulate_spread(regime_json: &str, k0: u64, horizon: f64, seed: u64) -> PyResult<Vec<(f64, u64)>> {
    let spec = regime(regime_json)?;
    simulate::simulate_spread(&spec, k0, horizon, seed).map(|p| p.jumps).map_err(err)
}

#[pyfunction]
fn embedded_spread_chain(params: &PyHcParams, n_steps: usize, seed: u64) -> PyResult<Vec<u64>> {
    simulate::embedded_spread_chain(&params.0, n_steps, seed).map_err(err)
}

#[pyfunction]
fn simulate_embedded_price(params: &PyHcParams, n_steps: usize, seed: u64) -> PyResult<Vec<i64>> {
    simulate::simulate_embedded_price(&params.0, n_steps, seed).map_err(err)
}

#[pyfunction]
fn price_increment_f(s_prev: u64, s_next: u64, u: f64, params: &PyHcParams) -> PyResult<i64> {
    simulate::price_increment_f(s_prev, s_next, u, &params.0).map_err(err)
}

/// Rate estimate from event-CSV text, as a dict.
#[pyfunction]
#[pyo3(signature = (csv_text, t_obs = None))]
fn estimate_rates(py: Python<'_>, csv_text: &str, t_obs: Option<f64>) -> PyResult<PyObject> {
    let log = estimate::parse_event_log(csv_text.as_bytes(), t_obs).map_err(err)?;
    let est = estimate::estimate_rates(&log).map_err(err)?;
    ser_to_py(py, &est)
}

/// Runs one verification check and returns its report as a dict.
/// `settings_json` overrides fields of the default settings.
#[pyfunction]
#[pyo3(signature = (name, regime_json, seed, settings_json = None))]
fn run_check(
    py: Python<'_>,
    name: &str,
    regime_json: &str,
    seed: u64,
    settings_json: Option<&str>,
) -> PyResult<PyObject> {
    let check: CheckName = name.parse().map_err(err)?;
    let spec = regime(regime_json)?;
    let settings: VerifySettings = match settings_json {
        Some(s) => serde_json::from_str(s).map_err(|e| err(e.into()))?,
        None => VerifySettings::default(),
    };
    let report = py.allow_threads(|| verify::run_check(check, &spec, &settings, seed)).map_err(err)?;
    ser_to_py(py, &report)
}

#[pymodule]
fn pylobflux(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LobfluxError", m.py().get_type::<LobfluxError>())?;
    m.add_class::<PyHcParams>()?;
    m.add_function(wrap_pyfunction!(stationary_mu, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_pi, m)?)?;
    m.add_function(wrap_pyfunction!(mean_spread, m)?)?;
    m.add_function(wrap_pyfunction!(embedded_drift_v, m)?)?;
    m.add_function(wrap_pyfunction!(drift_d, m)?)?;
    m.add_function(wrap_pyfunction!(clt_variance_embedded, m)?)?;
    m.add_function(wrap_pyfunction!(clt_variance_markov, m)?)?;
    m.add_function(wrap_pyfunction!(clt_variance_continuous, m)?)?;
    m.add_function(wrap_pyfunction!(volatility_sigma_n, m)?)?;
    m.add_function(wrap_pyfunction!(next_move_prob, m)?)?;
    m.add_function(wrap_pyfunction!(ldp_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_spread_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_price_trajectories, m)?)?;
    m.add_function(wrap_pyfunction!(rate_function, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_book, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_spread, m)?)?;
    m.add_function(wrap_pyfunction!(embedded_spread_chain, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_embedded_price, m)?)?;
    m.add_function(wrap_pyfunction!(price_increment_f, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_rates, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    Ok(())
}
