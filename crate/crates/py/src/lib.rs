use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sgn_core::convergence::{convergence_table as core_table, StepRule};
use sgn_core::diagnostics::{self, GaugeRecord};
use sgn_core::fem::Family;
use sgn_core::integrator::{run, Callback, RunConfig};
use sgn_core::scenarios::{self, SolitaryWaveSpec};
use sgn_core::SgnError;

fn to_py(e: SgnError) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn family(s: &str) -> PyResult<Family> {
    s.parse().map_err(to_py)
}

/// A benchmark or user-adjusted scenario.
#[pyclass(name = "Scenario", module = "sgn", from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: scenarios::Scenario,
}

#[pymethods]
impl PyScenario {
    /// `Scenario("shoal_35(0.2)")`, `Scenario("revere(0.05)")`, ...
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: scenarios::scenario(name).map_err(to_py)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain
    }

    #[getter]
    fn elements(&self) -> usize {
        self.inner.elements
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.inner.t_end
    }

    #[getter]
    fn gauges(&self) -> Vec<f64> {
        self.inner.gauges.clone()
    }

    #[getter]
    fn families(&self) -> (String, String) {
        (self.inner.family_h.to_string(), self.inner.family_u.to_string())
    }

    fn with_families(&self, family_h: &str, family_u: &str) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.clone().with_families(family(family_h)?, family(family_u)?),
        })
    }

    fn with_dx(&self, dx: f64) -> Self {
        Self {
            inner: self.inner.clone().with_dx(dx),
        }
    }

    fn with_dt(&self, dt: f64) -> Self {
        Self {
            inner: self.inner.clone().with_dt(dt),
        }
    }

    fn with_t_end(&self, t_end: f64) -> Self {
        Self {
            inner: self.inner.clone().with_t_end(t_end),
        }
    }

    fn with_gauges(&self, gauges: Vec<f64>) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        inner.gauges = gauges;
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario('{}', elements={}, dt={}, t_end={})",
            self.inner.name, self.inner.elements, self.inner.dt, self.inner.t_end
        )
    }
}

/// Result of `simulate`.
#[pyclass(name = "RunResult", module = "sgn", get_all)]
struct PyRunResult {
    x: Vec<f64>,
    eta: Vec<f64>,
    h: Vec<f64>,
    u: Vec<f64>,
    t: f64,
    steps: usize,
    gauge_times: Vec<f64>,
    gauge_eta: Vec<Vec<f64>>,
    energy_times: Vec<f64>,
    energy: Vec<f64>,
}

#[pymethods]
impl PyRunResult {
    /// Largest elevation recorded at gauge `index`.
    fn gauge_peak(&self, index: usize) -> PyResult<f64> {
        if self.gauge_eta.first().is_some_and(|r| index >= r.len()) || self.gauge_eta.is_empty() {
            return Err(PyValueError::new_err(format!("no gauge {index}")));
        }
        Ok(self.gauge_eta.iter().map(|r| r[index]).fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Runs a scenario to its end time.
#[pyfunction]
#[pyo3(signature = (scenario, energy_every = 10, gauge_every = 1))]
fn simulate(py: Python<'_>, scenario: PyScenario, energy_every: usize, gauge_every: usize) -> PyResult<PyRunResult> {
    let sc = scenario.inner;
    py.detach(move || -> Result<PyRunResult, SgnError> {
        let ctx = sc.context()?;
        let init = sc.initial_state(&ctx)?;
        let forcing = sc.forcing();
        let mut gauges = GaugeRecord::new(sc.gauges.clone());
        let mut cfg = RunConfig::new(&ctx, init, sc.dt, sc.t_end);
        cfg.forcing = forcing.as_ref().map(|f| f as _);
        cfg.record_energy = true;
        cfg.sample_every = energy_every;
        if !sc.gauges.is_empty() {
            cfg.callbacks.push(Callback {
                every: gauge_every,
                observer: &mut gauges,
            });
        }
        let res = run(cfg)?;
        let state = &res.final_state;
        let x = ctx.space_h().mesh().nodes();
        let eta = x.iter().map(|&p| state.surface(&ctx, p)).collect::<Result<Vec<_>, _>>()?;
        let h = x.iter().map(|&p| state.h.eval(p, 0)).collect::<Result<Vec<_>, _>>()?;
        let u = x.iter().map(|&p| state.u.eval(p, 0)).collect::<Result<Vec<_>, _>>()?;
        Ok(PyRunResult {
            x,
            eta,
            h,
            u,
            t: state.t,
            steps: res.step_count,
            gauge_times: gauges.times,
            gauge_eta: gauges.eta,
            energy_times: res.samples.iter().map(|s| s.t).collect(),
            energy: res.samples.iter().filter_map(|s| s.energy).collect(),
        })
    })
    .map_err(to_py)
}

/// Manufactured-solution refinement table as a list of dicts.
#[pyfunction]
#[pyo3(signature = (family_h, family_u, elements, c = 0.1, power = 1))]
fn convergence_table<'py>(
    py: Python<'py>,
    family_h: &str,
    family_u: &str,
    elements: Vec<usize>,
    c: f64,
    power: i32,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let (fh, fu) = (family(family_h)?, family(family_u)?);
    let table = py
        .detach(|| core_table(fh, fu, &elements, StepRule { c, power }, false))
        .map_err(to_py)?;
    table
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("elements", r.elements)?;
            d.set_item("dx", r.dx)?;
            d.set_item("l2_h", r.h.l2)?;
            d.set_item("l2_u", r.u.l2)?;
            d.set_item("rate_l2_h", r.rate_h.l2)?;
            d.set_item("rate_l2_u", r.rate_u.l2)?;
            d.set_item("h1_h", r.h.h1)?;
            d.set_item("h1_u", r.u.h1)?;
            d.set_item("linf_h", r.h.linf)?;
            d.set_item("linf_u", r.u.linf)?;
            Ok(d)
        })
        .collect()
}

/// `(h, u)` of the solitary wave at `x`, `t`.
#[pyfunction]
#[pyo3(signature = (amplitude, x, t = 0.0, depth = 1.0, x0 = 0.0, g = 1.0))]
fn solitary_wave(amplitude: f64, x: f64, t: f64, depth: f64, x0: f64, g: f64) -> PyResult<(f64, f64)> {
    let w = SolitaryWaveSpec::new(amplitude, depth, x0, g).map_err(to_py)?;
    Ok((w.h(x, t), w.u(x, t)))
}

/// Asymptotic maximum runup `2a + a^2/2 + a^3/2`.
#[pyfunction]
fn runup_asymptotic(alpha: f64) -> f64 {
    diagnostics::runup_asymptotic(alpha)
}

#[pymodule]
fn sgn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_table, m)?)?;
    m.add_function(wrap_pyfunction!(solitary_wave, m)?)?;
    m.add_function(wrap_pyfunction!(runup_asymptotic, m)?)?;
    Ok(())
}
