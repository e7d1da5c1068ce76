//! Explicit Runge-Kutta time marching for the semidiscrete system.

use log::{debug, warn};

use crate::assembly::{AssemblyContext, Forcing, QuadratureFields, SgnState};
use crate::error::{Result, SgnError};
use crate::fem::BandedSymMatrix;

/// `dy/dt = F(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    /// Called once before the stages of every step.
    fn begin_step(&mut self) {}

    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

/// Explicit Butcher tableau with strictly lower-triangular `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ButcherTableau {
    pub fn classical_rk4() -> Self {
        Self {
            a: vec![vec![], vec![0.5], vec![0.0, 0.5], vec![0.0, 0.0, 1.0]],
            b: vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 0.5, 1.0],
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }
}

/// One explicit Runge-Kutta step from `(t, y)` with step `dt`.
pub fn explicit_step<S: OdeSystem + ?Sized>(
    tableau: &ButcherTableau,
    sys: &mut S,
    t: f64,
    y: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let n = y.len();
    let s = tableau.stages();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut stage = vec![0.0; n];
    sys.begin_step();
    for i in 0..s {
        stage.copy_from_slice(y);
        for (j, &aij) in tableau.a[i].iter().enumerate() {
            if aij != 0.0 {
                for (st, kj) in stage.iter_mut().zip(&k[j]) {
                    *st += dt * aij * kj;
                }
            }
        }
        let mut ki = vec![0.0; n];
        sys.rhs(t + tableau.c[i] * dt, &stage, &mut ki)?;
        k.push(ki);
    }
    let mut out = y.to_vec();
    for (bi, ki) in tableau.b.iter().zip(&k) {
        for (o, kv) in out.iter_mut().zip(ki) {
            *o += dt * bi * kv;
        }
    }
    Ok(out)
}

/// Outcome of an adaptive Runge-Kutta-Fehlberg integration.
#[derive(Debug, Clone)]
pub struct AdaptiveResult {
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Adaptive Runge-Kutta-Fehlberg 4(5) on `[t0, t_end]`, propagating the fifth-order solution.
///
/// `tol` bounds the max-norm local error estimate relative to `1 + |y|`.
pub fn rkf45<S: OdeSystem + ?Sized>(
    sys: &mut S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    tol: f64,
    initial_dt: f64,
) -> Result<AdaptiveResult> {
    const C: [f64; 6] = [0.0, 0.25, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5];
    const A: [[f64; 5]; 6] = [
        [0.0; 5],
        [0.25, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
        [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
        [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
        [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
    ];
    const B5: [f64; 6] = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];
    const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];

    if !(tol > 0.0) || !(initial_dt > 0.0) || !(t_end >= t0) {
        return Err(SgnError::InvalidTimeStep(format!(
            "rkf45 needs tol > 0, dt > 0, t_end >= t0 (tol {tol}, dt {initial_dt}, [{t0}, {t_end}])"
        )));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut dt = initial_dt.min(t_end - t0);
    let (mut accepted, mut rejected) = (0, 0);
    let mut k = vec![vec![0.0; n]; 6];
    let mut stage = vec![0.0; n];
    while t_end - t > 1e-14 * t_end.abs().max(1.0) {
        dt = dt.min(t_end - t);
        sys.begin_step();
        for i in 0..6 {
            stage.copy_from_slice(&y);
            for j in 0..i {
                if A[i][j] != 0.0 {
                    for (st, kj) in stage.iter_mut().zip(&k[j]) {
                        *st += dt * A[i][j] * kj;
                    }
                }
            }
            sys.rhs(t + C[i] * dt, &stage, &mut k[i])?;
        }
        let mut err: f64 = 0.0;
        let mut y5 = y.clone();
        for m in 0..n {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for i in 0..6 {
                d5 += B5[i] * k[i][m];
                d4 += B4[i] * k[i][m];
            }
            y5[m] += dt * d5;
            err = err.max((dt * (d5 - d4)).abs() / (1.0 + y[m].abs()));
        }
        if err <= tol {
            y = y5;
            t += dt;
            accepted += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 { 4.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0) };
        dt *= factor;
        if dt < 1e-14 * t_end.abs().max(1.0) {
            return Err(SgnError::InvalidTimeStep(format!("rkf45 step underflow at t = {t}")));
        }
    }
    Ok(AdaptiveResult { y, accepted, rejected })
}

/// The semidiscrete system in coefficient form `y = [H, U]`.
pub struct SgnSystem<'a> {
    ctx: &'a AssemblyContext,
    forcing: Option<&'a dyn Forcing>,
    depth_floor: f64,
    freeze_b: bool,
    frozen: Option<BandedSymMatrix>,
    fields: QuadratureFields,
    factorizations: usize,
    min_depth: f64,
}

impl<'a> SgnSystem<'a> {
    pub fn new(ctx: &'a AssemblyContext) -> Self {
        Self {
            ctx,
            forcing: None,
            depth_floor: DEFAULT_DEPTH_FLOOR,
            freeze_b: false,
            frozen: None,
            fields: QuadratureFields::default(),
            factorizations: 0,
            min_depth: f64::INFINITY,
        }
    }

    pub fn with_forcing(mut self, forcing: Option<&'a dyn Forcing>) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn with_depth_floor(mut self, floor: f64) -> Self {
        self.depth_floor = floor;
        self
    }

    /// Reuses the first-stage `B` for the remaining stages of each step.
    pub fn with_frozen_b(mut self, freeze: bool) -> Self {
        self.freeze_b = freeze;
        self
    }

    /// Number of `B` factorizations performed so far.
    pub fn factorizations(&self) -> usize {
        self.factorizations
    }

    /// Smallest depth met at any stage so far.
    pub fn min_depth(&self) -> f64 {
        self.min_depth
    }
}

impl OdeSystem for SgnSystem<'_> {
    fn dim(&self) -> usize {
        self.ctx.space_h().dof_count() + self.ctx.space_u().dof_count()
    }

    fn begin_step(&mut self) {
        self.frozen = None;
    }

    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let ctx = self.ctx;
        let nh = ctx.space_h().dof_count();
        let (h, u) = y.split_at(nh);
        ctx.fields(h, u, &mut self.fields);
        let f = &self.fields;
        let min_depth = ctx.min_depth(f);
        self.min_depth = self.min_depth.min(min_depth);
        if !(min_depth >= self.depth_floor) {
            return Err(SgnError::DepthCollapse {
                t,
                min_depth,
                floor: self.depth_floor,
            });
        }
        let curv = ctx.curvature_values(f)?;
        let mut load_h = ctx.continuity_load(f);
        let mut load_u = ctx.momentum_load(f, &curv);
        if let Some(forcing) = self.forcing {
            ctx.add_forcing(forcing, t, &mut load_h, &mut load_u);
        }
        let hdot = ctx.gram_h().solve(&load_h)?;
        let udot = match (&self.frozen, self.freeze_b) {
            (Some(b), true) => b.solve(&load_u)?,
            _ => {
                let b = ctx.assemble_b_from(f);
                self.factorizations += 1;
                let sol = b.solve(&load_u)?;
                if self.freeze_b {
                    self.frozen = Some(b);
                }
                sol
            }
        };
        dy[..nh].copy_from_slice(&hdot);
        dy[nh..].copy_from_slice(&udot);
        Ok(())
    }
}

/// Depth floor used when none is given.
pub const DEFAULT_DEPTH_FLOOR: f64 = 1e-8;

/// One classical RK4 step of the semidiscrete system.
pub fn rk4_step(ctx: &AssemblyContext, state: &SgnState, dt: f64) -> Result<SgnState> {
    let mut sys = SgnSystem::new(ctx);
    let y = explicit_step(&ButcherTableau::classical_rk4(), &mut sys, state.t, &state.to_vec(), dt)?;
    SgnState::from_vec(ctx, &y, state.t + dt)
}

/// Receives states during a run; must not mutate them.
pub trait Observer {
    fn observe(&mut self, ctx: &AssemblyContext, state: &SgnState) -> Result<()>;
}

/// An observer invoked every `every` steps, at step 0 and at the final step.
pub struct Callback<'o> {
    pub every: usize,
    pub observer: &'o mut dyn Observer,
}

/// One diagnostics sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    pub min_depth: f64,
    pub energy: Option<f64>,
}

/// Everything needed for a fixed-step run.
pub struct RunConfig<'a> {
    pub ctx: &'a AssemblyContext,
    pub initial: SgnState,
    pub dt: f64,
    pub t_end: f64,
    pub depth_floor: f64,
    pub forcing: Option<&'a dyn Forcing>,
    pub callbacks: Vec<Callback<'a>>,
    /// Diagnostics period in steps; 0 samples only the first and last step.
    pub sample_every: usize,
    pub record_energy: bool,
    pub freeze_b: bool,
    pub progress: Option<&'a mut dyn FnMut(&Sample)>,
}

impl<'a> RunConfig<'a> {
    pub fn new(ctx: &'a AssemblyContext, initial: SgnState, dt: f64, t_end: f64) -> Self {
        Self {
            ctx,
            initial,
            dt,
            t_end,
            depth_floor: DEFAULT_DEPTH_FLOOR,
            forcing: None,
            callbacks: Vec::new(),
            sample_every: 0,
            record_energy: false,
            freeze_b: false,
            progress: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_state: SgnState,
    pub step_count: usize,
    /// The uniform step actually used, `t_end / step_count`.
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub factorizations: usize,
    pub min_depth: f64,
}

/// Number of uniform steps and the effective step for `[t0, t_end]` with nominal `dt`.
pub fn plan_steps(ctx: &AssemblyContext, t0: f64, t_end: f64, dt: f64) -> Result<(usize, f64)> {
    let span = t_end - t0;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SgnError::InvalidTimeStep(format!("dt must be positive, got {dt}")));
    }
    if !(span >= dt * (1.0 - 1e-12)) {
        return Err(SgnError::InvalidTimeStep(format!(
            "t_end - t0 = {span} is shorter than dt = {dt}"
        )));
    }
    let ratio = dt / ctx.space_h().mesh().dx();
    if ratio > 2.0 {
        return Err(SgnError::InvalidTimeStep(format!("dt/dx = {ratio} exceeds 2")));
    }
    if ratio > 1.0 {
        warn!("dt/dx = {ratio:.3} is close to the stability limit 2");
    }
    let k = (span / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((k, span / k as f64))
}

/// Fixed-step RK4 from `initial.t` to `t_end`.
pub fn run(mut cfg: RunConfig<'_>) -> Result<RunResult> {
    let ctx = cfg.ctx;
    let t0 = cfg.initial.t;
    let (steps, dt) = plan_steps(ctx, t0, cfg.t_end, cfg.dt)?;
    let tableau = ButcherTableau::classical_rk4();
    let mut sys = SgnSystem::new(ctx)
        .with_forcing(cfg.forcing)
        .with_depth_floor(cfg.depth_floor)
        .with_frozen_b(cfg.freeze_b);
    let mut y = cfg.initial.to_vec();
    let mut state = cfg.initial.clone();
    let mut samples = Vec::new();
    let mut overall_min = f64::INFINITY;
    debug!("run: {steps} steps of {dt} from t = {t0}");

    for n in 0..=steps {
        if n > 0 {
            let t = t0 + (n - 1) as f64 * dt;
            y = explicit_step(&tableau, &mut sys, t, &y, dt).map_err(|e| SgnError::StepFailed {
                t,
                source: Box::new(e),
            })?;
            state = SgnState::from_vec(ctx, &y, t0 + n as f64 * dt)?;
        }
        for cb in cfg.callbacks.iter_mut() {
            if n == steps || (cb.every > 0 && n % cb.every == 0) || n == 0 {
                cb.observer.observe(ctx, &state)?;
            }
        }
        let sample_now = n == 0 || n == steps || (cfg.sample_every > 0 && n % cfg.sample_every == 0);
        if sample_now {
            let min_depth = ctx.state_min_depth(&state);
            overall_min = overall_min.min(min_depth);
            let sample = Sample {
                step: n,
                t: state.t,
                min_depth,
                energy: cfg.record_energy.then(|| ctx.energy(&state)),
            };
            if let Some(p) = cfg.progress.as_mut() {
                p(&sample);
            }
            samples.push(sample);
        }
    }
    Ok(RunResult {
        final_state: state,
        step_count: steps,
        dt,
        samples,
        factorizations: sys.factorizations(),
        min_depth: overall_min.min(sys.min_depth()),
    })
}

/// Adaptive RKF45 integration of the same system, for cross-checking fixed-step runs.
pub fn run_rkf45(
    ctx: &AssemblyContext,
    initial: &SgnState,
    t_end: f64,
    forcing: Option<&dyn Forcing>,
    tol: f64,
) -> Result<(SgnState, AdaptiveResult)> {
    let mut sys = SgnSystem::new(ctx).with_forcing(forcing);
    let dt0 = 0.1 * ctx.space_h().mesh().dx();
    let res = rkf45(&mut sys, initial.t, &initial.to_vec(), t_end, tol, dt0)?;
    Ok((SgnState::from_vec(ctx, &res.y, t_end)?, res))
}
