//! The `run`, `converge` and `bench` verbs.

use std::path::Path;
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use sgn_core::bathymetry::REVERE_OFFSHORE_DEPTH;
use sgn_core::convergence::{convergence_table, StepRule};
use sgn_core::diagnostics::{
    absolute_error_norm, error_norm, reflection_equivalence, runup_asymptotic, wall_runup, ConvergenceTable,
    GaugeRecord, Norm,
};
use sgn_core::fem::Family;
use sgn_core::integrator::{run, run_rkf45, Callback, RunConfig, Sample, DEFAULT_DEPTH_FLOOR};
use sgn_core::scenarios::{ManufacturedSolution, Scenario};
use sgn_core::{AssemblyContext, SgnState};

use crate::config::Config;
use crate::output::{self, Manifest, RunupRow};
use crate::CliError;

/// Amplitudes of the wall-reflection sweep.
pub const RUNUP_AMPLITUDES: [f64; 14] = [0.075, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7];

/// Command-line overrides shared by all verbs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub dx: Option<f64>,
    pub t_end: Option<f64>,
    pub family_h: Option<Family>,
    pub family_u: Option<Family>,
    pub lumping: Option<bool>,
    pub verify_rkf: bool,
    pub collision_check: bool,
}

impl Overrides {
    pub fn apply(&self, mut sc: Scenario) -> Result<Scenario, CliError> {
        if let Some(dx) = self.dx {
            sc = sc.with_dx(dx);
        }
        if let Some(dt) = self.dt {
            sc.dt = dt;
        }
        if let Some(t) = self.t_end {
            sc.t_end = t;
        }
        if let Some(f) = self.family_h {
            sc.family_h = f;
        }
        if let Some(f) = self.family_u {
            sc.family_u = f;
        }
        if let Some(l) = self.lumping {
            sc.lumping = l;
        }
        sc.validate()?;
        Ok(sc)
    }
}

/// Run controls that are not part of the scenario itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub gauge_every: usize,
    pub energy_every: usize,
    pub depth_floor: f64,
    pub verify_rkf: bool,
    pub rkf_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            gauge_every: 1,
            energy_every: 10,
            depth_floor: DEFAULT_DEPTH_FLOOR,
            verify_rkf: false,
            rkf_tol: 1e-10,
        }
    }
}

impl RunOptions {
    pub fn from_config(cfg: &Config, ov: &Overrides) -> Self {
        let d = Self::default();
        Self {
            gauge_every: cfg.gauge_every.unwrap_or(d.gauge_every),
            energy_every: cfg.energy_every.unwrap_or(d.energy_every),
            depth_floor: cfg.depth_floor.unwrap_or(d.depth_floor),
            verify_rkf: ov.verify_rkf || cfg.verify_rkf.unwrap_or(false),
            rkf_tol: cfg.rkf_tol.unwrap_or(d.rkf_tol),
        }
    }
}

/// Everything a run produces.
pub struct Simulation {
    pub final_state: SgnState,
    pub gauges: GaugeRecord,
    pub samples: Vec<Sample>,
    pub steps: usize,
    pub dt: f64,
}

/// Integrates `sc` on `ctx` without writing anything.
pub fn simulate(sc: &Scenario, ctx: &AssemblyContext, opts: &RunOptions) -> Result<Simulation, CliError> {
    let init = sc.initial_state(ctx)?;
    let forcing = sc.forcing();
    let mut gauges = GaugeRecord::new(sc.gauges.clone());
    let mut cfg = RunConfig::new(ctx, init, sc.dt, sc.t_end);
    cfg.depth_floor = opts.depth_floor;
    cfg.forcing = forcing.as_ref().map(|f| f as _);
    cfg.record_energy = sc.record_energy;
    cfg.sample_every = if sc.record_energy { opts.energy_every } else { 0 };
    if !sc.gauges.is_empty() {
        cfg.callbacks.push(Callback {
            every: opts.gauge_every,
            observer: &mut gauges,
        });
    }
    let res = run(cfg)?;
    Ok(Simulation {
        final_state: res.final_state,
        gauges,
        samples: res.samples,
        steps: res.step_count,
        dt: res.dt,
    })
}

/// Runs `sc` and writes gauges, energy, final state and the manifest into `out`.
pub fn execute(
    sc: &Scenario,
    opts: &RunOptions,
    out: &Path,
    manifest: &mut Manifest,
) -> Result<(AssemblyContext, Simulation), CliError> {
    let start = Instant::now();
    let ctx = sc.context()?;
    info!(
        "{}: {} elements, {}/{}, dt = {}, T = {}",
        sc.name, sc.elements, sc.family_h, sc.family_u, sc.dt, sc.t_end
    );
    let sim = simulate(sc, &ctx, opts)?;
    manifest.scenario = Some(sc.clone());
    manifest.steps = Some(sim.steps);
    manifest.dt = Some(sim.dt);
    if !sc.gauges.is_empty() {
        output::write_gauges(&out.join("gauges.csv"), &sim.gauges)?;
        manifest.outputs.push("gauges.csv".into());
        for g in 0..sc.gauges.len() {
            if let Some((t, peak)) = sim.gauges.peak(g) {
                println!("gauge {g} (x = {}): peak {peak:.6} at t = {t:.3}", sc.gauges[g]);
            }
        }
    }
    if sc.record_energy {
        output::write_energy(&out.join("energy.csv"), &sim.samples)?;
        manifest.outputs.push("energy.csv".into());
        let i0 = sim.samples.first().and_then(|s| s.energy).unwrap_or(f64::NAN);
        let drift = sim
            .samples
            .iter()
            .filter_map(|s| s.energy)
            .map(|i| (i - i0).abs())
            .fold(0.0, f64::max);
        println!("energy: I(0) = {i0:.12}, max |I - I(0)| = {drift:.3e}");
        manifest.result("energy_initial", i0)?;
        manifest.result("energy_max_drift", drift)?;
    }
    output::write_snapshot(&out.join("final_state.csv"), &ctx, &sim.final_state)?;
    manifest.outputs.push("final_state.csv".into());
    if let Some(m) = sc.forcing() {
        manufactured_errors(&m, &sim.final_state, manifest)?;
    }
    if opts.verify_rkf {
        let (adaptive, stats) = run_rkf45(&ctx, &sc.initial_state(&ctx)?, sc.t_end, sc.forcing().as_ref().map(|f| f as _), opts.rkf_tol)?;
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let dh = diff(adaptive.h.values(), sim.final_state.h.values());
        let du = diff(adaptive.u.values(), sim.final_state.u.values());
        println!(
            "rkf45 check: {} accepted / {} rejected steps, max coefficient difference H {dh:.3e}, U {du:.3e}",
            stats.accepted, stats.rejected
        );
        manifest.result("rkf45_max_difference_h", dh)?;
        manifest.result("rkf45_max_difference_u", du)?;
    }
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok((ctx, sim))
}

fn manufactured_errors(m: &ManufacturedSolution, state: &SgnState, manifest: &mut Manifest) -> Result<(), CliError> {
    let t = state.t;
    let exact_h = |x: f64| {
        let d = m.h_derivs(x, t);
        [d[0], d[1], d[2]]
    };
    let exact_u = |x: f64| {
        let d = m.u_derivs(x, t);
        [d[0], d[1], d[2]]
    };
    let eh = error_norm(&state.h, &exact_h, Norm::L2)?;
    let eu = error_norm(&state.u, &exact_u, Norm::L2)?;
    println!("relative L2 errors at t = {t}: H {eh:.4e}, U {eu:.4e}");
    manifest.result("relative_l2_error_h", eh)?;
    manifest.result("relative_l2_error_u", eu)?;
    manifest.result("absolute_l2_error_h", absolute_error_norm(&state.h, &exact_h, Norm::L2)?)?;
    manifest.result("absolute_l2_error_u", absolute_error_norm(&state.u, &exact_u, Norm::L2)?)?;
    Ok(())
}

pub fn cmd_run(cfg: &Config, ov: &Overrides, out: &Path) -> Result<Manifest, CliError> {
    let sc = ov.apply(cfg.resolve()?)?;
    let opts = RunOptions::from_config(cfg, ov);
    let mut manifest = Manifest::new("run");
    execute(&sc, &opts, out, &mut manifest)?;
    manifest.write(out)?;
    Ok(manifest)
}

/// Refinement study; the families and `N` list come from the `[converge]` section or the flags.
pub fn cmd_converge(
    cfg: Option<&Config>,
    ov: &Overrides,
    elements: Option<Vec<usize>>,
    out: &Path,
) -> Result<ConvergenceTable, CliError> {
    let start = Instant::now();
    let section = cfg.and_then(|c| c.converge.as_ref());
    let family_h = ov.family_h.or(section.map(|s| s.family_h)).unwrap_or(Family::P1);
    let family_u = ov.family_u.or(section.map(|s| s.family_u)).unwrap_or(Family::P1);
    let ns = elements
        .or_else(|| section.map(|s| s.elements.clone()))
        .unwrap_or_else(|| vec![80, 160, 320, 640]);
    if ns.len() < 2 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("elements must be at least two increasing values".into()));
    }
    let rule = section.and_then(|s| s.dt_rule).map(StepRule::from).unwrap_or_default();
    let lumping = ov.lumping.or(section.and_then(|s| s.lumping)).unwrap_or(false);
    let table = convergence_table(family_h, family_u, &ns, rule, lumping)?;
    println!("{family_h}/{family_u}, dt = {} dx^{}, lumping {lumping}", rule.c, rule.power);
    println!("{:>6} {:>12} {:>8} {:>12} {:>8}", "N", "E0[H]", "rate", "E0[U]", "rate");
    for r in &table.rows {
        let rate = |v: Option<f64>| v.map_or("".into(), |x| format!("{x:.4}"));
        println!(
            "{:>6} {:>12.4e} {:>8} {:>12.4e} {:>8}",
            r.elements,
            r.h.l2.unwrap_or(f64::NAN),
            rate(r.rate_h.l2),
            r.u.l2.unwrap_or(f64::NAN),
            rate(r.rate_u.l2)
        );
    }
    output::write_table(&out.join("table.csv"), &table)?;
    let mut manifest = Manifest::new("converge");
    manifest.outputs.push("table.csv".into());
    manifest.result("family_h", family_h)?;
    manifest.result("family_u", family_u)?;
    manifest.result("elements", &ns)?;
    manifest.result("dt_rule", (rule.c, rule.power))?;
    manifest.result("lumping", lumping)?;
    manifest.result("table", &table)?;
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(table)
}

/// Benchmarks of the experiments section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bench {
    Shoal35,
    Wall,
    Beach50,
    Revere,
    RunupSweep,
}

impl std::str::FromStr for Bench {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "shoal35" => Ok(Bench::Shoal35),
            "wall" => Ok(Bench::Wall),
            "beach50" => Ok(Bench::Beach50),
            "revere" => Ok(Bench::Revere),
            "runup-sweep" => Ok(Bench::RunupSweep),
            other => Err(CliError::Config(format!(
                "unknown benchmark '{other}' (expected shoal35, wall, beach50, revere, runup-sweep)"
            ))),
        }
    }
}

pub fn cmd_bench(bench: Bench, amplitude: Option<f64>, ov: &Overrides, out: &Path) -> Result<Manifest, CliError> {
    let opts = RunOptions {
        verify_rkf: ov.verify_rkf,
        ..RunOptions::default()
    };
    let mut manifest = Manifest::new(&format!("bench {bench:?}"));
    match bench {
        Bench::Shoal35 => {
            let sc = ov.apply(Scenario::shoal_35(amplitude.unwrap_or(0.2)))?;
            execute(&sc, &opts, out, &mut manifest)?;
        }
        Bench::Beach50 => {
            let sc = ov.apply(Scenario::beach_50_wall(amplitude.unwrap_or(0.07)))?;
            execute(&sc, &opts, out, &mut manifest)?;
        }
        Bench::Wall => {
            let a = amplitude.unwrap_or(0.3);
            let sc = ov.apply(Scenario::wall_reflection(a))?;
            let (_, sim) = execute(&sc, &opts, &out.join("wall"), &mut manifest)?;
            let r = wall_runup(&sim.gauges, 0, Some(sc.offshore_depth))?;
            println!("A = {a}: maximum runup {r:.6}, asymptotic {:.6}", runup_asymptotic(a));
            manifest.result("runup", r)?;
            manifest.result("runup_asymptotic", runup_asymptotic(a))?;
            if ov.collision_check {
                let col = ov.apply(Scenario::head_on_collision(a))?;
                let mut col_manifest = Manifest::new("collision");
                let (_, col_sim) = execute(&col, &opts, &out.join("collision"), &mut col_manifest)?;
                col_manifest.write(&out.join("collision"))?;
                let d = reflection_equivalence(&sim.gauges, &col_sim.gauges)?;
                println!("wall vs collision: max gauge discrepancy {d:.3e} ({:.4}% of A)", 100.0 * d / a);
                manifest.result("collision_max_discrepancy", d)?;
            }
            manifest.write(&out.join("wall"))?;
        }
        Bench::Revere => {
            let rel = amplitude.unwrap_or(0.3);
            let sc = ov.apply(Scenario::revere(rel))?;
            let (_, sim) = execute(&sc, &opts, out, &mut manifest)?;
            let wall = sc
                .gauges
                .iter()
                .position(|&x| (x - sc.domain.1).abs() < 1e-12)
                .ok_or_else(|| CliError::Config("revere needs a gauge at the wall".into()))?;
            let r = wall_runup(&sim.gauges, wall, None)?;
            println!(
                "A/b0 = {rel}: runup {r:.4} m, R/b0 = {:.4} (laboratory: R/b0 = 0.13 for A/b0 = 0.05, 0.45 m for A/b0 = 0.3)",
                r / REVERE_OFFSHORE_DEPTH
            );
            manifest.result("runup_m", r)?;
            manifest.result("runup_relative", r / REVERE_OFFSHORE_DEPTH)?;
        }
        Bench::RunupSweep => {
            let start = Instant::now();
            let amps: Vec<f64> = amplitude.map_or(RUNUP_AMPLITUDES.to_vec(), |a| vec![a]);
            let rows = amps
                .par_iter()
                .map(|&a| -> Result<RunupRow, CliError> {
                    let sc = ov.apply(Scenario::wall_reflection(a))?;
                    let ctx = sc.context()?;
                    let sim = simulate(&sc, &ctx, &opts)?;
                    Ok(RunupRow {
                        amplitude: a,
                        computed: wall_runup(&sim.gauges, 0, Some(sc.offshore_depth))?,
                        asymptotic: runup_asymptotic(a),
                    })
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            println!("{:>6} {:>10} {:>10}", "A", "Rmax", "Rasym");
            for r in &rows {
                println!("{:>6} {:>10.5} {:>10.5}", r.amplitude, r.computed, r.asymptotic);
            }
            output::write_runup(&out.join("runup.csv"), &rows)?;
            manifest.outputs.push("runup.csv".into());
            manifest.result("rows", &rows)?;
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
        }
    }
    if bench != Bench::Wall {
        manifest.write(out)?;
    }
    Ok(manifest)
}
