//! Manufactured-solution refinement studies.

use rayon::prelude::*;

use crate::diagnostics::{ConvergenceTable, NormErrors};
use crate::error::Result;
use crate::fem::Family;
use crate::integrator::{run, RunConfig};
use crate::scenarios::{ManufacturedSolution, Scenario};

/// How the time step follows the mesh: `dt = c dx^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRule {
    pub c: f64,
    pub power: i32,
}

impl Default for StepRule {
    fn default() -> Self {
        Self { c: 0.1, power: 1 }
    }
}

impl StepRule {
    pub fn dt(&self, dx: f64) -> f64 {
        self.c * dx.powi(self.power)
    }
}

/// Errors of one manufactured run at `T = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedErrors {
    pub elements: usize,
    pub dx: f64,
    pub steps: usize,
    pub h: NormErrors,
    pub u: NormErrors,
}

/// Runs the forced problem on `elements` cells and measures the errors at `T = 1`.
pub fn run_manufactured(
    family_h: Family,
    family_u: Family,
    elements: usize,
    rule: StepRule,
    lumping: bool,
) -> Result<ManufacturedErrors> {
    let mut sc = Scenario::manufactured_convergence(family_h, family_u, elements);
    sc.lumping = lumping;
    let dx = sc.dx();
    let ctx = sc.context()?;
    let initial = sc.initial_state(&ctx)?;
    let forcing = ManufacturedSolution { g: sc.g };
    let mut cfg = RunConfig::new(&ctx, initial, rule.dt(dx), sc.t_end);
    cfg.forcing = Some(&forcing);
    let res = run(cfg)?;
    let t = res.final_state.t;
    let exact_h = |x: f64| {
        let d = forcing.h_derivs(x, t);
        [d[0], d[1], d[2]]
    };
    let exact_u = |x: f64| {
        let d = forcing.u_derivs(x, t);
        [d[0], d[1], d[2]]
    };
    Ok(ManufacturedErrors {
        elements,
        dx,
        steps: res.step_count,
        h: NormErrors::measure(&res.final_state.h, &exact_h)?,
        u: NormErrors::measure(&res.final_state.u, &exact_u)?,
    })
}

/// Refinement table over `elements`, runs executed in parallel and reported in input order.
pub fn convergence_table(
    family_h: Family,
    family_u: Family,
    elements: &[usize],
    rule: StepRule,
    lumping: bool,
) -> Result<ConvergenceTable> {
    let runs: Vec<Result<ManufacturedErrors>> = elements
        .par_iter()
        .map(|&n| run_manufactured(family_h, family_u, n, rule, lumping))
        .collect();
    let mut table = ConvergenceTable::default();
    for r in runs {
        let r = r?;
        table.push(r.elements, r.dx, r.h, r.u)?;
    }
    Ok(table)
}
