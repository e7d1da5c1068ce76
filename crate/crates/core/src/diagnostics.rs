//! Error norms, convergence rates, gauges, crest tracking, runup and shoaling fits.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::assembly::{AssemblyContext, SgnState};
use crate::error::{Result, SgnError};
use crate::fem::CoefficientVector;
use crate::integrator::Observer;

/// Norms of the error tables: Sobolev `H^s` (`s = 0, 1, 2`) and the maximum norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Norm {
    L2,
    H1,
    H2,
    Linf,
}

impl Norm {
    pub const ALL: [Norm; 4] = [Norm::L2, Norm::H1, Norm::H2, Norm::Linf];

    fn order(self) -> usize {
        match self {
            Norm::L2 | Norm::Linf => 0,
            Norm::H1 => 1,
            Norm::H2 => 2,
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L2 => "L2",
            Norm::H1 => "H1",
            Norm::H2 => "H2",
            Norm::Linf => "Linf",
        })
    }
}

impl FromStr for Norm {
    type Err = SgnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "0" | "l2" => Ok(Norm::L2),
            "1" | "h1" => Ok(Norm::H1),
            "2" | "h2" => Ok(Norm::H2),
            "inf" | "linf" => Ok(Norm::Linf),
            other => Err(SgnError::Parse(format!("unknown norm '{other}'"))),
        }
    }
}

/// Samples per element for the maximum norm.
pub const LINF_SAMPLES: usize = 20;

/// `||F - F_exact|| / ||F_exact||`; `exact(x)` returns value, first and second derivative.
pub fn error_norm(computed: &CoefficientVector, exact: &dyn Fn(f64) -> [f64; 3], norm: Norm) -> Result<f64> {
    let (num, den) = norm_parts(computed, exact, norm)?;
    if den < 1e-14 {
        return Err(SgnError::ZeroNormalizer);
    }
    Ok(num / den)
}

/// `||F - F_exact||` without normalization.
pub fn absolute_error_norm(computed: &CoefficientVector, exact: &dyn Fn(f64) -> [f64; 3], norm: Norm) -> Result<f64> {
    Ok(norm_parts(computed, exact, norm)?.0)
}

fn norm_parts(computed: &CoefficientVector, exact: &dyn Fn(f64) -> [f64; 3], norm: Norm) -> Result<(f64, f64)> {
    let space = computed.space();
    let family = space.family();
    if norm.order() > family.max_derivative() as usize {
        return Err(SgnError::DerivUnsupported(norm.order() as u8));
    }
    let mesh = space.mesh();
    let (num, den) = if norm == Norm::Linf {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for e in 0..mesh.elements() {
            for k in 0..=LINF_SAMPLES {
                let t = k as f64 / LINF_SAMPLES as f64;
                let ex = exact(mesh.map(e, t))[0];
                num = num.max((computed.eval_local(e, t)[0] - ex).abs());
                den = den.max(ex.abs());
            }
        }
        (num, den)
    } else {
        let rule = space.default_rule();
        let dx = mesh.dx();
        let mut num = 0.0;
        let mut den = 0.0;
        for e in 0..mesh.elements() {
            for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
                let t = 0.5 * (t + 1.0);
                let w = 0.5 * w * dx;
                let c = computed.eval_local(e, t);
                let ex = exact(mesh.map(e, t));
                for d in 0..=norm.order() {
                    num += w * (c[d] - ex[d]).powi(2);
                    den += w * ex[d] * ex[d];
                }
            }
        }
        (num.sqrt(), den.sqrt())
    };
    Ok((num, den))
}

/// `ln(E_prev / E_curr) / ln(dx_prev / dx_curr)`.
pub fn convergence_rate(e_prev: f64, e_curr: f64, dx_prev: f64, dx_curr: f64) -> Result<f64> {
    if !(e_prev > 0.0 && e_curr > 0.0 && dx_prev > 0.0 && dx_curr > 0.0) || dx_prev == dx_curr {
        return Err(SgnError::BadInput(format!(
            "rate needs positive errors and distinct positive spacings ({e_prev}, {e_curr}, {dx_prev}, {dx_curr})"
        )));
    }
    Ok((e_prev / e_curr).ln() / (dx_prev / dx_curr).ln())
}

/// Relative errors of one field in every applicable norm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NormErrors {
    pub l2: Option<f64>,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub linf: Option<f64>,
}

impl NormErrors {
    pub fn get(&self, norm: Norm) -> Option<f64> {
        match norm {
            Norm::L2 => self.l2,
            Norm::H1 => self.h1,
            Norm::H2 => self.h2,
            Norm::Linf => self.linf,
        }
    }

    pub fn set(&mut self, norm: Norm, v: Option<f64>) {
        match norm {
            Norm::L2 => self.l2 = v,
            Norm::H1 => self.h1 = v,
            Norm::H2 => self.h2 = v,
            Norm::Linf => self.linf = v,
        }
    }

    /// All norms the field's space supports.
    pub fn measure(computed: &CoefficientVector, exact: &dyn Fn(f64) -> [f64; 3]) -> Result<Self> {
        let mut out = Self::default();
        let family = computed.space().family();
        for norm in Norm::ALL {
            if norm.order() <= family.max_derivative() as usize {
                out.set(norm, Some(error_norm(computed, exact, norm)?));
            }
        }
        Ok(out)
    }
}

/// One refinement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub elements: usize,
    pub dx: f64,
    pub h: NormErrors,
    pub u: NormErrors,
    /// Rates against the previous row; `None` on the first row.
    pub rate_h: NormErrors,
    pub rate_u: NormErrors,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn push(&mut self, elements: usize, dx: f64, h: NormErrors, u: NormErrors) -> Result<()> {
        let mut rate_h = NormErrors::default();
        let mut rate_u = NormErrors::default();
        if let Some(prev) = self.rows.last() {
            for norm in Norm::ALL {
                if let (Some(a), Some(b)) = (prev.h.get(norm), h.get(norm)) {
                    rate_h.set(norm, Some(convergence_rate(a, b, prev.dx, dx)?));
                }
                if let (Some(a), Some(b)) = (prev.u.get(norm), u.get(norm)) {
                    rate_u.set(norm, Some(convergence_rate(a, b, prev.dx, dx)?));
                }
            }
        }
        self.rows.push(ConvergenceRow {
            elements,
            dx,
            h,
            u,
            rate_h,
            rate_u,
        });
        Ok(())
    }

    /// Rates of the last row.
    pub fn final_rates(&self, norm: Norm) -> (Option<f64>, Option<f64>) {
        self.rows
            .last()
            .map(|r| (r.rate_h.get(norm), r.rate_u.get(norm)))
            .unwrap_or((None, None))
    }
}

/// Surface elevation time series at fixed positions.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GaugeRecord {
    pub positions: Vec<f64>,
    pub times: Vec<f64>,
    /// `eta[k][g]`: elevation at time `times[k]` and gauge `g`.
    pub eta: Vec<Vec<f64>>,
    pub u: Option<Vec<Vec<f64>>>,
}

impl GaugeRecord {
    pub fn new(positions: Vec<f64>) -> Self {
        Self {
            positions,
            ..Default::default()
        }
    }

    pub fn with_velocity(mut self) -> Self {
        self.u = Some(Vec::new());
        self
    }

    pub fn series(&self, gauge: usize) -> Vec<f64> {
        self.eta.iter().map(|row| row[gauge]).collect()
    }

    /// Time and value of the largest elevation at a gauge.
    pub fn peak(&self, gauge: usize) -> Option<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.eta)
            .map(|(&t, row)| (t, row[gauge]))
            .fold(None, |best, (t, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((t, v)),
            })
    }
}

/// Appends `eta(x_g, t) = H(x_g) + b(x_g)` for every gauge.
pub fn record_gauges(ctx: &AssemblyContext, state: &SgnState, record: &mut GaugeRecord) -> Result<()> {
    if let Some(&last) = record.times.last() {
        if !(state.t > last) {
            return Err(SgnError::BadInput(format!(
                "gauge times must increase ({} after {last})",
                state.t
            )));
        }
    }
    let row = record
        .positions
        .iter()
        .map(|&x| state.surface(ctx, x))
        .collect::<Result<Vec<_>>>()?;
    if let Some(us) = record.u.as_mut() {
        us.push(record.positions.iter().map(|&x| state.u.eval(x, 0)).collect::<Result<Vec<_>>>()?);
    }
    record.times.push(state.t);
    record.eta.push(row);
    Ok(())
}

impl Observer for GaugeRecord {
    fn observe(&mut self, ctx: &AssemblyContext, state: &SgnState) -> Result<()> {
        record_gauges(ctx, state, self)
    }
}

/// Crest position, surface elevation and elevation over local still-water depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crest {
    pub t: f64,
    pub x: f64,
    pub height: f64,
    pub relative_height: f64,
}

/// Vertex of the parabola through `(-1, fm)`, `(0, f0)`, `(1, fp)`: `(offset, value)`.
pub fn parabola_vertex(fm: f64, f0: f64, fp: f64) -> (f64, f64) {
    let curv = fm - 2.0 * f0 + fp;
    if curv >= 0.0 {
        return (0.0, f0);
    }
    let d = 0.5 * (fm - fp) / curv;
    (d, f0 - 0.25 * (fm - fp) * d)
}

/// Locates the crest from nodal surface values.
pub fn crest(ctx: &AssemblyContext, state: &SgnState) -> Result<Crest> {
    let mesh = ctx.space_h().mesh();
    let nodes = mesh.nodes();
    let eta = nodes
        .iter()
        .map(|&x| state.surface(ctx, x))
        .collect::<Result<Vec<_>>>()?;
    let (imax, &emax) = eta
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |b, (i, v)| if *v > *b.1 { (i, v) } else { b });
    let emin = eta.iter().copied().fold(f64::INFINITY, f64::min);
    if !(emax - emin > 1e-12) || !(emax > 0.0) {
        return Err(SgnError::NoCrest);
    }
    let x = if imax == 0 || imax + 1 == nodes.len() {
        nodes[imax]
    } else {
        let (d, _) = parabola_vertex(eta[imax - 1], eta[imax], eta[imax + 1]);
        nodes[imax] + d * mesh.dx()
    };
    let height = state.surface(ctx, x)?;
    let depth = -ctx.discrete_bathymetry().b.eval(x, 0)?;
    Ok(Crest {
        t: state.t,
        x,
        height,
        relative_height: height / depth.abs(),
    })
}

/// Crest history of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CrestTrack {
    pub samples: Vec<Crest>,
}

impl Observer for CrestTrack {
    fn observe(&mut self, ctx: &AssemblyContext, state: &SgnState) -> Result<()> {
        self.samples.push(crest(ctx, state)?);
        Ok(())
    }
}

/// Crest of every state in a sequence.
pub fn crest_track(ctx: &AssemblyContext, states: &[SgnState]) -> Result<Vec<Crest>> {
    states.iter().map(|s| crest(ctx, s)).collect()
}

/// Least-squares slope of `ln(eta_max)` against `-ln(depth)`.
pub fn fit_shoaling_exponent(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(SgnError::DegenerateFit(format!("{} samples, need 3", samples.len())));
    }
    if samples.iter().any(|&(d, e)| !(d > 0.0 && e > 0.0)) {
        return Err(SgnError::DegenerateFit("depths and amplitudes must be positive".into()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(d, e)| (-d.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 1e-14) {
        return Err(SgnError::DegenerateFit("all depths equal".into()));
    }
    Ok(sxy / sxx)
}

/// Default depth window of the shoaling fit, as fractions of the offshore depth.
pub const GREEN_WINDOW: (f64, f64) = (0.4, 0.9);

/// `(depth, height)` pairs of crest samples whose depth lies in `window * b0`.
pub fn shoaling_samples(track: &[Crest], b0: f64, window: (f64, f64)) -> Vec<(f64, f64)> {
    track
        .iter()
        .filter_map(|c| {
            let depth = c.height / c.relative_height;
            (depth >= window.0 * b0 && depth <= window.1 * b0).then_some((depth, c.height))
        })
        .collect()
}

/// Largest elevation recorded at `gauge`, optionally divided by `depth`.
pub fn wall_runup(record: &GaugeRecord, gauge: usize, depth: Option<f64>) -> Result<f64> {
    let (_, peak) = record
        .peak(gauge)
        .ok_or_else(|| SgnError::BadInput("empty gauge record".into()))?;
    Ok(depth.map_or(peak, |d| peak / d))
}

/// Asymptotic maximum runup `2a + a^2/2 + a^3/2` at a wall for relative amplitude `a`.
pub fn runup_asymptotic(alpha: f64) -> f64 {
    2.0 * alpha + 0.5 * alpha * alpha + 0.5 * alpha.powi(3)
}

/// Largest `|eta_wall - eta_collision|` over common gauges and times.
pub fn reflection_equivalence(wall: &GaugeRecord, collision: &GaugeRecord) -> Result<f64> {
    if wall.positions != collision.positions {
        return Err(SgnError::MeshMismatch("gauge positions differ".into()));
    }
    if wall.times.len() != collision.times.len()
        || wall.times.iter().zip(&collision.times).any(|(a, b)| (a - b).abs() > 1e-9)
    {
        return Err(SgnError::MeshMismatch("sample times differ".into()));
    }
    Ok(wall
        .eta
        .iter()
        .zip(&collision.eta)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max))
}
