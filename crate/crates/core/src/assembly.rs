//! Weak forms of the modified Galerkin semidiscretization.
//!
//! With `(.,.)` the L2 inner product, `h`, `u` the discrete depth and velocity and
//! `b`, `b_x`, `b_xx` the projected bottom fields, one right-hand-side evaluation
//! consists of three solves:
//!
//! * the nonlinear discrete Laplacian `w` of `u`:
//!   `(w, psi) = -(u_x^2, psi) - (u u_x, psi_x)`, which stands in for `u u_xx`;
//! * the continuity equation `(h_t, phi) = -((h u)_x, phi)`;
//! * the momentum equation `B(u_t, psi; h) = r(psi)` with
//!   `B(v, psi; h) = (h [1 + h_x b_x + h b_xx / 2 + b_x^2] v, psi) + (h^3 v_x, psi_x) / 3`
//!   and
//!   `r(psi) = -(h [g eta_x + u u_x], psi) - (h^3 [w - u_x^2], psi_x) / 3
//!            + (h^2 [u^2 b_xx + u u_x b_x], psi_x) / 2
//!            + (h b_x {h [w - u_x^2] - 2 u^2 b_xx - 2 u u_x b_x}, psi) / 2`.
//!
//! `eta_x = h_x + (b)_x` uses the derivative of the projected bottom so that still
//! water (`h = -b`, `u = 0`) is an exact steady state.

use crate::bathymetry::{Bathymetry, DiscreteBathymetry};
use crate::error::{Result, SgnError};
use crate::fem::{
    assemble_gram, assemble_weighted, lump_mass, BandedSymMatrix, CoefficientVector, DiagonalMatrix, Family,
    FunctionSpace, QuadratureRule, Tabulation,
};

/// Source terms `(f_h, f_u)` added to the continuity and momentum equations.
pub trait Forcing: Send + Sync {
    fn eval(&self, t: f64, x: f64) -> (f64, f64);
}

/// How the curvature term `u u_xx` is represented in the momentum load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    /// Nonlinear discrete Laplacian (modified Galerkin).
    DiscreteLaplacian,
    /// Pointwise `u u_xx` from spline second derivatives (standard Galerkin, S3 only).
    Pointwise,
}

/// Options for building an [`AssemblyContext`].
#[derive(Debug, Clone)]
pub struct ContextOptions {
    pub g: f64,
    /// Lumped mass for the discrete Laplacian (P1/P2 velocity spaces only).
    pub lumping: bool,
    /// Quadrature nodes per element; `None` picks the larger family default.
    pub quadrature_nodes: Option<usize>,
    pub curvature: Curvature,
}

impl Default for ContextOptions {
    fn default() -> Self {
        Self {
            g: 1.0,
            lumping: false,
            quadrature_nodes: None,
            curvature: Curvature::DiscreteLaplacian,
        }
    }
}

/// Mass solver for the discrete Laplacian.
#[derive(Debug, Clone)]
enum LaplacianMass {
    Consistent,
    Lumped(DiagonalMatrix),
}

/// Discretization data shared by every right-hand-side evaluation.
#[derive(Debug)]
pub struct AssemblyContext {
    space_h: FunctionSpace,
    space_u: FunctionSpace,
    rule: QuadratureRule,
    tab_h: Tabulation,
    tab_u: Tabulation,
    gram_h: BandedSymMatrix,
    gram_u: BandedSymMatrix,
    laplacian_mass: LaplacianMass,
    bathymetry: Bathymetry,
    dbath: DiscreteBathymetry,
    /// Projected `b`, its derivative, and the projections of `b_x`, `b_xx` at quadrature points.
    bq: Vec<f64>,
    bq_x: Vec<f64>,
    bxq: Vec<f64>,
    bxxq: Vec<f64>,
    g: f64,
    curvature: Curvature,
}

/// Discrete fields at every quadrature point.
#[derive(Debug, Clone, Default)]
pub struct QuadratureFields {
    pub h: Vec<f64>,
    pub hx: Vec<f64>,
    pub u: Vec<f64>,
    pub ux: Vec<f64>,
    pub uxx: Vec<f64>,
}

impl AssemblyContext {
    pub fn new(
        space_h: FunctionSpace,
        space_u: FunctionSpace,
        bathymetry: Bathymetry,
        options: ContextOptions,
    ) -> Result<Self> {
        if !space_h.mesh().same_as(space_u.mesh()) {
            return Err(SgnError::SpaceMismatch);
        }
        let min_nodes = space_h
            .family()
            .default_quadrature_nodes()
            .max(space_u.family().default_quadrature_nodes());
        let nodes = match options.quadrature_nodes {
            Some(n) if n < min_nodes => {
                return Err(SgnError::BadInput(format!(
                    "quadrature with {n} nodes is below the family default {min_nodes}"
                )))
            }
            Some(n) => n,
            None => min_nodes,
        };
        if options.curvature == Curvature::Pointwise && space_u.family() != Family::S3 {
            return Err(SgnError::UnsupportedFamily(format!(
                "pointwise curvature needs S3, got {}",
                space_u.family()
            )));
        }
        let rule = QuadratureRule::gauss_legendre(nodes)?;
        let tab_h = space_h.tabulate(&rule);
        let tab_u = space_u.tabulate(&rule);
        let gram_h = assemble_gram(&space_h, &rule);
        let gram_u = assemble_gram(&space_u, &rule);
        gram_h.cholesky()?;
        gram_u.cholesky()?;
        let laplacian_mass = if options.lumping {
            LaplacianMass::Lumped(lump_mass(&space_u)?)
        } else {
            LaplacianMass::Consistent
        };
        let dbath = bathymetry.project(&space_h, &rule)?;
        let npts = tab_h.total_points();
        let (mut bq, mut bq_x, mut bxq, mut bxxq) =
            (vec![0.0; npts], vec![0.0; npts], vec![0.0; npts], vec![0.0; npts]);
        tab_h.eval_into(dbath.b.values(), &mut bq, &mut bq_x, None);
        tab_h.eval_values(dbath.bx.values(), &mut bxq);
        tab_h.eval_values(dbath.bxx.values(), &mut bxxq);
        Ok(Self {
            space_h,
            space_u,
            rule,
            tab_h,
            tab_u,
            gram_h,
            gram_u,
            laplacian_mass,
            bathymetry,
            dbath,
            bq,
            bq_x,
            bxq,
            bxxq,
            g: options.g,
            curvature: options.curvature,
        })
    }

    pub fn space_h(&self) -> &FunctionSpace {
        &self.space_h
    }

    pub fn space_u(&self) -> &FunctionSpace {
        &self.space_u
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn tab_h(&self) -> &Tabulation {
        &self.tab_h
    }

    pub fn tab_u(&self) -> &Tabulation {
        &self.tab_u
    }

    pub fn gram_h(&self) -> &BandedSymMatrix {
        &self.gram_h
    }

    pub fn gram_u(&self) -> &BandedSymMatrix {
        &self.gram_u
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn lumping(&self) -> bool {
        matches!(self.laplacian_mass, LaplacianMass::Lumped(_))
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn bathymetry(&self) -> &Bathymetry {
        &self.bathymetry
    }

    pub fn discrete_bathymetry(&self) -> &DiscreteBathymetry {
        &self.dbath
    }

    /// Projected bottom `b(x)` at quadrature point `i`.
    pub fn bottom_at(&self, i: usize) -> f64 {
        self.bq[i]
    }

    pub fn total_points(&self) -> usize {
        self.tab_h.total_points()
    }

    /// Quadrature weight of global point index `i`.
    #[inline]
    pub fn weight_at(&self, i: usize) -> f64 {
        self.tab_h.weight(i % self.tab_h.points_per_element())
    }

    /// Depth and velocity with derivatives at all quadrature points.
    pub fn fields(&self, h: &[f64], u: &[f64], out: &mut QuadratureFields) {
        let n = self.total_points();
        for v in [&mut out.h, &mut out.hx, &mut out.u, &mut out.ux, &mut out.uxx] {
            v.resize(n, 0.0);
        }
        self.tab_h.eval_into(h, &mut out.h, &mut out.hx, None);
        let want_uxx = self.space_u.family() == Family::S3;
        self.tab_u
            .eval_into(u, &mut out.u, &mut out.ux, if want_uxx { Some(&mut out.uxx) } else { None });
    }

    /// Smallest depth over the quadrature points.
    pub fn min_depth(&self, fields: &QuadratureFields) -> f64 {
        fields.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Load of the discrete Laplacian: `-(u_x^2, psi) - (u u_x, psi_x)`.
    pub fn laplacian_load(&self, f: &QuadratureFields) -> Vec<f64> {
        self.tab_u
            .load(self.space_u.dof_count(), |i| (-f.ux[i] * f.ux[i], -f.u[i] * f.ux[i]))
    }

    /// Solves the Laplacian mass system.
    pub fn laplacian_solve(&self, load: &[f64]) -> Result<Vec<f64>> {
        match &self.laplacian_mass {
            LaplacianMass::Consistent => self.gram_u.solve(load),
            LaplacianMass::Lumped(d) => d.solve(load),
        }
    }

    /// Continuity load `-((h u)_x, phi)`, product rule at quadrature points.
    pub fn continuity_load(&self, f: &QuadratureFields) -> Vec<f64> {
        self.tab_h.load(self.space_h.dof_count(), |i| {
            (-(f.hx[i] * f.u[i] + f.h[i] * f.ux[i]), 0.0)
        })
    }

    /// Momentum load; `curv[i]` approximates `u u_xx` at quadrature point `i`.
    pub fn momentum_load(&self, f: &QuadratureFields, curv: &[f64]) -> Vec<f64> {
        let g = self.g;
        self.tab_u.load(self.space_u.dof_count(), |i| {
            let (h, hx, u, ux) = (f.h[i], f.hx[i], f.u[i], f.ux[i]);
            let (bx, bxx) = (self.bxq[i], self.bxxq[i]);
            let eta_x = hx + self.bq_x[i];
            let disp = curv[i] - ux * ux;
            let bottom = u * u * bxx + u * ux * bx;
            let a = -h * (g * eta_x + u * ux) + 0.5 * h * bx * (h * disp - 2.0 * bottom);
            let c = -h * h * h * disp / 3.0 + 0.5 * h * h * bottom;
            (a, c)
        })
    }

    /// `B(psi_j, psi_i; h)` assembled on the velocity space.
    pub fn assemble_b_from(&self, f: &QuadratureFields) -> BandedSymMatrix {
        assemble_weighted(&self.space_u, &self.tab_u, |i| {
            let h = f.h[i];
            let bx = self.bxq[i];
            let m = h * (1.0 + f.hx[i] * bx + 0.5 * h * self.bxxq[i] + bx * bx);
            (m, h * h * h / 3.0)
        })
    }

    /// Adds `(f_h, phi)` and `(f_u, psi)` at time `t`.
    pub fn add_forcing(&self, forcing: &dyn Forcing, t: f64, load_h: &mut [f64], load_u: &mut [f64]) {
        let pts = self.tab_h.points();
        let vals: Vec<(f64, f64)> = pts.iter().map(|&x| forcing.eval(t, x)).collect();
        let fh = self.tab_h.load(load_h.len(), |i| (vals[i].0, 0.0));
        let fu = self.tab_u.load(load_u.len(), |i| (vals[i].1, 0.0));
        load_h.iter_mut().zip(fh).for_each(|(a, b)| *a += b);
        load_u.iter_mut().zip(fu).for_each(|(a, b)| *a += b);
    }

    /// `u u_xx` at quadrature points, from the discrete Laplacian or pointwise.
    pub fn curvature_values(&self, f: &QuadratureFields) -> Result<Vec<f64>> {
        match self.curvature {
            Curvature::DiscreteLaplacian => {
                let w = self.laplacian_solve(&self.laplacian_load(f))?;
                let mut wq = vec![0.0; self.total_points()];
                self.tab_u.eval_values(&w, &mut wq);
                Ok(wq)
            }
            Curvature::Pointwise => Ok(f.u.iter().zip(&f.uxx).map(|(a, b)| a * b).collect()),
        }
    }

    fn check_h(&self, h: &CoefficientVector) -> Result<()> {
        if h.values().len() != self.space_h.dof_count() {
            return Err(SgnError::DimensionMismatch {
                expected: self.space_h.dof_count(),
                got: h.values().len(),
            });
        }
        Ok(())
    }

    fn check_u(&self, u: &CoefficientVector) -> Result<()> {
        if u.values().len() != self.space_u.dof_count() {
            return Err(SgnError::DimensionMismatch {
                expected: self.space_u.dof_count(),
                got: u.values().len(),
            });
        }
        Ok(())
    }

    fn fields_of(&self, h: Option<&CoefficientVector>, u: Option<&CoefficientVector>) -> QuadratureFields {
        let hz = vec![0.0; self.space_h.dof_count()];
        let uz = vec![0.0; self.space_u.dof_count()];
        let mut f = QuadratureFields::default();
        self.fields(
            h.map(|c| c.values()).unwrap_or(&hz),
            u.map(|c| c.values()).unwrap_or(&uz),
            &mut f,
        );
        f
    }
}

/// Discrete depth `H` in `S_h`, velocity `U` in `S_u` and the time they belong to.
#[derive(Debug, Clone)]
pub struct SgnState {
    pub h: CoefficientVector,
    pub u: CoefficientVector,
    pub t: f64,
}

impl SgnState {
    pub fn new(h: CoefficientVector, u: CoefficientVector, t: f64) -> Self {
        Self { h, u, t }
    }

    /// Still water over the projected bottom: `H = -b`, `U = 0`.
    pub fn still_water(ctx: &AssemblyContext) -> Self {
        let b = ctx.discrete_bathymetry().b.values();
        let h = CoefficientVector::new(ctx.space_h().clone(), b.iter().map(|v| -v).collect())
            .expect("bathymetry lives in S_h");
        Self::new(h, CoefficientVector::zeros(ctx.space_u().clone()), 0.0)
    }

    /// Free-surface elevation `H + b` at `x`, with `b` the projected bottom.
    pub fn surface(&self, ctx: &AssemblyContext, x: f64) -> Result<f64> {
        Ok(self.h.eval(x, 0)? + ctx.discrete_bathymetry().b.eval(x, 0)?)
    }

    /// Concatenated coefficients `[H, U]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut y = self.h.values().to_vec();
        y.extend_from_slice(self.u.values());
        y
    }

    pub fn from_vec(ctx: &AssemblyContext, y: &[f64], t: f64) -> Result<Self> {
        let nh = ctx.space_h().dof_count();
        if y.len() != nh + ctx.space_u().dof_count() {
            return Err(SgnError::DimensionMismatch {
                expected: nh + ctx.space_u().dof_count(),
                got: y.len(),
            });
        }
        Ok(Self::new(
            CoefficientVector::new(ctx.space_h().clone(), y[..nh].to_vec())?,
            CoefficientVector::new(ctx.space_u().clone(), y[nh..].to_vec())?,
            t,
        ))
    }
}

impl AssemblyContext {
    /// `I = int g eta^2 + h u^2 + h [h_x b_x + h b_xx / 2 + b_x^2] u^2 + h^3 u_x^2 / 3`.
    pub fn energy_from(&self, f: &QuadratureFields) -> f64 {
        let nq = self.tab_h.points_per_element();
        let mut total = 0.0;
        for (i, &h) in f.h.iter().enumerate() {
            let eta = h + self.bq[i];
            let (u, ux) = (f.u[i], f.ux[i]);
            let (bx, bxx) = (self.bxq[i], self.bxxq[i]);
            let density = self.g * eta * eta
                + h * u * u
                + h * (f.hx[i] * bx + 0.5 * h * bxx + bx * bx) * u * u
                + h * h * h * ux * ux / 3.0;
            total += self.tab_h.weight(i % nq) * density;
        }
        total
    }

    pub fn energy(&self, state: &SgnState) -> f64 {
        let mut f = QuadratureFields::default();
        self.fields(state.h.values(), state.u.values(), &mut f);
        self.energy_from(&f)
    }

    /// Minimum of `H` over the quadrature points.
    pub fn state_min_depth(&self, state: &SgnState) -> f64 {
        let mut hq = vec![0.0; self.total_points()];
        self.tab_h.eval_values(state.h.values(), &mut hq);
        hq.into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Nonlinear discrete Laplacian `w` of `u`: `(w, psi) = -(u_x^2, psi) - (u u_x, psi_x)`.
pub fn nonlinear_discrete_laplacian(ctx: &AssemblyContext, u: &CoefficientVector) -> Result<CoefficientVector> {
    ctx.check_u(u)?;
    let f = ctx.fields_of(None, Some(u));
    let w = ctx.laplacian_solve(&ctx.laplacian_load(&f))?;
    CoefficientVector::new(ctx.space_u.clone(), w)
}

/// `B(., .; h)` on the velocity space, with its factorization attempted eagerly.
pub fn assemble_b(ctx: &AssemblyContext, h: &CoefficientVector) -> Result<BandedSymMatrix> {
    ctx.check_h(h)?;
    let f = ctx.fields_of(Some(h), None);
    let b = ctx.assemble_b_from(&f);
    b.cholesky()?;
    Ok(b)
}

/// `f_i = -((h u)_x, phi_i)`.
pub fn continuity_rhs(ctx: &AssemblyContext, h: &CoefficientVector, u: &CoefficientVector) -> Result<Vec<f64>> {
    ctx.check_h(h)?;
    ctx.check_u(u)?;
    Ok(ctx.continuity_load(&ctx.fields_of(Some(h), Some(u))))
}

/// Momentum load with `w` the discrete Laplacian of `u`.
pub fn momentum_rhs(
    ctx: &AssemblyContext,
    h: &CoefficientVector,
    u: &CoefficientVector,
    w: &CoefficientVector,
) -> Result<Vec<f64>> {
    ctx.check_h(h)?;
    ctx.check_u(u)?;
    ctx.check_u(w)?;
    let f = ctx.fields_of(Some(h), Some(u));
    let mut wq = vec![0.0; ctx.total_points()];
    ctx.tab_u.eval_values(w.values(), &mut wq);
    Ok(ctx.momentum_load(&f, &wq))
}

/// Momentum load of the standard Galerkin method: `u u_xx` taken pointwise from
/// the spline representation of `u`.
pub fn standard_galerkin_q_rhs(
    ctx: &AssemblyContext,
    h: &CoefficientVector,
    u: &CoefficientVector,
) -> Result<Vec<f64>> {
    if ctx.space_u.family() != Family::S3 {
        return Err(SgnError::UnsupportedFamily(ctx.space_u.family().to_string()));
    }
    ctx.check_h(h)?;
    ctx.check_u(u)?;
    let f = ctx.fields_of(Some(h), Some(u));
    let curv: Vec<f64> = f.u.iter().zip(&f.uxx).map(|(a, b)| a * b).collect();
    Ok(ctx.momentum_load(&f, &curv))
}
