//! Initial conditions, exact solutions, manufactured forcing and benchmark presets.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assembly::{AssemblyContext, ContextOptions, Curvature, Forcing, SgnState};
use crate::bathymetry::{Bathymetry, Preset, REVERE_OFFSHORE_DEPTH};
use crate::error::{Result, SgnError};
use crate::fem::{l2_project, CoefficientVector, Family, FunctionSpace, Mesh, Trace};

/// Solitary wave of the flat-bottom equations.
///
/// `h = b0 + A sech^2(lambda (x - x0 - c_s t))`, `u = c_s (1 - b0 / h)`; a negative
/// `direction` mirrors the wave so it travels to the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitaryWaveSpec {
    pub amplitude: f64,
    pub depth: f64,
    pub x0: f64,
    pub g: f64,
    pub direction: f64,
}

impl SolitaryWaveSpec {
    pub fn new(amplitude: f64, depth: f64, x0: f64, g: f64) -> Result<Self> {
        if !(amplitude > 0.0 && depth > 0.0 && g > 0.0) {
            return Err(SgnError::BadInput(format!(
                "solitary wave needs A > 0, b0 > 0, g > 0 (got {amplitude}, {depth}, {g})"
            )));
        }
        Ok(Self {
            amplitude,
            depth,
            x0,
            g,
            direction: 1.0,
        })
    }

    pub fn leftward(mut self) -> Self {
        self.direction = -1.0;
        self
    }

    pub fn lambda(&self) -> f64 {
        let (a, b0) = (self.amplitude, self.depth);
        (3.0 * a / (4.0 * b0 * b0 * (b0 + a))).sqrt()
    }

    pub fn c0(&self) -> f64 {
        (self.g * self.depth).sqrt()
    }

    /// Phase speed `c_s = c0 sqrt(1 + A / b0)`.
    pub fn celerity(&self) -> f64 {
        self.c0() * (1.0 + self.amplitude / self.depth).sqrt()
    }

    pub fn crest(&self, t: f64) -> f64 {
        self.x0 + self.direction * self.celerity() * t
    }

    /// Surface elevation `A sech^2(...)`.
    pub fn elevation(&self, x: f64, t: f64) -> f64 {
        let s = 1.0 / (self.lambda() * (x - self.crest(t))).cosh();
        self.amplitude * s * s
    }

    pub fn h(&self, x: f64, t: f64) -> f64 {
        self.depth + self.elevation(x, t)
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        self.velocity_from_elevation(self.elevation(x, t))
    }

    fn velocity_from_elevation(&self, eta: f64) -> f64 {
        self.direction * self.celerity() * (1.0 - self.depth / (self.depth + eta))
    }
}

/// Exact depth and velocity of a solitary wave at time `t`.
pub fn solitary_wave_fields(
    spec: &SolitaryWaveSpec,
    t: f64,
) -> (impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_) {
    (move |x| spec.h(x, t), move |x| spec.u(x, t))
}

/// `I(t)` of a discrete state.
pub fn energy(ctx: &AssemblyContext, state: &SgnState) -> f64 {
    ctx.energy(state)
}

/// Minimum depth over the quadrature points and whether it stays at or above `alpha`.
pub fn depth_guard(ctx: &AssemblyContext, state: &SgnState, alpha: f64) -> (f64, bool) {
    let m = ctx.state_min_depth(state);
    (m, m >= alpha)
}

/// Exact pair `h = 1 + e^{2t}(cos(pi x) + x + 2)`, `u = e^{-tx} x sin(pi x)` on `[0, 1]`
/// with `b = 0`, and the source terms that make it a solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub g: f64,
}

impl Default for ManufacturedSolution {
    fn default() -> Self {
        Self { g: 1.0 }
    }
}

/// Derivatives of `s(x) = x sin(pi x)` up to third order.
fn s_derivs(x: f64) -> [f64; 4] {
    let (sn, cs) = (PI * x).sin_cos();
    [
        x * sn,
        sn + PI * x * cs,
        2.0 * PI * cs - PI * PI * x * sn,
        -3.0 * PI * PI * sn - PI * PI * PI * x * cs,
    ]
}

impl ManufacturedSolution {
    /// `[h, h_x, h_xx, h_t]`.
    pub fn h_derivs(&self, x: f64, t: f64) -> [f64; 4] {
        let e = (2.0 * t).exp();
        let (sn, cs) = (PI * x).sin_cos();
        [
            1.0 + e * (cs + x + 2.0),
            e * (1.0 - PI * sn),
            -e * PI * PI * cs,
            2.0 * e * (cs + x + 2.0),
        ]
    }

    /// `[u, u_x, u_xx, u_xxx]`.
    pub fn u_derivs(&self, x: f64, t: f64) -> [f64; 4] {
        let e = (-t * x).exp();
        let [s, s1, s2, s3] = s_derivs(x);
        [
            e * s,
            e * (s1 - t * s),
            e * (s2 - 2.0 * t * s1 + t * t * s),
            e * (s3 - 3.0 * t * s2 + 3.0 * t * t * s1 - t * t * t * s),
        ]
    }

    /// `[u_t, u_xt, u_xxt]`.
    pub fn u_time_derivs(&self, x: f64, t: f64) -> [f64; 3] {
        let e = (-t * x).exp();
        let [s, s1, s2, _] = s_derivs(x);
        // q = -x s and its first two derivatives
        let q = -x * s;
        let q1 = -s - x * s1;
        let q2 = -2.0 * s1 - x * s2;
        [e * q, e * (q1 - t * q), e * (q2 - 2.0 * t * q1 + t * t * q)]
    }

    pub fn h(&self, x: f64, t: f64) -> f64 {
        self.h_derivs(x, t)[0]
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        self.u_derivs(x, t)[0]
    }

    /// `f_h = h_t + (h u)_x`.
    pub fn f_h(&self, x: f64, t: f64) -> f64 {
        let [h, hx, _, ht] = self.h_derivs(x, t);
        let [u, ux, _, _] = self.u_derivs(x, t);
        ht + hx * u + h * ux
    }

    /// Momentum residual of the flat-bottom equations at the exact pair.
    pub fn f_u(&self, x: f64, t: f64) -> f64 {
        let [h, hx, _, _] = self.h_derivs(x, t);
        let [u, ux, uxx, uxxx] = self.u_derivs(x, t);
        let [ut, uxt, uxxt] = self.u_time_derivs(x, t);
        let h2 = h * h;
        let h3 = h2 * h;
        h * ut - (3.0 * h2 * hx * uxt + h3 * uxxt) / 3.0 + self.g * h * hx + h * u * ux
            - (3.0 * h2 * hx * (u * uxx - ux * ux) + h3 * (u * uxxx - ux * uxx)) / 3.0
    }
}

impl Forcing for ManufacturedSolution {
    fn eval(&self, t: f64, x: f64) -> (f64, f64) {
        (self.f_h(x, t), self.f_u(x, t))
    }
}

/// `(f_h, f_u)` of the manufactured pair at time `t`.
pub fn manufactured_forcing(t: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let m = ManufacturedSolution::default();
    (move |x| m.f_h(x, t), move |x| m.f_u(x, t))
}

/// Initial data of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    StillWater,
    /// Solitary wave of amplitude `amplitude` over the offshore depth, crest at `x0`.
    Solitary { amplitude: f64, x0: f64, leftward: bool },
    /// Two counter-propagating solitary waves of equal amplitude.
    Collision { amplitude: f64, x_left: f64, x_right: f64 },
    Manufactured,
}

/// A fully specified benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub bathymetry: Preset,
    pub smoothing_radius: Option<f64>,
    pub domain: (f64, f64),
    pub elements: usize,
    pub family_h: Family,
    pub family_u: Family,
    pub g: f64,
    /// Still-water depth of the flat offshore region.
    pub offshore_depth: f64,
    pub initial: InitialCondition,
    pub gauges: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub lumping: bool,
    pub standard_galerkin: bool,
    pub record_energy: bool,
}

/// Elements for spacing `dx` on `[a, b]`.
pub fn elements_for(a: f64, b: f64, dx: f64) -> usize {
    ((b - a) / dx).round().max(1.0) as usize
}

/// Default step `min(0.01, 0.1 dx)`.
pub fn default_dt(dx: f64) -> f64 {
    0.01f64.min(0.1 * dx)
}

impl Scenario {
    fn base(name: &str, bathymetry: Preset, domain: (f64, f64), dx: f64, initial: InitialCondition) -> Self {
        Self {
            name: name.into(),
            bathymetry,
            smoothing_radius: None,
            domain,
            elements: elements_for(domain.0, domain.1, dx),
            family_h: Family::S3,
            family_u: Family::S3,
            g: 1.0,
            offshore_depth: 1.0,
            initial,
            gauges: Vec::new(),
            t_end: 1.0,
            dt: default_dt(dx),
            lumping: false,
            standard_galerkin: false,
            record_energy: false,
        }
    }

    /// Solitary wave climbing a 1:35 plane beach.
    pub fn shoal_35(amplitude: f64) -> Self {
        let mut s = Self::base(
            "shoal_35",
            Preset::Grilli35,
            (-100.0, 34.0),
            0.1,
            InitialCondition::Solitary {
                amplitude,
                x0: -20.1171,
                leftward: false,
            },
        );
        s.gauges = vec![-5.0, 20.96, 22.55, 23.68, 24.68, 25.91];
        s.t_end = 30.0;
        s.record_energy = true;
        s
    }

    /// Solitary wave reflecting at a vertical wall at `x = 0` over depth 1.
    pub fn wall_reflection(amplitude: f64) -> Self {
        let mut s = Self::base(
            "wall_reflection",
            Preset::Flat { depth: 1.0 },
            (-100.0, 0.0),
            0.1,
            InitialCondition::Solitary {
                amplitude,
                x0: -50.0,
                leftward: false,
            },
        );
        s.gauges = vec![0.0];
        s.t_end = 60.0;
        s
    }

    /// Mirror image of [`Scenario::wall_reflection`]: two waves colliding at `x = 0`.
    pub fn head_on_collision(amplitude: f64) -> Self {
        let mut s = Self::base(
            "head_on_collision",
            Preset::Flat { depth: 1.0 },
            (-100.0, 100.0),
            0.1,
            InitialCondition::Collision {
                amplitude,
                x_left: -50.0,
                x_right: 50.0,
            },
        );
        s.gauges = vec![0.0];
        s.t_end = 60.0;
        s
    }

    /// 1:50 beach ending at a wall.
    pub fn beach_50_wall(amplitude: f64) -> Self {
        let mut s = Self::base(
            "beach_50_wall",
            Preset::Beach50Wall,
            (-100.0, 20.0),
            0.1,
            InitialCondition::Solitary {
                amplitude,
                x0: -30.0,
                leftward: false,
            },
        );
        s.gauges = vec![0.0, 16.25, 17.75];
        s.t_end = 80.0;
        s
    }

    /// Composite beach in meters; `relative_amplitude` is `A / b0`.
    pub fn revere(relative_amplitude: f64) -> Self {
        let b0 = REVERE_OFFSHORE_DEPTH;
        let mut s = Self::base(
            "revere",
            Preset::Revere,
            (-11.77, 23.23),
            0.1,
            InitialCondition::Solitary {
                amplitude: relative_amplitude * b0,
                x0: 0.0,
                leftward: false,
            },
        );
        s.g = 9.81;
        s.offshore_depth = b0;
        s.gauges = vec![23.23];
        s.t_end = 20.0;
        s.dt = 0.005;
        s
    }

    /// Solitary wave over the sinusoidal bottom, far from both walls.
    pub fn energy_conservation() -> Self {
        let mut s = Self::base(
            "energy_conservation",
            Preset::SinusoidalEnergy(Default::default()),
            (-100.0, 100.0),
            0.1,
            InitialCondition::Solitary {
                amplitude: 0.2,
                x0: 0.0,
                leftward: false,
            },
        );
        s.t_end = 50.0;
        s.record_energy = true;
        s
    }

    /// Forced problem on `[0, 1]` with the manufactured exact pair, `T = 1`.
    pub fn manufactured_convergence(family_h: Family, family_u: Family, elements: usize) -> Self {
        let mut s = Self::base(
            "manufactured_convergence",
            Preset::Flat { depth: 0.0 },
            (0.0, 1.0),
            1.0 / elements as f64,
            InitialCondition::Manufactured,
        );
        s.elements = elements;
        s.family_h = family_h;
        s.family_u = family_u;
        s.dt = 0.1 / elements as f64;
        s
    }

    pub fn dx(&self) -> f64 {
        (self.domain.1 - self.domain.0) / self.elements as f64
    }

    pub fn with_families(mut self, family_h: Family, family_u: Family) -> Self {
        self.family_h = family_h;
        self.family_u = family_u;
        self
    }

    pub fn with_dx(mut self, dx: f64) -> Self {
        self.elements = elements_for(self.domain.0, self.domain.1, dx);
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn bathymetry_profile(&self) -> Bathymetry {
        match (self.bathymetry, self.smoothing_radius) {
            (Preset::Grilli35, Some(r)) => Bathymetry::grilli_35(r),
            (Preset::Beach50Wall, Some(r)) => Bathymetry::beach_50_wall(r),
            (Preset::Revere, Some(r)) => Bathymetry::revere(r),
            (p, _) => Bathymetry::preset(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.domain;
        for &x in &self.gauges {
            if !(a..=b).contains(&x) {
                return Err(SgnError::OutOfDomain { x, a, b });
            }
        }
        if !(self.t_end > 0.0) {
            return Err(SgnError::InvalidTimeStep(format!("t_end must be positive, got {}", self.t_end)));
        }
        Ok(())
    }

    /// Builds the discretization with an explicit bottom profile.
    pub fn context_with(&self, bathymetry: Bathymetry) -> Result<AssemblyContext> {
        self.validate()?;
        let mesh = Mesh::uniform(self.domain.0, self.domain.1, self.elements)?;
        let sh = FunctionSpace::new(mesh.clone(), self.family_h, Trace::Free)?;
        let su = FunctionSpace::new(mesh, self.family_u, Trace::ZeroAtEnds)?;
        AssemblyContext::new(
            sh,
            su,
            bathymetry,
            ContextOptions {
                g: self.g,
                lumping: self.lumping,
                quadrature_nodes: None,
                curvature: if self.standard_galerkin {
                    Curvature::Pointwise
                } else {
                    Curvature::DiscreteLaplacian
                },
            },
        )
    }

    pub fn context(&self) -> Result<AssemblyContext> {
        self.context_with(self.bathymetry_profile())
    }

    /// L2-projected initial data.
    pub fn initial_state(&self, ctx: &AssemblyContext) -> Result<SgnState> {
        let rule = ctx.rule();
        let bath = ctx.bathymetry();
        let (h, u): (CoefficientVector, CoefficientVector) = match &self.initial {
            InitialCondition::StillWater => return Ok(SgnState::still_water(ctx)),
            InitialCondition::Solitary {
                amplitude,
                x0,
                leftward,
            } => {
                let mut w = SolitaryWaveSpec::new(*amplitude, self.offshore_depth, *x0, self.g)?;
                if *leftward {
                    w = w.leftward();
                }
                (
                    l2_project(|x| bath.depth(x) + w.elevation(x, 0.0), ctx.space_h(), rule)?,
                    l2_project(|x| w.u(x, 0.0), ctx.space_u(), rule)?,
                )
            }
            InitialCondition::Collision {
                amplitude,
                x_left,
                x_right,
            } => {
                let l = SolitaryWaveSpec::new(*amplitude, self.offshore_depth, *x_left, self.g)?;
                let r = SolitaryWaveSpec::new(*amplitude, self.offshore_depth, *x_right, self.g)?.leftward();
                (
                    l2_project(
                        |x| bath.depth(x) + l.elevation(x, 0.0) + r.elevation(x, 0.0),
                        ctx.space_h(),
                        rule,
                    )?,
                    l2_project(|x| l.u(x, 0.0) + r.u(x, 0.0), ctx.space_u(), rule)?,
                )
            }
            InitialCondition::Manufactured => {
                let m = ManufacturedSolution { g: self.g };
                (
                    l2_project(|x| m.h(x, 0.0), ctx.space_h(), rule)?,
                    l2_project(|x| m.u(x, 0.0), ctx.space_u(), rule)?,
                )
            }
        };
        Ok(SgnState::new(h, u, 0.0))
    }

    /// Forcing for manufactured runs.
    pub fn forcing(&self) -> Option<ManufacturedSolution> {
        matches!(self.initial, InitialCondition::Manufactured).then_some(ManufacturedSolution { g: self.g })
    }
}

/// Named scenarios with their parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioName {
    Shoal35(f64),
    WallReflection(f64),
    HeadOnCollision(f64),
    Beach50Wall(f64),
    Revere(f64),
    EnergyConservation,
    Manufactured { family_h: Family, family_u: Family, elements: usize },
}

impl FromStr for ScenarioName {
    type Err = SgnError;

    /// `shoal_35(0.2)`, `wall_reflection(0.7)`, `head_on_collision(0.1)`, `beach_50_wall(0.07)`,
    /// `revere(0.3)`, `energy_conservation`, `manufactured_convergence(p1, p2, 80)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], s[i + 1..s.len() - 1].split(',').map(str::trim).collect()),
            Some(_) => return Err(SgnError::UnknownScenario(s.into())),
            None => (s, Vec::new()),
        };
        let bad = || SgnError::UnknownScenario(s.to_string());
        let num = |i: usize| -> Result<f64> { args.get(i).ok_or_else(bad)?.parse::<f64>().map_err(|_| bad()) };
        let one = |f: fn(f64) -> ScenarioName| -> Result<ScenarioName> {
            if args.len() != 1 {
                return Err(bad());
            }
            Ok(f(num(0)?))
        };
        match name.trim() {
            "shoal_35" | "shoal35" => one(ScenarioName::Shoal35),
            "wall_reflection" | "wall" => one(ScenarioName::WallReflection),
            "head_on_collision" | "collision" => one(ScenarioName::HeadOnCollision),
            "beach_50_wall" | "beach50" => one(ScenarioName::Beach50Wall),
            "revere" => one(ScenarioName::Revere),
            "energy_conservation" | "energy" if args.is_empty() => Ok(ScenarioName::EnergyConservation),
            "manufactured_convergence" | "manufactured" if args.len() == 3 => Ok(ScenarioName::Manufactured {
                family_h: args[0].parse()?,
                family_u: args[1].parse()?,
                elements: args[2].parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Scenario by name, e.g. `scenario("shoal_35(0.2)")`.
pub fn scenario(name: &str) -> Result<Scenario> {
    Ok(match name.parse::<ScenarioName>()? {
        ScenarioName::Shoal35(a) => Scenario::shoal_35(a),
        ScenarioName::WallReflection(a) => Scenario::wall_reflection(a),
        ScenarioName::HeadOnCollision(a) => Scenario::head_on_collision(a),
        ScenarioName::Beach50Wall(a) => Scenario::beach_50_wall(a),
        ScenarioName::Revere(a) => Scenario::revere(a),
        ScenarioName::EnergyConservation => Scenario::energy_conservation(),
        ScenarioName::Manufactured {
            family_h,
            family_u,
            elements,
        } => Scenario::manufactured_convergence(family_h, family_u, elements),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solitary_parameters() {
        let w = SolitaryWaveSpec::new(0.2, 1.0, 0.0, 1.0).unwrap();
        assert!((w.celerity() - 1.2f64.sqrt()).abs() < 1e-15);
        assert!((w.lambda() - 0.125f64.sqrt()).abs() < 1e-15);
        assert!((w.h(0.0, 0.0) - 1.2).abs() < 1e-15);
        assert!((w.u(0.0, 0.0) - 1.2f64.sqrt() / 6.0).abs() < 1e-15);
        let far = 40.0 / w.lambda() + 1.0;
        assert!((w.h(far, 0.0) - 1.0).abs() < 1e-12);
        assert!(SolitaryWaveSpec::new(-0.1, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn solitary_translation() {
        let w = SolitaryWaveSpec::new(0.3, 1.0, -5.0, 1.0).unwrap();
        let (h0, _) = solitary_wave_fields(&w, 0.0);
        let (h1, u1) = solitary_wave_fields(&w, 3.0);
        let shift = 3.0 * w.celerity();
        for x in [-10.0, -5.0, 0.0, 2.5] {
            assert!((h1(x + shift) - h0(x)).abs() < 1e-14);
            assert!((u1(x + shift) - w.u(x, 0.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn leftward_wave_mirrors() {
        let w = SolitaryWaveSpec::new(0.2, 1.0, 10.0, 1.0).unwrap().leftward();
        assert!(w.crest(1.0) < 10.0);
        assert!(w.u(10.0, 0.0) < 0.0);
    }

    #[test]
    fn manufactured_values() {
        let m = ManufacturedSolution::default();
        assert!((m.f_h(0.0, 0.0) - 6.0).abs() < 1e-14);
        for t in [0.0, 0.5, 1.0] {
            assert!(m.u(0.0, t).abs() < 1e-15);
            assert!(m.u(1.0, t).abs() < 1e-14);
        }
    }

    #[test]
    fn scenario_presets() {
        let s = scenario("shoal_35(0.2)").unwrap();
        assert_eq!(s.domain, (-100.0, 34.0));
        assert!((s.dx() - 0.1).abs() < 1e-12);
        assert_eq!(s.gauges.len(), 6);
        assert!(matches!(s.initial, InitialCondition::Solitary { x0, .. } if x0 == -20.1171));
        let w = scenario("wall_reflection(0.7)").unwrap();
        assert_eq!(w.domain, (-100.0, 0.0));
        assert_eq!(w.bathymetry, Preset::Flat { depth: 1.0 });
        let r = scenario("revere(0.3)").unwrap();
        assert_eq!(r.g, 9.81);
        assert_eq!(r.offshore_depth, 0.218);
        assert_eq!(r.domain, (-11.77, 23.23));
        assert!((r.dx() - 0.1).abs() < 1e-12);
        let m = scenario("manufactured_convergence(p1, p2, 80)").unwrap();
        assert_eq!((m.family_h, m.family_u, m.elements), (Family::P1, Family::P2, 80));
        assert!(matches!(scenario("tsunami"), Err(SgnError::UnknownScenario(_))));
        assert!(matches!(scenario("shoal_35"), Err(SgnError::UnknownScenario(_))));
    }

    #[test]
    fn gauges_must_lie_in_the_domain() {
        let mut s = Scenario::wall_reflection(0.1);
        s.gauges.push(3.0);
        assert!(matches!(s.validate(), Err(SgnError::OutOfDomain { .. })));
    }
}
