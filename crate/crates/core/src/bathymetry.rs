//! Bottom profiles `b(x)` (elevation, negative below still water) with first and
//! second derivatives.
//!
//! Piecewise-linear profiles are made C1 by replacing each interior kink on
//! `[x_k - r, x_k + r]` with the cubic Hermite blend that matches value and slope
//! of the neighbouring lines at both ends. When the lines meet at the kink the
//! blend is the quadratic `left(x) + (s_r - s_l) (x - x_k + r)^2 / (4 r)`, with a
//! piecewise-constant second derivative.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SgnError};
use crate::fem::{l2_project_with, CoefficientVector, FunctionSpace, QuadratureRule};

type ProfileFn = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

#[derive(Clone)]
enum Profile {
    Flat(f64),
    Sinusoidal { mean: f64, amplitude: f64, wavenumber: f64 },
    Piecewise(PiecewiseLinear),
    Custom(ProfileFn),
}

#[derive(Debug, Clone)]
struct PiecewiseLinear {
    /// Segment boundaries; segment `k` spans `[xs[k], xs[k + 1]]`.
    xs: Vec<f64>,
    /// `(slope, intercept)` per segment.
    lines: Vec<(f64, f64)>,
    radius: f64,
}

impl PiecewiseLinear {
    fn line(&self, k: usize, x: f64) -> (f64, f64) {
        let (s, c) = self.lines[k];
        (s * x + c, s)
    }

    fn eval(&self, x: f64) -> [f64; 3] {
        let m = self.lines.len();
        let r = self.radius;
        if r > 0.0 {
            for k in 1..m {
                let xk = self.xs[k];
                if (x - xk).abs() < r {
                    let (xl, xr) = (xk - r, xk + r);
                    let (y0, m0) = self.line(k - 1, xl);
                    let (y1, m1) = self.line(k, xr);
                    return hermite(xl, xr, y0, m0, y1, m1, x);
                }
            }
        }
        // segment containing x, extending the end segments beyond the data
        let k = match self.xs[1..m].iter().position(|&b| x < b) {
            Some(k) => k,
            None => m - 1,
        };
        let (v, s) = self.line(k, x);
        [v, s, 0.0]
    }
}

/// Cubic Hermite interpolant on `[x0, x1]` and its first two derivatives.
fn hermite(x0: f64, x1: f64, y0: f64, m0: f64, y1: f64, m1: f64, x: f64) -> [f64; 3] {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let (s2, s3) = (s * s, s * s * s);
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let d00 = 6.0 * s2 - 6.0 * s;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = -6.0 * s2 + 6.0 * s;
    let d11 = 3.0 * s2 - 2.0 * s;
    let dd00 = 12.0 * s - 6.0;
    let dd10 = 6.0 * s - 4.0;
    let dd01 = -12.0 * s + 6.0;
    let dd11 = 6.0 * s - 2.0;
    [
        h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1,
        (d00 * y0 + d10 * h * m0 + d01 * y1 + d11 * h * m1) / h,
        (dd00 * y0 + dd10 * h * m0 + dd01 * y1 + dd11 * h * m1) / (h * h),
    ]
}

/// Evaluable bottom profile.
#[derive(Clone)]
pub struct Bathymetry {
    profile: Profile,
    description: String,
    smoothing_radius: f64,
}

impl fmt::Debug for Bathymetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bathymetry")
            .field("description", &self.description)
            .field("smoothing_radius", &self.smoothing_radius)
            .finish()
    }
}

/// How the sinusoidal bottom of the energy-conservation test is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SinusoidReading {
    /// `b(x) = 1 + 0.1 sin(pi x / 2)` taken verbatim as an elevation (bottom above
    /// still water: no valid still-water state exists).
    Literal,
    /// `b(x) = -1 + 0.1 sin(pi x / 2)`: unit mean depth.
    #[default]
    Submerged,
}

/// Named bottom profiles of the benchmark experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Horizontal bottom at `b = -depth`.
    Flat { depth: f64 },
    /// Flat bottom (depth 1) up to `x = 0`, then a 1:35 beach up to `x = 34`.
    #[serde(rename = "grilli_35")]
    Grilli35,
    /// Flat bottom (depth 1) up to `x = 0`, then a 1:50 beach up to the wall at `x = 20`.
    #[serde(rename = "beach_50_wall")]
    Beach50Wall,
    /// Composite beach, dimensional (metres), offshore depth 0.218 m.
    Revere,
    /// Smooth sinusoidal bottom of the energy-conservation test.
    SinusoidalEnergy(SinusoidReading),
}

impl FromStr for Preset {
    type Err = SgnError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("flat") {
            let depth = rest
                .trim_matches(|c| c == '(' || c == ')' || c == ':' || c == '=')
                .trim();
            let depth = if depth.is_empty() {
                1.0
            } else {
                depth
                    .parse()
                    .map_err(|_| SgnError::UnknownPreset(s.to_string()))?
            };
            return Ok(Preset::Flat { depth });
        }
        match s {
            "grilli_35" | "grilli35" | "shoal_35" => Ok(Preset::Grilli35),
            "beach_50_wall" | "beach50" => Ok(Preset::Beach50Wall),
            "revere" => Ok(Preset::Revere),
            "sinusoidal_energy" => Ok(Preset::SinusoidalEnergy(SinusoidReading::Submerged)),
            "sinusoidal_energy_literal" => Ok(Preset::SinusoidalEnergy(SinusoidReading::Literal)),
            other => Err(SgnError::UnknownPreset(other.to_string())),
        }
    }
}

pub const REVERE_OFFSHORE_DEPTH: f64 = 0.218;

impl Bathymetry {
    pub fn flat(depth: f64) -> Self {
        Self {
            profile: Profile::Flat(-depth),
            description: format!("flat bottom b = {}", -depth),
            smoothing_radius: 0.0,
        }
    }

    /// `b(x) = mean + amplitude sin(wavenumber x)`.
    pub fn sinusoidal(mean: f64, amplitude: f64, wavenumber: f64) -> Self {
        Self {
            profile: Profile::Sinusoidal {
                mean,
                amplitude,
                wavenumber,
            },
            description: format!("sinusoidal bottom b = {mean} + {amplitude} sin({wavenumber} x)"),
            smoothing_radius: 0.0,
        }
    }

    /// Wraps user-supplied `b`, `b_x` and `b_xx` verbatim.
    pub fn from_analytic<B, Bx, Bxx>(b: B, b_x: Bx, b_xx: Bxx) -> Self
    where
        B: Fn(f64) -> f64 + Send + Sync + 'static,
        Bx: Fn(f64) -> f64 + Send + Sync + 'static,
        Bxx: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            profile: Profile::Custom(Arc::new(move |x| [b(x), b_x(x), b_xx(x)])),
            description: "analytic bottom".to_string(),
            smoothing_radius: 0.0,
        }
    }

    /// Piecewise-linear interpolant of `points` with kinks smoothed over radius `r`.
    pub fn from_breakpoints(points: &[(f64, f64)], smoothing_radius: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(SgnError::BadInput("at least two breakpoints are required".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(SgnError::NonMonotoneBreakpoints(i + 1));
            }
        }
        let lines = points
            .windows(2)
            .map(|w| {
                let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                (s, w[0].1 - s * w[0].0)
            })
            .collect();
        let xs = points.iter().map(|p| p.0).collect();
        let pw = Self::piecewise(xs, lines, smoothing_radius)?;
        Ok(Self {
            description: format!("piecewise-linear bottom, {} breakpoints", points.len()),
            ..pw
        })
    }

    /// Piecewise profile given by one line per segment. Lines need not meet
    /// exactly at the segment boundaries; the Hermite blend absorbs small jumps.
    fn piecewise(xs: Vec<f64>, lines: Vec<(f64, f64)>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(SgnError::RadiusTooLarge { radius, limit: 0.0 });
        }
        if xs.len() > 2 && radius > 0.0 {
            let shortest = xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            if radius >= 0.5 * shortest {
                return Err(SgnError::RadiusTooLarge {
                    radius,
                    limit: 0.5 * shortest,
                });
            }
        }
        Ok(Self {
            profile: Profile::Piecewise(PiecewiseLinear { xs, lines, radius }),
            description: String::new(),
            smoothing_radius: radius,
        })
    }

    /// Reads whitespace-separated `x b` pairs; `#` starts a comment.
    pub fn parse_breakpoints(text: &str) -> Result<Vec<(f64, f64)>> {
        let mut pts = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| SgnError::Parse(format!("line {}: expected two columns", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| SgnError::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let x = parse(it.next())?;
            let b = parse(it.next())?;
            if it.next().is_some() {
                return Err(SgnError::Parse(format!("line {}: expected two columns", lineno + 1)));
            }
            pts.push((x, b));
        }
        Ok(pts)
    }

    pub fn from_breakpoint_file(path: &Path, smoothing_radius: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SgnError::Parse(format!("{}: {e}", path.display())))?;
        let mut b = Self::from_breakpoints(&Self::parse_breakpoints(&text)?, smoothing_radius)?;
        b.description = format!("breakpoints from {}", path.display());
        Ok(b)
    }

    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Flat { depth } => Self::flat(depth),
            Preset::Grilli35 => Self::grilli_35(1.0),
            Preset::Beach50Wall => Self::beach_50_wall(1.0),
            Preset::Revere => Self::revere(0.2),
            Preset::SinusoidalEnergy(reading) => Self::sinusoidal_energy(reading),
        }
    }

    pub fn grilli_35(radius: f64) -> Self {
        let mut b = Self::from_breakpoints(&[(-100.0, -1.0), (0.0, -1.0), (34.0, 34.0 / 35.0 - 1.0)], radius)
            .expect("valid preset");
        b.description = "plane beach 1:35 from x = 0".into();
        b
    }

    pub fn beach_50_wall(radius: f64) -> Self {
        let mut b = Self::from_breakpoints(&[(-100.0, -1.0), (0.0, -1.0), (20.0, -0.6)], radius)
            .expect("valid preset");
        b.description = "plane beach 1:50 on [0, 20], wall at x = 20".into();
        b
    }

    /// Composite beach: flat at -0.218 m, then slopes 1:53, 1:150 and 1:13.
    pub fn revere(radius: f64) -> Self {
        let xs = vec![-11.77, 15.04, 19.4, 22.33, 23.23];
        let lines = vec![
            (0.0, -REVERE_OFFSHORE_DEPTH),
            (1.0 / 53.0, -0.5018),
            (1.0 / 150.0, -0.2650),
            (1.0 / 13.0, -1.8340),
        ];
        let mut b = Self::piecewise(xs, lines, radius).expect("valid preset");
        b.description = "composite beach (1:53, 1:150, 1:13)".into();
        b
    }

    pub fn sinusoidal_energy(reading: SinusoidReading) -> Self {
        let mean = match reading {
            SinusoidReading::Literal => 1.0,
            SinusoidReading::Submerged => -1.0,
        };
        Self::sinusoidal(mean, 0.1, std::f64::consts::FRAC_PI_2)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn smoothing_radius(&self) -> f64 {
        self.smoothing_radius
    }

    /// `[b, b_x, b_xx]` at `x`.
    pub fn eval(&self, x: f64) -> [f64; 3] {
        match &self.profile {
            Profile::Flat(v) => [*v, 0.0, 0.0],
            Profile::Sinusoidal {
                mean,
                amplitude,
                wavenumber: k,
            } => {
                let (s, c) = (k * x).sin_cos();
                [mean + amplitude * s, amplitude * k * c, -amplitude * k * k * s]
            }
            Profile::Piecewise(p) => p.eval(x),
            Profile::Custom(f) => f(x),
        }
    }

    pub fn elevation(&self, x: f64) -> f64 {
        self.eval(x)[0]
    }

    /// Still-water depth `-b(x)`.
    pub fn depth(&self, x: f64) -> f64 {
        -self.eval(x)[0]
    }

    /// L2 projections of `b`, `b_x` and `b_xx` onto `space`.
    pub fn project(&self, space: &FunctionSpace, rule: &QuadratureRule) -> Result<DiscreteBathymetry> {
        let tab = space.tabulate(rule);
        let gram = crate::fem::assemble_gram(space, rule);
        let b = l2_project_with(|x| self.eval(x)[0], space, &tab, &gram)?;
        let bx = l2_project_with(|x| self.eval(x)[1], space, &tab, &gram)?;
        let bxx = l2_project_with(|x| self.eval(x)[2], space, &tab, &gram)?;
        Ok(DiscreteBathymetry { b, bx, bxx })
    }
}

/// Projected bottom and derivatives, all in the depth space.
#[derive(Debug, Clone)]
pub struct DiscreteBathymetry {
    pub b: CoefficientVector,
    pub bx: CoefficientVector,
    pub bxx: CoefficientVector,
}
