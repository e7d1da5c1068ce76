//! Strict TOML run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgn_core::convergence::StepRule;
use sgn_core::fem::Family;
use sgn_core::scenarios::{scenario, Scenario};

use crate::CliError;

/// `dt = c dx^power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DtRule {
    pub c: f64,
    #[serde(default = "one")]
    pub power: i32,
}

fn one() -> i32 {
    1
}

impl From<DtRule> for StepRule {
    fn from(r: DtRule) -> Self {
        StepRule { c: r.c, power: r.power }
    }
}

/// The `[converge]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSection {
    pub family_h: Family,
    pub family_u: Family,
    pub elements: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_rule: Option<DtRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lumping: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Named scenario such as `shoal_35(0.2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Fully spelled-out scenario, used instead of `scenario`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_h: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_u: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_rule: Option<DtRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauges: Option<Vec<f64>>,
    /// Steps between gauge readings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lumping: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_galerkin: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_energy: Option<bool>,
    /// Steps between energy samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify_rkf: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rkf_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeSection>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().trim().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The scenario with every override of this file applied.
    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let mut sc = match (&self.scenario, &self.inline) {
            (Some(name), None) => scenario(name)?,
            (None, Some(s)) => s.clone(),
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either `scenario` or `[inline]`, not both".into()))
            }
            (None, None) => return Err(CliError::Config("missing `scenario` or `[inline]`".into())),
        };
        if let Some(f) = self.family_h {
            sc.family_h = f;
        }
        if let Some(f) = self.family_u {
            sc.family_u = f;
        }
        match (self.elements, self.dx) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either `elements` or `dx`, not both".into())),
            (Some(n), None) => sc.elements = n,
            (None, Some(dx)) => sc = sc.with_dx(dx),
            (None, None) => {}
        }
        match (self.dt, self.dt_rule) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either `dt` or `dt_rule`, not both".into())),
            (Some(dt), None) => sc.dt = dt,
            (None, Some(rule)) => sc.dt = StepRule::from(rule).dt(sc.dx()),
            (None, None) => {}
        }
        if let Some(t) = self.t_end {
            sc.t_end = t;
        }
        if let Some(r) = self.smoothing_radius {
            sc.smoothing_radius = Some(r);
        }
        if let Some(g) = &self.gauges {
            sc.gauges = g.clone();
        }
        if let Some(l) = self.lumping {
            sc.lumping = l;
        }
        if let Some(s) = self.standard_galerkin {
            sc.standard_galerkin = s;
        }
        if let Some(e) = self.record_energy {
            sc.record_energy = e;
        }
        sc.validate()?;
        Ok(sc)
    }
}
