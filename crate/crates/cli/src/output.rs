//! CSV writers and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sgn_core::diagnostics::{ConvergenceTable, GaugeRecord, Norm, NormErrors};
use sgn_core::integrator::Sample;
use sgn_core::scenarios::Scenario;
use sgn_core::{AssemblyContext, SgnState};

use crate::CliError;

/// Output directory: flag, then config, then `SGN_OUT_DIR`, then `sgn_out`.
pub fn out_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.map(Path::to_path_buf))
        .or_else(|| std::env::var_os("SGN_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("sgn_out"))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

fn num(v: f64) -> String {
    if v == 0.0 || (1e-4..1e6).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Columns `t, g0, ..., gk`.
pub fn write_gauges(path: &Path, record: &GaugeRecord) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..record.positions.len()).map(|i| format!("g{i}")));
    w.write_record(&header)?;
    for (t, row) in record.times.iter().zip(&record.eta) {
        let mut rec = vec![num(*t)];
        rec.extend(row.iter().map(|v| num(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, I, dI` with `dI = I - I(0)`.
pub fn write_energy(path: &Path, samples: &[Sample]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["t", "I", "dI"])?;
    let i0 = samples.first().and_then(|s| s.energy);
    for s in samples {
        if let (Some(i), Some(i0)) = (s.energy, i0) {
            w.write_record([num(s.t), num(i), num(i - i0)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Nodal `x, eta, h, u` of a state.
pub fn write_snapshot(path: &Path, ctx: &AssemblyContext, state: &SgnState) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["x", "eta", "h", "u"])?;
    for x in ctx.space_h().mesh().nodes() {
        let h = state.h.eval(x, 0)?;
        let u = state.u.eval(x, 0)?;
        w.write_record([num(x), num(state.surface(ctx, x)?), num(h), num(u)])?;
    }
    w.flush()?;
    Ok(())
}

const NORM_TAGS: [(Norm, &str); 4] = [(Norm::L2, "E0"), (Norm::H1, "E1"), (Norm::H2, "E2"), (Norm::Linf, "Einf")];

fn table_cells(errors: &NormErrors, rates: &NormErrors) -> Vec<String> {
    NORM_TAGS
        .iter()
        .flat_map(|&(n, _)| [opt(errors.get(n)), opt(rates.get(n))])
        .collect()
}

/// Columns `N, dx, E0H, rateE0H, ..., EinfU, rateEinfU`.
pub fn write_table(path: &Path, table: &ConvergenceTable) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let mut header = vec!["N".to_string(), "dx".to_string()];
    for field in ["H", "U"] {
        for (_, tag) in NORM_TAGS {
            header.push(format!("{tag}{field}"));
            header.push(format!("rate{tag}{field}"));
        }
    }
    w.write_record(&header)?;
    for r in &table.rows {
        let mut rec = vec![r.elements.to_string(), num(r.dx)];
        rec.extend(table_cells(&r.h, &r.rate_h));
        rec.extend(table_cells(&r.u, &r.rate_u));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a runup sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunupRow {
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "Rmax")]
    pub computed: f64,
    #[serde(rename = "Rasym")]
    pub asymptotic: f64,
}

/// Columns `A, Rmax, Rasym`.
pub fn write_runup(path: &Path, rows: &[RunupRow]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Provenance record written next to every output set.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub scenario: Option<Scenario>,
    pub wall_clock_seconds: f64,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub threads: usize,
    pub outputs: Vec<String>,
    pub results: serde_json::Map<String, serde_json::Value>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            scenario: None,
            wall_clock_seconds: 0.0,
            steps: None,
            dt: None,
            threads: rayon::current_num_threads(),
            outputs: Vec::new(),
            results: serde_json::Map::new(),
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        self.results.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
