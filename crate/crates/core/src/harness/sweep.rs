//! Sweep execution and CSV/manifest artifacts.
//!
//! For a spec named `NAME` the output directory receives
//!
//! * `NAME_000_<label>.csv`, … — one fidelity series per combination, with
//!   `#` metadata lines (resolved document and physical parameters) above a
//!   `tau,fidelity` table;
//! * `NAME_summary.csv` — one row of peak data and status per combination;
//! * `NAME_manifest.toml` — the resolved document, per-run peaks and the
//!   volatile fields (tool version, thread count, wall-clock duration) under
//!   `[session]`.
//!
//! Everything except the `[session]` table is byte-identical for identical
//! specs, whatever the thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config_file::{Combination, ConfigFile, SweepSpec};
use crate::protocols::{run, FidelitySeries};

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub out_dir: PathBuf,
    /// Worker threads; `None` lets the pool pick (one per core).
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// Outcome of one combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub label: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// `√N1 g1`: absolute time is `tau / time_scale`.
    pub time_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_fidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Fields that legitimately differ between two runs of the same spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub version: String,
    pub threads: usize,
    pub duration_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub summary: String,
    pub session: Session,
    pub config: ConfigFile,
    pub runs: Vec<RunRecord>,
}

impl RunManifest {
    pub fn failures(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| r.status == Status::Failed)
            .count()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Runs every combination on a pool of `threads` workers (results in spec order).
pub fn run_combinations(
    spec: &SweepSpec,
    threads: Option<usize>,
) -> Result<Vec<Result<FidelitySeries>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        spec.combinations
            .par_iter()
            .map(|c| run(&c.scenario))
            .collect()
    }))
}

fn file_label(label: &str) -> String {
    label
        .replace('=', "")
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\"").replace('\n', " "))
    } else {
        text.to_string()
    }
}

fn metadata(spec: &SweepSpec, combo: &Combination, config_text: &str) -> String {
    let sc = &combo.scenario;
    let sys = &sc.system;
    let mut out = String::new();
    let _ = writeln!(out, "# name = {}", spec.name);
    let _ = writeln!(out, "# combination = {}", combo.label());
    let _ = writeln!(out, "# protocol = {}", sc.protocol.name());
    let _ = writeln!(out, "# model = {:?}", sys.model);
    let _ = writeln!(out, "# dissipative = {}", sc.dissipative);
    for (key, value) in [
        ("n1", sys.n1 as f64),
        ("n2", sys.n2 as f64),
        ("g1", sys.g1),
        ("g2", sys.g2),
        ("nu", sys.nu),
        ("r", sys.ratio()),
        ("kappa", sys.kappa),
        ("gamma", sys.gamma),
        ("beta", sys.beta),
        ("time_scale", sys.time_scale()),
        ("grid_stop", sc.grid.stop),
        ("grid_step", sc.grid.step),
    ] {
        let _ = writeln!(out, "# {key} = {value}");
    }
    let _ = writeln!(out, "# blockade = {}", sys.blockade);
    let _ = writeln!(out, "# --- resolved document ---");
    for line in config_text.lines() {
        let _ = writeln!(out, "# {line}");
    }
    out
}

fn series_csv(meta: &str, series: &FidelitySeries) -> String {
    let mut out = String::with_capacity(meta.len() + series.times.len() * 32);
    out.push_str(meta);
    let _ = writeln!(out, "# peak_tau = {:.10}", series.peak.time);
    let _ = writeln!(out, "# peak_fidelity = {:.12}", series.peak.value);
    out.push_str("tau,fidelity\n");
    for (t, f) in series.times.iter().zip(&series.values) {
        let _ = writeln!(out, "{t:.10},{f:.12}");
    }
    out
}

fn summary_csv(spec: &SweepSpec, runs: &[RunRecord]) -> String {
    let params: Vec<String> = spec
        .config
        .sweep
        .iter()
        .map(|s| s.param.to_string())
        .collect();
    let mut out = format!("# summary of {}\nindex,label,", spec.name);
    for p in &params {
        out.push_str(p);
        out.push(',');
    }
    out.push_str("peak_tau,peak_fidelity,status,file,error\n");
    for (combo, record) in spec.combinations.iter().zip(runs) {
        let _ = write!(out, "{},{},", record.index, csv_field(&record.label));
        for (_, v) in &combo.assignments {
            let _ = write!(out, "{v},");
        }
        let num =
            |x: Option<f64>, digits: usize| x.map(|v| format!("{v:.digits$}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(record.peak_tau, 10),
            num(record.peak_fidelity, 12),
            match record.status {
                Status::Ok => "ok",
                Status::Failed => "failed",
            },
            record.file.as_deref().unwrap_or(""),
            csv_field(record.error.as_deref().unwrap_or("")),
        );
    }
    out
}

/// Runs a sweep and writes its artifacts. A failing combination is recorded
/// in the summary and the manifest; only I/O problems abort the sweep.
pub fn run_sweep(spec: &SweepSpec, options: &SweepOptions) -> Result<RunManifest> {
    let started = Instant::now();
    let results = run_combinations(spec, options.threads)?;
    let threads = options.threads.unwrap_or_else(rayon::current_num_threads);
    write_artifacts(spec, &results, &options.out_dir, started, threads)
}

fn write_artifacts(
    spec: &SweepSpec,
    results: &[Result<FidelitySeries>],
    out_dir: &Path,
    started: Instant,
    threads: usize,
) -> Result<RunManifest> {
    fs::create_dir_all(out_dir)?;
    let config_text = toml::to_string(&spec.config).map_err(|e| Error::Parse(e.to_string()))?;
    let mut runs = Vec::with_capacity(results.len());
    for (index, (combo, result)) in spec.combinations.iter().zip(results).enumerate() {
        let label = combo.label();
        let time_scale = combo.scenario.system.time_scale();
        let record = match result {
            Ok(series) => {
                let file = format!("{}_{index:03}_{}.csv", spec.name, file_label(&label));
                let meta = metadata(spec, combo, &config_text);
                fs::write(out_dir.join(&file), series_csv(&meta, series))?;
                RunRecord {
                    index,
                    label,
                    status: Status::Ok,
                    file: Some(file),
                    time_scale,
                    peak_tau: Some(series.peak.time),
                    peak_time: Some(series.peak.time / time_scale),
                    peak_fidelity: Some(series.peak.value),
                    error: None,
                }
            }
            Err(e) => RunRecord {
                index,
                label,
                status: Status::Failed,
                file: None,
                time_scale,
                peak_tau: None,
                peak_time: None,
                peak_fidelity: None,
                error: Some(e.to_string()),
            },
        };
        runs.push(record);
    }
    let summary = format!("{}_summary.csv", spec.name);
    fs::write(out_dir.join(&summary), summary_csv(spec, &runs))?;
    let manifest = RunManifest {
        name: spec.name.clone(),
        summary,
        session: Session {
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads,
            duration_seconds: started.elapsed().as_secs_f64(),
        },
        config: spec.config.clone(),
        runs,
    };
    fs::write(
        out_dir.join(format!("{}_manifest.toml", spec.name)),
        manifest.to_toml()?,
    )?;
    Ok(manifest)
}
