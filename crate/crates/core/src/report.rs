//! CSV/JSON emission, run manifests, sweep execution and figure aggregates.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::SimError;
use crate::metrics::MetricsSnapshot;
use crate::sim::{run_scenario, RunOutput};

pub const CSV_HEADER: [&str; 19] = [
    "t_s",
    "failure_fraction",
    "lambda",
    "active_links",
    "p_cont_time",
    "p_cont_config",
    "restoration",
    "mem_gain_mb",
    "energy_gain_j",
    "energy_gain_pct",
    "remaining_energy_j",
    "mean_lifetime_s",
    "survivability",
    "sustainability",
    "se_mem_value",
    "se_mem_label",
    "se_energy_value",
    "se_energy_label",
    "deadlock",
];

pub const SWEEP_FAILURES: [f64; 3] = [0.0, 0.5, 1.0];
pub const SWEEP_LAMBDAS: [u32; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Six significant digits, `%g` style: fixed notation for moderate
/// exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_row(s: &MetricsSnapshot) -> String {
    let fields = [
        s.step_time.to_string(),
        fmt_g(s.failure_fraction),
        s.lambda.to_string(),
        s.active_links.to_string(),
        fmt_g(s.p_continuity_time),
        fmt_g(s.p_continuity_config),
        fmt_g(s.restoration),
        s.mem_gain_mb.to_string(),
        fmt_g(s.energy_gain_j),
        fmt_g(s.energy_gain_pct),
        fmt_g(s.remaining_energy_per_closing_app),
        fmt_g(s.mean_lifetime.unwrap_or(0.0)),
        s.survivability.as_str().to_string(),
        fmt_g(s.sustainability),
        fmt_g(s.self_enforcing_mem.value),
        s.self_enforcing_mem.label.as_str().to_string(),
        fmt_g(s.self_enforcing_energy.value),
        s.self_enforcing_energy.label.as_str().to_string(),
        s.deadlock.to_string(),
    ];
    fields.join(",")
}

pub fn to_csv(snapshots: &[MetricsSnapshot]) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for s in snapshots {
        out.push_str(&csv_row(s));
        out.push('\n');
    }
    out
}

pub fn to_json(run: &RunOutput) -> String {
    serde_json::to_string_pretty(run).expect("run output serialises")
}

pub fn from_json(text: &str) -> Result<RunOutput, serde_json::Error> {
    serde_json::from_str(text)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Io { path: path.display().to_string(), source }
}

pub fn run_file_name(run: &RunOutput, format: Format) -> String {
    format!("run_f{}_l{}.{}", fmt_g(run.config.failure_fraction), run.config.k_apps, format.extension())
}

/// Provenance record of one run, one JSON line in `manifests.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub artifact_version: String,
    pub files: Vec<String>,
    pub wall_clock_ms: f64,
    pub digest: String,
}

/// Writes one run's trajectory and appends its manifest.
pub fn write_run(out_dir: &Path, run: &RunOutput, format: Format, wall_clock_ms: f64) -> Result<PathBuf, SimError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let path = out_dir.join(run_file_name(run, format));
    let body = match format {
        Format::Csv => to_csv(&run.snapshots),
        Format::Json => to_json(run),
    };
    fs::write(&path, body).map_err(io_err(&path))?;

    let manifest = RunManifest {
        config: run.config.clone(),
        seed: run.config.seed,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        files: vec![path.file_name().expect("file name").to_string_lossy().into_owned()],
        wall_clock_ms,
        digest: run.summary.digest.clone(),
    };
    let manifest_path = out_dir.join("manifests.jsonl");
    let mut file = OpenOptions::new().create(true).append(true).open(&manifest_path).map_err(io_err(&manifest_path))?;
    let line = serde_json::to_string(&manifest).expect("manifest serialises");
    writeln!(file, "{line}").map_err(io_err(&manifest_path))?;
    Ok(path)
}

/// Runs and times one scenario.
pub fn timed_run(config: ScenarioConfig) -> Result<(RunOutput, f64), SimError> {
    let start = Instant::now();
    let run = run_scenario(config)?;
    Ok((run, start.elapsed().as_secs_f64() * 1e3))
}

/// Runs the cross product of failure fractions and lambdas on top of `base`.
pub fn run_sweep(base: &ScenarioConfig, failures: &[f64], lambdas: &[u32]) -> Result<Vec<(RunOutput, f64)>, SimError> {
    let mut runs = Vec::with_capacity(failures.len() * lambdas.len());
    for &failure_fraction in failures {
        for &k_apps in lambdas {
            runs.push(timed_run(ScenarioConfig { failure_fraction, k_apps, ..base.clone() })?);
        }
    }
    Ok(runs)
}

/// Per-scenario aggregates over the lambda sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioAggregate {
    pub failure_fraction: f64,
    pub lambdas: Vec<u32>,
    pub active_links_final: Vec<u32>,
    pub p_continuity_time: f64,
    pub p_continuity_config: f64,
    /// Restoration mean of the largest-lambda run.
    pub restoration: f64,
    pub energy_gain_pct: f64,
    pub energy_gain_by_lambda: Vec<f64>,
    pub energy_gain_strictly_decreasing: bool,
    /// Pooled over every scheduled closure of the sweep.
    pub remaining_energy_per_closing_app: f64,
    pub sustainability: f64,
    /// Mean lifetime of the largest-lambda run.
    pub mean_lifetime: Option<f64>,
    pub deadlock_steps: usize,
}

fn avg(values: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

pub fn aggregate(runs: &[RunOutput], failure_fraction: f64) -> Option<ScenarioAggregate> {
    let mut mine: Vec<&RunOutput> = runs.iter().filter(|r| r.config.failure_fraction == failure_fraction).collect();
    if mine.is_empty() {
        return None;
    }
    mine.sort_by_key(|r| r.config.k_apps);
    let top = mine[mine.len() - 1];
    let energy: Vec<f64> = mine.iter().map(|r| r.summary.energy_gain_pct_final).collect();
    let closures: usize = mine.iter().map(|r| r.summary.closures).sum();
    let closure_energy: f64 =
        mine.iter().map(|r| r.summary.remaining_energy_per_closing_app * r.summary.closures as f64).sum();
    Some(ScenarioAggregate {
        failure_fraction,
        lambdas: mine.iter().map(|r| r.config.k_apps).collect(),
        active_links_final: mine.iter().map(|r| r.summary.active_links_final).collect(),
        p_continuity_time: avg(mine.iter().map(|r| r.summary.p_continuity_time)),
        p_continuity_config: avg(mine.iter().map(|r| r.summary.p_continuity_config)),
        restoration: top.summary.restoration_mean,
        energy_gain_pct: avg(energy.iter().copied()),
        energy_gain_strictly_decreasing: energy.windows(2).all(|w| w[1] < w[0]),
        energy_gain_by_lambda: energy,
        remaining_energy_per_closing_app: if closures == 0 { 0.0 } else { closure_energy / closures as f64 },
        sustainability: avg(mine.iter().map(|r| r.summary.sustainability_final)),
        mean_lifetime: top.summary.mean_lifetime,
        deadlock_steps: mine.iter().map(|r| r.summary.deadlock_steps).sum(),
    })
}

/// A reference value from the evaluation, with its acceptance band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetCheck {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl TargetCheck {
    pub fn absolute(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        let pass = (measured - target).abs() <= tolerance + 1e-12;
        Self { name: name.into(), measured, target, tolerance, pass }
    }

    pub fn relative(name: impl Into<String>, measured: f64, target: f64, rel: f64) -> Self {
        Self::absolute(name, measured, target, rel * target.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub scenarios: Vec<ScenarioAggregate>,
    /// Sustainability drop relative to the baseline, percent, per failure level.
    pub sustainability_variation_pct: Vec<(f64, f64)>,
    /// Mean lifetime averaged over the failure scenarios' largest-lambda runs.
    pub lifetime_gain_s: Option<f64>,
    pub targets: Vec<TargetCheck>,
}

/// Reference numbers per failure level 0, 0.5, 1.0.
const P_TIME: [f64; 3] = [0.93, 0.92, 0.92];
const P_CONFIG: [f64; 3] = [0.50, 0.43, 0.36];
const RESTORATION: [f64; 3] = [0.024, 0.020, 0.016];
const ENERGY_GAIN: [f64; 3] = [46.34, 43.87, 41.17];
const SUSTAIN_VARIATION: [f64; 2] = [14.40, 27.28];

pub fn summarize(runs: &[RunOutput]) -> SweepSummary {
    let mut failures: Vec<f64> = runs.iter().map(|r| r.config.failure_fraction).collect();
    failures.sort_by(f64::total_cmp);
    failures.dedup();
    let scenarios: Vec<ScenarioAggregate> = failures.iter().filter_map(|f| aggregate(runs, *f)).collect();

    let baseline = scenarios.iter().find(|s| s.failure_fraction == 0.0);
    let sustainability_variation_pct: Vec<(f64, f64)> = match baseline {
        Some(b) if b.sustainability > 0.0 => scenarios
            .iter()
            .filter(|s| s.failure_fraction > 0.0)
            .map(|s| (s.failure_fraction, 100.0 * (b.sustainability - s.sustainability) / b.sustainability))
            .collect(),
        _ => Vec::new(),
    };
    let lifetimes: Vec<f64> =
        scenarios.iter().filter(|s| s.failure_fraction > 0.0).filter_map(|s| s.mean_lifetime).collect();
    let lifetime_gain_s = (!lifetimes.is_empty()).then(|| avg(lifetimes.iter().copied()));

    let mut targets = Vec::new();
    for s in &scenarios {
        let Some(k) = SWEEP_FAILURES.iter().position(|f| *f == s.failure_fraction) else { continue };
        let tag = format!("f={}", fmt_g(s.failure_fraction));
        targets.push(TargetCheck::absolute(format!("p_cont_time {tag}"), s.p_continuity_time, P_TIME[k], 0.02));
        targets.push(TargetCheck::absolute(format!("p_cont_config {tag}"), s.p_continuity_config, P_CONFIG[k], 0.05));
        targets.push(TargetCheck::relative(format!("restoration {tag}"), s.restoration, RESTORATION[k], 0.25));
        let mut gain = TargetCheck::absolute(format!("energy_gain_pct {tag}"), s.energy_gain_pct, ENERGY_GAIN[k], 3.0);
        gain.pass &= s.energy_gain_strictly_decreasing;
        targets.push(gain);
        targets.push(TargetCheck::relative(
            format!("remaining_energy_j {tag}"),
            s.remaining_energy_per_closing_app,
            0.011,
            0.20,
        ));
    }
    for (f, v) in &sustainability_variation_pct {
        if let Some(k) = [0.5, 1.0].iter().position(|x| x == f) {
            targets.push(TargetCheck::absolute(
                format!("sustainability_variation_pct f={}", fmt_g(*f)),
                *v,
                SUSTAIN_VARIATION[k],
                4.0,
            ));
        }
    }
    if let Some(g) = lifetime_gain_s {
        targets.push(TargetCheck::relative("lifetime_gain_s", g, 0.37, 0.30));
    }

    SweepSummary { scenarios, sustainability_variation_pct, lifetime_gain_s, targets }
}

/// One wide CSV per figure: a `lambda` column and one column per failure level.
pub fn figure_tables(runs: &[RunOutput]) -> Vec<(String, String)> {
    type Getter = fn(&RunOutput) -> f64;
    let figures: [(&str, Getter); 7] = [
        ("fig5", |r| f64::from(r.summary.active_links_final)),
        ("fig6", |r| r.summary.p_continuity_time),
        ("fig7", |r| r.summary.p_continuity_config),
        ("fig8", |r| r.summary.restoration_mean),
        ("fig9", |r| r.summary.energy_gain_pct_final),
        ("fig10", |r| r.summary.remaining_energy_per_closing_app),
        ("fig11", |r| r.summary.sustainability_final),
    ];
    let mut failures: Vec<f64> = runs.iter().map(|r| r.config.failure_fraction).collect();
    failures.sort_by(f64::total_cmp);
    failures.dedup();
    let mut lambdas: Vec<u32> = runs.iter().map(|r| r.config.k_apps).collect();
    lambdas.sort_unstable();
    lambdas.dedup();

    figures
        .iter()
        .map(|(name, get)| {
            let mut text = String::from("lambda");
            for f in &failures {
                text.push_str(&format!(",f{}", fmt_g(*f)));
            }
            text.push('\n');
            for l in &lambdas {
                text.push_str(&l.to_string());
                for f in &failures {
                    let cell = runs
                        .iter()
                        .find(|r| r.config.k_apps == *l && r.config.failure_fraction == *f)
                        .map(|r| fmt_g(get(r)))
                        .unwrap_or_default();
                    text.push(',');
                    text.push_str(&cell);
                }
                text.push('\n');
            }
            (format!("{name}.csv"), text)
        })
        .collect()
}

/// Writes every run, the manifests, the figure tables and `summary.json`.
pub fn write_sweep(out_dir: &Path, runs: &[(RunOutput, f64)], format: Format) -> Result<SweepSummary, SimError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let manifest_path = out_dir.join("manifests.jsonl");
    if manifest_path.exists() {
        fs::remove_file(&manifest_path).map_err(io_err(&manifest_path))?;
    }
    for (run, ms) in runs {
        write_run(out_dir, run, format, *ms)?;
    }
    let plain: Vec<RunOutput> = runs.iter().map(|(r, _)| r.clone()).collect();
    for (name, text) in figure_tables(&plain) {
        let path = out_dir.join(name);
        fs::write(&path, text).map_err(io_err(&path))?;
    }
    let summary = summarize(&plain);
    let path = out_dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary).expect("summary serialises")).map_err(io_err(&path))?;
    Ok(summary)
}
