//! Command line layer shared by the `lorawan-psc` binary and tests.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ScenarioConfig, SelectionMode};
use crate::error::SimError;
use crate::report::{self, Format, SWEEP_FAILURES, SWEEP_LAMBDAS};

#[derive(Debug, Parser)]
#[command(name = "lorawan-psc", version, about = "PSC failover onto LoRaWAN servers: scenario runs and sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario (or a sweep with --sweep).
    Run(RunArgs),
    /// Run failure {0, 0.5, 1} x lambda {10..100}.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (TOML, keys are the config field names).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub failure: Option<f64>,
    /// Applications per server over the session.
    #[arg(long)]
    pub lambda: Option<u32>,
    #[arg(long)]
    pub sweep: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Require both memory and energy lifetimes in server selection.
    #[arg(long)]
    pub strict_selection: bool,
    /// Use application counts as decay constants.
    #[arg(long)]
    pub paper_literal_decay: bool,
}

impl RunArgs {
    pub fn scenario(&self) -> Result<ScenarioConfig, SimError> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_path(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(f) = self.failure {
            cfg.failure_fraction = f;
        }
        if let Some(l) = self.lambda {
            cfg.k_apps = l;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.strict_selection {
            cfg.selection_mode = SelectionMode::Strict;
        }
        if self.paper_literal_decay {
            cfg.paper_literal_decay = true;
        }
        Ok(cfg.validate()?)
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

/// Executes a parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, SimError> {
    let (args, force_sweep) = match cli.command {
        Command::Run(a) => (a, false),
        Command::Sweep(a) => (a, true),
    };
    let cfg = args.scenario()?;
    if force_sweep || args.sweep {
        let failures: Vec<f64> = match args.failure {
            Some(f) => vec![f],
            None => SWEEP_FAILURES.to_vec(),
        };
        let lambdas: Vec<u32> = match args.lambda {
            Some(l) => vec![l],
            None => SWEEP_LAMBDAS.to_vec(),
        };
        let runs = report::run_sweep(&cfg, &failures, &lambdas)?;
        let summary = report::write_sweep(&args.out, &runs, args.format())?;
        println!("{:<8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}", "failure", "p_time", "p_config", "restore", "gain_%", "rem_J", "sustain");
        for s in &summary.scenarios {
            println!(
                "{:<8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
                report::fmt_g(s.failure_fraction),
                report::fmt_g(s.p_continuity_time),
                report::fmt_g(s.p_continuity_config),
                report::fmt_g(s.restoration),
                report::fmt_g(s.energy_gain_pct),
                report::fmt_g(s.remaining_energy_per_closing_app),
                report::fmt_g(s.sustainability),
            );
        }
        for t in &summary.targets {
            let verdict = if t.pass { "PASS" } else { "FLAG" };
            println!("{verdict} {}: measured {} target {} +/- {}", t.name, report::fmt_g(t.measured), report::fmt_g(t.target), report::fmt_g(t.tolerance));
        }
        let deadlocks: usize = runs.iter().map(|(r, _)| r.summary.deadlock_steps).sum();
        println!("{} runs written to {}", runs.len(), args.out.display());
        Ok(if deadlocks > 0 { 2 } else { 0 })
    } else {
        let (run, ms) = report::timed_run(cfg)?;
        let path = report::write_run(&args.out, &run, args.format(), ms)?;
        let s = &run.summary;
        println!(
            "f={} lambda={} steps={} links={} p_time={} p_config={} restoration={} gain={}% deadlock_steps={}",
            report::fmt_g(s.failure_fraction),
            s.lambda,
            s.steps,
            s.active_links_final,
            report::fmt_g(s.p_continuity_time),
            report::fmt_g(s.p_continuity_config),
            report::fmt_g(s.restoration_mean),
            report::fmt_g(s.energy_gain_pct_final),
            s.deadlock_steps
        );
        println!("wrote {}", path.display());
        Ok(if s.deadlock_steps > 0 { 2 } else { 0 })
    }
}
