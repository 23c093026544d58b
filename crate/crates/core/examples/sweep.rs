//! Runs the full failure x lambda sweep in memory and prints the aggregates
//! next to the reference values.

use lorawan_psc::report::{self, SWEEP_FAILURES, SWEEP_LAMBDAS};
use lorawan_psc::ScenarioConfig;

fn main() -> Result<(), lorawan_psc::SimError> {
    let runs: Vec<_> = report::run_sweep(&ScenarioConfig::default(), &SWEEP_FAILURES, &SWEEP_LAMBDAS)?
        .into_iter()
        .map(|(run, _)| run)
        .collect();
    let summary = report::summarize(&runs);
    for s in &summary.scenarios {
        println!(
            "f={:<4} links {:?}\n       energy gain by lambda {:?}",
            s.failure_fraction,
            s.active_links_final,
            s.energy_gain_by_lambda.iter().map(|g| (g * 10.0).round() / 10.0).collect::<Vec<_>>()
        );
    }
    for t in &summary.targets {
        println!("{} {:<36} {:>10} vs {}", if t.pass { "ok  " } else { "miss" }, t.name, report::fmt_g(t.measured), report::fmt_g(t.target));
    }
    for (name, table) in report::figure_tables(&runs).iter().take(1) {
        println!("\n{name}\n{table}");
    }
    Ok(())
}
