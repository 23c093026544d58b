//! Simulates one scenario step by step and prints the per-step observables.
//!
//! Usage: `cargo run --example scenario -- [failure_fraction] [lambda]`

use lorawan_psc::{ScenarioConfig, Simulation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let failure_fraction: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(0.5);
    let k_apps: u32 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(60);

    let cfg = ScenarioConfig { failure_fraction, k_apps, ..Default::default() }.validate()?;
    let mut sim = Simulation::new(cfg)?;
    sim.inject_failure(failure_fraction)?;
    println!("{:>5} {:>5} {:>8} {:>8} {:>9} {:>8} {:>9} {:>9}", "t_s", "links", "p_time", "p_cfg", "restore", "gain_%", "lifetime", "mem_dec");
    while !sim.is_finished() {
        let s = sim.step()?.clone();
        sim.check_ledgers()?;
        println!(
            "{:>5} {:>5} {:>8.4} {:>8.4} {:>9.5} {:>8.2} {:>9} {:>9}",
            s.step_time,
            s.active_links,
            s.p_continuity_time,
            s.p_continuity_config,
            s.restoration,
            s.energy_gain_pct,
            s.mean_lifetime.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            s.self_enforcing_mem.label.as_str(),
        );
    }
    let run = sim.finish();
    println!("digest {}", run.summary.digest);
    Ok(())
}
