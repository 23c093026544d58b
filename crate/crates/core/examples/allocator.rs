//! Runs one allocation pass by hand: three servers carrying LoRaWAN load, a
//! pool of migrated PSC applications, and the equilibrium thresholds derived
//! from the LoRaWAN-only state.

use lorawan_psc::allocator::{self, AllocationContext, Basis, PoolApp};
use lorawan_psc::config::SelectionMode;
use lorawan_psc::model::{AppSource, ServerState};
use lorawan_psc::ScenarioConfig;

fn main() {
    let cfg = ScenarioConfig { n_servers: 3, mem_initial: 60, slots_per_server: 8, ..Default::default() };
    let mut servers: Vec<ServerState> = (0..3).map(|b| ServerState::new(b, &cfg)).collect();

    // Uneven LoRaWAN load: server 0 busy, server 2 nearly idle.
    let mut next_id = 0;
    let mut lora_counts = vec![0; servers.len()];
    for (b, load) in [(0usize, 5u32), (1, 3), (2, 1)] {
        for _ in 0..load {
            servers[b].admit(next_id, AppSource::LoRa, 8, cfg.energy_per_app);
            servers[b].draw(AppSource::LoRa, cfg.power_draw * 360.0);
            next_id += 1;
            lora_counts[b] += 1;
        }
        servers[b].last_mem_admitted = u64::from(load) * 8;
        servers[b].last_energy_consumed = f64::from(load) * cfg.power_draw * 360.0;
    }

    let step = cfg.time_step as f64;
    for s in &servers {
        let d = allocator::decay_rate(s, Basis::Energy, step);
        println!("server {}: hosted {} free {} MB decay {:?}", s.id, s.hosted.len(), s.mem_free(), d);
    }
    let selected = allocator::select_available_servers(&servers, step, SelectionMode::Relaxed, Basis::Energy, step);
    println!("available order {selected:?}");

    let elapsed = 720.0;
    let thresholds = allocator::compute_thresholds(&servers, &cfg, elapsed);
    println!("thresholds {thresholds:?}");

    let pool: Vec<PoolApp> = (0..6)
        .map(|k| PoolApp { id: 100 + k, arrival_time: k as f64, mem_demand: 7 + k % 3, energy_budget: cfg.energy_per_app })
        .collect();
    let ctx = AllocationContext { config: &cfg, elapsed, lora_counts: &lora_counts };
    let result = allocator::allocate(&pool, &mut servers, thresholds, &ctx);
    println!(
        "placements {:?}\nrejected {:?}\ndeadlock={} iterations={} threshold adjustments={}",
        result.placements, result.rejected, result.deadlock, result.iterations, result.threshold_adjustments
    );
    for s in &servers {
        println!("server {}: hosted {} free {} MB psc {} MB", s.id, s.hosted.len(), s.mem_free(), s.psc_mem);
    }
}
