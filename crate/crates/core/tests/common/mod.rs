//! Exhaustive-search oracle for small allocation instances, shared by the
//! integration and acceptance targets.
#![allow(dead_code)]

use lorawan_psc::allocator::{self, AllocationContext, Basis, EquilibriumThresholds, PoolApp};
use lorawan_psc::config::ScenarioConfig;
use lorawan_psc::model::{AppSource, ServerState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub config: ScenarioConfig,
    pub servers: Vec<ServerState>,
    pub pool: Vec<PoolApp>,
    pub lora_counts: Vec<usize>,
    pub thresholds: EquilibriumThresholds,
    pub elapsed: f64,
}

/// At most 3 servers and 6 applications with randomised capacities and
/// LoRaWAN preload.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_servers = rng.random_range(1..=3u32);
    let n_apps = rng.random_range(1..=6u32);
    let config = ScenarioConfig {
        n_servers,
        n_gateways: 3,
        mem_initial: 40,
        delta_x_energy: rng.random_range(1..=3),
        delta_y_memory: rng.random_range(1..=3),
        ..Default::default()
    };
    let e0 = config.energy_per_app;
    let elapsed = f64::from(rng.random_range(0..10u32)) * 360.0;

    let mut next_id = 1000;
    let servers: Vec<ServerState> = (0..n_servers)
        .map(|b| {
            let mut s = ServerState::new(b, &config);
            s.mem_capacity = rng.random_range(8..=40);
            s.slots = rng.random_range(1..=4);
            s.energy_capacity = e0 * f64::from(s.slots);
            s.energy_unallocated = s.energy_capacity;
            for _ in 0..rng.random_range(0..=2) {
                let m = rng.random_range(1..=10);
                if s.can_host(m) {
                    s.admit(next_id, AppSource::LoRa, m, e0);
                    next_id += 1;
                    let used = rng.random_range(0.0..e0 * 0.9);
                    s.draw(AppSource::LoRa, used);
                }
            }
            s.last_mem_admitted = rng.random_range(0..=s.mem_capacity * 2);
            s.last_energy_consumed = rng.random_range(0.0..e0 * 2.0);
            s.step_closed_mem = rng.random_range(0..=5);
            s.step_closed_consumption = rng.random_range(0.0..e0);
            s
        })
        .collect();
    let lora_counts: Vec<usize> = servers.iter().map(|s| s.hosted.len()).collect();
    let thresholds = allocator::compute_thresholds(&servers, &config, elapsed);
    let pool: Vec<PoolApp> = (0..n_apps)
        .map(|k| PoolApp { id: k, arrival_time: f64::from(k) * 10.0, mem_demand: rng.random_range(1..=10), energy_budget: e0 })
        .collect();
    Instance { config, servers, pool, lora_counts, thresholds, elapsed }
}

struct Load {
    mem: u64,
    count: u32,
    budget: f64,
}

/// Capacity and equilibrium test written out independently of the library.
fn assignment_ok(inst: &Instance, selected: &[usize], assignment: &[usize]) -> bool {
    let cfg = &inst.config;
    let e0 = cfg.energy_per_app;
    let mut load: Vec<Load> = inst.servers.iter().map(|_| Load { mem: 0, count: 0, budget: 0.0 }).collect();
    for (app, &b) in inst.pool.iter().zip(assignment) {
        let s = &inst.servers[b];
        let l = &mut load[b];
        let fits = s.slots_used + l.count < s.slots
            && s.mem_used + l.mem + u64::from(app.mem_demand) <= s.mem_capacity
            && s.energy_unallocated - l.budget >= app.energy_budget - 1e-12;
        if !fits {
            return false;
        }
        l.mem += u64::from(app.mem_demand);
        l.count += 1;
        l.budget += app.energy_budget;
    }

    let mut b_prime: Vec<usize> = selected.to_vec();
    for &b in assignment {
        if !b_prime.contains(&b) {
            b_prime.push(b);
        }
    }
    let close_ge = |lhs: f64, rhs: f64| lhs >= rhs - 1e-12 * lhs.abs().max(rhs.abs());
    for &b in &b_prime {
        let s = &inst.servers[b];
        let l = &load[b];
        let hosted = s.hosted.len() as f64 + f64::from(l.count);
        let avg_remaining = if hosted > 0.0 { (s.hosted_remaining + l.budget) / hosted } else { 0.0 };
        let e_raw = (s.step_closed_consumption + avg_remaining) / e0 - e0 * (-cfg.decay_constant_energy * inst.elapsed).exp();
        let used = (s.mem_used + l.mem) as f64;
        let free = s.mem_capacity as f64 - used;
        let a_raw = (s.step_closed_mem as f64 + free - used) / cfg.mem_initial as f64;
        if !close_ge(e_raw.max(0.0) * e0, inst.thresholds.e_th)
            || !close_ge(a_raw.max(0.0) * cfg.mem_initial as f64, inst.thresholds.alpha_th)
        {
            return false;
        }
    }

    let k_b: usize = inst.lora_counts.iter().sum();
    let k_bp: usize = b_prime.iter().map(|&b| inst.lora_counts[b]).sum();
    let (exp_bp, exp_b) = if k_b == 0 { (1.0, 1.0) } else { ((-(k_bp as f64) / k_b as f64).exp(), (-1.0f64).exp()) };
    let e_bp: f64 = b_prime.iter().map(|&b| inst.servers[b].energy_capacity).sum();
    let e_b: f64 = inst.servers.iter().map(|s| s.energy_capacity).sum();
    let a_bp: f64 = b_prime.iter().map(|&b| inst.servers[b].mem_capacity as f64).sum();
    let a_b: f64 = inst.servers.iter().map(|s| s.mem_capacity as f64).sum();
    close_ge(e_bp * exp_bp, e_b * exp_b / f64::from(inst.thresholds.delta_x))
        && close_ge(a_bp * exp_bp, a_b * exp_b / f64::from(inst.thresholds.delta_y))
}

/// Whether any full assignment of the pool satisfies capacity and the
/// equilibrium conditions.
pub fn exhaustive_feasible(inst: &Instance) -> bool {
    let step = inst.config.time_step as f64;
    let selected = allocator::select_available_servers(
        &inst.servers,
        step,
        inst.config.selection_mode,
        Basis::from(inst.config.precedence),
        step,
    );
    let n = inst.servers.len();
    let total = n.pow(inst.pool.len() as u32);
    (0..total).any(|code| {
        let mut c = code;
        let assignment: Vec<usize> = (0..inst.pool.len())
            .map(|_| {
                let b = c % n;
                c /= n;
                b
            })
            .collect();
        assignment_ok(inst, &selected, &assignment)
    })
}

/// Runs the allocator on a copy of the instance. Returns `(deadlock, placed)`.
pub fn run_allocator(inst: &Instance) -> (bool, usize) {
    let mut servers = inst.servers.clone();
    let ctx = AllocationContext { config: &inst.config, elapsed: inst.elapsed, lora_counts: &inst.lora_counts };
    let r = allocator::allocate(&inst.pool, &mut servers, inst.thresholds, &ctx);
    (r.deadlock, r.placements.len())
}

/// Checks the oracle equivalence over `cases` seeded instances.
/// Returns `(feasible, infeasible, violations)`.
pub fn oracle_equivalence(cases: u64) -> (usize, usize, Vec<u64>) {
    let mut feasible = 0;
    let mut infeasible = 0;
    let mut violations = Vec::new();
    for seed in 0..cases {
        let inst = random_instance(seed);
        let (deadlock, placed) = run_allocator(&inst);
        if exhaustive_feasible(&inst) {
            feasible += 1;
            if deadlock || placed != inst.pool.len() {
                violations.push(seed);
            }
        } else {
            infeasible += 1;
        }
    }
    (feasible, infeasible, violations)
}
