//! Decay-based server selection, the equilibrium test and FCFS allocation of
//! pending PSC applications.

use serde::{Deserialize, Serialize};

use crate::config::{Precedence, ScenarioConfig, SelectionMode};
use crate::metrics::{energy_restoration, memory_restoration};
use crate::model::{AppId, AppSource, RejectReason, ServerState};

/// Upper bound on search nodes explored by the repair pass.
pub const REPAIR_NODE_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Memory,
    Energy,
}

impl From<Precedence> for Basis {
    fn from(p: Precedence) -> Self {
        match p {
            Precedence::MemoryFirst => Basis::Memory,
            Precedence::EnergyFirst => Basis::Energy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    /// Fractional drain per second; infinite for an exhausted server.
    pub rate: f64,
    /// `D0 * exp(-rate * step)`.
    pub level: f64,
}

/// Decay of a server on one basis, from the drain observed over the previous
/// step relative to what is left.
pub fn decay_rate(server: &ServerState, basis: Basis, step_s: f64) -> Decay {
    let (d0, remaining, drain) = match basis {
        Basis::Memory => (
            server.mem_capacity as f64,
            server.mem_free() as f64,
            server.last_mem_admitted as f64,
        ),
        Basis::Energy => (server.energy_capacity, server.energy_remaining(), server.last_energy_consumed),
    };
    if remaining <= 0.0 {
        return Decay { rate: f64::INFINITY, level: 0.0 };
    }
    let rate = drain / remaining / step_s;
    Decay { rate, level: d0 * (-rate * step_s).exp() }
}

/// `ceil(1/rate) >= min_required_time`; an idle server lives forever.
pub fn lifetime_ok(rate: f64, min_required_time: f64) -> bool {
    if rate == 0.0 {
        true
    } else if !rate.is_finite() {
        false
    } else {
        (1.0 / rate).ceil() >= min_required_time
    }
}

/// Indices of the available servers, ordered by ascending decay rate on the
/// precedence basis (ties by id).
pub fn select_available_servers(
    servers: &[ServerState],
    min_required_time: f64,
    mode: SelectionMode,
    basis: Basis,
    step_s: f64,
) -> Vec<usize> {
    let rates: Vec<(f64, f64)> = servers
        .iter()
        .map(|s| (decay_rate(s, Basis::Memory, step_s).rate, decay_rate(s, Basis::Energy, step_s).rate))
        .collect();
    let key = |i: usize| match basis {
        Basis::Memory => rates[i].0,
        Basis::Energy => rates[i].1,
    };
    let min_decay = (0..servers.len())
        .filter(|&i| key(i).is_finite())
        .min_by(|&a, &b| key(a).total_cmp(&key(b)).then(servers[a].id.cmp(&servers[b].id)));

    let mut chosen: Vec<usize> = (0..servers.len())
        .filter(|&i| match mode {
            SelectionMode::Relaxed => lifetime_ok(key(i), min_required_time) || Some(i) == min_decay,
            SelectionMode::Strict => {
                lifetime_ok(rates[i].0, min_required_time) && lifetime_ok(rates[i].1, min_required_time)
            }
        })
        .collect();
    chosen.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(servers[a].id.cmp(&servers[b].id)));
    chosen
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumThresholds {
    /// MB.
    pub alpha_th: f64,
    /// J.
    pub e_th: f64,
    pub delta_x: u32,
    pub delta_y: u32,
}

impl EquilibriumThresholds {
    pub fn zero(config: &ScenarioConfig) -> Self {
        Self { alpha_th: 0.0, e_th: 0.0, delta_x: config.delta_x_energy, delta_y: config.delta_y_memory }
    }

    pub fn relaxed(self, factor: f64) -> Self {
        Self { alpha_th: self.alpha_th * factor, e_th: self.e_th * factor, ..self }
    }
}

/// Unitless energy restoration of one server.
pub fn server_energy_restoration(server: &ServerState, config: &ScenarioConfig, elapsed: f64) -> f64 {
    energy_restoration(
        server.step_closed_consumption,
        server.avg_hosted_remaining(),
        config.energy_per_app,
        config.energy_kappa(server.hosted.len()),
        elapsed,
    )
}

/// Unitless memory restoration of one server.
pub fn server_memory_restoration(server: &ServerState, config: &ScenarioConfig, elapsed: f64) -> f64 {
    memory_restoration(
        config.memory_restoration_mode,
        server.step_closed_mem as f64,
        server.mem_free() as f64,
        server.mem_used as f64,
        config.mem_initial as f64,
        config.memory_kappa(server.hosted.len()),
        elapsed,
    )
}

/// Thresholds from a view of the servers that holds LoRaWAN traffic only.
/// The scalar is the weakest restoration among servers carrying traffic,
/// floored at zero and converted back to MB and J.
pub fn compute_thresholds(lora_only: &[ServerState], config: &ScenarioConfig, elapsed: f64) -> EquilibriumThresholds {
    let loaded: Vec<&ServerState> = lora_only.iter().filter(|s| !s.hosted.is_empty()).collect();
    if loaded.is_empty() {
        return EquilibriumThresholds::zero(config);
    }
    let min_of = |f: &dyn Fn(&ServerState) -> f64| loaded.iter().map(|s| f(s)).fold(f64::INFINITY, f64::min);
    let e_raw = min_of(&|s| server_energy_restoration(s, config, elapsed));
    let a_raw = min_of(&|s| server_memory_restoration(s, config, elapsed));
    EquilibriumThresholds {
        alpha_th: a_raw.max(0.0) * config.mem_initial as f64,
        e_th: e_raw.max(0.0) * config.energy_per_app,
        delta_x: config.delta_x_energy,
        delta_y: config.delta_y_memory,
    }
}

/// Inputs shared by the equilibrium test and the allocator.
#[derive(Debug, Clone, Copy)]
pub struct AllocationContext<'a> {
    pub config: &'a ScenarioConfig,
    /// Simulation time of the allocation, s.
    pub elapsed: f64,
    /// LoRaWAN application count per server, indexed like the server slice.
    pub lora_counts: &'a [usize],
}

const REL_EPS: f64 = 1e-12;

fn geq(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - REL_EPS * rhs.abs().max(lhs.abs())
}

/// The three equilibrium conditions over the available set `b_prime`
/// (indices into `servers`). Restorations are floored at zero like the
/// thresholds they are compared against.
pub fn equilibrium_holds(
    servers: &[ServerState],
    b_prime: &[usize],
    thresholds: &EquilibriumThresholds,
    ctx: &AllocationContext<'_>,
) -> bool {
    let cfg = ctx.config;
    let per_server = b_prime.iter().all(|&i| {
        let s = &servers[i];
        let e_r = server_energy_restoration(s, cfg, ctx.elapsed).max(0.0) * cfg.energy_per_app;
        let a_r = server_memory_restoration(s, cfg, ctx.elapsed).max(0.0) * cfg.mem_initial as f64;
        geq(e_r, thresholds.e_th) && geq(a_r, thresholds.alpha_th)
    });
    if !per_server {
        return false;
    }

    let k_b: usize = ctx.lora_counts.iter().sum();
    let k_bp: usize = b_prime.iter().map(|&i| ctx.lora_counts[i]).sum();
    let t_max = cfg.t_max as f64;
    let scale = if cfg.paper_literal_decay {
        1.0
    } else {
        match cfg.decay_exponent_scale {
            Some(s) => s,
            None if k_b == 0 => 0.0,
            None => 1.0 / (k_b as f64 * t_max),
        }
    };
    let decay_bp = (-(k_bp as f64) * scale * t_max).exp();
    let decay_b = (-(k_b as f64) * scale * t_max).exp();

    let e_bp: f64 = b_prime.iter().map(|&i| servers[i].energy_capacity).sum();
    let e_b: f64 = servers.iter().map(|s| s.energy_capacity).sum();
    let a_bp: f64 = b_prime.iter().map(|&i| servers[i].mem_capacity as f64).sum();
    let a_b: f64 = servers.iter().map(|s| s.mem_capacity as f64).sum();

    geq(e_bp * decay_bp, e_b * decay_b / f64::from(thresholds.delta_x))
        && geq(a_bp * decay_bp, a_b * decay_b / f64::from(thresholds.delta_y))
}

/// A pending PSC application as seen by the allocator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolApp {
    pub id: AppId,
    pub arrival_time: f64,
    pub mem_demand: u32,
    pub energy_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    /// `(app, server id)` in FCFS order.
    pub placements: Vec<(AppId, u32)>,
    pub rejected: Vec<(AppId, RejectReason)>,
    pub deadlock: bool,
    pub iterations: u32,
    pub threshold_adjustments: u32,
    /// Server ids selected as available.
    pub available: Vec<u32>,
    pub final_thresholds: EquilibriumThresholds,
}

/// Places `pool` (sorted FCFS) onto `servers`, mutating their accounting.
///
/// First fit over the available servers, then geometric threshold relaxation,
/// then a max-lifetime placement over every server, then a bounded repair
/// search. If all of those fail the placement is rolled back from the most
/// recent arrival until the conditions hold and the run is flagged as
/// deadlocked.
pub fn allocate(
    pool: &[PoolApp],
    servers: &mut [ServerState],
    thresholds: EquilibriumThresholds,
    ctx: &AllocationContext<'_>,
) -> AllocationResult {
    let cfg = ctx.config;
    let step_s = cfg.time_step as f64;
    let basis = Basis::from(cfg.precedence);
    let mut selected = select_available_servers(servers, step_s, cfg.selection_mode, basis, step_s);
    if selected.is_empty() && cfg.selection_mode == SelectionMode::Strict {
        selected = select_available_servers(servers, step_s, SelectionMode::Relaxed, basis, step_s);
    }
    let available: Vec<u32> = selected.iter().map(|&i| servers[i].id).collect();

    let mut result = AllocationResult {
        placements: Vec::new(),
        rejected: Vec::new(),
        deadlock: false,
        iterations: 0,
        threshold_adjustments: 0,
        available,
        final_thresholds: thresholds,
    };
    if pool.is_empty() {
        return result;
    }

    let check = |trial: &[ServerState], assignment: &[Option<usize>], th: &EquilibriumThresholds| {
        let b_prime = available_with_used(&selected, assignment);
        equilibrium_holds(trial, &b_prime, th, ctx)
    };

    // FCFS first fit over the available servers.
    let mut trial = servers.to_vec();
    let assignment: Vec<Option<usize>> = pool
        .iter()
        .map(|app| {
            let target = selected.iter().copied().find(|&i| trial[i].can_host(app.mem_demand));
            if let Some(i) = target {
                trial[i].admit(app.id, AppSource::Psc, app.mem_demand, app.energy_budget);
            }
            target
        })
        .collect();
    let all_placed = assignment.iter().all(Option::is_some);
    let mut th = thresholds;
    result.iterations = 1;
    if all_placed && check(&trial, &assignment, &th) {
        return commit(result, servers, trial, pool, &assignment, th);
    }
    for adj in 1..=cfg.max_threshold_adjustments {
        th = th.relaxed(cfg.threshold_relax_factor);
        result.iterations += 1;
        result.threshold_adjustments = adj;
        if all_placed && check(&trial, &assignment, &th) {
            return commit(result, servers, trial, pool, &assignment, th);
        }
    }

    // Max-lifetime placement over every server.
    let mut trial = servers.to_vec();
    let assignment: Vec<Option<usize>> = pool
        .iter()
        .map(|app| {
            let target = max_lifetime_server(&trial, app, basis);
            if let Some(i) = target {
                trial[i].admit(app.id, AppSource::Psc, app.mem_demand, app.energy_budget);
            }
            target
        })
        .collect();
    result.iterations += 1;
    if assignment.iter().all(Option::is_some) && check(&trial, &assignment, &th) {
        return commit(result, servers, trial, pool, &assignment, th);
    }

    // Bounded repair search.
    result.iterations += 1;
    if let Some(found) = repair(servers, pool, &selected, &th, ctx) {
        let mut repaired = servers.to_vec();
        for (app, target) in pool.iter().zip(&found) {
            if let Some(i) = *target {
                repaired[i].admit(app.id, AppSource::Psc, app.mem_demand, app.energy_budget);
            }
        }
        return commit(result, servers, repaired, pool, &found, th);
    }

    // Roll back the most recent arrivals until the conditions hold.
    let mut assignment = assignment;
    let mut rolled_back = vec![false; pool.len()];
    loop {
        let mut candidate = servers.to_vec();
        for (app, target) in pool.iter().zip(&assignment) {
            if let Some(i) = *target {
                candidate[i].admit(app.id, AppSource::Psc, app.mem_demand, app.energy_budget);
            }
        }
        if check(&candidate, &assignment, &th) {
            trial = candidate;
            break;
        }
        match assignment.iter().rposition(Option::is_some) {
            Some(last) => {
                assignment[last] = None;
                rolled_back[last] = true;
            }
            None => {
                trial = candidate;
                break;
            }
        }
    }
    result.deadlock = true;
    let mut result = commit(result, servers, trial, pool, &assignment, th);
    for (k, app) in pool.iter().enumerate() {
        if assignment[k].is_none() {
            let reason = if rolled_back[k] { RejectReason::EquilibriumViolated } else { RejectReason::Capacity };
            result.rejected.push((app.id, reason));
        }
    }
    result
}

fn available_with_used(selected: &[usize], assignment: &[Option<usize>]) -> Vec<usize> {
    let mut set: Vec<usize> = selected.to_vec();
    for i in assignment.iter().flatten() {
        if !set.contains(i) {
            set.push(*i);
        }
    }
    set
}

fn max_lifetime_server(servers: &[ServerState], app: &PoolApp, basis: Basis) -> Option<usize> {
    let headroom = |s: &ServerState| match basis {
        Basis::Memory => (s.mem_free() - u64::from(app.mem_demand)) as f64,
        Basis::Energy => s.energy_unallocated - app.energy_budget,
    };
    (0..servers.len())
        .filter(|&i| servers[i].can_host(app.mem_demand))
        .max_by(|&a, &b| {
            headroom(&servers[a])
                .total_cmp(&headroom(&servers[b]))
                .then(servers[b].id.cmp(&servers[a].id))
        })
}

fn repair(
    servers: &[ServerState],
    pool: &[PoolApp],
    selected: &[usize],
    th: &EquilibriumThresholds,
    ctx: &AllocationContext<'_>,
) -> Option<Vec<Option<usize>>> {
    struct Search<'a, 'c> {
        pool: &'a [PoolApp],
        selected: &'a [usize],
        th: &'a EquilibriumThresholds,
        ctx: &'a AllocationContext<'c>,
        nodes: usize,
        assignment: Vec<Option<usize>>,
    }

    impl Search<'_, '_> {
        fn dfs(&mut self, state: &mut Vec<ServerState>, k: usize) -> bool {
            self.nodes += 1;
            if self.nodes > REPAIR_NODE_BUDGET {
                return false;
            }
            if k == self.pool.len() {
                let b_prime = available_with_used(self.selected, &self.assignment);
                return equilibrium_holds(state, &b_prime, self.th, self.ctx);
            }
            let app = self.pool[k];
            for i in 0..state.len() {
                if !state[i].can_host(app.mem_demand) {
                    continue;
                }
                let saved = state[i].clone();
                state[i].admit(app.id, AppSource::Psc, app.mem_demand, app.energy_budget);
                self.assignment[k] = Some(i);
                if self.dfs(state, k + 1) {
                    return true;
                }
                state[i] = saved;
                self.assignment[k] = None;
            }
            false
        }
    }

    let mut search = Search { pool, selected, th, ctx, nodes: 0, assignment: vec![None; pool.len()] };
    let mut state = servers.to_vec();
    if search.dfs(&mut state, 0) {
        Some(search.assignment)
    } else {
        None
    }
}

fn commit(
    mut result: AllocationResult,
    servers: &mut [ServerState],
    trial: Vec<ServerState>,
    pool: &[PoolApp],
    assignment: &[Option<usize>],
    th: EquilibriumThresholds,
) -> AllocationResult {
    for (dst, src) in servers.iter_mut().zip(trial) {
        *dst = src;
    }
    result.placements = pool
        .iter()
        .zip(assignment)
        .filter_map(|(app, t)| t.map(|i| (app.id, servers[i].id)))
        .collect();
    result.final_thresholds = th;
    result
}

/// Audit record of the objective terms and constraint flags after a pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    pub restoration: f64,
    pub mean_lifetime: f64,
    pub survivable: bool,
    pub energy_restoration_nonnegative: bool,
    pub memory_restoration_nonnegative: bool,
    pub equilibrium: bool,
    pub pool_fully_placed: bool,
}

impl ObjectiveReport {
    pub fn all_constraints_hold(&self) -> bool {
        self.energy_restoration_nonnegative
            && self.memory_restoration_nonnegative
            && self.equilibrium
            && self.pool_fully_placed
    }
}

/// Objective terms and constraint flags for the current state. Nothing is
/// optimised here.
pub fn objective_report(
    servers: &[ServerState],
    allocation: &AllocationResult,
    ctx: &AllocationContext<'_>,
    restoration: f64,
    mean_lifetime: f64,
    survivable: bool,
) -> ObjectiveReport {
    let index_of = |id: u32| servers.iter().position(|s| s.id == id);
    let mut b_prime: Vec<usize> = allocation.available.iter().filter_map(|&id| index_of(id)).collect();
    for (_, id) in &allocation.placements {
        if let Some(i) = index_of(*id) {
            if !b_prime.contains(&i) {
                b_prime.push(i);
            }
        }
    }
    let cfg = ctx.config;
    ObjectiveReport {
        restoration,
        mean_lifetime,
        survivable,
        energy_restoration_nonnegative: b_prime
            .iter()
            .all(|&i| server_energy_restoration(&servers[i], cfg, ctx.elapsed) >= 0.0),
        memory_restoration_nonnegative: b_prime
            .iter()
            .all(|&i| server_memory_restoration(&servers[i], cfg, ctx.elapsed) >= 0.0),
        equilibrium: b_prime.is_empty() || equilibrium_holds(servers, &b_prime, &allocation.final_thresholds, ctx),
        pool_fully_placed: !allocation.deadlock,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    fn server(id: u32, c: &ScenarioConfig) -> ServerState {
        ServerState::new(id, c)
    }

    #[test]
    fn idle_server_decay() {
        let c = cfg();
        let d = decay_rate(&server(0, &c), Basis::Memory, 360.0);
        assert_eq!(d.rate, 0.0);
        assert_eq!(d.level, 10_000.0);
    }

    #[test]
    fn drain_ratio_decay() {
        let c = ScenarioConfig { mem_initial: 100, ..cfg() };
        let mut s = server(0, &c);
        s.last_mem_admitted = 10;
        let d = decay_rate(&s, Basis::Memory, 1.0);
        assert!((d.rate - 0.1).abs() < 1e-15);
        assert!((d.level - 100.0 * (-0.1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn exhausted_server_is_never_available() {
        let c = ScenarioConfig { mem_initial: 10, ..cfg() };
        let mut s = server(0, &c);
        s.mem_used = 10;
        assert!(decay_rate(&s, Basis::Memory, 360.0).rate.is_infinite());
        assert!(select_available_servers(&[s], 360.0, SelectionMode::Relaxed, Basis::Memory, 360.0).is_empty());
    }

    #[test]
    fn reciprocal_lifetime_rule() {
        assert!(lifetime_ok(0.001, 360.0));
        assert!(!lifetime_ok(0.01, 360.0));
    }

    #[test]
    fn relaxed_keeps_min_decay_server() {
        let c = cfg();
        let mut servers: Vec<ServerState> = (0..3).map(|i| server(i, &c)).collect();
        for (k, s) in servers.iter_mut().enumerate() {
            s.last_mem_admitted = 20_000 + 100 * (2 - k as u64);
        }
        let chosen = select_available_servers(&servers, 360.0, SelectionMode::Relaxed, Basis::Memory, 360.0);
        assert_eq!(chosen, vec![2]);
        let single = select_available_servers(&servers[..1], 360.0, SelectionMode::Relaxed, Basis::Memory, 360.0);
        assert_eq!(single, vec![0]);
    }

    #[test]
    fn strict_needs_both_bases() {
        let c = cfg();
        let mut s = server(0, &c);
        s.last_energy_consumed = 2.0 * s.energy_capacity;
        assert!(select_available_servers(&[s.clone()], 360.0, SelectionMode::Strict, Basis::Memory, 360.0).is_empty());
        assert_eq!(select_available_servers(&[s], 360.0, SelectionMode::Relaxed, Basis::Memory, 360.0), vec![0]);
    }

    #[test]
    fn idle_thresholds_are_zero() {
        let c = cfg();
        let servers: Vec<ServerState> = (0..3).map(|i| server(i, &c)).collect();
        let th = compute_thresholds(&servers, &c, 360.0);
        assert_eq!((th.alpha_th, th.e_th), (0.0, 0.0));
    }

    #[test]
    fn memory_threshold_at_twenty_percent_load() {
        let c = cfg();
        let mut s = server(0, &c);
        s.admit(1, AppSource::LoRa, 10, c.energy_per_app);
        s.mem_used = 2_000;
        let th = compute_thresholds(&[s], &c, 360.0);
        let hand = (0.0 + 8_000.0 - 2_000.0) / 10_000.0 * 10_000.0;
        assert!((th.alpha_th - hand).abs() < 1e-9);
    }

    #[test]
    fn trivial_equilibrium() {
        let c = cfg();
        let servers: Vec<ServerState> = (0..4).map(|i| server(i, &c)).collect();
        let counts = vec![5; 4];
        let ctx = AllocationContext { config: &c, elapsed: 360.0, lora_counts: &counts };
        let all: Vec<usize> = (0..4).collect();
        assert!(equilibrium_holds(&servers, &all, &EquilibriumThresholds::zero(&c), &ctx));
        let high = EquilibriumThresholds { e_th: 1.0, ..EquilibriumThresholds::zero(&c) };
        assert!(!equilibrium_holds(&servers, &all, &high, &ctx));
    }

    #[test]
    fn half_energy_with_delta_two_is_boundary() {
        let c = ScenarioConfig { delta_x_energy: 2, delta_y_memory: 2, decay_exponent_scale: Some(0.0), ..cfg() };
        let servers: Vec<ServerState> = (0..4).map(|i| server(i, &c)).collect();
        let counts = vec![5; 4];
        let ctx = AllocationContext { config: &c, elapsed: 360.0, lora_counts: &counts };
        let th = EquilibriumThresholds::zero(&c);
        assert!(equilibrium_holds(&servers, &[0, 1], &th, &ctx));
        assert!(!equilibrium_holds(&servers, &[0], &th, &ctx));
    }

    #[test]
    fn empty_pool_is_noop() {
        let c = cfg();
        let mut servers: Vec<ServerState> = (0..2).map(|i| server(i, &c)).collect();
        let before = servers.clone();
        let counts = vec![0; 2];
        let ctx = AllocationContext { config: &c, elapsed: 0.0, lora_counts: &counts };
        let r = allocate(&[], &mut servers, EquilibriumThresholds::zero(&c), &ctx);
        assert!(r.placements.is_empty() && r.rejected.is_empty());
        assert_eq!(r.iterations, 0);
        assert_eq!(servers, before);
    }

    #[test]
    fn three_apps_two_servers() {
        let c = ScenarioConfig { mem_initial: 15, mem_per_app_range: (10, 10), ..cfg() };
        let mut servers: Vec<ServerState> = (0..2).map(|i| server(i, &c)).collect();
        let counts = vec![0; 2];
        let ctx = AllocationContext { config: &c, elapsed: 0.0, lora_counts: &counts };
        let pool: Vec<PoolApp> = (0..3)
            .map(|k| PoolApp { id: k, arrival_time: 0.0, mem_demand: 10, energy_budget: c.energy_per_app })
            .collect();
        let r = allocate(&pool, &mut servers, EquilibriumThresholds::zero(&c), &ctx);
        assert_eq!(r.placements.len(), 2);
        assert_eq!(r.rejected, vec![(2, RejectReason::Capacity)]);
        assert!(r.deadlock);
        assert!(servers.iter().all(|s| s.mem_used <= s.mem_capacity));
    }

    #[test]
    fn oversized_app_deadlocks() {
        let c = ScenarioConfig { mem_initial: 10, mem_per_app_range: (1, 10), ..cfg() };
        let mut servers = vec![server(0, &c)];
        let counts = vec![0];
        let ctx = AllocationContext { config: &c, elapsed: 0.0, lora_counts: &counts };
        let pool = [PoolApp { id: 0, arrival_time: 0.0, mem_demand: 11, energy_budget: c.energy_per_app }];
        let r = allocate(&pool, &mut servers, EquilibriumThresholds::zero(&c), &ctx);
        assert!(r.deadlock);
        assert_eq!(r.rejected, vec![(0, RejectReason::Capacity)]);
    }

    #[test]
    fn first_fit_follows_decay_order() {
        let c = cfg();
        let mut servers: Vec<ServerState> = (0..3).map(|i| server(i, &c)).collect();
        servers[0].last_mem_admitted = 50;
        servers[1].last_mem_admitted = 10;
        servers[2].last_mem_admitted = 30;
        let counts = vec![0; 3];
        let ctx = AllocationContext { config: &c, elapsed: 360.0, lora_counts: &counts };
        let pool = [PoolApp { id: 7, arrival_time: 0.0, mem_demand: 5, energy_budget: c.energy_per_app }];
        let r = allocate(&pool, &mut servers, EquilibriumThresholds::zero(&c), &ctx);
        assert_eq!(r.placements, vec![(7, 1)]);
        assert_eq!(r.available, vec![1, 2, 0]);
        assert!(!r.deadlock);
    }
}
