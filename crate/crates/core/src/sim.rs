//! The step-by-step simulation engine.
//!
//! Each step runs five phases in a fixed order: arrivals, scheduled closures,
//! allocation of the pending PSC pool, energy accrual, and metrics. Accounting
//! ledgers are checked after every step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agreement::{self, AgreementDecision};
use crate::allocator::{self, AllocationContext, AllocationResult, Basis, PoolApp};
use crate::config::{ArrivalModel, ScenarioConfig};
use crate::error::SimError;
use crate::metrics::{self, MetricsSnapshot, RestorationInputs};
use crate::model::{AppId, AppSource, AppState, Application, Host, RejectReason, ServerState};
use crate::topology::{build_topology, Topology};

const ENERGY_LEDGER_TOL: f64 = 1e-9;

/// One application closed on schedule (not by exhaustion).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureRecord {
    pub t_s: u64,
    pub app: AppId,
    pub server: u32,
    pub remaining_energy: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: ScenarioConfig,
    pub topology: Topology,
    pub servers: Vec<ServerState>,
    pub apps: Vec<Application>,
    pub snapshots: Vec<MetricsSnapshot>,
    pub closures: Vec<ClosureRecord>,
    pub allocations: Vec<AllocationResult>,
    /// Seconds since the start of the session.
    pub clock: u64,
    rng: ChaCha8Rng,
    pending: Vec<AppId>,
    psc_credit: Vec<f64>,
    gain_times: Vec<f64>,
    mem_gain_series: Vec<f64>,
    energy_gain_series: Vec<f64>,
    continuity_sum: f64,
    ap_energy_consumed: f64,
}

impl Simulation {
    pub fn new(config: ScenarioConfig) -> Result<Self, SimError> {
        let config = config.validate()?;
        let topology = build_topology(&config);
        let servers: Vec<ServerState> = (0..config.n_servers).map(|b| ServerState::new(b, &config)).collect();
        let mut sim = Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            psc_credit: vec![0.0; servers.len()],
            topology,
            servers,
            apps: Vec::new(),
            snapshots: Vec::new(),
            closures: Vec::new(),
            allocations: Vec::new(),
            clock: 0,
            pending: Vec::new(),
            gain_times: Vec::new(),
            mem_gain_series: Vec::new(),
            energy_gain_series: Vec::new(),
            continuity_sum: 0.0,
            ap_energy_consumed: 0.0,
            config,
        };
        let (m, e) = sim.expected_gains(&vec![0.0; sim.servers.len()], &vec![0.0; sim.servers.len()]);
        sim.gain_times.push(0.0);
        sim.mem_gain_series.push(m);
        sim.energy_gain_series.push(e);
        Ok(sim)
    }

    /// Fails the first `floor(fraction * |S|)` access points. PSC applications
    /// they were carrying go back to the pending pool.
    pub fn inject_failure(&mut self, fraction: f64) -> Result<(), SimError> {
        let count = (fraction.clamp(0.0, 1.0) * f64::from(self.topology.n_aps())).floor() as u32;
        self.topology.fail_first_aps(count);
        for app in &mut self.apps {
            if let AppState::Active(Host::AccessPoint(ap)) = app.state {
                if !self.topology.ap_is_alive(ap) {
                    app.transition(AppState::Pending)?;
                    app.route.clear();
                    app.consumed = 0.0;
                    self.pending.push(app.id);
                }
            }
        }
        Ok(())
    }

    pub fn is_finished(&self) -> bool {
        self.clock >= self.config.session_time
    }

    fn session_steps(&self) -> u64 {
        self.config.session_steps()
    }

    fn lora_arrivals(&mut self, step: u64) -> u32 {
        let n = self.session_steps();
        let k = u64::from(self.config.k_apps);
        match self.config.arrival_model {
            ArrivalModel::DeterministicUniform => {
                let extra = u64::from(step <= k % n);
                (k / n + extra) as u32
            }
            ArrivalModel::Poisson => {
                let mean = k as f64 / n as f64;
                if mean <= 0.0 {
                    0
                } else {
                    Poisson::new(mean).map(|d| d.sample(&mut self.rng) as u32).unwrap_or(0)
                }
            }
        }
    }

    fn new_app(&mut self, source: AppSource, user: u32, arrival: f64) -> AppId {
        let (lo, hi) = self.config.mem_per_app_range;
        let mem = self.rng.random_range(lo..=hi);
        let id = self.apps.len() as AppId;
        self.apps.push(Application::new(id, source, user, mem, arrival, &self.config));
        id
    }

    fn arrivals(&mut self, step: u64) -> Result<(), SimError> {
        let arrival = ((step - 1) * self.config.time_step) as f64;
        for b in 0..self.servers.len() {
            let server_id = b as u32;
            let start = self.topology.block_start(server_id);
            let block = self.topology.block_len(server_id);
            let gateway = |i: u32, n: u32| start + ((u64::from(i) * u64::from(block)) / u64::from(n)) as u32;

            let count = self.lora_arrivals(step);
            for i in 0..count {
                let user = self.topology.user_on_gateway(gateway(i, count));
                let id = self.new_app(AppSource::LoRa, user, arrival);
                self.admit_lora(id, server_id, arrival)?;
            }

            self.psc_credit[b] += self.config.psc_load_ratio * f64::from(count);
            let psc = (self.psc_credit[b] + 1e-9).floor() as u32;
            self.psc_credit[b] -= f64::from(psc);
            for i in 0..psc {
                let user = self.topology.user_on_gateway(gateway(i, psc));
                let id = self.new_app(AppSource::Psc, user, arrival);
                let ap = self.topology.ap_of_user(user);
                if self.topology.ap_is_alive(ap) {
                    let route = self.topology.ap_route(user);
                    let app = &mut self.apps[id as usize];
                    app.transition(AppState::Active(Host::AccessPoint(ap)))?;
                    app.activated_time = Some(arrival);
                    app.route = route;
                } else {
                    self.pending.push(id);
                }
            }
        }
        Ok(())
    }

    /// Closes the oldest `floor(close_fraction * hosted)` applications on each
    /// server. Applications that arrived in this step are not eligible.
    /// Returns `(K, K')`: hosted before and closed.
    fn close_applications(&mut self, t_s: u64) -> Result<(usize, usize), SimError> {
        let mut k_total = 0;
        let mut k_closed = 0;
        for b in 0..self.servers.len() {
            let hosted = self.servers[b].hosted.clone();
            let k = hosted.len();
            let mut by_age: Vec<AppId> = hosted
                .into_iter()
                .filter(|id| self.apps[*id as usize].activated_time.is_some_and(|a| a < t_s as f64))
                .collect();
            let n = ((self.config.close_fraction * k as f64 + 1e-9).floor() as usize).min(by_age.len());
            k_total += k;
            k_closed += n;
            by_age.sort_by(|a, b| {
                let (x, y) = (&self.apps[*a as usize], &self.apps[*b as usize]);
                x.activated_time.unwrap_or(0.0).total_cmp(&y.activated_time.unwrap_or(0.0)).then(x.id.cmp(&y.id))
            });
            for id in by_age.into_iter().take(n) {
                let app = &mut self.apps[id as usize];
                let remaining = app.remaining_energy();
                app.transition(AppState::Closed)?;
                app.close_time = Some(t_s as f64);
                let server = &mut self.servers[b];
                server.step_closed_consumption += app.consumed;
                server.step_closed_mem += u64::from(app.mem_demand);
                server.release(id, app.source, app.mem_demand, remaining);
                self.closures.push(ClosureRecord { t_s, app: id, server: b as u32, remaining_energy: remaining });
            }
        }
        Ok((k_total, k_closed))
    }

    /// Books a LoRaWAN arrival on its home server.
    fn admit_lora(&mut self, id: AppId, server_id: u32, t_s: f64) -> Result<(), SimError> {
        let app = &self.apps[id as usize];
        let (user, mem, budget) = (app.user, app.mem_demand, app.energy_budget);
        let server = &mut self.servers[server_id as usize];
        if server.can_host(mem) {
            server.admit(id, AppSource::LoRa, mem, budget);
            let route = self.topology.lora_route(user, server_id);
            let app = &mut self.apps[id as usize];
            app.transition(AppState::Active(Host::Server(server_id)))?;
            app.activated_time = Some(t_s);
            app.route = route;
        } else {
            self.apps[id as usize].transition(AppState::Rejected(RejectReason::Capacity))?;
        }
        Ok(())
    }

    /// Servers as they would look carrying their LoRaWAN applications only.
    fn lora_view(&self) -> Vec<ServerState> {
        self.servers
            .iter()
            .map(|s| {
                let mut v = s.clone();
                v.hosted.retain(|id| self.apps[*id as usize].source == AppSource::LoRa);
                v.mem_used -= s.psc_mem;
                v.slots_used = v.hosted.len() as u32;
                v.hosted_remaining -= s.psc_remaining;
                v.psc_mem = 0;
                v.psc_remaining = 0.0;
                v
            })
            .collect()
    }

    fn allocate_pending(&mut self, t_s: u64) -> Result<AllocationResult, SimError> {
        let mut pool: Vec<PoolApp> = self
            .pending
            .drain(..)
            .map(|id| {
                let a = &self.apps[id as usize];
                PoolApp { id, arrival_time: a.arrival_time, mem_demand: a.mem_demand, energy_budget: a.energy_budget }
            })
            .collect();
        pool.sort_by(|a, b| a.arrival_time.total_cmp(&b.arrival_time).then(a.id.cmp(&b.id)));

        let elapsed = t_s as f64;
        let lora_view = self.lora_view();
        let lora_counts: Vec<usize> = lora_view.iter().map(|s| s.hosted.len()).collect();
        let thresholds = allocator::compute_thresholds(&lora_view, &self.config, elapsed);
        let config = self.config.clone();
        let ctx = AllocationContext { config: &config, elapsed, lora_counts: &lora_counts };
        let result = allocator::allocate(&pool, &mut self.servers, thresholds, &ctx);

        for &(id, server) in &result.placements {
            let route = self.topology.lora_route(self.apps[id as usize].user, server);
            let app = &mut self.apps[id as usize];
            app.transition(AppState::Active(Host::Server(server)))?;
            app.activated_time = Some(elapsed);
            app.route = route;
        }
        for &(id, reason) in &result.rejected {
            self.apps[id as usize].transition(AppState::Rejected(reason))?;
        }
        Ok(result)
    }

    /// Draws `P_C * t` from every active application. Returns per-server
    /// energy drawn this step.
    fn accrue(&mut self, step_start: u64) -> Result<Vec<f64>, SimError> {
        let dt = self.config.time_step as f64;
        let mut drawn = vec![0.0; self.servers.len()];
        for app in self.apps.iter_mut().filter(|a| a.is_active()) {
            let remaining = app.remaining_energy();
            let want = app.power_draw * dt;
            let exhausted = want >= remaining - 1e-15;
            let d = if exhausted { remaining } else { want };
            app.consumed = if exhausted { app.energy_budget } else { app.consumed + d };
            match app.state {
                AppState::Active(Host::Server(b)) => {
                    let server = &mut self.servers[b as usize];
                    server.draw(app.source, d);
                    drawn[b as usize] += d;
                    if exhausted {
                        server.release(app.id, app.source, app.mem_demand, 0.0);
                    }
                }
                _ => self.ap_energy_consumed += d,
            }
            if exhausted {
                app.transition(AppState::Closed)?;
                app.close_time = Some(step_start as f64 + remaining / app.power_draw);
            }
        }
        Ok(drawn)
    }

    /// Network-mean expected gains for memory and energy given per-server
    /// drain rates (1/s).
    fn expected_gains(&self, mem_rates: &[f64], energy_rates: &[f64]) -> (f64, f64) {
        let (n_t, n_max, dt) = self.horizon();
        let n = self.servers.len() as f64;
        let mut mem = 0.0;
        let mut energy = 0.0;
        for (k, s) in self.servers.iter().enumerate() {
            let q_t = agreement::q_tail_probability(&agreement::exponential_series(mem_rates[k], dt, n_max), n_t);
            let q_e = agreement::q_tail_probability(&agreement::exponential_series(energy_rates[k], dt, n_max), n_t);
            mem += q_t * s.mem_free() as f64 / s.mem_capacity as f64;
            energy += q_e * s.energy_unallocated.max(0.0) / s.energy_capacity;
        }
        (mem / n, energy / n)
    }

    fn horizon(&self) -> (usize, usize, f64) {
        (
            self.config.session_steps() as usize,
            self.config.horizon_steps() as usize,
            self.config.time_step as f64,
        )
    }

    fn rate(drain: f64, remaining: f64, dt: f64) -> f64 {
        if remaining <= 0.0 {
            f64::INFINITY
        } else {
            drain / remaining / dt
        }
    }

    /// Advances one step and returns its snapshot.
    pub fn step(&mut self) -> Result<&MetricsSnapshot, SimError> {
        if self.is_finished() {
            return Err(SimError::Invariant { t_s: self.clock, detail: "step past session end".into() });
        }
        let dt = self.config.time_step;
        let step = self.clock / dt + 1;
        let step_start = self.clock;
        let now = step_start + dt;
        for s in &mut self.servers {
            s.step_closed_consumption = 0.0;
            s.step_closed_mem = 0;
            s.step_mem_admitted = 0;
        }

        self.arrivals(step)?;
        let closures_before = self.closures.len();
        let (k_total, k_closed) = self.close_applications(step_start)?;
        let allocation = self.allocate_pending(step_start)?;
        let drawn = self.accrue(step_start)?;

        for (s, d) in self.servers.iter_mut().zip(&drawn) {
            s.last_energy_consumed = *d;
            s.last_mem_admitted = s.step_mem_admitted;
        }
        for s in &mut self.servers {
            s.decay_rate = allocator::decay_rate(s, Basis::from(self.config.precedence), dt as f64).rate;
        }

        self.clock = now;
        let snapshot = self.snapshot(step, k_total, k_closed, closures_before, &drawn, allocation.deadlock);
        self.check_ledgers()?;
        self.allocations.push(allocation);
        self.snapshots.push(snapshot);
        Ok(self.snapshots.last().expect("just pushed"))
    }

    fn snapshot(
        &mut self,
        step: u64,
        k_total: usize,
        k_closed: usize,
        closures_before: usize,
        drawn: &[f64],
        deadlock: bool,
    ) -> MetricsSnapshot {
        let cfg = &self.config;
        let now = self.clock as f64;
        let dt = cfg.time_step as f64;

        let active_links = metrics::count_active_links(
            &self.topology,
            self.apps.iter().filter(|a| a.is_active()).map(|a| a.route.as_slice()),
        );

        let n = self.servers.len() as f64;
        let mut cont_time = 0.0;
        let mut cont_config = 0.0;
        let config_steps = cfg.horizon_steps().saturating_sub(step);
        for (s, d) in self.servers.iter().zip(drawn) {
            cont_time += metrics::continuity_ratio(s.energy_remaining(), *d, cfg.session_steps());
            cont_config += metrics::continuity_ratio(s.energy_remaining(), *d, config_steps);
        }
        self.continuity_sum += cont_time / n;
        let p_continuity_time = self.continuity_sum / step as f64;
        let p_continuity_config = cont_config / n;

        let e_raw: Vec<f64> = self.servers.iter().map(|s| allocator::server_energy_restoration(s, cfg, now)).collect();
        let a_raw: Vec<f64> = self.servers.iter().map(|s| allocator::server_memory_restoration(s, cfg, now)).collect();
        let restoration = metrics::resource_restoration(&RestorationInputs {
            k_closed,
            k_total,
            links_active: active_links,
            links_total: self.topology.link_count(),
            e_r_norm: metrics::normalize_over_servers(&e_raw),
            a_r_norm: metrics::normalize_over_servers(&a_raw),
            n1: cfg.n1,
            n2: cfg.n2,
        })
        .unwrap_or(0.0);

        let mem_gain_mb: u64 = self.servers.iter().map(ServerState::mem_free).sum();
        let energy_gain_j: f64 = self.servers.iter().map(|s| s.energy_unallocated.max(0.0)).sum();
        let capacity: f64 = self.servers.iter().map(|s| s.energy_capacity).sum();

        let closed_now = &self.closures[closures_before..];
        let remaining_energy_per_closing_app = if closed_now.is_empty() {
            0.0
        } else {
            closed_now.iter().map(|c| c.remaining_energy).sum::<f64>() / closed_now.len() as f64
        };

        let lifetime = metrics::mean_lifetime(k_total, k_closed, cfg.slots_per_server).ok();
        let gamma = lifetime.map(|l| l.0).unwrap_or(0.0);
        let survivors: Vec<f64> = self
            .apps
            .iter()
            .filter(|a| a.server().is_some())
            .map(|a| a.power_draw * gamma)
            .collect();
        let delta_e: f64 = self.servers.iter().map(ServerState::energy_remaining).sum();
        let survivability = metrics::survivability(delta_e, &survivors);

        let mem_rates: Vec<f64> = self
            .servers
            .iter()
            .map(|s| Self::rate(s.step_mem_admitted as f64, s.mem_free() as f64, dt))
            .collect();
        let energy_rates: Vec<f64> =
            self.servers.iter().zip(drawn).map(|(s, d)| Self::rate(*d, s.energy_remaining(), dt)).collect();
        let (mem_gain, energy_gain) = self.expected_gains(&mem_rates, &energy_rates);
        self.gain_times.push(now);
        self.mem_gain_series.push(mem_gain);
        self.energy_gain_series.push(energy_gain);
        let sustainability =
            metrics::average_sustainability(&self.gain_times, &self.mem_gain_series, &self.energy_gain_series)
                .map(|s| s.2)
                .unwrap_or(0.0);

        let (n_t, n_max, _) = self.horizon();
        let mut se_mem = 0.0;
        let mut se_energy = 0.0;
        for (k, s) in self.servers.iter().enumerate() {
            let p_mem = agreement::exponential_series(mem_rates[k], dt, n_max);
            let q_t = agreement::q_tail_probability(&p_mem, n_t);
            let free = s.mem_free() as f64;
            let tail: Vec<f64> = p_mem[(n_t + 1).min(p_mem.len())..].iter().map(|p| p * free).collect();
            se_mem += agreement::memory_decision(q_t, free + s.psc_mem as f64, &tail).value;

            let p_energy = agreement::exponential_series(energy_rates[k], dt, n_max);
            let q_e = agreement::q_tail_probability(&p_energy, n_t);
            let pool = s.energy_unallocated.max(0.0);
            se_energy += agreement::energy_decision(q_e, pool + s.psc_remaining.max(0.0), pool).value;
        }

        MetricsSnapshot {
            step_time: self.clock,
            failure_fraction: cfg.failure_fraction,
            lambda: cfg.k_apps,
            active_links: active_links as u32,
            p_continuity_time,
            p_continuity_config,
            restoration,
            mem_gain_mb,
            energy_gain_j,
            energy_gain_pct: 100.0 * energy_gain_j / capacity,
            remaining_energy_per_closing_app,
            mean_lifetime: lifetime.map(|l| l.1),
            survivability,
            sustainability,
            self_enforcing_mem: AgreementDecision::new(se_mem),
            self_enforcing_energy: AgreementDecision::new(se_energy),
            deadlock,
        }
    }

    /// Memory must balance exactly; energy within a small absolute tolerance.
    pub fn check_ledgers(&self) -> Result<(), SimError> {
        let fail = |detail: String| Err(SimError::Invariant { t_s: self.clock, detail });
        let mut hosted_remaining_total = 0.0;
        for s in &self.servers {
            let mem: u64 = s.hosted.iter().map(|id| u64::from(self.apps[*id as usize].mem_demand)).sum();
            if mem != s.mem_used {
                return fail(format!("server {} mem_used {} != hosted sum {}", s.id, s.mem_used, mem));
            }
            if s.mem_used > s.mem_capacity || s.slots_used > s.slots || s.slots_used as usize != s.hosted.len() {
                return fail(format!("server {} over capacity", s.id));
            }
            for id in &s.hosted {
                if self.apps[*id as usize].server() != Some(s.id) {
                    return fail(format!("server {} hosts app {} that is not active there", s.id, id));
                }
            }
            let remaining: f64 = s.hosted.iter().map(|id| self.apps[*id as usize].remaining_energy()).sum();
            if (remaining - s.hosted_remaining).abs() > ENERGY_LEDGER_TOL {
                return fail(format!("server {} hosted remaining drifted", s.id));
            }
            hosted_remaining_total += remaining;
        }
        let unallocated: f64 = self.servers.iter().map(|s| s.energy_unallocated).sum();
        let consumed: f64 = self.servers.iter().map(|s| s.energy_consumed_total).sum();
        let capacity: f64 = self.servers.iter().map(|s| s.energy_capacity).sum();
        let gap = unallocated + consumed + hosted_remaining_total - capacity;
        if gap.abs() > ENERGY_LEDGER_TOL {
            return fail(format!("energy ledger off by {gap:e} J"));
        }
        if !self.pending.is_empty() || self.apps.iter().any(|a| a.state == AppState::Pending) {
            return fail("PSC application left pending after allocation".into());
        }
        Ok(())
    }

    /// Energy drawn by applications carried by access points.
    pub fn ap_energy_consumed(&self) -> f64 {
        self.ap_energy_consumed
    }
}

/// Headline figures of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub failure_fraction: f64,
    pub lambda: u32,
    pub seed: u64,
    pub steps: usize,
    pub active_links_final: u32,
    /// Continuity over time at the end of the session (running mean).
    pub p_continuity_time: f64,
    /// Mean over steps.
    pub p_continuity_config: f64,
    pub restoration_mean: f64,
    pub energy_gain_pct_final: f64,
    /// Mean unspent energy over every scheduled closure of the run.
    pub remaining_energy_per_closing_app: f64,
    pub closures: usize,
    /// Mean over steps where it is defined.
    pub mean_lifetime: Option<f64>,
    pub sustainability_final: f64,
    pub deadlock_steps: usize,
    pub psc_arrivals: usize,
    pub psc_migrated: usize,
    pub psc_rejected: usize,
    pub lora_rejected: usize,
    /// SHA-256 of the JSON-encoded snapshot stream.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub snapshots: Vec<MetricsSnapshot>,
    pub summary: RunSummary,
}

pub fn snapshot_digest(snapshots: &[MetricsSnapshot]) -> String {
    let bytes = serde_json::to_vec(snapshots).expect("snapshots serialise");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Injects the configured failure at t=0 and runs the whole session.
pub fn run_scenario(config: ScenarioConfig) -> Result<RunOutput, SimError> {
    let mut sim = Simulation::new(config)?;
    sim.inject_failure(sim.config.failure_fraction)?;
    while !sim.is_finished() {
        sim.step()?;
    }
    Ok(sim.finish())
}

impl Simulation {
    pub fn finish(self) -> RunOutput {
        let snaps = &self.snapshots;
        let last = snaps.last();
        let psc = || self.apps.iter().filter(|a| a.source == AppSource::Psc);
        let summary = RunSummary {
            failure_fraction: self.config.failure_fraction,
            lambda: self.config.k_apps,
            seed: self.config.seed,
            steps: snaps.len(),
            active_links_final: last.map(|s| s.active_links).unwrap_or(0),
            p_continuity_time: last.map(|s| s.p_continuity_time).unwrap_or(1.0),
            p_continuity_config: mean(snaps.iter().map(|s| s.p_continuity_config)).unwrap_or(1.0),
            restoration_mean: mean(snaps.iter().map(|s| s.restoration)).unwrap_or(0.0),
            energy_gain_pct_final: last.map(|s| s.energy_gain_pct).unwrap_or(100.0),
            remaining_energy_per_closing_app: mean(self.closures.iter().map(|c| c.remaining_energy)).unwrap_or(0.0),
            closures: self.closures.len(),
            mean_lifetime: mean(snaps.iter().filter_map(|s| s.mean_lifetime)),
            sustainability_final: last.map(|s| s.sustainability).unwrap_or(0.0),
            deadlock_steps: snaps.iter().filter(|s| s.deadlock).count(),
            psc_arrivals: psc().count(),
            psc_migrated: self.allocations.iter().map(|r| r.placements.len()).sum(),
            psc_rejected: psc().filter(|a| matches!(a.state, AppState::Rejected(_))).count(),
            lora_rejected: self
                .apps
                .iter()
                .filter(|a| a.source == AppSource::LoRa && matches!(a.state, AppState::Rejected(_)))
                .count(),
            digest: snapshot_digest(snaps),
        };
        RunOutput { config: self.config, snapshots: self.snapshots, summary }
    }
}
