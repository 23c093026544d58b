//! Applications and per-server resource accounting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::topology::LinkId;

pub type AppId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AppSource {
    Psc,
    LoRa,
}

/// Where an active application runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Host {
    Server(u32),
    AccessPoint(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    /// No server had enough memory, slots or energy.
    Capacity,
    /// A placement existed but it broke the equilibrium conditions.
    EquilibriumViolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AppState {
    Pending,
    Active(Host),
    Closed,
    Rejected(RejectReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("application {id}: {from:?} -> {to:?}")]
pub struct TransitionError {
    pub id: AppId,
    pub from: AppState,
    pub to: AppState,
}

/// True for the legal edges of the application life cycle:
/// Pending to Active or Rejected, Active to Closed, and an AP-hosted
/// application returning to Pending when its access point fails.
pub fn transition_allowed(from: AppState, to: AppState) -> bool {
    matches!(
        (from, to),
        (AppState::Pending, AppState::Active(_))
            | (AppState::Pending, AppState::Rejected(_))
            | (AppState::Active(_), AppState::Closed)
            | (AppState::Active(Host::AccessPoint(_)), AppState::Pending)
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Application {
    pub id: AppId,
    pub source: AppSource,
    pub user: u32,
    /// Memory demand, MB.
    pub mem_demand: u32,
    /// J/s.
    pub power_draw: f64,
    /// Energy budget copied at admission, J.
    pub energy_budget: f64,
    /// Energy drawn so far, J.
    pub consumed: f64,
    pub arrival_time: f64,
    pub activated_time: Option<f64>,
    pub close_time: Option<f64>,
    pub state: AppState,
    pub route: Vec<LinkId>,
}

impl Application {
    pub fn new(id: AppId, source: AppSource, user: u32, mem_demand: u32, arrival_time: f64, config: &ScenarioConfig) -> Self {
        Self {
            id,
            source,
            user,
            mem_demand,
            power_draw: config.power_draw,
            energy_budget: config.energy_per_app,
            consumed: 0.0,
            arrival_time,
            activated_time: None,
            close_time: None,
            state: AppState::Pending,
            route: Vec::new(),
        }
    }

    pub fn remaining_energy(&self) -> f64 {
        self.energy_budget - self.consumed
    }

    pub fn is_active(&self) -> bool {
        matches!(self.state, AppState::Active(_))
    }

    pub fn server(&self) -> Option<u32> {
        match self.state {
            AppState::Active(Host::Server(b)) => Some(b),
            _ => None,
        }
    }

    pub fn transition(&mut self, to: AppState) -> Result<(), TransitionError> {
        if transition_allowed(self.state, to) {
            self.state = to;
            Ok(())
        } else {
            Err(TransitionError { id: self.id, from: self.state, to })
        }
    }
}

/// Resource pools of one sub-network server.
///
/// Energy is accounted per application slot: the server starts with
/// `E0 * S0` joules unallocated, each admission moves one `E0` budget to the
/// application, and a closing application hands back whatever it did not
/// consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerState {
    pub id: u32,
    pub mem_capacity: u64,
    pub mem_used: u64,
    pub slots: u32,
    pub slots_used: u32,
    pub hosted: Vec<AppId>,
    pub energy_capacity: f64,
    /// Energy not yet handed to any application.
    pub energy_unallocated: f64,
    /// Energy drawn by hosted applications since t=0.
    pub energy_consumed_total: f64,
    /// Sum of the remaining budgets of hosted applications.
    pub hosted_remaining: f64,
    /// Memory and energy held by hosted PSC applications.
    pub psc_mem: u64,
    pub psc_remaining: f64,
    /// Gross memory admitted during the previous step, MB.
    pub last_mem_admitted: u64,
    /// Energy drawn during the previous step, J.
    pub last_energy_consumed: f64,
    /// Memory admitted so far in the current step.
    pub step_mem_admitted: u64,
    /// Energy consumed by applications closed this step (their whole life).
    pub step_closed_consumption: f64,
    pub step_closed_mem: u64,
    pub decay_rate: f64,
}

impl ServerState {
    pub fn new(id: u32, config: &ScenarioConfig) -> Self {
        let energy = config.server_energy_capacity();
        Self {
            id,
            mem_capacity: config.mem_initial,
            mem_used: 0,
            slots: config.slots_per_server,
            slots_used: 0,
            hosted: Vec::new(),
            energy_capacity: energy,
            energy_unallocated: energy,
            energy_consumed_total: 0.0,
            hosted_remaining: 0.0,
            psc_mem: 0,
            psc_remaining: 0.0,
            last_mem_admitted: 0,
            last_energy_consumed: 0.0,
            step_mem_admitted: 0,
            step_closed_consumption: 0.0,
            step_closed_mem: 0,
            decay_rate: 0.0,
        }
    }

    pub fn mem_free(&self) -> u64 {
        self.mem_capacity - self.mem_used
    }

    /// Energy still available on this server: unallocated plus the unspent
    /// part of hosted budgets.
    pub fn energy_remaining(&self) -> f64 {
        self.energy_capacity - self.energy_consumed_total
    }

    /// Admission needs a free slot and enough memory. Every slot comes with
    /// its own energy budget, so the unallocated pool may run negative once
    /// the server is oversubscribed.
    pub fn can_host(&self, mem_demand: u32) -> bool {
        self.slots_used < self.slots && self.mem_free() >= u64::from(mem_demand)
    }

    /// Mean remaining budget over hosted applications.
    pub fn avg_hosted_remaining(&self) -> f64 {
        if self.hosted.is_empty() {
            0.0
        } else {
            self.hosted_remaining / self.hosted.len() as f64
        }
    }

    /// Books an application onto this server. The caller must have checked
    /// [`ServerState::can_host`].
    pub fn admit(&mut self, id: AppId, source: AppSource, mem_demand: u32, energy_budget: f64) {
        debug_assert!(self.can_host(mem_demand));
        self.hosted.push(id);
        self.mem_used += u64::from(mem_demand);
        self.slots_used += 1;
        self.step_mem_admitted += u64::from(mem_demand);
        self.energy_unallocated -= energy_budget;
        self.hosted_remaining += energy_budget;
        if source == AppSource::Psc {
            self.psc_mem += u64::from(mem_demand);
            self.psc_remaining += energy_budget;
        }
    }

    /// Releases a hosted application. `returned` is the unspent energy handed
    /// back to the unallocated pool.
    pub fn release(&mut self, id: AppId, source: AppSource, mem_demand: u32, returned: f64) {
        if let Some(pos) = self.hosted.iter().position(|h| *h == id) {
            self.hosted.remove(pos);
        }
        self.mem_used -= u64::from(mem_demand);
        self.slots_used -= 1;
        self.hosted_remaining -= returned;
        self.energy_unallocated += returned;
        if source == AppSource::Psc {
            self.psc_mem -= u64::from(mem_demand);
            self.psc_remaining -= returned;
        }
        if self.hosted.is_empty() {
            self.hosted_remaining = 0.0;
            self.psc_remaining = 0.0;
        }
    }

    /// Books energy drawn by a hosted application.
    pub fn draw(&mut self, source: AppSource, joules: f64) {
        self.energy_consumed_total += joules;
        self.hosted_remaining -= joules;
        if source == AppSource::Psc {
            self.psc_remaining -= joules;
        }
    }
}
