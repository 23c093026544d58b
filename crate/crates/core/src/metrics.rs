//! Restoration, lifetime, survivability and sustainability, plus the
//! link-count and continuity observables recorded at every step.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agreement::AgreementDecision;
use crate::config::MemoryRestorationMode;
use crate::topology::{LinkId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("empty_network")]
    EmptyNetwork,
    #[error("lifetime_singular")]
    LifetimeSingular,
    #[error("too_few_samples")]
    TooFewSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Survivability {
    Available,
    Unavailable,
}

impl Survivability {
    pub fn as_str(self) -> &'static str {
        match self {
            Survivability::Available => "available",
            Survivability::Unavailable => "unavailable",
        }
    }
}

/// Everything recorded at the end of one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub step_time: u64,
    pub failure_fraction: f64,
    pub lambda: u32,
    pub active_links: u32,
    pub p_continuity_time: f64,
    pub p_continuity_config: f64,
    pub restoration: f64,
    pub mem_gain_mb: u64,
    pub energy_gain_j: f64,
    pub energy_gain_pct: f64,
    /// Mean unspent budget of the applications closed on schedule this step.
    pub remaining_energy_per_closing_app: f64,
    /// `None` when the lifetime formula is singular (no surviving apps).
    pub mean_lifetime: Option<f64>,
    pub survivability: Survivability,
    pub sustainability: f64,
    pub self_enforcing_mem: AgreementDecision,
    pub self_enforcing_energy: AgreementDecision,
    pub deadlock: bool,
}

pub fn energy_restoration(closed_consumption: f64, avg_remaining: f64, e0: f64, kappa: f64, elapsed: f64) -> f64 {
    (closed_consumption + avg_remaining) / e0 - e0 * (-kappa * elapsed).exp()
}

/// Memory restoration rate in either sign convention.
///
/// `Additive`: `(closed + remaining - allocated) / alpha0`.
/// `Subtractive`: `(closed - remaining) / alpha0 - alpha0 * exp(-kappa * elapsed)`.
pub fn memory_restoration(
    mode: MemoryRestorationMode,
    closed_mem: f64,
    avg_remaining_mem: f64,
    allocated_mem: f64,
    alpha0: f64,
    kappa: f64,
    elapsed: f64,
) -> f64 {
    match mode {
        MemoryRestorationMode::Additive => (closed_mem + avg_remaining_mem - allocated_mem) / alpha0,
        MemoryRestorationMode::Subtractive => {
            (closed_mem - avg_remaining_mem) / alpha0 - alpha0 * (-kappa * elapsed).exp()
        }
    }
}

/// Divides by the largest magnitude and clamps negatives to zero.
pub fn normalize_over_servers(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|v| (v / max).max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestorationInputs {
    pub k_closed: usize,
    pub k_total: usize,
    pub links_active: usize,
    pub links_total: usize,
    /// Normalised energy restoration per server.
    pub e_r_norm: Vec<f64>,
    /// Normalised memory restoration per server.
    pub a_r_norm: Vec<f64>,
    pub n1: f64,
    pub n2: f64,
}

/// `(K'/K * L_A/L_T) * (n1*|E_R| + n2*|a_R|) / (n1 + n2)`, averaged over servers.
pub fn resource_restoration(inputs: &RestorationInputs) -> Result<f64, MetricError> {
    if inputs.k_total == 0 || inputs.links_total == 0 {
        return Err(MetricError::EmptyNetwork);
    }
    let scale = (inputs.k_closed as f64 / inputs.k_total as f64)
        * (inputs.links_active as f64 / inputs.links_total as f64);
    let n = inputs.e_r_norm.len().min(inputs.a_r_norm.len());
    if n == 0 {
        return Ok(0.0);
    }
    let weighted: f64 = inputs
        .e_r_norm
        .iter()
        .zip(&inputs.a_r_norm)
        .map(|(e, a)| (inputs.n1 * e + inputs.n2 * a) / (inputs.n1 + inputs.n2))
        .sum();
    Ok(scale * weighted / n as f64)
}

/// Returns `(gamma, gamma_prime)` with `gamma = 1/(K - K')`, `gamma' = S0 * gamma`.
pub fn mean_lifetime(k_total: usize, k_closed: usize, slots: u32) -> Result<(f64, f64), MetricError> {
    if k_total <= k_closed {
        return Err(MetricError::LifetimeSingular);
    }
    let gamma = 1.0 / (k_total - k_closed) as f64;
    Ok((gamma, f64::from(slots) * gamma))
}

pub fn survivability(delta_e: f64, per_app_drain: &[f64]) -> Survivability {
    if delta_e >= per_app_drain.iter().sum::<f64>() {
        Survivability::Available
    } else {
        Survivability::Unavailable
    }
}

/// Trapezoidal time averages of the two expected-gain series sampled at
/// `times`. Returns `(s1, s2, s_avg)`.
pub fn average_sustainability(times: &[f64], mem_gain: &[f64], energy_gain: &[f64]) -> Result<(f64, f64, f64), MetricError> {
    if times.len() < 2 || mem_gain.len() != times.len() || energy_gain.len() != times.len() {
        return Err(MetricError::TooFewSamples);
    }
    let span = times[times.len() - 1] - times[0];
    if span <= 0.0 {
        return Err(MetricError::TooFewSamples);
    }
    let s1 = trapezoid(times, mem_gain) / span;
    let s2 = trapezoid(times, energy_gain) / span;
    Ok((s1, s2, (s1 + s2) / 2.0))
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| (xs[1] - xs[0]) * (ys[0] + ys[1]) / 2.0)
        .sum()
}

/// Distinct links on the given routes, plus the backhaul of every alive AP
/// whenever at least one route is present.
pub fn count_active_links<'a>(topology: &Topology, routes: impl IntoIterator<Item = &'a [LinkId]>) -> usize {
    let mut used: BTreeSet<LinkId> = BTreeSet::new();
    for route in routes {
        used.extend(route.iter().copied());
    }
    if used.is_empty() {
        return 0;
    }
    for ap in 0..topology.n_aps() {
        if topology.ap_is_alive(ap) {
            used.insert(topology.ap_link(ap));
        }
    }
    used.len()
}

/// Fraction of the demand over `steps` more steps that the remaining resource
/// covers, capped at one. Zero drain is full continuity.
pub fn continuity_ratio(remaining: f64, per_step_drain: f64, steps: u64) -> f64 {
    let demand = per_step_drain * steps as f64;
    if demand <= 0.0 {
        1.0
    } else {
        (remaining.max(0.0) / demand).min(1.0)
    }
}
