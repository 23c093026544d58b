//! Self-enforcing agreement calculus for memory and energy.
//!
//! Every function here is pure. Memory quantities are whole MB, energy
//! quantities are joules, probabilities are unitless.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Values within this distance of zero are a tie and map to `Continue`.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionLabel {
    /// Cooperation is losing value: roll the extra load back.
    Reset,
    Continue,
    /// Surplus remains: reallocate it to PSC or admit more applications.
    Expand,
}

impl DecisionLabel {
    pub fn from_value(value: f64) -> Self {
        if value.abs() <= TIE_TOLERANCE {
            DecisionLabel::Continue
        } else if value < 0.0 {
            DecisionLabel::Reset
        } else {
            DecisionLabel::Expand
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DecisionLabel::Reset => "reset",
            DecisionLabel::Continue => "continue",
            DecisionLabel::Expand => "expand",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementDecision {
    pub value: f64,
    pub label: DecisionLabel,
}

impl AgreementDecision {
    pub fn new(value: f64) -> Self {
        Self { value, label: DecisionLabel::from_value(value) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AgreementError {
    #[error("empty_horizon")]
    EmptyHorizon,
}

/// Whether a batch of applications fits: the total against what the network
/// has available, and each one against the server's free memory.
pub fn memory_feasible(demands: &[u32], server_free: u64, network_available: u64) -> bool {
    let total: u64 = demands.iter().map(|d| u64::from(*d)).sum();
    total <= network_available && demands.iter().all(|d| u64::from(*d) <= server_free)
}

/// Clamps a required/available ratio into [0, 1]. The flag reports a ratio
/// above one, i.e. congestion.
pub fn clamp_ratio(required: f64, available: f64) -> (f64, bool) {
    if available <= 0.0 {
        return if required > 0.0 { (1.0, true) } else { (0.0, false) };
    }
    let r = required / available;
    (r.clamp(0.0, 1.0), r > 1.0)
}

/// Mean of the per-step ratios.
pub fn memory_availability_probability(ratios: &[f64]) -> Result<f64, AgreementError> {
    if ratios.is_empty() {
        return Err(AgreementError::EmptyHorizon);
    }
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// Gain of one server: the sum of its per-step surplus, steps inclusive.
pub fn per_server_memory_gain(surplus: &[u64]) -> u64 {
    surplus.iter().sum()
}

/// Network gain as a double sum over servers and their applications.
pub fn network_memory_gain(per_server_per_app: &[Vec<u64>]) -> u64 {
    per_server_per_app.iter().map(|row| per_server_memory_gain(row)).sum()
}

pub fn expected_memory_gain(q_t: f64, per_app_surplus: &[f64]) -> f64 {
    per_app_surplus.iter().map(|d| q_t * d).sum()
}

/// `q_t * delta_alpha_x - sum(tail_terms)`.
pub fn memory_decision(q_t: f64, delta_alpha_x: f64, tail_terms: &[f64]) -> AgreementDecision {
    AgreementDecision::new(q_t * delta_alpha_x - tail_terms.iter().sum::<f64>())
}

/// Energy drawn by applications given as `(power_draw, active_seconds)`.
pub fn energy_consumed(apps: &[(f64, f64)]) -> f64 {
    apps.iter().map(|(p, t)| p * t).sum()
}

pub fn degradation_ok(consumed_delta: f64, e0: f64, kappa: f64, elapsed: f64) -> bool {
    consumed_delta <= e0 * (-kappa * elapsed).exp()
}

/// Probability series proportional to `exp(-rate * k * step)` for
/// `k = 0..=n_max`, normalised to sum to one. An infinite rate yields a point
/// mass at zero.
pub fn exponential_series(rate_per_s: f64, step_s: f64, n_max: usize) -> Vec<f64> {
    if !rate_per_s.is_finite() {
        let mut p = vec![0.0; n_max + 1];
        p[0] = 1.0;
        return p;
    }
    let raw: Vec<f64> = (0..=n_max).map(|k| (-rate_per_s * k as f64 * step_s).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Mass of the series strictly beyond `boundary`.
pub fn q_tail_probability(p_series: &[f64], boundary: usize) -> f64 {
    if boundary + 1 >= p_series.len() {
        return 0.0;
    }
    p_series[boundary + 1..].iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strictness {
    /// `sum <= delta_e`
    AtMost,
    /// `sum <= factor * delta_e`
    MuchSmaller(f64),
}

pub fn energy_requirement_ok(required_per_step: &[f64], delta_e: f64, strictness: Strictness) -> bool {
    let total: f64 = required_per_step.iter().sum();
    match strictness {
        Strictness::AtMost => total <= delta_e,
        Strictness::MuchSmaller(factor) => total <= factor * delta_e,
    }
}

pub fn expected_energy_gain(q_e: f64, delta_e: f64) -> f64 {
    q_e * delta_e
}

/// `q_e * delta_e_x - q_e * delta_e`.
pub fn energy_decision(q_e: f64, delta_e_x: f64, delta_e: f64) -> AgreementDecision {
    AgreementDecision::new(q_e * delta_e_x - q_e * delta_e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn feasibility() {
        assert!(memory_feasible(&[3, 4], 10, 100));
        assert!(memory_feasible(&[], 0, 0));
        assert!(!memory_feasible(&[11], 10, 100));
        assert!(!memory_feasible(&[6, 6], 10, 11));
    }

    #[test]
    fn availability_mean() {
        assert_eq!(memory_availability_probability(&[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(memory_availability_probability(&[0.0; 3]).unwrap(), 0.0);
        assert!(close(memory_availability_probability(&[0.2, 0.4, 0.6]).unwrap(), 0.4));
        assert_eq!(memory_availability_probability(&[]), Err(AgreementError::EmptyHorizon));
    }

    #[test]
    fn ratio_clamp_flags_congestion() {
        assert_eq!(clamp_ratio(5.0, 10.0), (0.5, false));
        assert_eq!(clamp_ratio(20.0, 10.0), (1.0, true));
        assert_eq!(clamp_ratio(0.0, 0.0), (0.0, false));
    }

    #[test]
    fn gains() {
        assert_eq!(per_server_memory_gain(&[0; 4]), 0);
        assert_eq!(per_server_memory_gain(&[1; 11]), 11);
        assert_eq!(per_server_memory_gain(&[2, 3, 5]), 10);
        assert_eq!(network_memory_gain(&[vec![7]]), 7);
        assert_eq!(network_memory_gain(&[vec![1, 1], vec![1, 1]]), 4);
        assert_eq!(expected_memory_gain(0.0, &[3.0]), 0.0);
        assert_eq!(expected_memory_gain(1.0, &[5.0, 5.0]), 10.0);
        assert!(close(expected_memory_gain(0.4, &[10.0, 20.0]), 12.0));
    }

    #[test]
    fn memory_decisions() {
        let d = memory_decision(0.5, 10.0, &[5.0]);
        assert_eq!((d.value, d.label), (0.0, DecisionLabel::Continue));
        let d = memory_decision(0.5, 4.0, &[5.0]);
        assert_eq!((d.value, d.label), (-3.0, DecisionLabel::Reset));
        let d = memory_decision(0.5, 20.0, &[2.0, 3.0]);
        assert_eq!((d.value, d.label), (5.0, DecisionLabel::Expand));
    }

    #[test]
    fn consumption() {
        assert_eq!(energy_consumed(&[]), 0.0);
        assert!(close(energy_consumed(&[(33.724e-6, 360.0)]), 0.01214064));
        assert!(close(energy_consumed(&[(33.724e-6, 100.0), (33.724e-6, 100.0)]), 6.7448e-3));
    }

    #[test]
    fn degradation_bound() {
        let kappa = std::f64::consts::LN_2 / 3600.0;
        assert!(degradation_ok(0.0337, 0.0337, kappa, 0.0));
        assert!(degradation_ok(0.0, 0.0337, 1.0, 1e6));
        assert!(!degradation_ok(0.0169, 0.0337, kappa, 3600.0));
        assert!(degradation_ok(0.01685, 0.0337, kappa, 3600.0));
    }

    #[test]
    fn tails() {
        let uniform = vec![0.1; 10];
        assert!(close(q_tail_probability(&uniform, 4), 0.5));
        let mut point = vec![0.0; 21];
        point[0] = 1.0;
        assert_eq!(q_tail_probability(&point, 0), 0.0);
        let mut last = vec![0.0; 21];
        last[20] = 1.0;
        assert_eq!(q_tail_probability(&last, 0), 1.0);
        assert_eq!(q_tail_probability(&last, 20), 0.0);
    }

    #[test]
    fn exponential_series_is_normalised() {
        let p = exponential_series(1e-4, 360.0, 20);
        assert_eq!(p.len(), 21);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
        let idle = exponential_series(0.0, 360.0, 20);
        assert!(close(q_tail_probability(&idle, 10), 10.0 / 21.0));
        assert_eq!(exponential_series(f64::INFINITY, 360.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn requirement_modes() {
        assert!(energy_requirement_ok(&[], 1.0, Strictness::AtMost));
        assert!(energy_requirement_ok(&[], 1.0, Strictness::MuchSmaller(0.5)));
        assert!(energy_requirement_ok(&[0.5, 0.5], 1.0, Strictness::AtMost));
        assert!(!energy_requirement_ok(&[0.5, 0.5], 1.0, Strictness::MuchSmaller(0.5)));
        assert!(energy_requirement_ok(&[0.4], 1.0, Strictness::MuchSmaller(0.5)));
    }

    #[test]
    fn energy_decisions() {
        assert_eq!(expected_energy_gain(0.0, 1.0), 0.0);
        assert_eq!(expected_energy_gain(1.0, 0.02), 0.02);
        assert!(close(expected_energy_gain(0.36, 0.011), 0.00396));
        assert_eq!(energy_decision(0.7, 0.02, 0.02).label, DecisionLabel::Continue);
        assert_eq!(energy_decision(0.7, 0.01, 0.02).label, DecisionLabel::Reset);
        let d = energy_decision(0.5, 0.03, 0.01);
        assert!(close(d.value, 0.01));
        assert_eq!(d.label, DecisionLabel::Expand);
    }
}
