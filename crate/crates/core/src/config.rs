//! Scenario configuration and validation.
//!
//! Every knob of a run lives in [`ScenarioConfig`]. The on-disk form is a flat
//! TOML table whose keys are exactly the field names; unknown keys are rejected
//! so that a mistyped symbol never silently falls back to a default.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How application arrivals are generated for each server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalModel {
    /// K applications per server spread evenly over the session, remainder
    /// front-loaded.
    #[default]
    DeterministicUniform,
    /// Per-step counts drawn from a Poisson law with mean K/(T/t).
    Poisson,
}

/// Server selection mode for the availability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Lifetime on the precedence basis passes, or the server has minimum decay.
    #[default]
    Relaxed,
    /// Both memory and energy lifetimes must pass.
    Strict,
}

/// Which resource leads server ordering and placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Precedence {
    #[default]
    MemoryFirst,
    EnergyFirst,
}

/// Sign convention for the memory restoration rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MemoryRestorationMode {
    /// `(closed + remaining - allocated) / alpha0`
    #[default]
    Additive,
    /// `(closed - remaining) / alpha0 - alpha0 * exp(-kappa * t)`
    Subtractive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_core: u32,
    pub n_servers: u32,
    pub n_gateways: u32,
    pub n_aps: u32,
    pub n_users: u32,
    pub failure_fraction: f64,
    /// Session length T, seconds.
    pub session_time: u64,
    /// Horizon T_max, seconds.
    pub t_max: u64,
    /// Step length t, seconds.
    pub time_step: u64,
    /// Applications per server over the session (K, also the sweep's lambda).
    pub k_apps: u32,
    pub arrival_model: ArrivalModel,
    /// Inclusive MB range for per-application memory demand.
    pub mem_per_app_range: (u32, u32),
    /// Memory per server, MB.
    pub mem_initial: u64,
    /// Energy budget of one application slot, J.
    pub energy_per_app: f64,
    /// Power draw of one application, J/s.
    pub power_draw: f64,
    /// Fraction of hosted applications closing at each server per step.
    pub close_fraction: f64,
    pub n1: f64,
    pub n2: f64,
    /// Decay constant for the energy degradation bound, 1/s.
    pub decay_constant_energy: f64,
    /// Decay constant for the memory restoration term, 1/s.
    pub decay_constant_memory: f64,
    pub delta_x_energy: u32,
    pub delta_y_memory: u32,
    pub slots_per_server: u32,
    pub seed: u64,

    /// PSC arrivals per end device relative to its LoRa arrivals.
    pub psc_load_ratio: f64,
    /// Factor applied to the surplus in the "much smaller than" energy test.
    pub strictness_factor: f64,
    /// Use the application count as the decay constant (exp(-K T)).
    pub paper_literal_decay: bool,
    /// Multiplier for application counts in the equilibrium decay exponents.
    /// `None` normalises the baseline exponent to -1.
    pub decay_exponent_scale: Option<f64>,
    pub selection_mode: SelectionMode,
    pub precedence: Precedence,
    pub memory_restoration_mode: MemoryRestorationMode,
    /// Geometric factor applied to both thresholds per adjustment.
    pub threshold_relax_factor: f64,
    pub max_threshold_adjustments: u32,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let half_life = std::f64::consts::LN_2 / 3600.0;
        Self {
            n_core: 1,
            n_servers: 10,
            n_gateways: 100,
            n_aps: 100,
            n_users: 1000,
            failure_fraction: 0.0,
            session_time: 3600,
            t_max: 7200,
            time_step: 360,
            k_apps: 100,
            arrival_model: ArrivalModel::DeterministicUniform,
            mem_per_app_range: (1, 10),
            mem_initial: 10_000,
            energy_per_app: 0.0337,
            power_draw: 33.724e-6,
            close_fraction: 0.10,
            n1: 0.5,
            n2: 0.3,
            decay_constant_energy: half_life,
            decay_constant_memory: half_life,
            delta_x_energy: 1,
            delta_y_memory: 1,
            slots_per_server: 100,
            seed: 1,
            psc_load_ratio: 0.1,
            strictness_factor: 0.5,
            paper_literal_decay: false,
            decay_exponent_scale: None,
            selection_mode: SelectionMode::Relaxed,
            precedence: Precedence::MemoryFirst,
            memory_restoration_mode: MemoryRestorationMode::Additive,
            threshold_relax_factor: 0.9,
            max_threshold_adjustments: 10,
        }
    }
}

/// One violated invariant. The `Display` form is a stable snake_case name.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigViolation {
    CountBelowOne(&'static str),
    FailureFractionOutOfRange,
    TimeStepZero,
    TimeStepNotDivisor,
    TMaxBelowSession,
    N1N2SumNotPositive,
    N1N2SumExceedsOne,
    NegativeWeight,
    MemRangeInvalid,
    MemInitialBelowDemand,
    EnergyPerAppNotPositive,
    PowerDrawNotPositive,
    CloseFractionOutOfRange,
    DecayConstantNotPositive,
    GatewaysFewerThanServers,
    PscLoadRatioNegative,
    StrictnessFactorOutOfRange,
    DecayScaleNotPositive,
    RelaxFactorOutOfRange,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ConfigViolation::CountBelowOne(field) => return write!(f, "{field}_below_one"),
            ConfigViolation::FailureFractionOutOfRange => "failure_fraction_out_of_range",
            ConfigViolation::TimeStepZero => "time_step_zero",
            ConfigViolation::TimeStepNotDivisor => "time_step_not_divisor",
            ConfigViolation::TMaxBelowSession => "t_max_below_session",
            ConfigViolation::N1N2SumNotPositive => "n1_n2_sum_not_positive",
            ConfigViolation::N1N2SumExceedsOne => "n1_n2_sum_exceeds_one",
            ConfigViolation::NegativeWeight => "negative_weight",
            ConfigViolation::MemRangeInvalid => "mem_range_invalid",
            ConfigViolation::MemInitialBelowDemand => "mem_initial_below_demand",
            ConfigViolation::EnergyPerAppNotPositive => "energy_per_app_not_positive",
            ConfigViolation::PowerDrawNotPositive => "power_draw_not_positive",
            ConfigViolation::CloseFractionOutOfRange => "close_fraction_out_of_range",
            ConfigViolation::DecayConstantNotPositive => "decay_constant_not_positive",
            ConfigViolation::GatewaysFewerThanServers => "gateways_fewer_than_servers",
            ConfigViolation::PscLoadRatioNegative => "psc_load_ratio_negative",
            ConfigViolation::StrictnessFactorOutOfRange => "strictness_factor_out_of_range",
            ConfigViolation::DecayScaleNotPositive => "decay_scale_not_positive",
            ConfigViolation::RelaxFactorOutOfRange => "relax_factor_out_of_range",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid scenario: {}", join(.0))]
    Invalid(Vec<ConfigViolation>),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse scenario file: {0}")]
    Parse(#[from] toml::de::Error),
}

fn join(violations: &[ConfigViolation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl ConfigError {
    /// The violations, if this is a validation failure.
    pub fn violations(&self) -> &[ConfigViolation] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: ScenarioConfig = toml::from_str(text)?;
        raw.validate()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config is always representable as TOML")
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(self) -> Result<Self, ConfigError> {
        use ConfigViolation::*;
        let mut v = Vec::new();

        for (name, count) in [
            ("n_core", self.n_core),
            ("n_servers", self.n_servers),
            ("n_gateways", self.n_gateways),
            ("n_aps", self.n_aps),
            ("n_users", self.n_users),
            ("slots_per_server", self.slots_per_server),
            ("delta_x_energy", self.delta_x_energy),
            ("delta_y_memory", self.delta_y_memory),
        ] {
            if count < 1 {
                v.push(CountBelowOne(name));
            }
        }
        if self.n_servers >= 1 && self.n_gateways >= 1 && self.n_gateways < self.n_servers {
            v.push(GatewaysFewerThanServers);
        }
        if !(0.0..=1.0).contains(&self.failure_fraction) {
            v.push(FailureFractionOutOfRange);
        }
        if self.time_step == 0 {
            v.push(TimeStepZero);
        } else if self.session_time == 0 || !self.session_time.is_multiple_of(self.time_step) {
            v.push(TimeStepNotDivisor);
        }
        if self.t_max < self.session_time {
            v.push(TMaxBelowSession);
        }
        if self.n1 < 0.0 || self.n2 < 0.0 {
            v.push(NegativeWeight);
        }
        let weight_sum = self.n1 + self.n2;
        if !(weight_sum > 0.0) {
            v.push(N1N2SumNotPositive);
        } else if weight_sum > 1.0 {
            v.push(N1N2SumExceedsOne);
        }
        let (lo, hi) = self.mem_per_app_range;
        if lo < 1 || lo > hi {
            v.push(MemRangeInvalid);
        }
        if self.mem_initial < u64::from(hi) {
            v.push(MemInitialBelowDemand);
        }
        if !(self.energy_per_app > 0.0) {
            v.push(EnergyPerAppNotPositive);
        }
        if !(self.power_draw > 0.0) {
            v.push(PowerDrawNotPositive);
        }
        if !(0.0..=1.0).contains(&self.close_fraction) {
            v.push(CloseFractionOutOfRange);
        }
        if !(self.decay_constant_energy > 0.0) || !(self.decay_constant_memory > 0.0) {
            v.push(DecayConstantNotPositive);
        }
        if !(self.psc_load_ratio >= 0.0) {
            v.push(PscLoadRatioNegative);
        }
        if !(self.strictness_factor > 0.0 && self.strictness_factor <= 1.0) {
            v.push(StrictnessFactorOutOfRange);
        }
        if let Some(scale) = self.decay_exponent_scale {
            if !(scale > 0.0) {
                v.push(DecayScaleNotPositive);
            }
        }
        if !(self.threshold_relax_factor > 0.0 && self.threshold_relax_factor < 1.0) {
            v.push(RelaxFactorOutOfRange);
        }

        if v.is_empty() {
            Ok(self)
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// Number of steps in the session, T / t.
    pub fn session_steps(&self) -> u64 {
        self.session_time / self.time_step
    }

    /// Number of steps up to the horizon, floor(T_max / t).
    pub fn horizon_steps(&self) -> u64 {
        self.t_max / self.time_step
    }

    /// Number of failed access points, floor(X * |S|).
    pub fn failed_ap_count(&self) -> u32 {
        (self.failure_fraction * f64::from(self.n_aps)).floor() as u32
    }

    /// Total energy budget of one server (E0 per slot).
    pub fn server_energy_capacity(&self) -> f64 {
        self.energy_per_app * f64::from(self.slots_per_server)
    }

    /// Energy decay constant for the degradation bound given the number of
    /// applications currently involved.
    pub fn energy_kappa(&self, app_count: usize) -> f64 {
        if self.paper_literal_decay {
            app_count as f64
        } else {
            self.decay_constant_energy
        }
    }

    pub fn memory_kappa(&self, app_count: usize) -> f64 {
        if self.paper_literal_decay {
            app_count as f64
        } else {
            self.decay_constant_memory
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ScenarioConfig::default().validate().unwrap();
        assert_eq!(cfg.session_steps(), 10);
        assert_eq!(cfg.horizon_steps(), 20);
        assert!((cfg.server_energy_capacity() - 3.37).abs() < 1e-12);
    }

    #[test]
    fn weight_sum_above_one_is_named() {
        let cfg = ScenarioConfig { n1: 0.7, n2: 0.5, ..Default::default() };
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.violations(), &[ConfigViolation::N1N2SumExceedsOne]);
        assert!(err.to_string().contains("n1_n2_sum_exceeds_one"));
    }

    #[test]
    fn non_divisor_step_rejected() {
        let cfg = ScenarioConfig { time_step: 7, ..Default::default() };
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.violations(), &[ConfigViolation::TimeStepNotDivisor]);
    }

    #[test]
    fn zero_counts_all_reported() {
        let cfg = ScenarioConfig {
            n_users: 0,
            n_aps: 0,
            n_gateways: 0,
            n_servers: 0,
            ..Default::default()
        };
        let names: Vec<String> =
            cfg.validate().unwrap_err().violations().iter().map(ToString::to_string).collect();
        for expected in ["n_servers_below_one", "n_gateways_below_one", "n_aps_below_one", "n_users_below_one"] {
            assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
        }
    }

    #[test]
    fn unknown_key_is_hard_error() {
        let err = ScenarioConfig::from_toml_str("n_servers = 10\nlamda = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
        assert!(err.to_string().contains("lamda"));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ScenarioConfig { k_apps: 40, failure_fraction: 0.5, ..Default::default() };
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn memory_must_cover_largest_app() {
        let cfg = ScenarioConfig { mem_initial: 9, ..Default::default() };
        assert_eq!(cfg.validate().unwrap_err().violations(), &[ConfigViolation::MemInitialBelowDemand]);
    }

    #[test]
    fn zero_applications_is_legal() {
        assert!(ScenarioConfig { k_apps: 0, ..Default::default() }.validate().is_ok());
    }
}
