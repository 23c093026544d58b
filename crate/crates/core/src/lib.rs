//! Discrete-time simulation of public-safety (PSC) traffic failing over from
//! cellular access points onto a cloud of LoRaWAN sub-network servers.
//!
//! The crate is organised bottom-up:
//!
//! - [`config`] and [`topology`] describe the network and the scenario knobs.
//! - [`model`] holds applications and per-server resource accounting.
//! - [`agreement`] is the self-enforcing agreement calculus (pure functions).
//! - [`metrics`] computes restoration, lifetime, survivability, sustainability
//!   and the link/continuity observables.
//! - [`allocator`] implements decay-based server selection, the equilibrium
//!   test and FCFS allocation with threshold relaxation.
//! - [`sim`] drives everything step by step and records snapshots.
//! - [`report`] writes CSV/JSON trajectories, figure aggregates and manifests.
//! - [`cli`] is the argument layer used by the `lorawan-psc` binary.

pub mod agreement;
pub mod allocator;
pub mod cli;
pub mod config;
pub mod error;
pub mod metrics;
pub mod model;
pub mod report;
pub mod sim;
pub mod topology;

pub use config::ScenarioConfig;
pub use error::SimError;
pub use metrics::MetricsSnapshot;
pub use sim::{run_scenario, RunOutput, Simulation};
pub use topology::{build_topology, Topology};
