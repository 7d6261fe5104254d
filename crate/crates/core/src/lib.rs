//! AI development race with voluntary safety commitments and sanctioning,
//! analysed with finite-population pairwise-comparison dynamics in the
//! small-mutation limit.

pub mod abm;
pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod evolution;
pub mod export;
pub mod params;
pub mod payoff;
pub mod strategy;
pub mod sweep;

pub use error::{Error, Result};
pub use params::{EvoParams, RaceParams};
pub use strategy::{make_scenario, Action, PunishScope, Regime, Scenario, StrategyDescriptor};
