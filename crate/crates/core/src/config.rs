//! Run configuration: flat `key = value` text with `#` comments.
//!
//! Keys match the model symbols (`b`, `c`, `s`, `B`, `W`, `p_r`, `epsilon`,
//! `s_alpha`, `s_beta`, `Z`, `beta`) plus scenario, sweep, ABM and output
//! settings. Keys are case-sensitive; unknown keys are errors. The same
//! `key=value` form is accepted as command-line overrides.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::abm::AbmConfig;
use crate::analysis::DEFAULT_NEUTRAL_TOLERANCE;
use crate::error::{Error, Result};
use crate::params::{EvoParams, RaceParams};
use crate::strategy::{make_scenario, Regime, Scenario};
use crate::sweep::{Axis, SweepOutput, SweepParam, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::param(
                "format",
                format!("format must be csv or json (got {s})"),
            )),
        }
    }
}

impl Format {
    pub fn key(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub regime: Regime,
    pub commitments: bool,
    pub fallback_safe: bool,
    /// Also evaluate the same regime without commitments (sweeps only).
    pub compare: bool,
    pub race: RaceParams,
    pub evo: EvoParams,
    pub axes: Vec<Axis>,
    pub outputs: Vec<SweepOutput>,
    /// Relative tolerance below which a transition pair counts as neutral.
    pub tolerance: f64,
    pub mu: f64,
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub trace_points: usize,
    pub out_dir: String,
    pub format: Format,
    /// Worker threads for sweeps; 0 uses every core.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            regime: Regime::None,
            commitments: false,
            fallback_safe: false,
            compare: false,
            race: RaceParams::default(),
            evo: EvoParams::default(),
            axes: vec![Axis::new(SweepParam::DisasterRisk, 0.0, 1.0, 101)],
            outputs: vec![SweepOutput::Stationary, SweepOutput::UnsafeFrequency],
            tolerance: DEFAULT_NEUTRAL_TOLERANCE,
            mu: 1e-3,
            steps: 10_000_000,
            burn_in: 100_000,
            seed: 1,
            trace_points: 100,
            out_dir: "out".to_string(),
            format: Format::Csv,
            workers: 0,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::param(key, format!("{key} expects a number (got {value:?})")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::param(
            key,
            format!("{key} expects true or false (got {value:?})"),
        )),
    }
}

fn parse_axis(key: &str, value: &str) -> Result<Axis> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::param(
            key,
            format!("{key} expects param:min:max:points (got {value:?})"),
        ));
    }
    Ok(Axis::new(
        parts[0].parse()?,
        parse_num(key, parts[1])?,
        parse_num(key, parts[2])?,
        parse_num(key, parts[3])?,
    ))
}

fn format_axis(axis: &Axis) -> String {
    format!(
        "{}:{:?}:{:?}:{}",
        axis.param, axis.min, axis.max, axis.points
    )
}

impl RunConfig {
    /// Sets one key. Values are checked for syntax only; see [`RunConfig::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "regime" => self.regime = value.parse()?,
            "commitments" => self.commitments = parse_bool(key, value)?,
            "fallback_safe" => self.fallback_safe = parse_bool(key, value)?,
            "compare" => self.compare = parse_bool(key, value)?,
            "b" => self.race.benefit = parse_num(key, value)?,
            "c" => self.race.safety_cost = parse_num(key, value)?,
            "s" => self.race.unsafe_speed = parse_num(key, value)?,
            "B" => self.race.prize = parse_num(key, value)?,
            "W" => self.race.rounds = parse_num(key, value)?,
            "p_r" => self.race.disaster_risk = parse_num(key, value)?,
            "epsilon" => self.race.commitment_cost = parse_num(key, value)?,
            "s_alpha" => self.race.sanction_cost = parse_num(key, value)?,
            "s_beta" => self.race.sanction_effect = parse_num(key, value)?,
            "Z" => self.evo.population = parse_num(key, value)?,
            "beta" => self.evo.selection = parse_num(key, value)?,
            "axis1" => {
                let axis = parse_axis(key, value)?;
                if self.axes.is_empty() {
                    self.axes.push(axis);
                } else {
                    self.axes[0] = axis;
                }
            }
            "axis2" => {
                if value.is_empty() || value == "none" {
                    self.axes.truncate(1);
                } else {
                    let axis = parse_axis(key, value)?;
                    if self.axes.is_empty() {
                        return Err(Error::param(key, "axis2 requires axis1"));
                    }
                    self.axes.truncate(1);
                    self.axes.push(axis);
                }
            }
            "outputs" => {
                self.outputs = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?;
            }
            "tolerance" => self.tolerance = parse_num(key, value)?,
            "mu" => self.mu = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "burn_in" => self.burn_in = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "trace_points" => self.trace_points = parse_num(key, value)?,
            "out_dir" => self.out_dir = value.to_string(),
            "format" => self.format = value.parse()?,
            "workers" => self.workers = parse_num(key, value)?,
            _ => return Err(Error::param(key, format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` overrides, e.g. from the command line.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for raw in overrides {
            let raw = raw.as_ref();
            let (key, value) = raw.split_once('=').ok_or_else(|| {
                Error::param(
                    raw,
                    format!("override {raw:?} is not of the form key=value"),
                )
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.race.validate()?;
        self.evo.validate()?;
        self.scenario()?;
        if self.compare && !self.commitments {
            return Err(Error::param("compare", "compare requires commitments=true"));
        }
        self.sweep_spec()?.validate()?;
        if self.outputs.is_empty() {
            return Err(Error::param("outputs", "at least one output is required"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::param(
                "tolerance",
                format!("tolerance must be > 0 (got {})", self.tolerance),
            ));
        }
        self.abm_config()?.validate()?;
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario> {
        make_scenario(self.regime, self.commitments, self.fallback_safe)
    }

    /// The no-commitment counterpart of the configured regime.
    pub fn baseline_scenario(&self) -> Result<Scenario> {
        make_scenario(self.regime, false, false)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let mut scenarios = vec![self.scenario()?];
        if self.compare {
            scenarios.push(self.baseline_scenario()?);
        }
        Ok(SweepSpec {
            scenarios,
            axes: self.axes.clone(),
            race: self.race,
            evo: self.evo,
            outputs: self.outputs.clone(),
        })
    }

    pub fn abm_config(&self) -> Result<AbmConfig> {
        Ok(AbmConfig {
            scenario: self.scenario()?,
            race: self.race,
            evo: self.evo,
            mutation: self.mu,
            steps: self.steps,
            burn_in: self.burn_in,
            seed: self.seed,
            trace_points: self.trace_points,
        })
    }

    /// Serializes every key in a fixed order; [`parse_config`] reads it back exactly.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        let mut line = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        line("regime", self.regime.to_string());
        line("commitments", self.commitments.to_string());
        line("fallback_safe", self.fallback_safe.to_string());
        line("compare", self.compare.to_string());
        line("b", format!("{:?}", self.race.benefit));
        line("c", format!("{:?}", self.race.safety_cost));
        line("s", format!("{:?}", self.race.unsafe_speed));
        line("B", format!("{:?}", self.race.prize));
        line("W", self.race.rounds.to_string());
        line("p_r", format!("{:?}", self.race.disaster_risk));
        line("epsilon", format!("{:?}", self.race.commitment_cost));
        line("s_alpha", format!("{:?}", self.race.sanction_cost));
        line("s_beta", format!("{:?}", self.race.sanction_effect));
        line("Z", self.evo.population.to_string());
        line("beta", format!("{:?}", self.evo.selection));
        line(
            "axis1",
            self.axes.first().map(format_axis).unwrap_or_default(),
        );
        line(
            "axis2",
            self.axes
                .get(1)
                .map(format_axis)
                .unwrap_or_else(|| "none".into()),
        );
        line(
            "outputs",
            self.outputs
                .iter()
                .map(|o| o.key())
                .collect::<Vec<_>>()
                .join(","),
        );
        line("tolerance", format!("{:?}", self.tolerance));
        line("mu", format!("{:?}", self.mu));
        line("steps", self.steps.to_string());
        line("burn_in", self.burn_in.to_string());
        line("seed", self.seed.to_string());
        line("trace_points", self.trace_points.to_string());
        line("out_dir", self.out_dir.clone());
        line("format", self.format.key().to_string());
        line("workers", self.workers.to_string());
        out
    }
}

/// Parses configuration text on top of the defaults, without validating.
pub fn parse_config_unchecked(text: &str) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    for (number, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line: number + 1,
            message: format!("expected key = value, got {content:?}"),
        })?;
        config
            .set(key.trim(), value.trim())
            .map_err(|e| Error::Config {
                line: number + 1,
                message: e.to_string(),
            })?;
    }
    Ok(config)
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config = parse_config_unchecked(text)?;
    config.validate()?;
    Ok(config)
}
