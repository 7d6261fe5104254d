//! Deterministic one- and two-dimensional parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify_zone, Zone};
use crate::error::{Error, Result};
use crate::evolution::{analyse, unsafe_frequency};
use crate::params::{EvoParams, RaceParams};
use crate::payoff::build_payoff_matrix;
use crate::strategy::Scenario;

/// Parameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    DisasterRisk,
    UnsafeSpeed,
    SanctionCost,
    SanctionEffect,
    Selection,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::DisasterRisk => "p_r",
            SweepParam::UnsafeSpeed => "s",
            SweepParam::SanctionCost => "s_alpha",
            SweepParam::SanctionEffect => "s_beta",
            SweepParam::Selection => "beta",
        }
    }

    fn apply(self, value: f64, race: &mut RaceParams, evo: &mut EvoParams) {
        match self {
            SweepParam::DisasterRisk => race.disaster_risk = value,
            SweepParam::UnsafeSpeed => race.unsafe_speed = value,
            SweepParam::SanctionCost => race.sanction_cost = value,
            SweepParam::SanctionEffect => race.sanction_effect = value,
            SweepParam::Selection => evo.selection = value,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p_r" => Ok(SweepParam::DisasterRisk),
            "s" => Ok(SweepParam::UnsafeSpeed),
            "s_alpha" => Ok(SweepParam::SanctionCost),
            "s_beta" => Ok(SweepParam::SanctionEffect),
            "beta" => Ok(SweepParam::Selection),
            _ => Err(Error::param(
                "axis",
                format!("sweep parameter must be one of p_r, s, s_alpha, s_beta, beta (got {s})"),
            )),
        }
    }
}

/// Evenly spaced axis with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(param: SweepParam, min: f64, max: f64, points: usize) -> Self {
        Axis {
            param,
            min,
            max,
            points,
        }
    }

    /// Value of grid point `i`, interpolated from the endpoints.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.max
        } else {
            self.min + (self.max - self.min) * (i as f64 / (self.points - 1) as f64)
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    fn validate(&self) -> Result<()> {
        let key = self.param.key();
        if self.points < 2 {
            return Err(Error::param(key, "axis needs at least 2 points"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(Error::param(
                key,
                format!("axis range [{}, {}] is not ordered", self.min, self.max),
            ));
        }
        let ok = |v: f64| match self.param {
            SweepParam::DisasterRisk => (0.0..=1.0).contains(&v),
            SweepParam::UnsafeSpeed => v > 1.0,
            _ => v >= 0.0,
        };
        if !ok(self.min) || !ok(self.max) {
            let domain = match self.param {
                SweepParam::DisasterRisk => "[0, 1]",
                SweepParam::UnsafeSpeed => "(1, inf)",
                _ => "[0, inf)",
            };
            return Err(Error::param(
                key,
                format!(
                    "axis range [{}, {}] leaves {key}'s domain {domain}",
                    self.min, self.max
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepOutput {
    Stationary,
    UnsafeFrequency,
    Zone,
}

impl FromStr for SweepOutput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stationary" => Ok(SweepOutput::Stationary),
            "unsafe_frequency" => Ok(SweepOutput::UnsafeFrequency),
            "zone" => Ok(SweepOutput::Zone),
            _ => Err(Error::param(
                "outputs",
                format!("output must be one of stationary, unsafe_frequency, zone (got {s})"),
            )),
        }
    }
}

impl SweepOutput {
    pub fn key(self) -> &'static str {
        match self {
            SweepOutput::Stationary => "stationary",
            SweepOutput::UnsafeFrequency => "unsafe_frequency",
            SweepOutput::Zone => "zone",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// One scenario, or two for a with/without-commitment comparison.
    pub scenarios: Vec<Scenario>,
    pub axes: Vec<Axis>,
    pub race: RaceParams,
    pub evo: EvoParams,
    pub outputs: Vec<SweepOutput>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() || self.scenarios.len() > 2 {
            return Err(Error::InvalidScenario(
                "a sweep takes one or two scenarios".into(),
            ));
        }
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::param("axes", "a sweep takes one or two axes"));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::param(
                "axes",
                "the two axes must sweep different parameters",
            ));
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        Ok(())
    }

    pub fn grid_len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    /// Coordinates of grid point `index`; the first axis varies slowest.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut coords = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            coords[k] = axis.value(rest % axis.points);
            rest /= axis.points;
        }
        coords
    }

    fn wants(&self, output: SweepOutput) -> bool {
        self.outputs.contains(&output)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub coordinates: Vec<f64>,
    pub stationary: Option<Vec<f64>>,
    pub unsafe_frequency: Option<f64>,
    pub zone: Option<Zone>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSweep {
    pub scenario: String,
    pub labels: Vec<String>,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub blocks: Vec<ScenarioSweep>,
}

fn evaluate(spec: &SweepSpec, scenario: &Scenario, coordinates: Vec<f64>) -> SweepPoint {
    let mut race = spec.race;
    let mut evo = spec.evo;
    for (axis, &value) in spec.axes.iter().zip(&coordinates) {
        axis.param.apply(value, &mut race, &mut evo);
    }
    let mut point = SweepPoint {
        coordinates,
        stationary: None,
        unsafe_frequency: None,
        zone: None,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        if spec.wants(SweepOutput::Zone) {
            point.zone = Some(classify_zone(race.unsafe_speed, race.disaster_risk)?);
        }
        if spec.wants(SweepOutput::Stationary) || spec.wants(SweepOutput::UnsafeFrequency) {
            let payoffs = build_payoff_matrix(scenario, &race)?;
            let result = analyse(&payoffs, &evo)?;
            if spec.wants(SweepOutput::UnsafeFrequency) {
                point.unsafe_frequency = Some(unsafe_frequency(&result.stationary, scenario));
            }
            if spec.wants(SweepOutput::Stationary) {
                point.stationary = Some(result.stationary);
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        point.error = Some(e.to_string());
    }
    point
}

/// Runs the sweep on the global rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let blocks = spec
        .scenarios
        .iter()
        .map(|scenario| ScenarioSweep {
            scenario: scenario.slug(),
            labels: scenario.names().iter().map(|s| s.to_string()).collect(),
            points: (0..spec.grid_len())
                .into_par_iter()
                .map(|i| evaluate(spec, scenario, spec.coordinates(i)))
                .collect(),
        })
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        blocks,
    })
}

/// Runs the sweep on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidScenario(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}
