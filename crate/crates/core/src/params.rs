//! Race and population parameters.
//!
//! Every field has a validity domain checked by `validate`. The defaults are
//! the reference baseline (`b = 4`, `c = 1`, `s = 1.5`, `W = 100`, `B = 10^4`,
//! `beta = 1`, `Z = 100`) with a zero commitment cost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Economic constants of one pairwise development race.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaceParams {
    /// Intermediate benefit shared per round (`b`).
    pub benefit: f64,
    /// Per-round cost of complying with safety precautions (`c`).
    pub safety_cost: f64,
    /// Development speed of an UNSAFE round; SAFE speed is 1 (`s`).
    pub unsafe_speed: f64,
    /// Prize for reaching the target first (`B`).
    pub prize: f64,
    /// Expected number of development rounds (`W`).
    pub rounds: u32,
    /// Probability that an UNSAFE developer suffers a disaster (`p_r`).
    pub disaster_risk: f64,
    /// Per-round cost paid by each member of a formed agreement (`epsilon`).
    pub commitment_cost: f64,
    /// Speed the punisher gives up for each punishment (`s_alpha`).
    pub sanction_cost: f64,
    /// Speed removed from a punished player (`s_beta`).
    pub sanction_effect: f64,
}

impl Default for RaceParams {
    fn default() -> Self {
        RaceParams {
            benefit: 4.0,
            safety_cost: 1.0,
            unsafe_speed: 1.5,
            prize: 1.0e4,
            rounds: 100,
            disaster_risk: 0.5,
            commitment_cost: 0.0,
            sanction_cost: 0.3,
            sanction_effect: 1.0,
        }
    }
}

fn non_negative(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            field,
            format!("{field} must be finite and >= 0 (got {value})"),
        ))
    }
}

pub(crate) fn check_speed(value: f64) -> Result<()> {
    if value.is_finite() && value > 1.0 {
        Ok(())
    } else {
        Err(Error::param("s", format!("s must exceed 1 (got {value})")))
    }
}

pub(crate) fn check_risk(value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::param(
            "p_r",
            format!("p_r must lie in [0, 1] (got {value})"),
        ))
    }
}

impl RaceParams {
    pub fn validate(&self) -> Result<()> {
        non_negative("b", self.benefit)?;
        non_negative("c", self.safety_cost)?;
        check_speed(self.unsafe_speed)?;
        non_negative("B", self.prize)?;
        if self.rounds < 1 {
            return Err(Error::param("W", "W must be an integer >= 1"));
        }
        check_risk(self.disaster_risk)?;
        non_negative("epsilon", self.commitment_cost)?;
        non_negative("s_alpha", self.sanction_cost)?;
        non_negative("s_beta", self.sanction_effect)?;
        Ok(())
    }

    /// Survival factor `p = 1 - p_r` applied to UNSAFE payoffs.
    pub fn survival(&self) -> f64 {
        1.0 - self.disaster_risk
    }
}

/// Finite-population dynamics parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvoParams {
    /// Population size (`Z`).
    pub population: u32,
    /// Intensity of selection (`beta`).
    pub selection: f64,
}

impl Default for EvoParams {
    fn default() -> Self {
        EvoParams {
            population: 100,
            selection: 1.0,
        }
    }
}

impl EvoParams {
    pub fn new(population: u32, selection: f64) -> Result<Self> {
        let evo = EvoParams {
            population,
            selection,
        };
        evo.validate()?;
        Ok(evo)
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::param(
                "Z",
                format!("Z must be an integer >= 2 (got {})", self.population),
            ));
        }
        non_negative("beta", self.selection)
    }
}
