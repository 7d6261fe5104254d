//! Strategy descriptors and the canonical scenario strategy sets.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Safe,
    Unsafe,
}

/// Which co-players a strategy punishes (peer regime only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PunishScope {
    None,
    /// Punishes an UNSAFE co-player only inside a formed agreement.
    CommittedOnly,
    /// Punishes every UNSAFE co-player.
    AnyUnsafe,
}

/// Behaviour rule of one strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDescriptor {
    pub name: String,
    pub commits: bool,
    pub action_with_agreement: Action,
    pub action_without_agreement: Action,
    pub punish_scope: PunishScope,
}

impl StrategyDescriptor {
    pub fn new(
        name: &str,
        commits: bool,
        action_with_agreement: Action,
        action_without_agreement: Action,
        punish_scope: PunishScope,
    ) -> Result<Self> {
        let descriptor = StrategyDescriptor {
            name: name.to_string(),
            commits,
            action_with_agreement,
            action_without_agreement,
            punish_scope,
        };
        descriptor.validate()?;
        Ok(descriptor)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::InvalidStrategy {
                name: self.name.clone(),
                message: "name must not be empty".into(),
            });
        }
        if self.punish_scope == PunishScope::CommittedOnly && !self.commits {
            return Err(Error::InvalidStrategy {
                name: self.name.clone(),
                message: "punishing committed co-players requires committing".into(),
            });
        }
        Ok(())
    }

    /// Action this strategy takes against a copy of itself.
    ///
    /// `agreements` is whether the scenario allows commitments at all.
    pub fn self_play_action(&self, agreements: bool) -> Action {
        if self.commits && agreements {
            self.action_with_agreement
        } else {
            self.action_without_agreement
        }
    }

    fn fixed(name: &str, commits: bool, with: Action, without: Action, scope: PunishScope) -> Self {
        StrategyDescriptor {
            name: name.to_string(),
            commits,
            action_with_agreement: with,
            action_without_agreement: without,
            punish_scope: scope,
        }
    }
}

/// Sanctioning regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    None,
    Peer,
    Institutional,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::None => "none",
            Regime::Peer => "peer",
            Regime::Institutional => "institutional",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Regime::None),
            "peer" | "pp" => Ok(Regime::Peer),
            "institutional" | "ip" => Ok(Regime::Institutional),
            _ => Err(Error::param(
                "regime",
                format!("regime must be one of none, peer, institutional (got {s})"),
            )),
        }
    }
}

/// A model variant: sanctioning regime, commitment availability and the
/// ordered strategy set. Strategy order fixes matrix indices and output
/// column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub regime: Regime,
    pub commitments_enabled: bool,
    pub fallback_safe: bool,
    strategies: Vec<StrategyDescriptor>,
}

impl Scenario {
    /// Builds a scenario over an arbitrary strategy set.
    pub fn custom(
        regime: Regime,
        commitments_enabled: bool,
        fallback_safe: bool,
        strategies: Vec<StrategyDescriptor>,
    ) -> Result<Self> {
        if strategies.len() < 2 {
            return Err(Error::InvalidScenario(
                "at least two strategies are required".into(),
            ));
        }
        let mut seen = HashSet::new();
        for strategy in &strategies {
            strategy.validate()?;
            if !seen.insert(strategy.name.as_str()) {
                return Err(Error::InvalidScenario(format!(
                    "duplicate strategy name {}",
                    strategy.name
                )));
            }
            if regime != Regime::Peer && strategy.punish_scope != PunishScope::None {
                return Err(Error::InvalidStrategy {
                    name: strategy.name.clone(),
                    message: format!("peer punishment is not available under the {regime} regime"),
                });
            }
        }
        Ok(Scenario {
            regime,
            commitments_enabled,
            fallback_safe,
            strategies,
        })
    }

    pub fn strategies(&self) -> &[StrategyDescriptor] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.strategies.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.strategies.iter().position(|s| s.name == name)
    }

    /// Whether each strategy acts UNSAFE in monomorphic self-play.
    pub fn unsafe_mask(&self) -> Vec<bool> {
        self.strategies
            .iter()
            .map(|s| s.self_play_action(self.commitments_enabled) == Action::Unsafe)
            .collect()
    }

    /// Stable short identifier, e.g. `pp_commit` or `ip`.
    pub fn slug(&self) -> String {
        let base = match self.regime {
            Regime::None => "baseline",
            Regime::Peer => "pp",
            Regime::Institutional => "ip",
        };
        let mut slug = base.to_string();
        if self.commitments_enabled {
            slug.push_str("_commit");
        }
        if self.fallback_safe {
            slug.push_str("_fallback");
        }
        slug
    }
}

/// Canonical strategy set for one of the model variants.
pub fn make_scenario(
    regime: Regime,
    commitments_enabled: bool,
    fallback_safe: bool,
) -> Result<Scenario> {
    use Action::{Safe, Unsafe};

    if fallback_safe && !commitments_enabled {
        return Err(Error::InvalidScenario(
            "fallback_safe requires commitments to be enabled".into(),
        ));
    }
    let fallback = if fallback_safe { Safe } else { Unsafe };
    let as_in = || StrategyDescriptor::fixed("AS_in", true, Safe, fallback, PunishScope::None);
    let as_out = || StrategyDescriptor::fixed("AS_out", false, Safe, Safe, PunishScope::None);
    let au_in = || StrategyDescriptor::fixed("AU_in", true, Unsafe, Unsafe, PunishScope::None);
    let au_out = || StrategyDescriptor::fixed("AU_out", false, Unsafe, Unsafe, PunishScope::None);
    let always_safe = || StrategyDescriptor::fixed("AS", false, Safe, Safe, PunishScope::None);
    let always_unsafe =
        || StrategyDescriptor::fixed("AU", false, Unsafe, Unsafe, PunishScope::None);

    let strategies = match (regime, commitments_enabled) {
        (Regime::None, false) | (Regime::Institutional, false) => {
            vec![always_safe(), always_unsafe()]
        }
        (Regime::Peer, false) => vec![
            always_safe(),
            always_unsafe(),
            StrategyDescriptor::fixed("PS", false, Safe, Safe, PunishScope::AnyUnsafe),
        ],
        (Regime::Peer, true) => vec![
            as_in(),
            as_out(),
            au_in(),
            au_out(),
            StrategyDescriptor::fixed("PS", true, Safe, fallback, PunishScope::CommittedOnly),
        ],
        (Regime::Institutional, true) => vec![as_in(), au_in(), as_out(), au_out()],
        (Regime::None, true) => {
            return Err(Error::InvalidScenario(
                "commitments require a sanctioning regime (peer or institutional)".into(),
            ))
        }
    };
    Scenario::custom(regime, commitments_enabled, fallback_safe, strategies)
}
