//! Behavioural zones of the (s, p_r) plane, risk dominance and transition graphs.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evolution::EvoResult;
use crate::params::{check_risk, check_speed};
use crate::payoff::PayoffMatrix;

/// Zone I: safety preferred and selected. Zone II: safety preferred but
/// risk-taking selected. Zone III: risk-taking preferred and selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Zone {
    I,
    II,
    III,
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Zone::I => "I",
            Zone::II => "II",
            Zone::III => "III",
        })
    }
}

/// `(1 - 1/s, 1 - 1/(3s))`: the III/II and II/I boundaries in p_r.
pub fn zone_boundaries(unsafe_speed: f64) -> Result<(f64, f64)> {
    check_speed(unsafe_speed)?;
    // (s - 1) / s rounds once, unlike 1 - 1/s.
    let tripled = 3.0 * unsafe_speed;
    Ok((
        (unsafe_speed - 1.0) / unsafe_speed,
        (tripled - 1.0) / tripled,
    ))
}

/// A point exactly on a boundary goes to the safer-leaning zone (II at the
/// lower boundary, I at the upper one).
pub fn classify_zone(unsafe_speed: f64, disaster_risk: f64) -> Result<Zone> {
    check_risk(disaster_risk)?;
    let (lower, upper) = zone_boundaries(unsafe_speed)?;
    Ok(if disaster_risk < lower {
        Zone::III
    } else if disaster_risk < upper {
        Zone::II
    } else {
        Zone::I
    })
}

/// Large-population criterion `pi_AA + pi_AB > pi_BA + pi_BB`. Ties are not dominant.
pub fn risk_dominant(a: usize, b: usize, payoffs: &PayoffMatrix) -> bool {
    payoffs.get(a, a) + payoffs.get(a, b) > payoffs.get(b, a) + payoffs.get(b, b)
}

pub const DEFAULT_NEUTRAL_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub label: String,
    pub stationary: f64,
}

/// Dominant transition between two monomorphic states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    /// Probability that one `to` mutant fixates in an all-`from` population.
    pub rho: f64,
    /// `rho * Z`, the fixation probability in multiples of neutral drift.
    pub neutral_multiple: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    /// Unordered pairs with no clearly stronger direction.
    pub neutral: Vec<(usize, usize)>,
}

pub fn transition_graph(
    result: &EvoResult,
    population: u32,
    rel_tolerance: f64,
) -> TransitionGraph {
    let n = result.labels.len();
    let nodes = result
        .labels
        .iter()
        .zip(&result.stationary)
        .map(|(label, &stationary)| GraphNode {
            label: label.clone(),
            stationary,
        })
        .collect();
    let z = f64::from(population);
    let mut edges = Vec::new();
    let mut neutral = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let forward = result.fixation[a][b];
            let backward = result.fixation[b][a];
            if (forward - backward).abs() <= rel_tolerance * forward.max(backward) {
                neutral.push((a, b));
                continue;
            }
            let (from, to, rho) = if forward > backward {
                (a, b, forward)
            } else {
                (b, a, backward)
            };
            edges.push(GraphEdge {
                from,
                to,
                rho,
                neutral_multiple: rho * z,
            });
        }
    }
    TransitionGraph {
        nodes,
        edges,
        neutral,
    }
}

impl TransitionGraph {
    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges
            .iter()
            .any(|e| self.nodes[e.from].label == from && self.nodes[e.to].label == to)
    }

    /// Graphviz DOT description: nodes carry stationary mass, edges carry
    /// rho and its multiple of neutral fixation.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{name}\" {{");
        for node in &self.nodes {
            let _ = writeln!(
                out,
                "  \"{}\" [stationary={:?}, label=\"{}\\n{:.3}\"];",
                node.label, node.stationary, node.label, node.stationary
            );
        }
        for edge in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [rho={:?}, neutral_multiple={:?}, label=\"{:.2}x\"];",
                self.nodes[edge.from].label,
                self.nodes[edge.to].label,
                edge.rho,
                edge.neutral_multiple,
                edge.neutral_multiple
            );
        }
        for &(a, b) in &self.neutral {
            let _ = writeln!(
                out,
                "  // neutral: \"{}\" -- \"{}\"",
                self.nodes[a].label, self.nodes[b].label
            );
        }
        out.push_str("}\n");
        out
    }
}
