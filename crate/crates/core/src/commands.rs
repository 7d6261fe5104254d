//! Subcommand execution and figure-reproduction presets.
//!
//! Every subcommand is a [`Job`]: a command, a file stem and a complete
//! [`RunConfig`]. `reproduce` expands a figure name into a list of jobs
//! whose configs carry the parameters of that figure.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::abm::abm_run;
use crate::analysis::{classify_zone, transition_graph, zone_boundaries};
use crate::config::{Format, RunConfig};
use crate::error::{Error, Result};
use crate::evolution::{analyse, unsafe_frequency};
use crate::export::{
    abm_table, abm_trace_table, fixation_table, payoff_table, stationary_table, structured_record,
    sweep_table, write_file, zone_table, ZoneRow,
};
use crate::payoff::build_payoff_matrix;
use crate::strategy::Regime;
use crate::sweep::{run_sweep, run_sweep_with_workers, Axis, SweepOutput, SweepParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Zones,
    Payoffs,
    Stationary,
    Sweep,
    Transitions,
    Abm,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Zones => "zones",
            Command::Payoffs => "payoffs",
            Command::Stationary => "stationary",
            Command::Sweep => "sweep",
            Command::Transitions => "transitions",
            Command::Abm => "abm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub command: Command,
    pub stem: String,
    pub config: RunConfig,
}

impl Job {
    pub fn new(command: Command, config: RunConfig) -> Self {
        Job {
            command,
            stem: command.name().to_string(),
            config,
        }
    }
}

/// Zone label of every (s, p_r) pair on the configured grid. Axes over `s`
/// or `p_r` are used when present; otherwise the fixed value is used.
pub fn zone_rows(config: &RunConfig) -> Result<Vec<ZoneRow>> {
    let values = |param: SweepParam, fixed: f64| {
        config
            .axes
            .iter()
            .find(|a| a.param == param)
            .map(Axis::values)
            .unwrap_or_else(|| vec![fixed])
    };
    let speeds = values(SweepParam::UnsafeSpeed, config.race.unsafe_speed);
    let risks = values(SweepParam::DisasterRisk, config.race.disaster_risk);
    let mut rows = Vec::with_capacity(speeds.len() * risks.len());
    for &s in &speeds {
        let (lower, upper) = zone_boundaries(s)?;
        for &p in &risks {
            rows.push(ZoneRow {
                unsafe_speed: s,
                disaster_risk: p,
                zone: classify_zone(s, p)?,
                lower,
                upper,
            });
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct StationaryRecord<'a> {
    result: &'a crate::evolution::EvoResult,
    unsafe_frequency: f64,
}

/// Runs one job and writes its files under `out_dir`. Returns the paths written.
pub fn run_job(job: &Job, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let config = &job.config;
    config.validate()?;
    let mut written = Vec::new();
    let mut emit = |suffix: &str, ext: &str, contents: String| -> Result<()> {
        let path = out_dir.join(format!("{}{suffix}.{ext}", job.stem));
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };
    let json = config.format == Format::Json;

    match job.command {
        Command::Zones => {
            let rows = zone_rows(config)?;
            if json {
                emit("", "json", structured_record("zones", config, &rows))?;
            } else {
                emit("", "csv", zone_table(&rows))?;
            }
        }
        Command::Payoffs => {
            let matrix = build_payoff_matrix(&config.scenario()?, &config.race)?;
            if json {
                emit("", "json", structured_record("payoffs", config, &matrix))?;
            } else {
                emit("", "csv", payoff_table(&matrix))?;
            }
        }
        Command::Stationary | Command::Transitions => {
            let scenario = config.scenario()?;
            let matrix = build_payoff_matrix(&scenario, &config.race)?;
            let result = analyse(&matrix, &config.evo)?;
            if job.command == Command::Transitions {
                let graph = transition_graph(&result, config.evo.population, config.tolerance);
                emit("", "dot", graph.to_dot(&job.stem))?;
            }
            if json {
                let record = StationaryRecord {
                    result: &result,
                    unsafe_frequency: unsafe_frequency(&result.stationary, &scenario),
                };
                emit(
                    "",
                    "json",
                    structured_record(job.command.name(), config, &record),
                )?;
            } else {
                emit("_stationary", "csv", stationary_table(&result, &scenario))?;
                emit(
                    "_fixation",
                    "csv",
                    fixation_table(&result, config.evo.population),
                )?;
            }
        }
        Command::Sweep => {
            let spec = config.sweep_spec()?;
            let result = if config.workers == 0 {
                run_sweep(&spec)?
            } else {
                run_sweep_with_workers(&spec, config.workers)?
            };
            if json {
                emit("", "json", structured_record("sweep", config, &result))?;
            } else {
                for block in &result.blocks {
                    emit(
                        &format!("_{}", block.scenario),
                        "csv",
                        sweep_table(&spec, block),
                    )?;
                }
            }
        }
        Command::Abm => {
            let abm = config.abm_config()?;
            let result = abm_run(&abm)?;
            let analytic = analyse(&build_payoff_matrix(&abm.scenario, &abm.race)?, &abm.evo)?;
            if json {
                #[derive(Serialize)]
                struct AbmRecord<'a> {
                    simulation: &'a crate::abm::AbmResult,
                    analytic: &'a [f64],
                }
                let record = AbmRecord {
                    simulation: &result,
                    analytic: &analytic.stationary,
                };
                emit("", "json", structured_record("abm", config, &record))?;
            } else {
                emit(
                    "_frequencies",
                    "csv",
                    abm_table(&result, &analytic.stationary),
                )?;
                emit("_trace", "csv", abm_trace_table(&result))?;
            }
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    FigA1,
    FigA2,
    FigA3,
    FigA4,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::FigA1,
        Figure::FigA2,
        Figure::FigA3,
        Figure::FigA4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::FigA1 => "figA1",
            Figure::FigA2 => "figA2",
            Figure::FigA3 => "figA3",
            Figure::FigA4 => "figA4",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|fig| fig.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::param(
                    "figure",
                    format!("figure must be one of fig1..fig5, figA1..figA4 (got {s})"),
                )
            })
    }
}

/// Efficient (cheap, strong) and inefficient punishment, as (s_alpha, s_beta).
pub const PUNISHMENT_REGIMES: [(f64, f64); 2] = [(0.3, 1.0), (1.0, 1.0)];

/// p_r of the four columns of the (s_alpha, s_beta) heatmaps. Only 0.6, 0.75
/// and 0.9 are printed with the figure; 0.1 is an assumed zone-III value.
pub const HEATMAP_RISKS: [f64; 4] = [0.1, 0.6, 0.75, 0.9];

/// Transition-graph columns as (p_r, s_alpha, s_beta), one per zone (III,
/// II, I). The per-panel punishment values are assumptions: efficient
/// punishment in zone III, inefficient punishment in zones II and I.
pub const TRANSITION_PANELS: [(f64, f64, f64); 3] =
    [(0.1, 0.3, 1.0), (0.6, 1.0, 1.0), (0.9, 1.0, 1.0)];

fn risk_axis() -> Axis {
    Axis::new(SweepParam::DisasterRisk, 0.0, 1.0, 101)
}

fn speed_axis() -> Axis {
    Axis::new(SweepParam::UnsafeSpeed, 1.05, 5.05, 81)
}

fn punishment_axes() -> Vec<Axis> {
    vec![
        Axis::new(SweepParam::SanctionCost, 0.0, 1.0, 21),
        Axis::new(SweepParam::SanctionEffect, 0.0, 2.0, 41),
    ]
}

fn base(user: &RunConfig) -> RunConfig {
    RunConfig {
        out_dir: user.out_dir.clone(),
        format: user.format,
        workers: user.workers,
        tolerance: user.tolerance,
        ..RunConfig::default()
    }
}

fn peer(user: &RunConfig, commitments: bool, fallback: bool) -> RunConfig {
    RunConfig {
        regime: Regime::Peer,
        commitments,
        fallback_safe: fallback,
        ..base(user)
    }
}

fn risk_sweeps(user: &RunConfig, prefix: &str, selection: Option<f64>, fallback: bool) -> Vec<Job> {
    PUNISHMENT_REGIMES
        .iter()
        .map(|&(cost, effect)| {
            let mut config = peer(user, true, fallback);
            config.compare = true;
            config.race.sanction_cost = cost;
            config.race.sanction_effect = effect;
            config.axes = vec![risk_axis()];
            if let Some(beta) = selection {
                config.evo.selection = beta;
            }
            Job {
                command: Command::Sweep,
                stem: format!("{prefix}_sa{cost}_sb{effect}"),
                config,
            }
        })
        .collect()
}

fn heatmaps(user: &RunConfig, prefix: &str, selection: Option<f64>, compare: bool) -> Vec<Job> {
    HEATMAP_RISKS
        .iter()
        .map(|&risk| {
            let mut config = peer(user, true, false);
            config.compare = compare;
            config.race.disaster_risk = risk;
            config.axes = punishment_axes();
            config.outputs = vec![SweepOutput::UnsafeFrequency];
            if let Some(beta) = selection {
                config.evo.selection = beta;
            }
            Job {
                command: Command::Sweep,
                stem: format!("{prefix}_pr{risk}"),
                config,
            }
        })
        .collect()
}

fn transition_panels(user: &RunConfig, prefix: &str, fallback: bool) -> Vec<Job> {
    let mut jobs = Vec::new();
    for (row, commitments) in [(0, true), (3, false)] {
        for (k, &(risk, cost, effect)) in TRANSITION_PANELS.iter().enumerate() {
            let mut config = peer(user, commitments, fallback && commitments);
            config.race.disaster_risk = risk;
            config.race.sanction_cost = cost;
            config.race.sanction_effect = effect;
            // panels a-c with commitments, d-f without
            let letter = (b'a' + (row + k) as u8) as char;
            jobs.push(Job {
                command: Command::Transitions,
                stem: format!("{prefix}_{letter}"),
                config,
            });
        }
    }
    jobs
}

/// Jobs regenerating the data behind one figure.
pub fn preset(figure: Figure, user: &RunConfig) -> Vec<Job> {
    match figure {
        Figure::Fig1 => {
            let mut config = base(user);
            config.axes = vec![speed_axis(), risk_axis()];
            vec![Job {
                command: Command::Zones,
                stem: "fig1_zones".into(),
                config,
            }]
        }
        Figure::Fig2 => risk_sweeps(user, "fig2", None, false),
        Figure::Fig3 => transition_panels(user, "fig3", false),
        Figure::Fig4 => heatmaps(user, "fig4", None, true),
        Figure::Fig5 => [1.0, 0.5]
            .iter()
            .map(|&effect| {
                let mut config = RunConfig {
                    regime: Regime::Institutional,
                    commitments: true,
                    compare: true,
                    axes: vec![speed_axis(), risk_axis()],
                    outputs: vec![SweepOutput::UnsafeFrequency, SweepOutput::Zone],
                    ..base(user)
                };
                config.race.sanction_effect = effect;
                Job {
                    command: Command::Sweep,
                    stem: format!("fig5_sb{effect}"),
                    config,
                }
            })
            .collect(),
        Figure::FigA1 => [0.1, 10.0]
            .iter()
            .flat_map(|&beta| risk_sweeps(user, &format!("figA1_beta{beta}"), Some(beta), false))
            .collect(),
        Figure::FigA2 => [0.1, 10.0]
            .iter()
            .flat_map(|&beta| heatmaps(user, &format!("figA2_beta{beta}"), Some(beta), false))
            .collect(),
        Figure::FigA3 => risk_sweeps(user, "figA3", None, true),
        Figure::FigA4 => transition_panels(user, "figA4", true),
    }
}

/// Runs every job of a figure preset into `out_dir`.
pub fn reproduce(figure: Figure, user: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for job in preset(figure, user) {
        written.extend(run_job(&job, out_dir)?);
    }
    Ok(written)
}
