//! Delimited tables and structured records.
//!
//! Tables are comma-separated with a header row and `\n` line endings.
//! Numbers use the shortest decimal form that parses back to the same
//! `f64`, so identical inputs give byte-identical files on every platform.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::abm::AbmResult;
use crate::analysis::Zone;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evolution::EvoResult;
use crate::payoff::PayoffMatrix;
use crate::strategy::Scenario;
use crate::sweep::{ScenarioSweep, SweepSpec};

/// Shortest round-trip decimal representation.
pub fn fmt_num(value: f64) -> String {
    format!("{value:?}")
}

#[derive(Debug, Default)]
struct Table {
    out: String,
}

impl Table {
    fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for cell in cells {
            if !first {
                self.out.push(',');
            }
            self.out.push_str(cell.as_ref());
            first = false;
        }
        self.out.push('\n');
    }
}

/// One row per grid point: axis values, stationary masses, unsafe frequency,
/// zone, and an `error` column when any point failed.
pub fn sweep_table(spec: &SweepSpec, block: &ScenarioSweep) -> String {
    let has_stationary = block.points.iter().any(|p| p.stationary.is_some());
    let has_unsafe = block.points.iter().any(|p| p.unsafe_frequency.is_some());
    let has_zone = block.points.iter().any(|p| p.zone.is_some());
    let has_error = block.points.iter().any(|p| p.error.is_some());

    let mut table = Table::default();
    let mut header: Vec<String> = spec
        .axes
        .iter()
        .map(|a| a.param.key().to_string())
        .collect();
    if has_stationary {
        header.extend(block.labels.iter().cloned());
    }
    if has_unsafe {
        header.push("unsafe_freq".into());
    }
    if has_zone {
        header.push("zone".into());
    }
    if has_error {
        header.push("error".into());
    }
    table.row(&header);

    for point in &block.points {
        let mut cells: Vec<String> = point.coordinates.iter().map(|&v| fmt_num(v)).collect();
        if has_stationary {
            match &point.stationary {
                Some(x) => cells.extend(x.iter().map(|&v| fmt_num(v))),
                None => cells.extend(block.labels.iter().map(|_| String::new())),
            }
        }
        if has_unsafe {
            cells.push(point.unsafe_frequency.map(fmt_num).unwrap_or_default());
        }
        if has_zone {
            cells.push(point.zone.map(|z| z.to_string()).unwrap_or_default());
        }
        if has_error {
            let message = point.error.as_deref().unwrap_or("");
            cells.push(format!("\"{}\"", message.replace('"', "'")));
        }
        table.row(&cells);
    }
    table.out
}

pub fn payoff_table(matrix: &PayoffMatrix) -> String {
    let mut table = Table::default();
    let mut header = vec!["strategy".to_string()];
    header.extend(matrix.labels().iter().cloned());
    table.row(&header);
    for (i, label) in matrix.labels().iter().enumerate() {
        let mut cells = vec![label.clone()];
        cells.extend(matrix.row(i).iter().map(|&v| fmt_num(v)));
        table.row(&cells);
    }
    table.out
}

pub fn stationary_table(result: &EvoResult, scenario: &Scenario) -> String {
    let mut table = Table::default();
    table.row(["strategy", "stationary", "self_play_unsafe"]);
    for ((label, &mass), is_unsafe) in result
        .labels
        .iter()
        .zip(&result.stationary)
        .zip(scenario.unsafe_mask())
    {
        table.row([label.clone(), fmt_num(mass), is_unsafe.to_string()]);
    }
    table.out
}

/// Long-form fixation table: `rho` is the probability that one `to` mutant
/// takes over an all-`from` population.
pub fn fixation_table(result: &EvoResult, population: u32) -> String {
    let mut table = Table::default();
    table.row(["from", "to", "rho", "rho_times_z", "transition"]);
    let n = result.labels.len();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let rho = result.fixation[i][j];
            table.row([
                result.labels[i].clone(),
                result.labels[j].clone(),
                fmt_num(rho),
                fmt_num(rho * f64::from(population)),
                fmt_num(result.markov.get(i, j)),
            ]);
        }
    }
    table.out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZoneRow {
    pub unsafe_speed: f64,
    pub disaster_risk: f64,
    pub zone: Zone,
    pub lower: f64,
    pub upper: f64,
}

pub fn zone_table(rows: &[ZoneRow]) -> String {
    let mut table = Table::default();
    table.row(["s", "p_r", "zone", "lower", "upper"]);
    for r in rows {
        table.row([
            fmt_num(r.unsafe_speed),
            fmt_num(r.disaster_risk),
            r.zone.to_string(),
            fmt_num(r.lower),
            fmt_num(r.upper),
        ]);
    }
    table.out
}

/// Frequencies with the analytic small-mutation distribution alongside.
pub fn abm_table(result: &AbmResult, analytic: &[f64]) -> String {
    let mut table = Table::default();
    table.row(["strategy", "frequency", "analytic"]);
    for ((label, &f), &a) in result.labels.iter().zip(&result.frequencies).zip(analytic) {
        table.row([label.clone(), fmt_num(f), fmt_num(a)]);
    }
    table.out
}

pub fn abm_trace_table(result: &AbmResult) -> String {
    let mut table = Table::default();
    let mut header = vec!["event".to_string()];
    header.extend(result.labels.iter().cloned());
    table.row(&header);
    for point in &result.trace {
        let mut cells = vec![point.event.to_string()];
        cells.extend(point.frequencies.iter().map(|&v| fmt_num(v)));
        table.row(&cells);
    }
    table.out
}

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    kind: &'a str,
    config: &'a RunConfig,
    config_text: String,
    result: &'a T,
}

/// JSON document embedding the complete run configuration for provenance.
pub fn structured_record<T: Serialize>(kind: &str, config: &RunConfig, result: &T) -> String {
    let record = Record {
        kind,
        config,
        config_text: config.to_config_text(),
        result,
    };
    let mut text = serde_json::to_string_pretty(&record).expect("records serialize");
    text.push('\n');
    text
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::Io {
                path: parent.to_path_buf(),
                message: e.to_string(),
            })?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
