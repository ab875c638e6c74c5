//! CSV files written by `simulate` and read back by `analyze`.
//!
//! Floats are written in shortest round-trip form, so parsing a file gives
//! back the simulated values bit for bit.

use std::path::Path;

use lipm_gait::{GaitState, Sample, SimTrace, StepRecord};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const TRACE_FILE: &str = "trace.csv";
pub const STEPS_FILE: &str = "steps.csv";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub x_world: f64,
    pub x_rel: f64,
    pub xdot: f64,
    pub cop_world: f64,
    pub fx: f64,
    pub fy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub x_start: f64,
    pub xdot_start: f64,
    pub x_end: f64,
    pub xdot_end: f64,
    pub l_commanded: f64,
    pub l_applied: f64,
    pub clamped: bool,
    pub error_norm: f64,
    pub cop_world: f64,
    pub pushed: bool,
}

impl From<&Sample> for TraceRow {
    fn from(s: &Sample) -> Self {
        Self {
            t: s.t,
            x_world: s.x_world,
            x_rel: s.x_rel,
            xdot: s.xdot,
            cop_world: s.cop_world,
            fx: s.fx,
            fy: s.fy,
        }
    }
}

impl From<&TraceRow> for Sample {
    fn from(r: &TraceRow) -> Self {
        Sample {
            t: r.t,
            x_world: r.x_world,
            x_rel: r.x_rel,
            xdot: r.xdot,
            cop_world: r.cop_world,
            fx: r.fx,
            fy: r.fy,
        }
    }
}

impl From<&StepRecord> for StepRow {
    fn from(s: &StepRecord) -> Self {
        Self {
            index: s.index,
            t_start: s.t_start,
            t_end: s.t_end,
            x_start: s.start_state.x,
            xdot_start: s.start_state.xdot,
            x_end: s.end_state.x,
            xdot_end: s.end_state.xdot,
            l_commanded: s.commanded_length,
            l_applied: s.applied_length,
            clamped: s.clamped,
            error_norm: s.error_norm,
            cop_world: s.cop_world,
            pushed: s.push.is_some(),
        }
    }
}

impl StepRow {
    /// Step record without the push-window detail, which is not persisted.
    pub fn to_record(&self) -> StepRecord {
        StepRecord {
            index: self.index,
            t_start: self.t_start,
            t_end: self.t_end,
            start_state: GaitState::new(self.x_start, self.xdot_start),
            end_state: GaitState::new(self.x_end, self.xdot_end),
            commanded_length: self.l_commanded,
            applied_length: self.l_applied,
            clamped: self.clamped,
            error_norm: self.error_norm,
            cop_world: self.cop_world,
            push: None,
        }
    }
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::io("cannot encode CSV", e))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::io("cannot encode CSV", e))?;
    String::from_utf8(bytes).map_err(|e| CliError::io("cannot encode CSV", e))
}

fn from_csv<T: for<'de> Deserialize<'de>>(text: &str, name: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::Validation(format!("malformed {name}: {e}")))
}

pub fn trace_csv(trace: &SimTrace) -> Result<String> {
    to_csv(trace.samples.iter().map(TraceRow::from))
}

pub fn steps_csv(trace: &SimTrace) -> Result<String> {
    to_csv(trace.steps.iter().map(StepRow::from))
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    from_csv(text, TRACE_FILE)
}

pub fn parse_steps(text: &str) -> Result<Vec<StepRow>> {
    from_csv(text, STEPS_FILE)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))
}

/// File name of the per-step table for one input weight of a comparison run.
pub fn weight_steps_file(r: f64) -> String {
    format!("steps_r{r}.csv")
}

/// Inverse of [`weight_steps_file`].
pub fn weight_from_file_name(name: &str) -> Option<f64> {
    name.strip_prefix("steps_r")?.strip_suffix(".csv")?.parse().ok()
}
