use std::io::{Read, Write};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::oracle::OracleReport;
use crate::error::Result;
use crate::planner::{Event, ExecutedSample, MissionOutcome, MissionStatus};

pub const TRAJECTORY_COLUMNS: [&str; 12] =
    ["t", "mode", "px", "py", "pz", "vx", "vy", "vz", "ux", "uy", "uz", "event"];

/// One line of `trajectory.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub mode: String,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
    pub event: String,
}

impl TrajectoryRow {
    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.px, self.py, self.pz)
    }
}

impl From<&ExecutedSample> for TrajectoryRow {
    fn from(s: &ExecutedSample) -> Self {
        let (p, v, u) = (s.state.p, s.state.v, s.input);
        Self {
            t: s.t,
            mode: s.mode.label().to_string(),
            px: p.x,
            py: p.y,
            pz: p.z,
            vx: v.x,
            vy: v.y,
            vz: v.z,
            ux: u.x,
            uy: u.y,
            uz: u.z,
            event: s.event.clone(),
        }
    }
}

pub fn write_trajectory_csv<W: Write>(w: W, rows: &[ExecutedSample]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(TrajectoryRow::from(r))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(r: R) -> Result<Vec<TrajectoryRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<TrajectoryRow>, _>>()?;
    Ok(rows)
}

#[derive(Serialize)]
struct EventRow<'a> {
    tick: u64,
    t: f64,
    mode: &'a str,
    event: &'a str,
    detail: String,
}

/// Full event log; `detail` holds the event payload as JSON.
pub fn write_events_csv<W: Write>(w: W, events: &[Event]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for e in events {
        out.serialize(EventRow {
            tick: e.tick,
            t: e.t,
            mode: e.mode.label(),
            event: e.kind.name(),
            detail: serde_json::to_string(&e.kind)?,
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Contents of `outcome.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    #[serde(flatten)]
    pub status: MissionStatus,
    pub executed_samples: usize,
    pub feasible_samples: usize,
    pub lookaheads: usize,
    pub mode_switches: usize,
    pub oracle_violations: usize,
    pub min_clearance: f64,
}

impl OutcomeSummary {
    pub fn new(outcome: &MissionOutcome, oracle: &OracleReport) -> Self {
        Self {
            status: outcome.status,
            executed_samples: outcome.executed.len(),
            feasible_samples: outcome.feasible.len(),
            lookaheads: outcome.lookaheads.len(),
            mode_switches: outcome
                .events
                .iter()
                .filter(|e| e.kind.name() == "mode_switch")
                .count(),
            oracle_violations: oracle.violations,
            min_clearance: oracle.min_clearance,
        }
    }
}
