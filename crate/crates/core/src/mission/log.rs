//! Line-delimited JSON mission log.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::MissionConfig;
use super::metrics::MissionSummary;
use super::trigger::TriggerCause;
use crate::error::{Error, FormatError};
use crate::planner::{PlannerMode, PlannerResponse};
use crate::raster::Point;
use crate::verifier::{Verdict, VerifyReport};

pub const LOG_SCHEMA: &str = "reefnav-log";
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema: String,
    pub version: u32,
    pub planner: String,
    pub config: MissionConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalSource {
    Initial,
    Centroid { track: u64 },
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    Budget,
    Complete,
    PlannerExhausted,
}

/// Why an answer did not become the goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    Transport,
    Unparseable,
    NoAction,
    NoWaypoint,
    TooClose,
    RequeriesExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    /// State after the control step of `tick`, at time `t`.
    Tick {
        tick: u64,
        t: f64,
        pose: [f64; 3],
        v: f64,
        omega: f64,
        control: [f64; 2],
        goal: Option<Point>,
        mppi_failure: bool,
        collision: bool,
        coverage: f64,
    },
    Trigger {
        tick: u64,
        cause: TriggerCause,
    },
    Query {
        tick: u64,
        query: u64,
        attempt: u32,
        mode: PlannerMode,
        request_pose: [f64; 3],
        chain_len: usize,
        feedback: Option<String>,
        prompt: Option<String>,
    },
    Response {
        tick: u64,
        query: u64,
        latency_ticks: u64,
        text: Option<String>,
        error: Option<String>,
        parsed: Option<PlannerResponse>,
    },
    Verdict {
        tick: u64,
        query: u64,
        waypoint: Option<Point>,
        delivery_pose: [f64; 3],
        /// False when the verdict was only recorded.
        enforced: bool,
        verdict: Verdict,
        report: Option<VerifyReport<f64>>,
    },
    Rejected {
        tick: u64,
        query: u64,
        failure: Failure,
    },
    Goal {
        tick: u64,
        goal: Point,
        source: GoalSource,
        query: Option<u64>,
    },
    Chain {
        tick: u64,
        ids: Vec<u64>,
        positions: Vec<Point>,
    },
    End {
        tick: u64,
        reason: EndReason,
        summary: MissionSummary,
    },
}

impl Record {
    pub fn tick(&self) -> u64 {
        match self {
            Record::Tick { tick, .. }
            | Record::Trigger { tick, .. }
            | Record::Query { tick, .. }
            | Record::Response { tick, .. }
            | Record::Verdict { tick, .. }
            | Record::Rejected { tick, .. }
            | Record::Goal { tick, .. }
            | Record::Chain { tick, .. }
            | Record::End { tick, .. } => *tick,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionLog {
    pub header: LogHeader,
    pub records: Vec<Record>,
}

impl MissionLog {
    pub fn new(config: MissionConfig, planner: &str) -> Self {
        Self {
            header: LogHeader { schema: LOG_SCHEMA.into(), version: LOG_VERSION, planner: planner.into(), config },
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<(), Error> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_from(r: impl BufRead) -> Result<Self, Error> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let (_, first) = lines.next().ok_or_else(|| FormatError::at(1, "empty log"))?;
        let header: LogHeader = serde_json::from_str(&first?).map_err(|e| FormatError::at(1, format!("bad header: {e}")))?;
        if header.schema != LOG_SCHEMA || header.version != LOG_VERSION {
            return Err(FormatError::at(1, format!("unsupported log {} v{}", header.schema, header.version)).into());
        }
        let mut records = Vec::new();
        for (i, line) in lines {
            records.push(serde_json::from_str(&line?).map_err(|e| FormatError::at(i + 1, e.to_string()))?);
        }
        Ok(Self { header, records })
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn ticks(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| matches!(r, Record::Tick { .. }))
    }

    pub fn poses(&self) -> Vec<crate::geometry::Pose2<f64>> {
        self.records
            .iter()
            .filter_map(|r| match r {
                Record::Tick { pose, .. } => Some(crate::geometry::Pose2::new(pose[0], pose[1], pose[2])),
                _ => None,
            })
            .collect()
    }

    pub fn end(&self) -> Option<(EndReason, &MissionSummary)> {
        self.records.iter().rev().find_map(|r| match r {
            Record::End { reason, summary, .. } => Some((*reason, summary)),
            _ => None,
        })
    }

    /// Structural checks: non-decreasing record ticks, strictly increasing tick records and
    /// exactly one preceding query per response.
    pub fn check(&self) -> Result<(), String> {
        let mut last_tick = None;
        let mut last_record_tick = 0;
        let mut open: Option<u64> = None;
        let mut seen_queries = std::collections::HashSet::new();
        for (i, r) in self.records.iter().enumerate() {
            if r.tick() < last_record_tick {
                return Err(format!("record {i}: tick goes backwards"));
            }
            last_record_tick = r.tick();
            match r {
                Record::Tick { tick, .. } => {
                    if last_tick.is_some_and(|t| *tick <= t) {
                        return Err(format!("record {i}: tick {tick} not increasing"));
                    }
                    last_tick = Some(*tick);
                }
                Record::Query { query, .. } => {
                    if open.is_some() {
                        return Err(format!("record {i}: query {query} while another is in flight"));
                    }
                    if !seen_queries.insert(*query) {
                        return Err(format!("record {i}: duplicate query id {query}"));
                    }
                    open = Some(*query);
                }
                Record::Response { query, .. } => {
                    if open != Some(*query) {
                        return Err(format!("record {i}: response to query {query} without a matching query"));
                    }
                    open = None;
                }
                _ => {}
            }
        }
        Ok(())
    }
}
