//! Many missions in parallel, summarized as one table.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{MissionConfig, WorldSpec};
use super::metrics::MissionSummary;
use super::runner::{run_mission, MissionOutcome};
use crate::error::Error;
use crate::map::{export_map_image, MapOverlay};
use crate::world::Topology;

/// Column headers of the summary table.
pub const COLUMNS: [&str; 11] = ["env", "topology", "size", "seed", "Cov", "Cov-Time", "Coll", "VLM_calls", "Dev", "Steps/1%", "status"];

/// A base configuration crossed with a world list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatchConfig {
    pub base: MissionConfig,
    /// Explicit worlds; when empty the standard ten-world suite is used.
    pub worlds: Vec<WorldSpec>,
}


impl BatchConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn missions(&self) -> Vec<MissionConfig> {
        let worlds = if self.worlds.is_empty() { standard_worlds() } else { self.worlds.clone() };
        worlds
            .into_iter()
            .map(|w| {
                let mut c = self.base.clone();
                c.name = format!("{}{}-s{}", w.topology, w.size, w.seed);
                c.world = w;
                c
            })
            .collect()
    }
}

/// Two worlds per topology, sizes spread over 20–30 m.
pub fn standard_worlds() -> Vec<WorldSpec> {
    Topology::ALL
        .iter()
        .enumerate()
        .flat_map(|(i, &t)| {
            (0..2).map(move |j| {
                let k = 2 * i + j;
                WorldSpec { topology: t, size: 20.0 + (k % 6) as f64 * 2.0, seed: 100 + k as u64, ..WorldSpec::default() }
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchRow {
    pub env: String,
    pub topology: Topology,
    pub size: f64,
    pub seed: u64,
    pub result: Result<MissionSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub rows: Vec<BatchRow>,
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "inf".to_owned(), |x| format!("{x:.digits$}"))
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| s / n as f64)
}

impl BatchReport {
    pub fn succeeded(&self) -> impl Iterator<Item = &MissionSummary> {
        self.rows.iter().filter_map(|r| r.result.as_ref().ok())
    }

    /// Delimited table: one row per mission plus a `mean` row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS).expect("in-memory csv");
        for r in &self.rows {
            let mut rec = vec![r.env.clone(), r.topology.to_string(), format!("{}", r.size), r.seed.to_string()];
            match &r.result {
                Ok(s) => {
                    rec.extend([
                        format!("{:.2}", s.coverage_percent),
                        fmt_opt(s.cov_time, 1),
                        s.collisions.to_string(),
                        s.vlm_calls.to_string(),
                        s.deviations.to_string(),
                        fmt_opt(s.efficiency, 2),
                        "ok".to_owned(),
                    ]);
                }
                Err(e) => {
                    rec.extend(std::iter::repeat_n(String::new(), 6));
                    rec.push(format!("error: {e}"));
                }
            }
            w.write_record(&rec).expect("in-memory csv");
        }
        let ok: Vec<&MissionSummary> = self.succeeded().collect();
        let m = |f: &dyn Fn(&MissionSummary) -> Option<f64>| mean(ok.iter().filter_map(|s| f(s)));
        let agg = [
            "mean".to_owned(),
            String::new(),
            String::new(),
            String::new(),
            fmt_opt(m(&|s| Some(s.coverage_percent)), 2),
            fmt_opt(m(&|s| s.cov_time), 1),
            fmt_opt(m(&|s| Some(s.collisions as f64)), 2),
            fmt_opt(m(&|s| Some(s.vlm_calls as f64)), 1),
            fmt_opt(m(&|s| Some(s.deviations as f64)), 1),
            fmt_opt(m(&|s| s.efficiency), 2),
            format!("{}/{} ok", ok.len(), self.rows.len()),
        ];
        w.write_record(&agg).expect("in-memory csv");
        String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8")
    }
}

/// Writes `<name>.jsonl` and a map image `<name>.ppm` into `dir`.
pub fn save_outcome(outcome: &MissionOutcome, dir: &Path) -> Result<(), Error> {
    let name = &outcome.log.header.config.name;
    outcome.log.save(&dir.join(format!("{name}.jsonl")))?;
    let overlay = MapOverlay {
        robot: outcome.log.poses().last().copied(),
        trajectory: outcome.trajectory.clone(),
        chain: outcome.chain.positions(),
    };
    export_map_image(&outcome.grid, &overlay, 2, &dir.join(format!("{name}.ppm")))
}

/// Runs every mission; one failing mission does not stop the others.
pub fn run_batch(missions: &[MissionConfig], out_dir: Option<&Path>) -> BatchReport {
    if let Some(d) = out_dir {
        let _ = std::fs::create_dir_all(d);
    }
    let rows = missions
        .par_iter()
        .map(|cfg| {
            let result = run_mission(cfg).map_err(|e| e.to_string()).and_then(|o| {
                if let Some(d) = out_dir {
                    save_outcome(&o, d).map_err(|e| format!("writing outputs: {e}"))?;
                }
                Ok(o.summary)
            });
            BatchRow { env: cfg.name.clone(), topology: cfg.world.topology, size: cfg.world.size, seed: cfg.world.seed, result }
        })
        .collect();
    BatchReport { rows }
}
