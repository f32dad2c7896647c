use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use reefnav::map::{export_map_image, MapOverlay};
use reefnav::mission::{
    build_planner, diff_summaries, final_chain, replay_grid, run_batch, run_mission_in, save_outcome, summarize_log, BatchConfig, ExecutionMode, MissionConfig,
    MissionLog, MissionSummary, Variant,
};
use reefnav::world::{generate_world, write_world, Topology};

#[derive(Parser)]
#[command(name = "reefnav", version, about = "Reef survey simulator: missions, batches and log tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one mission.
    Run {
        /// Mission TOML; defaults are used when omitted.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long)]
        topology: Option<Topology>,
        #[arg(long)]
        size: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_variant)]
        variant: Option<Variant>,
        #[arg(long)]
        ticks: Option<u64>,
        /// Run the planner on its own thread.
        #[arg(long)]
        threaded: bool,
        /// Directory for the log and map image.
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a batch of missions and print the summary table.
    Batch {
        /// Batch TOML with a `[base]` mission and optional `[[worlds]]`.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(short, long, default_value = "out/batch")]
        out: PathBuf,
    },
    /// Render a map image from a mission log.
    Render {
        log: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        scale: u32,
    },
    /// Recompute metrics from a log and compare with the recorded summary.
    VerifyLog { log: PathBuf },
    /// Generate a world and write it as text.
    World {
        #[arg(long, default_value = "L")]
        topology: Topology,
        #[arg(long, default_value_t = 20.0)]
        size: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|_| {
        format!("unknown variant {s:?} (full, no_verification, no_centroid_select, rule_based, no_low_level, dream)")
    })
}

fn print_summary(name: &str, s: &MissionSummary) {
    let opt = |v: Option<f64>| v.map_or("inf".to_owned(), |x| format!("{x:.2}"));
    println!(
        "{name}: coverage {:.2}% ({}/{}), cov-time {}, collisions {}, planner calls {}, deviations {}, steps {}, steps/% {}, mission time {:.1} s",
        s.coverage_percent,
        s.clusters_covered,
        s.clusters_total,
        opt(s.cov_time),
        s.collisions,
        s.vlm_calls,
        s.deviations,
        s.steps,
        opt(s.efficiency),
        s.mission_time,
    );
}

fn run_cmd(mut cfg: MissionConfig, out: &Path) -> Result<(), String> {
    let world = cfg.world.build().map_err(|e| e.to_string())?;
    if cfg.name == MissionConfig::default().name {
        cfg.name = format!("{}{}-s{}", cfg.world.topology, cfg.world.size, cfg.world.seed);
    }
    let planner = build_planner(&cfg);
    let outcome = run_mission_in(world, &cfg, planner).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(out).map_err(|e| e.to_string())?;
    save_outcome(&outcome, out).map_err(|e| e.to_string())?;
    print_summary(&cfg.name, &outcome.summary);
    println!("ended: {:?}; log and map in {}", outcome.end, out.display());
    Ok(())
}

fn load_log(path: &Path) -> Result<(MissionLog, reefnav::world::WorldModel), String> {
    let log = MissionLog::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let world = log.header.config.world.build().map_err(|e| e.to_string())?;
    Ok((log, world))
}

fn execute(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Run { config, topology, size, seed, variant, ticks, threaded, out } => {
            let mut cfg = match config {
                Some(p) => MissionConfig::load(&p).map_err(|e| e.to_string())?,
                None => MissionConfig::default(),
            };
            if let Some(t) = topology {
                cfg.world.topology = t;
            }
            if let Some(s) = size {
                cfg.world.size = s;
            }
            if let Some(s) = seed {
                cfg.world.seed = s;
                cfg.seed = s;
            }
            if let Some(v) = variant {
                cfg.variant = v;
            }
            if let Some(t) = ticks {
                cfg.tick_budget = t;
            }
            if threaded {
                cfg.execution = ExecutionMode::Threaded;
            }
            cfg.validate().map_err(|e| e.to_string())?;
            run_cmd(cfg, &out)?;
            Ok(true)
        }
        Command::Batch { config, out } => {
            let batch = match config {
                Some(p) => BatchConfig::from_toml(&std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?).map_err(|e| e.to_string())?,
                None => BatchConfig::default(),
            };
            let report = run_batch(&batch.missions(), Some(&out));
            let table = report.to_csv();
            std::fs::write(out.join("summary.csv"), &table).map_err(|e| e.to_string())?;
            print!("{table}");
            Ok(report.rows.iter().all(|r| r.result.is_ok()))
        }
        Command::Render { log, out, scale } => {
            let (log, world) = load_log(&log)?;
            let grid = replay_grid(&log, &world);
            let poses = log.poses();
            let overlay = MapOverlay { robot: poses.last().copied(), trajectory: poses.iter().map(|p| p.position).collect(), chain: final_chain(&log) };
            export_map_image(&grid, &overlay, scale, &out).map_err(|e| e.to_string())?;
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::VerifyLog { log } => {
            let (log, world) = load_log(&log)?;
            log.check()?;
            let recomputed = summarize_log(&log, &world);
            print_summary("recomputed", &recomputed);
            let Some((reason, logged)) = log.end() else {
                println!("log has no end record");
                return Ok(false);
            };
            let diffs = diff_summaries(logged, &recomputed);
            if diffs.is_empty() {
                println!("ok: recorded summary matches ({reason:?})");
                Ok(true)
            } else {
                for d in &diffs {
                    println!("mismatch {d}");
                }
                Ok(false)
            }
        }
        Command::World { topology, size, seed, out } => {
            let text = write_world(&generate_world(topology, size, seed));
            match out {
                Some(p) => std::fs::write(&p, text).map_err(|e| e.to_string())?,
                None => print!("{text}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
