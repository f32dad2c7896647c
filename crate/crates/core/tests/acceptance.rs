//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reefnav::chain::{connected_components, order_chain, path_cost, CentroidTracker, TrackerConfig};
use reefnav::control::DdpSchedule;
use reefnav::geometry::Pose2;
use reefnav::mission::{
    efficiency, mission_time, run_batch, run_mission_in, standard_worlds, EndReason, ExecutionMode, MissionConfig, MissionLog, Record, TimeMode,
};
use reefnav::planner::{PlannerResponse, RemoteConfig, ScriptedPlanner, VlmPlanner};
use reefnav::verifier::{verify, FailureMode, VerifyContext, WaypointKind};
use reefnav::{Point, VerifierConfig};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg.into()) }
}

fn schedule_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for &p in &[0.5, 1.0, 2.0, 3.0] {
        for &steps in &[5usize, 10, 50] {
            let s = DdpSchedule { horizon: 3.0, steps, exponent: p, boundary_points: 16 };
            let sum: f64 = (0..steps).map(|t| s.interval(t).unwrap()).sum();
            worst = worst.max((sum - 3.0).abs());
            ensure((sum - 3.0).abs() < 1e-9, format!("p={p} T={steps}: sum {sum}"))?;
            ensure(s.boundary_points_at(0).unwrap() == 16, format!("p={p} T={steps}: N_0"))?;
            let n: Vec<usize> = (0..steps).map(|t| s.boundary_points_at(t).unwrap()).collect();
            ensure(n.windows(2).all(|w| w[1] <= w[0]), format!("p={p} T={steps}: N_t increases"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, format!("took {secs:.2} s"))?;
    Ok(format!("12 schedules, max |ΣΔ−T| = {worst:.1e}, {secs:.3} s"))
}

fn ccl_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..200 {
        let (w, h) = (64, 64);
        let density = rng.random_range(0.2..0.65);
        let mask: Vec<bool> = (0..w * h).map(|_| rng.random_bool(density)).collect();
        let ours: Vec<Vec<usize>> = connected_components(&mask, w, h, 1)
            .iter()
            .map(|r| {
                let mut v: Vec<usize> = r.cells.iter().map(|c| c.row as usize * w + c.col as usize).collect();
                v.sort_unstable();
                v
            })
            .collect();
        ensure(ours == common::flood_fill(&mask, w, h, 1), format!("mask {case} differs"))?;
    }
    let mut blob = vec![false; 32 * 32];
    for i in 0..99 {
        blob[(2 + i / 11) * 32 + 3 + i % 11] = true;
    }
    ensure(connected_components(&blob, 32, 32, 100).is_empty(), "99-cell blob kept at A_min = 100")?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, format!("took {secs:.2} s"))?;
    Ok(format!("200 masks identical, 99-cell blob filtered, {secs:.2} s"))
}

fn chain_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst: f64 = 1.0;
    for case in 0..100 {
        let n = rng.random_range(1..=8);
        let pts: Vec<Point> = (0..n).map(|_| Point::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0))).collect();
        let order = order_chain(&pts);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        ensure(sorted == (0..n).collect::<Vec<_>>(), format!("set {case}: not a permutation"))?;
        let opt = common::optimal_open_path(&pts);
        let ours = path_cost(&pts, &order);
        if opt > 0.0 {
            worst = worst.max(ours / opt);
        }
        ensure(ours <= 2.0 * opt + 1e-9, format!("set {case}: {ours:.3} > 2 × {opt:.3}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, format!("took {secs:.2} s"))?;
    Ok(format!("100 sets, worst ratio {worst:.3}, {secs:.2} s"))
}

fn tracker_properties() -> Outcome {
    let cfg = TrackerConfig { alpha_old: 0.7, d_merge: 1.5, max_misses: 30 };
    let mut t = CentroidTracker::new(cfg).unwrap();
    t.update(&[Point::new(0.0, 0.0)]);
    let target = Point::new(0.9, -0.6);
    let mut err = t.tracks()[0].position.distance(target);
    let mut worst: f64 = 0.0;
    for step in 0..15 {
        t.update(&[target]);
        let e = t.tracks()[0].position.distance(target);
        worst = worst.max((e / err - 0.7).abs());
        ensure((e / err - 0.7).abs() < 1e-12, format!("step {step}: ratio {}", e / err))?;
        err = e;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let dcfg = TrackerConfig::default();
    for seq in 0..10 {
        let mut t = CentroidTracker::new(dcfg).unwrap();
        let anchors: Vec<Point> = (0..5).map(|k| Point::new(k as f64 * 6.0, rng.random_range(-1.0..1.0))).collect();
        t.update(&anchors);
        let ids: Vec<u64> = t.tracks().iter().map(|tr| tr.id).collect();
        for frame in 0..100 {
            let pts: Vec<Point> = anchors
                .iter()
                .map(|&p| p + Point::from_angle(rng.random_range(0.0..std::f64::consts::TAU)) * rng.random_range(0.0..dcfg.d_merge / 2.0 * 0.999))
                .collect();
            t.update(&pts);
            let now: Vec<u64> = t.tracks().iter().map(|tr| tr.id).collect();
            ensure(now == ids, format!("sequence {seq} frame {frame}: ids changed"))?;
        }
    }
    Ok(format!("max ratio error {worst:.1e}; ids stable over 10 × 100 frames"))
}

fn verifier_geometry() -> Outcome {
    use FailureMode::{BehindPrev, BehindRobot, Deviated};
    const OK: FailureMode = FailureMode::None;
    let cfg = VerifierConfig::default();
    let p = Point::new;
    let origin = Pose2::new(0.0, 0.0, 0.0);
    let ahead = vec![p(5.0, 0.0), p(9.0, 0.0)];
    let at = |deg: f64, r: f64| p(r * deg.to_radians().cos(), r * deg.to_radians().sin());
    // (request pose, delivery pose, previous, chain, explored cells, waypoint, expected)
    #[allow(clippy::type_complexity)]
    let cases: Vec<(&str, reefnav::Pose, reefnav::Pose, Option<Point>, Vec<Point>, usize, Point, FailureMode)> = vec![
        ("ahead", origin, origin, None, ahead.clone(), 1000, p(5.0, 0.0), OK),
        ("behind", origin, origin, None, ahead.clone(), 1000, p(-3.0, 0.0), BehindRobot),
        ("95° small map", origin, origin, None, ahead.clone(), 499, at(95.0, 3.0), OK),
        ("95° deviated", origin, origin, None, ahead.clone(), 1000, at(95.0, 3.0), Deviated),
        ("105° behind", origin, origin, None, ahead.clone(), 1000, at(105.0, 3.0), BehindRobot),
        ("request pose", Pose2::new(0.0, 0.0, std::f64::consts::PI), origin, None, ahead.clone(), 1000, p(3.0, 0.0), BehindRobot),
        ("delivery pose", origin, Pose2::new(6.0, 0.0, 0.0), None, ahead.clone(), 1000, p(4.0, 1.0), BehindRobot),
        ("behind previous", origin, origin, Some(p(4.0, 0.0)), ahead.clone(), 1000, p(2.0, 0.5), BehindPrev),
        ("d_exempt", origin, origin, Some(p(7.0, 0.0)), ahead.clone(), 1000, p(0.5, 0.3), OK),
        ("no forward centroid", origin, origin, Some(p(4.0, 0.0)), vec![p(-5.0, 0.0)], 1000, p(2.0, 0.5), OK),
        ("empty chain", origin, origin, Some(p(4.0, 0.0)), vec![], 1000, p(0.0, 3.0), OK),
        ("wide previous angle", origin, origin, Some(p(4.0, 0.0)), ahead.clone(), 1000, p(4.0, 3.0), OK),
        ("zero progress", origin, origin, Some(p(5.0, 0.0)), ahead.clone(), 1000, p(5.0, 0.0), BehindPrev),
        ("71° right", origin, origin, None, ahead.clone(), 1000, p(1.0, -3.0), OK),
        ("80° right", origin, origin, None, ahead.clone(), 1000, p(0.5, -3.0), Deviated),
        ("coincide skip", origin, origin, None, vec![p(1.5, 2.5)], 1000, p(1.5, 2.5), OK),
        ("rearward trend", origin, origin, None, vec![p(-4.0, 0.5)], 1000, p(0.5, 2.5), Deviated),
        ("outside band", origin, origin, None, vec![p(5.0, 4.0)], 1000, p(0.5, 3.0), OK),
        ("too close ahead", origin, origin, None, vec![p(0.5, 0.0)], 1000, p(0.5, 3.0), OK),
        ("previous reached", origin, origin, Some(p(-0.2, -0.05)), ahead.clone(), 1000, p(2.0, 0.5), OK),
        ("rotated frame", Pose2::new(10.0, 10.0, std::f64::consts::FRAC_PI_2), Pose2::new(10.0, 10.0, std::f64::consts::FRAC_PI_2), None, vec![p(10.0, 15.0)], 1000, p(10.0, 7.0), BehindRobot),
    ];
    for (name, req, del, prev, chain, cells, wp, expect) in &cases {
        let ctx = VerifyContext { request_pose: *req, delivery_pose: *del, previous: *prev, chain, map_cells_seen: *cells, kind: WaypointKind::Centroid };
        let got = verify(*wp, &ctx, &cfg).verdict.failure_mode;
        ensure(got == *expect, format!("{name}: {got:?}, expected {expect:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..1000 {
        let mut pt = |s: f64| p(rng.random_range(-s..s), rng.random_range(-s..s));
        let req = Pose2 { position: pt(5.0), heading: 0.0 };
        let del = Pose2 { position: req.position + pt(1.5), heading: 0.0 };
        let prev = req.position + pt(6.0);
        let wp = req.position + pt(6.0);
        let chain: Vec<Point> = (0..4).map(|_| req.position + pt(8.0)).collect();
        let (mut req, mut del) = (req, del);
        req.heading = rng.random_range(-3.1..3.1);
        del.heading = req.heading + rng.random_range(-0.8..0.8);
        let rot = rng.random_range(-10.0..10.0);
        let shift = p(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let m = |q: Point| q.rotated(rot) + shift;
        let mp = |q: reefnav::Pose| Pose2 { position: m(q.position), heading: q.heading + rot };
        let moved_chain: Vec<Point> = chain.iter().map(|&q| m(q)).collect();
        let a = verify(wp, &VerifyContext { request_pose: req, delivery_pose: del, previous: Some(prev), chain: &chain, map_cells_seen: 1000, kind: WaypointKind::Free }, &cfg);
        let b = verify(
            m(wp),
            &VerifyContext { request_pose: mp(req), delivery_pose: mp(del), previous: Some(m(prev)), chain: &moved_chain, map_cells_seen: 1000, kind: WaypointKind::Free },
            &cfg,
        );
        ensure(a.verdict == b.verdict, format!("transform {case}: {:?} vs {:?}", a.verdict.failure_mode, b.verdict.failure_mode))?;
    }
    Ok(format!("{} hand cases, 1000 rigid transforms equivariant", cases.len()))
}

fn controller_safety() -> Outcome {
    let start = Instant::now();
    let missions: Vec<MissionConfig> = standard_worlds()
        .into_iter()
        .map(|w| MissionConfig { name: format!("{}{}-s{}", w.topology, w.size, w.seed), world: w, ..MissionConfig::default() })
        .collect();
    ensure(missions.len() == 10, "expected 10 worlds")?;
    ensure(missions.iter().all(|m| m.tick_budget == 20_000), "budget is not 20000 ticks")?;
    let report = run_batch(&missions, None);
    let mut collisions = 0;
    let mut worlds = Vec::new();
    for row in &report.rows {
        let s = row.result.as_ref().map_err(|e| format!("{}: {e}", row.env))?;
        collisions += s.collisions;
        worlds.push(format!("{}:{}", row.env, s.collisions));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(collisions == 0, format!("{collisions} collisions ({})", worlds.join(" ")))?;
    Ok(format!("10 worlds, 0 collisions, {secs:.0} s"))
}

fn forward_script(latency: u64) -> Box<ScriptedPlanner> {
    Box::new(ScriptedPlanner::repeating(PlannerResponse::relative(5, 0, "follow the corridor"), latency))
}

fn tick_gaps(log: &MissionLog, dt: f64) -> Result<usize, String> {
    let mut prev: Option<f64> = None;
    let mut n = 0;
    for r in log.ticks() {
        let Record::Tick { t, .. } = r else { continue };
        if let Some(p) = prev {
            ensure(t - p <= dt + 1e-9, format!("gap of {:.3} s at t = {t:.1}", t - p))?;
        }
        prev = Some(*t);
        n += 1;
    }
    Ok(n)
}

fn asynchrony() -> Outcome {
    let mut checked = 0;
    for world in [common::corridor_world(), common::corridor_with_pillars()] {
        let inline = MissionConfig { tick_budget: 4000, execution: ExecutionMode::Inline, ..MissionConfig::default() };
        let threaded = MissionConfig { execution: ExecutionMode::Threaded, ..inline.clone() };
        let a = run_mission_in(world.clone(), &inline, forward_script(100)).map_err(|e| e.to_string())?;
        let b = run_mission_in(world, &threaded, forward_script(100)).map_err(|e| e.to_string())?;
        let delayed = a.log.records.iter().filter(|r| matches!(r, Record::Response { latency_ticks: 100, .. })).count();
        ensure(delayed > 0, "no delayed responses")?;
        checked += tick_gaps(&a.log, inline.dt)?;
        tick_gaps(&b.log, threaded.dt)?;
        // headers differ only in the configured execution mode
        let body = |log: &MissionLog| log.to_jsonl().lines().skip(1).map(str::to_owned).collect::<Vec<_>>();
        ensure(body(&a.log) == body(&b.log), "inline and threaded logs differ")?;
    }
    Ok(format!("{checked} ticks without a gap above Δt; inline and threaded logs identical"))
}

fn metrics_arithmetic() -> Outcome {
    let dream = mission_time(TimeMode::Dream, 100, 5.0, 0.1, 0.0);
    let coral = mission_time(TimeMode::Coral, 1000, 0.0, 0.1, 0.0);
    let eta = efficiency(1126, 100.0).ok_or("efficiency undefined")?;
    ensure((dream - 600.0).abs() < 1e-9, format!("T_dream = {dream}"))?;
    ensure((coral - 100.0).abs() < 1e-9, format!("T_coral = {coral}"))?;
    ensure((eta - 11.26).abs() < 1e-9, format!("η = {eta}"))?;
    ensure(efficiency(500, 0.0).is_none(), "η defined at 0% coverage")?;
    Ok(format!("T_dream = {dream} s, T_coral = {coral} s, η = {eta} steps/%"))
}

fn scripted_end_to_end() -> Outcome {
    let cfg = MissionConfig { tick_budget: 4000, ..MissionConfig::default() };
    let a = run_mission_in(common::corridor_world(), &cfg, forward_script(100)).map_err(|e| e.to_string())?;
    let b = run_mission_in(common::corridor_world(), &cfg, forward_script(100)).map_err(|e| e.to_string())?;
    ensure(a.end == EndReason::Complete, format!("ended with {:?}", a.end))?;
    ensure(a.summary.coverage_percent == 100.0, format!("coverage {}%", a.summary.coverage_percent))?;
    ensure(a.summary.collisions == 0, format!("{} collisions", a.summary.collisions))?;
    ensure(a.log.to_jsonl() == b.log.to_jsonl(), "logs differ between runs")?;
    Ok(format!("100% coverage in {} steps, 0 collisions, logs bit-identical", a.summary.steps))
}

fn remote_smoke() -> Outcome {
    let reply = "{\"Move forward 4 meters, move left 0 meters\": \"continue along the reef\"}";
    let (url, served) = common::spawn_chat_server(reply);
    let cfg = MissionConfig { tick_budget: 4000, execution: ExecutionMode::Threaded, ..MissionConfig::default() };
    let planner = VlmPlanner::new(RemoteConfig { endpoint: url, timeout_s: 10.0, ..RemoteConfig::default() });
    let out = run_mission_in(common::corridor_world(), &cfg, Box::new(planner)).map_err(|e| e.to_string())?;
    out.log.check()?;
    let mut queries = 0;
    let mut responses = 0;
    for r in &out.log.records {
        match r {
            Record::Query { prompt, .. } => {
                ensure(prompt.as_deref().is_some_and(|p| !p.is_empty()), "query without prompt")?;
                queries += 1;
            }
            Record::Response { text, parsed, error, .. } => {
                ensure(error.is_none() && text.is_some() && parsed.is_some(), "malformed response record")?;
                responses += 1;
            }
            _ => {}
        }
    }
    ensure(queries > 0 && queries == responses, format!("{queries} queries, {responses} responses"))?;
    ensure(served.load(std::sync::atomic::Ordering::SeqCst) == queries, "request count mismatch")?;
    ensure(out.log.end().is_some(), "mission did not finish")?;
    Ok(format!(
        "{queries} remote round trips, mission ended {:?} at {:.0}% coverage. Headline table numbers (coverage, VLM calls, baseline comparisons) depend on a proprietary model and the original environments and are not reproduced",
        out.end, out.summary.coverage_percent
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("schedule exactness", schedule_exactness),
        ("CCL oracle", ccl_oracle),
        ("chain oracle", chain_oracle),
        ("tracker properties", tracker_properties),
        ("verifier geometry", verifier_geometry),
        ("controller safety", controller_safety),
        ("asynchrony", asynchrony),
        ("metrics arithmetic", metrics_arithmetic),
        ("scripted end-to-end", scripted_end_to_end),
        ("remote planner smoke test", remote_smoke),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
