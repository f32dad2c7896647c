mod common;

use reefnav::mission::{
    diff_summaries, run_mission, run_mission_in, summarize_log, EndReason, ExecutionMode, Failure, MissionConfig, MissionLog, MissionOutcome,
    Record, Variant,
};
use reefnav::planner::{PlannerResponse, RuleBasedPlanner, ScriptedPlanner};
use reefnav::verifier::FailureMode;
use reefnav::world::Topology;

fn corridor_cfg() -> MissionConfig {
    MissionConfig { name: "corridor".into(), tick_budget: 4000, ..MissionConfig::default() }
}

fn forward_script(latency: u64) -> Box<ScriptedPlanner> {
    Box::new(ScriptedPlanner::repeating(PlannerResponse::relative(5, 0, "follow the corridor"), latency))
}

/// Structural invariants every finished mission log must satisfy.
fn assert_consistent(out: &MissionOutcome, dt: f64) {
    let log = &out.log;
    log.check().expect("log structure");
    let mut last: Option<(u64, f64, f64)> = None;
    for r in log.ticks() {
        let Record::Tick { tick, t, coverage, .. } = r else { unreachable!() };
        if let Some((pt, ptime, pcov)) = last {
            assert_eq!(*tick, pt + 1);
            assert!((t - ptime - dt).abs() < 1e-9, "gap at tick {tick}: {}", t - ptime);
            assert!(*coverage >= pcov, "coverage dropped at tick {tick}");
        } else {
            assert_eq!(*tick, 0);
        }
        last = Some((*tick, *t, *coverage));
    }
    let queries = log.records.iter().filter(|r| matches!(r, Record::Query { .. })).count();
    let rejected = log
        .records
        .iter()
        .filter(|r| matches!(r, Record::Verdict { verdict, .. } if verdict.failure_mode.is_deviation() || verdict.failure_mode == FailureMode::InvalidIndex))
        .count();
    assert_eq!(out.summary.vlm_calls as usize, queries);
    assert_eq!(out.summary.deviations as usize, rejected);
    assert_eq!(out.summary.steps as usize, log.ticks().count());
    let (reason, logged) = log.end().expect("end record");
    assert_eq!(reason, out.end);
    assert_eq!(logged, &out.summary);
    let recomputed = summarize_log(log, &out.world);
    assert!(diff_summaries(&out.summary, &recomputed).is_empty(), "{:?}", diff_summaries(&out.summary, &recomputed));
    let text = log.to_jsonl();
    let back = MissionLog::read_from(text.as_bytes()).unwrap();
    assert_eq!(back.to_jsonl(), text);
}

#[test]
fn zero_budget_writes_nothing() {
    let cfg = MissionConfig { tick_budget: 0, ..corridor_cfg() };
    let out = run_mission_in(common::corridor_world(), &cfg, Box::new(RuleBasedPlanner::new(100))).unwrap();
    assert!(out.log.records.is_empty());
    assert_eq!(out.summary.steps, 0);
    assert_eq!(out.summary.coverage_percent, 0.0);
    assert_eq!(out.summary.vlm_calls, 0);
}

#[test]
fn scripted_corridor_covers_everything() {
    let cfg = corridor_cfg();
    let a = run_mission_in(common::corridor_world(), &cfg, forward_script(100)).unwrap();
    assert_eq!(a.end, EndReason::Complete, "{:?}", a.summary);
    assert_eq!(a.summary.coverage_percent, 100.0);
    assert_eq!(a.summary.collisions, 0);
    assert_consistent(&a, cfg.dt);
    let b = run_mission_in(common::corridor_world(), &cfg, forward_script(100)).unwrap();
    assert_eq!(a.log.to_jsonl(), b.log.to_jsonl());
}

#[test]
fn pillars_do_not_cause_collisions() {
    let cfg = corridor_cfg();
    let out = run_mission_in(common::corridor_with_pillars(), &cfg, forward_script(50)).unwrap();
    assert_eq!(out.summary.collisions, 0);
    assert_consistent(&out, cfg.dt);
}

#[test]
fn threaded_matches_inline() {
    for world in [common::corridor_world(), common::corridor_with_pillars()] {
        let inline = MissionConfig { execution: ExecutionMode::Inline, ..corridor_cfg() };
        let threaded = MissionConfig { execution: ExecutionMode::Threaded, ..corridor_cfg() };
        let a = run_mission_in(world.clone(), &inline, forward_script(100)).unwrap();
        let b = run_mission_in(world, &threaded, forward_script(100)).unwrap();
        assert_consistent(&b, threaded.dt);
        // the header embeds the execution mode, the records must agree exactly
        let body = |log: &MissionLog| log.to_jsonl().lines().skip(1).map(str::to_owned).collect::<Vec<_>>();
        assert_eq!(body(&a.log), body(&b.log));
    }
}

#[test]
fn rule_planner_threaded_matches_inline_on_generated_world() {
    let mut cfg = MissionConfig { tick_budget: 2500, ..MissionConfig::default() };
    cfg.world.topology = Topology::S;
    cfg.world.seed = 5;
    let a = run_mission(&cfg).unwrap();
    cfg.execution = ExecutionMode::Threaded;
    let b = run_mission(&cfg).unwrap();
    assert_consistent(&a, cfg.dt);
    let body = |log: &MissionLog| log.to_jsonl().lines().skip(1).map(str::to_owned).collect::<Vec<_>>();
    assert_eq!(body(&a.log), body(&b.log));
}

#[test]
fn control_continues_while_planner_is_busy() {
    let cfg = corridor_cfg();
    let out = run_mission_in(common::corridor_world(), &cfg, forward_script(100)).unwrap();
    let mut waiting_ticks = 0;
    let mut moving = 0;
    let mut in_flight = false;
    let mut total_latency = 0;
    for r in &out.log.records {
        match r {
            Record::Query { .. } => in_flight = true,
            Record::Response { latency_ticks, .. } => {
                assert_eq!(*latency_ticks, 100);
                total_latency += latency_ticks;
                in_flight = false;
            }
            Record::Tick { v, .. } if in_flight => {
                waiting_ticks += 1;
                moving += (v.abs() > 0.05) as u64;
            }
            _ => {}
        }
    }
    // every tick spent waiting on the planner still ran the controller
    assert!(total_latency > 0);
    assert_eq!(waiting_ticks, total_latency);
    assert!(moving > 10);
}

#[test]
fn silent_planner_exhausts() {
    let cfg = corridor_cfg();
    let planner = Box::new(ScriptedPlanner::repeating(PlannerResponse::none("nothing to do"), 10));
    let out = run_mission_in(common::corridor_world(), &cfg, planner).unwrap();
    assert_eq!(out.end, EndReason::PlannerExhausted);
    let no_action = out.log.records.iter().filter(|r| matches!(r, Record::Rejected { failure: Failure::NoAction, .. })).count();
    assert_eq!(no_action, 5);
    assert!(out.log.records.iter().any(|r| matches!(r, Record::Trigger { .. })));
    assert_consistent(&out, cfg.dt);
}

#[test]
fn garbage_text_is_a_failure() {
    let cfg = corridor_cfg();
    let mut planner = ScriptedPlanner::from_texts(["no idea".to_string()], 10);
    planner.repeat_last = true;
    let out = run_mission_in(common::corridor_world(), &cfg, Box::new(planner)).unwrap();
    assert_eq!(out.end, EndReason::PlannerExhausted);
    assert!(out.log.records.iter().any(|r| matches!(r, Record::Rejected { failure: Failure::Unparseable, .. })));
}

#[test]
fn invalid_index_is_requeried_and_counted() {
    let cfg = corridor_cfg();
    let mut planner = ScriptedPlanner::new([PlannerResponse::centroid(99, "bad"), PlannerResponse::relative(5, 0, "ok")], 20);
    planner.repeat_last = true;
    let out = run_mission_in(common::corridor_world(), &cfg, Box::new(planner)).unwrap();
    assert_consistent(&out, cfg.dt);
    assert!(out.summary.deviations >= 1);
    let requery = out.log.records.iter().find_map(|r| match r {
        Record::Query { attempt: 1, feedback, .. } => feedback.clone(),
        _ => None,
    });
    assert!(requery.expect("a feedback re-query").contains("invalid"));
    assert!(out.summary.t_idle >= 2.0 - 1e-9);
}

#[test]
fn backward_answers_are_rejected_unless_verification_is_off() {
    let backward = || {
        Box::new(ScriptedPlanner::repeating(PlannerResponse::relative(-3, 0, "go back"), 10))
    };
    let full = run_mission_in(common::corridor_world(), &corridor_cfg(), backward()).unwrap();
    assert!(full.log.records.iter().any(|r| matches!(r, Record::Rejected { failure: Failure::RequeriesExhausted, .. })));
    assert!(full.log.records.iter().all(|r| !matches!(r, Record::Verdict { enforced: false, .. })));

    let cfg = MissionConfig { variant: Variant::NoVerification, ..corridor_cfg() };
    let off = run_mission_in(common::corridor_world(), &cfg, backward()).unwrap();
    assert!(off.log.records.iter().any(|r| matches!(r, Record::Verdict { enforced: false, verdict, .. } if !verdict.accepted)));
    assert!(off.log.records.iter().all(|r| !matches!(r, Record::Rejected { failure: Failure::RequeriesExhausted, .. })));
    assert!(off.summary.deviations > 0);
}

#[test]
fn variants_run_to_a_consistent_end() {
    for variant in [Variant::Full, Variant::NoCentroidSelect, Variant::RuleBased, Variant::NoLowLevel, Variant::Dream] {
        let mut cfg = MissionConfig { variant, tick_budget: 1500, ..MissionConfig::default() };
        cfg.world.topology = Topology::L;
        let out = run_mission(&cfg).unwrap();
        assert_consistent(&out, cfg.dt);
    }
}
