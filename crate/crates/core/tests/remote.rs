mod common;

use std::sync::atomic::Ordering;

use reefnav::mission::{run_mission_in, ExecutionMode, MissionConfig, Record};
use reefnav::planner::{RemoteConfig, VlmPlanner};

const REPLY: &str = "```json\n{\"Move forward 4 meters, move left 0 meters\": \"the corridor continues ahead\"}\n```";

#[test]
fn remote_planner_completes_a_mission() {
    let (url, served) = common::spawn_chat_server(REPLY);
    let cfg = MissionConfig { tick_budget: 4000, execution: ExecutionMode::Threaded, ..MissionConfig::default() };
    let planner = VlmPlanner::new(RemoteConfig { endpoint: url, timeout_s: 10.0, ..RemoteConfig::default() });
    let out = run_mission_in(common::corridor_world(), &cfg, Box::new(planner)).unwrap();
    out.log.check().unwrap();
    assert_eq!(out.log.header.planner, "vlm");

    let queries: Vec<_> = out.log.records.iter().filter(|r| matches!(r, Record::Query { .. })).collect();
    assert!(!queries.is_empty());
    for q in &queries {
        let Record::Query { prompt, .. } = q else { unreachable!() };
        let prompt = prompt.as_deref().expect("prompt logged");
        assert!(prompt.contains("high-level planner"));
    }
    let mut responses = 0;
    for r in &out.log.records {
        if let Record::Response { text, error, parsed, .. } = r {
            assert!(error.is_none(), "{error:?}");
            assert_eq!(text.as_deref(), Some(REPLY));
            assert_eq!(parsed.as_ref().and_then(|p| p.d_fwd), Some(4));
            responses += 1;
        }
    }
    assert_eq!(responses, queries.len());
    assert_eq!(served.load(Ordering::SeqCst), queries.len());
    assert!(out.summary.coverage_percent > 0.0);
    assert_eq!(out.summary.collisions, 0);
}

#[test]
fn unreachable_endpoint_is_a_transport_failure() {
    let cfg = MissionConfig { tick_budget: 3000, ..MissionConfig::default() };
    let planner = VlmPlanner::new(RemoteConfig { endpoint: "http://127.0.0.1:9/v1/chat/completions".into(), timeout_s: 2.0, ..RemoteConfig::default() });
    let out = run_mission_in(common::corridor_world(), &cfg, Box::new(planner)).unwrap();
    out.log.check().unwrap();
    assert!(out.log.records.iter().any(|r| matches!(r, Record::Response { error: Some(_), .. })));
    assert!(out.log.records.iter().any(|r| matches!(r, Record::Rejected { failure: reefnav::mission::Failure::Transport, .. })));
}
