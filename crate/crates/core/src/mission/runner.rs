//! The closed mission loop.

use std::sync::Arc;

use super::config::{MissionConfig, PlannerKind, Variant};
use super::log::{EndReason, Failure, GoalSource, MissionLog, Record};
use super::mailbox::{Delivery, Mailbox};
use super::metrics::{efficiency, mission_time, CoverageTracker, MissionSummary, TimeMode};
use super::trigger::{accept_new_goal, Trigger, TriggerCause};
use crate::chain::{connected_components, CentroidChain, CentroidTracker};
use crate::control::{pd_control, step_dynamics, Control, Fidelity, MppiController, ObstacleField, RobotState};
use crate::error::Error;
use crate::geometry::Pose2;
use crate::map::{CameraModel, OccupancyGrid};
use crate::planner::{
    parse_response, prompt_text, resolve_waypoint, select_mode, Planner, PlannerMode, PlannerQuery, ResolveError, ResponseKind, RuleBasedPlanner, ScriptedPlanner,
    VlmPlanner, D_MIN,
};
use crate::raster::Point;
use crate::verifier::{verify, Verdict, VerifyContext, WaypointKind};
use crate::world::{check_collision, render_sensor, SensorFrame, WorldModel};

/// Clearance kept between any goal and the world boundary, on top of the robot radius.
const GOAL_MARGIN: f64 = 0.3;

/// Everything a finished mission leaves behind.
#[derive(Debug, Clone)]
pub struct MissionOutcome {
    pub log: MissionLog,
    pub summary: MissionSummary,
    pub end: EndReason,
    pub world: WorldModel,
    pub grid: OccupancyGrid,
    pub chain: CentroidChain<f64>,
    pub trajectory: Vec<Point>,
}

/// Planner selected by the configuration.
pub fn build_planner(cfg: &MissionConfig) -> Box<dyn Planner> {
    let latency = cfg.planner.latency_ticks;
    if cfg.variant == Variant::RuleBased {
        return Box::new(RuleBasedPlanner::new(latency));
    }
    match cfg.planner.kind {
        PlannerKind::RuleBased => Box::new(RuleBasedPlanner::new(latency)),
        PlannerKind::Scripted => {
            let mut s = ScriptedPlanner::new(cfg.planner.script.iter().cloned(), latency);
            s.repeat_last = cfg.planner.repeat_last;
            Box::new(s)
        }
        PlannerKind::Vlm => {
            let mut remote = cfg.planner.remote.clone().with_env();
            remote.dt = cfg.dt;
            Box::new(VlmPlanner::new(remote))
        }
    }
}

/// Builds the world and planner from `cfg` and runs to completion.
pub fn run_mission(cfg: &MissionConfig) -> Result<MissionOutcome, Error> {
    cfg.validate()?;
    let world = cfg.world.build()?;
    run_mission_in(world, cfg, build_planner(cfg))
}

/// Runs in a given world with a given planner. Errors come only from configuration.
pub fn run_mission_in(world: WorldModel, cfg: &MissionConfig, planner: Box<dyn Planner>) -> Result<MissionOutcome, Error> {
    cfg.validate()?;
    let mut m = Mission::new(world, cfg.clone(), planner)?;
    let end = m.run();
    Ok(m.finish(end))
}

struct Pending {
    id: u64,
    attempt: u32,
    mode: PlannerMode,
    request_pose: Pose2<f64>,
    chain: CentroidChain<f64>,
    rejected: Vec<Point>,
}

fn pose3(p: &Pose2<f64>) -> [f64; 3] {
    [p.position.x, p.position.y, p.heading]
}

struct Mission {
    cfg: MissionConfig,
    world: WorldModel,
    grid: OccupancyGrid,
    field: ObstacleField,
    seen_obstacles: usize,
    seen_targets: usize,
    centroids: Vec<Point>,
    tracker: CentroidTracker<f64>,
    chain: CentroidChain<f64>,
    logged_chain: Vec<u64>,
    coverage: CoverageTracker,
    cov_time: Option<f64>,
    trigger: Trigger,
    mailbox: Mailbox,
    pending: Option<Pending>,
    next_query: u64,
    prev_mode: Option<PlannerMode>,
    mppi: MppiController<f64>,
    state: RobotState<f64>,
    goal: Option<Point>,
    goal_source: GoalSource,
    frame: SensorFrame,
    trajectory: Vec<Point>,
    log: MissionLog,
    steps: u64,
    collisions: u64,
    in_collision: bool,
    vlm_calls: u64,
    deviations: u64,
    t_idle: f64,
    latency_sum: f64,
    latency_n: u64,
    hl_fail: u32,
    mppi_fail: u32,
    last_delivery: u64,
}

impl Mission {
    fn new(world: WorldModel, cfg: MissionConfig, planner: Box<dyn Planner>) -> Result<Self, Error> {
        let grid = OccupancyGrid::new(world.frame());
        let field = ObstacleField::from_grid(&grid);
        let tracker = CentroidTracker::new(cfg.tracker)?;
        let mut mppi_cfg = cfg.controller.mppi;
        mppi_cfg.seed = mppi_cfg.seed.wrapping_add(cfg.seed);
        mppi_cfg.rollout.robot_radius = cfg.robot_radius;
        let mppi = MppiController::new(mppi_cfg, cfg.controller.schedule, cfg.controller.dynamics)?;
        let coverage = CoverageTracker::new(&world, cfg.sensor, cfg.metrics.cover_fraction);
        let state = RobotState::at_rest(world.start);
        let mailbox = Mailbox::new(planner, cfg.execution, cfg.dt);
        let log = MissionLog::new(cfg.clone(), mailbox.planner_name());
        let frame = render_sensor(&world, &world.start, &cfg.sensor);
        let cov_time = None;
        Ok(Self {
            trigger: Trigger::new(cfg.trigger, cfg.dt),
            trajectory: vec![state.position()],
            grid,
            field,
            seen_obstacles: 0,
            seen_targets: 0,
            centroids: Vec::new(),
            tracker,
            chain: CentroidChain::default(),
            logged_chain: Vec::new(),
            coverage,
            cov_time,
            mailbox,
            pending: None,
            next_query: 0,
            prev_mode: None,
            mppi,
            state,
            goal: None,
            goal_source: GoalSource::Initial,
            frame,
            log,
            steps: 0,
            collisions: 0,
            in_collision: false,
            vlm_calls: 0,
            deviations: 0,
            t_idle: 0.0,
            latency_sum: 0.0,
            latency_n: 0,
            hl_fail: 0,
            mppi_fail: 0,
            last_delivery: 0,
            world,
            cfg,
        })
    }

    fn run(&mut self) -> EndReason {
        if self.cfg.tick_budget == 0 {
            return EndReason::Budget;
        }
        let start = self.world.start;
        let first = self.world.bounds.clamp_inside(start.to_world(self.cfg.initial_waypoint, 0.0), self.cfg.robot_radius + GOAL_MARGIN);
        self.set_goal(0, first, GoalSource::Initial, None);
        for tick in 0..self.cfg.tick_budget {
            self.perceive(tick);
            self.plan(tick);
            self.act(tick);
            if self.coverage.complete() {
                return EndReason::Complete;
            }
            if self.hl_fail >= self.cfg.planner.max_failures {
                return EndReason::PlannerExhausted;
            }
        }
        EndReason::Budget
    }

    fn perceive(&mut self, tick: u64) {
        let pose = self.state.pose();
        self.frame = render_sensor(&self.world, &pose, &self.cfg.sensor);
        let cam = CameraModel::scanline(&pose, &self.cfg.sensor);
        self.grid.integrate_frame(&self.frame, &cam);
        if self.grid.obstacle_count() != self.seen_obstacles {
            self.seen_obstacles = self.grid.obstacle_count();
            self.field = ObstacleField::from_grid(&self.grid);
        }
        if self.grid.target_count() != self.seen_targets {
            self.seen_targets = self.grid.target_count();
            let regions = connected_components(&self.grid.target_mask(), self.grid.width(), self.grid.height(), self.cfg.min_region_cells);
            self.centroids = regions.iter().map(|r| r.centroid(&self.grid.frame)).collect();
        }
        self.tracker.update(&self.centroids);
        self.refresh_chain(tick);
    }

    fn refresh_chain(&mut self, tick: u64) {
        self.chain = self.tracker.chain();
        let ids = self.chain.order();
        if ids != self.logged_chain {
            self.log.push(Record::Chain { tick, ids: ids.clone(), positions: self.chain.positions() });
            self.logged_chain = ids;
        }
    }

    fn plan(&mut self, tick: u64) {
        let pos = self.state.position();
        self.trigger.observe(tick, pos, self.state.v);
        if !self.mailbox.busy() {
            let cause = if self.cfg.variant == Variant::Dream {
                let step = (1.0 / self.cfg.dt).round().max(1.0) as u64;
                (tick >= self.last_delivery + step).then(|| {
                    self.trigger.fired(tick);
                    TriggerCause::Step
                })
            } else {
                self.trigger.check(tick, pos, self.goal, self.hl_fail + self.mppi_fail)
            };
            if let Some(cause) = cause {
                self.log.push(Record::Trigger { tick, cause });
                if matches!(cause, TriggerCause::Dist | TriggerCause::Stuck) {
                    // reached or abandoned
                    if let GoalSource::Centroid { track } = self.goal_source {
                        self.tracker.set_visited(track);
                        self.refresh_chain(tick);
                    }
                }
                let mode = if self.cfg.variant == Variant::NoCentroidSelect {
                    PlannerMode::FreeWaypoint
                } else {
                    select_mode(&self.chain, &self.state.pose(), D_MIN, self.prev_mode)
                };
                self.submit(tick, mode, 0, None, Vec::new());
            }
        }
        // re-queries may be answered within the same tick when latency is zero
        while let Some(d) = self.mailbox.poll(tick) {
            self.deliver(tick, d);
        }
    }

    fn submit(&mut self, tick: u64, mode: PlannerMode, attempt: u32, feedback: Option<String>, rejected: Vec<Point>) {
        let id = self.next_query;
        self.next_query += 1;
        self.vlm_calls += 1;
        let pose = self.state.pose();
        let prompt = prompt_text(mode, feedback.as_deref());
        self.log.push(Record::Query {
            tick,
            query: id,
            attempt,
            mode,
            request_pose: pose3(&pose),
            chain_len: self.chain.len(),
            feedback: feedback.clone(),
            prompt: self.cfg.planner.log_prompts.then(|| prompt.clone()),
        });
        let query = PlannerQuery {
            mode,
            chain: self.chain.clone(),
            robot: self.state,
            frame: self.frame.clone(),
            grid: Arc::new(self.grid.clone()),
            trajectory: Arc::new(self.trajectory.clone()),
            feedback,
            rejected: rejected.clone(),
            goal: self.goal,
            attempt,
        };
        self.pending = Some(Pending { id, attempt, mode, request_pose: pose, chain: self.chain.clone(), rejected });
        self.mailbox.submit(tick, query, prompt);
    }

    fn fail(&mut self, tick: u64, query: u64, failure: Failure) {
        self.log.push(Record::Rejected { tick, query, failure });
        self.hl_fail += 1;
    }

    fn deliver(&mut self, tick: u64, d: Delivery) {
        let mut p = self.pending.take().expect("delivery without a pending query");
        let lag = d.delivered - d.submitted;
        self.latency_sum += lag as f64 * self.cfg.dt;
        self.latency_n += 1;
        self.last_delivery = tick;
        if p.attempt > 0 {
            self.t_idle += lag as f64 * self.cfg.dt;
        }
        let (text, error) = match &d.answer {
            Ok(r) => (Some(r.text.clone()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let parsed = text.as_deref().map(parse_response);
        self.log.push(Record::Response {
            tick,
            query: p.id,
            latency_ticks: lag,
            text,
            error,
            parsed: parsed.clone().and_then(Result::ok),
        });
        let resp = match parsed {
            None => return self.fail(tick, p.id, Failure::Transport),
            Some(Err(_)) => return self.fail(tick, p.id, Failure::Unparseable),
            Some(Ok(r)) => r,
        };
        if resp.kind == ResponseKind::None {
            return self.fail(tick, p.id, Failure::NoAction);
        }
        self.prev_mode = Some(p.mode);
        let kind = if resp.kind == ResponseKind::CentroidIndex { WaypointKind::Centroid } else { WaypointKind::Free };
        let delivery_pose = self.state.pose();
        let enforced = self.cfg.variant != Variant::NoVerification;
        let (waypoint, verdict, report) = match resolve_waypoint(&resp, &p.chain, &p.request_pose) {
            Err(ResolveError::NoWaypoint) => return self.fail(tick, p.id, Failure::NoWaypoint),
            Err(ResolveError::InvalidIndex { index, len }) => (None, Verdict::invalid_index(index, len), None),
            Ok(wp) => {
                let wp = self.world.bounds.clamp_inside(wp, self.cfg.robot_radius + GOAL_MARGIN);
                let chain = self.chain.positions();
                let ctx = VerifyContext {
                    request_pose: p.request_pose,
                    delivery_pose,
                    previous: self.goal,
                    chain: &chain,
                    map_cells_seen: self.grid.explored_count(),
                    kind,
                };
                let report = verify(wp, &ctx, &self.cfg.verifier);
                (Some(wp), report.verdict.clone(), Some(report))
            }
        };
        self.log.push(Record::Verdict { tick, query: p.id, waypoint, delivery_pose: pose3(&delivery_pose), enforced, verdict: verdict.clone(), report });
        if !verdict.accepted {
            self.deviations += 1;
            if enforced || waypoint.is_none() {
                if p.attempt < self.cfg.verifier.max_requeries {
                    p.rejected.extend(waypoint);
                    self.submit(tick, p.mode, p.attempt + 1, Some(verdict.feedback), p.rejected);
                } else {
                    self.fail(tick, p.id, Failure::RequeriesExhausted);
                }
                return;
            }
        }
        let wp = waypoint.expect("accepted verdicts carry a waypoint");
        if !accept_new_goal(wp, self.goal, self.cfg.trigger.dd_min) {
            return self.fail(tick, p.id, Failure::TooClose);
        }
        let source = match resp.kind {
            ResponseKind::CentroidIndex => {
                let idx = resp.index.expect("resolved centroid index") as usize;
                GoalSource::Centroid { track: p.chain.links[idx].id }
            }
            _ => GoalSource::Free,
        };
        self.set_goal(tick, wp, source, Some(p.id));
        self.hl_fail = 0;
    }

    fn set_goal(&mut self, tick: u64, goal: Point, source: GoalSource, query: Option<u64>) {
        self.goal = Some(goal);
        self.goal_source = source;
        self.trigger.reset_window();
        self.log.push(Record::Goal { tick, goal, source, query });
    }

    fn act(&mut self, tick: u64) {
        let params = self.cfg.controller.dynamics;
        let dt = self.cfg.dt;
        let hold = self.cfg.variant == Variant::Dream && self.mailbox.busy();
        let arrived = self.goal.is_some_and(|g| self.state.position().distance(g) <= self.cfg.controller.arrive_radius);
        let mut mppi_failure = false;
        let u: Control<f64> = match self.goal {
            Some(g) if !hold && !arrived => {
                if self.cfg.variant == Variant::NoLowLevel {
                    pd_control(&self.state, g, &self.cfg.controller.pd, &params)
                } else {
                    let out = self.mppi.control(&self.state, g, &self.field);
                    mppi_failure = out.failure;
                    out.control
                }
            }
            _ => params.brake(&self.state, dt),
        };
        if mppi_failure {
            self.mppi_fail += 1;
        } else if self.cfg.variant != Variant::NoLowLevel && !hold && self.goal.is_some() && !arrived {
            self.mppi_fail = 0;
        }
        self.state = step_dynamics(&self.state, u, dt, Fidelity::Full, &params);
        self.steps += 1;
        let pose = self.state.pose();
        self.trajectory.push(pose.position);
        let collision = check_collision(&self.world, &pose, self.cfg.robot_radius);
        if collision && !self.in_collision {
            self.collisions += 1;
        }
        self.in_collision = collision;
        self.coverage.observe(&pose);
        let t = (tick + 1) as f64 * dt;
        if self.cov_time.is_none() && self.coverage.total() > 0 && self.coverage.percent() >= self.cfg.metrics.cov_time_percent {
            self.cov_time = Some(t);
        }
        self.log.push(Record::Tick {
            tick,
            t,
            pose: pose3(&pose),
            v: self.state.v,
            omega: self.state.omega,
            control: [u.a, u.alpha],
            goal: self.goal,
            mppi_failure,
            collision,
            coverage: self.coverage.percent(),
        });
    }

    fn summary(&self) -> MissionSummary {
        let mean_latency_s = if self.latency_n == 0 { 0.0 } else { self.latency_sum / self.latency_n as f64 };
        let mode = if self.cfg.variant == Variant::Dream { TimeMode::Dream } else { TimeMode::Coral };
        let n = if mode == TimeMode::Dream { self.vlm_calls } else { self.steps };
        let coverage_percent = self.coverage.percent();
        MissionSummary {
            steps: self.steps,
            clusters_total: self.coverage.total(),
            clusters_covered: self.coverage.covered(),
            coverage_percent,
            cov_time: self.cov_time,
            collisions: self.collisions,
            vlm_calls: self.vlm_calls,
            deviations: self.deviations,
            t_idle: self.t_idle,
            mission_time: mission_time(mode, n, mean_latency_s, self.cfg.dt, self.t_idle),
            efficiency: efficiency(self.steps, coverage_percent),
            mean_latency_s,
        }
    }

    fn finish(mut self, end: EndReason) -> MissionOutcome {
        let summary = self.summary();
        let tick = self.steps.saturating_sub(1);
        if self.steps > 0 {
            self.log.push(Record::End { tick, reason: end, summary: summary.clone() });
        }
        MissionOutcome {
            log: self.log,
            summary,
            end,
            world: self.world,
            grid: self.grid,
            chain: self.chain,
            trajectory: self.trajectory,
        }
    }
}
