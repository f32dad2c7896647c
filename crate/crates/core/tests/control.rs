use reefnav::control::{rollout, step_dynamics, DdpSchedule, Fidelity, MppiConfig, MppiController, ObstacleField, RobotState};
use reefnav::geometry::{Pose2, Vec2};
use reefnav::raster::{GridFrame, Point};
use reefnav::DynamicsParams;

#[test]
fn schedule_is_exact() {
    let start = std::time::Instant::now();
    for &p in &[0.5, 1.0, 2.0, 3.0] {
        for &steps in &[5usize, 10, 50] {
            for &(horizon, n) in &[(3.0, 16usize), (1.7, 7), (12.0, 64)] {
                let s = DdpSchedule { horizon, steps, exponent: p, boundary_points: n };
                let sum: f64 = (0..steps).map(|t| s.interval(t).unwrap()).sum();
                assert!((sum - horizon).abs() < 1e-9, "p={p} steps={steps}: {sum}");
                assert!(s.intervals().iter().all(|&d| d > 0.0));
                assert_eq!(s.boundary_points_at(0).unwrap(), n);
                let counts: Vec<usize> = (0..steps).map(|t| s.boundary_points_at(t).unwrap()).collect();
                assert!(counts.windows(2).all(|w| w[1] <= w[0]), "p={p} steps={steps}: {counts:?}");
                assert!(counts.iter().all(|&c| c >= 1));
                assert!(s.interval(steps).is_err());
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn schedule_in_single_precision() {
    let s = DdpSchedule::<f32> { horizon: 3.0, steps: 10, exponent: 2.0, boundary_points: 16 };
    let sum: f32 = s.intervals().iter().sum();
    assert!((sum - 3.0).abs() < 1e-5);
    assert_eq!(s.boundary_points_at(0).unwrap(), 16);
}

#[test]
fn fidelity_drops_for_long_steps() {
    let s = DdpSchedule { horizon: 3.0, steps: 10, exponent: 2.0, boundary_points: 16 };
    // Δ_t / Δ_0 = 2t + 1
    assert_eq!(s.fidelity(0), Fidelity::Full);
    assert_eq!(s.fidelity(1), Fidelity::Kinematic);
    let flat = DdpSchedule { exponent: 1.0, ..s };
    assert!((0..10).all(|t| flat.fidelity(t) == Fidelity::Full));
}

const DISCS: [(f64, f64, f64); 4] = [(0.0, 0.6, 0.5), (3.0, -0.5, 0.6), (6.0, 0.4, 0.4), (4.5, 2.2, 0.7)];

fn disc_field() -> ObstacleField {
    let frame = GridFrame::covering(Point::new(2.5, 0.0), 17.0, 8.0, 10.0);
    let mask: Vec<bool> = (0..frame.len())
        .map(|i| {
            let c = frame.cell_center(frame.cell_at(i));
            DISCS.iter().any(|&(x, y, r)| (c.x - x).hypot(c.y - y) <= r)
        })
        .collect();
    ObstacleField::from_mask(frame, &mask)
}

#[test]
fn closed_loop_keeps_clear_of_obstacles() {
    let field = disc_field();
    let params = DynamicsParams::default();
    let cfg = MppiConfig::default();
    let radius = cfg.rollout.robot_radius;
    let mut mppi = MppiController::new(cfg, DdpSchedule::default(), params).unwrap();
    let goal = Vec2::new(9.0, 0.0);
    let mut s = RobotState::at_rest(Pose2::new(-4.0, 0.0, 0.0));
    let mut reached = None;
    for tick in 0..800 {
        let out = mppi.control(&s, goal, &field);
        s = step_dynamics(&s, out.control, 0.1, Fidelity::Full, &params);
        // dense check of the true body outline against the true discs
        for k in 0..256 {
            let a = std::f64::consts::TAU * k as f64 / 256.0;
            let (bx, by) = (s.x + radius * a.cos(), s.y + radius * a.sin());
            for &(x, y, r) in &DISCS {
                assert!((bx - x).hypot(by - y) > r, "tick {tick}: body at ({bx:.3}, {by:.3}) inside disc ({x}, {y})");
            }
        }
        if s.position().distance(goal) < 0.5 {
            reached = Some(tick);
            break;
        }
    }
    assert!(reached.is_some(), "goal not reached, ended at ({:.2}, {:.2})", s.x, s.y);
}

#[test]
fn feasible_rollouts_clear_every_boundary_point() {
    let field = disc_field();
    let sched = DdpSchedule::default();
    let params = DynamicsParams::default();
    let cfg = MppiConfig::<f64>::default().rollout;
    let s0 = RobotState::at_rest(Pose2::new(-2.0, 0.0, 0.0));
    for k in 0..40 {
        let turn = (k as f64 - 20.0) * 0.05;
        let controls = vec![reefnav::Control::new(0.3, turn); sched.steps];
        let r = rollout(&s0, &controls, &sched, &params, &field, Vec2::new(9.0, 0.0), &cfg);
        if !r.feasible {
            continue;
        }
        for (t, st) in r.trajectory.iter().skip(1).enumerate() {
            let n = sched.boundary_points_at(t).unwrap();
            for b in reefnav::control::boundary_points(st, n, cfg.robot_radius) {
                assert!(!field.blocked(b, cfg.inflation), "sample {k} step {t}");
            }
        }
    }
}
