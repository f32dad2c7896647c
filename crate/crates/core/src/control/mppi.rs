//! Sampling-based model predictive controller.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dynamics::{Control, DynamicsParams, RobotState};
use super::field::ObstacleField;
use super::rollout::{rollout_planned, RolloutConfig, RolloutPlan};
use super::schedule::DdpSchedule;
use crate::error::Error;
use crate::geometry::Vec2;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct MppiConfig<S> {
    /// Rollouts per control tick, `K`.
    pub samples: usize,
    /// Noise standard deviation on surge acceleration.
    pub sigma_a: S,
    /// Noise standard deviation on yaw acceleration.
    pub sigma_alpha: S,
    /// Softmax temperature `λ`.
    pub lambda: S,
    /// Share of the feasible rollouts, lowest cost first, that enter the weighted average.
    pub elite_fraction: S,
    /// Inflation of the fallback pass run when nothing is feasible, meters.
    pub relaxed_inflation: S,
    pub seed: u64,
    pub rollout: RolloutConfig<S>,
}

impl<S: Real> Default for MppiConfig<S> {
    fn default() -> Self {
        Self {
            samples: 400,
            sigma_a: S::lit(0.05),
            sigma_alpha: S::lit(0.05),
            lambda: S::lit(0.5),
            elite_fraction: S::lit(0.1),
            relaxed_inflation: S::lit(0.145),
            seed: 0,
            rollout: RolloutConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MppiOutput<S> {
    pub control: Control<S>,
    /// No rollout was feasible; `control` is a brake command.
    pub failure: bool,
    /// Lowest feasible rollout cost.
    pub j_min: Option<S>,
    pub feasible: usize,
    /// Feasibility was only reached after dropping the obstacle inflation.
    pub relaxed: bool,
}

#[derive(Debug, Clone)]
pub struct MppiController<S> {
    config: MppiConfig<S>,
    schedule: DdpSchedule<S>,
    params: DynamicsParams<S>,
    plan: RolloutPlan<S>,
    nominal: Vec<Control<S>>,
    rng: ChaCha8Rng,
}

impl<S: Real> MppiController<S> {
    pub fn new(config: MppiConfig<S>, schedule: DdpSchedule<S>, params: DynamicsParams<S>) -> Result<Self, Error> {
        schedule.validate()?;
        if config.samples == 0 {
            return Err(Error::Config("MPPI needs at least one sample".into()));
        }
        if !(config.lambda > S::zero()) || config.sigma_a < S::zero() || config.sigma_alpha < S::zero() {
            return Err(Error::Config("MPPI temperature must be positive and noise non-negative".into()));
        }
        if !(config.elite_fraction > S::zero() && config.elite_fraction <= S::one()) {
            return Err(Error::Config("MPPI elite fraction must lie in (0, 1]".into()));
        }
        Ok(Self {
            nominal: vec![Control::default(); schedule.steps],
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            plan: RolloutPlan::new(&schedule),
            config,
            schedule,
            params,
        })
    }

    pub fn config(&self) -> &MppiConfig<S> {
        &self.config
    }

    pub fn schedule(&self) -> &DdpSchedule<S> {
        &self.schedule
    }

    pub fn params(&self) -> &DynamicsParams<S> {
        &self.params
    }

    pub fn nominal(&self) -> &[Control<S>] {
        &self.nominal
    }

    pub fn set_nominal(&mut self, seq: Vec<Control<S>>) {
        assert_eq!(seq.len(), self.schedule.steps);
        self.nominal = seq;
    }

    pub fn reset(&mut self) {
        self.nominal = vec![Control::default(); self.schedule.steps];
    }

    /// One control tick toward `goal`.
    ///
    /// Sample 0 is the nominal sequence itself; the others add Gaussian noise and are saturated.
    /// The elite feasible rollouts are averaged with weights `exp(−(J − J_min)/λ)`. If that
    /// average is itself infeasible the best sample is used. When nothing is feasible with the
    /// inflated obstacle set the check is repeated with the smaller relaxed inflation before giving up.
    pub fn control(&mut self, s0: &RobotState<S>, goal: Vec2<S>, field: &ObstacleField) -> MppiOutput<S> {
        let steps = self.schedule.steps;
        let k = self.config.samples;
        let mut noise = vec![0.0f64; (k - 1) * steps * 2];
        for x in noise.iter_mut() {
            *x = StandardNormal.sample(&mut self.rng);
        }
        let (sa, sw) = (self.config.sigma_a, self.config.sigma_alpha);
        let params = self.params;
        let nominal = &self.nominal;
        let seqs: Vec<Vec<Control<S>>> = (0..k)
            .map(|i| {
                if i == 0 {
                    return nominal.clone();
                }
                let base = (i - 1) * steps * 2;
                nominal
                    .iter()
                    .enumerate()
                    .map(|(t, u)| {
                        let na = S::lit(noise[base + 2 * t]);
                        let nw = S::lit(noise[base + 2 * t + 1]);
                        params.saturate(Control::new(u.a + sa * na, u.alpha + sw * nw))
                    })
                    .collect()
            })
            .collect();

        let mut cfg = self.config.rollout;
        let mut relaxed = false;
        let mut costs = self.evaluate(s0, &seqs, goal, field, &cfg);
        if costs.iter().all(Option::is_none) && cfg.inflation > self.config.relaxed_inflation {
            cfg.inflation = self.config.relaxed_inflation;
            relaxed = true;
            costs = self.evaluate(s0, &seqs, goal, field, &cfg);
        }

        let mut feasible: Vec<(S, usize)> = costs.iter().enumerate().filter_map(|(i, c)| c.map(|c| (c, i))).collect();
        if feasible.is_empty() {
            self.reset();
            return MppiOutput { control: self.params.brake(s0, S::lit(0.1)), failure: true, j_min: None, feasible: 0, relaxed };
        }
        feasible.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        let n_feasible = feasible.len();
        let elite = (self.config.elite_fraction * S::lit(n_feasible as f64)).ceil().to_usize().unwrap_or(1).clamp(1, n_feasible);
        let j_min = feasible[0].0;
        let mut avg = vec![Control::<S>::default(); steps];
        let mut total = S::zero();
        for &(c, i) in &feasible[..elite] {
            let w = (-(c - j_min) / self.config.lambda).exp();
            total += w;
            for (a, u) in avg.iter_mut().zip(&seqs[i]) {
                a.a += w * u.a;
                a.alpha += w * u.alpha;
            }
        }
        for a in avg.iter_mut() {
            a.a /= total;
            a.alpha /= total;
            *a = self.params.saturate(*a);
        }
        let chosen = if elite == 1 {
            seqs[feasible[0].1].clone()
        } else {
            let r = rollout_planned(s0, &avg, &self.plan, &self.params, field, goal, &cfg);
            if r.feasible { avg } else { seqs[feasible[0].1].clone() }
        };
        let control = chosen[0];
        let mut next = chosen[1..].to_vec();
        next.push(*chosen.last().unwrap());
        self.nominal = next;
        MppiOutput { control, failure: false, j_min: Some(j_min), feasible: n_feasible, relaxed }
    }

    fn evaluate(&self, s0: &RobotState<S>, seqs: &[Vec<Control<S>>], goal: Vec2<S>, field: &ObstacleField, cfg: &RolloutConfig<S>) -> Vec<Option<S>> {
        seqs.par_iter()
            .map(|seq| {
                let r = rollout_planned(s0, seq, &self.plan, &self.params, field, goal, cfg);
                r.feasible.then_some(r.cost)
            })
            .collect()
    }
}
