//! Cross-frame centroid tracking with exponential smoothing.

use serde::{Deserialize, Serialize};

use super::order::order_chain;
use crate::error::Error;
use crate::geometry::Vec2;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct TrackerConfig<S> {
    /// Maximum match distance, meters.
    pub d_merge: S,
    /// Weight on the previous position; the new measurement gets `1 - alpha_old`.
    pub alpha_old: S,
    /// Tracks unmatched for more than this many consecutive updates are dropped.
    pub max_misses: u32,
}

impl<S: Real> Default for TrackerConfig<S> {
    fn default() -> Self {
        Self { d_merge: S::lit(1.5), alpha_old: S::lit(0.7), max_misses: 30 }
    }
}

impl<S: Real> TrackerConfig<S> {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.d_merge > S::zero()) {
            return Err(Error::Config("tracker d_merge must be positive".into()));
        }
        if !(self.alpha_old > S::zero() && self.alpha_old < S::one()) {
            return Err(Error::Config("tracker alpha_old must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn alpha_new(&self) -> S {
        S::one() - self.alpha_old
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentroidTrack<S> {
    pub id: u64,
    pub position: Vec2<S>,
    pub age: u32,
    pub misses: u32,
    pub visited: bool,
}

/// What one update did, by track id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrackUpdate {
    pub matched: Vec<(u64, usize)>,
    pub spawned: Vec<u64>,
    pub removed: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct CentroidTracker<S> {
    config: TrackerConfig<S>,
    tracks: Vec<CentroidTrack<S>>,
    next_id: u64,
}

impl<S: Real> CentroidTracker<S> {
    pub fn new(config: TrackerConfig<S>) -> Result<Self, Error> {
        config.validate()?;
        Ok(Self { config, tracks: Vec::new(), next_id: 0 })
    }

    pub fn config(&self) -> &TrackerConfig<S> {
        &self.config
    }

    /// Active tracks in ascending id order.
    pub fn tracks(&self) -> &[CentroidTrack<S>] {
        &self.tracks
    }

    pub fn get(&self, id: u64) -> Option<&CentroidTrack<S>> {
        self.tracks.iter().find(|t| t.id == id)
    }

    pub fn set_visited(&mut self, id: u64) -> bool {
        match self.tracks.iter_mut().find(|t| t.id == id) {
            Some(t) => {
                t.visited = true;
                true
            }
            None => false,
        }
    }

    /// Matches `centroids` to tracks and updates the set.
    ///
    /// Candidate pairs within `d_merge` are taken in ascending distance (ties: lower track id,
    /// then lower centroid index); each track and each centroid is used at most once.
    pub fn update(&mut self, centroids: &[Vec2<S>]) -> TrackUpdate {
        let mut pairs: Vec<(S, usize, usize)> = Vec::new();
        for (ti, t) in self.tracks.iter().enumerate() {
            for (ci, &c) in centroids.iter().enumerate() {
                let d = t.position.distance(c);
                if d <= self.config.d_merge {
                    pairs.push((d, ti, ci));
                }
            }
        }
        // tracks are stored by ascending id, so the track index orders ties by id
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut track_used = vec![false; self.tracks.len()];
        let mut centroid_used = vec![false; centroids.len()];
        let mut out = TrackUpdate::default();
        let (a_old, a_new) = (self.config.alpha_old, self.config.alpha_new());
        for (_, ti, ci) in pairs {
            if track_used[ti] || centroid_used[ci] {
                continue;
            }
            track_used[ti] = true;
            centroid_used[ci] = true;
            let t = &mut self.tracks[ti];
            t.position = t.position * a_old + centroids[ci] * a_new;
            t.misses = 0;
            out.matched.push((t.id, ci));
        }
        for (ti, t) in self.tracks.iter_mut().enumerate() {
            t.age += 1;
            if !track_used[ti] {
                t.misses += 1;
            }
        }
        let max = self.config.max_misses;
        out.removed = self.tracks.iter().filter(|t| t.misses > max).map(|t| t.id).collect();
        self.tracks.retain(|t| t.misses <= max);
        for (ci, &c) in centroids.iter().enumerate() {
            if !centroid_used[ci] {
                let id = self.next_id;
                self.next_id += 1;
                self.tracks.push(CentroidTrack { id, position: c, age: 0, misses: 0, visited: false });
                out.spawned.push(id);
            }
        }
        out.matched.sort_unstable();
        out
    }

    /// Current chain over all active tracks, starting from the lowest id.
    pub fn chain(&self) -> CentroidChain<S> {
        let pts: Vec<Vec2<S>> = self.tracks.iter().map(|t| t.position).collect();
        let links = order_chain(&pts)
            .into_iter()
            .map(|i| {
                let t = &self.tracks[i];
                ChainLink { id: t.id, position: t.position, visited: t.visited }
            })
            .collect();
        CentroidChain { links }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainLink<S> {
    pub id: u64,
    pub position: Vec2<S>,
    pub visited: bool,
}

/// Ordered snapshot of the tracked centroids. Position `k` in `links` is the chain index the
/// planners refer to.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CentroidChain<S> {
    pub links: Vec<ChainLink<S>>,
}

impl<S: Real> CentroidChain<S> {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn order(&self) -> Vec<u64> {
        self.links.iter().map(|l| l.id).collect()
    }

    pub fn positions(&self) -> Vec<Vec2<S>> {
        self.links.iter().map(|l| l.position).collect()
    }

    /// Consecutive id pairs.
    pub fn edges(&self) -> Vec<(u64, u64)> {
        self.links.windows(2).map(|w| (w[0].id, w[1].id)).collect()
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.links.iter().position(|l| l.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tracker(alpha_old: f64, d_merge: f64) -> CentroidTracker<f64> {
        CentroidTracker::new(TrackerConfig { d_merge, alpha_old, max_misses: 2 }).unwrap()
    }

    #[test]
    fn ema_update() {
        let mut t = tracker(0.8, 1.0);
        t.update(&[Vec2::new(0.0, 0.0)]);
        t.update(&[Vec2::new(0.1, 0.0)]);
        assert_eq!(t.tracks().len(), 1);
        assert!((t.tracks()[0].position.x - 0.02).abs() < 1e-15);
    }

    #[test]
    fn far_centroid_spawns() {
        let mut t = tracker(0.7, 1.0);
        t.update(&[Vec2::new(0.0, 0.0)]);
        let u = t.update(&[Vec2::new(2.0, 0.0)]);
        assert_eq!(u.spawned, vec![1]);
        assert_eq!(t.tracks().len(), 2);
    }

    #[test]
    fn misses_expire() {
        let mut t = tracker(0.7, 1.0);
        t.update(&[Vec2::new(0.0, 0.0)]);
        for _ in 0..2 {
            assert!(t.update(&[]).removed.is_empty());
        }
        assert_eq!(t.update(&[]).removed, vec![0]);
        assert!(t.tracks().is_empty());
    }

    #[test]
    fn equidistant_tie_goes_to_lower_id() {
        let mut t = tracker(0.5, 1.0);
        t.update(&[Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0)]);
        let u = t.update(&[Vec2::new(0.0, 0.0)]);
        assert_eq!(u.matched, vec![(0, 0)]);
    }

    #[test]
    fn invalid_alpha() {
        assert!(CentroidTracker::<f64>::new(TrackerConfig { alpha_old: 1.0, ..Default::default() }).is_err());
    }

    #[test]
    fn chain_starts_at_lowest_id() {
        let mut t = tracker(0.7, 0.5);
        t.update(&[Vec2::new(5.0, 0.0), Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0)]);
        let c = t.chain();
        assert_eq!(c.len(), 3);
        assert_eq!(c.links.iter().filter(|l| l.id == 0).count(), 1);
        assert_eq!(c.edges().len(), 2);
        assert!(c.order().contains(&0));
    }
}
