//! Greedy nearest-neighbour chain ordering.

use super::union_find::UnionFind;
use crate::geometry::{path_length, Vec2};
use crate::scalar::Real;

/// Orders `points` into one open path that starts from point 0.
///
/// The path is grown from both ends: each step links whichever endpoint is closest to an
/// unlinked point (ties go to the tail, then to the lower index). Union-find guards every link
/// so no cycle can form. Returns indices into `points`.
pub fn order_chain<S: Real>(points: &[Vec2<S>]) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let mut uf = UnionFind::new(n);
    let mut linked = vec![false; n];
    linked[0] = true;
    let mut path = std::collections::VecDeque::with_capacity(n);
    path.push_back(0usize);
    for _ in 1..n {
        let (head, tail) = (*path.front().unwrap(), *path.back().unwrap());
        let mut best: Option<(S, bool, usize)> = None;
        for (j, &p) in points.iter().enumerate() {
            if linked[j] {
                continue;
            }
            for (at_tail, end) in [(true, tail), (false, head)] {
                if !at_tail && head == tail {
                    continue;
                }
                let d = points[end].distance(p);
                let better = match best {
                    None => true,
                    Some((bd, bt, _)) => d < bd || (d == bd && at_tail && !bt),
                };
                if better {
                    best = Some((d, at_tail, j));
                }
            }
        }
        let (_, at_tail, j) = best.expect("an unlinked point remains");
        let end = if at_tail { tail } else { head };
        let joined = uf.union(end, j);
        debug_assert!(joined, "link would close a cycle");
        linked[j] = true;
        if at_tail {
            path.push_back(j);
        } else {
            path.push_front(j);
        }
    }
    path.into_iter().collect()
}

/// Length of the open path visiting `points` in `order`.
pub fn path_cost<S: Real>(points: &[Vec2<S>], order: &[usize]) -> S {
    let pts: Vec<Vec2<S>> = order.iter().map(|&i| points[i]).collect();
    path_length(&pts)
}
