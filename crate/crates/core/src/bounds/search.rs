//! Baseline resolving-set solvers: greedy pair separation and exhaustive
//! minimum search.

use rayon::prelude::*;

use crate::bilform::{GraphSpec, IndexDistance};
use crate::error::Result;
use crate::resolving::LandmarkSet;

/// Largest vertex count accepted by the exhaustive search by default.
pub const EXACT_SEARCH_CAP: u64 = 128;

/// A finite metric on `0..order()`.
pub trait Metric: Sync {
    fn order(&self) -> u64;
    fn dist(&self, u: u64, v: u64) -> usize;
    fn diameter(&self) -> usize;
}

impl Metric for IndexDistance {
    fn order(&self) -> u64 {
        self.spec().vertex_count() as u64
    }

    fn dist(&self, u: u64, v: u64) -> usize {
        self.distance(u, v)
    }

    fn diameter(&self) -> usize {
        self.spec().diameter()
    }
}

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Vertices grouped by their signature so far, as dense class ids.
struct Classes {
    id: Vec<u32>,
    count: usize,
}

impl Classes {
    fn trivial(order: u64) -> Self {
        Classes {
            id: vec![0; order as usize],
            count: usize::from(order > 0),
        }
    }

    /// Unseparated pairs left after refining by distances to `c`.
    fn remaining_after<M: Metric>(&self, m: &M, c: u64) -> u64 {
        let width = m.diameter() + 1;
        let mut counts = vec![0u64; self.count * width];
        for (x, &k) in self.id.iter().enumerate() {
            counts[k as usize * width + m.dist(x as u64, c)] += 1;
        }
        counts.into_iter().map(pairs).sum()
    }

    fn refine<M: Metric>(&mut self, m: &M, c: u64) {
        let width = m.diameter() + 1;
        let mut remap = vec![u32::MAX; self.count * width];
        let mut next = 0u32;
        for (x, k) in self.id.iter_mut().enumerate() {
            let slot = &mut remap[*k as usize * width + m.dist(x as u64, c)];
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
            *k = *slot;
        }
        self.count = next as usize;
    }

    fn max_size(&self) -> u64 {
        let mut sizes = vec![0u64; self.count];
        for &k in &self.id {
            sizes[k as usize] += 1;
        }
        sizes.into_iter().max().unwrap_or(0)
    }

    fn resolved(&self) -> bool {
        self.count == self.id.len()
    }
}

/// Repeatedly adds the vertex leaving the fewest unseparated pairs, ties to
/// the smallest index, until every pair is separated.
pub fn greedy<M: Metric>(m: &M) -> Vec<u64> {
    let mut classes = Classes::trivial(m.order());
    let mut chosen = Vec::new();
    while !classes.resolved() {
        let (_, best) = (0..m.order())
            .into_par_iter()
            .map(|c| (classes.remaining_after(m, c), c))
            .min()
            .expect("a nonempty graph with unresolved pairs");
        classes.refine(m, best);
        chosen.push(best);
    }
    chosen
}

/// Size of a smallest resolving set, if one of size at most `k_max` exists.
pub fn exact_min<M: Metric>(m: &M, k_max: usize) -> Option<usize> {
    let classes = Classes::trivial(m.order());
    (0..=k_max).find(|&k| search(m, &classes, 0, k))
}

fn search<M: Metric>(m: &M, classes: &Classes, from: u64, left: usize) -> bool {
    if classes.resolved() {
        return true;
    }
    if left == 0 {
        return false;
    }
    let reach = (m.diameter() as u64 + 1).saturating_pow(left as u32);
    if classes.max_size() > reach {
        return false;
    }
    (from..m.order()).any(|c| {
        let mut next = Classes {
            id: classes.id.clone(),
            count: classes.count,
        };
        next.refine(m, c);
        next.count > classes.count && search(m, &next, c + 1, left - 1)
    })
}

/// Greedy baseline on the whole graph.
pub fn greedy_resolving(spec: &GraphSpec, cap: u64) -> Result<LandmarkSet> {
    spec.enumerable(cap)?;
    let kernel = IndexDistance::new(spec)?;
    LandmarkSet::from_indices(spec, &greedy(&kernel))
}

/// Exhaustive minimum, searched up to `k_max` landmarks.
pub fn exact_min_resolving(spec: &GraphSpec, k_max: usize, cap: u64) -> Result<Option<usize>> {
    spec.enumerable(cap)?;
    let kernel = IndexDistance::new(spec)?;
    Ok(exact_min(&kernel, k_max))
}
