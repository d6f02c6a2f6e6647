//! Exhaustive resolving-set verification.
//!
//! Every vertex gets a signature (its distances to the landmarks, in order),
//! packed into `u64` words at `ceil(log2(D + 1))` bits per entry. Vertex
//! indices are then sorted by `(signature, index)`; equal neighbours are
//! collisions. Among all colliding groups the reported pair is `(u, v)` with
//! `v` the smallest index whose signature already occurred at a smaller index
//! `u`, which does not depend on the worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bilform::{GraphSpec, IndexDistance, Vertex, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};

use super::construct::LandmarkSet;

/// Distances from one vertex to each landmark, in landmark order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature(pub Vec<u8>);

pub fn signature(spec: &GraphSpec, v: &Vertex, m: &LandmarkSet) -> Result<Signature> {
    if m.spec() != spec {
        return Err(Error::Domain(
            "landmark set belongs to another graph".into(),
        ));
    }
    m.landmarks()
        .iter()
        .map(|l| spec.distance(v, l).map(|x| x as u8))
        .collect::<Result<_>>()
        .map(Signature)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub u: u64,
    pub v: u64,
    pub signature: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyStats {
    pub vertices_checked: u64,
    pub wall_time_seconds: f64,
    pub workers: usize,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub q: u64,
    pub n: usize,
    pub d: usize,
    pub resolving: bool,
    pub counterexample: Option<Collision>,
    pub landmarks: usize,
    pub stats: VerifyStats,
}

impl Certificate {
    /// The verdict without run statistics. Keys come out sorted.
    pub fn canonical_value(&self) -> Value {
        json!({
            "spec": { "q": self.q, "n": self.n, "d": self.d },
            "resolving": self.resolving,
            "counterexample": self.counterexample,
            "landmarks": self.landmarks,
        })
    }

    pub fn full_value(&self) -> Value {
        let mut v = self.canonical_value();
        v["stats"] = json!(self.stats);
        v
    }

    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.canonical_value()).expect("plain JSON");
        s.push('\n');
        s
    }

    pub fn full_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.full_value()).expect("plain JSON");
        s.push('\n');
        s
    }

    /// Same verdict, ignoring statistics.
    pub fn same_verdict(&self, other: &Certificate) -> bool {
        self.canonical_value() == other.canonical_value()
    }
}

/// Re-checks a reported collision from scratch with matrix ranks.
pub fn check_collision(m: &LandmarkSet, c: &Collision) -> Result<bool> {
    let spec = m.spec();
    if c.u == c.v {
        return Ok(false);
    }
    let u = spec.vertex_at(crate::bilform::VertexIndex(c.u))?;
    let v = spec.vertex_at(crate::bilform::VertexIndex(c.v))?;
    let su = signature(spec, &u, m)?;
    let sv = signature(spec, &v, m)?;
    Ok(su == sv && su.0 == c.signature)
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
    pub cap: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            workers: 1,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

fn bits_per_entry(diameter: usize) -> usize {
    (usize::BITS - diameter.leading_zeros()).max(1) as usize
}

pub fn verify_resolving(
    m: &LandmarkSet,
    spec: &GraphSpec,
    opts: VerifyOptions,
) -> Result<Certificate> {
    if m.spec() != spec {
        return Err(Error::Domain(
            "landmark set belongs to another graph".into(),
        ));
    }
    let count = spec.enumerable(opts.cap)?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let workers = pool.current_num_threads();

    let kernel = IndexDistance::new(spec)?;
    let marks = m.indices()?;
    let bits = bits_per_entry(spec.diameter());
    let words = (marks.len() * bits).div_ceil(64).max(1);

    let collision = pool.install(|| {
        let mut packed = vec![0u64; count as usize * words];
        packed
            .par_chunks_mut(words)
            .enumerate()
            .for_each(|(x, out)| {
                for (k, &l) in marks.iter().enumerate() {
                    let dist = kernel.distance(x as u64, l) as u64;
                    let bit = k * bits;
                    out[bit / 64] |= dist << (bit % 64);
                    if bit % 64 + bits > 64 {
                        out[bit / 64 + 1] |= dist >> (64 - bit % 64);
                    }
                }
            });
        let sig = |i: u64| &packed[i as usize * words..(i as usize + 1) * words];
        let mut order: Vec<u64> = (0..count).collect();
        order.par_sort_unstable_by(|&a, &b| sig(a).cmp(sig(b)).then(a.cmp(&b)));
        order
            .par_windows(2)
            .filter(|w| sig(w[0]) == sig(w[1]))
            .map(|w| (w[1], w[0]))
            .min()
    });

    let counterexample = match collision {
        None => None,
        Some((v, _)) => {
            // smallest index sharing v's signature
            let vv = spec.vertex_at(crate::bilform::VertexIndex(v))?;
            let sv = signature(spec, &vv, m)?;
            let u = (0..v)
                .find(|&u| {
                    marks
                        .iter()
                        .zip(&sv.0)
                        .all(|(&l, &s)| kernel.distance(u, l) == s as usize)
                })
                .ok_or_else(|| Error::Internal("collision partner vanished".into()))?;
            Some(Collision {
                u,
                v,
                signature: sv.0,
            })
        }
    };

    Ok(Certificate {
        q: spec.q(),
        n: spec.n(),
        d: spec.d(),
        resolving: counterexample.is_none(),
        counterexample,
        landmarks: m.len(),
        stats: VerifyStats {
            vertices_checked: count,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            workers,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilform::VertexIndex;
    use crate::resolving::build_landmarks;

    fn h(q: u64, n: usize, d: usize) -> GraphSpec {
        GraphSpec::with_order(q, n, d).unwrap()
    }

    #[test]
    fn packing_width() {
        assert_eq!(bits_per_entry(1), 1);
        assert_eq!(bits_per_entry(2), 2);
        assert_eq!(bits_per_entry(3), 2);
        assert_eq!(bits_per_entry(4), 3);
    }

    #[test]
    fn own_position_is_zero() {
        let g = h(2, 2, 2);
        let (m, _) = build_landmarks(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        for (k, l) in m.landmarks().iter().enumerate() {
            let s = signature(&g, l, &m).unwrap();
            assert_eq!(s.0[k], 0);
            assert!(s.0.iter().all(|&x| x as usize <= g.diameter()));
        }
    }

    #[test]
    fn constructed_set_resolves() {
        let g = h(2, 2, 2);
        let (m, _) = build_landmarks(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        let c = verify_resolving(&m, &g, VerifyOptions::default()).unwrap();
        assert!(c.resolving);
        assert_eq!(c.stats.vertices_checked, 16);
    }

    #[test]
    fn empty_set_collides_on_first_pair() {
        let g = h(2, 2, 2);
        let m = LandmarkSet::from_indices(&g, &[]).unwrap();
        let c = verify_resolving(&m, &g, VerifyOptions::default()).unwrap();
        assert!(!c.resolving);
        let col = c.counterexample.unwrap();
        assert_eq!((col.u, col.v), (0, 1));
        assert!(check_collision(&m, &col).unwrap());
    }

    #[test]
    fn all_vertices_resolve() {
        let g = h(3, 2, 1);
        let all: Vec<u64> = (0..9).collect();
        let m = LandmarkSet::from_indices(&g, &all).unwrap();
        assert!(
            verify_resolving(&m, &g, VerifyOptions::default())
                .unwrap()
                .resolving
        );
    }

    #[test]
    fn collision_pair_is_reported_and_rechecked() {
        let g = h(2, 3, 2);
        let (mut m, _) = build_landmarks(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        m.remove(0);
        let mut m2 = m.clone();
        while m2.len() > 2 {
            m2.remove(m2.len() - 1);
        }
        let c = verify_resolving(&m2, &g, VerifyOptions::default()).unwrap();
        assert!(!c.resolving);
        let col = c.counterexample.clone().unwrap();
        assert!(col.u < col.v);
        assert!(check_collision(&m2, &col).unwrap());
        let u = g.vertex_at(VertexIndex(col.u)).unwrap();
        assert_eq!(signature(&g, &u, &m2).unwrap().0, col.signature);
    }

    #[test]
    fn worker_count_does_not_change_the_verdict() {
        let g = h(2, 3, 2);
        let m = LandmarkSet::from_indices(&g, &[1, 2, 3, 17, 40]).unwrap();
        let one = verify_resolving(
            &m,
            &g,
            VerifyOptions {
                workers: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let four = verify_resolving(
            &m,
            &g,
            VerifyOptions {
                workers: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one.canonical_json(), four.canonical_json());
        assert_eq!(four.stats.workers, 4);
    }

    #[test]
    fn cap_and_spec_mismatch() {
        let g = h(2, 3, 2);
        let m = LandmarkSet::from_indices(&g, &[0]).unwrap();
        let opts = VerifyOptions {
            workers: 1,
            cap: 10,
        };
        assert!(matches!(
            verify_resolving(&m, &g, opts),
            Err(Error::CapExceeded { .. })
        ));
        assert!(verify_resolving(&m, &h(2, 2, 2), VerifyOptions::default()).is_err());
    }
}
