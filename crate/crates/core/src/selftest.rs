//! Invariant suites run by `bilinear-md selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bilform::{GraphSpec, VertexIndex};
use crate::error::Result;
use crate::gf::Field;
use crate::linalg::{rref, Mat, Subspace};
use crate::partition::{build_partition, verify_partition};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const FIELD_ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 16, 25];

pub fn field_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("field");
    for q in FIELD_ORDERS {
        let f = Field::from_order(q)?;
        let els: Vec<u32> = f.elements().collect();
        for &a in &els {
            r.check(f.add(a, 0) == a && f.mul(a, 1) == a, || {
                format!("GF({q}): identities fail at {a}")
            });
            r.check(f.add(a, f.neg(a)) == 0, || format!("GF({q}): -{a}"));
            if a != 0 {
                r.check(f.mul(a, f.inv(a)) == 1, || format!("GF({q}): 1/{a}"));
            }
            for &b in &els {
                r.check(
                    f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a),
                    || format!("GF({q}): commutativity at {a}, {b}"),
                );
                r.check(f.sub(f.add(a, b), b) == a, || {
                    format!("GF({q}): ({a}+{b})-{b}")
                });
                for &c in &els {
                    r.check(
                        f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)),
                        || format!("GF({q}): distributivity at {a}, {b}, {c}"),
                    );
                    r.check(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)), || {
                        format!("GF({q}): associativity at {a}, {b}, {c}")
                    });
                }
            }
        }
        let nonzero = els.iter().filter(|&&a| a != 0).count() as u64;
        r.check(
            els.iter().all(|&a| a == 0 || f.pow(a, nonzero) == 1),
            || format!("GF({q}): a^(q-1) != 1"),
        );
    }
    Ok(r)
}

fn random_mat(f: &Field, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat {
    let data = (0..rows * cols).map(|_| rng.gen_range(0..f.q())).collect();
    Mat::new(f, rows, cols, data).expect("entries in range")
}

fn random_invertible(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Mat {
    loop {
        let m = random_mat(f, n, n, rng);
        if m.rank() == n {
            return m;
        }
    }
}

pub fn linalg_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("linalg");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for q in [2, 3, 4, 5] {
        let f = Field::from_order(q)?;
        for _ in 0..trials {
            let m = rng.gen_range(1..=7);
            let k = rng.gen_range(1..=m);
            let gens = random_mat(&f, k, m, &mut rng);
            let u = Subspace::row_space(&gens);
            // canonical form is independent of the spanning set
            let mixed = random_invertible(&f, k, &mut rng).mul(&gens)?;
            r.check(Subspace::row_space(&mixed) == u, || {
                format!("GF({q}): RREF not canonical for {gens:?}")
            });
            let once = rref(&gens);
            r.check(rref(&once.reduced).reduced == once.reduced, || {
                format!("GF({q}): RREF not idempotent")
            });
            r.check(once.rank == gens.rank() && u.dim() == once.rank, || {
                format!("GF({q}): rank mismatch")
            });

            let v = Subspace::row_space(&random_mat(&f, rng.gen_range(1..=m), m, &mut rng));
            let lhs = u.sum(&v)?.dim() + u.intersect_dim(&v)?;
            r.check(lhs == u.dim() + v.dim(), || {
                format!("GF({q}): modular identity fails for {u:?}, {v:?}")
            });
            let meet = u.intersect(&v)?;
            r.check(u.contains(&meet)? && v.contains(&meet)?, || {
                format!("GF({q}): intersection escapes")
            });
        }
    }
    Ok(r)
}

pub fn partition_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("partition");
    let cap = 1 << 20;
    for (q, t, s) in [
        (2, 1, 1),
        (2, 3, 3),
        (2, 4, 3),
        (3, 2, 2),
        (4, 2, 1),
        (2, 5, 4),
    ] {
        let f = Field::from_order(q)?;
        let p = build_partition(&f, t, s, cap)?;
        r.check(verify_partition(&p, cap)?.is_ok(), || {
            format!("({q},{t},{s}): not a partition")
        });
        // q^t pieces of size q^s - 1 and one of size q^t - 1 cover q^{s+t} - 1 vectors
        let covered = q.pow(t as u32) * (q.pow(s as u32) - 1) + q.pow(t as u32) - 1;
        r.check(
            covered == q.pow((s + t) as u32) - 1 && p.small_pieces.len() as u64 == q.pow(t as u32),
            || format!("({q},{t},{s}): cardinality identity fails"),
        );
    }
    Ok(r)
}

pub fn distance_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("distance");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (q, n, d) in [(2, 2, 2), (2, 4, 2), (2, 3, 3), (3, 2, 2), (4, 2, 3)] {
        let g = GraphSpec::with_order(q, n, d)?;
        let count = g.vertex_count() as u64;
        for _ in 0..trials {
            let (a, b) = (rng.gen_range(0..count), rng.gen_range(0..count));
            let u = g.vertex_at(VertexIndex(a))?;
            let v = g.vertex_at(VertexIndex(b))?;
            let rank = g.distance(&u, &v)?;
            let meet = g.subspace_of(&u)?.intersect_dim(&g.subspace_of(&v)?)?;
            r.check(rank == d - meet, || {
                format!("H_{q}({n},{d}): {a} vs {b}: rank {rank}, meet {meet}")
            });
        }
    }
    Ok(r)
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        field_suite()?,
        linalg_suite(seed, 200)?,
        partition_suite()?,
        distance_suite(seed, 500)?,
    ])
}
