//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits nonzero if any failed.

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bilinear_md::bilform::{GraphSpec, VertexIndex, DEFAULT_ENUMERATION_CAP as CAP};
use bilinear_md::bounds::{
    babai_general, babai_strong, compare_report, default_grid, exact_min_resolving,
    greedy_resolving, rank_class_counts, theorem_bound, LogBase, ReportOptions,
};
use bilinear_md::gf::Field;
use bilinear_md::partition::{build_partition, verify_partition};
use bilinear_md::resolving::{
    build_landmarks, find_separating_landmark, verify_resolving, Branch, VerifyOptions,
};

const SIZES: [((u64, usize, usize), u64); 8] = [
    ((2, 4, 2), 32),
    ((2, 5, 2), 64),
    ((2, 5, 3), 128),
    ((2, 2, 2), 16),
    ((2, 3, 2), 32),
    ((2, 3, 3), 64),
    ((2, 4, 3), 128),
    ((3, 2, 2), 81),
];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn h(q: u64, n: usize, d: usize) -> GraphSpec {
    GraphSpec::with_order(q, n, d).unwrap()
}

fn sizes() -> Outcome {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for ((q, n, d), want) in SIZES {
        let start = Instant::now();
        let (set, _) = build_landmarks(&h(q, n, d), CAP).unwrap();
        let took = start.elapsed();
        slowest = slowest.max(took);
        let bound = theorem_bound(q, n, d).unwrap();
        if set.len() as u64 != want
            || bound != BigUint::from(want)
            || took >= Duration::from_secs(1)
        {
            bad.push(format!(
                "({q},{n},{d}): |M|={} bound={bound} in {took:?}",
                set.len()
            ));
        }
    }
    outcome(
        bad.is_empty(),
        format!("8 specs, slowest {slowest:.2?} {}", bad.join("; ")),
    )
}

fn resolving() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for ((q, n, d), _) in SIZES {
        let g = h(q, n, d);
        let (set, _) = build_landmarks(&g, CAP).unwrap();
        let cert = verify_resolving(
            &set,
            &g,
            VerifyOptions {
                workers: 1,
                cap: CAP,
            },
        )
        .unwrap();
        if !cert.resolving {
            bad.push(format!("({q},{n},{d}): {:?}", cert.counterexample));
        }
    }
    let took = start.elapsed();
    let ok = bad.is_empty() && took < Duration::from_secs(60);
    outcome(
        ok,
        format!("8 specs single-threaded in {took:.2?} {}", bad.join("; ")),
    )
}

fn partitions() -> Outcome {
    let mut bad = Vec::new();
    for (q, t, s) in [
        (2, 1, 1),
        (2, 3, 3),
        (2, 4, 3),
        (3, 2, 2),
        (2, 4, 4),
        (2, 5, 4),
    ] {
        let f = Field::from_order(q).unwrap();
        let p = build_partition(&f, t, s, CAP).unwrap();
        let sound = verify_partition(&p, CAP).unwrap().is_ok();
        let qt = q.pow(t as u32);
        let covered = p.small_pieces.len() as u64 * (q.pow(s as u32) - 1) + (qt - 1);
        let dims_ok = p.big_dim() == t && p.small_pieces.iter().all(|x| x.space.dim() == s);
        if !sound
            || !dims_ok
            || p.small_pieces.len() as u64 != qt
            || covered != q.pow((s + t) as u32) - 1
        {
            bad.push(format!("({q},{t},{s})"));
        }
    }
    outcome(bad.is_empty(), format!("6 partitions {}", bad.join("; ")))
}

fn distance_oracle() -> Outcome {
    let mut mismatches = 0u64;
    let mut checked = 0u64;
    let mut compare = |g: &GraphSpec, a: u64, b: u64| {
        let u = g.vertex_at(VertexIndex(a)).unwrap();
        let v = g.vertex_at(VertexIndex(b)).unwrap();
        let rank = g.distance(&u, &v).unwrap();
        let meet = g
            .subspace_of(&u)
            .unwrap()
            .intersect_dim(&g.subspace_of(&v).unwrap())
            .unwrap();
        checked += 1;
        if rank != g.d() - meet {
            mismatches += 1;
        }
    };
    let g = h(2, 2, 2);
    for a in 0..16 {
        for b in a + 1..16 {
            compare(&g, a, b);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (q, n, d) in [(2, 4, 2), (2, 3, 3), (3, 2, 2)] {
        let g = h(q, n, d);
        let count = g.vertex_count() as u64;
        for _ in 0..10_000 {
            compare(&g, rng.gen_range(0..count), rng.gen_range(0..count));
        }
    }
    outcome(
        mismatches == 0 && checked == 30_120,
        format!("{checked} pairs, {mismatches} mismatches"),
    )
}

fn witnesses() -> Outcome {
    let mut failures = Vec::new();
    let mut counts = [0u64; 3];
    let mut pairs = 0u64;
    for (q, n, d) in [(2, 2, 2), (2, 3, 2)] {
        let g = h(q, n, d);
        let (set, ctx) = build_landmarks(&g, CAP).unwrap();
        let count = g.vertex_count() as u64;
        for a in 0..count {
            for b in a + 1..count {
                pairs += 1;
                let va = g.vertex_at(VertexIndex(a)).unwrap();
                let vb = g.vertex_at(VertexIndex(b)).unwrap();
                let w = match find_separating_landmark(&va, &vb, &ctx) {
                    Ok(w) => w,
                    Err(e) => {
                        failures.push(format!("H_{q}({n},{d}) {a},{b}: {e}"));
                        continue;
                    }
                };
                let u = g.subspace_of(&w.landmark).unwrap();
                let da = g.subspace_of(&va).unwrap().intersect_dim(&u).unwrap();
                let db = g.subspace_of(&vb).unwrap().intersect_dim(&u).unwrap();
                if set.landmarks()[w.position] != w.landmark || da == db || (da, db) != w.dims {
                    failures.push(format!("H_{q}({n},{d}) {a},{b}"));
                }
                counts[Branch::ALL.iter().position(|&x| x == w.branch).unwrap()] += 1;
            }
        }
    }
    let ok = failures.is_empty() && pairs == 120 + 2016 && counts.iter().all(|&c| c > 0);
    outcome(
        ok,
        format!(
            "{pairs} pairs, {} failures, branches unequal/dependent/independent = {}/{}/{}",
            failures.len(),
            counts[0],
            counts[1],
            counts[2]
        ),
    )
}

fn rank_distribution() -> Outcome {
    let g = h(2, 2, 2);
    let mut buckets = vec![0u64; 3];
    for (_, v) in g.enumerate_vertices(CAP).unwrap() {
        buckets[v.matrix().rank()] += 1;
    }
    let formula = rank_class_counts(2, 2, 2);
    let matches = formula
        .iter()
        .zip(&buckets)
        .all(|(f, &b)| *f == BigUint::from(b))
        && buckets == [1, 9, 6];
    let sums = SIZES.iter().all(|&((q, n, d), _)| {
        let total: BigUint = rank_class_counts(q, n, d).into_iter().sum();
        total == BigUint::from(q).pow((n * d) as u32)
    });
    let (_, m) = babai_strong(2, 2, 2, LogBase::E);
    let ok = matches && sums && m == BigUint::from(9u32);
    outcome(
        ok,
        format!("enumerated {buckets:?}, sums exact: {sums}, babai_M = {m}"),
    )
}

fn bound_comparison() -> Outcome {
    const TARGET: f64 = 11356.33;
    const TOLERANCE: f64 = 0.01;
    let general = babai_general(2, 4, 4, LogBase::E);
    let value_ok = (general - TARGET).abs() <= TOLERANCE;
    let theorem_ok = theorem_bound(2, 4, 4).unwrap() == BigUint::from(256u32);
    let grid: Vec<_> = default_grid()
        .into_iter()
        .filter(|&(_, n, d)| n >= 4 && d >= 4)
        .collect();
    let opts = ReportOptions {
        log_base: LogBase::E,
        greedy_cap: 0,
        exact_cap: 0,
    };
    let rows = compare_report(&grid, &opts).unwrap();
    let flags_ok = rows.len() == 12 && rows.iter().all(|r| r.theorem_beats_general);
    outcome(
        value_ok && theorem_ok && flags_ok,
        format!(
            "babai_general(2,4,4) = {general:.4} vs {TARGET} +/- {TOLERANCE}: {}; theorem_bound(2,4,4) = 256: {}; \
             theorem below babai_general on {}/{} grid points: {}",
            pass(value_ok),
            pass(theorem_ok),
            rows.iter().filter(|r| r.theorem_beats_general).count(),
            rows.len(),
            pass(flags_ok)
        ),
    )
}

fn exact_values() -> Outcome {
    let k4 = exact_min_resolving(&h(2, 2, 1), 4, CAP).unwrap();
    let k2 = exact_min_resolving(&h(2, 1, 1), 2, CAP).unwrap();
    let g = h(2, 2, 2);
    let greedy = greedy_resolving(&g, CAP).unwrap();
    let verified = verify_resolving(&greedy, &g, VerifyOptions::default())
        .unwrap()
        .resolving;
    let exact = exact_min_resolving(&g, greedy.len(), CAP).unwrap();
    let ok = k4 == Some(3)
        && k2 == Some(1)
        && verified
        && greedy.len() <= 16
        && exact.is_some_and(|e| e <= greedy.len());
    outcome(
        ok,
        format!(
            "K4 -> {k4:?}, K2 -> {k2:?}, greedy H_2(2,2) = {} (verified: {verified}), exact H_2(2,2) = {exact:?}",
            greedy.len()
        ),
    )
}

fn isomorphism() -> Outcome {
    let g = h(2, 3, 2);
    let t = g.transposed();
    let vs: Vec<_> = g.enumerate_vertices(CAP).unwrap().map(|(_, v)| v).collect();
    let images: HashSet<u64> = vs
        .iter()
        .map(|v| t.index_of(&v.transpose_map()).unwrap().0)
        .collect();
    let mut mismatches = 0;
    for a in &vs {
        for b in &vs {
            if g.distance(a, b).unwrap()
                != t.distance(&a.transpose_map(), &b.transpose_map()).unwrap()
            {
                mismatches += 1;
            }
        }
    }
    let ok = mismatches == 0 && images.len() == 64 && vs.len() == 64;
    outcome(
        ok,
        format!(
            "64 vertices, bijective: {}, {mismatches} distance mismatches",
            images.len() == 64
        ),
    )
}

fn run_bin(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bilinear-md"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut notes = Vec::new();
    let mut ok = true;
    for run in ["a", "b"] {
        let lm = path(&format!("landmarks_{run}.json"));
        let (c1, _) = run_bin(&[
            "construct",
            "--q",
            "2",
            "--n",
            "4",
            "--d",
            "2",
            "--out",
            &lm,
        ]);
        let cert = path(&format!("cert_{run}.json"));
        let (c2, _) = run_bin(&["verify", "--landmarks", &lm, "--canonical", "--out", &cert]);
        ok &= c1 == 0 && c2 == 0;
    }
    let read = |name: &str| std::fs::read(path(name)).unwrap();
    let same_landmarks = read("landmarks_a.json") == read("landmarks_b.json");
    let same_certs = read("cert_a.json") == read("cert_b.json");
    notes.push(format!("landmark files identical: {same_landmarks}"));
    notes.push(format!("certificates identical: {same_certs}"));

    let mut by_workers = Vec::new();
    for w in ["1", "4"] {
        let (code, out) = run_bin(&[
            "verify",
            "--q",
            "2",
            "--n",
            "5",
            "--d",
            "3",
            "--workers",
            w,
            "--canonical",
        ]);
        ok &= code == 0;
        by_workers.push(out);
    }
    let workers_agree = by_workers[0] == by_workers[1];
    notes.push(format!("1 vs 4 workers identical: {workers_agree}"));

    let g = h(2, 4, 2);
    let (set, _) = build_landmarks(&g, CAP).unwrap();
    let in_process = verify_resolving(&set, &g, VerifyOptions::default())
        .unwrap()
        .canonical_json();
    let round_trip = in_process.as_bytes() == read("cert_a.json");
    notes.push(format!("file round trip matches in-process: {round_trip}"));

    ok &= same_landmarks && same_certs && workers_agree && round_trip;
    outcome(ok, notes.join(", "))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("landmark family sizes", sizes),
        ("resolving verification", resolving),
        ("partition soundness", partitions),
        ("distance oracle equivalence", distance_oracle),
        ("separating witnesses", witnesses),
        ("rank distribution", rank_distribution),
        ("bound comparison", bound_comparison),
        ("known exact values", exact_values),
        ("transpose isomorphism", isomorphism),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {:>2} {} {name} ({:.2?}): {}",
            k + 1,
            pass(result.ok),
            start.elapsed(),
            result.detail
        );
        if !result.ok {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
