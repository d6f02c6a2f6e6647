//! Side-by-side comparison of the landmark-family size with Babai's bounds.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bilform::GraphSpec;
use crate::error::Result;

use super::formulas::{babai_general, babai_strong, theorem_bound, LogBase};
use super::search::{exact_min_resolving, greedy_resolving};

pub const CSV_HEADER: [&str; 11] = [
    "q",
    "n",
    "d",
    "theorem_bound",
    "babai_general",
    "babai_strong",
    "babai_M",
    "log_base",
    "greedy_size",
    "exact_min",
    "best",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Best {
    Theorem,
    BabaiGeneral,
    BabaiStrong,
}

impl Best {
    pub fn as_str(self) -> &'static str {
        match self {
            Best::Theorem => "theorem",
            Best::BabaiGeneral => "babai_general",
            Best::BabaiStrong => "babai_strong",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsRow {
    pub q: u64,
    pub n: usize,
    pub d: usize,
    pub theorem_bound: BigUint,
    pub babai_general: f64,
    pub babai_strong: f64,
    pub babai_m: BigUint,
    pub log_base: LogBase,
    pub greedy_size: Option<usize>,
    pub exact_min: Option<usize>,
    pub best: Best,
    pub theorem_beats_general: bool,
    pub theorem_beats_strong: bool,
}

/// Which baselines to run, by vertex count.
#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    pub log_base: LogBase,
    /// Run greedy when `q^{nd}` is at most this.
    pub greedy_cap: u64,
    /// Run the exhaustive search when `q^{nd}` is at most this.
    pub exact_cap: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            log_base: LogBase::E,
            greedy_cap: 1 << 10,
            exact_cap: 16,
        }
    }
}

pub fn bounds_row(q: u64, n: usize, d: usize, opts: &ReportOptions) -> Result<BoundsRow> {
    let theorem = theorem_bound(q, n, d)?;
    let general = babai_general(q, n, d, opts.log_base);
    let (strong, m) = babai_strong(q, n, d, opts.log_base);
    let t = theorem.to_f64().unwrap_or(f64::INFINITY);
    let best = if t <= general && t <= strong {
        Best::Theorem
    } else if general <= strong {
        Best::BabaiGeneral
    } else {
        Best::BabaiStrong
    };
    let spec = GraphSpec::with_order(q, n, d)?;
    let small = |cap: u64| spec.vertex_count() <= cap as u128;
    let greedy_size = if small(opts.greedy_cap) {
        Some(greedy_resolving(&spec, opts.greedy_cap)?.len())
    } else {
        None
    };
    let exact_min = if small(opts.exact_cap) {
        let k_max = greedy_size.unwrap_or(spec.vertex_count() as usize);
        exact_min_resolving(&spec, k_max, opts.exact_cap)?
    } else {
        None
    };
    Ok(BoundsRow {
        q,
        n,
        d,
        theorem_bound: theorem,
        babai_general: general,
        babai_strong: strong,
        babai_m: m,
        log_base: opts.log_base,
        greedy_size,
        exact_min,
        best,
        theorem_beats_general: t < general,
        theorem_beats_strong: t < strong,
    })
}

pub fn compare_report(
    grid: &[(u64, usize, usize)],
    opts: &ReportOptions,
) -> Result<Vec<BoundsRow>> {
    grid.iter()
        .map(|&(q, n, d)| bounds_row(q, n, d, opts))
        .collect()
}

/// `q in {2, 3}`, `2 <= d <= n <= 6`.
pub fn default_grid() -> Vec<(u64, usize, usize)> {
    let mut grid = Vec::new();
    for q in [2, 3] {
        for n in 2..=6 {
            for d in 2..=n {
                grid.push((q, n, d));
            }
        }
    }
    grid
}

fn big_json(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

impl BoundsRow {
    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "n": self.n,
            "d": self.d,
            "theorem_bound": big_json(&self.theorem_bound),
            "babai_general": self.babai_general,
            "babai_strong": self.babai_strong,
            "babai_M": big_json(&self.babai_m),
            "log_base": self.log_base,
            "greedy_size": self.greedy_size,
            "exact_min": self.exact_min,
            "best": self.best,
            "theorem_beats_general": self.theorem_beats_general,
            "theorem_beats_strong": self.theorem_beats_strong,
        })
    }

    fn csv_record(&self) -> [String; 11] {
        let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            self.q.to_string(),
            self.n.to_string(),
            self.d.to_string(),
            self.theorem_bound.to_string(),
            self.babai_general.to_string(),
            self.babai_strong.to_string(),
            self.babai_m.to_string(),
            self.log_base.to_string(),
            opt(self.greedy_size),
            opt(self.exact_min),
            self.best.as_str().to_string(),
        ]
    }
}

pub fn report_to_csv(rows: &[BoundsRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.csv_record())?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ASCII output"))
}

pub fn report_to_json(rows: &[BoundsRow]) -> String {
    let v = Value::Array(rows.iter().map(BoundsRow::to_json).collect());
    let mut s = serde_json::to_string_pretty(&v).expect("plain JSON");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_baselines() -> ReportOptions {
        ReportOptions {
            greedy_cap: 0,
            exact_cap: 0,
            ..Default::default()
        }
    }

    #[test]
    fn empty_grid() {
        assert!(compare_report(&[], &ReportOptions::default())
            .unwrap()
            .is_empty());
        assert_eq!(report_to_csv(&[]).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn row_2_2_2() {
        let r = bounds_row(2, 2, 2, &ReportOptions::default()).unwrap();
        assert_eq!(r.theorem_bound, BigUint::from(16u32));
        assert_eq!(r.babai_m, BigUint::from(9u32));
        assert!((r.babai_strong - 25.35).abs() < 0.01);
        assert_eq!(r.best, Best::Theorem);
        let g = r.greedy_size.unwrap();
        assert!(r.exact_min.unwrap() <= g && g <= 16);
    }

    #[test]
    fn theorem_beats_general_for_large_n_d() {
        let grid: Vec<_> = default_grid()
            .into_iter()
            .filter(|&(_, n, d)| n >= 4 && d >= 4)
            .collect();
        assert_eq!(grid.len(), 12);
        for r in compare_report(&grid, &no_baselines()).unwrap() {
            assert!(r.theorem_beats_general, "{:?}", (r.q, r.n, r.d));
        }
    }

    #[test]
    fn csv_and_json_mirror() {
        let rows = compare_report(&[(2, 3, 2), (3, 4, 4)], &no_baselines()).unwrap();
        let csv = report_to_csv(&rows).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "q,n,d,theorem_bound,babai_general,babai_strong,babai_M,log_base,greedy_size,exact_min,best");
        assert!(lines[1].starts_with("2,3,2,32,"));
        assert!(lines[2].starts_with("3,4,4,6561,"));
        let json: Value = serde_json::from_str(&report_to_json(&rows)).unwrap();
        for (row, line) in json.as_array().unwrap().iter().zip(&lines[1..]) {
            let cells: Vec<&str> = line.split(',').collect();
            for (k, key) in CSV_HEADER.iter().enumerate() {
                let text = match &row[*key] {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    v => v.to_string(),
                };
                assert_eq!(text, cells[k], "{key}");
            }
        }
    }
}
