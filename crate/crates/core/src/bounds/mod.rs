//! Exact counting formulas, the competing bounds, and baseline solvers.

mod formulas;
mod report;
mod search;

pub use formulas::{
    babai_general, babai_strong, gaussian, rank_class_counts, theorem_bound, LogBase,
};
pub use report::{
    bounds_row, compare_report, default_grid, report_to_csv, report_to_json, Best, BoundsRow,
    ReportOptions, CSV_HEADER,
};
pub use search::{
    exact_min, exact_min_resolving, greedy, greedy_resolving, Metric, EXACT_SEARCH_CAP,
};
