//! The `bilinear-md` command line.
//!
//! Artifacts go to `--out` or standard output, diagnostics to standard error.
//! Exit status: 0 success, 1 negative verdict, 2 usage or input error, 3 cap
//! exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bilform::{
    vertices_from_csv, vertices_to_csv, GraphSpec, VertexIndex, DEFAULT_ENUMERATION_CAP,
};
use crate::bounds::{
    compare_report, default_grid, exact_min_resolving, greedy_resolving, report_to_csv,
    report_to_json, LogBase, ReportOptions, EXACT_SEARCH_CAP,
};
use crate::error::{Error, Result};
use crate::resolving::{
    build_landmarks, find_separating_landmark, landmark_file_json, read_landmark_file,
    verify_resolving, LandmarkSet, VerifyOptions,
};
use crate::selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "bilinear-md",
    version,
    about = "Resolving sets for bilinear forms graphs H_q(n, d)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Field order, a prime power
    #[arg(long)]
    pub q: Option<u64>,
    /// Rows of the vertex matrices
    #[arg(long)]
    pub n: Option<usize>,
    /// Columns of the vertex matrices
    #[arg(long)]
    pub d: Option<usize>,
}

impl GraphArgs {
    fn any(&self) -> bool {
        self.q.is_some() || self.n.is_some() || self.d.is_some()
    }

    fn spec(&self) -> Result<GraphSpec> {
        match (self.q, self.n, self.d) {
            (Some(q), Some(n), Some(d)) => GraphSpec::with_order(q, n, d),
            _ => Err(Error::Domain("--q, --n and --d are all required".into())),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the artifact here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the landmark family and write a landmark file
    Construct {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check that a landmark set resolves every vertex
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        /// Landmark file (JSON, or digit strings with a .csv extension); built on the fly when absent
        #[arg(long)]
        landmarks: Option<PathBuf>,
        /// Worker threads; 0 uses every core
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        /// Omit run statistics from the certificate
        #[arg(long)]
        canonical: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Find the landmark separating two vertices, given by index
    Witness {
        #[command(flatten)]
        graph: GraphArgs,
        a: u64,
        b: u64,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Landmark-family size against Babai's bounds for one graph
    Bounds {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "e")]
        log_base: LogBase,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bound comparison over q in {2, 3}, 2 <= d <= n <= 6
    Table {
        #[arg(long, default_value = "e")]
        log_base: LogBase,
        /// Run greedy on graphs with at most this many vertices
        #[arg(long, default_value_t = 1 << 10)]
        greedy_cap: u64,
        /// Run the exhaustive search on graphs with at most this many vertices
        #[arg(long, default_value_t = 16)]
        exact_cap: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Greedy and exhaustive baseline resolving sets
    Search {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        /// Vertex limit for the exhaustive search
        #[arg(long, default_value_t = EXACT_SEARCH_CAP)]
        exact_cap: u64,
        /// Largest set size tried by the exhaustive search; defaults to the greedy size
        #[arg(long)]
        k_max: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Field, linear algebra, partition and distance invariant suites
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Internal(_) => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

fn emit(output: &OutputArgs, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_landmarks(path: &Path, graph: &GraphArgs) -> Result<LandmarkSet> {
    if path.extension().is_some_and(|e| e == "csv") {
        let spec = graph.spec()?;
        let vertices = vertices_from_csv(&spec, &std::fs::read_to_string(path)?)?;
        return LandmarkSet::new(&spec, vertices, None);
    }
    let set = read_landmark_file(path)?;
    if graph.any() && &graph.spec()? != set.spec() {
        return Err(Error::Domain(
            "--q/--n/--d disagree with the landmark file".into(),
        ));
    }
    Ok(set)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain JSON");
    s.push('\n');
    s
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Construct { graph, cap, output } => {
            let spec = graph.spec()?;
            let (set, ctx) = build_landmarks(&spec, cap)?;
            writeln!(
                stderr,
                "H_{}({}, {}): case {}, {} blocks, {} landmarks",
                spec.q(),
                spec.n(),
                spec.d(),
                ctx.case.number(),
                ctx.blocks.len(),
                set.len()
            )?;
            let text = match output.format {
                Format::Json => landmark_file_json(&set, Some(&ctx)),
                Format::Csv => vertices_to_csv(&spec, set.landmarks())?,
            };
            emit(&output, &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            graph,
            landmarks,
            workers,
            cap,
            canonical,
            output,
        } => {
            let set = match &landmarks {
                Some(path) => read_landmarks(path, &graph)?,
                None => build_landmarks(&graph.spec()?, cap)?.0,
            };
            let cert = verify_resolving(&set, set.spec(), VerifyOptions { workers, cap })?;
            if canonical {
                writeln!(stderr, "{}", serde_json::to_string(&cert.stats)?)?;
            }
            match &cert.counterexample {
                None => writeln!(stderr, "resolving: {} landmarks", cert.landmarks)?,
                Some(c) => writeln!(
                    stderr,
                    "not resolving: vertices {} and {} collide",
                    c.u, c.v
                )?,
            }
            let text = if canonical {
                cert.canonical_json()
            } else {
                cert.full_json()
            };
            emit(&output, &text, stdout)?;
            Ok(if cert.resolving {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Witness {
            graph,
            a,
            b,
            cap,
            output,
        } => {
            let spec = graph.spec()?;
            let (_, ctx) = build_landmarks(&spec, cap)?;
            let va = spec.vertex_at(VertexIndex(a))?;
            let vb = spec.vertex_at(VertexIndex(b))?;
            let w = find_separating_landmark(&va, &vb, &ctx)?;
            let v = json!({
                "a": a,
                "b": b,
                "block": w.block,
                "label": w.label,
                "coords": w.coords,
                "position": w.position,
                "landmark": spec.index_of(&w.landmark)?.0,
                "landmark_matrix": w.landmark.matrix().to_rows(),
                "dims": [w.dims.0, w.dims.1],
                "branch": w.branch,
            });
            emit(&output, &pretty(&v), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Bounds {
            graph,
            log_base,
            output,
        } => {
            let spec = graph.spec()?;
            let opts = ReportOptions {
                log_base,
                ..Default::default()
            };
            let rows = compare_report(&[(spec.q(), spec.n(), spec.d())], &opts)?;
            let text = match output.format {
                Format::Json => report_to_json(&rows),
                Format::Csv => report_to_csv(&rows)?,
            };
            emit(&output, &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Table {
            log_base,
            greedy_cap,
            exact_cap,
            output,
        } => {
            let opts = ReportOptions {
                log_base,
                greedy_cap,
                exact_cap,
            };
            let rows = compare_report(&default_grid(), &opts)?;
            let text = match output.format {
                Format::Json => report_to_json(&rows),
                Format::Csv => report_to_csv(&rows)?,
            };
            emit(&output, &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Search {
            graph,
            cap,
            exact_cap,
            k_max,
            output,
        } => {
            let spec = graph.spec()?;
            let greedy = greedy_resolving(&spec, cap)?;
            let cert = verify_resolving(&greedy, &spec, VerifyOptions { workers: 1, cap })?;
            let exact = if spec.vertex_count() <= exact_cap as u128 {
                exact_min_resolving(&spec, k_max.unwrap_or(greedy.len()), exact_cap)?
            } else {
                writeln!(
                    stderr,
                    "skipping exhaustive search: more than {exact_cap} vertices"
                )?;
                None
            };
            let v = json!({
                "spec": { "q": spec.q(), "n": spec.n(), "d": spec.d() },
                "greedy": {
                    "size": greedy.len(),
                    "landmarks": greedy.indices()?,
                    "resolving": cert.resolving,
                },
                "exact_min": exact,
            });
            emit(&output, &pretty(&v), stdout)?;
            Ok(if cert.resolving {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Selftest { seed, output } => {
            let suites = selftest::run_all(seed)?;
            for s in &suites {
                writeln!(
                    stderr,
                    "{:<10} {:>8} checks  {}",
                    s.name,
                    s.checks,
                    if s.passed() { "ok" } else { "FAILED" }
                )?;
                for f in &s.failures {
                    writeln!(stderr, "  {f}")?;
                }
            }
            emit(&output, &pretty(&json!(suites)), stdout)?;
            Ok(if suites.iter().all(|s| s.passed()) {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
