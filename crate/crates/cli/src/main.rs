//! `kneading` command-line tool.
//!
//! Exit codes: 0 success, 1 verification or computation failure, 2 bad input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use kneading::error::{AnalysisError, MarkovError};
use kneading::io::{format_real, human_summary, load_map_spec, parse_rational, sweep_values, ReportFile};
use kneading::mc::{estimate_escape_rate, simulate_survival};
use kneading::{analyze, validate_map, AnalyzeOptions, OrbitOptions, SpectralOptions};

#[derive(Parser)]
#[command(name = "kneading", version, about = "Kneading determinants, dimension and escape rate of expanding maps with a hole")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write a JSON report.
    Analyze {
        spec: PathBuf,
        #[command(flatten)]
        numeric: NumericArgs,
        /// Report file; without it the report goes to stdout and the summary to stderr.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the exact matrix identities and print one line per identity.
    Verify {
        spec: PathBuf,
        #[arg(long, default_value_t = kneading::symbolic::DEFAULT_CAP)]
        cap: usize,
    },
    /// Evaluate a one-parameter family of maps; writes CSV.
    Sweep {
        template: PathBuf,
        /// Name of the free parameter in the template expressions.
        #[arg(long, default_value = "p")]
        param: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        numeric: NumericArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Particle survival simulation; writes the survivor counts as CSV.
    Simulate {
        spec: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        n_points: usize,
        #[arg(long, default_value_t = 30)]
        k_max: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Iterations skipped before fitting the decay rate.
        #[arg(long, default_value_t = 5)]
        burn_in: usize,
        /// Worker threads (the counts do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct NumericArgs {
    /// Bisection tolerance in beta.
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    /// Orbit length cap for the exact itineraries.
    #[arg(long, default_value_t = kneading::symbolic::DEFAULT_CAP)]
    cap: usize,
    /// Binary digits for evaluating |slope|^-beta.
    #[arg(long, default_value_t = kneading::spectral::DEFAULT_PRECISION)]
    precision: usize,
    /// Accept non-Markov maps by truncating itineraries at this depth.
    #[arg(long)]
    truncate_depth: Option<usize>,
}

impl NumericArgs {
    fn options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            orbit: OrbitOptions {
                cap: self.cap,
                ..OrbitOptions::default()
            },
            spectral: SpectralOptions {
                precision: self.precision,
                tol: self.tol,
                ..SpectralOptions::default()
            },
            truncate_depth: self.truncate_depth,
            ..AnalyzeOptions::default()
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    fn compute(message: impl ToString) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Spectral(_) | AnalysisError::Markov(MarkovError::ImageNotInChain { .. }) => Failure::compute(e),
            _ => Failure::input(e),
        }
    }
}

fn load(spec: &Path) -> Result<kneading::HoleMap, Failure> {
    let file = load_map_spec(spec).map_err(|e| Failure::input(format!("{}: {e}", spec.display())))?;
    file.to_hole_map()
        .map_err(|e| Failure::input(format!("{}: {e}", spec.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(Failure::compute),
    }
}

/// Summary text goes to stdout when the main output went to a file.
fn print_summary(to_file: bool, text: &str) {
    if to_file {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn run_analyze(spec: &Path, numeric: &NumericArgs, output: Option<&Path>) -> Result<u8, Failure> {
    let opts = numeric.options();
    let a = analyze(load(spec)?, &opts)?;
    let report = ReportFile::from_analysis(&a, &opts);
    write_output(output, &report.to_json())?;
    print_summary(output.is_some(), &human_summary(&a));
    Ok(if a.verified() { 0 } else { 1 })
}

fn run_verify(spec: &Path, cap: usize) -> Result<u8, Failure> {
    let opts = AnalyzeOptions {
        orbit: OrbitOptions {
            cap,
            ..OrbitOptions::default()
        },
        ..AnalyzeOptions::default()
    };
    let a = analyze(load(spec)?, &opts)?;
    let v = a.verification.as_ref().expect("exact mode verifies");
    for c in &v.checks {
        match &c.detail {
            None => println!("PASS {}", c.name),
            Some(d) => println!("FAIL {}: {d}", c.name),
        }
    }
    let passed = v.checks.iter().filter(|c| c.passed).count();
    println!("{passed}/{} passed", v.checks.len());
    Ok(if passed == v.checks.len() { 0 } else { 1 })
}

struct SweepRow {
    value: String,
    cells: Option<[f64; 3]>,
    reason: String,
}

fn run_sweep(
    template: &Path,
    param: &str,
    from: &str,
    to: &str,
    steps: usize,
    numeric: &NumericArgs,
    output: Option<&Path>,
) -> Result<u8, Failure> {
    let file = load_map_spec(template).map_err(|e| Failure::input(format!("{}: {e}", template.display())))?;
    let from = parse_rational("--from", from).map_err(Failure::input)?;
    let to = parse_rational("--to", to).map_err(Failure::input)?;
    let opts = numeric.options();
    let rows: Vec<SweepRow> = sweep_values(&from, &to, steps)
        .par_iter()
        .map(|v| {
            let result = file
                .instantiate(param, v)
                .map_err(|e| e.to_string())
                .and_then(|h| analyze(h, &opts).map_err(|e| e.to_string()));
            match result {
                Ok(a) => {
                    let i = &a.invariants;
                    let mut reason = String::new();
                    if !a.verified() {
                        reason = "identity check failed".into();
                    } else if let Some(k) = i.approximate {
                        reason = format!("approximate (depth {k})");
                    }
                    SweepRow {
                        value: v.to_string(),
                        cells: Some([i.hausdorff_dimension, i.escape_rate, i.topological_entropy]),
                        reason,
                    }
                }
                Err(e) => SweepRow {
                    value: v.to_string(),
                    cells: None,
                    reason: e,
                },
            }
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let map_err = |e: csv::Error| Failure::compute(e);
    w.write_record([param, "dim_H", "gamma", "h_top", "reason"]).map_err(map_err)?;
    for r in &rows {
        let cells = match r.cells {
            Some(c) => c.map(format_real),
            None => [String::new(), String::new(), String::new()],
        };
        w.write_record([r.value.as_str(), &cells[0], &cells[1], &cells[2], &r.reason])
            .map_err(map_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::compute(e.to_string()))?;
    write_output(output, &String::from_utf8(bytes).expect("csv is utf-8"))?;
    let flagged = rows.iter().filter(|r| r.cells.is_none()).count();
    print_summary(
        output.is_some(),
        &format!("{} rows, {flagged} flagged\n", rows.len()),
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    spec: &Path,
    n_points: usize,
    k_max: usize,
    seed: u64,
    burn_in: usize,
    threads: Option<usize>,
    output: Option<&Path>,
) -> Result<u8, Failure> {
    let map = validate_map(load(spec)?, true).map_err(Failure::input)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(Failure::compute)?;
    let series = pool
        .install(|| simulate_survival(&map, n_points, k_max, seed))
        .map_err(Failure::input)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let map_err = |e: csv::Error| Failure::compute(e);
    w.write_record(["k", "survivors", "fraction"]).map_err(map_err)?;
    for (k, &c) in series.counts.iter().enumerate() {
        let frac = c as f64 / n_points as f64;
        w.write_record([k.to_string(), c.to_string(), format_real(frac)])
            .map_err(map_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::compute(e.to_string()))?;
    write_output(output, &String::from_utf8(bytes).expect("csv is utf-8"))?;
    let summary = match estimate_escape_rate(&series, burn_in) {
        Ok(e) => format!(
            "gamma_hat = {} (std err {}, {} points, seed {seed})\n",
            format_real(e.gamma_hat),
            format_real(e.std_err),
            e.points_used
        ),
        Err(e) => format!("gamma_hat unavailable: {e}\n"),
    };
    print_summary(output.is_some(), &summary);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { spec, numeric, output } => run_analyze(spec, numeric, output.as_deref()),
        Command::Verify { spec, cap } => run_verify(spec, *cap),
        Command::Sweep {
            template,
            param,
            from,
            to,
            steps,
            numeric,
            output,
        } => run_sweep(template, param, from, to, *steps, numeric, output.as_deref()),
        Command::Simulate {
            spec,
            n_points,
            k_max,
            seed,
            burn_in,
            threads,
            output,
        } => run_simulate(spec, *n_points, *k_max, *seed, *burn_in, *threads, output.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
