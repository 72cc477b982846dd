//! Command-line driver for the faber-manifold codec and its verification
//! suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use faber_manifold::codec::{encode, select_params};
use faber_manifold::corpus::{make_function, FunctionSpec};
use faber_manifold::format::{parse_manifold, write_manifold};
use faber_manifold::harness::{run_suite, ErrorReport, Suite, SuiteConfig};
use faber_manifold::Exec;

#[derive(Parser)]
#[command(name = "faber-manifold", version, about = "Sparse-grid manifold codec for mixed-smoothness functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a corpus function into a manifold code file.
    Encode {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        /// Function spec, e.g. `family=faber-random;seed=3;level=2`.
        #[arg(long)]
        function: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a code at points read from CSV rows of d coordinates.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Choose (m, n) for a parameter budget N.
    Params {
        #[arg(long = "N")]
        n_budget: BigUint,
        #[arg(long)]
        dim: usize,
    },
    /// Run one verification suite; exits nonzero on any bound violation.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[command(flatten)]
        opts: SuiteOpts,
        /// Write the reports as CSV (plus `<out>.txt`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every suite and write CSV and structured-text reports.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        opts: SuiteOpts,
    },
}

#[derive(Args, Clone)]
struct SuiteOpts {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long = "N")]
    n_budget: Option<BigUint>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    grid_level: Option<u32>,
    #[arg(long)]
    random_points: Option<usize>,
    /// Corpus functions per configuration.
    #[arg(long)]
    functions: Option<usize>,
    /// Disable the thread pool.
    #[arg(long)]
    sequential: bool,
    /// Record wall-clock runtimes (reports are otherwise byte-identical).
    #[arg(long)]
    timings: bool,
}

impl SuiteOpts {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            dims: self.dim.map(|d| vec![d]),
            alphas: self.alpha.map(|a| vec![a]),
            m: self.m,
            n: self.n,
            n_budget: self.n_budget.clone(),
            seed: self.seed,
            grid_level: self.grid_level,
            random_points: self.random_points,
            functions: self.functions,
            exec: if self.sequential { Exec::Sequential } else { Exec::Parallel },
        }
    }
}

/// Fills `d` and `alpha` into the spec from the flags, rejecting conflicts.
fn function_spec(text: &str, dim: usize, alpha: f64) -> Result<FunctionSpec> {
    let mut full = text.trim().trim_end_matches(';').to_string();
    let has = |s: &str, k: &str| s.split(';').any(|f| f.trim().starts_with(&format!("{k}=")));
    if !has(&full, "d") {
        full.push_str(&format!(";d={dim}"));
    }
    if !has(&full, "alpha") {
        full.push_str(&format!(";alpha={alpha:?}"));
    }
    let spec: FunctionSpec = full.parse()?;
    if spec.d != dim || spec.alpha != alpha {
        bail!("function spec `{text}` conflicts with --dim {dim} --alpha {alpha}");
    }
    Ok(spec)
}

fn write_reports(path: &Path, reports: &[ErrorReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(ErrorReport::CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    let mut text = String::new();
    for (i, r) in reports.iter().enumerate() {
        text.push_str(&format!("[report {i}]\n"));
        text.push_str(&r.to_text());
        text.push('\n');
    }
    let mut txt = path.as_os_str().to_owned();
    txt.push(".txt");
    fs::write(&txt, text).with_context(|| format!("writing {}", PathBuf::from(&txt).display()))?;
    Ok(())
}

fn run_suites(suites: &[Suite], opts: &SuiteOpts) -> Result<Vec<ErrorReport>> {
    let cfg = opts.config();
    let mut all = Vec::new();
    for &s in suites {
        let mut reports = run_suite(s, &cfg)?;
        if !opts.timings {
            reports.iter_mut().for_each(|r| r.runtime_ms = 0);
        }
        let bad = reports.iter().filter(|r| r.violation()).count();
        let worst = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
        println!(
            "{}: {} reports, {} violations, max ratio {:.6}",
            s,
            reports.len(),
            bad,
            worst
        );
        for r in reports.iter().filter(|r| r.violation()) {
            println!("  VIOLATION {}", r.csv_record().join(","));
        }
        all.extend(reports);
    }
    Ok(all)
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Encode {
            dim,
            alpha,
            m,
            n,
            function,
            out,
        } => {
            let spec = function_spec(&function, dim, alpha)?;
            let f = make_function(&spec)?;
            let code = encode(&f, m, n, alpha, dim)?;
            fs::write(&out, write_manifold(&code)).with_context(|| format!("writing {}", out.display()))?;
            let sizes: Vec<String> = code.layers().iter().map(|l| l.dictionary().len().to_string()).collect();
            println!(
                "encoded {spec}: {} parameters, dictionary sizes {}",
                code.parameter_count(),
                sizes.join("/")
            );
        }
        Command::Decode { code, points, out } => {
            let text = fs::read_to_string(&code).with_context(|| format!("reading {}", code.display()))?;
            let code = parse_manifold(&text)?;
            let d = code.d();
            let mut rd = csv::ReaderBuilder::new()
                .has_headers(false)
                .trim(csv::Trim::All)
                .from_path(&points)
                .with_context(|| format!("reading {}", points.display()))?;
            let mut w = csv::Writer::from_path(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
            header.push("value".into());
            w.write_record(&header)?;
            for (i, rec) in rd.records().enumerate() {
                let rec = rec?;
                let x: Vec<f64> = rec
                    .iter()
                    .map(|v| v.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .with_context(|| format!("row {}: not a number", i + 1))?;
                if x.len() != d || x.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    bail!("row {}: expected {d} coordinates in [0, 1]", i + 1);
                }
                let mut row: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
                row.push(format!("{:?}", code.eval(&x)));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Command::Params { n_budget, dim } => {
            let s = select_params(&n_budget, dim)?;
            println!("m = {}", s.m);
            println!("n = {}", s.n);
            println!("m_star = {}", s.m_star);
            println!("threshold N(d) = {}", s.threshold);
            println!("N >= N(d): {}", s.meets_threshold);
            println!("n >= m >= d + 1: {}", s.regime_ok);
        }
        Command::Verify { suite, opts, out } => {
            let reports = run_suites(&[suite], &opts)?;
            if let Some(path) = out {
                write_reports(&path, &reports)?;
            }
            if reports.iter().any(ErrorReport::violation) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Report { out, opts } => {
            let reports = run_suites(&Suite::ALL, &opts)?;
            write_reports(&out, &reports)?;
            if reports.iter().any(ErrorReport::violation) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
