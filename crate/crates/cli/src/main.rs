//! `qtc`: command-line front end for the quantum turbo code workbench.
//!
//! Results go to `--out` (or stdout) behind `#` metadata lines; progress
//! goes to stderr.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qtc_core::channel::{self, DepolarizingChannel, EA_HASHING_PMAX};
use qtc_core::exit::{self, Candidate, ExitConfig, Stage};
use qtc_core::qcc::{distance_spectrum, CodeRole, CodeSpec, SPECTRUM_NODE_BUDGET};
use qtc_core::registry::CodeRegistry;
use qtc_core::turbo::{run_qber, TurboSystem};
use qtc_core::SeedTransform;

#[derive(Parser, Debug)]
#[command(name = "qtc", version, about = "Quantum turbo code simulator and EXIT-chart workbench")]
struct Cli {
    /// Extra code registry file; its records override built-ins of the same name.
    #[arg(long, global = true, env = "QTC_REGISTRY")]
    registry: Option<PathBuf>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "QTC_WORKERS", default_value_t = 0)]
    workers: usize,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacities and hashing bound at one depolarizing probability.
    Capacity {
        #[arg(long)]
        p: f64,
    },
    /// One EXIT curve.
    Exit(ExitArgs),
    /// Largest p with an open EXIT tunnel.
    Threshold(ThresholdArgs),
    /// Decoding trajectory of a single frame.
    Trajectory(TrajectoryArgs),
    /// Monte-Carlo QBER/WER sweep.
    Qber(QberArgs),
    /// Random search for seed pairs with a small open tunnel.
    Optimize(OptimizeArgs),
    /// Truncated distance spectrum of a code.
    Spectrum(SpectrumArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Role {
    Inner,
    Outer,
}

#[derive(Args, Debug, Clone)]
struct CurveArgs {
    /// Number of I_A grid points, endpoints included.
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Frames averaged per grid point.
    #[arg(long, default_value_t = 10)]
    frames: usize,
    /// Interleaver length (inner logical / outer physical qubits per frame).
    #[arg(long, default_value_t = 3000)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CurveArgs {
    fn config(&self, workers: usize) -> ExitConfig {
        ExitConfig { grid: self.grid, frames: self.frames, length: self.len, seed: self.seed, workers }
    }
}

#[derive(Args, Debug)]
struct ExitArgs {
    #[arg(long, value_enum)]
    role: Role,
    #[arg(long)]
    code: String,
    /// Depolarizing probability (inner curves only).
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    curve: CurveArgs,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[arg(long, default_value = "opt-inner")]
    inner: String,
    #[arg(long, default_value = "opt-outer")]
    outer: String,
    #[arg(long, default_value_t = 0.30)]
    p_lo: f64,
    #[arg(long, default_value_t = 0.40)]
    p_hi: f64,
    #[arg(long, default_value_t = 0.005)]
    tol: f64,
    #[command(flatten)]
    curve: CurveArgs,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    #[arg(long, default_value = "opt-inner")]
    inner: String,
    #[arg(long, default_value = "opt-outer")]
    outer: String,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 30000)]
    len: usize,
    #[arg(long, default_value_t = 15)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct QberArgs {
    #[arg(long, default_value = "opt-inner")]
    inner: String,
    #[arg(long, default_value = "opt-outer")]
    outer: String,
    #[arg(long)]
    p_start: f64,
    /// Last probability (defaults to `--p-start`).
    #[arg(long)]
    p_end: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    p_step: f64,
    #[arg(long, default_value_t = 3000)]
    interleaver_len: usize,
    #[arg(long, default_value_t = 100)]
    frames: u64,
    /// Stop a point after this many word errors (0 = never).
    #[arg(long, default_value_t = 0)]
    stop_errors: u64,
    #[arg(long, default_value_t = 15)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long)]
    target_p: f64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[command(flatten)]
    curve: CurveArgs,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    code: String,
    #[arg(long, default_value_t = 5)]
    max_weight: usize,
    #[arg(long, default_value_t = 50)]
    max_steps: usize,
    /// Also count events driven only by stabilizer (ancilla Z) inputs.
    #[arg(long)]
    include_stabilizer: bool,
    #[arg(long, default_value_t = SPECTRUM_NODE_BUDGET)]
    node_budget: u64,
}

struct Output {
    header: Vec<String>,
    body: String,
}

impl Output {
    fn new(argv: &[String]) -> Self {
        Output {
            header: vec![format!("qtc {}", env!("CARGO_PKG_VERSION")), format!("command: {}", argv.join(" "))],
            body: String::new(),
        }
    }

    fn meta(&mut self, line: impl Into<String>) {
        self.header.push(line.into());
    }

    fn row(&mut self, fields: &[String]) {
        self.body.push_str(&fields.join(","));
        self.body.push('\n');
    }

    fn render(&self, started: Instant) -> String {
        let mut s = String::new();
        for h in &self.header {
            let _ = writeln!(s, "# {h}");
        }
        let _ = writeln!(s, "# wall_time_s: {:.3}", started.elapsed().as_secs_f64());
        s + &self.body
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_registry(cli: &Cli) -> Result<CodeRegistry> {
    let reg = match &cli.registry {
        Some(path) => CodeRegistry::load(path)?,
        None => CodeRegistry::builtin(),
    };
    for w in reg.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(reg)
}

/// Invalid argument values; reported like clap's own errors (status 2).
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

macro_rules! usage {
    ($($arg:tt)*) => {
        return Err(UsageError(format!($($arg)*)).into())
    };
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        usage!("{name} must lie in [0, 1], got {p}");
    }
    Ok(())
}

fn sweep(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        usage!("--p-step must be positive");
    }
    if end < start {
        usage!("--p-end must not be below --p-start");
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}

fn system(reg: &CodeRegistry, inner: &str, outer: &str, len: usize, iters: usize, seed: u64) -> Result<TurboSystem> {
    let i: SeedTransform = reg.require(inner)?.clone();
    let o: SeedTransform = reg.require(outer)?.clone();
    Ok(TurboSystem::from_seeds(i, o, len, iters, seed)?)
}

#[derive(Serialize)]
struct CandidateFile<'a> {
    version: &'a str,
    command: String,
    seed: u64,
    n: usize,
    k: usize,
    m: usize,
    target_p: f64,
    config: ExitConfig,
    wall_time_s: f64,
    candidates: &'a [Candidate],
}

fn run(cli: &Cli, argv: &[String]) -> Result<()> {
    let started = Instant::now();
    let mut out = Output::new(argv);
    match &cli.command {
        Command::Capacity { p } => {
            check_prob("--p", *p)?;
            out.row(&["p", "c_bsc", "c_4ary", "hashing_bound", "db_gap_ea"].map(String::from));
            let gap = if *p > 0.0 { channel::db_gap(*p, EA_HASHING_PMAX)?.to_string() } else { "-inf".into() };
            out.row(&[
                p.to_string(),
                channel::bsc_capacity(*p)?.to_string(),
                channel::fourary_classical_capacity(*p)?.to_string(),
                channel::hashing_bound(*p)?.to_string(),
                gap,
            ]);
        }
        Command::Exit(a) => {
            let reg = load_registry(cli)?;
            let seed = reg.require(&a.code)?;
            let cfg = a.curve.config(cli.workers);
            out.meta(format!("seed: {}", cfg.seed));
            out.meta(format!("code: {} role: {:?}", a.code, a.role));
            let curve = match a.role {
                Role::Inner => {
                    let Some(p) = a.p else { usage!("--p is required for inner curves") };
                    check_prob("--p", p)?;
                    out.meta(format!("p: {p}"));
                    exit::inner_exit_curve(seed, p, &cfg)?
                }
                Role::Outer => {
                    if a.p.is_some() {
                        eprintln!("warning: --p is ignored for outer curves");
                    }
                    exit::outer_exit_curve(seed, &cfg)?
                }
            };
            let failures: usize = curve.points.iter().map(|p| p.failures).sum();
            out.meta(format!("decoding_failures: {failures}"));
            out.row(&["i_a", "i_e"].map(String::from));
            for pt in &curve.points {
                out.row(&[pt.i_a.to_string(), pt.i_e.to_string()]);
            }
        }
        Command::Threshold(a) => {
            let reg = load_registry(cli)?;
            let cfg = a.curve.config(cli.workers);
            out.meta(format!("seed: {}", cfg.seed));
            let r = exit::threshold_search(reg.require(&a.inner)?, reg.require(&a.outer)?, a.p_lo, a.p_hi, a.tol, &cfg)?;
            out.row(&["kind", "p", "open", "area"].map(String::from));
            for e in &r.evaluations {
                out.row(&["eval".into(), e.p.to_string(), e.open.to_string(), e.area.to_string()]);
            }
            out.row(&["threshold".into(), r.p_star.to_string(), String::new(), String::new()]);
            out.meta(format!("bracket: [{}, {}]", r.lo, r.hi));
            out.meta(format!("db_gap_ea: {}", channel::db_gap(r.p_star, EA_HASHING_PMAX)?));
        }
        Command::Trajectory(a) => {
            check_prob("--p", a.p)?;
            let reg = load_registry(cli)?;
            let sys = system(&reg, &a.inner, &a.outer, a.len, a.iters, a.seed)?;
            out.meta(format!("seed: {}", a.seed));
            let t = exit::trajectory(&sys, &DepolarizingChannel::new(a.p)?, a.seed)?;
            out.meta(format!("final_i_a_l1: {}", t.final_ia()));
            out.meta(format!("qubit_errors: {}", t.qubit_errors));
            out.row(&["iteration", "stage", "i_a_l1", "i_e_l1"].map(String::from));
            for pt in &t.points {
                let stage = match pt.stage {
                    Stage::Inner => "inner",
                    Stage::Outer => "outer",
                };
                out.row(&[pt.iteration.to_string(), stage.into(), pt.x.to_string(), pt.y.to_string()]);
            }
        }
        Command::Qber(a) => {
            let ps = sweep(a.p_start, a.p_end.unwrap_or(a.p_start), a.p_step)?;
            for &p in &ps {
                check_prob("p", p)?;
            }
            let reg = load_registry(cli)?;
            let sys = system(&reg, &a.inner, &a.outer, a.interleaver_len, a.iters, a.seed)?;
            out.meta(format!("seed: {}", a.seed));
            out.row(&["p", "frames", "qubit_errors", "word_errors", "qber", "wer", "mean_iterations"].map(String::from));
            for p in ps {
                let r = run_qber(&sys, &DepolarizingChannel::new(p)?, a.frames, a.stop_errors, a.seed, cli.workers)?;
                eprintln!("p = {p}: {} frames, qber {}", r.frames, r.qber());
                out.row(&[
                    p.to_string(),
                    r.frames.to_string(),
                    r.qubit_errors.to_string(),
                    r.word_errors.to_string(),
                    r.qber().to_string(),
                    r.wer().to_string(),
                    r.mean_iterations().to_string(),
                ]);
            }
        }
        Command::Optimize(a) => {
            check_prob("--target-p", a.target_p)?;
            if a.k >= a.n || a.m == 0 {
                usage!("need k < n and m >= 1");
            }
            let cfg = a.curve.config(cli.workers);
            let cands = exit::optimize_search(a.n, a.k, a.m, a.target_p, a.trials, &cfg)?;
            let file = CandidateFile {
                version: env!("CARGO_PKG_VERSION"),
                command: argv.join(" "),
                seed: cfg.seed,
                n: a.n,
                k: a.k,
                m: a.m,
                target_p: a.target_p,
                config: cfg,
                wall_time_s: started.elapsed().as_secs_f64(),
                candidates: &cands,
            };
            let text = serde_json::to_string_pretty(&file)? + "\n";
            return write_output(&cli.out, &text);
        }
        Command::Spectrum(a) => {
            let reg = load_registry(cli)?;
            let spec = CodeSpec::new(reg.require(&a.code)?.clone(), CodeRole::Outer, 1)?;
            let d = distance_spectrum(&spec, a.max_weight, a.max_steps, a.node_budget);
            if d.truncated {
                eprintln!("warning: search truncated (max_steps or node budget reached); counts are lower bounds");
                out.meta("truncated: true");
            }
            out.meta(format!("nodes_visited: {}", d.nodes_visited));
            out.meta(format!("include_stabilizer: {}", a.include_stabilizer));
            let table = if a.include_stabilizer { d.combined() } else { d.logical.clone() };
            out.row(&["weight", "count"].map(String::from));
            for (w, c) in table {
                out.row(&[w.to_string(), c.to_string()]);
            }
        }
    }
    write_output(&cli.out, &out.render(started))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
