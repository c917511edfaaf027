//! `resonator`: moments, extreme values, and resonance scans for Dirichlet
//! L-functions over prime moduli.
//!
//! Exit codes: 0 success, 1 validation error, 2 invariant failure, 3 I/O
//! failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use resonator_core::characters::{CharIndex, CharacterGroup};
use resonator_core::constants::ConstantBundle;

use resonator_cli::config::RunConfig;
use resonator_cli::engine::Engine;
use resonator_cli::records::{self, JsonlWriter};
use resonator_cli::{scan, verify, CliError};

#[derive(Parser)]
#[command(
    name = "resonator",
    version,
    about = "Moments, extreme values, and resonance scans for Dirichlet L-functions over prime moduli"
)]
struct Cli {
    /// Flat key=value config file, applied between defaults and flags
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output path (JSONL; scans derive a .summary.csv sibling)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per CPU)
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Seed for randomized verification spot checks
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Overrides shared by `resonate` and `scan`.
#[derive(Args)]
struct CommonOverrides {
    /// Resonator scale: a positive number, or `auto` for 99% of the
    /// admissible supremum
    #[arg(long)]
    a: Option<String>,
    /// Zero-density offset epsilon (default: 0.01 clamped towards sigma-1/2)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Assume GRH when sizing the admissible scale
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    grh: Option<bool>,
    /// Cap on the prime cutoff Y of the truncated sums
    #[arg(long, value_name = "N")]
    y_cap: Option<u64>,
    /// Fixed resonator cutoff X (default: A log q loglog q)
    #[arg(long, value_name = "X")]
    x_override: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the predicted-growth constants for one (sigma, theta)
    Constants {
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        grh: Option<bool>,
        /// Evaluate the achieved constant at this scale instead of the
        /// automatic one
        #[arg(long)]
        a: Option<f64>,
    },
    /// Dump the character table mod a small prime as CSV (columns j,n,re,im)
    Chars {
        #[arg(long)]
        q: u64,
    },
    /// One full run at a single modulus; prints the record as JSON
    Resonate {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[command(flatten)]
        common: CommonOverrides,
    },
    /// Scan a prime grid, appending JSONL records; reruns resume
    Scan {
        #[arg(long)]
        q_min: Option<u64>,
        #[arg(long)]
        q_max: Option<u64>,
        /// Number of log-spaced prime targets, or `all`
        #[arg(long)]
        count: Option<String>,
        /// Comma-separated sigma grid
        #[arg(long)]
        sigma: Option<String>,
        /// Comma-separated theta grid
        #[arg(long)]
        theta: Option<String>,
        #[command(flatten)]
        common: CommonOverrides,
    },
    /// Run the invariant suite (quick under a minute, full under 15)
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyLevel::Quick)]
        level: VerifyLevel,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, clap::ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

fn main() {
    // clap's own exit codes don't match this tool's contract (usage errors
    // must exit 1), so parse manually
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }

    match cli.cmd {
        Cmd::Constants {
            sigma,
            theta,
            epsilon,
            grh,
            a,
        } => cmd_constants(&cfg, sigma, theta, epsilon, grh, a),
        Cmd::Chars { q } => cmd_chars(&cfg, q),
        Cmd::Resonate {
            q,
            sigma,
            theta,
            common,
        } => {
            apply_common(&mut cfg, &common)?;
            cmd_resonate(&cfg, q, sigma, theta)
        }
        Cmd::Scan {
            q_min,
            q_max,
            count,
            sigma,
            theta,
            common,
        } => {
            if let Some(v) = q_min {
                cfg.q_min = v;
            }
            if let Some(v) = q_max {
                cfg.q_max = v;
            }
            if let Some(v) = &count {
                cfg.set_key("count", v, "--count")?;
            }
            if let Some(v) = &sigma {
                cfg.set_key("sigma_list", v, "--sigma")?;
            }
            if let Some(v) = &theta {
                cfg.set_key("theta_list", v, "--theta")?;
            }
            apply_common(&mut cfg, &common)?;
            cmd_scan(&cfg)
        }
        Cmd::Verify { level } => cmd_verify(&cfg, level),
    }
}

fn apply_common(cfg: &mut RunConfig, c: &CommonOverrides) -> Result<(), CliError> {
    if let Some(a) = &c.a {
        cfg.set_key("a", a, "--a")?;
    }
    if let Some(e) = c.epsilon {
        cfg.epsilon = Some(e);
    }
    if let Some(g) = c.grh {
        cfg.grh = g;
    }
    if let Some(y) = c.y_cap {
        cfg.y_cap = y;
    }
    if let Some(x) = c.x_override {
        cfg.x_override = Some(x);
    }
    Ok(())
}

fn cmd_constants(
    cfg: &RunConfig,
    sigma: f64,
    theta: f64,
    epsilon: Option<f64>,
    grh: Option<bool>,
    a: Option<f64>,
) -> Result<(), CliError> {
    let b = ConstantBundle::compute(
        sigma,
        theta,
        epsilon.or(cfg.epsilon),
        grh.unwrap_or(cfg.grh),
        a,
    )?;
    let rows: [(&str, String); 12] = [
        ("sigma", b.sigma.to_string()),
        ("theta", b.theta.to_string()),
        ("epsilon", b.epsilon.to_string()),
        ("grh", b.grh.to_string()),
        ("lambda", b.lambda.to_string()),
        ("vartheta", b.vartheta.to_string()),
        ("a_max_uncond", b.a_max_uncond.to_string()),
        ("a_max_grh", b.a_max_grh.to_string()),
        ("a_used", b.a_used.to_string()),
        ("c_theorem_cap", b.c_theorem_cap.to_string()),
        ("c_achieved", b.c_achieved.to_string()),
        (
            "asymptotic_terms_dropped",
            b.asymptotic_terms_dropped.to_string(),
        ),
    ];
    for (k, v) in &rows {
        println!("{k:<26} {v}");
    }
    let json = serde_json::json!({
        "sigma": b.sigma,
        "theta": b.theta,
        "epsilon": b.epsilon,
        "grh": b.grh,
        "lambda": b.lambda,
        "vartheta": b.vartheta,
        "a_max_uncond": b.a_max_uncond,
        "a_max_grh": b.a_max_grh,
        "a_used": b.a_used,
        "c_theorem_cap": b.c_theorem_cap,
        "c_achieved": b.c_achieved,
        "asymptotic_terms_dropped": b.asymptotic_terms_dropped,
    });
    println!("{json}");
    Ok(())
}

/// Full tables get large fast ((q-1)^2 rows); the dump is a small-q
/// debugging aid.
const CHARS_Q_CAP: u64 = 1024;

fn cmd_chars(cfg: &RunConfig, q: u64) -> Result<(), CliError> {
    if q > CHARS_Q_CAP {
        return Err(CliError::Validation(format!(
            "character table dumps are for small q (<= {CHARS_Q_CAP}), got {q}"
        )));
    }
    let g = CharacterGroup::new(q)?;
    let mut out = String::from("j,n,re,im\n");
    for j in 0..g.m() {
        for n in 1..q {
            let v = g.char_value(CharIndex(j), n);
            out.push_str(&format!("{j},{n},{},{}\n", v.re, v.im));
        }
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_resonate(
    cfg: &RunConfig,
    q: u64,
    sigma: Option<f64>,
    theta: Option<f64>,
) -> Result<(), CliError> {
    cfg.validate()?;
    let mut one = cfg.clone();
    one.sigma_list = vec![sigma.unwrap_or(cfg.sigma_list[0])];
    one.theta_list = vec![theta.unwrap_or(cfg.theta_list[0])];
    one.validate()?;
    let engine = Engine::new(&one, &[q])?;
    let rec = engine.resonate(&one, q, one.sigma_list[0], one.theta_list[0])?;
    println!("{}", records::to_line(&rec)?);
    if let Some(out) = &one.out {
        JsonlWriter::append(out)?.write(&rec)?;
    }
    Ok(())
}

fn cmd_scan(cfg: &RunConfig) -> Result<(), CliError> {
    let report = scan::run(cfg)?;
    println!(
        "scan: {} tasks, {} skipped (already recorded), {} written -> {}; summary -> {}",
        report.tasks_total,
        report.skipped,
        report.written,
        report.out.display(),
        report.summary.display()
    );
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, level: VerifyLevel) -> Result<(), CliError> {
    let lvl = match level {
        VerifyLevel::Quick => verify::Level::Quick,
        VerifyLevel::Full => verify::Level::Full,
    };
    let outcomes = verify::run(lvl, cfg.seed);
    let failures = verify::print_report(&outcomes);
    if failures > 0 {
        return Err(CliError::Invariant(format!(
            "{failures} verification check(s) failed"
        )));
    }
    Ok(())
}
