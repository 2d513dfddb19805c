//! Command-line experiment runner: configuration-driven parameter scans
//! with exact-diagonalization baselines, a self-validation suite, and
//! Hamiltonian dumps. See `README.md` for the configuration schema.

mod config;
mod runner;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use cvvqe::validation::{render_reports, run_validation, ValidationOptions};
use cvvqe::{bh_ground_energy, bose_hubbard_polynomial, vacuum_covariance};

#[derive(Parser)]
#[command(name = "cvvqe", version, about = "Variational simulator for bosonic lattice models on photon-subtracted Gaussian states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured parameter scan and write CSV/JSON results.
    Run(RunArgs),
    /// Exact-diagonalization baselines as (n_max, energy) CSV rows.
    Ed(EdArgs),
    /// Run the self-validation suite and print a pass/fail table.
    Validate(ValidateArgs),
    /// Print the model Hamiltonian in the ladder-polynomial text format.
    DumpHamiltonian(DumpArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump perfect matchings and pair values for short Hamiltonian
    /// monomials (evaluated on vacuum) to stderr before running.
    #[arg(long)]
    trace_matchings: bool,
}

#[derive(Args)]
struct EdArgs {
    /// Optional configuration supplying the model and cutoffs.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated occupation cutoffs (overrides the configuration).
    #[arg(long, value_delimiter = ',')]
    cutoffs: Option<Vec<usize>>,
    /// Write rows to `<dir>/ed.csv` instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Smaller randomized suite (finishes in a few seconds).
    #[arg(long)]
    quick: bool,
    /// Seed for the randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Self-test hook: corrupt the contraction table and expect failures.
    #[arg(long, hide = true)]
    mutate_contraction_sign: bool,
}

#[derive(Args)]
struct DumpArgs {
    /// Optional configuration supplying the model.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ExperimentConfig::from_json(&text)
}

fn init_thread_pool() {
    if let Ok(threads) = std::env::var("CVVQE_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not apply CVVQE_THREADS={n}: {e}");
                }
            }
            _ => log::warn!("ignoring invalid CVVQE_THREADS={threads}"),
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_path = out.display().to_string();
    }
    if args.trace_matchings {
        trace_hamiltonian(&cfg)?;
    }
    let records = runner::run_scan(&cfg);
    let out = PathBuf::from(&cfg.output_path);
    runner::write_outputs(&out, &cfg, &records)?;
    let failed = records.iter().filter(|r| r.status != "ok").count();
    for r in &records {
        let energy = r
            .vqe_energy
            .map(|e| format!("{e:.9}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{} {} = {}: vqe {} [{}] ({:.2}s)",
            r.scan_name,
            if r.scan_value.is_nan() {
                "-".into()
            } else {
                format!("{}", r.scan_value)
            },
            r.status,
            energy,
            r.config_hash.get(..12).unwrap_or(""),
            r.wall_time_seconds
        );
    }
    println!(
        "wrote {} record(s) to {} ({} failed)",
        records.len(),
        out.display(),
        failed
    );
    Ok(if failed > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn trace_hamiltonian(cfg: &ExperimentConfig) -> Result<()> {
    let model = cfg.model_params()?;
    let h = bose_hubbard_polynomial(&model)?;
    let v = vacuum_covariance::<f64>(model.n_sites);
    eprintln!("# matching trace on vacuum (monomials of length <= 6)");
    for term in h.terms() {
        eprintln!("monomial: {} ladder ops, coeff {}", term.len(), term.coeff);
        match cvvqe::wick::trace_matchings(term, &v) {
            None => eprintln!("  (skipped: longer than 6 ops)"),
            Some(traces) => {
                for (i, t) in traces.iter().enumerate() {
                    let pairs: Vec<String> = t
                        .pairs
                        .iter()
                        .map(|p| {
                            format!(
                                "({},{})={:.6}{:+.6}i",
                                p.first_index, p.second_index, p.value.re, p.value.im
                            )
                        })
                        .collect();
                    eprintln!(
                        "  matching {i}: {} -> product {:.6}{:+.6}i",
                        pairs.join(" "),
                        t.product.re,
                        t.product.im
                    );
                }
            }
        }
    }
    Ok(())
}

fn cmd_ed(args: &EdArgs) -> Result<ExitCode> {
    let cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    let cutoffs = args.cutoffs.clone().unwrap_or_else(|| cfg.ed_cutoffs.clone());
    let model = cfg.model_params()?;
    let mut csv = String::from("n_max,energy\n");
    for cutoff in cutoffs {
        let e = bh_ground_energy(&model, cutoff)
            .with_context(|| format!("diagonalization at n_max {cutoff}"))?;
        csv.push_str(&format!("{cutoff},{e:.16e}\n"));
    }
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            runner::write_atomic(&dir.join("ed.csv"), &csv)?;
            println!("wrote {}", dir.join("ed.csv").display());
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: &ValidateArgs) -> Result<ExitCode> {
    let opts = ValidationOptions {
        quick: args.quick,
        corrupt_exchange: args.mutate_contraction_sign,
        seed: args.seed.unwrap_or(2024),
    };
    let reports = run_validation(&opts);
    print!("{}", render_reports(&reports));
    let all_passed = reports.iter().all(|r| r.passed);
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_dump(args: &DumpArgs) -> Result<ExitCode> {
    let cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    let h = bose_hubbard_polynomial(&cfg.model_params()?)?;
    let text = h.to_string();
    match &args.out {
        Some(path) => fs::write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_thread_pool();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Ed(args) => cmd_ed(args),
        Command::Validate(args) => cmd_validate(args),
        Command::DumpHamiltonian(args) => cmd_dump(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
