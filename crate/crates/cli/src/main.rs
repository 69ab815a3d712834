//! `qmarkov`: compile single-qubit Lindblad generators to one-ancilla
//! circuits, simulate and validate them against the exact evolution.

use anyhow::Context;
use clap::{Parser, Subcommand};
use qmarkov_core::circuit::{write_program, RunMode};
use qmarkov_core::pipeline::{
    self, bench_csv, parse_grid, parse_jobspec, parse_state, write_state,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_BOUND_NOT_MET: u8 = 2;
const EXIT_INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "qmarkov", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a generator spec to a circuit program.
    Compile {
        /// Generator spec file.
        spec_file: PathBuf,
        /// Write the circuit text here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile and run a job on an initial state.
    Simulate {
        spec_file: PathBuf,
        /// Initial 2x2 density matrix file.
        #[arg(long)]
        rho: PathBuf,
        /// Override the execution mode from the spec file.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        trajectories: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compile and compare against the exact superoperator oracle.
    Validate {
        spec_file: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the (t, eps) grid of a bench file and emit a CSV table.
    Bench {
        grid_file: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(path: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Compile { spec_file, output } => {
            let job = parse_jobspec(&read(&spec_file)?)?;
            let (program, plan) = pipeline::compile(&job)?;
            write_out(output.as_deref(), &write_program(&program))?;
            eprintln!(
                "compiled: k={} r={:.6} reps={} n_exp={} stages={} gates={}",
                plan.k,
                plan.r,
                plan.reps,
                plan.n_exp,
                program.stage_count(),
                program.gate_count()
            );
            Ok(0)
        }
        Command::Simulate {
            spec_file,
            rho,
            mode,
            trajectories,
            seed,
        } => {
            let mut job = parse_jobspec(&read(&spec_file)?)?;
            if let Some(mode) = mode {
                job.mode = match mode.to_ascii_lowercase().as_str() {
                    "deterministic" => RunMode::Deterministic,
                    "sampled" => RunMode::Sampled,
                    other => anyhow::bail!("unknown mode `{other}`"),
                };
            }
            if let Some(n) = trajectories {
                job.trajectories = n;
            }
            if let Some(s) = seed {
                job.seed = s;
            }
            let rho0 = parse_state(&read(&rho)?)?;
            let (rho_out, report, plan) = pipeline::simulate(&job, &rho0)?;
            print!("{}", write_state(&rho_out));
            eprintln!(
                "simulated: stages={} gates={} n_exp={}{}",
                report.stage_count,
                report.gate_count,
                plan.n_exp,
                match report.std_error {
                    Some(se) => format!(" trajectories={} std_error={se:.3e}", report.trajectories),
                    None => String::new(),
                }
            );
            Ok(0)
        }
        Command::Validate { spec_file, json } => {
            let job = parse_jobspec(&read(&spec_file)?)?;
            let report = pipeline::validate(&job)?;
            let rendered = report.to_json();
            match json.as_deref() {
                Some(p) => {
                    std::fs::write(p, format!("{rendered}\n"))
                        .with_context(|| format!("writing {}", p.display()))?;
                }
                None => println!("{rendered}"),
            }
            eprintln!(
                "validated in {} ms: 1->1 error {:.3e} vs eps {:.3e} ({})",
                report.runtime_ms,
                report.superop_one_to_one,
                report.eps,
                if report.bound_satisfied {
                    "ok"
                } else {
                    "BOUND NOT MET"
                }
            );
            Ok(if report.bound_satisfied {
                0
            } else {
                EXIT_BOUND_NOT_MET
            })
        }
        Command::Bench { grid_file, csv } => {
            let grid = parse_grid(&read(&grid_file)?)?;
            let rows = pipeline::bench(&grid)?;
            write_out(csv.as_deref(), &bench_csv(&rows))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
