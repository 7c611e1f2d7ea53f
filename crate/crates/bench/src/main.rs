// Copyright 2026 The lugo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use lugo_bench::{
    emit_report, exit_code, render_report, resolve_workers, run_benchmark, solve_command,
    transpile_command, BenchConfig, BenchError, Format,
};
use lugo_core::qpe::Method;
use lugo_core::transpiler::basis_report;

#[derive(Parser)]
#[command(name = "lugo", version, about = "Phase-estimation circuit generation benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time, transpile and simulate Toeplitz HHL circuits for both generators.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "standard,lugo")]
        methods: Vec<Method>,
        /// LuGo worker threads (default: one per clock qubit).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long = "timeout-s", default_value_t = 300.0)]
        timeout_s: f64,
        /// Only time circuit generation.
        #[arg(long)]
        generation_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Solve the linear system described by a problem file.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower a circuit file to the u3/cx basis.
    Transpile {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<(), BenchError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| BenchError::File {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, BenchError> {
    match cli.command {
        Command::Bench {
            sizes,
            methods,
            workers,
            shots,
            seed,
            timeout_s,
            generation_only,
            out,
            format,
        } => {
            if !(timeout_s.is_finite() && timeout_s > 0.0) {
                return Err(BenchError::Config(format!("timeout must be positive, got {timeout_s}")));
            }
            let env = std::env::var("BENCH_THREADS").ok();
            let config = BenchConfig {
                sizes,
                methods,
                workers: resolve_workers(workers, env.as_deref())?,
                shots,
                seed,
                timeout: Duration::from_secs_f64(timeout_s),
                generation_only,
            };
            let reports = run_benchmark(&config)?;
            match out {
                Some(path) => {
                    emit_report(&reports, format, &path)?;
                    eprint!("{}", render_report(&reports, Format::Csv)?);
                }
                None => print!("{}", render_report(&reports, format)?),
            }
            Ok(exit_code(&reports))
        }
        Command::Solve { problem, out } => {
            let report = solve_command(&problem)?;
            let text = serde_json::to_string_pretty(&report)? + "\n";
            if out.is_some() {
                eprintln!(
                    "fidelity {:.6}, success probability {:.6}, {} qubits, {} gates",
                    report.fidelity, report.success_probability, report.total_qubits, report.gate_count
                );
            }
            write_or_print(out.as_ref(), &text)?;
            Ok(0)
        }
        Command::Transpile { circuit, out } => {
            let lowered = transpile_command(&circuit)?;
            let report = basis_report(&lowered).map_err(BenchError::from)?;
            eprintln!("u3 {}, cx {}, depth {}", report.u3, report.cx, report.depth);
            write_or_print(out.as_ref(), &(lowered.to_json()? + "\n"))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 1; 2 is reserved for timeout-only sweeps.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
