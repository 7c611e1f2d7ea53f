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

//! Benchmark harness: builds tridiagonal Toeplitz HHL instances with both
//! phase-estimation generators, times the generation phases, transpiles,
//! simulates and reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use lugo_core::hhl::{build_hhl_timed, clock_qubit_count, evaluate, HhlOptions, HhlProblem};
use lugo_core::matrix_io::{parse_matrix, parse_vector};
use lugo_core::numerics::toeplitz_tridiagonal;
use lugo_core::qpe::Method;
use lugo_core::simulator::{fidelity, run_statevector, sample_indices};
use lugo_core::transpiler::{basis_report, lower_to_u3_cx};
use lugo_core::{Circuit, Complex64, Registers};
use serde::{Deserialize, Serialize};

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] lugo_core::Error),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| BenchError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Settings of one benchmark sweep.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub methods: Vec<Method>,
    /// LuGo worker threads; `None` uses one per clock qubit.
    pub workers: Option<usize>,
    /// Sampling shots for the shot-based fidelity; 0 disables sampling.
    pub shots: u64,
    pub seed: u64,
    pub timeout: Duration,
    /// Skip transpilation and simulation and only time generation.
    pub generation_only: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![2, 4, 8, 16],
            methods: vec![Method::Standard, Method::Lugo],
            workers: None,
            shots: 1_000_000,
            seed: 7,
            timeout: Duration::from_secs(300),
            generation_only: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.methods.is_empty() {
            return Err(BenchError::Config("at least one size and one method are required".into()));
        }
        for &n in &self.sizes {
            clock_qubit_count(n)?;
        }
        if self.workers == Some(0) {
            return Err(BenchError::Config("worker count must be at least 1".into()));
        }
        if self.timeout.is_zero() {
            return Err(BenchError::Config("timeout must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
}

/// One benchmark case. Measurements are `None` for timed-out cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub method: Method,
    pub matrix_size: usize,
    pub total_qubits: usize,
    pub status: Status,
    /// Circuit generation, `qpe_time_s + other_time_s`.
    pub generation_time_s: Option<f64>,
    /// Phase estimation and its inverse.
    pub qpe_time_s: Option<f64>,
    /// State preparation, reciprocal rotation and assembly.
    pub other_time_s: Option<f64>,
    pub serialization_time_s: Option<f64>,
    pub pool_startup_s: Option<f64>,
    pub gate_count: Option<usize>,
    pub depth: Option<usize>,
    pub u3_count: Option<usize>,
    pub cx_count: Option<usize>,
    /// Exact-amplitude fidelity against the classical solution.
    pub fidelity: Option<f64>,
    /// Fidelity of the magnitudes reconstructed from sampled shots.
    pub sampled_fidelity: Option<f64>,
    pub success_probability: Option<f64>,
    pub workers: usize,
    pub seed: u64,
    pub shots: u64,
}

/// The benchmark system for size `n`: `Toeplitz(2, -1)` with a uniform
/// right-hand side.
pub fn toeplitz_problem(n: usize, method: Method, workers: Option<usize>) -> Result<HhlProblem> {
    let a = toeplitz_tridiagonal(n, 2.0, -1.0)?;
    let b = vec![Complex64::new(1.0, 0.0); n];
    let options = HhlOptions {
        parallel_workers: workers,
        ..Default::default()
    };
    Ok(HhlProblem::new(&a, &b, method, &options)?)
}

/// Builds the benchmark circuit for one case.
pub fn build_case_circuit(n: usize, method: Method, workers: Option<usize>) -> Result<Circuit> {
    let problem = toeplitz_problem(n, method, workers)?;
    Ok(lugo_core::hhl::build_hhl(&problem)?)
}

/// Fidelity of `|x̂|` estimated from shots post-selected on ancilla = 1 and
/// clock = 0, against the magnitudes of the classical solution.
fn sampled_fidelity(
    problem: &HhlProblem,
    state: &lugo_core::simulator::StateVector,
    shots: u64,
    seed: u64,
) -> Result<Option<f64>> {
    let registers = problem.registers();
    let (input, ancilla) = match (&registers.input, &registers.ancilla) {
        (Some(i), Some(a)) => (i.clone(), a.clone()),
        _ => return Ok(None),
    };
    let counts = sample_indices(state, shots, seed)?;
    let mut selected = vec![0u64; 1 << input.len()];
    let other_mask = !(((1usize << input.len()) - 1) << input.start);
    let wanted = 1usize << ancilla.start;
    for (&idx, &count) in &counts {
        if idx & other_mask == wanted {
            selected[(idx >> input.start) & ((1 << input.len()) - 1)] += count;
        }
    }
    if selected.iter().all(|&c| c == 0) {
        return Ok(None);
    }
    let estimate: Vec<Complex64> = selected[problem.solution.clone()]
        .iter()
        .map(|&c| Complex64::new((c as f64).sqrt(), 0.0))
        .collect();
    let reference: Vec<Complex64> = problem
        .classical_solution()?
        .iter()
        .map(|z| Complex64::new(z.norm(), 0.0))
        .collect();
    Ok(Some(fidelity(&reference, &estimate)?))
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn run_case(n: usize, method: Method, config: &BenchConfig) -> Result<BenchReport> {
    let problem = toeplitz_problem(n, method, config.workers)?;
    let (circuit, timings) = build_hhl_timed(&problem)?;

    let start = Instant::now();
    let json = circuit.to_json()?;
    let serialization = start.elapsed();
    drop(json);

    let mut report = BenchReport {
        method,
        matrix_size: n,
        total_qubits: problem.total_qubits(),
        status: Status::Ok,
        generation_time_s: Some(secs(timings.qpe + timings.other)),
        qpe_time_s: Some(secs(timings.qpe)),
        other_time_s: Some(secs(timings.other)),
        serialization_time_s: Some(secs(serialization)),
        pool_startup_s: Some(secs(timings.pool_startup)),
        gate_count: Some(circuit.gate_count()),
        depth: Some(circuit.depth()),
        u3_count: None,
        cx_count: None,
        fidelity: None,
        sampled_fidelity: None,
        success_probability: None,
        workers: problem.parallel_workers,
        seed: config.seed,
        shots: config.shots,
    };
    if config.generation_only {
        return Ok(report);
    }
    let lowered = basis_report(&lower_to_u3_cx(&circuit)?)?;
    report.u3_count = Some(lowered.u3);
    report.cx_count = Some(lowered.cx);

    let outcome = evaluate(&problem, &circuit)?;
    report.fidelity = Some(outcome.fidelity);
    report.success_probability = Some(outcome.success_probability);
    if config.shots > 0 {
        let state = run_statevector(&circuit)?;
        report.sampled_fidelity = sampled_fidelity(&problem, &state, config.shots, config.seed)?;
    }
    Ok(report)
}

fn timeout_report(n: usize, method: Method, config: &BenchConfig) -> BenchReport {
    let k = clock_qubit_count(n).unwrap_or(0);
    BenchReport {
        method,
        matrix_size: n,
        total_qubits: n.trailing_zeros() as usize + k + 1,
        status: Status::Timeout,
        generation_time_s: None,
        qpe_time_s: None,
        other_time_s: None,
        serialization_time_s: None,
        pool_startup_s: None,
        gate_count: None,
        depth: None,
        u3_count: None,
        cx_count: None,
        fidelity: None,
        sampled_fidelity: None,
        success_probability: None,
        workers: config.workers.unwrap_or(k),
        seed: config.seed,
        shots: config.shots,
    }
}

/// Runs every (size, method) case in order. A case that exceeds the
/// wall-time budget is reported as a timeout, and larger sizes of the same
/// method are reported as timeouts without being attempted. The abandoned
/// worker thread is left to finish in the background.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchReport>> {
    config.validate()?;
    let mut sizes = config.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut timed_out: Vec<Method> = Vec::new();
    let mut reports = Vec::new();
    for &n in &sizes {
        for &method in &config.methods {
            if timed_out.contains(&method) {
                reports.push(timeout_report(n, method, config));
                continue;
            }
            let (tx, rx) = mpsc::channel();
            let case_config = config.clone();
            thread::Builder::new()
                .name(format!("bench-{method}-{n}"))
                .spawn(move || {
                    let _ = tx.send(run_case(n, method, &case_config));
                })?;
            match rx.recv_timeout(config.timeout) {
                Ok(result) => reports.push(result?),
                Err(mpsc::RecvTimeoutError::Timeout) => {
                    timed_out.push(method);
                    reports.push(timeout_report(n, method, config));
                }
                Err(mpsc::RecvTimeoutError::Disconnected) => {
                    return Err(BenchError::Config(format!("case {method} N={n} panicked")));
                }
            }
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(BenchError::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// CSV row: table columns first (size, qubits, time, gate, depth, u3, cx,
/// fidelity), then the remaining fields.
#[derive(Serialize)]
struct CsvRow<'a> {
    method: String,
    size: usize,
    qubits: usize,
    time_s: Option<f64>,
    gate: Option<usize>,
    depth: Option<usize>,
    u3: Option<usize>,
    cx: Option<usize>,
    fidelity: Option<f64>,
    status: &'a str,
    qpe_time_s: Option<f64>,
    other_time_s: Option<f64>,
    serialization_time_s: Option<f64>,
    pool_startup_s: Option<f64>,
    sampled_fidelity: Option<f64>,
    success_probability: Option<f64>,
    workers: usize,
    seed: u64,
    shots: u64,
}

/// Renders reports as pretty JSON or CSV.
pub fn render_report(reports: &[BenchReport], format: Format) -> Result<String> {
    if reports.is_empty() {
        return Err(BenchError::Config("no reports to write".into()));
    }
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(reports)? + "\n"),
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for r in reports {
                writer.serialize(CsvRow {
                    method: r.method.to_string(),
                    size: r.matrix_size,
                    qubits: r.total_qubits,
                    time_s: r.generation_time_s,
                    gate: r.gate_count,
                    depth: r.depth,
                    u3: r.u3_count,
                    cx: r.cx_count,
                    fidelity: r.fidelity,
                    status: match r.status {
                        Status::Ok => "ok",
                        Status::Timeout => "timeout",
                    },
                    qpe_time_s: r.qpe_time_s,
                    other_time_s: r.other_time_s,
                    serialization_time_s: r.serialization_time_s,
                    pool_startup_s: r.pool_startup_s,
                    sampled_fidelity: r.sampled_fidelity,
                    success_probability: r.success_probability,
                    workers: r.workers,
                    seed: r.seed,
                    shots: r.shots,
                })?;
            }
            let bytes = writer.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
    }
}

pub fn emit_report(reports: &[BenchReport], format: Format, path: &Path) -> Result<()> {
    let text = render_report(reports, format)?;
    fs::write(path, text).map_err(|source| BenchError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Problem file for the `solve` command. Paths are relative to the file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub matrix: PathBuf,
    pub rhs: PathBuf,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default)]
    pub clock_qubits: Option<usize>,
    #[serde(default)]
    pub evolution_time: Option<f64>,
}

fn default_method() -> Method {
    Method::Lugo
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub input: [usize; 2],
    pub clock: [usize; 2],
    pub ancilla: [usize; 2],
}

impl RegisterLayout {
    fn from_registers(r: &Registers) -> Self {
        let pair = |r: &Option<std::ops::Range<usize>>| r.as_ref().map_or([0, 0], |r| [r.start, r.end]);
        Self {
            input: pair(&r.input),
            clock: pair(&r.clock),
            ancilla: pair(&r.ancilla),
        }
    }
}

/// Outcome of the `solve` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionReport {
    pub method: Method,
    pub dimension: usize,
    /// Dimension of the Hermitian, power-of-two system actually encoded.
    pub encoded_dimension: usize,
    pub dilated: bool,
    pub signed_decoding: bool,
    pub clock_qubits: usize,
    pub evolution_time: f64,
    pub reciprocal_constant: f64,
    pub total_qubits: usize,
    pub registers: RegisterLayout,
    /// Normalized post-selected solution as `[re, im]` pairs.
    pub solution: Vec<[f64; 2]>,
    /// Classical solution, normalized the same way.
    pub classical_solution: Vec<[f64; 2]>,
    pub success_probability: f64,
    pub fidelity: f64,
    pub gate_count: usize,
    pub depth: usize,
    pub u3_count: usize,
    pub cx_count: usize,
}

fn normalized_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    let norm = lugo_core::numerics::vector_norm(v);
    let norm = if norm > 0.0 { norm } else { 1.0 };
    v.iter().map(|z| [z.re / norm, z.im / norm]).collect()
}

/// Dilation, padding, circuit build, exact simulation and comparison with
/// the classical solution for the system described by `problem_path`.
pub fn solve_command(problem_path: &Path) -> Result<SolutionReport> {
    let file: ProblemFile = serde_json::from_str(&read_file(problem_path)?)?;
    let base = problem_path.parent().unwrap_or_else(|| Path::new("."));
    let a = parse_matrix(&read_file(&base.join(&file.matrix))?)?;
    let b = parse_vector(&read_file(&base.join(&file.rhs))?)?;
    let options = HhlOptions {
        clock_qubits: file.clock_qubits,
        evolution_time: file.evolution_time,
        ..Default::default()
    };
    let problem = HhlProblem::new(&a, &b, file.method, &options)?;
    let circuit = lugo_core::hhl::build_hhl(&problem)?;
    let outcome = evaluate(&problem, &circuit)?;
    let lowered = basis_report(&lower_to_u3_cx(&circuit)?)?;
    Ok(SolutionReport {
        method: file.method,
        dimension: problem.original_dimension(),
        encoded_dimension: problem.matrix.rows(),
        dilated: problem.solution.start != 0,
        signed_decoding: problem.signed,
        clock_qubits: problem.clock_qubits,
        evolution_time: problem.evolution_time,
        reciprocal_constant: problem.reciprocal_constant,
        total_qubits: problem.total_qubits(),
        registers: RegisterLayout::from_registers(&problem.registers()),
        solution: normalized_pairs(&outcome.solution),
        classical_solution: normalized_pairs(&problem.classical_solution()?),
        success_probability: outcome.success_probability,
        fidelity: outcome.fidelity,
        gate_count: circuit.gate_count(),
        depth: circuit.depth(),
        u3_count: lowered.u3,
        cx_count: lowered.cx,
    })
}

/// Lowers a circuit file to `{u3, cx}` and returns the lowered circuit.
pub fn transpile_command(circuit_path: &Path) -> Result<Circuit> {
    let circuit = Circuit::from_json(&read_file(circuit_path)?)?;
    Ok(lower_to_u3_cx(&circuit)?)
}

/// `BENCH_THREADS`, when set, wins over the command-line worker count.
pub fn resolve_workers(cli: Option<usize>, env: Option<&str>) -> Result<Option<usize>> {
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(text) => text
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
            .map(Some)
            .ok_or_else(|| BenchError::Config(format!("BENCH_THREADS must be a positive integer, got `{text}`"))),
        None => Ok(cli),
    }
}

/// Process exit code for a finished sweep: 0 if every case completed, 2 if
/// the only failures are timeouts.
pub fn exit_code(reports: &[BenchReport]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Timeout) {
        2
    } else {
        0
    }
}
