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

//! Phase estimation circuits.
//!
//! Register layout of every circuit built here: the eigenstate register
//! occupies qubits `[0, n)` and the clock register `[n, n + k)`, with
//! `clock[0]` the least significant bit of the estimate. Clock qubit `j`
//! controls `U^(2^j)` where `U = e^{iH·t0}`, so an eigenvalue `λ` is read out
//! as `m = λ·t0·2^k / (2π)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, Registers};
use crate::error::{Error, Result};
use crate::numerics::{unitary_exponential, ComplexMatrix};
use crate::synthesis::synthesize_controlled_unitary;

/// Which phase-estimation generator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Standard,
    Lugo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Standard => "standard",
            Method::Lugo => "lugo",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(Method::Standard),
            "lugo" => Ok(Method::Lugo),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Inputs of a phase-estimation build.
#[derive(Debug, Clone)]
pub struct QpeSpec {
    pub hamiltonian: ComplexMatrix,
    pub evolution_time: f64,
    pub clock_qubits: usize,
    pub method: Method,
    /// Threads used by the LuGo generator; ignored by the standard one.
    pub parallel_workers: usize,
}

impl QpeSpec {
    /// Validated inputs with one worker per clock qubit.
    pub fn new(hamiltonian: ComplexMatrix, evolution_time: f64, clock_qubits: usize, method: Method) -> Result<Self> {
        let spec = Self {
            hamiltonian,
            evolution_time,
            clock_qubits,
            method,
            parallel_workers: clock_qubits.max(1),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.parallel_workers = workers;
        self
    }

    /// Number of qubits in the eigenstate register.
    pub fn system_qubits(&self) -> usize {
        self.hamiltonian.rows().trailing_zeros() as usize
    }

    pub fn total_qubits(&self) -> usize {
        self.system_qubits() + self.clock_qubits
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.hamiltonian.rows();
        if !self.hamiltonian.is_square() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidDimension(format!(
                "hamiltonian must be 2^n x 2^n, got {}x{}",
                self.hamiltonian.rows(),
                self.hamiltonian.cols()
            )));
        }
        self.hamiltonian.require_hermitian()?;
        if self.clock_qubits == 0 {
            return Err(Error::InvalidParameter("at least one clock qubit is required".into()));
        }
        if !(self.evolution_time.is_finite() && self.evolution_time > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "evolution time must be positive, got {}",
                self.evolution_time
            )));
        }
        if self.parallel_workers == 0 {
            return Err(Error::InvalidParameter("worker count must be at least 1".into()));
        }
        Ok(())
    }

    fn registers(&self) -> Registers {
        let n = self.system_qubits();
        Registers {
            input: Some(0..n),
            clock: Some(n..n + self.clock_qubits),
            ancilla: None,
        }
    }

    /// Qubit mapping of a controlled block onto clock qubit `j`.
    fn block_mapping(&self, j: usize) -> Vec<usize> {
        let n = self.system_qubits();
        (0..n).chain(std::iter::once(n + j)).collect()
    }
}

fn swap_as_cx(circuit: &mut Circuit, a: usize, b: usize) -> Result<()> {
    circuit.push(GateKind::Cx, &[a, b])?;
    circuit.push(GateKind::Cx, &[b, a])?;
    circuit.push(GateKind::Cx, &[a, b])
}

/// Quantum Fourier transform on `k` qubits, `|x⟩ ↦ 2^{-k/2} Σ_y e^{2πi·xy/2^k}|y⟩`
/// with qubit 0 the least significant bit. Bit reversal is done with
/// three-cx swaps at the end.
pub fn qft(k: usize) -> Result<Circuit> {
    if k == 0 {
        return Err(Error::InvalidParameter("QFT needs at least one qubit".into()));
    }
    let mut circuit = Circuit::new(k);
    for j in (0..k).rev() {
        circuit.push(GateKind::H, &[j])?;
        for m in (0..j).rev() {
            let angle = PI / (1u64 << (j - m)) as f64;
            circuit.push(GateKind::Cp(angle), &[m, j])?;
        }
    }
    for i in 0..k / 2 {
        swap_as_cx(&mut circuit, i, k - 1 - i)?;
    }
    Ok(circuit)
}

/// Exact adjoint of [`qft`].
pub fn inverse_qft(k: usize) -> Result<Circuit> {
    qft(k)?.inverse()
}

pub(crate) type Synthesizer<'a> = dyn Fn(&ComplexMatrix) -> Result<Circuit> + Sync + 'a;

/// Builds a thread pool for the LuGo block jobs.
pub fn worker_pool(workers: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .thread_name(|i| format!("lugo-worker-{i}"))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
}

/// One LuGo synthesis job: the controlled power `2^t`, forward or adjoint.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockJob {
    pub t: usize,
    pub adjoint: bool,
}

/// Runs the jobs on `pool` and merges results in job order, so the outcome
/// never depends on completion order. A failed job for `t > 0` falls back to
/// two copies of the block for `t - 1` in the same direction.
pub(crate) fn synthesize_blocks(
    spec: &QpeSpec,
    jobs: &[BlockJob],
    pool: &ThreadPool,
    synthesize: &Synthesizer<'_>,
) -> Result<Vec<Circuit>> {
    let t0 = spec.evolution_time;
    let h = &spec.hamiltonian;
    let results: Vec<Result<Circuit>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let sign = if job.adjoint { -1.0 } else { 1.0 };
                let time = sign * t0 * (1u64 << job.t) as f64;
                let u = unitary_exponential(h, time)?;
                synthesize(&u)
            })
            .collect()
    });

    let mut blocks: Vec<Option<Circuit>> = vec![None; jobs.len()];
    // Fallbacks refer to lower t, so resolve in increasing t.
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&i| (jobs[i].t, jobs[i].adjoint));
    let mut results: Vec<Option<Result<Circuit>>> = results.into_iter().map(Some).collect();
    for i in order {
        let job = jobs[i];
        let block = match results[i].take().expect("each job resolved once") {
            Ok(block) => block,
            Err(err) => {
                let previous = jobs
                    .iter()
                    .position(|p| p.t + 1 == job.t && p.adjoint == job.adjoint)
                    .and_then(|p| blocks[p].as_ref());
                match previous {
                    Some(prev) => {
                        let mut doubled = prev.clone();
                        doubled.extend_mapped(prev, &(0..prev.num_qubits()).collect::<Vec<_>>())?;
                        doubled
                    }
                    None => {
                        return Err(Error::SynthesisFailed {
                            t: job.t,
                            reason: err.to_string(),
                        })
                    }
                }
            }
        };
        blocks[i] = Some(block);
    }
    Ok(blocks.into_iter().map(|b| b.expect("all blocks resolved")).collect())
}

fn check_prep(spec: &QpeSpec, prep: &Circuit) -> Result<()> {
    if prep.num_qubits() != spec.system_qubits() {
        return Err(Error::LengthMismatch {
            expected: spec.system_qubits(),
            actual: prep.num_qubits(),
        });
    }
    Ok(())
}

fn push_clock_hadamards(spec: &QpeSpec, circuit: &mut Circuit) -> Result<()> {
    let n = spec.system_qubits();
    for j in 0..spec.clock_qubits {
        circuit.push(GateKind::H, &[n + j])?;
    }
    Ok(())
}

fn push_inverse_qft(spec: &QpeSpec, circuit: &mut Circuit) -> Result<()> {
    let n = spec.system_qubits();
    let clock: Vec<usize> = (n..n + spec.clock_qubits).collect();
    circuit.extend_mapped(&inverse_qft(spec.clock_qubits)?, &clock)
}

fn empty_circuit(spec: &QpeSpec) -> Circuit {
    Circuit::with_registers(spec.total_qubits(), spec.registers())
}

/// Hadamards, optional eigenstate preparation, the given forward blocks
/// (block `t` under clock qubit `t`) and the inverse QFT.
fn assemble_forward(spec: &QpeSpec, prep: Option<&Circuit>, blocks: &[Circuit]) -> Result<Circuit> {
    let mut circuit = empty_circuit(spec);
    push_clock_hadamards(spec, &mut circuit)?;
    if let Some(prep) = prep {
        circuit.extend_mapped(prep, &(0..spec.system_qubits()).collect::<Vec<_>>())?;
    }
    for (t, block) in blocks.iter().enumerate() {
        circuit.extend_mapped(block, &spec.block_mapping(t))?;
    }
    push_inverse_qft(spec, &mut circuit)?;
    Ok(circuit)
}

/// Standard generator body: one synthesized controlled block, repeated
/// `2^j` times under clock qubit `j`.
pub(crate) fn standard_circuit(spec: &QpeSpec, prep: Option<&Circuit>) -> Result<Circuit> {
    spec.validate()?;
    let u = unitary_exponential(&spec.hamiltonian, spec.evolution_time)?;
    let block = synthesize_controlled_unitary(&u).map_err(|e| Error::SynthesisFailed {
        t: 0,
        reason: e.to_string(),
    })?;
    let mut circuit = empty_circuit(spec);
    push_clock_hadamards(spec, &mut circuit)?;
    if let Some(prep) = prep {
        circuit.extend_mapped(prep, &(0..spec.system_qubits()).collect::<Vec<_>>())?;
    }
    for j in 0..spec.clock_qubits {
        let mapping = spec.block_mapping(j);
        for _ in 0..1u64 << j {
            circuit.extend_mapped(&block, &mapping)?;
        }
    }
    push_inverse_qft(spec, &mut circuit)?;
    Ok(circuit)
}

/// LuGo forward body from already synthesized blocks.
pub(crate) fn lugo_forward(spec: &QpeSpec, prep: Option<&Circuit>, blocks: &[Circuit]) -> Result<Circuit> {
    assemble_forward(spec, prep, blocks)
}

/// LuGo inverse body: QFT, adjoint blocks from `t = k-1` down to 0, then
/// Hadamards. `adjoint_blocks[t]` must realize `c-(U^(2^t))†`.
pub(crate) fn lugo_inverse(spec: &QpeSpec, adjoint_blocks: &[Circuit]) -> Result<Circuit> {
    let n = spec.system_qubits();
    let clock: Vec<usize> = (n..n + spec.clock_qubits).collect();
    let mut circuit = empty_circuit(spec);
    circuit.extend_mapped(&qft(spec.clock_qubits)?, &clock)?;
    for (t, block) in adjoint_blocks.iter().enumerate().rev() {
        circuit.extend_mapped(block, &spec.block_mapping(t))?;
    }
    push_clock_hadamards(spec, &mut circuit)?;
    Ok(circuit)
}

pub(crate) fn forward_jobs(k: usize) -> Vec<BlockJob> {
    (0..k).map(|t| BlockJob { t, adjoint: false }).collect()
}

pub(crate) fn build_qpe_lugo_with(spec: &QpeSpec, prep: &Circuit, synthesize: &Synthesizer<'_>) -> Result<Circuit> {
    spec.validate()?;
    check_prep(spec, prep)?;
    let pool = worker_pool(spec.parallel_workers)?;
    let blocks = synthesize_blocks(spec, &forward_jobs(spec.clock_qubits), &pool, synthesize)?;
    lugo_forward(spec, Some(prep), &blocks)
}

/// Standard generator: `c-U` is synthesized once and appended `2^k - 1` times.
pub fn build_qpe_standard(spec: &QpeSpec, eigenstate_prep: &Circuit) -> Result<Circuit> {
    check_prep(spec, eigenstate_prep)?;
    standard_circuit(spec, Some(eigenstate_prep))
}

/// LuGo generator: each `c-e^{iH·t0·2^t}` is computed and synthesized as an
/// independent job on a pool of `spec.parallel_workers` threads.
pub fn build_qpe_lugo(spec: &QpeSpec, eigenstate_prep: &Circuit) -> Result<Circuit> {
    build_qpe_lugo_with(spec, eigenstate_prep, &synthesize_controlled_unitary)
}

pub fn build_qpe(spec: &QpeSpec, eigenstate_prep: &Circuit) -> Result<Circuit> {
    match spec.method {
        Method::Standard => build_qpe_standard(spec, eigenstate_prep),
        Method::Lugo => build_qpe_lugo(spec, eigenstate_prep),
    }
}
