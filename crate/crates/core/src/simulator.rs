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

//! Exact statevector simulation, seeded shot sampling and the solution
//! fidelity metric.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::numerics::{inner_product, vector_norm};

/// Largest register the simulator accepts (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// `2^q` complex amplitudes; qubit `j` is bit `j` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
    /// Qubits that carry a (deferred) measurement.
    measured: Vec<usize>,
}

impl StateVector {
    /// `|0...0⟩`.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
            measured: Vec::new(),
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidDimension(format!(
                "{len} amplitudes is not a power of two"
            )));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
            measured: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured
    }

    pub fn norm(&self) -> f64 {
        vector_norm(&self.amplitudes)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        inner_product(&self.amplitudes, &other.amplitudes).norm_sqr()
    }

    pub fn apply(&mut self, gate: &Gate) {
        apply_gate(&mut self.amplitudes, gate);
        if matches!(gate.kind, GateKind::Measure { .. }) {
            self.measured.push(gate.qubits[0]);
        }
    }
}

/// Inserts a zero bit at position `bit` of `k`.
#[inline]
fn insert_zero_bit(k: usize, bit: usize) -> usize {
    let low = k & ((1 << bit) - 1);
    ((k >> bit) << (bit + 1)) | low
}

/// Applies a 2x2 matrix to `target`, restricted to basis states where every
/// bit of `control_mask` is set.
pub(crate) fn apply_controlled_1q(
    amps: &mut [Complex64],
    control_mask: usize,
    target: usize,
    m: &[Complex64; 4],
) {
    let half = amps.len() >> 1;
    let tbit = 1 << target;
    for k in 0..half {
        let i = insert_zero_bit(k, target);
        if i & control_mask != control_mask {
            continue;
        }
        let j = i | tbit;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m[0] * a + m[1] * b;
        amps[j] = m[2] * a + m[3] * b;
    }
}

/// Applies a dense unitary on `qubits` (qubit `qubits[b]` is bit `b` of
/// the matrix index).
pub(crate) fn apply_dense(amps: &mut [Complex64], qubits: &[usize], m: &crate::ComplexMatrix) {
    let dim = 1usize << qubits.len();
    let mask: usize = qubits.iter().map(|&q| 1 << q).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|local| {
            qubits
                .iter()
                .enumerate()
                .filter(|(b, _)| local >> b & 1 == 1)
                .map(|(_, &q)| 1 << q)
                .sum()
        })
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (slot, &off) in buf.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            amps[base | off] = m.row(r).iter().zip(&buf).map(|(a, b)| a * b).sum();
        }
    }
}

/// Applies one gate in place; measurements are no-ops here.
pub(crate) fn apply_gate(amps: &mut [Complex64], gate: &Gate) {
    if let Some((controls, m)) = gate.kind.controlled_target_matrix() {
        let mask = gate.qubits[..controls].iter().map(|&q| 1 << q).sum();
        apply_controlled_1q(amps, mask, gate.qubits[controls], &m);
        return;
    }
    match &gate.kind {
        GateKind::Unitary(block) => apply_dense(amps, &gate.qubits, &block.matrix),
        GateKind::Measure { .. } => {}
        _ => unreachable!("all other kinds have target matrices"),
    }
}

/// Runs a circuit from `|0...0⟩`. Measurements are deferred: the returned
/// state is the pre-measurement state, with measured qubits recorded.
pub fn run_statevector(circuit: &Circuit) -> Result<StateVector> {
    run_from(circuit, StateVector::zero(circuit.num_qubits()))
}

/// Runs a circuit from a given initial state.
pub fn run_from(circuit: &Circuit, mut state: StateVector) -> Result<StateVector> {
    if circuit.num_qubits() > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            requested: circuit.num_qubits(),
            limit: MAX_QUBITS,
        });
    }
    if state.num_qubits != circuit.num_qubits() {
        return Err(Error::LengthMismatch {
            expected: circuit.num_qubits(),
            actual: state.num_qubits,
        });
    }
    for gate in circuit.gates() {
        state.apply(gate);
    }
    if circuit.global_phase() != 0.0 {
        let phase = Complex64::from_polar(1.0, circuit.global_phase());
        for a in state.amplitudes.iter_mut() {
            *a *= phase;
        }
    }
    Ok(state)
}

/// Formats a basis index with qubit 0 as the rightmost character.
pub fn bitstring(index: usize, num_qubits: usize) -> String {
    (0..num_qubits)
        .rev()
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Shot counts as written to disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
}

/// Draws `shots` samples from the state's Born distribution.
pub fn sample(state: &StateVector, shots: u64, seed: u64) -> Result<Counts> {
    let per_index = sample_indices(state, shots, seed)?;
    let counts = per_index
        .into_iter()
        .map(|(i, n)| (bitstring(i, state.num_qubits), n))
        .collect();
    Ok(Counts {
        shots,
        seed,
        counts,
    })
}

/// Like [`sample`] but keyed by basis index.
pub fn sample_indices(state: &StateVector, shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let mut cumulative = Vec::with_capacity(state.amplitudes.len());
    let mut acc = 0.0;
    for a in &state.amplitudes {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    if acc <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let idx = cumulative
            .partition_point(|&c| c <= u)
            .min(cumulative.len() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Squared overlap of the normalized vectors; insensitive to global phase.
pub fn fidelity(reference: &[Complex64], estimate: &[Complex64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            actual: estimate.len(),
        });
    }
    let (nr, ne) = (vector_norm(reference), vector_norm(estimate));
    if nr == 0.0 || ne == 0.0 {
        return Err(Error::ZeroVector);
    }
    let f = inner_product(reference, estimate).norm_sqr() / (nr * nr * ne * ne);
    Ok(f.clamp(0.0, 1.0))
}
