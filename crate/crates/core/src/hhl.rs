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

//! HHL linear-systems circuits.
//!
//! Layout: input register `[0, n)`, clock register `[n, n + k)`, one
//! ancilla at `n + k`, and a single classical bit recording the ancilla.

use std::f64::consts::PI;
use std::ops::Range;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, Registers};
use crate::error::{Error, Result};
use crate::numerics::{
    classical_solve, hermitian_dilation, hermitian_eigendecomposition, pad_to_power_of_two,
    vector_norm, ComplexMatrix,
};
use crate::qpe::{self, BlockJob, Method, QpeSpec};
use crate::simulator::{fidelity, run_statevector, StateVector, MAX_QUBITS};
use crate::synthesis::{append_multiplexed_rotation, synthesize_controlled_unitary, Axis};

const NORM_TOL: f64 = 1e-12;
const ANGLE_EPS: f64 = 1e-14;

/// Clock register size for an `N`-dimensional problem: `log2(N) + 2`.
pub fn clock_qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidDimension(format!(
            "{dim} is not a power of two >= 2"
        )));
    }
    Ok(dim.trailing_zeros() as usize + 2)
}

/// Optional overrides for [`HhlProblem::new`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HhlOptions {
    pub clock_qubits: Option<usize>,
    pub evolution_time: Option<f64>,
    pub reciprocal_constant: Option<f64>,
    /// Two's-complement eigenvalue decoding. Chosen automatically from the
    /// sign of the spectrum when unset.
    pub signed: Option<bool>,
    pub parallel_workers: Option<usize>,
}

/// A validated HHL instance over a Hermitian, power-of-two system.
#[derive(Debug, Clone)]
pub struct HhlProblem {
    pub matrix: ComplexMatrix,
    /// Unit-norm right-hand side of the padded Hermitian system.
    pub rhs: Vec<Complex64>,
    pub clock_qubits: usize,
    pub evolution_time: f64,
    pub reciprocal_constant: f64,
    pub method: Method,
    pub signed: bool,
    pub parallel_workers: usize,
    /// Entries of the padded solution holding the original unknowns.
    pub solution: Range<usize>,
    original_matrix: ComplexMatrix,
    original_rhs: Vec<Complex64>,
}

/// Default evolution time: the smallest |eigenvalue| lands on clock code
/// `c = max(1, floor(K/κ))`, where `K` is the largest code magnitude. This
/// keeps the whole spectrum in range whenever `κ ≤ K` and makes the low end
/// of the spectrum, which dominates `A^{-1} b`, as precise as possible.
pub fn default_evolution_time(min_abs: f64, max_abs: f64, clock_qubits: usize, signed: bool) -> f64 {
    let largest_code = if signed {
        (1u64 << (clock_qubits - 1)).saturating_sub(1)
    } else {
        (1u64 << clock_qubits) - 1
    } as f64;
    let kappa = max_abs / min_abs;
    let code = (largest_code / kappa).floor().max(1.0);
    2.0 * PI * code / ((1u64 << clock_qubits) as f64 * min_abs)
}

/// Eigenvalue decoded from clock code `l`.
pub fn decoded_eigenvalue(code: usize, clock_qubits: usize, evolution_time: f64, signed: bool) -> f64 {
    let size = 1i64 << clock_qubits;
    let mut l = code as i64;
    if signed && l >= size / 2 {
        l -= size;
    }
    2.0 * PI * l as f64 / (size as f64 * evolution_time)
}

impl HhlProblem {
    /// Dilates (if `A` is not Hermitian), pads to a power of two,
    /// normalizes `b` and fills in defaults for everything not overridden.
    pub fn new(a: &ComplexMatrix, b: &[Complex64], method: Method, options: &HhlOptions) -> Result<Self> {
        let dilation = hermitian_dilation(a, b)?;
        let (matrix, rhs) = pad_to_power_of_two(&dilation.matrix, &dilation.rhs)?;
        let norm = vector_norm(&rhs);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let rhs: Vec<Complex64> = rhs.iter().map(|z| z / norm).collect();
        let dim = matrix.rows();
        let n = dim.trailing_zeros() as usize;

        let eigen = hermitian_eigendecomposition(&matrix)?;
        let (min_abs, max_abs) = (eigen.min_abs_value(), eigen.max_abs_value());
        if min_abs <= 1e-12 * max_abs.max(1.0) {
            let column = eigen
                .values
                .iter()
                .position(|v| v.abs() == min_abs)
                .unwrap_or(0);
            return Err(Error::Singular { column, pivot: min_abs });
        }
        let signed = options.signed.unwrap_or(eigen.values[0] < 0.0);
        let clock_qubits = match options.clock_qubits {
            Some(k) => k,
            None => clock_qubit_count(dim)?,
        };
        if clock_qubits == 0 || (signed && clock_qubits < 2) {
            return Err(Error::InvalidParameter(format!(
                "{clock_qubits} clock qubits are too few"
            )));
        }
        let total = n + clock_qubits + 1;
        if total > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: total,
                limit: MAX_QUBITS,
            });
        }
        let evolution_time = options
            .evolution_time
            .unwrap_or_else(|| default_evolution_time(min_abs, max_abs, clock_qubits, signed));
        let smallest = decoded_eigenvalue(1, clock_qubits, evolution_time, signed);
        let reciprocal_constant = options.reciprocal_constant.unwrap_or(smallest);
        let problem = Self {
            matrix,
            rhs,
            clock_qubits,
            evolution_time,
            reciprocal_constant,
            method,
            signed,
            parallel_workers: options.parallel_workers.unwrap_or(clock_qubits).max(1),
            solution: dilation.solution,
            original_matrix: a.clone(),
            original_rhs: b.to_vec(),
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn input_qubits(&self) -> usize {
        self.matrix.rows().trailing_zeros() as usize
    }

    pub fn total_qubits(&self) -> usize {
        self.input_qubits() + self.clock_qubits + 1
    }

    pub fn registers(&self) -> Registers {
        let n = self.input_qubits();
        let k = self.clock_qubits;
        Registers {
            input: Some(0..n),
            clock: Some(n..n + k),
            ancilla: Some(n + k..n + k + 1),
        }
    }

    /// Dimension of the system as given, before dilation and padding.
    pub fn original_dimension(&self) -> usize {
        self.original_matrix.rows()
    }

    /// Classical solution of the system as given.
    pub fn classical_solution(&self) -> Result<Vec<Complex64>> {
        classical_solve(&self.original_matrix, &self.original_rhs)
    }

    pub fn qpe_spec(&self) -> Result<QpeSpec> {
        Ok(QpeSpec::new(
            self.matrix.clone(),
            self.evolution_time,
            self.clock_qubits,
            self.method,
        )?
        .with_workers(self.parallel_workers))
    }

    fn validate(&self) -> Result<()> {
        let norm = vector_norm(&self.rhs);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NonUnitNorm { norm });
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
        check_reciprocal_domain(
            self.clock_qubits,
            self.reciprocal_constant,
            self.evolution_time,
            self.signed,
        )
    }
}

fn check_reciprocal_domain(k: usize, constant: f64, t0: f64, signed: bool) -> Result<()> {
    let smallest = decoded_eigenvalue(1, k, t0, signed);
    if !(constant > 0.0 && constant <= smallest * (1.0 + 1e-12)) {
        return Err(Error::ReciprocalDomain {
            constant,
            min_eigenvalue: smallest,
        });
    }
    Ok(())
}

fn has_rotation(angles: &[f64]) -> bool {
    angles.iter().any(|a| a.abs() > ANGLE_EPS)
}

/// Amplitude encoding of a unit vector with multiplexed rotations: `ry`
/// layers from the most significant qubit down for the moduli, then a
/// diagonal phase layer built from multiplexed `z` rotations.
pub fn state_preparation(b: &[Complex64]) -> Result<Circuit> {
    let dim = b.len();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidDimension(format!(
            "vector length {dim} is not a power of two >= 2"
        )));
    }
    let norm = vector_norm(b);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitNorm { norm });
    }
    let n = dim.trailing_zeros() as usize;
    let mut circuit = Circuit::new(n);

    // weights[i] = squared norm of the subtree below prefix i at each level.
    let mut weights: Vec<f64> = b.iter().map(|z| z.norm_sqr()).collect();
    let mut levels = Vec::with_capacity(n);
    for _ in 0..n {
        let angles: Vec<f64> = weights
            .chunks(2)
            .map(|w| 2.0 * w[1].sqrt().atan2(w[0].sqrt()))
            .collect();
        weights = weights.chunks(2).map(|w| w[0] + w[1]).collect();
        levels.push(angles);
    }
    for target in (0..n).rev() {
        let angles = &levels[target];
        if has_rotation(angles) {
            let controls: Vec<usize> = (target + 1..n).collect();
            append_multiplexed_rotation(&mut circuit, Axis::Y, angles, &controls, target)?;
        }
    }

    let mut phases: Vec<f64> = b.iter().map(|z| if z.norm() > 0.0 { z.arg() } else { 0.0 }).collect();
    for target in 0..n {
        let angles: Vec<f64> = phases.chunks(2).map(|p| p[1] - p[0]).collect();
        phases = phases.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        if has_rotation(&angles) {
            let controls: Vec<usize> = (target + 1..n).collect();
            append_multiplexed_rotation(&mut circuit, Axis::Z, &angles, &controls, target)?;
        }
    }
    circuit.add_global_phase(phases[0]);
    Ok(circuit)
}

/// Ancilla rotation by `2·asin(C/λ̃_l)` for every clock code `l`, realized
/// as one multiplexed `ry`. Qubits `[0, k)` are the clock, qubit `k` the
/// ancilla.
pub fn reciprocal_rotation(k: usize, constant: f64, evolution_time: f64, signed: bool) -> Result<Circuit> {
    if k == 0 {
        return Err(Error::InvalidParameter("at least one clock qubit is required".into()));
    }
    check_reciprocal_domain(k, constant, evolution_time, signed)?;
    let angles: Vec<f64> = (0..1usize << k)
        .map(|l| {
            if l == 0 {
                0.0
            } else {
                let lambda = decoded_eigenvalue(l, k, evolution_time, signed);
                2.0 * (constant / lambda).clamp(-1.0, 1.0).asin()
            }
        })
        .collect();
    let mut circuit = Circuit::new(k + 1);
    let controls: Vec<usize> = (0..k).collect();
    append_multiplexed_rotation(&mut circuit, Axis::Y, &angles, &controls, k)?;
    Ok(circuit)
}

/// Wall-clock split of one HHL build.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BuildTimings {
    /// Worker-pool startup (LuGo only).
    pub pool_startup: Duration,
    /// Phase estimation and its inverse, including block synthesis.
    pub qpe: Duration,
    /// State preparation, reciprocal rotation and final assembly.
    pub other: Duration,
}

pub fn build_hhl(problem: &HhlProblem) -> Result<Circuit> {
    build_hhl_timed(problem).map(|(circuit, _)| circuit)
}

/// Builds the HHL circuit and reports where the generation time went.
pub fn build_hhl_timed(problem: &HhlProblem) -> Result<(Circuit, BuildTimings)> {
    problem.validate()?;
    let mut timings = BuildTimings::default();
    let spec = problem.qpe_spec()?;
    let n = problem.input_qubits();
    let k = problem.clock_qubits;

    let start = Instant::now();
    let prep = state_preparation(&problem.rhs)?;
    let reciprocal = reciprocal_rotation(k, problem.reciprocal_constant, problem.evolution_time, problem.signed)?;
    timings.other += start.elapsed();

    let (forward, inverse) = match problem.method {
        Method::Standard => {
            let start = Instant::now();
            let forward = qpe::standard_circuit(&spec, None)?;
            let inverse = forward.inverse()?;
            timings.qpe += start.elapsed();
            (forward, inverse)
        }
        Method::Lugo => {
            let start = Instant::now();
            let pool = qpe::worker_pool(problem.parallel_workers)?;
            timings.pool_startup += start.elapsed();

            let start = Instant::now();
            let jobs: Vec<BlockJob> = (0..k)
                .map(|t| BlockJob { t, adjoint: false })
                .chain((0..k).map(|t| BlockJob { t, adjoint: true }))
                .collect();
            let mut blocks = qpe::synthesize_blocks(&spec, &jobs, &pool, &synthesize_controlled_unitary)?;
            let adjoint_blocks = blocks.split_off(k);
            let forward = qpe::lugo_forward(&spec, None, &blocks)?;
            let inverse = qpe::lugo_inverse(&spec, &adjoint_blocks)?;
            timings.qpe += start.elapsed();
            (forward, inverse)
        }
    };

    // Copying the phase-estimation gates into the host is part of their
    // generation cost.
    let start = Instant::now();
    let mut circuit = Circuit::with_registers(problem.total_qubits(), problem.registers());
    circuit.set_num_clbits(1);
    let input: Vec<usize> = (0..n).collect();
    circuit.extend_mapped(&prep, &input)?;
    timings.other += start.elapsed();

    let body: Vec<usize> = (0..n + k).collect();
    let start = Instant::now();
    circuit.extend_mapped(&forward, &body)?;
    timings.qpe += start.elapsed();

    let start = Instant::now();
    let rotation: Vec<usize> = (n..=n + k).collect();
    circuit.extend_mapped(&reciprocal, &rotation)?;
    timings.other += start.elapsed();

    let start = Instant::now();
    circuit.extend_mapped(&inverse, &body)?;
    timings.qpe += start.elapsed();

    let start = Instant::now();
    circuit.push(GateKind::Measure { clbit: 0 }, &[n + k])?;
    timings.other += start.elapsed();
    Ok((circuit, timings))
}

/// Projects onto `ancilla = 1, clock = 0` and renormalizes the input
/// register. Returns the full input-register vector and the probability of
/// the projected branch.
pub fn extract_solution(state: &StateVector, registers: &Registers) -> Result<(Vec<Complex64>, f64)> {
    let missing = |name: &str| Error::Schema(format!("state layout has no {name} register"));
    let input = registers.input.clone().ok_or_else(|| missing("input"))?;
    let clock = registers.clock.clone().ok_or_else(|| missing("clock"))?;
    let ancilla = registers.ancilla.clone().ok_or_else(|| missing("ancilla"))?;
    if ancilla.len() != 1 {
        return Err(Error::Schema("ancilla register must hold one qubit".into()));
    }
    let q = state.num_qubits();
    if [input.end, clock.end, ancilla.end].iter().any(|&e| e > q) {
        return Err(Error::Schema("register exceeds the state's qubit count".into()));
    }
    let amps = state.amplitudes();
    let base = 1usize << ancilla.start;
    let projected: Vec<Complex64> = (0..1usize << input.len())
        .map(|x| amps[base | (x << input.start)])
        .collect();
    let probability: f64 = projected.iter().map(|z| z.norm_sqr()).sum();
    if probability < 1e-12 {
        return Err(Error::DegeneratePostselection { probability });
    }
    let scale = 1.0 / probability.sqrt();
    Ok((projected.iter().map(|z| z * scale).collect(), probability))
}

/// Exact-amplitude outcome of an HHL circuit.
#[derive(Debug, Clone)]
pub struct HhlOutcome {
    /// Post-selected estimate restricted to the original unknowns.
    pub solution: Vec<Complex64>,
    pub success_probability: f64,
    pub fidelity: f64,
}

/// Simulates `circuit` and compares the post-selected solution with the
/// classical one.
pub fn evaluate(problem: &HhlProblem, circuit: &Circuit) -> Result<HhlOutcome> {
    let state = run_statevector(circuit)?;
    let (estimate, success_probability) = extract_solution(&state, &problem.registers())?;
    let solution = estimate[problem.solution.clone()].to_vec();
    let reference = problem.classical_solution()?;
    let fidelity = fidelity(&reference, &solution)?;
    Ok(HhlOutcome {
        solution,
        success_probability,
        fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{random_unitary, toeplitz_tridiagonal};
    use crate::simulator::run_from;
    use crate::synthesis::circuit_unitary;
    use crate::testutil::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(dim: usize) -> Vec<Complex64> {
        vec![c(1.0 / (dim as f64).sqrt()); dim]
    }

    fn toeplitz_problem(dim: usize, method: Method) -> HhlProblem {
        let a = toeplitz_tridiagonal(dim, 2.0, -1.0).unwrap();
        HhlProblem::new(&a, &uniform(dim), method, &HhlOptions::default()).unwrap()
    }

    #[test]
    fn clock_rule() {
        assert_eq!(clock_qubit_count(2).unwrap(), 3);
        assert_eq!(clock_qubit_count(4).unwrap(), 4);
        assert_eq!(clock_qubit_count(64).unwrap(), 8);
        assert!(clock_qubit_count(6).is_err());
        for (dim, total) in [(2, 5), (4, 7), (64, 15)] {
            let a = ComplexMatrix::identity(dim).scale(c(2.0));
            let p = HhlProblem::new(&a, &uniform(dim), Method::Standard, &HhlOptions::default()).unwrap();
            assert_eq!(p.total_qubits(), total);
        }
    }

    #[test]
    fn state_preparation_examples() {
        let basis: Vec<Complex64> = (0..4).map(|i| c(if i == 0 { 1.0 } else { 0.0 })).collect();
        assert!(state_preparation(&basis).unwrap().is_empty());

        let plus = state_preparation(&uniform(2)).unwrap();
        assert_eq!(plus.gates().len(), 1);
        assert_eq!(plus.gates()[0].kind, GateKind::Ry(PI / 2.0));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            for complex in [false, true] {
                let mut v: Vec<Complex64> = (0..1 << n)
                    .map(|_| {
                        let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
                        Complex64::new(rng.gen_range(-1.0..1.0), im)
                    })
                    .collect();
                let norm = vector_norm(&v);
                v.iter_mut().for_each(|z| *z /= norm);
                let circuit = state_preparation(&v).unwrap();
                let state = run_statevector(&circuit).unwrap();
                for (a, b) in state.amplitudes().iter().zip(&v) {
                    assert!((a - b).norm() < 1e-9);
                }
                let rotations = circuit.gate_count() - circuit.count_of("cx");
                assert!(rotations <= 2 << n && circuit.count_of("cx") <= 2 << n);
            }
        }
        assert!(matches!(state_preparation(&[c(1.0), c(1.0)]), Err(Error::NonUnitNorm { .. })));
    }

    fn clock_state(k: usize, l: usize) -> StateVector {
        let mut amps = vec![c(0.0); 1 << (k + 1)];
        amps[l] = c(1.0);
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn reciprocal_rotation_examples() {
        let k = 3;
        let t0 = 0.5;
        let smallest = decoded_eigenvalue(1, k, t0, false);
        let circuit = reciprocal_rotation(k, smallest, t0, false).unwrap();
        assert_eq!(circuit.count_of("ry"), 8);
        assert_eq!(circuit.count_of("cx"), 8);
        // λ̃_1 = C: ancilla fully rotated.
        let s = run_from(&circuit, clock_state(k, 1)).unwrap();
        assert!((s.amplitudes()[1 | 8].norm() - 1.0).abs() < 1e-12);
        // l = 0: untouched.
        let s = run_from(&circuit, clock_state(k, 0)).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        // Amplitude ratio encodes 1/λ.
        let a2 = run_from(&circuit, clock_state(k, 2)).unwrap().amplitudes()[2 | 8];
        let a4 = run_from(&circuit, clock_state(k, 4)).unwrap().amplitudes()[4 | 8];
        assert!((a4.re / a2.re - 0.5).abs() < 1e-9);

        assert!(matches!(
            reciprocal_rotation(k, smallest * 1.01, t0, false),
            Err(Error::ReciprocalDomain { .. })
        ));
        // Signed decoding: code 6 of 3 bits is -2.
        let signed = reciprocal_rotation(k, smallest, t0, true).unwrap();
        let a6 = run_from(&signed, clock_state(k, 6)).unwrap().amplitudes()[6 | 8];
        assert!((a6.re + 0.5).abs() < 1e-9);
    }

    #[test]
    fn default_parameters() {
        let p = toeplitz_problem(2, Method::Standard);
        assert_eq!(p.clock_qubits, 3);
        assert!(!p.signed);
        // Eigenvalues 1 and 3 sit on codes 2 and 6.
        let code = |lambda: f64| lambda * p.evolution_time * 8.0 / (2.0 * PI);
        assert!((code(1.0) - 2.0).abs() < 1e-12 && (code(3.0) - 6.0).abs() < 1e-12);
        assert!((p.reciprocal_constant - 0.5).abs() < 1e-12);
        assert_eq!(p.solution, 0..2);
    }

    #[test]
    fn non_hermitian_input_is_dilated_and_padded() {
        let a = ComplexMatrix::from_real(3, 3, &[2.0, 1.0, 0.0, 0.0, 3.0, 1.0, 1.0, 0.0, 4.0]).unwrap();
        let b = vec![c(1.0), c(0.0), c(2.0)];
        let p = HhlProblem::new(&a, &b, Method::Lugo, &HhlOptions::default()).unwrap();
        assert_eq!(p.matrix.rows(), 8);
        assert_eq!(p.solution, 3..6);
        assert!(p.signed);
        assert_eq!(p.original_dimension(), 3);
        assert!(p.matrix.is_hermitian(1e-12));
    }

    #[test]
    fn problem_validation() {
        let a = toeplitz_tridiagonal(2, 2.0, -1.0).unwrap();
        assert!(matches!(
            HhlProblem::new(&a, &[c(0.0), c(0.0)], Method::Standard, &HhlOptions::default()),
            Err(Error::ZeroVector)
        ));
        let singular = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            HhlProblem::new(&singular, &uniform(2), Method::Standard, &HhlOptions::default()),
            Err(Error::Singular { .. })
        ));
        let options = HhlOptions {
            reciprocal_constant: Some(10.0),
            ..Default::default()
        };
        assert!(matches!(
            HhlProblem::new(&a, &uniform(2), Method::Standard, &options),
            Err(Error::ReciprocalDomain { .. })
        ));
    }

    #[test]
    fn layout_and_measurement() {
        let p = toeplitz_problem(2, Method::Lugo);
        let circuit = build_hhl(&p).unwrap();
        assert_eq!(circuit.num_qubits(), 5);
        assert_eq!(circuit.num_clbits(), 1);
        assert_eq!(circuit.registers().ancilla, Some(4..5));
        let last = circuit.gates().last().unwrap();
        assert_eq!(last.kind, GateKind::Measure { clbit: 0 });
        assert_eq!(last.qubits.as_slice(), &[4]);
    }

    #[test]
    fn extract_solution_examples() {
        let registers = Registers {
            input: Some(0..1),
            clock: Some(1..2),
            ancilla: Some(2..3),
        };
        let x = [c(0.6), Complex64::new(0.0, 0.8)];
        let mut amps = vec![c(0.0); 8];
        amps[0b100] = x[0];
        amps[0b101] = x[1];
        let state = StateVector::from_amplitudes(amps).unwrap();
        let (est, p) = extract_solution(&state, &registers).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!((est[0] - x[0]).norm() < 1e-12 && (est[1] - x[1]).norm() < 1e-12);

        let mut amps = vec![c(0.0); 8];
        amps[0b001] = c(1.0);
        let state = StateVector::from_amplitudes(amps).unwrap();
        assert!(matches!(
            extract_solution(&state, &registers),
            Err(Error::DegeneratePostselection { .. })
        ));
    }

    #[test]
    fn toeplitz_fidelity_and_equivalence() {
        for dim in [2, 4] {
            let mut states = Vec::new();
            for method in [Method::Standard, Method::Lugo] {
                let p = toeplitz_problem(dim, method);
                let circuit = build_hhl(&p).unwrap();
                let outcome = evaluate(&p, &circuit).unwrap();
                assert!(outcome.fidelity >= 0.998, "{dim} {method}: {}", outcome.fidelity);
                states.push(run_statevector(&circuit).unwrap());
            }
            let f = fidelity(states[0].amplitudes(), states[1].amplitudes()).unwrap();
            assert!(f >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn standard_and_lugo_are_unitarily_equivalent() {
        let strip = |circuit: &Circuit| {
            let mut out = Circuit::new(circuit.num_qubits());
            for g in circuit.gates().iter().filter(|g| !matches!(g.kind, GateKind::Measure { .. })) {
                out.append(g.clone()).unwrap();
            }
            out.add_global_phase(circuit.global_phase());
            out
        };
        let u = |m| circuit_unitary(&strip(&build_hhl(&toeplitz_problem(2, m)).unwrap())).unwrap();
        assert!(u(Method::Standard).phase_insensitive_distance(&u(Method::Lugo)) < 1e-8);
    }

    #[test]
    fn exactly_representable_spectrum() {
        // A = V·diag(1,2,3,4)·V† with k = 4 and t0 chosen so that every
        // eigenvalue lands on an integer code.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let v = random_unitary(4, &mut rng);
        let values = [1.0, 2.0, 3.0, 4.0];
        let d = ComplexMatrix::from_diagonal(&values.map(c));
        let a = v.matmul(&d).matmul(&v.adjoint());
        let b: Vec<Complex64> = {
            let raw: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let norm = vector_norm(&raw);
            raw.iter().map(|z| z / norm).collect()
        };
        let options = HhlOptions {
            clock_qubits: Some(4),
            evolution_time: Some(2.0 * PI * 2.0 / 16.0),
            ..Default::default()
        };
        for method in [Method::Standard, Method::Lugo] {
            let p = HhlProblem::new(&a, &b, method, &options).unwrap();
            let outcome = evaluate(&p, &build_hhl(&p).unwrap()).unwrap();
            assert!(outcome.fidelity >= 1.0 - 1e-6, "{}", outcome.fidelity);
            let beta = v.adjoint().mul_vec(&p.rhs);
            let expected: f64 = beta
                .iter()
                .zip(values)
                .map(|(bj, l)| bj.norm_sqr() * (p.reciprocal_constant / l).powi(2))
                .sum();
            assert!((outcome.success_probability - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn timings_are_reported() {
        let (_, t) = build_hhl_timed(&toeplitz_problem(2, Method::Lugo)).unwrap();
        assert!(t.qpe > Duration::ZERO);
        let (_, t) = build_hhl_timed(&toeplitz_problem(2, Method::Standard)).unwrap();
        assert_eq!(t.pool_startup, Duration::ZERO);
    }
}
