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

//! Exact synthesis of dense unitaries into `{u3, ry, p, cx}` circuits by
//! quantum Shannon decomposition.
//!
//! An `n`-qubit unitary is split on its most significant qubit with a
//! cosine-sine decomposition
//!
//! ```text
//! U = diag(L0, L1) · [[C, -S], [S, C]] · diag(R0, R1)
//! ```
//!
//! where the middle factor is a multiplexed `ry` on the top qubit and each
//! block-diagonal factor is demultiplexed into two `(n-1)`-qubit unitaries
//! around a multiplexed `rz`. Single-qubit leaves become one `u3`. Every
//! step keeps track of the global phase, so the circuit reproduces `U`
//! exactly rather than up to phase.

use num_complex::Complex64;

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::numerics::{
    gram_schmidt, inner_product, jacobi_svd, unitary_eigendecomposition, vector_norm,
    ComplexMatrix, UNITARY_TOL,
};
use crate::simulator::apply_gate;

/// Largest register accepted by [`synthesize_unitary`] and [`circuit_unitary`].
pub const MAX_SYNTHESIS_QUBITS: usize = 11;

/// `U = e^{iα}·Rz(φ)·Ry(θ)·Rz(λ)` with `θ ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZyzAngles {
    pub global_phase: f64,
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

/// Euler ZYZ decomposition of a 2x2 unitary.
pub fn zyz_decompose(u: &ComplexMatrix) -> Result<ZyzAngles> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::InvalidDimension(format!(
            "zyz needs a 2x2 matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    u.require_unitary(1e-9)?;
    Ok(zyz_unchecked(u))
}

pub(crate) fn zyz_unchecked(u: &ComplexMatrix) -> ZyzAngles {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha = det.arg() / 2.0;
    let unphase = Complex64::from_polar(1.0, -alpha);
    let v00 = u[(0, 0)] * unphase;
    let v10 = u[(1, 0)] * unphase;
    let v11 = u[(1, 1)] * unphase;
    let theta = 2.0 * v10.norm().atan2(v00.norm());
    let (phi, lambda) = if v10.norm() < 1e-12 {
        (2.0 * v11.arg(), 0.0)
    } else if v00.norm() < 1e-12 {
        (2.0 * v10.arg(), 0.0)
    } else {
        let sum = 2.0 * v11.arg();
        let diff = 2.0 * v10.arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    ZyzAngles {
        global_phase: alpha,
        theta,
        phi,
        lambda,
    }
}

/// Rotation axis of a multiplexed rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Y,
    Z,
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Appends a uniformly controlled rotation: for every basis state `s` of
/// `controls` (control `b` is bit `b` of `s`) the target is rotated by
/// `angles[s]`. Uses the Gray-code walk of `2^m` rotations and `2^m` cx.
/// Z rotations are emitted as `p` gates with the compensating global phase.
pub(crate) fn append_multiplexed_rotation(
    circuit: &mut Circuit,
    axis: Axis,
    angles: &[f64],
    controls: &[usize],
    target: usize,
) -> Result<()> {
    let m = controls.len();
    let len = 1usize << m;
    if angles.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            actual: angles.len(),
        });
    }
    let rotation = |circuit: &mut Circuit, theta: f64| -> Result<()> {
        match axis {
            Axis::Y => circuit.push(GateKind::Ry(theta), &[target]),
            Axis::Z => {
                circuit.add_global_phase(-theta / 2.0);
                circuit.push(GateKind::P(theta), &[target])
            }
        }
    };
    if m == 0 {
        return rotation(circuit, angles[0]);
    }
    for i in 0..len {
        let g = gray(i);
        let theta = angles
            .iter()
            .enumerate()
            .map(|(s, a)| {
                if (s & g).count_ones().is_multiple_of(2) {
                    *a
                } else {
                    -*a
                }
            })
            .sum::<f64>()
            / len as f64;
        rotation(circuit, theta)?;
        let flip = g ^ gray((i + 1) % len);
        let control = controls[flip.trailing_zeros() as usize];
        circuit.push(GateKind::Cx, &[control, target])?;
    }
    Ok(())
}

/// Multiplexed rotation as a standalone circuit over `max(index) + 1` qubits.
pub fn multiplexed_rotation(
    axis: Axis,
    angles: &[f64],
    controls: &[usize],
    target: usize,
) -> Result<Circuit> {
    let width = controls.iter().copied().chain([target]).max().unwrap_or(0) + 1;
    let mut circuit = Circuit::new(width);
    append_multiplexed_rotation(&mut circuit, axis, angles, controls, target)?;
    Ok(circuit)
}

struct CosineSine {
    l0: ComplexMatrix,
    l1: ComplexMatrix,
    r0: ComplexMatrix,
    r1: ComplexMatrix,
    theta: Vec<f64>,
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Aligns the phase of `basis[j]` so that `basis[j]† target[j]` is real and
/// non-negative, returning that value.
fn align(basis: &mut [Complex64], target: &[Complex64]) -> f64 {
    let overlap = inner_product(basis, target);
    if overlap.norm() > 0.0 {
        let phase = overlap / overlap.norm();
        for z in basis.iter_mut() {
            *z *= phase;
        }
    }
    overlap.norm()
}

fn cosine_sine(u: &ComplexMatrix) -> CosineSine {
    let h = u.rows() / 2;
    let u00 = u.block(0, 0, h, h);
    let u01 = u.block(0, h, h, h);
    let u10 = u.block(h, 0, h, h);
    let u11 = u.block(h, h, h, h);

    let svd = jacobi_svd(&u00);
    let right = ComplexMatrix::from_columns(&svd.right);
    let r0 = right.adjoint();

    let cos_norms: Vec<f64> = svd.left.iter().map(|w| vector_norm(w)).collect();
    let mut l0_cols = gram_schmidt(&svd.left, &descending_order(&cos_norms));
    let cos: Vec<f64> = l0_cols
        .iter_mut()
        .zip(&svd.left)
        .map(|(b, w)| align(b, w))
        .collect();

    let lower = u10.matmul(&right);
    let lower_cols: Vec<Vec<Complex64>> = (0..h).map(|c| lower.column(c)).collect();
    let sin_norms: Vec<f64> = lower_cols.iter().map(|w| vector_norm(w)).collect();
    let mut l1_cols = gram_schmidt(&lower_cols, &descending_order(&sin_norms));
    let sin: Vec<f64> = l1_cols
        .iter_mut()
        .zip(&lower_cols)
        .map(|(b, w)| align(b, w))
        .collect();

    let theta: Vec<f64> = sin.iter().zip(&cos).map(|(s, c)| s.atan2(*c)).collect();
    let l0 = ComplexMatrix::from_columns(&l0_cols);
    let l1 = ComplexMatrix::from_columns(&l1_cols);

    // Row j of R1 from whichever of C or S is well away from zero.
    let from_cos = l1.adjoint().matmul(&u11);
    let from_sin = l0.adjoint().matmul(&u01);
    let mut r1 = ComplexMatrix::zeros(h, h);
    for (j, &t) in theta.iter().enumerate() {
        let (s, c) = t.sin_cos();
        for col in 0..h {
            r1[(j, col)] = if c >= s {
                from_cos[(j, col)] / c
            } else {
                -from_sin[(j, col)] / s
            };
        }
    }
    CosineSine {
        l0,
        l1,
        r0,
        r1,
        theta,
    }
}

fn append_qsd(u: &ComplexMatrix, qubits: &[usize], out: &mut Circuit) -> Result<()> {
    let n = qubits.len();
    if n == 1 {
        let z = zyz_unchecked(u);
        out.add_global_phase(z.global_phase - (z.phi + z.lambda) / 2.0);
        return out.push(
            GateKind::U3 {
                theta: z.theta,
                phi: z.phi,
                lambda: z.lambda,
            },
            &[qubits[0]],
        );
    }
    let (lower, top) = (&qubits[..n - 1], qubits[n - 1]);
    let cs = cosine_sine(u);
    append_demultiplexed(&cs.r0, &cs.r1, qubits, out)?;
    let angles: Vec<f64> = cs.theta.iter().map(|t| 2.0 * t).collect();
    append_multiplexed_rotation(out, Axis::Y, &angles, lower, top)?;
    append_demultiplexed(&cs.l0, &cs.l1, qubits, out)
}

/// `diag(A0, A1) = (I ⊗ V)·diag(D, D†)·(I ⊗ W)` with `A0·A1† = V·D²·V†`.
fn append_demultiplexed(
    a0: &ComplexMatrix,
    a1: &ComplexMatrix,
    qubits: &[usize],
    out: &mut Circuit,
) -> Result<()> {
    let n = qubits.len();
    let (lower, top) = (&qubits[..n - 1], qubits[n - 1]);
    let x = a0.matmul(&a1.adjoint());
    let (v, eigenvalues) = unitary_eigendecomposition(&x);
    let half_phases: Vec<f64> = eigenvalues.iter().map(|l| l.arg() / 2.0).collect();
    let d = ComplexMatrix::from_diagonal(
        &half_phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect::<Vec<_>>(),
    );
    let w = d.matmul(&v.adjoint()).matmul(a1);
    append_qsd(&w, lower, out)?;
    let angles: Vec<f64> = half_phases.iter().map(|p| -2.0 * p).collect();
    append_multiplexed_rotation(out, Axis::Z, &angles, lower, top)?;
    append_qsd(&v, lower, out)
}

fn qubit_count_of(u: &ComplexMatrix) -> Result<usize> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let dim = u.rows();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidDimension(format!(
            "unitary dimension {dim} is not a power of two >= 2"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_SYNTHESIS_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            limit: MAX_SYNTHESIS_QUBITS,
        });
    }
    Ok(n)
}

/// Synthesizes `U` into a circuit whose unitary (including its global
/// phase) equals `U`.
pub fn synthesize_unitary(u: &ComplexMatrix) -> Result<Circuit> {
    let n = qubit_count_of(u)?;
    u.require_unitary(UNITARY_TOL)?;
    let mut out = Circuit::new(n);
    let qubits: Vec<usize> = (0..n).collect();
    append_qsd(u, &qubits, &mut out)?;
    Ok(out)
}

/// Synthesizes `diag(I, U)` on `n + 1` qubits; the control is qubit `n`.
pub fn synthesize_controlled_unitary(u: &ComplexMatrix) -> Result<Circuit> {
    let n = qubit_count_of(u)?;
    if n + 1 > MAX_SYNTHESIS_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n + 1,
            limit: MAX_SYNTHESIS_QUBITS,
        });
    }
    u.require_unitary(UNITARY_TOL)?;
    let dim = u.rows();
    let mut block = ComplexMatrix::identity(2 * dim);
    block.set_block(dim, dim, u);
    synthesize_unitary(&block)
}

/// Dense unitary of a measurement-free circuit, global phase included.
pub fn circuit_unitary(circuit: &Circuit) -> Result<ComplexMatrix> {
    let n = circuit.num_qubits();
    if n > MAX_SYNTHESIS_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            limit: MAX_SYNTHESIS_QUBITS,
        });
    }
    if circuit.contains_measurement() {
        return Err(Error::MeasurementPresent);
    }
    let dim = 1usize << n;
    let phase = Complex64::from_polar(1.0, circuit.global_phase());
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut column = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        column.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        column[j] = phase;
        for gate in circuit.gates() {
            apply_gate(&mut column, gate);
        }
        for (i, z) in column.iter().enumerate() {
            out[(i, j)] = *z;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{random_unitary, unitary_exponential};
    use crate::testutil::{assert_close, c, random_circuit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn rz(a: f64) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&[
            Complex64::from_polar(1.0, -a / 2.0),
            Complex64::from_polar(1.0, a / 2.0),
        ])
    }

    fn ry(a: f64) -> ComplexMatrix {
        let (s, co) = (a / 2.0).sin_cos();
        ComplexMatrix::from_real(2, 2, &[co, -s, s, co]).unwrap()
    }

    fn rebuild(z: &ZyzAngles) -> ComplexMatrix {
        rz(z.phi)
            .matmul(&ry(z.theta))
            .matmul(&rz(z.lambda))
            .scale(Complex64::from_polar(1.0, z.global_phase))
    }

    /// Dense oracle for a multiplexed rotation: block-diagonal over the
    /// control states, assembled entry by entry.
    fn multiplexed_oracle(axis: Axis, angles: &[f64], controls: &[usize], target: usize, n: usize) -> ComplexMatrix {
        let dim = 1 << n;
        ComplexMatrix::from_fn(dim, dim, |r, col| {
            let others = !(1usize << target);
            if r & others != col & others {
                return c(0.0);
            }
            let s: usize = controls
                .iter()
                .enumerate()
                .map(|(b, &q)| ((r >> q) & 1) << b)
                .sum();
            let m = match axis {
                Axis::Y => ry(angles[s]),
                Axis::Z => rz(angles[s]),
            };
            m[((r >> target) & 1, (col >> target) & 1)]
        })
    }

    #[test]
    fn zyz_examples() {
        let z = zyz_decompose(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!((z.global_phase, z.theta, z.phi, z.lambda), (0.0, 0.0, 0.0, 0.0));

        let z = zyz_decompose(&ry(0.7)).unwrap();
        assert!((z.theta - 0.7).abs() < 1e-15);
        assert!(z.phi.abs() < 1e-15 && z.lambda.abs() < 1e-15 && z.global_phase.abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let u = random_unitary(2, &mut rng);
            let z = zyz_decompose(&u).unwrap();
            assert!((0.0..=PI).contains(&z.theta));
            assert_close(&rebuild(&z), &u, 1e-9);
        }
        for u in [
            ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
            ComplexMatrix::identity(2).scale(c(-1.0)),
            rz(2.5),
        ] {
            assert_close(&rebuild(&zyz_decompose(&u).unwrap()), &u, 1e-12);
        }
        let bad = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(zyz_decompose(&bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn multiplexed_rotation_examples() {
        let single = multiplexed_rotation(Axis::Y, &[0.4], &[], 0).unwrap();
        assert_eq!(single.gates().len(), 1);
        assert_eq!(single.gates()[0].kind, GateKind::Ry(0.4));

        let same = multiplexed_rotation(Axis::Y, &[0.9, 0.9], &[1], 0).unwrap();
        let expected = ComplexMatrix::identity(2).kron(&ry(0.9));
        assert_close(&circuit_unitary(&same).unwrap(), &expected, 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        use rand::Rng;
        for axis in [Axis::Y, Axis::Z] {
            for (controls, target, n) in [(vec![0usize, 2], 1usize, 3usize), (vec![3, 1, 0], 2, 4)] {
                let angles: Vec<f64> = (0..1 << controls.len()).map(|_| rng.gen_range(-4.0..4.0)).collect();
                let mut circuit = Circuit::new(n);
                append_multiplexed_rotation(&mut circuit, axis, &angles, &controls, target).unwrap();
                let m = 1 << controls.len();
                assert_eq!(circuit.count_of("cx"), m);
                assert_eq!(circuit.gate_count(), 2 * m);
                let oracle = multiplexed_oracle(axis, &angles, &controls, target, n);
                assert_close(&circuit_unitary(&circuit).unwrap(), &oracle, 1e-9);
            }
        }
        assert!(matches!(
            multiplexed_rotation(Axis::Y, &[0.1, 0.2, 0.3], &[1], 0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    fn cx_matrix() -> ComplexMatrix {
        // qubit 0 controls qubit 1.
        ComplexMatrix::from_fn(4, 4, |r, col| {
            let image = if col & 1 == 1 { col ^ 2 } else { col };
            c(if r == image { 1.0 } else { 0.0 })
        })
    }

    #[test]
    fn synthesis_examples() {
        for n in 1..=3 {
            let id = ComplexMatrix::identity(1 << n);
            let circuit = synthesize_unitary(&id).unwrap();
            assert!(circuit_unitary(&circuit).unwrap().phase_insensitive_distance(&id) < 1e-12);
        }
        let cx = cx_matrix();
        let circuit = synthesize_unitary(&cx).unwrap();
        assert_close(&circuit_unitary(&circuit).unwrap(), &cx, 1e-8);

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 1..=4 {
            let u = random_unitary(1 << n, &mut rng);
            let circuit = synthesize_unitary(&u).unwrap();
            assert_close(&circuit_unitary(&circuit).unwrap(), &u, 1e-7);
            let names: Vec<&str> = circuit.gates().iter().map(|g| g.kind.name()).collect();
            assert!(names.iter().all(|k| ["ry", "p", "cx", "h", "u3"].contains(k)));
            assert!(circuit.count_of("cx") <= 1 << (2 * n));
        }
        assert!(matches!(
            synthesize_unitary(&ComplexMatrix::identity(3)),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            synthesize_unitary(&ComplexMatrix::identity(2).scale(c(2.0))),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn cx_count_depends_only_on_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = crate::numerics::random_hermitian(4, &mut rng);
        let counts: Vec<usize> = (0..5)
            .map(|t| {
                let u = unitary_exponential(&h, 0.3 * (1u64 << t) as f64).unwrap();
                synthesize_controlled_unitary(&u).unwrap().count_of("cx")
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
    }

    #[test]
    fn controlled_examples() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let circuit = synthesize_controlled_unitary(&x).unwrap();
        assert_eq!(circuit.num_qubits(), 2);
        // Control is qubit 1, target qubit 0.
        let cx_high = ComplexMatrix::from_fn(4, 4, |r, col| {
            let image = if col & 2 == 2 { col ^ 1 } else { col };
            c(if r == image { 1.0 } else { 0.0 })
        });
        assert_close(&circuit_unitary(&circuit).unwrap(), &cx_high, 1e-9);

        let id = synthesize_controlled_unitary(&ComplexMatrix::identity(4)).unwrap();
        assert_close(&circuit_unitary(&id).unwrap(), &ComplexMatrix::identity(8), 1e-9);

        let h = ComplexMatrix::from_real(2, 2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
        let u = unitary_exponential(&h, 0.8).unwrap();
        let full = circuit_unitary(&synthesize_controlled_unitary(&u).unwrap()).unwrap();
        assert_close(&full.block(0, 0, 2, 2), &ComplexMatrix::identity(2), 1e-8);
        assert_close(&full.block(2, 2, 2, 2), &u, 1e-8);
        assert!(full.block(0, 2, 2, 2).norm_max() < 1e-8);
    }

    #[test]
    fn synthesis_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random_unitary(8, &mut rng);
        let a = synthesize_controlled_unitary(&u).unwrap();
        let b = synthesize_controlled_unitary(&u.clone()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn circuit_unitary_examples() {
        let mut c1 = Circuit::new(1);
        c1.push(GateKind::H, &[0]).unwrap();
        let expected =
            ComplexMatrix::from_real(2, 2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        assert_close(&circuit_unitary(&c1).unwrap(), &expected, 1e-15);

        let mut c2 = Circuit::new(2);
        c2.push(GateKind::Cx, &[0, 1]).unwrap();
        assert_eq!(circuit_unitary(&c2).unwrap(), cx_matrix());

        for seed in 0..4 {
            let circuit = random_circuit(4, 50, seed);
            let u = circuit_unitary(&circuit).unwrap();
            let ui = circuit_unitary(&circuit.inverse().unwrap()).unwrap();
            assert_close(&ui, &u.adjoint(), 1e-10);
        }

        let mut measured = Circuit::new(1);
        measured.set_num_clbits(1);
        measured.push(GateKind::Measure { clbit: 0 }, &[0]).unwrap();
        assert!(matches!(circuit_unitary(&measured), Err(Error::MeasurementPresent)));
        assert!(matches!(
            circuit_unitary(&Circuit::new(12)),
            Err(Error::TooManyQubits { .. })
        ));
    }
}
