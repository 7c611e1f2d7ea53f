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

//! Lowering to the `{u3, cx}` basis.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::circuit::{u3_matrix, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::synthesis::zyz_unchecked;

/// Entries below this are treated as zero when deciding that a fused
/// single-qubit gate is a pure phase.
const IDENTITY_TOL: f64 = 1e-12;

fn u3(theta: f64, phi: f64, lambda: f64) -> GateKind {
    GateKind::U3 { theta, phi, lambda }
}

fn phase(lambda: f64) -> GateKind {
    u3(0.0, 0.0, lambda)
}

/// Rewrites one gate into `{u3, cx, measure}` without any fusion.
fn lower_gate(gate: &Gate, out: &mut Vec<Gate>) -> Result<()> {
    let q = &gate.qubits;
    let mut emit = |kind: GateKind, qubits: &[usize]| out.push(Gate::new(kind, qubits));
    match gate.kind {
        GateKind::H => emit(u3(FRAC_PI_2, 0.0, PI), &[q[0]]),
        GateKind::P(lambda) => emit(phase(lambda), &[q[0]]),
        GateKind::Ry(theta) => emit(u3(theta, 0.0, 0.0), &[q[0]]),
        GateKind::U2 { phi, lambda } => emit(u3(FRAC_PI_2, phi, lambda), &[q[0]]),
        GateKind::U3 { .. } | GateKind::Cx | GateKind::Measure { .. } => out.push(gate.clone()),
        GateKind::Cp(lambda) => {
            let (c, t) = (q[0], q[1]);
            emit(phase(lambda / 2.0), &[c]);
            emit(GateKind::Cx, &[c, t]);
            emit(phase(-lambda / 2.0), &[t]);
            emit(GateKind::Cx, &[c, t]);
            emit(phase(lambda / 2.0), &[t]);
        }
        GateKind::Cry(theta) => {
            let (c, t) = (q[0], q[1]);
            emit(u3(theta / 2.0, 0.0, 0.0), &[t]);
            emit(GateKind::Cx, &[c, t]);
            emit(u3(-theta / 2.0, 0.0, 0.0), &[t]);
            emit(GateKind::Cx, &[c, t]);
        }
        GateKind::Cu {
            theta,
            phi,
            lambda,
            gamma,
        } => {
            let (c, t) = (q[0], q[1]);
            emit(phase(gamma + (lambda + phi) / 2.0), &[c]);
            emit(phase((lambda - phi) / 2.0), &[t]);
            emit(GateKind::Cx, &[c, t]);
            emit(u3(-theta / 2.0, 0.0, -(phi + lambda) / 2.0), &[t]);
            emit(GateKind::Cx, &[c, t]);
            emit(u3(theta / 2.0, phi, 0.0), &[t]);
        }
        GateKind::Ccx => {
            let (a, b, c) = (q[0], q[1], q[2]);
            let h = u3(FRAC_PI_2, 0.0, PI);
            let t = phase(FRAC_PI_4);
            let tdg = phase(-FRAC_PI_4);
            emit(h.clone(), &[c]);
            emit(GateKind::Cx, &[b, c]);
            emit(tdg.clone(), &[c]);
            emit(GateKind::Cx, &[a, c]);
            emit(t.clone(), &[c]);
            emit(GateKind::Cx, &[b, c]);
            emit(tdg.clone(), &[c]);
            emit(GateKind::Cx, &[a, c]);
            emit(t.clone(), &[b]);
            emit(t.clone(), &[c]);
            emit(h, &[c]);
            emit(GateKind::Cx, &[a, b]);
            emit(t, &[a]);
            emit(tdg, &[b]);
            emit(GateKind::Cx, &[a, b]);
        }
        GateKind::Unitary(ref block) => return Err(Error::UnitaryBlockPresent(block.label.clone())),
    }
    Ok(())
}

fn mul2(a: &[Complex64; 4], b: &[Complex64; 4]) -> [Complex64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Turns an accumulated single-qubit matrix back into a `u3` (or nothing,
/// if it is a pure phase), moving any scalar factor into `global_phase`.
fn flush(m: [Complex64; 4], qubit: usize, out: &mut Circuit, single: Option<GateKind>) -> Result<()> {
    if let Some(kind) = single {
        // An unfused gate is kept verbatim.
        return out.push(kind, &[qubit]);
    }
    let beta = m[0].arg();
    let scalar = Complex64::from_polar(1.0, beta);
    if m[1].norm() < IDENTITY_TOL && m[2].norm() < IDENTITY_TOL && (m[3] - scalar).norm() < IDENTITY_TOL {
        out.add_global_phase(beta);
        return Ok(());
    }
    let z = zyz_unchecked(&ComplexMatrix::new(2, 2, m.to_vec())?);
    // u3(θ,φ,λ) = e^{i(φ+λ)/2}·Rz(φ)·Ry(θ)·Rz(λ)
    out.add_global_phase(z.global_phase - 0.5 * (z.phi + z.lambda));
    out.push(u3(z.theta, z.phi, z.lambda), &[qubit])
}

#[derive(Clone)]
struct Pending {
    matrix: [Complex64; 4],
    /// The original gate while nothing has been fused into it.
    single: Option<GateKind>,
}

/// Merges runs of `u3` gates on the same qubit. Pure-phase results are
/// dropped and their phase moved to the circuit's global phase.
pub fn fuse_u3(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::with_registers(circuit.num_qubits(), circuit.registers().clone());
    out.set_num_clbits(circuit.num_clbits());
    out.add_global_phase(circuit.global_phase());
    let mut pending: Vec<Option<Pending>> = vec![None; circuit.num_qubits()];
    for gate in circuit.gates() {
        if let GateKind::U3 { theta, phi, lambda } = gate.kind {
            let q = gate.qubits[0];
            let m = u3_matrix(theta, phi, lambda);
            pending[q] = Some(match pending[q].take() {
                None => Pending {
                    matrix: m,
                    single: Some(gate.kind.clone()),
                },
                Some(p) => Pending {
                    matrix: mul2(&m, &p.matrix),
                    single: None,
                },
            });
            continue;
        }
        for &q in &gate.qubits {
            if let Some(p) = pending[q].take() {
                flush(p.matrix, q, &mut out, p.single)?;
            }
        }
        out.append(gate.clone())?;
    }
    for (q, p) in pending.into_iter().enumerate() {
        if let Some(p) = p {
            flush(p.matrix, q, &mut out, p.single)?;
        }
    }
    Ok(out)
}

/// Rule-by-rule rewrite into `{u3, cx, measure}` with no fusion.
pub fn lower_without_fusion(circuit: &Circuit) -> Result<Circuit> {
    let mut gates = Vec::with_capacity(circuit.gate_count() * 2);
    for gate in circuit.gates() {
        lower_gate(gate, &mut gates)?;
    }
    let mut out = Circuit::with_registers(circuit.num_qubits(), circuit.registers().clone());
    out.set_num_clbits(circuit.num_clbits());
    out.add_global_phase(circuit.global_phase());
    for gate in gates {
        out.append(gate)?;
    }
    Ok(out)
}

/// Lowers to `{u3, cx, measure}` and fuses adjacent same-qubit `u3` gates.
pub fn lower_to_u3_cx(circuit: &Circuit) -> Result<Circuit> {
    fuse_u3(&lower_without_fusion(circuit)?)
}

/// Gate statistics of a lowered circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BasisReport {
    pub u3: usize,
    pub cx: usize,
    pub depth: usize,
}

pub fn basis_report(circuit: &Circuit) -> Result<BasisReport> {
    let mut report = BasisReport {
        depth: circuit.depth(),
        ..Default::default()
    };
    for gate in circuit.gates() {
        match gate.kind {
            GateKind::U3 { .. } => report.u3 += 1,
            GateKind::Cx => report.cx += 1,
            GateKind::Measure { .. } => {}
            ref other => return Err(Error::NotLowered(other.name().to_string())),
        }
    }
    Ok(report)
}
