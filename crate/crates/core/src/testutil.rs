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

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, GateKind};
use crate::numerics::ComplexMatrix;

pub(crate) fn random_circuit(num_qubits: usize, gates: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit = Circuit::new(num_qubits);
    for _ in 0..gates {
        let mut qs: Vec<usize> = (0..num_qubits).collect();
        for i in 0..3.min(num_qubits) {
            let j = rng.gen_range(i..num_qubits);
            qs.swap(i, j);
        }
        let a = rng.gen_range(-3.0..3.0);
        let b = rng.gen_range(-3.0..3.0);
        let d = rng.gen_range(-3.0..3.0);
        let kind = match rng.gen_range(0..10) {
            0 => GateKind::H,
            1 => GateKind::P(a),
            2 => GateKind::Ry(a),
            3 => GateKind::U2 { phi: a, lambda: b },
            4 => GateKind::U3 { theta: a, phi: b, lambda: d },
            5 => GateKind::Cx,
            6 => GateKind::Cp(a),
            7 => GateKind::Cry(a),
            8 => GateKind::Cu { theta: a, phi: b, lambda: d, gamma: b - a },
            _ => GateKind::Ccx,
        };
        let n = kind.num_qubits();
        if n <= num_qubits {
            circuit.push(kind, &qs[..n]).unwrap();
        }
    }
    circuit
}

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
    let d = a.max_abs_diff(b);
    assert!(d <= tol, "matrices differ by {d:e} (tol {tol:e})\n{a:?}\n{b:?}");
}
