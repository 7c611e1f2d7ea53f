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

//! Gate-level circuit representation, statistics and JSON storage.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// A dense unitary carried by a circuit before it is synthesized.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryBlock {
    pub matrix: ComplexMatrix,
    pub label: String,
}

/// Gate kinds of the construction basis, plus `u3` and measurement.
///
/// Angles are in radians. Controlled gates list their control qubit(s)
/// first and the target last.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    P(f64),
    Ry(f64),
    U2 { phi: f64, lambda: f64 },
    U3 { theta: f64, phi: f64, lambda: f64 },
    Cx,
    Cp(f64),
    Cry(f64),
    Cu { theta: f64, phi: f64, lambda: f64, gamma: f64 },
    Ccx,
    Measure { clbit: usize },
    Unitary(Box<UnitaryBlock>),
}

pub(crate) fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> [Complex64; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        Complex64::new(c, 0.0),
        -Complex64::from_polar(s, lambda),
        Complex64::from_polar(s, phi),
        Complex64::from_polar(c, phi + lambda),
    ]
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::P(_) => "p",
            GateKind::Ry(_) => "ry",
            GateKind::U2 { .. } => "u2",
            GateKind::U3 { .. } => "u3",
            GateKind::Cx => "cx",
            GateKind::Cp(_) => "cp",
            GateKind::Cry(_) => "cry",
            GateKind::Cu { .. } => "cu",
            GateKind::Ccx => "ccx",
            GateKind::Measure { .. } => "measure",
            GateKind::Unitary(_) => "unitary",
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            GateKind::H
            | GateKind::P(_)
            | GateKind::Ry(_)
            | GateKind::U2 { .. }
            | GateKind::U3 { .. }
            | GateKind::Measure { .. } => 1,
            GateKind::Cx | GateKind::Cp(_) | GateKind::Cry(_) | GateKind::Cu { .. } => 2,
            GateKind::Ccx => 3,
            GateKind::Unitary(block) => block.matrix.rows().trailing_zeros() as usize,
        }
    }

    pub fn params(&self) -> SmallVec<[f64; 4]> {
        match *self {
            GateKind::P(a) | GateKind::Ry(a) | GateKind::Cp(a) | GateKind::Cry(a) => {
                SmallVec::from_slice(&[a])
            }
            GateKind::U2 { phi, lambda } => SmallVec::from_slice(&[phi, lambda]),
            GateKind::U3 { theta, phi, lambda } => SmallVec::from_slice(&[theta, phi, lambda]),
            GateKind::Cu {
                theta,
                phi,
                lambda,
                gamma,
            } => SmallVec::from_slice(&[theta, phi, lambda, gamma]),
            _ => SmallVec::new(),
        }
    }

    /// Rebuilds a gate kind from its serialized name and parameters.
    pub fn from_parts(name: &str, params: &[f64], clbits: &[usize]) -> Result<Self> {
        let expect = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::Schema(format!(
                    "gate `{name}` takes {n} parameters, got {}",
                    params.len()
                )))
            }
        };
        let kind = match name {
            "h" => {
                expect(0)?;
                GateKind::H
            }
            "p" => {
                expect(1)?;
                GateKind::P(params[0])
            }
            "ry" => {
                expect(1)?;
                GateKind::Ry(params[0])
            }
            "u2" => {
                expect(2)?;
                GateKind::U2 {
                    phi: params[0],
                    lambda: params[1],
                }
            }
            "u3" => {
                expect(3)?;
                GateKind::U3 {
                    theta: params[0],
                    phi: params[1],
                    lambda: params[2],
                }
            }
            "cx" => {
                expect(0)?;
                GateKind::Cx
            }
            "cp" => {
                expect(1)?;
                GateKind::Cp(params[0])
            }
            "cry" => {
                expect(1)?;
                GateKind::Cry(params[0])
            }
            "cu" => {
                expect(4)?;
                GateKind::Cu {
                    theta: params[0],
                    phi: params[1],
                    lambda: params[2],
                    gamma: params[3],
                }
            }
            "ccx" => {
                expect(0)?;
                GateKind::Ccx
            }
            "measure" => {
                expect(0)?;
                match clbits {
                    [clbit] => GateKind::Measure { clbit: *clbit },
                    _ => {
                        return Err(Error::Schema(
                            "measure needs exactly one classical bit".into(),
                        ))
                    }
                }
            }
            other => return Err(Error::UnknownGate(other.to_string())),
        };
        if !matches!(kind, GateKind::Measure { .. }) && !clbits.is_empty() {
            return Err(Error::Schema(format!("gate `{name}` takes no classical bits")));
        }
        Ok(kind)
    }

    /// The adjoint gate. The table is closed over the gate set, so no
    /// resynthesis is ever needed.
    pub fn adjoint(&self) -> Result<Self> {
        Ok(match self {
            GateKind::H => GateKind::H,
            GateKind::Cx => GateKind::Cx,
            GateKind::Ccx => GateKind::Ccx,
            GateKind::P(l) => GateKind::P(-l),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Cp(l) => GateKind::Cp(-l),
            GateKind::Cry(t) => GateKind::Cry(-t),
            GateKind::U2 { phi, lambda } => GateKind::U2 {
                phi: PI - lambda,
                lambda: -phi - PI,
            },
            GateKind::U3 { theta, phi, lambda } => GateKind::U3 {
                theta: -theta,
                phi: -lambda,
                lambda: -phi,
            },
            GateKind::Cu {
                theta,
                phi,
                lambda,
                gamma,
            } => GateKind::Cu {
                theta: -theta,
                phi: -lambda,
                lambda: -phi,
                gamma: -gamma,
            },
            GateKind::Measure { .. } => return Err(Error::NotInvertible),
            GateKind::Unitary(block) => GateKind::Unitary(Box::new(UnitaryBlock {
                matrix: block.matrix.adjoint(),
                label: format!("{}_dg", block.label),
            })),
        })
    }

    /// For gates of the form "controls, then a 2x2 matrix on the target":
    /// the number of controls and the row-major target matrix.
    pub fn controlled_target_matrix(&self) -> Option<(usize, [Complex64; 4])> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let x = [zero, one, one, zero];
        Some(match *self {
            GateKind::H => {
                let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                (0, [r, r, r, -r])
            }
            GateKind::P(l) => (0, [one, zero, zero, Complex64::from_polar(1.0, l)]),
            GateKind::Ry(t) => (0, u3_matrix(t, 0.0, 0.0)),
            GateKind::U2 { phi, lambda } => (0, u3_matrix(PI / 2.0, phi, lambda)),
            GateKind::U3 { theta, phi, lambda } => (0, u3_matrix(theta, phi, lambda)),
            GateKind::Cx => (1, x),
            GateKind::Cp(l) => (1, [one, zero, zero, Complex64::from_polar(1.0, l)]),
            GateKind::Cry(t) => (1, u3_matrix(t, 0.0, 0.0)),
            GateKind::Cu {
                theta,
                phi,
                lambda,
                gamma,
            } => {
                let g = Complex64::from_polar(1.0, gamma);
                let m = u3_matrix(theta, phi, lambda);
                (1, [g * m[0], g * m[1], g * m[2], g * m[3]])
            }
            GateKind::Ccx => (2, x),
            GateKind::Measure { .. } | GateKind::Unitary(_) => return None,
        })
    }
}

/// A gate applied to specific qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: SmallVec<[usize; 3]>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Self {
            kind,
            qubits: SmallVec::from_slice(qubits),
        }
    }
}

/// Named qubit ranges of a circuit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registers {
    pub input: Option<Range<usize>>,
    pub clock: Option<Range<usize>>,
    pub ancilla: Option<Range<usize>>,
}

/// An ordered list of gates over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    gates: Vec<Gate>,
    registers: Registers,
    global_phase: f64,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            num_clbits: 0,
            gates: Vec::new(),
            registers: Registers::default(),
            global_phase: 0.0,
        }
    }

    pub fn with_registers(num_qubits: usize, registers: Registers) -> Self {
        Self {
            registers,
            ..Self::new(num_qubits)
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn set_num_clbits(&mut self, n: usize) {
        self.num_clbits = n;
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn registers(&self) -> &Registers {
        &self.registers
    }

    pub fn set_registers(&mut self, registers: Registers) {
        self.registers = registers;
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phase: f64) {
        self.global_phase += phase;
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn validate(&self, kind: &GateKind, qubits: &[usize]) -> Result<()> {
        let expected = kind.num_qubits();
        if qubits.len() != expected {
            return Err(Error::Arity {
                kind: kind.name(),
                expected,
                actual: qubits.len(),
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    qubits: self.num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        if let GateKind::Measure { clbit } = kind {
            if *clbit >= self.num_clbits {
                return Err(Error::Schema(format!(
                    "classical bit {clbit} out of range for {} bits",
                    self.num_clbits
                )));
            }
        }
        Ok(())
    }

    /// Appends a gate after validating its qubit indices.
    pub fn push(&mut self, kind: GateKind, qubits: &[usize]) -> Result<()> {
        self.validate(&kind, qubits)?;
        self.gates.push(Gate::new(kind, qubits));
        Ok(())
    }

    pub fn append(&mut self, gate: Gate) -> Result<()> {
        self.validate(&gate.kind, &gate.qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    fn check_mapping(&self, other: &Circuit, mapping: &[usize]) -> Result<()> {
        if mapping.len() != other.num_qubits {
            return Err(Error::InvalidMapping);
        }
        for (i, &q) in mapping.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    qubits: self.num_qubits,
                });
            }
            if mapping[..i].contains(&q) {
                return Err(Error::InvalidMapping);
            }
        }
        Ok(())
    }

    /// Appends every gate of `other`, sending its qubit `i` to `mapping[i]`.
    pub fn extend_mapped(&mut self, other: &Circuit, mapping: &[usize]) -> Result<()> {
        self.check_mapping(other, mapping)?;
        self.num_clbits = self.num_clbits.max(other.num_clbits);
        self.gates.reserve(other.gates.len());
        for gate in &other.gates {
            self.gates.push(Gate {
                kind: gate.kind.clone(),
                qubits: gate.qubits.iter().map(|&q| mapping[q]).collect(),
            });
        }
        self.global_phase += other.global_phase;
        Ok(())
    }

    /// `self` followed by `other`; the host's registers are kept.
    pub fn compose(&self, other: &Circuit, mapping: &[usize]) -> Result<Circuit> {
        let mut out = self.clone();
        out.extend_mapped(other, mapping)?;
        Ok(out)
    }

    pub fn contains_measurement(&self) -> bool {
        self.gates
            .iter()
            .any(|g| matches!(g.kind, GateKind::Measure { .. }))
    }

    /// Reversed gate order with every gate replaced by its adjoint.
    pub fn inverse(&self) -> Result<Circuit> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(|g| {
                Ok(Gate {
                    kind: g.kind.adjoint()?,
                    qubits: g.qubits.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            gates,
            global_phase: -self.global_phase,
            ..self.clone_header()
        })
    }

    fn clone_header(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            num_clbits: self.num_clbits,
            gates: Vec::new(),
            registers: self.registers.clone(),
            global_phase: self.global_phase,
        }
    }

    /// Number of time steps when gates on disjoint qubits run in parallel.
    pub fn depth(&self) -> usize {
        let mut frontier = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for gate in &self.gates {
            let level = gate.qubits.iter().map(|&q| frontier[q]).max().unwrap_or(0) + 1;
            for &q in &gate.qubits {
                frontier[q] = level;
            }
            depth = depth.max(level);
        }
        depth
    }

    /// Gate counts keyed by gate name.
    pub fn count_ops(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for gate in &self.gates {
            *counts.entry(gate.kind.name().to_string()).or_insert(0) += 1;
        }
        counts
    }

    pub fn count_of(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.kind.name() == name).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CircuitDoc::try_from(self)?)?)
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let doc: CircuitDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

#[derive(Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RegistersDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clock: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ancilla: Option<[usize; 2]>,
}

impl RegistersDoc {
    fn is_empty(&self) -> bool {
        self.input.is_none() && self.clock.is_none() && self.ancilla.is_none()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default)]
    params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    clbits: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    qubits: usize,
    #[serde(default, skip_serializing_if = "RegistersDoc::is_empty")]
    registers: RegistersDoc,
    #[serde(default, skip_serializing_if = "is_zero")]
    clbits: usize,
    #[serde(default, skip_serializing_if = "is_zero_phase")]
    global_phase: f64,
    gates: Vec<GateDoc>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

fn is_zero_phase(v: &f64) -> bool {
    *v == 0.0
}

fn range_doc(r: &Option<Range<usize>>) -> Option<[usize; 2]> {
    r.as_ref().map(|r| [r.start, r.end])
}

fn range_from_doc(r: Option<[usize; 2]>, qubits: usize) -> Result<Option<Range<usize>>> {
    match r {
        None => Ok(None),
        Some([lo, hi]) if lo <= hi && hi <= qubits => Ok(Some(lo..hi)),
        Some([lo, hi]) => Err(Error::Schema(format!(
            "register range [{lo}, {hi}) invalid for {qubits} qubits"
        ))),
    }
}

impl TryFrom<&Circuit> for CircuitDoc {
    type Error = Error;

    fn try_from(c: &Circuit) -> Result<Self> {
        let gates = c
            .gates
            .iter()
            .map(|g| {
                if let GateKind::Unitary(block) = &g.kind {
                    return Err(Error::UnitaryBlockPresent(block.label.clone()));
                }
                let params = g.kind.params();
                if params.iter().any(|p| !p.is_finite()) {
                    return Err(Error::Schema(format!(
                        "gate `{}` has a non-finite parameter",
                        g.kind.name()
                    )));
                }
                let clbits = match g.kind {
                    GateKind::Measure { clbit } => vec![clbit],
                    _ => Vec::new(),
                };
                Ok(GateDoc {
                    kind: g.kind.name().to_string(),
                    qubits: g.qubits.to_vec(),
                    params: params.to_vec(),
                    clbits,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CircuitDoc {
            qubits: c.num_qubits,
            registers: RegistersDoc {
                input: range_doc(&c.registers.input),
                clock: range_doc(&c.registers.clock),
                ancilla: range_doc(&c.registers.ancilla),
            },
            clbits: c.num_clbits,
            global_phase: c.global_phase,
            gates,
        })
    }
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = Error;

    fn try_from(doc: CircuitDoc) -> Result<Self> {
        let registers = Registers {
            input: range_from_doc(doc.registers.input, doc.qubits)?,
            clock: range_from_doc(doc.registers.clock, doc.qubits)?,
            ancilla: range_from_doc(doc.registers.ancilla, doc.qubits)?,
        };
        let mut circuit = Circuit::with_registers(doc.qubits, registers);
        circuit.num_clbits = doc.clbits;
        circuit.global_phase = doc.global_phase;
        circuit.gates.reserve(doc.gates.len());
        for g in doc.gates {
            let kind = GateKind::from_parts(&g.kind, &g.params, &g.clbits)?;
            circuit.push(kind, &g.qubits)?;
        }
        Ok(circuit)
    }
}
