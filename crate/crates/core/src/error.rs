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

use thiserror::Error;

/// Errors produced by the circuit construction and simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is singular (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitOutOfRange { index: usize, qubits: usize },
    #[error("gate acts on qubit {0} more than once")]
    DuplicateQubit(usize),
    #[error("qubit mapping is not injective or has the wrong length")]
    InvalidMapping,
    #[error("gate `{kind}` expects {expected} qubits, got {actual}")]
    Arity {
        kind: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("circuit contains a measurement and cannot be inverted")]
    NotInvertible,
    #[error("circuit contains a measurement")]
    MeasurementPresent,
    #[error("circuit contains an unsynthesized unitary block `{0}`")]
    UnitaryBlockPresent(String),
    #[error("circuit schema violation: {0}")]
    Schema(String),
    #[error("unknown gate kind `{0}`")]
    UnknownGate(String),
    #[error("{requested} qubits exceeds the limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },
    #[error("vector is not unit norm (norm {norm})")]
    NonUnitNorm { norm: f64 },
    #[error("zero vector")]
    ZeroVector,
    #[error("reciprocal constant {constant} exceeds the smallest encoded eigenvalue {min_eigenvalue}")]
    ReciprocalDomain { constant: f64, min_eigenvalue: f64 },
    #[error("post-selected branch is empty (probability {probability:.3e})")]
    DegeneratePostselection { probability: f64 },
    #[error("synthesis of controlled block for t = {t} failed: {reason}")]
    SynthesisFailed { t: usize, reason: String },
    #[error("gate `{0}` is not in the u3/cx basis")]
    NotLowered(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
