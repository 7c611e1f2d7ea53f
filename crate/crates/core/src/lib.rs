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

//! Quantum phase estimation circuit generation in two flavours: the
//! standard generator that repeats the first controlled-unitary block
//! `2^k - 1` times, and the LuGo generator that synthesizes every
//! controlled power `e^{iH·t0·2^t}` independently (and in parallel) from a
//! classically computed matrix exponential.
//!
//! The crate also contains everything needed to use those generators
//! end-to-end: an HHL linear-systems builder, a unitary synthesizer
//! (quantum Shannon decomposition), a statevector simulator and a
//! `{u3, cx}` transpiler.

pub mod circuit;
pub mod error;
pub mod hhl;
pub mod matrix_io;
pub mod numerics;
pub mod qpe;
pub mod simulator;
pub mod synthesis;
pub mod transpiler;

pub use circuit::{Circuit, Gate, GateKind, Registers};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, EigenSystem};
pub use num_complex::Complex64;

#[cfg(test)]
pub(crate) mod testutil;
