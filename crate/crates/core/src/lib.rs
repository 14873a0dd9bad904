// Copyright 2026 The qpefci Developers
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

//! Statevector simulation of quantum phase estimation for full-CI energies
//! with Trotterized time evolution.
//!
//! The pipeline runs FCIDUMP integrals through a Jordan-Wigner (optionally
//! parity-tapered) qubit Hamiltonian, evolves a prepared state under first or
//! second order Trotter products inside a textbook or ancilla-by-ancilla QPE
//! circuit, and turns the resulting phase histograms into fitted energies and
//! dimer/monomer size-consistency ratios. An exact sector diagonalization
//! provides the Trotter-free reference throughout.

pub mod analysis;
pub mod encoding;
pub mod error;
pub mod integrals;
pub mod oracle;
pub mod pauli;
pub mod qpe;
pub mod statevector;

pub use error::{Error, Result};
