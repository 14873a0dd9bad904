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

use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("index error: {0}")]
    Index(String),
    #[error("inconsistent duplicate integral {indices:?}: {old} vs {new}")]
    Consistency {
        indices: [usize; 4],
        old: f64,
        new: f64,
    },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("orbital rotation is not orthogonal (max deviation {0:e})")]
    Rotation(f64),
    #[error("symmetry error: qubit {qubit} carries X or Y in term {term}")]
    Symmetry { qubit: usize, term: String },
    #[error("rotation about the identity string; use apply_phase instead")]
    IdentityRotation,
    #[error("control qubit {0} lies inside the Pauli support")]
    Overlap(usize),
    #[error("degenerate ground state (gap {0:e})")]
    Degeneracy(f64),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    Hermiticity(f64),
    #[error("sector error: {0}")]
    Sector(String),
    #[error("eigenphase branch violated: E*t = {0} is outside (-2pi, 0]")]
    Branch(f64),
    #[error("Gaussian fit failed: {0}")]
    Fit(String),
    #[error("distribution has no strict maximum")]
    NoPeak,
    #[error("no companion run for {0}")]
    Pairing(String),
}

pub type Result<T> = std::result::Result<T, Error>;
