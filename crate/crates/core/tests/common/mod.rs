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

//! Shared fixtures and dense-matrix oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qpefci::integrals::{parse_fcidump, OrbitalRotation, SpatialIntegrals};
use qpefci::pauli::PauliString;
use qpefci::encoding::QubitHamiltonian;
use std::collections::HashMap;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> SpatialIntegrals {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_fcidump(&text).unwrap()
}

pub fn cmo_to_lmo() -> OrbitalRotation {
    OrbitalRotation::parse(&std::fs::read_to_string(fixture_path("h8_cmo_to_lmo.txt")).unwrap()).unwrap()
}

pub fn reference(key: &str) -> f64 {
    let text = std::fs::read_to_string(fixture_path("reference.txt")).unwrap();
    let map: HashMap<&str, f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim(), v.trim().parse().unwrap()))
        .collect();
    map[key]
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit matrix for `I`, `X`, `Y` or `Z`.
pub fn pauli_1q(letter: char) -> DMatrix<Complex64> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match letter {
        'I' => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => unreachable!(),
    }
}

/// `P_{n-1} (x) ... (x) P_0`, so qubit 0 is the least significant index bit.
pub fn dense_pauli(p: PauliString, n: usize) -> DMatrix<Complex64> {
    let letters: Vec<char> = p.to_letters(n).chars().collect();
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in (0..n).rev() {
        m = m.kronecker(&pauli_1q(letters[q]));
    }
    m
}

pub fn dense_hamiltonian(h: &QubitHamiltonian) -> DMatrix<Complex64> {
    let n = h.n_qubits();
    let mut m = DMatrix::identity(1 << n, 1 << n) * c(h.identity_coefficient(), 0.0);
    for t in h.terms() {
        m += dense_pauli(t.pauli, n) * c(t.coefficient, 0.0);
    }
    m
}

/// `exp(-i H t)` for Hermitian `H` via its eigendecomposition.
pub fn dense_evolution(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// `|0><0| (x) I + |1><1| (x) U` with the control as the most significant qubit.
pub fn controlled(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = u.nrows();
    let mut m = DMatrix::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Deterministic pseudo-random state from a seed.
pub fn random_state(n: usize, seed: u64) -> Vec<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<Complex64> = (0..1 << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// Random Hamiltonian with `terms` non-identity strings on `n` qubits.
pub fn random_hamiltonian(n: usize, terms: usize, seed: u64) -> QubitHamiltonian {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mask = (1u64 << n) - 1;
    let list = (0..terms)
        .map(|_| loop {
            let p = PauliString::new(rng.gen::<u64>() & mask, rng.gen::<u64>() & mask);
            if !p.is_identity() {
                break qpefci::encoding::PauliTerm::new(p, rng.gen_range(-0.5..0.5));
            }
        })
        .collect();
    QubitHamiltonian::new(n, list, rng.gen_range(-0.5..0.5)).unwrap()
}

/// Applies a dense unitary to each system block.
pub struct DensePropagator {
    pub u: DMatrix<Complex64>,
}

impl qpefci::qpe::Propagator for DensePropagator {
    fn n_qubits(&self) -> usize {
        self.u.nrows().trailing_zeros() as usize
    }

    fn apply_power(&self, block: &mut [Complex64], power: u64) {
        let mut v = nalgebra::DVector::from_column_slice(block);
        for _ in 0..power {
            v = &self.u * v;
        }
        block.copy_from_slice(v.as_slice());
    }
}
