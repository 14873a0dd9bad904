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

//! Exact reference: fixed-(n_alpha, n_beta) sector bases, dense sector
//! Hamiltonians and their full eigendecomposition.
//!
//! Determinant convention: occupation bitstring `n` with occupied spin orbitals
//! `p1 < p2 < ... < pk` stands for `a+_p1 a+_p2 ... a+_pk |vac>`. Under
//! Jordan-Wigner this is the computational basis state `|n>` with phase +1.

use crate::encoding::{delete_bits, insert_bits, parity_bits, tapered_qubits, unparity_bits, QubitHamiltonian};
use crate::error::{Error, Result};
use crate::integrals::SpinOrbitalIntegrals;
use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt::Write as _;

const HERMITICITY_TOL: f64 = 1e-10;

/// How spin-orbital occupations are laid out on qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// Occupation of spin orbital `p` on qubit `p`.
    JordanWigner,
    /// Qubit `j` holds the parity of occupations `0..=j`.
    Parity,
    /// Parity encoding with qubits `l-1` and `2l-1` removed.
    TaperedParity,
}

impl Encoding {
    pub fn n_qubits(&self, n_orbitals: usize) -> usize {
        match self {
            Self::TaperedParity => 2 * n_orbitals - 2,
            _ => 2 * n_orbitals,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::JordanWigner => "jw",
            Self::Parity => "parity",
            Self::TaperedParity => "jw_tapered",
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jw" | "jordan_wigner" => Ok(Self::JordanWigner),
            "parity" => Ok(Self::Parity),
            "jw_tapered" | "tapered" | "tapered_parity" => Ok(Self::TaperedParity),
            other => Err(format!("unknown encoding {other:?}")),
        }
    }
}

fn spin_counts(occ: u64, l: usize) -> (usize, usize) {
    let alpha = occ & ((1u64 << l) - 1);
    ((alpha.count_ones()) as usize, (occ >> l).count_ones() as usize)
}

/// Maps a blocked occupation bitstring to its computational basis index.
pub fn determinant_to_qubit_index(
    occupations: u64,
    encoding: Encoding,
    n_orbitals: usize,
    n_alpha: usize,
    n_beta: usize,
) -> Result<u64> {
    let l = n_orbitals;
    let n = 2 * l;
    if n < 64 && occupations >> n != 0 {
        return Err(Error::Sector(format!("occupation {occupations:#b} exceeds {n} spin orbitals")));
    }
    if spin_counts(occupations, l) != (n_alpha, n_beta) {
        return Err(Error::Sector(format!(
            "occupation {occupations:#b} is not in the ({n_alpha}, {n_beta}) sector"
        )));
    }
    Ok(match encoding {
        Encoding::JordanWigner => occupations,
        Encoding::Parity => parity_bits(occupations, n),
        Encoding::TaperedParity => delete_bits(parity_bits(occupations, n), &tapered_qubits(l)),
    })
}

/// Inverse of [`determinant_to_qubit_index`] for states of the given sector.
pub fn qubit_index_to_determinant(
    index: u64,
    encoding: Encoding,
    n_orbitals: usize,
    n_alpha: usize,
    n_beta: usize,
) -> Result<u64> {
    let l = n_orbitals;
    let n = 2 * l;
    let occ = match encoding {
        Encoding::JordanWigner => index,
        Encoding::Parity => unparity_bits(index, n),
        Encoding::TaperedParity => {
            let [qa, qt] = tapered_qubits(l);
            let mut p = insert_bits(index, &[qa, qt]);
            p |= ((n_alpha % 2) as u64) << qa;
            p |= (((n_alpha + n_beta) % 2) as u64) << qt;
            unparity_bits(p, n)
        }
    };
    if spin_counts(occ, l) != (n_alpha, n_beta) {
        return Err(Error::Sector(format!(
            "qubit index {index:#b} does not decode into the ({n_alpha}, {n_beta}) sector"
        )));
    }
    Ok(occ)
}

/// Basis of computational states spanning a Hamiltonian block.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_qubits: usize,
    encoding: Option<(Encoding, usize, usize, usize)>,
    occupations: Vec<u64>,
    states: Vec<u64>,
    lookup: HashMap<u64, usize>,
}

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl SectorBasis {
    /// All determinants with `n_alpha` alpha and `n_beta` beta electrons in `l`
    /// spatial orbitals, sorted by occupation bitstring.
    pub fn new(n_orbitals: usize, n_alpha: usize, n_beta: usize, encoding: Encoding) -> Result<Self> {
        let l = n_orbitals;
        if l == 0 || l > 16 || n_alpha > l || n_beta > l {
            return Err(Error::Sector(format!("({n_alpha}, {n_beta}) in {l} orbitals")));
        }
        let strings = |k: usize| -> Vec<u64> { (0u64..1 << l).filter(|s| s.count_ones() as usize == k).collect() };
        let (alphas, betas) = (strings(n_alpha), strings(n_beta));
        let mut occupations: Vec<u64> = betas
            .iter()
            .flat_map(|b| alphas.iter().map(move |a| a | (b << l)))
            .collect();
        occupations.sort_unstable();
        let states = occupations
            .iter()
            .map(|&o| determinant_to_qubit_index(o, encoding, l, n_alpha, n_beta))
            .collect::<Result<Vec<_>>>()?;
        let lookup = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        debug_assert_eq!(states.len(), choose(l, n_alpha) * choose(l, n_beta));
        Ok(Self {
            n_qubits: encoding.n_qubits(l),
            encoding: Some((encoding, l, n_alpha, n_beta)),
            occupations,
            states,
            lookup,
        })
    }

    /// Every computational basis state of `n_qubits` qubits.
    pub fn full(n_qubits: usize) -> Result<Self> {
        if n_qubits > 20 {
            return Err(Error::Capacity(format!("dense basis over {n_qubits} qubits")));
        }
        let states: Vec<u64> = (0..1u64 << n_qubits).collect();
        let lookup = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self {
            n_qubits,
            encoding: None,
            occupations: states.clone(),
            states,
            lookup,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `(encoding, n_orbitals, n_alpha, n_beta)` for sector bases.
    pub fn sector(&self) -> Option<(Encoding, usize, usize, usize)> {
        self.encoding
    }

    /// Occupation bitstrings (for a full basis, the raw qubit indices).
    pub fn occupations(&self) -> &[u64] {
        &self.occupations
    }

    /// Computational basis indices in basis order.
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn position(&self, qubit_index: u64) -> Option<usize> {
        self.lookup.get(&qubit_index).copied()
    }

    pub fn position_of_occupation(&self, occupation: u64) -> Option<usize> {
        self.occupations.binary_search(&occupation).ok()
    }
}

/// `M[i][j] = <b_i|H|b_j>` restricted to the basis; targets outside the basis
/// are dropped.
pub fn build_sector_matrix(h: &QubitHamiltonian, basis: &SectorBasis) -> Result<DMatrix<Complex64>> {
    if h.n_qubits() != basis.n_qubits() {
        return Err(Error::Index(format!(
            "{}-qubit Hamiltonian on a {}-qubit basis",
            h.n_qubits(),
            basis.n_qubits()
        )));
    }
    let n = basis.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (j, &b) in basis.states().iter().enumerate() {
        m[(j, j)] += h.identity_coefficient();
        for t in h.terms() {
            let (ph, target) = t.pauli.apply_to_basis(b);
            if let Some(i) = basis.position(target) {
                m[(i, j)] += ph * t.coefficient;
            }
        }
    }
    Ok(m)
}

/// Ascending eigenvalues with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

impl SpectrumResult {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> Vec<Complex64> {
        self.eigenvectors.column(0).iter().copied().collect()
    }

    /// `E_1 - E_0`, or infinity for a one-dimensional space.
    pub fn ground_gap(&self) -> f64 {
        self.eigenvalues.get(1).map_or(f64::INFINITY, |e1| e1 - self.eigenvalues[0])
    }

    /// `index,energy` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,energy\n");
        for (i, e) in self.eigenvalues.iter().enumerate() {
            let _ = writeln!(out, "{i},{e:.12}");
        }
        out
    }
}

/// Largest `|M - M^H|` entry.
pub fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending. Each eigenvector is scaled so that its first
/// component with magnitude above 1e-12 is real and positive.
pub fn diagonalize(m: &DMatrix<Complex64>) -> Result<SpectrumResult> {
    if m.nrows() != m.ncols() {
        return Err(Error::Hermiticity(f64::INFINITY));
    }
    let dev = hermiticity_deviation(m);
    if !(dev <= HERMITICITY_TOL) {
        return Err(Error::Hermiticity(dev));
    }
    let n = m.nrows();
    let is_real = m.iter().all(|z| z.im == 0.0);
    let failed = |e: faer::linalg::evd::EvdError| Error::Hermiticity(if matches!(e, faer::linalg::evd::EvdError::NoConvergence) { f64::NAN } else { f64::INFINITY });
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if is_real {
        let a = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
        let eig = a.self_adjoint_eigen(Side::Lower).map_err(failed)?;
        let s = eig.S().column_vector();
        let u = eig.U();
        ((0..n).map(|k| s[k]).collect(), DMatrix::from_fn(n, n, |i, j| Complex64::new(u[(i, j)], 0.0)))
    } else {
        let a = Mat::<Complex64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
        let eig = a.self_adjoint_eigen(Side::Lower).map_err(failed)?;
        let s = eig.S().column_vector();
        let u = eig.U();
        ((0..n).map(|k| s[k].re).collect(), DMatrix::from_fn(n, n, |i, j| u[(i, j)]))
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (col, &k) in order.iter().enumerate() {
        let v = vectors.column(k);
        let lead = v.iter().find(|z| z.norm() > 1e-12).copied().unwrap_or(Complex64::new(1.0, 0.0));
        let fix = lead.conj() / lead.norm();
        for i in 0..n {
            eigenvectors[(i, col)] = v[i] * fix;
        }
    }
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
    })
}

fn annihilate(det: u64, p: usize) -> Option<(f64, u64)> {
    if (det >> p) & 1 == 0 {
        return None;
    }
    let sign = if (det & ((1u64 << p) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, det & !(1u64 << p)))
}

fn create(det: u64, p: usize) -> Option<(f64, u64)> {
    if (det >> p) & 1 == 1 {
        return None;
    }
    let sign = if (det & ((1u64 << p) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, det | (1u64 << p)))
}

fn bits(mut b: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if b == 0 {
            return None;
        }
        let p = b.trailing_zeros() as usize;
        b &= b - 1;
        Some(p)
    })
}

/// Determinant-basis Hamiltonian from the Slater-Condon rules, independent of
/// any qubit mapping. Rows and columns follow `basis.occupations()`.
pub fn determinant_hamiltonian(so: &SpinOrbitalIntegrals, basis: &SectorBasis) -> DMatrix<f64> {
    let anti = |p: usize, q: usize, r: usize, s: usize| so.g(p, q, r, s) - so.g(p, q, s, r);
    let dets = basis.occupations();
    let n = dets.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, &ket) in dets.iter().enumerate() {
        for (i, &bra) in dets.iter().enumerate() {
            let diff = bra ^ ket;
            let level = diff.count_ones() / 2;
            let value = match level {
                0 => {
                    let occ: Vec<usize> = bits(ket).collect();
                    let mut e = so.core_energy();
                    for &a in &occ {
                        e += so.h(a, a);
                        for &b in &occ {
                            e += 0.5 * anti(a, b, a, b);
                        }
                    }
                    e
                }
                1 => {
                    let m_ = (ket & diff).trailing_zeros() as usize;
                    let p = (bra & diff).trailing_zeros() as usize;
                    let (s1, d) = annihilate(ket, m_).unwrap();
                    let (s2, d) = create(d, p).unwrap();
                    debug_assert_eq!(d, bra);
                    let common = ket & bra;
                    let mut v = so.h(p, m_);
                    for k in bits(common) {
                        v += anti(p, k, m_, k);
                    }
                    s1 * s2 * v
                }
                2 => {
                    let mut removed = bits(ket & diff);
                    let (m_, n_) = (removed.next().unwrap(), removed.next().unwrap());
                    let mut added = bits(bra & diff);
                    let (p, q) = (added.next().unwrap(), added.next().unwrap());
                    // <bra| a+_p a+_q a_n a_m |ket>
                    let (s1, d) = annihilate(ket, m_).unwrap();
                    let (s2, d) = annihilate(d, n_).unwrap();
                    let (s3, d) = create(d, q).unwrap();
                    let (s4, d) = create(d, p).unwrap();
                    debug_assert_eq!(d, bra);
                    s1 * s2 * s3 * s4 * anti(p, q, m_, n_)
                }
                _ => 0.0,
            };
            m[(i, j)] = value;
        }
    }
    m
}
