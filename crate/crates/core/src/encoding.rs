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

//! Fermion-to-qubit mapping: Jordan-Wigner, parity conjugation, two-qubit
//! tapering and Trotter term ordering.

use crate::error::{Error, Result};
use crate::integrals::SpinOrbitalIntegrals;
use crate::pauli::PauliString;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

/// Terms with smaller magnitude are dropped during canonicalization.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Largest number of qubits a Hamiltonian may act on.
pub const MAX_QUBITS: usize = 32;

/// Magnitude ties are resolved on `|w|` rounded to this absolute grid so the
/// ordering does not hinge on last-bit rounding.
const MAGNITUDE_QUANTUM: f64 = 1e-10;

/// One weighted Pauli string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub pauli: PauliString,
    pub coefficient: f64,
}

impl PauliTerm {
    pub fn new(pauli: PauliString, coefficient: f64) -> Self {
        Self { pauli, coefficient }
    }

    pub fn x_mask(&self) -> u64 {
        self.pauli.x
    }

    pub fn z_mask(&self) -> u64 {
        self.pauli.z
    }
}

/// `H = c_I + sum_j w_j P_j` with the identity weight kept apart.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    identity_coefficient: f64,
}

impl QubitHamiltonian {
    /// Canonicalizes arbitrary input: merges duplicate strings, moves identity
    /// weight to `identity_coefficient` and prunes tiny terms. Term order follows
    /// first appearance.
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>, identity_coefficient: f64) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n_qubits} qubits (max {MAX_QUBITS})")));
        }
        let limit = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        let mut identity = identity_coefficient;
        let mut order: Vec<PauliString> = Vec::new();
        let mut acc: HashMap<PauliString, f64> = HashMap::new();
        for t in terms {
            if t.pauli.support() & !limit != 0 {
                return Err(Error::Index(format!(
                    "term {} exceeds {n_qubits} qubits",
                    t.pauli
                )));
            }
            if t.pauli.is_identity() {
                identity += t.coefficient;
                continue;
            }
            match acc.get_mut(&t.pauli) {
                Some(w) => *w += t.coefficient,
                None => {
                    order.push(t.pauli);
                    acc.insert(t.pauli, t.coefficient);
                }
            }
        }
        let terms = order
            .into_iter()
            .map(|p| PauliTerm::new(p, acc[&p]))
            .filter(|t| t.coefficient.abs() >= PRUNE_THRESHOLD)
            .collect();
        Ok(Self {
            n_qubits,
            terms,
            identity_coefficient: identity,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.identity_coefficient
    }

    /// Number of Pauli strings including the identity.
    pub fn len_with_identity(&self) -> usize {
        self.terms.len() + 1
    }

    /// Text dump: identity line first, then one `+w  LETTERS` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let id = PauliString::IDENTITY.to_letters(self.n_qubits);
        let _ = writeln!(out, "{:+.12}  {}", self.identity_coefficient, id);
        for t in &self.terms {
            let _ = writeln!(out, "{:+.12}  {}", t.coefficient, t.pauli.to_letters(self.n_qubits));
        }
        out
    }

    /// Reads the format written by [`QubitHamiltonian::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut identity = 0.0;
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut it = line.split_whitespace();
            let w: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr("bad coefficient"))?;
            let letters = it.next().ok_or_else(|| perr("missing Pauli string"))?;
            let p = PauliString::from_letters(letters).ok_or_else(|| perr("bad Pauli letter"))?;
            match n {
                None => n = Some(letters.len()),
                Some(k) if k != letters.len() => return Err(perr("inconsistent string length")),
                _ => {}
            }
            if p.is_identity() {
                identity += w;
            } else {
                terms.push(PauliTerm::new(p, w));
            }
        }
        Self::new(n.unwrap_or(0), terms, identity)
    }
}

/// Sparse complex-weighted Pauli sum used while assembling operators.
#[derive(Debug, Clone, Default)]
struct PauliSum(HashMap<PauliString, Complex64>);

impl PauliSum {
    fn add(&mut self, p: PauliString, w: Complex64) {
        *self.0.entry(p).or_default() += w;
    }
}

/// `a_p^dagger` (`dagger = true`) or `a_p` as two Pauli strings:
/// `(X_p -/+ i Y_p)/2 * Z_{p-1} ... Z_0`.
fn ladder(p: usize, dagger: bool) -> [(Complex64, PauliString); 2] {
    let below = (1u64 << p) - 1;
    let bit = 1u64 << p;
    let y_sign = if dagger { -0.5 } else { 0.5 };
    [
        (Complex64::new(0.5, 0.0), PauliString::new(bit, below)),
        (Complex64::new(0.0, y_sign), PauliString::new(bit, below | bit)),
    ]
}

/// Maps the second-quantized Hamiltonian
/// `sum h_pq a+_p a_q + 1/2 sum <pq|rs> a+_p a+_q a_s a_r + E_core`
/// onto qubits via Jordan-Wigner; spin orbital `p` becomes qubit `p`.
pub fn jordan_wigner(s: &SpinOrbitalIntegrals) -> Result<QubitHamiltonian> {
    let n = s.n_spin_orbitals();
    if n > MAX_QUBITS {
        return Err(Error::Capacity(format!("{n} spin orbitals (max {MAX_QUBITS})")));
    }
    let ops: Vec<[[(Complex64, PauliString); 2]; 2]> =
        (0..n).map(|p| [ladder(p, false), ladder(p, true)]).collect();
    let mut sum = PauliSum::default();

    for p in 0..n {
        for q in 0..n {
            let w = s.h(p, q);
            if w == 0.0 {
                continue;
            }
            for (c1, p1) in &ops[p][1] {
                for (c2, p2) in &ops[q][0] {
                    let (ph, pp) = p1.mul(p2);
                    sum.add(pp, ph * c1 * c2 * w);
                }
            }
        }
    }

    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            let mut pq = Vec::with_capacity(4);
            for (c1, p1) in &ops[p][1] {
                for (c2, p2) in &ops[q][1] {
                    let (ph, pp) = p1.mul(p2);
                    pq.push((ph * c1 * c2, pp));
                }
            }
            for r in 0..n {
                for t in 0..n {
                    if r == t {
                        continue;
                    }
                    let w = 0.5 * s.g(p, q, r, t);
                    if w == 0.0 {
                        continue;
                    }
                    // a_s a_r with s = t
                    for (c3, p3) in &ops[t][0] {
                        for (c4, p4) in &ops[r][0] {
                            let (ph34, p34) = p3.mul(p4);
                            let c34 = ph34 * c3 * c4 * w;
                            for (c12, p12) in &pq {
                                let (ph, pp) = p12.mul(&p34);
                                sum.add(pp, ph * c12 * c34);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut identity = s.core_energy();
    let mut terms = Vec::with_capacity(sum.0.len());
    let mut keys: Vec<PauliString> = sum.0.keys().copied().collect();
    keys.sort_by(|a, b| a.lexicographic_cmp(b));
    for p in keys {
        let w = sum.0[&p];
        debug_assert!(w.im.abs() < 1e-10, "non-Hermitian JW term {p}: {w}");
        if p.is_identity() {
            identity += w.re;
        } else {
            terms.push(PauliTerm::new(p, w.re));
        }
    }
    QubitHamiltonian::new(n, terms, identity)
}

/// GF(2) action of the parity encoding on `n` bits: bit `j` becomes the XOR
/// of bits `0..=j`.
pub fn parity_bits(b: u64, n: usize) -> u64 {
    let mut out = 0;
    let mut acc = 0;
    for j in 0..n {
        acc ^= (b >> j) & 1;
        out |= acc << j;
    }
    out
}

/// Inverse of [`parity_bits`]: bit `j` becomes `b_j ^ b_{j-1}`.
pub fn unparity_bits(b: u64, n: usize) -> u64 {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (b ^ (b << 1)) & mask
}

/// `b -> A^{-T} b` for the lower-triangular parity matrix `A`: `b_j ^ b_{j+1}`.
fn inv_transpose_bits(b: u64, n: usize) -> u64 {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (b ^ (b >> 1)) & mask
}

/// `b -> A^T b`: bit `j` becomes the XOR of bits `j..n`.
fn transpose_bits(b: u64, n: usize) -> u64 {
    let mut out = 0;
    let mut acc = 0;
    for j in (0..n).rev() {
        acc ^= (b >> j) & 1;
        out |= acc << j;
    }
    out
}

fn conjugate_term(t: &PauliTerm, x: u64, z: u64) -> PauliTerm {
    // U X^x Z^z U^+ = X^{x'} Z^{z'} with no extra sign for a CNOT network,
    // so only the i^{x.z} letter phase changes
    let before = t.pauli.y_count() as i32;
    let after = (x & z).count_ones() as i32;
    let sign = match (before - after).rem_euclid(4) {
        0 => 1.0,
        2 => -1.0,
        _ => unreachable!("Y-count parity is invariant under CNOT conjugation"),
    };
    PauliTerm::new(PauliString::new(x, z), sign * t.coefficient)
}

/// Conjugates every term by the occupation-to-parity basis change
/// `|n> -> |A n>`.
pub fn to_parity(h: &QubitHamiltonian) -> QubitHamiltonian {
    let n = h.n_qubits;
    let terms = h
        .terms
        .iter()
        .map(|t| conjugate_term(t, parity_bits(t.pauli.x, n), inv_transpose_bits(t.pauli.z, n)))
        .collect();
    QubitHamiltonian {
        n_qubits: n,
        terms,
        identity_coefficient: h.identity_coefficient,
    }
}

/// Inverse of [`to_parity`].
pub fn from_parity(h: &QubitHamiltonian) -> QubitHamiltonian {
    let n = h.n_qubits;
    let terms = h
        .terms
        .iter()
        .map(|t| conjugate_term(t, unparity_bits(t.pauli.x, n), transpose_bits(t.pauli.z, n)))
        .collect();
    QubitHamiltonian {
        n_qubits: n,
        terms,
        identity_coefficient: h.identity_coefficient,
    }
}

/// Qubits removed by tapering a blocked layout with `l` spatial orbitals.
pub fn tapered_qubits(l: usize) -> [usize; 2] {
    [l - 1, 2 * l - 1]
}

/// Deletes the bits listed in `removed` (ascending) and closes the gaps.
pub fn delete_bits(b: u64, removed: &[usize]) -> u64 {
    let mut out = b;
    for &q in removed.iter().rev() {
        let low = out & ((1u64 << q) - 1);
        out = ((out >> (q + 1)) << q) | low;
    }
    out
}

/// Reinserts zero bits at `removed` positions (ascending); inverse of
/// [`delete_bits`] on the kept bits.
pub fn insert_bits(b: u64, removed: &[usize]) -> u64 {
    let mut out = b;
    for &q in removed {
        let low = out & ((1u64 << q) - 1);
        out = ((out >> q) << (q + 1)) | low;
    }
    out
}

/// Parity-encodes a blocked Jordan-Wigner Hamiltonian and removes qubits
/// `l-1` (alpha parity) and `2l-1` (total parity), replacing their `Z` by the
/// sector eigenvalues `(-1)^n_alpha` and `(-1)^(n_alpha+n_beta)`.
pub fn taper_two_qubits(h: &QubitHamiltonian, n_alpha: usize, n_beta: usize) -> Result<QubitHamiltonian> {
    let n = h.n_qubits;
    if n < 2 || n % 2 != 0 {
        return Err(Error::Sector(format!(
            "blocked layout needs an even qubit count, got {n}"
        )));
    }
    let l = n / 2;
    if n_alpha > l || n_beta > l {
        return Err(Error::Sector(format!(
            "({n_alpha}, {n_beta}) electrons in {l} spatial orbitals"
        )));
    }
    let removed = tapered_qubits(l);
    let eig = [
        if n_alpha % 2 == 0 { 1.0 } else { -1.0 },
        if (n_alpha + n_beta) % 2 == 0 { 1.0 } else { -1.0 },
    ];
    let parity = to_parity(h);
    let mut terms = Vec::with_capacity(parity.terms.len());
    for t in &parity.terms {
        let mut w = t.coefficient;
        for (k, &q) in removed.iter().enumerate() {
            if (t.pauli.x >> q) & 1 == 1 {
                return Err(Error::Symmetry {
                    qubit: q,
                    term: t.pauli.to_letters(n),
                });
            }
            if (t.pauli.z >> q) & 1 == 1 {
                w *= eig[k];
            }
        }
        let p = PauliString::new(delete_bits(t.pauli.x, &removed), delete_bits(t.pauli.z, &removed));
        terms.push(PauliTerm::new(p, w));
    }
    QubitHamiltonian::new(n - 2, terms, h.identity_coefficient)
}

/// Term ordering used to build Trotter products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingStrategy {
    /// Descending `|w|`, ties broken lexicographically.
    Magnitude,
    /// Ascending letter string, qubit 0 first, `I < X < Y < Z`.
    Lexicographic,
}

impl OrderingStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Magnitude => "magnitude",
            Self::Lexicographic => "lexicographic",
        }
    }
}

impl std::str::FromStr for OrderingStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "magnitude" | "mag" => Ok(Self::Magnitude),
            "lexicographic" | "lex" => Ok(Self::Lexicographic),
            other => Err(format!("unknown ordering {other:?}")),
        }
    }
}

fn magnitude_key(w: f64) -> i64 {
    (w.abs() / MAGNITUDE_QUANTUM).round() as i64
}

/// Reorders the terms; coefficients and masks are untouched.
pub fn order_terms(h: &QubitHamiltonian, strategy: OrderingStrategy) -> QubitHamiltonian {
    let mut terms = h.terms.clone();
    match strategy {
        OrderingStrategy::Lexicographic => terms.sort_by(|a, b| a.pauli.lexicographic_cmp(&b.pauli)),
        OrderingStrategy::Magnitude => terms.sort_by(|a, b| {
            match magnitude_key(b.coefficient).cmp(&magnitude_key(a.coefficient)) {
                Ordering::Equal => a.pauli.lexicographic_cmp(&b.pauli),
                o => o,
            }
        }),
    }
    QubitHamiltonian {
        n_qubits: h.n_qubits,
        terms,
        identity_coefficient: h.identity_coefficient,
    }
}
