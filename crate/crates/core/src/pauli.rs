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

//! Pauli strings in symplectic bitmask form.
//!
//! A string is stored as `(x, z)`: qubit `q` carries `I`, `X`, `Y`, `Z` for
//! `(x_q, z_q) = (0,0), (1,0), (1,1), (0,1)`. The operator is the plain tensor
//! product of those letters, with no global phase folded in.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

/// `i^k` for `k` taken mod 4.
pub fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Letter on qubit `q`: one of `I X Y Z`.
    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    /// Rank of the letter on qubit `q` in the alphabet `I < X < Y < Z`.
    fn rank(&self, q: usize) -> u8 {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        }
    }

    /// Compares the sequences of non-identity factors `(qubit, letter)` in
    /// ascending qubit order, with `X < Y < Z`; a proper prefix sorts first.
    pub fn lexicographic_cmp(&self, other: &Self) -> Ordering {
        let diff = (self.x ^ other.x) | (self.z ^ other.z);
        if diff == 0 {
            return Ordering::Equal;
        }
        let q = diff.trailing_zeros() as usize;
        let ended = |p: &Self| p.support() >> q == 0;
        match (self.rank(q), other.rank(q)) {
            (0, _) if ended(self) => Ordering::Less,
            (0, _) => Ordering::Greater,
            (_, 0) if ended(other) => Ordering::Greater,
            (_, 0) => Ordering::Less,
            (a, b) => a.cmp(&b),
        }
    }

    /// Letter string over `n` qubits, qubit 0 first.
    pub fn to_letters(&self, n: usize) -> String {
        (0..n).map(|q| self.letter(q)).collect()
    }

    pub fn from_letters(s: &str) -> Option<Self> {
        let mut p = Self::IDENTITY;
        for (q, c) in s.chars().enumerate() {
            let bit = 1u64 << q;
            match c {
                'I' => {}
                'X' => p.x |= bit,
                'Y' => {
                    p.x |= bit;
                    p.z |= bit
                }
                'Z' => p.z |= bit,
                _ => return None,
            }
        }
        Some(p)
    }

    /// Product `self * other = phase * result`.
    pub fn mul(&self, other: &Self) -> (Complex64, PauliString) {
        // P(x,z) = i^{x.z} X^x Z^z  and  Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        let out = PauliString::new(self.x ^ other.x, self.z ^ other.z);
        let k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones();
        let k = (k + 4 * 64 - out.y_count()) % 4;
        (i_pow(k), out)
    }

    /// Action on a computational basis state: `P|b> = phase |b ^ x>`.
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let sign = if (b & self.z).count_ones() % 2 == 1 { 2 } else { 0 };
        (i_pow(self.y_count() + sign), b ^ self.x)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = 64 - self.support().leading_zeros() as usize;
        write!(f, "{}", self.to_letters(n.max(1)))
    }
}
