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

//! Dense statevector with the kernels needed for phase estimation.
//!
//! Bit `q` of an amplitude index is qubit `q`; qubit 0 is the least
//! significant bit. All kernels work in place.

use crate::encoding::QubitHamiltonian;
use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliString};
use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 30;

/// Slice kernels shared by [`Statevector`] and block-wise evolution.
pub mod kernels {
    use super::*;

    /// `amps <- exp(-i theta P) amps` for a non-identity `P`.
    pub fn pauli_rotation(amps: &mut [Complex64], p: PauliString, theta: f64) {
        let (s, c) = theta.sin_cos();
        if p.x == 0 {
            let plus = Complex64::new(c, -s);
            let minus = Complex64::new(c, s);
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= if (i as u64 & p.z).count_ones() & 1 == 0 { plus } else { minus };
            }
            return;
        }
        // P|i> = i^{ny} (-1)^{|i & z|} |i ^ x>
        let f = Complex64::new(0.0, -s) * i_pow(p.y_count());
        let flip = if (p.x & p.z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        let pivot = 1usize << (63 - p.x.leading_zeros());
        let (x, z) = (p.x as usize, p.z as usize);
        let len = amps.len();
        let mut hi = 0;
        while hi < len {
            for i in hi..hi + pivot {
                let j = i ^ x;
                let si = 1.0 - 2.0 * ((i & z).count_ones() & 1) as f64;
                rotate_pair(amps, i, j, c, f * si, f * (si * flip));
            }
            hi += 2 * pivot;
        }
    }

    /// `(a_i, a_j) <- (c a_i + fj a_j, c a_j + fi a_i)`.
    #[inline(always)]
    fn rotate_pair(amps: &mut [Complex64], i: usize, j: usize, c: f64, fi: Complex64, fj: Complex64) {
        let (ai, aj) = (amps[i], amps[j]);
        amps[i] = ai * c + fj * aj;
        amps[j] = aj * c + fi * ai;
    }

    /// Controlled version: only indices with `control` set are rotated.
    pub fn controlled_pauli_rotation(amps: &mut [Complex64], control: usize, p: PauliString, theta: f64) {
        let (s, c) = theta.sin_cos();
        let cmask = 1usize << control;
        if p.x == 0 {
            let plus = Complex64::new(c, -s);
            let minus = Complex64::new(c, s);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & cmask != 0 {
                    *a *= if (i as u64 & p.z).count_ones() & 1 == 0 { plus } else { minus };
                }
            }
            return;
        }
        let f = Complex64::new(0.0, -s) * i_pow(p.y_count());
        let flip = if (p.x & p.z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        let pivot = 1usize << (63 - p.x.leading_zeros());
        let (x, z) = (p.x as usize, p.z as usize);
        for i in 0..amps.len() {
            if i & pivot != 0 || i & cmask == 0 {
                continue;
            }
            let si = 1.0 - 2.0 * ((i & z).count_ones() & 1) as f64;
            rotate_pair(amps, i, i ^ x, c, f * si, f * (si * flip));
        }
    }

    pub fn scale(amps: &mut [Complex64], factor: Complex64) {
        amps.iter_mut().for_each(|a| *a *= factor);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Capacity(format!("{n} qubits (max {MAX_QUBITS})")));
    }
    Ok(())
}

impl Statevector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let len = 1usize << n_qubits;
        if index >= len {
            return Err(Error::Index(format!("basis index {index} on {n_qubits} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes; the caller is responsible for normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_capacity(n_qubits)?;
        if amps.len() != 1usize << n_qubits {
            return Err(Error::Index(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::Index(format!("qubit {q} on {} qubits", self.n_qubits)));
        }
        Ok(())
    }

    fn check_mask(&self, p: PauliString) -> Result<()> {
        if self.n_qubits < 64 && p.support() >> self.n_qubits != 0 {
            return Err(Error::Index(format!(
                "Pauli string {p} exceeds {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// `psi <- exp(-i theta P) psi`.
    pub fn apply_pauli_rotation(&mut self, p: PauliString, theta: f64) -> Result<()> {
        if p.is_identity() {
            return Err(Error::IdentityRotation);
        }
        self.check_mask(p)?;
        kernels::pauli_rotation(&mut self.amps, p, theta);
        Ok(())
    }

    /// Applies `exp(-i theta P)` on the subspace where `control` is 1.
    pub fn apply_controlled_pauli_rotation(&mut self, control: usize, p: PauliString, theta: f64) -> Result<()> {
        if p.is_identity() {
            return Err(Error::IdentityRotation);
        }
        self.check_mask(p)?;
        self.check_qubit(control)?;
        if (p.support() >> control) & 1 == 1 {
            return Err(Error::Overlap(control));
        }
        kernels::controlled_pauli_rotation(&mut self.amps, control, p, theta);
        Ok(())
    }

    /// Multiplies by `e^{i phi}`, either globally or on the `control = 1` subspace.
    pub fn apply_phase(&mut self, control: Option<usize>, phi: f64) -> Result<()> {
        let f = Complex64::from_polar(1.0, phi);
        match control {
            None => kernels::scale(&mut self.amps, f),
            Some(c) => {
                self.check_qubit(c)?;
                let m = 1usize << c;
                self.amps
                    .iter_mut()
                    .enumerate()
                    .filter(|(i, _)| i & m != 0)
                    .for_each(|(_, a)| *a *= f);
            }
        }
        Ok(())
    }

    /// `psi <- P psi` (plain multiplication, not a rotation).
    pub fn apply_pauli(&mut self, p: PauliString) -> Result<()> {
        self.check_mask(p)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let (ph, j) = p.apply_to_basis(i as u64);
            out[j as usize] = ph * a;
        }
        self.amps = out;
        Ok(())
    }

    pub fn apply_hadamard(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let m = 1usize << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    /// Phase `e^{i phi}` on amplitudes where both qubits are 1.
    fn apply_controlled_phase(&mut self, a: usize, b: usize, phi: f64) {
        let m = (1usize << a) | (1usize << b);
        let f = Complex64::from_polar(1.0, phi);
        self.amps
            .iter_mut()
            .enumerate()
            .filter(|(i, _)| i & m == m)
            .for_each(|(_, x)| *x *= f);
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
    }

    /// Appends a new most-significant qubit in `|0>`.
    pub fn extend_with_zero_qubit(&mut self) -> Result<()> {
        check_capacity(self.n_qubits + 1)?;
        self.amps.resize(2 * self.amps.len(), Complex64::new(0.0, 0.0));
        self.n_qubits += 1;
        Ok(())
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(Error::Index(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    /// Inverse QFT over `qubits`, `qubits[0]` being the most significant
    /// phase bit: maps `2^{-n/2} sum_y e^{2 pi i x y / 2^n} |y>` to `|x>`.
    pub fn inverse_qft(&mut self, qubits: &[usize]) -> Result<()> {
        self.check_distinct(qubits)?;
        let n = qubits.len();
        for k in 0..n / 2 {
            self.apply_swap(qubits[k], qubits[n - 1 - k]);
        }
        for j in (0..n).rev() {
            for k in (j + 1..n).rev() {
                let angle = -2.0 * PI / (1u64 << (k - j + 1)) as f64;
                self.apply_controlled_phase(qubits[k], qubits[j], angle);
            }
            self.apply_hadamard(qubits[j])?;
        }
        Ok(())
    }

    /// Forward QFT, the inverse of [`Statevector::inverse_qft`].
    pub fn qft(&mut self, qubits: &[usize]) -> Result<()> {
        self.check_distinct(qubits)?;
        let n = qubits.len();
        for j in 0..n {
            self.apply_hadamard(qubits[j])?;
            for k in j + 1..n {
                let angle = 2.0 * PI / (1u64 << (k - j + 1)) as f64;
                self.apply_controlled_phase(qubits[k], qubits[j], angle);
            }
        }
        for k in 0..n / 2 {
            self.apply_swap(qubits[k], qubits[n - 1 - k]);
        }
        Ok(())
    }

    /// Probability of each outcome on `qubits`; outcome bit `n-1-k` is
    /// `qubits[k]`, so the first listed qubit is most significant.
    pub fn marginal_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_distinct(qubits)?;
        let n = qubits.len();
        let mut out = vec![0.0; 1usize << n];
        for (i, a) in self.amps.iter().enumerate() {
            let mut x = 0usize;
            for &q in qubits {
                x = (x << 1) | ((i >> q) & 1);
            }
            out[x] += a.norm_sqr();
        }
        Ok(out)
    }

    /// `<psi|H|psi>`; `H` must act on the lowest `H.n_qubits()` qubits.
    pub fn expectation(&self, h: &QubitHamiltonian) -> Result<f64> {
        if h.n_qubits() > self.n_qubits {
            return Err(Error::Index(format!(
                "{}-qubit operator on {} qubits",
                h.n_qubits(),
                self.n_qubits
            )));
        }
        let mut e = h.identity_coefficient() * self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        for t in h.terms() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, a) in self.amps.iter().enumerate() {
                let (ph, j) = t.pauli.apply_to_basis(i as u64);
                acc += self.amps[j as usize].conj() * ph * a;
            }
            e += t.coefficient * acc.re;
        }
        Ok(e)
    }

    /// Draws `shots` measurement outcomes on `qubits` and returns counts per
    /// outcome, using the same bit order as [`Statevector::marginal_distribution`].
    pub fn sample(&self, qubits: &[usize], shots: usize, seed: u64) -> Result<Vec<u64>> {
        sample_counts(&self.marginal_distribution(qubits)?, shots, seed)
    }
}

/// Outcome counts of `shots` draws from `probabilities`, seeded ChaCha8.
pub fn sample_counts(probabilities: &[f64], shots: usize, seed: u64) -> Result<Vec<u64>> {
    let dist = WeightedIndex::new(probabilities).map_err(|e| Error::Index(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &Statevector, b: &[Complex64], tol: f64) -> bool {
        a.amplitudes().iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn zero_angle_is_identity() {
        let mut s = Statevector::from_amplitudes(2, vec![c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(0.0, -0.5)]).unwrap();
        let before = s.clone();
        s.apply_pauli_rotation(PauliString::from_letters("XY").unwrap(), 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn x_half_pi() {
        let mut s = Statevector::zero(1).unwrap();
        s.apply_pauli_rotation(PauliString::from_letters("X").unwrap(), PI / 2.0).unwrap();
        assert!(close(&s, &[c(0.0, 0.0), c(0.0, -1.0)], 1e-15));
    }

    #[test]
    fn identity_rotation_rejected() {
        let mut s = Statevector::zero(2).unwrap();
        assert_eq!(
            s.apply_pauli_rotation(PauliString::IDENTITY, 0.3),
            Err(Error::IdentityRotation)
        );
    }

    #[test]
    fn controlled_rotation_cases() {
        let z0 = PauliString::from_letters("Z").unwrap();
        // control |0>: untouched
        let mut s = Statevector::basis(2, 0b00).unwrap();
        s.apply_controlled_pauli_rotation(1, PauliString::from_letters("X").unwrap(), 0.7).unwrap();
        assert_eq!(s, Statevector::basis(2, 0).unwrap());
        // control |1>, Z_0 on |0>: e^{-i theta}
        let mut s = Statevector::basis(2, 0b10).unwrap();
        s.apply_controlled_pauli_rotation(1, z0, 0.7).unwrap();
        assert!((s.amplitudes()[0b10] - Complex64::from_polar(1.0, -0.7)).norm() < 1e-15);
        assert_eq!(s.apply_controlled_pauli_rotation(0, z0, 0.1), Err(Error::Overlap(0)));
    }

    #[test]
    fn phase_gate() {
        let mut s = Statevector::zero(2).unwrap();
        s.apply_phase(None, 0.0).unwrap();
        assert_eq!(s, Statevector::zero(2).unwrap());
        s.apply_hadamard(1).unwrap();
        s.apply_phase(Some(1), PI).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(close(&s, &[c(h, 0.0), c(0.0, 0.0), c(-h, 0.0), c(0.0, 0.0)], 1e-15));
    }

    #[test]
    fn extend_doubles() {
        let mut s = Statevector::from_amplitudes(1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        s.extend_with_zero_qubit().unwrap();
        assert_eq!(s.n_qubits(), 2);
        assert_eq!(s.amplitudes().len(), 4);
        assert!(s.amplitudes()[2..].iter().all(|a| *a == c(0.0, 0.0)));
        assert_eq!(s.amplitudes()[1], c(0.0, 0.8));
    }

    #[test]
    fn inverse_qft_of_uniform() {
        let mut s = Statevector::zero(4).unwrap();
        for q in [0, 2, 3] {
            s.apply_hadamard(q).unwrap();
        }
        s.inverse_qft(&[3, 0, 2]).unwrap();
        assert!((s.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(matches!(s.inverse_qft(&[1, 1]), Err(Error::Index(_))));
    }

    #[test]
    fn marginals() {
        // product state: qubit 0 P(1)=0.36, qubit 1 in |1>
        let s = Statevector::from_amplitudes(2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.8, 0.0), c(0.0, 0.6)]).unwrap();
        let m0 = s.marginal_distribution(&[0]).unwrap();
        assert!((m0[0] - 0.64).abs() < 1e-15 && (m0[1] - 0.36).abs() < 1e-15);
        assert_eq!(s.marginal_distribution(&[1]).unwrap(), vec![0.0, 1.0]);
        // first listed qubit is most significant
        let m = s.marginal_distribution(&[1, 0]).unwrap();
        assert!((m[0b10] - 0.64).abs() < 1e-15 && (m[0b11] - 0.36).abs() < 1e-15);

        let h = FRAC_1_SQRT_2;
        let bell = Statevector::from_amplitudes(2, vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
        let m = bell.marginal_distribution(&[1]).unwrap();
        assert!((m[0] - 0.5).abs() < 1e-15 && (m[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_seeded() {
        let mut s = Statevector::zero(2).unwrap();
        s.apply_hadamard(0).unwrap();
        let a = s.sample(&[0, 1], 1000, 7).unwrap();
        assert_eq!(a, s.sample(&[0, 1], 1000, 7).unwrap());
        assert_eq!(a.iter().sum::<u64>(), 1000);
        assert_eq!(a[1] + a[3], 0);
    }

    #[test]
    fn capacity() {
        assert!(matches!(Statevector::zero(31), Err(Error::Capacity(_))));
    }
}
