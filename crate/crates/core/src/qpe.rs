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

//! Quantum phase estimation drivers.
//!
//! The system register always occupies the lowest `L` qubits, so a unitary
//! controlled on any ancilla acts independently on each contiguous block of
//! `2^L` amplitudes whose control bit is set. Both drivers exploit this and
//! apply whole powers of `U` block by block.

use crate::encoding::{order_terms, OrderingStrategy, QubitHamiltonian};
use crate::error::{Error, Result};
use crate::integrals::{to_spin_orbitals, SpatialIntegrals};
use crate::oracle::{build_sector_matrix, diagonalize, determinant_to_qubit_index, Encoding, SectorBasis, SpectrumResult};
use crate::pauli::PauliString;
use crate::statevector::{kernels, Statevector, MAX_QUBITS};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

/// Ground states closer than this to the next level are rejected as input.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrotterOrder {
    First,
    Second,
}

impl TrotterOrder {
    pub fn as_int(&self) -> u8 {
        match self {
            Self::First => 1,
            Self::Second => 2,
        }
    }

    pub fn from_int(k: u8) -> Option<Self> {
        match k {
            1 => Some(Self::First),
            2 => Some(Self::Second),
            _ => None,
        }
    }
}

/// Product formula for one application of `e^{-iHt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterPlan {
    pub order: TrotterOrder,
    pub slices: usize,
    pub time: f64,
    pub ordering: OrderingStrategy,
}

impl TrotterPlan {
    pub fn new(order: TrotterOrder, slices: usize, time: f64, ordering: OrderingStrategy) -> Result<Self> {
        if slices == 0 {
            return Err(Error::Index("a Trotter plan needs at least one slice".into()));
        }
        Ok(Self {
            order,
            slices,
            time,
            ordering,
        })
    }
}

/// How the controlled unitary is realized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evolution {
    Trotter(TrotterPlan),
    /// Exact `e^{-iHt}` from the sector eigendecomposition.
    TrotterFree { time: f64 },
}

impl Evolution {
    pub fn time(&self) -> f64 {
        match self {
            Self::Trotter(p) => p.time,
            Self::TrotterFree { time } => *time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputState {
    HartreeFock,
    FullCi,
}

impl InputState {
    pub fn name(&self) -> &'static str {
        match self {
            Self::HartreeFock => "hf",
            Self::FullCi => "fci",
        }
    }
}

impl std::str::FromStr for InputState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hf" | "hartree_fock" => Ok(Self::HartreeFock),
            "fci" | "full_ci" => Ok(Self::FullCi),
            other => Err(format!("unknown input state {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpeConfig {
    pub n_ancilla: usize,
    pub input_state: InputState,
    pub evolution: Evolution,
}

/// Outcome probabilities over the `2^N` ancilla bit strings `x_1 ... x_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    n_ancilla: usize,
    probabilities: Vec<f64>,
}

fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let decimals = (11 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

impl PhaseDistribution {
    pub fn new(n_ancilla: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1usize << n_ancilla {
            return Err(Error::Index(format!(
                "{} probabilities for {n_ancilla} ancillas",
                probabilities.len()
            )));
        }
        Ok(Self {
            n_ancilla,
            probabilities,
        })
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn n_bins(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `x / 2^N`.
    pub fn phase(&self, bin: usize) -> f64 {
        bin as f64 / self.n_bins() as f64
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn argmax(&self) -> usize {
        self.probabilities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i)
    }

    /// `1/2 sum |p - q|`.
    pub fn total_variation(&self, other: &Self) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Shot counts per bin for `shots` simulated measurements.
    pub fn sample(&self, shots: usize, seed: u64) -> Result<Vec<u64>> {
        crate::statevector::sample_counts(&self.probabilities, shots, seed)
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `bin,phase,probability` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin,phase,probability\n");
        for (bin, p) in self.probabilities.iter().enumerate() {
            let _ = writeln!(out, "{bin},{},{p:e}", sig12(self.phase(bin)));
        }
        out
    }

    /// Reads [`PhaseDistribution::to_csv`] output; `#` lines are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut probs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("bin") {
                continue;
            }
            let perr = || Error::Parse {
                line: i + 1,
                msg: format!("bad distribution row {line:?}"),
            };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 || cols[0].parse::<usize>().ok() != Some(probs.len()) {
                return Err(perr());
            }
            probs.push(cols[2].parse::<f64>().map_err(|_| perr())?);
        }
        if !probs.len().is_power_of_two() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("{} bins is not a power of two", probs.len()),
            });
        }
        Self::new(probs.len().trailing_zeros() as usize, probs)
    }
}

/// A unitary on the `L`-qubit system register applied to one contiguous block.
pub trait Propagator {
    fn n_qubits(&self) -> usize;

    /// `block <- U^power block`, `block.len() == 2^L`.
    fn apply_power(&self, block: &mut [Complex64], power: u64);

    /// Whether `U^T = U` in the computational basis.
    fn is_transpose_symmetric(&self) -> bool {
        false
    }
}

/// One Trotterized `U` compiled into a flat rotation list.
#[derive(Debug, Clone)]
pub struct TrotterPropagator {
    n_qubits: usize,
    slice: Vec<(PauliString, f64)>,
    slices: usize,
    identity_angle: f64,
    symmetric: bool,
}

impl TrotterPropagator {
    /// `h` must already be ordered per `plan.ordering`.
    pub fn new(h: &QubitHamiltonian, plan: &TrotterPlan) -> Self {
        let m = plan.slices as f64;
        let slice = match plan.order {
            TrotterOrder::First => h
                .terms()
                .iter()
                .map(|t| (t.pauli, t.coefficient * plan.time / m))
                .collect(),
            TrotterOrder::Second => {
                let half: Vec<_> = h
                    .terms()
                    .iter()
                    .map(|t| (t.pauli, t.coefficient * plan.time / (2.0 * m)))
                    .collect();
                half.iter().chain(half.iter().rev()).copied().collect()
            }
        };
        Self {
            n_qubits: h.n_qubits(),
            slice,
            slices: plan.slices,
            identity_angle: h.identity_coefficient() * plan.time,
            // a palindromic product of complex-symmetric factors
            symmetric: plan.order == TrotterOrder::Second && h.terms().iter().all(|t| t.pauli.y_count() % 2 == 0),
        }
    }

    pub fn rotations_per_slice(&self) -> usize {
        self.slice.len()
    }
}

impl Propagator for TrotterPropagator {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_power(&self, block: &mut [Complex64], power: u64) {
        for _ in 0..power * self.slices as u64 {
            for &(p, theta) in &self.slice {
                kernels::pauli_rotation(block, p, theta);
            }
        }
        kernels::scale(block, Complex64::from_polar(1.0, -self.identity_angle * power as f64));
    }

    fn is_transpose_symmetric(&self) -> bool {
        self.symmetric
    }
}

/// Exact `e^{-iHt}` on the span of a basis, from its eigendecomposition.
/// Amplitudes outside the basis are left untouched.
pub struct ExactPropagator<'a> {
    n_qubits: usize,
    basis: &'a SectorBasis,
    spectrum: &'a SpectrumResult,
    time: f64,
}

impl<'a> ExactPropagator<'a> {
    pub fn new(basis: &'a SectorBasis, spectrum: &'a SpectrumResult, time: f64) -> Self {
        Self {
            n_qubits: basis.n_qubits(),
            basis,
            spectrum,
            time,
        }
    }
}

impl Propagator for ExactPropagator<'_> {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_power(&self, block: &mut [Complex64], power: u64) {
        let v = &self.spectrum.eigenvectors;
        let states = self.basis.states();
        let local: Vec<Complex64> = states.iter().map(|&s| block[s as usize]).collect();
        let n = local.len();
        let mut coef = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in coef.iter_mut().enumerate() {
            let col = v.column(k);
            let overlap: Complex64 = col.iter().zip(&local).map(|(a, b)| a.conj() * b).sum();
            let e = self.spectrum.eigenvalues[k];
            *c = overlap * Complex64::from_polar(1.0, -e * self.time * power as f64);
        }
        for (i, &s) in states.iter().enumerate() {
            block[s as usize] = (0..n).map(|k| v[(i, k)] * coef[k]).sum();
        }
    }
}

fn check_control(psi: &Statevector, sys_qubits: usize, control: Option<usize>) -> Result<()> {
    if sys_qubits > psi.n_qubits() {
        return Err(Error::Index(format!(
            "{sys_qubits}-qubit evolution on {} qubits",
            psi.n_qubits()
        )));
    }
    if let Some(c) = control {
        if c >= psi.n_qubits() {
            return Err(Error::Index(format!("control {c} on {} qubits", psi.n_qubits())));
        }
        if c < sys_qubits {
            return Err(Error::Overlap(c));
        }
    }
    Ok(())
}

/// Applies `power` repetitions of a propagator on the low qubits, optionally
/// controlled on a qubit above the system register.
pub fn apply_controlled_power<P: Propagator + ?Sized>(
    psi: &mut Statevector,
    prop: &P,
    control: Option<usize>,
    power: u64,
) -> Result<()> {
    let l = prop.n_qubits();
    check_control(psi, l, control)?;
    let block = 1usize << l;
    let cmask = control.map_or(0, |c| 1usize << c);
    for (b, chunk) in psi.amplitudes_mut().chunks_exact_mut(block).enumerate() {
        if (b << l) & cmask == cmask {
            prop.apply_power(chunk, power);
        }
    }
    Ok(())
}

/// Gate-level `(U_Trotter)^repetitions`, term by term on the full register.
/// `h` must be ordered per `plan.ordering`; the identity weight enters as a
/// (controlled) phase `-c_I t m`.
pub fn apply_trotterized_evolution(
    psi: &mut Statevector,
    h: &QubitHamiltonian,
    plan: &TrotterPlan,
    control: Option<usize>,
    repetitions: u64,
) -> Result<()> {
    check_control(psi, h.n_qubits(), control)?;
    let prop = TrotterPropagator::new(h, plan);
    for _ in 0..repetitions * plan.slices as u64 {
        for &(p, theta) in &prop.slice {
            match control {
                Some(c) => psi.apply_controlled_pauli_rotation(c, p, theta)?,
                None => psi.apply_pauli_rotation(p, theta)?,
            }
        }
    }
    psi.apply_phase(control, -h.identity_coefficient() * plan.time * repetitions as f64)
}

/// A qubit Hamiltonian together with its exact sector reference.
#[derive(Debug, Clone)]
pub struct QpeSystem {
    pub hamiltonian: QubitHamiltonian,
    pub basis: SectorBasis,
    pub spectrum: SpectrumResult,
}

impl QpeSystem {
    /// Builds the encoded Hamiltonian and its `(n_alpha, n_beta)` sector
    /// reference from spatial integrals, splitting electrons by `MS2`.
    pub fn from_integrals(s: &SpatialIntegrals, encoding: Encoding) -> Result<Self> {
        let (na, nb) = s.electron_split()?;
        let so = to_spin_orbitals(s, na, nb)?;
        let jw = crate::encoding::jordan_wigner(&so)?;
        let hamiltonian = match encoding {
            Encoding::JordanWigner => jw,
            Encoding::Parity => crate::encoding::to_parity(&jw),
            Encoding::TaperedParity => crate::encoding::taper_two_qubits(&jw, na, nb)?,
        };
        let basis = SectorBasis::new(s.n_orbitals(), na, nb, encoding)?;
        Self::new(hamiltonian, basis)
    }

    /// Diagonalizes `h` on `basis`.
    pub fn new(hamiltonian: QubitHamiltonian, basis: SectorBasis) -> Result<Self> {
        let m = build_sector_matrix(&hamiltonian, &basis)?;
        let spectrum = diagonalize(&m)?;
        Ok(Self {
            hamiltonian,
            basis,
            spectrum,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn ground_energy(&self) -> f64 {
        self.spectrum.ground_energy()
    }

    /// Expands basis coordinates into a system-register statevector.
    pub fn embed(&self, coords: &[Complex64]) -> Result<Statevector> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << self.n_qubits()];
        for (&s, &c) in self.basis.states().iter().zip(coords) {
            amps[s as usize] = c;
        }
        Statevector::from_amplitudes(self.n_qubits(), amps)
    }

    /// Coordinates of `psi` (system register) in the eigenbasis.
    pub fn eigen_overlaps(&self, psi: &Statevector) -> Vec<Complex64> {
        let local: Vec<Complex64> = self
            .basis
            .states()
            .iter()
            .map(|&s| psi.amplitudes()[s as usize])
            .collect();
        let v = &self.spectrum.eigenvectors;
        (0..v.ncols())
            .map(|k| v.column(k).iter().zip(&local).map(|(a, b)| a.conj() * b).sum())
            .collect()
    }
}

/// Hartree-Fock determinant or exact ground state on the system register.
pub fn prepare_input_state(system: &QpeSystem, kind: InputState) -> Result<Statevector> {
    match kind {
        InputState::HartreeFock => {
            let (enc, l, na, nb) = system
                .basis
                .sector()
                .ok_or_else(|| Error::Sector("Hartree-Fock input needs an electron sector".into()))?;
            let occ = ((1u64 << na) - 1) | (((1u64 << nb) - 1) << l);
            let idx = determinant_to_qubit_index(occ, enc, l, na, nb)?;
            Statevector::basis(system.n_qubits(), idx as usize)
        }
        InputState::FullCi => {
            let gap = system.spectrum.ground_gap();
            if gap < DEGENERACY_TOL {
                return Err(Error::Degeneracy(gap));
            }
            system.embed(&system.spectrum.ground_state())
        }
    }
}

/// Phase `(-E t / 2 pi) mod 1`.
pub fn energy_to_phase(energy: f64, time: f64) -> f64 {
    (-energy * time / (2.0 * PI)).rem_euclid(1.0)
}

fn check_branch(system: &QpeSystem, time: f64) -> Result<()> {
    let et = system.ground_energy() * time;
    if !(et > -2.0 * PI && et <= 0.0) {
        return Err(Error::Branch(et));
    }
    Ok(())
}

fn check_capacity(l: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Index("QPE needs at least one ancilla".into()));
    }
    if l + n > MAX_QUBITS {
        return Err(Error::Capacity(format!("{l} system + {n} ancilla qubits (max {MAX_QUBITS})")));
    }
    Ok(())
}

/// Textbook circuit: all `L+N` qubits allocated up front. Ancilla `k`
/// (`k = 1` most significant) sits on qubit `L+N-k` and controls `U^{2^{N-k}}`.
pub fn qpe_naive<P: Propagator + ?Sized>(input: &Statevector, prop: &P, n_ancilla: usize) -> Result<PhaseDistribution> {
    let l = input.n_qubits();
    check_capacity(l, n_ancilla)?;
    let mut psi = input.clone();
    for _ in 0..n_ancilla {
        psi.extend_with_zero_qubit()?;
    }
    let ancillas: Vec<usize> = (1..=n_ancilla).map(|k| l + n_ancilla - k).collect();
    for &a in &ancillas {
        psi.apply_hadamard(a)?;
    }
    for (k, &a) in ancillas.iter().enumerate() {
        apply_controlled_power(&mut psi, prop, Some(a), 1u64 << (n_ancilla - 1 - k))?;
    }
    psi.inverse_qft(&ancillas)?;
    PhaseDistribution::new(n_ancilla, psi.marginal_distribution(&ancillas)?)
}

/// Ancilla-by-ancilla circuit: ancilla `k` is appended as the new top qubit
/// right before its controlled `U^{2^{N-k}}`, so the longest evolution runs on
/// `L+1` qubits only.
pub fn qpe_sequential<P: Propagator + ?Sized>(
    input: &Statevector,
    prop: &P,
    n_ancilla: usize,
) -> Result<PhaseDistribution> {
    let l = input.n_qubits();
    check_capacity(l, n_ancilla)?;
    let mut psi = input.clone();
    let mut ancillas = Vec::with_capacity(n_ancilla);
    for k in 1..=n_ancilla {
        psi.extend_with_zero_qubit()?;
        let a = l + k - 1;
        psi.apply_hadamard(a)?;
        apply_controlled_power(&mut psi, prop, Some(a), 1u64 << (n_ancilla - k))?;
        ancillas.push(a);
    }
    psi.inverse_qft(&ancillas)?;
    PhaseDistribution::new(n_ancilla, psi.marginal_distribution(&ancillas)?)
}

/// Same outcome distribution as the circuits, read off the autocorrelation
/// `c(k) = <psi|U^k|psi>`, `0 <= k < 2^N`:
/// `P(x) = 2^{-2N} sum_{m,m'} c(m - m') e^{-2 pi i (m - m') x / 2^N}`.
/// Needs `2^N - 1` applications of `U` on the system register alone, or half
/// as many when `U^T = U` and the input is real.
pub fn qpe_autocorrelation<P: Propagator + ?Sized>(
    input: &Statevector,
    prop: &P,
    n_ancilla: usize,
) -> Result<PhaseDistribution> {
    let l = input.n_qubits();
    check_capacity(l, n_ancilla)?;
    if prop.n_qubits() != l {
        return Err(Error::Index(format!("{}-qubit propagator on {l} qubits", prop.n_qubits())));
    }
    let size = 1usize << n_ancilla;
    let zero = Complex64::new(0.0, 0.0);
    let psi = input.amplitudes();
    let mut corr = vec![zero; size];
    let mut current = psi.to_vec();
    if prop.is_transpose_symmetric() && psi.iter().all(|a| a.im == 0.0) {
        // U^{-k} psi = conj(U^k psi)
        let bilinear = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<Complex64>();
        corr[0] = bilinear(&current, &current);
        let mut k = 0;
        while 2 * k + 1 < size {
            let mut next = current.clone();
            prop.apply_power(&mut next, 1);
            corr[2 * k + 1] = bilinear(&current, &next);
            if 2 * k + 2 < size {
                corr[2 * k + 2] = bilinear(&next, &next);
            }
            current = next;
            k += 1;
        }
    } else {
        let dot = |b: &[Complex64]| psi.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
        corr[0] = dot(&current);
        for c in corr.iter_mut().skip(1) {
            prop.apply_power(&mut current, 1);
            *c = dot(&current);
        }
    }
    let twiddle: Vec<Complex64> = (0..size)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / size as f64))
        .collect();
    let norm = (size * size) as f64;
    let probs = (0..size)
        .map(|x| {
            let mut acc = size as f64 * corr[0].re;
            for (k, c) in corr.iter().enumerate().skip(1) {
                acc += 2.0 * ((size - k) as f64) * (c * twiddle[(k * x) % size]).re;
            }
            (acc / norm).max(0.0)
        })
        .collect();
    PhaseDistribution::new(n_ancilla, probs)
}

/// Which simulation produces the outcome distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Driver {
    Naive,
    #[default]
    Sequential,
    Autocorrelation,
}

impl Driver {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Naive => "naive",
            Self::Sequential => "sequential",
            Self::Autocorrelation => "autocorrelation",
        }
    }

    pub fn run<P: Propagator + ?Sized>(&self, input: &Statevector, prop: &P, n_ancilla: usize) -> Result<PhaseDistribution> {
        match self {
            Self::Naive => qpe_naive(input, prop, n_ancilla),
            Self::Sequential => qpe_sequential(input, prop, n_ancilla),
            Self::Autocorrelation => qpe_autocorrelation(input, prop, n_ancilla),
        }
    }
}

impl std::str::FromStr for Driver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "naive" => Ok(Self::Naive),
            "sequential" => Ok(Self::Sequential),
            "autocorrelation" => Ok(Self::Autocorrelation),
            other => Err(format!("unknown driver {other:?}")),
        }
    }
}

/// Prepares the input, builds the propagator for `cfg.evolution` and runs
/// `driver`.
pub fn run_qpe(system: &QpeSystem, cfg: &QpeConfig, driver: Driver) -> Result<PhaseDistribution> {
    check_capacity(system.n_qubits(), cfg.n_ancilla)?;
    check_branch(system, cfg.evolution.time())?;
    let input = prepare_input_state(system, cfg.input_state)?;
    match &cfg.evolution {
        Evolution::Trotter(plan) => {
            let h = order_terms(&system.hamiltonian, plan.ordering);
            driver.run(&input, &TrotterPropagator::new(&h, plan), cfg.n_ancilla)
        }
        Evolution::TrotterFree { time } => {
            let prop = ExactPropagator::new(&system.basis, &system.spectrum, *time);
            driver.run(&input, &prop, cfg.n_ancilla)
        }
    }
}

pub fn run_qpe_naive(system: &QpeSystem, cfg: &QpeConfig) -> Result<PhaseDistribution> {
    run_qpe(system, cfg, Driver::Naive)
}

pub fn run_qpe_sequential(system: &QpeSystem, cfg: &QpeConfig) -> Result<PhaseDistribution> {
    run_qpe(system, cfg, Driver::Sequential)
}

/// Closed-form QPE outcome probability for eigenphase `phi` at `bin`:
/// `|2^{-N} sum_m e^{2 pi i m (phi - x/2^N)}|^2`.
pub fn qpe_kernel(phi: f64, bin: usize, n_ancilla: usize) -> f64 {
    let size = (1u64 << n_ancilla) as f64;
    let delta = (phi - bin as f64 / size).rem_euclid(1.0);
    let den = (PI * delta).sin();
    if den.abs() < 1e-15 {
        return 1.0;
    }
    let num = (PI * size * delta).sin();
    (num / (size * den)).powi(2)
}

/// Exact QPE distribution for the exact propagator, from the eigen
/// decomposition of the prepared input state.
pub fn trotter_free_distribution(system: &QpeSystem, cfg: &QpeConfig) -> Result<PhaseDistribution> {
    check_branch(system, cfg.evolution.time())?;
    let input = prepare_input_state(system, cfg.input_state)?;
    let weights: Vec<f64> = system.eigen_overlaps(&input).iter().map(|c| c.norm_sqr()).collect();
    Ok(kernel_distribution(&system.spectrum.eigenvalues, &weights, cfg.evolution.time(), cfg.n_ancilla))
}

/// `P(x) = sum_k w_k K(phi_k, x)` with `phi_k = (-E_k t / 2 pi) mod 1`.
pub fn kernel_distribution(energies: &[f64], weights: &[f64], time: f64, n_ancilla: usize) -> PhaseDistribution {
    let bins = 1usize << n_ancilla;
    let mut probs = vec![0.0; bins];
    for (&e, &w) in energies.iter().zip(weights) {
        if w < 1e-300 {
            continue;
        }
        let phi = energy_to_phase(e, time);
        for (x, p) in probs.iter_mut().enumerate() {
            *p += w * qpe_kernel(phi, x, n_ancilla);
        }
    }
    PhaseDistribution {
        n_ancilla,
        probabilities: probs,
    }
}

/// Wall time of the naive and sequential drivers on the same input.
#[derive(Debug, Clone, Copy)]
pub struct BenchRecord {
    pub n_ancilla: usize,
    pub naive: Duration,
    pub sequential: Duration,
}

impl BenchRecord {
    pub fn speedup(&self) -> f64 {
        self.naive.as_secs_f64() / self.sequential.as_secs_f64()
    }
}

/// Times both drivers, one run at a time, keeping the fastest of `repeats`.
pub fn bench_drivers<P: Propagator + ?Sized>(
    input: &Statevector,
    prop: &P,
    n_ancilla: usize,
    repeats: usize,
) -> Result<BenchRecord> {
    let mut best = (Duration::MAX, Duration::MAX);
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        std::hint::black_box(qpe_naive(input, prop, n_ancilla)?);
        best.0 = best.0.min(t.elapsed());
        let t = Instant::now();
        std::hint::black_box(qpe_sequential(input, prop, n_ancilla)?);
        best.1 = best.1.min(t.elapsed());
    }
    Ok(BenchRecord {
        n_ancilla,
        naive: best.0,
        sequential: best.1,
    })
}
