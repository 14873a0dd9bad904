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

//! Peak fitting and ratio bookkeeping on monomer distributions.

mod common;

use common::*;
use qpefci::analysis::*;
use qpefci::encoding::OrderingStrategy;
use qpefci::oracle::Encoding;
use qpefci::qpe::*;
use std::f64::consts::PI;

fn monomer() -> QpeSystem {
    QpeSystem::from_integrals(&fixture("h4.fcidump"), Encoding::TaperedParity).unwrap()
}

fn trotter_free(n: usize, input: InputState) -> QpeConfig {
    QpeConfig {
        n_ancilla: n,
        input_state: input,
        evolution: Evolution::TrotterFree { time: 1.0 },
    }
}

#[test]
fn trotter_free_monomer_fit_within_one_bin() {
    let system = monomer();
    let d = trotter_free_distribution(&system, &trotter_free(10, InputState::FullCi)).unwrap();
    let fit = fit_gaussian_peak(&d, DEFAULT_WINDOW_HALFWIDTH).unwrap();
    let exact = energy_to_phase(system.ground_energy(), 1.0);
    assert!((fit.mu - exact).abs() < 1.0 / 1024.0);
    let e = phase_to_energy(fit.mu, 1.0);
    assert!((e - system.ground_energy()).abs() < 2.0 * PI / 1024.0 + 1e-3);
    assert!(fit.sigma > 0.0 && fit.rss.is_finite());
    assert!(fit.window_contains(d.argmax(), 1024));
}

#[test]
fn on_grid_eigenphase_has_no_side_peaks() {
    // rescale time so the ground phase sits exactly on bin 300 of 1024
    let system = monomer();
    let time = -2.0 * PI * 300.0 / 1024.0 / system.ground_energy();
    let cfg = QpeConfig {
        evolution: Evolution::TrotterFree { time },
        ..trotter_free(10, InputState::FullCi)
    };
    let d = trotter_free_distribution(&system, &cfg).unwrap();
    assert!((d.probabilities()[300] - 1.0).abs() < 1e-9);
    let fit = fit_gaussian_peak(&d, 3).unwrap();
    assert!((fit.mu - 300.0 / 1024.0).abs() < 1e-9);
    assert!(detect_secondary_peaks(&d, &fit, DEFAULT_PEAK_THRESHOLD).is_empty());
}

#[test]
fn two_state_superposition_gives_two_peaks() {
    let system = monomer();
    let e = &system.spectrum.eigenvalues;
    let weights: Vec<f64> = (0..e.len()).map(|k| if k == 0 || k == 5 { 0.5 } else { 0.0 }).collect();
    let d = kernel_distribution(e, &weights, 1.0, 10);
    let fit = fit_gaussian_peak_or_guess(&d, 3).unwrap();
    let peaks = detect_secondary_peaks(&d, &fit, DEFAULT_PEAK_THRESHOLD);
    assert!(!peaks.is_empty());
    let phases = [energy_to_phase(e[0], 1.0), energy_to_phase(e[5], 1.0)];
    let other = if (fit.mu - phases[0]).abs() < 2.0 / 1024.0 { phases[1] } else { phases[0] };
    assert!((peaks[0].0 - other).abs() < 2.0 / 1024.0);
}

#[test]
fn hartree_fock_input_still_peaks_at_the_ground_state() {
    let system = monomer();
    let d = trotter_free_distribution(&system, &trotter_free(10, InputState::HartreeFock)).unwrap();
    let fit = fit_gaussian_peak(&d, 3).unwrap();
    assert!((phase_to_energy(fit.mu, 1.0) - system.ground_energy()).abs() < 2.0 * PI / 1024.0 + 1e-3);
}

#[test]
fn ratio_table_is_deterministic() {
    let system = monomer();
    let mut runs = Vec::new();
    for m in [None, Some(1), Some(2)] {
        let setting = RunSetting {
            ordering: OrderingStrategy::Magnitude,
            order: TrotterOrder::Second,
            slices: m,
        };
        let evolution = match m {
            None => Evolution::TrotterFree { time: 1.0 },
            Some(m) => Evolution::Trotter(TrotterPlan::new(TrotterOrder::Second, m, 1.0, OrderingStrategy::Magnitude).unwrap()),
        };
        let cfg = QpeConfig { evolution, ..trotter_free(6, InputState::FullCi) };
        let d = run_qpe(&system, &cfg, Driver::Sequential).unwrap();
        let energy = phase_to_energy(fit_gaussian_peak_or_guess(&d, 3).unwrap().mu, 1.0);
        for fragment in [Fragment::Monomer, Fragment::Dimer] {
            let scale = if fragment == Fragment::Dimer { 2.0 } else { 1.0 };
            runs.push(RunEnergy { fragment, setting, energy: scale * energy });
        }
    }
    let a = ratio_csv(&size_consistency_table(&runs).unwrap());
    let b = ratio_csv(&size_consistency_table(&runs).unwrap());
    assert_eq!(a, b);
    let table = size_consistency_table(&runs).unwrap();
    assert_eq!(table.len(), 3);
    assert!(table.iter().all(|r| r.ratio == 2.0 && r.normalized_ratio == Some(1.0)));
    assert!(a.lines().any(|l| l.starts_with("magnitude,2,inf,")));
}
