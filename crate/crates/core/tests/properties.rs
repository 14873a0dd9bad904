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

//! Property-based invariants across the crate.

mod common;

use common::*;
use proptest::prelude::*;
use qpefci::analysis::{fit_gaussian_peak, phase_to_energy};
use qpefci::encoding::*;
use qpefci::integrals::{parse_fcidump, SpatialIntegrals};
use qpefci::pauli::PauliString;
use qpefci::qpe::*;
use qpefci::statevector::Statevector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>()).prop_map(move |(x, z)| PauliString::new(x & mask, z & mask))
}

/// Random real integrals with full 8-fold symmetry.
fn random_integrals(l: usize, seed: u64) -> SpatialIntegrals {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = vec![0.0; l * l];
    for p in 0..l {
        for q in 0..=p {
            let v = rng.gen_range(-1.0..1.0);
            h[p * l + q] = v;
            h[q * l + p] = v;
        }
    }
    let idx = |p: usize, q: usize, r: usize, s: usize| ((p * l + q) * l + r) * l + s;
    let mut g = vec![0.0; l * l * l * l];
    for p in 0..l {
        for q in 0..l {
            for r in 0..l {
                for s in 0..l {
                    if g[idx(p, q, r, s)] != 0.0 {
                        continue;
                    }
                    let v = rng.gen_range(-1.0..1.0);
                    for (a, b, c, d) in [(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r), (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)] {
                        g[idx(a, b, c, d)] = v;
                    }
                }
            }
        }
    }
    SpatialIntegrals::new(l, l, h, g, rng.gen_range(-1.0..1.0)).unwrap()
}

/// FCIDUMP text listing every unique integral once, each under a randomly
/// chosen equivalent index order.
fn write_fcidump(s: &SpatialIntegrals, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = s.n_orbitals();
    let mut out = format!("&FCI NORB={l},NELEC={},MS2=0,\n ORBSYM={}\n ISYM=1,\n&END\n", s.n_electrons(), "1,".repeat(l));
    for p in 0..l {
        for q in 0..=p {
            for r in 0..l {
                for t in 0..=r {
                    if p * l + q < r * l + t {
                        continue;
                    }
                    let forms = [(p, q, r, t), (q, p, r, t), (p, q, t, r), (r, t, p, q), (t, r, q, p)];
                    let (a, b, c, d) = forms[rng.gen_range(0..forms.len())];
                    out += &format!("{:e} {} {} {} {}\n", s.g(a, b, c, d), a + 1, b + 1, c + 1, d + 1);
                }
            }
        }
    }
    for p in 0..l {
        for q in 0..=p {
            let (a, b) = if rng.gen_bool(0.5) { (p, q) } else { (q, p) };
            out += &format!("{:e} {} {} 0 0\n", s.h(a, b), a + 1, b + 1);
        }
    }
    out + &format!("{:e} 0 0 0 0\n", s.core_energy())
}

fn terms_key(h: &QubitHamiltonian) -> Vec<(u64, u64, u64)> {
    let mut v: Vec<_> = h.terms().iter().map(|t| (t.x_mask(), t.z_mask(), t.coefficient.to_bits())).collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_product_is_associative(a in pauli(5), b in pauli(5), c in pauli(5)) {
        let (p1, ab) = a.mul(&b);
        let (p2, ab_c) = ab.mul(&c);
        let (p3, bc) = b.mul(&c);
        let (p4, a_bc) = a.mul(&bc);
        prop_assert_eq!(ab_c, a_bc);
        prop_assert!((p1 * p2 - p3 * p4).norm() < 1e-15);
        let (sq, id) = a.mul(&a);
        prop_assert!(id.is_identity() && (sq.re - 1.0).abs() < 1e-15 && sq.im == 0.0);
        prop_assert_eq!(a.commutes_with(&b), b.commutes_with(&a));
    }

    #[test]
    fn rotations_preserve_norm_and_invert(p in pauli(4), theta in -7.0f64..7.0, seed in any::<u64>()) {
        prop_assume!(!p.is_identity());
        let psi = random_state(4, seed);
        let mut sv = Statevector::from_amplitudes(4, psi.clone()).unwrap();
        sv.apply_pauli_rotation(p, theta).unwrap();
        prop_assert!((sv.norm() - 1.0).abs() < 1e-10);
        sv.apply_pauli_rotation(p, -theta).unwrap();
        prop_assert!(max_abs_diff(sv.amplitudes(), &psi) < 1e-12);
    }

    #[test]
    fn controlled_rotation_fixes_control_zero(p in pauli(4), control in 0usize..5, theta in -3.0f64..3.0, seed in any::<u64>()) {
        prop_assume!(!p.is_identity() && (p.support() >> control) & 1 == 0);
        let psi = random_state(5, seed);
        let mut sv = Statevector::from_amplitudes(5, psi.clone()).unwrap();
        sv.apply_controlled_pauli_rotation(control, p, theta).unwrap();
        for (i, (a, b)) in sv.amplitudes().iter().zip(&psi).enumerate() {
            if (i >> control) & 1 == 0 {
                prop_assert_eq!(a, b);
            }
        }
        prop_assert!((sv.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bit_maps_round_trip(b in any::<u64>(), n in 2usize..16) {
        let b = b & ((1u64 << n) - 1);
        prop_assert_eq!(unparity_bits(parity_bits(b, n), n), b);
        let removed = tapered_qubits(n / 2);
        let kept = b & !removed.iter().fold(0u64, |m, &q| m | 1 << q);
        prop_assert_eq!(insert_bits(delete_bits(kept, &removed), &removed), kept);
    }

    #[test]
    fn hamiltonian_transforms_round_trip(seed in any::<u64>()) {
        let h = random_hamiltonian(5, 12, seed);
        prop_assert_eq!(terms_key(&from_parity(&to_parity(&h))), terms_key(&h));
        for strategy in [OrderingStrategy::Magnitude, OrderingStrategy::Lexicographic] {
            let o = order_terms(&h, strategy);
            prop_assert_eq!(terms_key(&o), terms_key(&h));
            prop_assert_eq!(terms_key(&order_terms(&o, strategy)), terms_key(&o));
        }
        let back = QubitHamiltonian::from_text(&h.to_text()).unwrap();
        prop_assert_eq!(back.n_qubits(), h.n_qubits());
        for (a, b) in back.terms().iter().zip(h.terms()) {
            prop_assert_eq!(a.pauli, b.pauli);
            prop_assert!((a.coefficient - b.coefficient).abs() < 1e-12);
        }
    }

    #[test]
    fn fcidump_symmetry_forms_parse_identically(l in 1usize..5, seed in any::<u64>()) {
        let s = random_integrals(l, seed);
        let parsed = parse_fcidump(&write_fcidump(&s, seed ^ 0x5a5a)).unwrap();
        prop_assert_eq!(parsed.core_energy(), s.core_energy());
        for p in 0..l {
            for q in 0..l {
                prop_assert_eq!(parsed.h(p, q), s.h(p, q));
                for r in 0..l {
                    for t in 0..l {
                        prop_assert_eq!(parsed.g(p, q, r, t), s.g(p, q, r, t));
                    }
                }
            }
        }
    }

    #[test]
    fn phase_energy_round_trip(e in -6.28f64..0.0, t in 0.2f64..1.0) {
        let e = e / t;
        prop_assert!((phase_to_energy(energy_to_phase(e, t), t) - e).abs() < 1e-12);
    }

    #[test]
    fn fit_is_translation_covariant(phi in 0.0f64..1.0, shift in 0usize..256, sigma_bins in 0.8f64..2.5) {
        let n = 8;
        let size = 256usize;
        let sigma = sigma_bins / size as f64;
        let probs: Vec<f64> = (0..size)
            .map(|x| {
                let mut d = x as f64 / size as f64 - phi;
                d -= d.round();
                (-d * d / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let shifted: Vec<f64> = (0..size).map(|x| probs[(x + size - shift) % size]).collect();
        let a = fit_gaussian_peak(&PhaseDistribution::new(n, probs).unwrap(), 3).unwrap();
        let b = fit_gaussian_peak(&PhaseDistribution::new(n, shifted).unwrap(), 3).unwrap();
        let mut moved = b.mu - a.mu - shift as f64 / size as f64;
        moved -= moved.round();
        prop_assert!(moved.abs() < 1e-9, "{}", moved);
    }

    #[test]
    fn sequential_matches_naive(seed in any::<u64>(), n_sys in 1usize..4, n_anc in 1usize..5, second in any::<bool>()) {
        let h = random_hamiltonian(n_sys, 5, seed);
        let order = if second { TrotterOrder::Second } else { TrotterOrder::First };
        let plan = TrotterPlan::new(order, 2, 1.0, OrderingStrategy::Lexicographic).unwrap();
        let prop = TrotterPropagator::new(&order_terms(&h, OrderingStrategy::Lexicographic), &plan);
        let input = Statevector::from_amplitudes(n_sys, random_state(n_sys, seed ^ 7)).unwrap();
        let a = qpe_naive(&input, &prop, n_anc).unwrap();
        let b = qpe_sequential(&input, &prop, n_anc).unwrap();
        prop_assert!(a.max_abs_difference(&b) < 1e-12);
        prop_assert!((a.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_distribution_is_normalized(phis in prop::collection::vec(-6.0f64..0.0, 1..5), n in 1usize..9) {
        let w = vec![1.0 / phis.len() as f64; phis.len()];
        let d = kernel_distribution(&phis, &w, 1.0, n);
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn phase_just_below_a_full_turn() {
    assert!((energy_to_phase(-2.0 * PI + 1e-9, 1.0) - (1.0 - 1e-9 / (2.0 * PI))).abs() < 1e-12);
}
