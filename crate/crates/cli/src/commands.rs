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

//! The `spectrum`, `qpe`, `ratio` and `bench` subcommands.

use crate::config::{ExperimentConfig, SystemId};
use qpefci::analysis::{
    fit_gaussian_peak_or_guess, phase_to_energy, detect_secondary_peaks, ratio_csv, size_consistency_table, Fragment,
    PeakFit, RunEnergy, RunSetting,
};
use qpefci::encoding::{order_terms, OrderingStrategy};
use qpefci::integrals::parse_fcidump;
use qpefci::qpe::{
    bench_drivers, prepare_input_state, run_qpe, Evolution, InputState, PhaseDistribution, QpeConfig, QpeSystem,
    TrotterOrder, TrotterPlan, TrotterPropagator,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// Outcome of a command: how many grid points failed.
pub struct Report {
    pub failures: usize,
}

/// Runs `f(0..n)` on up to `workers` threads; results keep job order.
fn run_pool<T: Send>(n: usize, workers: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, n.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                slots.lock().unwrap()[i] = Some(out);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|s| s.unwrap()).collect()
}

fn load_system(cfg: &ExperimentConfig, id: SystemId) -> Result<QpeSystem, String> {
    let path = cfg.fcidump(id);
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let integrals = parse_fcidump(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    QpeSystem::from_integrals(&integrals, cfg.encoding).map_err(|e| format!("{}: {e}", id.name()))
}

/// Loads each system once, in parallel.
fn load_systems(cfg: &ExperimentConfig, ids: &[SystemId]) -> Result<BTreeMap<SystemId, QpeSystem>, String> {
    let mut unique = ids.to_vec();
    unique.sort();
    unique.dedup();
    let loaded = run_pool(unique.len(), cfg.workers, |i| {
        let t = Instant::now();
        let sys = load_system(cfg, unique[i]);
        if let Ok(s) = &sys {
            eprintln!(
                "loaded {} ({} qubits, {} terms, sector {}) in {:.1}s",
                unique[i].name(),
                s.n_qubits(),
                s.hamiltonian.terms().len(),
                s.basis.len(),
                t.elapsed().as_secs_f64()
            );
        }
        sys
    });
    unique.into_iter().zip(loaded).map(|(id, s)| s.map(|s| (id, s))).collect()
}

fn write_output(cfg: &ExperimentConfig, name: &str, settings: &str, body: &str) -> Result<(), String> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| format!("{}: {e}", cfg.output_dir.display()))?;
    let path = cfg.output_dir.join(name);
    let text = format!("# settings: {settings}\n{body}");
    std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Trotter grid in configuration order, then the Trotter-free point.
fn grid(cfg: &ExperimentConfig) -> Vec<RunSetting> {
    let mut out = Vec::new();
    for &ordering in &cfg.orderings {
        for &order in &cfg.orders {
            for &m in &cfg.slices {
                out.push(RunSetting {
                    ordering,
                    order,
                    slices: Some(m),
                });
            }
        }
    }
    if cfg.include_trotter_free {
        out.push(RunSetting {
            ordering: cfg.orderings.first().copied().unwrap_or(OrderingStrategy::Magnitude),
            order: cfg.orders.first().copied().unwrap_or(TrotterOrder::First),
            slices: None,
        });
    }
    out
}

fn qpe_config(cfg: &ExperimentConfig, setting: &RunSetting, n_ancilla: usize) -> Result<QpeConfig, String> {
    let evolution = match setting.slices {
        Some(m) => Evolution::Trotter(TrotterPlan::new(setting.order, m, cfg.time, setting.ordering).map_err(|e| e.to_string())?),
        None => Evolution::TrotterFree { time: cfg.time },
    };
    Ok(QpeConfig {
        n_ancilla,
        input_state: cfg.input_state,
        evolution,
    })
}

/// Run-specific part of a file's settings line.
fn run_settings(cfg: &ExperimentConfig, system: SystemId, setting: &RunSetting, n_ancilla: usize) -> String {
    let evolution = match setting.slices {
        Some(m) => format!("ordering={} order={} M={m}", setting.ordering.name(), setting.order.as_int()),
        None => "evolution=trotter_free".to_string(),
    };
    format!(
        "system={} input_state={} {evolution} N={n_ancilla} | {}",
        system.name(),
        cfg.input_state.name(),
        cfg.settings_string()
    )
}

fn file_stem(cfg: &ExperimentConfig, system: SystemId, setting: &RunSetting, n_ancilla: usize) -> String {
    let input = cfg.input_state.name();
    match setting.slices {
        Some(m) => format!(
            "{}_{input}_{}_o{}_M{m}_N{n_ancilla}",
            system.name(),
            setting.ordering.name(),
            setting.order.as_int()
        ),
        None => format!("{}_{input}_trotter_free_N{n_ancilla}", system.name()),
    }
}

fn fit(cfg: &ExperimentConfig, d: &PhaseDistribution) -> Result<PeakFit, String> {
    fit_gaussian_peak_or_guess(d, cfg.window_halfwidth).map_err(|e| e.to_string())
}

/// Writes `spectrum_<system>.csv` for every configured system.
pub fn spectrum(cfg: &ExperimentConfig) -> Result<Report, String> {
    let systems = load_systems(cfg, &cfg.systems)?;
    for (id, sys) in &systems {
        let hf = prepare_input_state(sys, InputState::HartreeFock)
            .map(|psi| {
                let c = sys.eigen_overlaps(&psi);
                let e: f64 = c.iter().zip(&sys.spectrum.eigenvalues).map(|(c, e)| c.norm_sqr() * e).sum();
                e
            })
            .map_err(|e| e.to_string())?;
        let settings = format!("system={} | {}", id.name(), cfg.settings_string());
        write_output(cfg, &format!("spectrum_{}.csv", id.name()), &settings, &sys.spectrum.to_csv())?;
        println!(
            "{}: ground {:.10} Ha, Hartree-Fock {:.10} Ha, gap {:.6}, {} states",
            id.name(),
            sys.ground_energy(),
            hf,
            sys.spectrum.ground_gap(),
            sys.basis.len()
        );
    }
    Ok(Report { failures: 0 })
}

/// One QPE grid point: distribution, fit, secondary peaks and optional samples.
fn qpe_point(
    cfg: &ExperimentConfig,
    system: SystemId,
    sys: &QpeSystem,
    setting: &RunSetting,
) -> Result<String, String> {
    let n = cfg.ancillas(system);
    let qcfg = qpe_config(cfg, setting, n)?;
    let dist = run_qpe(sys, &qcfg, cfg.driver).map_err(|e| e.to_string())?;
    let stem = file_stem(cfg, system, setting, n);
    let settings = run_settings(cfg, system, setting, n);
    write_output(cfg, &format!("dist_{stem}.csv"), &settings, &dist.to_csv())?;
    if cfg.shots > 0 {
        let counts = dist.sample(cfg.shots, cfg.seed).map_err(|e| e.to_string())?;
        let mut body = String::from("bin,count\n");
        for (bin, c) in counts.iter().enumerate() {
            let _ = writeln!(body, "{bin},{c}");
        }
        write_output(cfg, &format!("samples_{stem}.csv"), &settings, &body)?;
    }
    let peak = fit(cfg, &dist)?;
    let energy = phase_to_energy(peak.mu, cfg.time);
    let body = format!(
        "{},converged,energy,exact_energy\n{},{},{energy:.12},{:.12}\n",
        PeakFit::csv_header(),
        peak.csv_row(),
        peak.converged,
        sys.ground_energy()
    );
    write_output(cfg, &format!("fit_{stem}.csv"), &settings, &body)?;
    let peaks = detect_secondary_peaks(&dist, &peak, cfg.peak_threshold);
    let mut body = String::from("phase,probability\n");
    for (phi, p) in &peaks {
        let _ = writeln!(body, "{phi:.12},{p:e}");
    }
    write_output(cfg, &format!("peaks_{stem}.csv"), &settings, &body)?;
    Ok(format!(
        "mu {:.6} E {energy:.8} (exact {:.8}) secondary peaks {}",
        peak.mu,
        sys.ground_energy(),
        peaks.len()
    ))
}

fn print_outcome(label: &str, outcome: &Result<String, String>, seconds: f64) {
    match outcome {
        Ok(msg) => println!("{label}: {msg} [{seconds:.1}s]"),
        Err(e) => println!("{label}: ERROR {e}"),
    }
}

/// Runs every grid point on every configured system.
pub fn qpe(cfg: &ExperimentConfig) -> Result<Report, String> {
    let systems = load_systems(cfg, &cfg.systems)?;
    let points = grid(cfg);
    let jobs: Vec<(SystemId, RunSetting)> = cfg
        .systems
        .iter()
        .flat_map(|&s| points.iter().map(move |p| (s, *p)))
        .collect();
    let outcomes = run_pool(jobs.len(), cfg.workers, |i| {
        let (system, setting) = &jobs[i];
        let t = Instant::now();
        let out = qpe_point(cfg, *system, &systems[system], setting);
        let label = format!("{} {}", system.name(), setting.label());
        print_outcome(&label, &out, t.elapsed().as_secs_f64());
        out
    });
    Ok(Report {
        failures: outcomes.iter().filter(|o| o.is_err()).count(),
    })
}

/// Size-consistency ratios per dimer basis; monomer runs use the dimer
/// ancilla count and are shared between bases.
pub fn ratio(cfg: &ExperimentConfig) -> Result<Report, String> {
    let dimers: Vec<SystemId> = cfg.systems.iter().copied().filter(SystemId::is_dimer).collect();
    if dimers.is_empty() {
        return Err("ratio needs dimer_cmo or dimer_lmo in systems".into());
    }
    let mut ids = dimers.clone();
    ids.push(SystemId::Monomer);
    let systems = load_systems(cfg, &ids)?;
    let n = cfg.dimer_n_ancilla;
    let points = grid(cfg);
    let jobs: Vec<(SystemId, RunSetting)> = ids
        .iter()
        .rev()
        .flat_map(|&s| points.iter().map(move |p| (s, *p)))
        .collect();
    let energies = run_pool(jobs.len(), cfg.workers, |i| {
        let (system, setting) = &jobs[i];
        let t = Instant::now();
        let out = qpe_config(cfg, setting, n)
            .and_then(|q| run_qpe(&systems[system], &q, cfg.driver).map_err(|e| e.to_string()))
            .and_then(|d| fit(cfg, &d))
            .map(|p| phase_to_energy(p.mu, cfg.time));
        let label = format!("{} {}", system.name(), setting.label());
        print_outcome(&label, &out.as_ref().map(|e| format!("E {e:.8}")).map_err(Clone::clone), t.elapsed().as_secs_f64());
        out
    });
    let mut failures = energies.iter().filter(|e| e.is_err()).count();
    let collect = |wanted: SystemId, fragment: Fragment| -> Vec<RunEnergy> {
        jobs.iter()
            .zip(&energies)
            .filter(|((s, _), _)| *s == wanted)
            .filter_map(|((_, setting), e)| {
                e.as_ref().ok().map(|&energy| RunEnergy {
                    fragment,
                    setting: *setting,
                    energy,
                })
            })
            .collect()
    };
    let monomer = collect(SystemId::Monomer, Fragment::Monomer);
    for dimer in dimers {
        let dimer_runs = collect(dimer, Fragment::Dimer);
        // Monomer points whose dimer partner failed are dropped before pairing.
        let mut runs: Vec<RunEnergy> = monomer
            .iter()
            .filter(|m| dimer_runs.iter().any(|d| d.setting == m.setting))
            .copied()
            .collect();
        runs.extend(dimer_runs);
        match size_consistency_table(&runs) {
            Ok(table) => {
                let basis = &dimer.name()["dimer_".len()..];
                let settings = format!("basis={basis} N={n} | {}", cfg.settings_string());
                write_output(cfg, &format!("ratio_{basis}.csv"), &settings, &ratio_csv(&table))?;
                for r in &table {
                    let norm = r.normalized_ratio.map_or("-".to_string(), |v| format!("{v:.6}"));
                    println!("ratio {basis} {}: {:.6} normalized {norm}", r.setting.label(), r.ratio);
                }
            }
            Err(e) => {
                println!("ratio {}: ERROR {e}", dimer.name());
                failures += 1;
            }
        }
    }
    Ok(Report { failures })
}

/// Naive versus sequential wall time on the monomer with a Hartree-Fock
/// input, first order, magnitude ordering, one slice.
pub fn bench(cfg: &ExperimentConfig) -> Result<Report, String> {
    let sys = load_system(cfg, SystemId::Monomer)?;
    let input = prepare_input_state(&sys, InputState::HartreeFock).map_err(|e| e.to_string())?;
    let plan = TrotterPlan::new(TrotterOrder::First, 1, cfg.time, OrderingStrategy::Magnitude).map_err(|e| e.to_string())?;
    let h = order_terms(&sys.hamiltonian, plan.ordering);
    let prop = TrotterPropagator::new(&h, &plan);
    let mut body = String::from("N,naive_seconds,sequential_seconds,speedup\n");
    for &n in &cfg.bench_ancillas {
        let r = bench_drivers(&input, &prop, n, cfg.bench_repeats).map_err(|e| e.to_string())?;
        let _ = writeln!(
            body,
            "{n},{:.6},{:.6},{:.3}",
            r.naive.as_secs_f64(),
            r.sequential.as_secs_f64(),
            r.speedup()
        );
        println!(
            "N={n}: naive {:.4}s sequential {:.4}s speedup {:.2}",
            r.naive.as_secs_f64(),
            r.sequential.as_secs_f64(),
            r.speedup()
        );
    }
    let settings = format!(
        "system=monomer input_state=hf ordering=magnitude order=1 M=1 repeats={} | {}",
        cfg.bench_repeats,
        cfg.settings_string()
    );
    write_output(cfg, "bench.csv", &settings, &body)?;
    Ok(Report { failures: 0 })
}

