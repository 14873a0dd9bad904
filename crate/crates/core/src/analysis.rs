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

//! Peak fitting and size-consistency bookkeeping on phase distributions.

use crate::encoding::OrderingStrategy;
use crate::error::{Error, Result};
use crate::qpe::{PhaseDistribution, TrotterOrder};
use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;
use std::fmt::Write as _;

pub const DEFAULT_WINDOW_HALFWIDTH: usize = 3;
pub const DEFAULT_PEAK_THRESHOLD: f64 = 0.01;
const MAX_ITERATIONS: usize = 200;
const STEP_TOL: f64 = 1e-12;
const GRADIENT_TOL: f64 = 1e-15;

/// Gaussian `A exp(-(phi - mu)^2 / (2 sigma^2))` fitted around the highest bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakFit {
    /// Center phase in `[0, 1)`.
    pub mu: f64,
    /// Width in phase units.
    pub sigma: f64,
    pub amplitude: f64,
    /// First and last bin of the window (circular, so `lo > hi` on wrap).
    pub window: (usize, usize),
    pub rss: f64,
    /// False when the values are the initial guess kept after a failed fit.
    pub converged: bool,
}

impl PeakFit {
    pub fn csv_header() -> &'static str {
        "mu,sigma,amplitude,rss,window_lo,window_hi"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.12},{:e},{:e},{:e},{},{}",
            self.mu, self.sigma, self.amplitude, self.rss, self.window.0, self.window.1
        )
    }

    /// Whether `bin` lies inside the (circular) window.
    pub fn window_contains(&self, bin: usize, n_bins: usize) -> bool {
        let (lo, hi) = self.window;
        let width = (hi + n_bins - lo) % n_bins;
        (bin + n_bins - lo) % n_bins <= width
    }
}

fn model(p: &Vector3<f64>, x: f64) -> (f64, Vector3<f64>) {
    let (a, m, s) = (p[0], p[1], p[2]);
    let d = x - m;
    let e = (-d * d / (2.0 * s * s)).exp();
    (a * e, Vector3::new(e, a * e * d / (s * s), a * e * d * d / (s * s * s)))
}

fn rss(p: &Vector3<f64>, xs: &[f64], ys: &[f64]) -> f64 {
    if !(p[2] > 0.0) {
        return f64::INFINITY;
    }
    xs.iter().zip(ys).map(|(&x, &y)| (y - model(p, x).0).powi(2)).sum()
}

/// Levenberg-Marquardt least squares on `(A, mu, sigma)` in bin units.
/// Returns the parameters and whether the step tolerance was reached.
fn levenberg_marquardt(xs: &[f64], ys: &[f64], start: Vector3<f64>) -> (Vector3<f64>, bool) {
    let mut p = start;
    let mut cost = rss(&p, xs, ys);
    let mut lambda = 1e-3;
    for _ in 0..MAX_ITERATIONS {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (&x, &y) in xs.iter().zip(ys) {
            let (f, g) = model(&p, x);
            jtj += g * g.transpose();
            jtr += g * (y - f);
        }
        if jtr.amax() < GRADIENT_TOL {
            return (p, true);
        }
        loop {
            let mut damped = jtj;
            for k in 0..3 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-30);
            }
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                if lambda > 1e30 {
                    return (p, false);
                }
                continue;
            };
            let trial = p + step;
            let trial_cost = rss(&trial, xs, ys);
            if trial_cost <= cost {
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-15);
                if step.amax() < STEP_TOL {
                    return (p, true);
                }
                break;
            }
            if step.amax() < STEP_TOL {
                return (p, true);
            }
            lambda *= 10.0;
            if lambda > 1e30 {
                return (p, true);
            }
        }
    }
    (p, false)
}

/// Fits a Gaussian to the `2*halfwidth+1` bins around the maximum, unwrapping
/// phases across `phi = 1`. Initial guess: `A` = max probability, `mu` = max
/// bin, `sigma` = one bin.
pub fn fit_gaussian_peak(d: &PhaseDistribution, window_halfwidth: usize) -> Result<PeakFit> {
    let n = d.n_bins();
    let hw = window_halfwidth;
    if 2 * hw + 1 > n {
        return Err(Error::Fit(format!("window of {} bins exceeds {n} bins", 2 * hw + 1)));
    }
    let probs = d.probabilities();
    let top = d.argmax();
    let peak = probs[top];
    if probs.iter().enumerate().any(|(i, &p)| i != top && p == peak) {
        return Err(Error::NoPeak);
    }
    let bins: Vec<usize> = (0..=2 * hw).map(|k| (top + n + k - hw) % n).collect();
    let xs: Vec<f64> = (0..=2 * hw).map(|k| k as f64 - hw as f64).collect();
    let ys: Vec<f64> = bins.iter().map(|&b| probs[b]).collect();
    let window = (bins[0], bins[2 * hw]);
    let size = n as f64;

    let (p, converged) = levenberg_marquardt(&xs, &ys, Vector3::new(peak, 0.0, 1.0));
    let valid = p.iter().all(|v| v.is_finite()) && p[2] > 0.0 && p[1].abs() <= hw as f64 + 0.5;
    if !converged || !valid {
        return Err(Error::Fit(format!(
            "no convergence from A={peak}, mu=bin {top} (reached A={}, mu={}, sigma={})",
            p[0], p[1], p[2]
        )));
    }
    Ok(PeakFit {
        mu: ((top as f64 + p[1]) / size).rem_euclid(1.0),
        sigma: p[2] / size,
        amplitude: p[0],
        window,
        rss: rss(&p, &xs, &ys),
        converged: true,
    })
}

/// Like [`fit_gaussian_peak`], but a failed fit degrades to the initial guess
/// with `converged = false` instead of an error.
pub fn fit_gaussian_peak_or_guess(d: &PhaseDistribution, window_halfwidth: usize) -> Result<PeakFit> {
    match fit_gaussian_peak(d, window_halfwidth) {
        Err(Error::Fit(_)) => {
            let n = d.n_bins();
            let top = d.argmax();
            let hw = window_halfwidth.min((n - 1) / 2);
            Ok(PeakFit {
                mu: d.phase(top),
                sigma: 1.0 / n as f64,
                amplitude: d.probabilities()[top],
                window: ((top + n - hw) % n, (top + hw) % n),
                rss: f64::NAN,
                converged: false,
            })
        }
        other => other,
    }
}

/// `E = -2 pi mu / t`.
pub fn phase_to_energy(mu: f64, time: f64) -> f64 {
    -2.0 * PI * mu / time
}

/// Local maxima outside the primary window with probability at least
/// `threshold`, as `(phase, probability)` sorted by descending probability.
pub fn detect_secondary_peaks(d: &PhaseDistribution, primary: &PeakFit, threshold: f64) -> Vec<(f64, f64)> {
    let n = d.n_bins();
    let p = d.probabilities();
    let mut peaks: Vec<(f64, f64)> = (0..n)
        .filter(|&i| !primary.window_contains(i, n))
        .filter(|&i| {
            let (left, right) = (p[(i + n - 1) % n], p[(i + 1) % n]);
            p[i] >= threshold && p[i] >= left && p[i] > right
        })
        .map(|i| (d.phase(i), p[i]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks
}

/// Grid coordinates shared by a monomer run and its dimer companion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunSetting {
    pub ordering: OrderingStrategy,
    pub order: TrotterOrder,
    /// `None` for Trotter-free evolution.
    pub slices: Option<usize>,
}

impl RunSetting {
    pub fn label(&self) -> String {
        let m = self.slices.map_or("inf".to_string(), |m| m.to_string());
        format!("{},{},{}", self.ordering.name(), self.order.as_int(), m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    Monomer,
    Dimer,
}

/// A fitted energy from one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunEnergy {
    pub fragment: Fragment,
    pub setting: RunSetting,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRecord {
    pub setting: RunSetting,
    pub e_monomer: f64,
    pub e_dimer: f64,
    pub ratio: f64,
    /// `ratio / ratio_trotter_free`, when a Trotter-free companion exists.
    pub normalized_ratio: Option<f64>,
}

/// Pairs monomer and dimer runs per setting and normalizes each ratio by the
/// Trotter-free ratio of the same ordering and order (or, failing that, any
/// Trotter-free ratio). Rows follow the order of the dimer runs.
pub fn size_consistency_table(runs: &[RunEnergy]) -> Result<Vec<RatioRecord>> {
    let find = |frag: Fragment, s: &RunSetting| runs.iter().find(|r| r.fragment == frag && r.setting == *s);
    let mut records = Vec::new();
    for r in runs {
        let partner = match r.fragment {
            Fragment::Dimer => find(Fragment::Monomer, &r.setting),
            Fragment::Monomer => {
                if find(Fragment::Dimer, &r.setting).is_none() {
                    return Err(Error::Pairing(format!("monomer run {}", r.setting.label())));
                }
                continue;
            }
        };
        let m = partner.ok_or_else(|| Error::Pairing(format!("dimer run {}", r.setting.label())))?;
        records.push(RatioRecord {
            setting: r.setting,
            e_monomer: m.energy,
            e_dimer: r.energy,
            ratio: r.energy / m.energy,
            normalized_ratio: None,
        });
    }
    let reference: Vec<RatioRecord> = records.iter().filter(|r| r.setting.slices.is_none()).copied().collect();
    for rec in records.iter_mut() {
        let exact = reference
            .iter()
            .find(|f| f.setting.ordering == rec.setting.ordering && f.setting.order == rec.setting.order)
            .or(reference.first());
        rec.normalized_ratio = exact.map(|f| rec.ratio / f.ratio);
    }
    Ok(records)
}

/// Ratio table CSV; Trotter-free rows carry `M = inf`.
pub fn ratio_csv(records: &[RatioRecord]) -> String {
    let mut out = String::from("ordering,trotter_order,M,E_monomer,E_dimer,ratio,normalized_ratio\n");
    for r in records {
        let norm = r.normalized_ratio.map_or(String::new(), |v| format!("{v:.12}"));
        let _ = writeln!(
            out,
            "{},{:.12},{:.12},{:.12},{}",
            r.setting.label(),
            r.e_monomer,
            r.e_dimer,
            r.ratio,
            norm
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n_ancilla: usize, a: f64, mu: f64, sigma: f64) -> PhaseDistribution {
        let n = 1usize << n_ancilla;
        let probs = (0..n)
            .map(|x| {
                let mut d = x as f64 / n as f64 - mu;
                d -= d.round();
                a * (-d * d / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        PhaseDistribution::new(n_ancilla, probs).unwrap()
    }

    #[test]
    fn single_bin_peak() {
        let mut p = vec![0.0; 1024];
        p[317] = 1.0;
        let d = PhaseDistribution::new(10, p).unwrap();
        let fit = fit_gaussian_peak(&d, 3).unwrap();
        assert!((fit.mu - 317.0 / 1024.0).abs() < 1e-9);
        assert_eq!(fit.window, (314, 320));
    }

    #[test]
    fn synthetic_gaussian() {
        let (a, mu, sigma) = (0.4, 0.61803, 1.7 / 1024.0);
        let fit = fit_gaussian_peak(&gaussian(10, a, mu, sigma), 3).unwrap();
        assert!((fit.amplitude - a).abs() < 1e-6);
        assert!((fit.mu - mu).abs() < 1e-6);
        assert!((fit.sigma - sigma).abs() < 1e-6);
        assert!(fit.rss < 1e-20);
    }

    #[test]
    fn wrapping_window() {
        let fit = fit_gaussian_peak(&gaussian(10, 0.3, 0.9995, 1.2 / 1024.0), 3).unwrap();
        assert!((fit.mu - 0.9995).abs() < 1e-9);
        assert_eq!(fit.window, (1020, 2));
        assert!(fit.window_contains(0, 1024) && fit.window_contains(1023, 1024));
        assert!(!fit.window_contains(3, 1024));
    }

    #[test]
    fn flat_distribution() {
        let d = PhaseDistribution::new(4, vec![1.0 / 16.0; 16]).unwrap();
        assert_eq!(fit_gaussian_peak(&d, 3), Err(Error::NoPeak));
    }

    #[test]
    fn energy_conversion() {
        assert_eq!(phase_to_energy(0.0, 1.0), 0.0);
        assert!((phase_to_energy(0.25, 1.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_peaks() {
        let mut p = vec![0.0; 64];
        p[10] = 0.5;
        p[40] = 0.45;
        p[41] = 0.05;
        let d = PhaseDistribution::new(6, p).unwrap();
        let fit = fit_gaussian_peak_or_guess(&d, 2).unwrap();
        let peaks = detect_secondary_peaks(&d, &fit, DEFAULT_PEAK_THRESHOLD);
        assert_eq!(peaks, vec![(40.0 / 64.0, 0.45)]);
    }

    fn setting(m: Option<usize>) -> RunSetting {
        RunSetting {
            ordering: OrderingStrategy::Magnitude,
            order: TrotterOrder::Second,
            slices: m,
        }
    }

    #[test]
    fn ratios() {
        let runs = [
            RunEnergy { fragment: Fragment::Monomer, setting: setting(None), energy: -2.0 },
            RunEnergy { fragment: Fragment::Dimer, setting: setting(None), energy: -4.02 },
            RunEnergy { fragment: Fragment::Monomer, setting: setting(Some(1)), energy: -2.0 },
            RunEnergy { fragment: Fragment::Dimer, setting: setting(Some(1)), energy: -4.0 },
        ];
        let t = size_consistency_table(&runs).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].normalized_ratio, Some(1.0));
        assert_eq!(t[1].ratio, 2.0);
        assert!((t[1].normalized_ratio.unwrap() - 2.0 / 2.01).abs() < 1e-15);
        let csv = ratio_csv(&t);
        assert!(csv.lines().nth(1).unwrap().starts_with("magnitude,2,inf,"));
        assert!(matches!(size_consistency_table(&runs[1..]), Err(Error::Pairing(_))));
        assert!(matches!(size_consistency_table(&runs[..3]), Err(Error::Pairing(_))));
    }
}
