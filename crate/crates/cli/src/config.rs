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

//! Plain-text `key = value` experiment configuration.

use qpefci::encoding::OrderingStrategy;
use qpefci::oracle::Encoding;
use qpefci::qpe::{Driver, InputState, TrotterOrder};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// One of the three fixture systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemId {
    Monomer,
    DimerCmo,
    DimerLmo,
}

impl SystemId {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Monomer => "monomer",
            Self::DimerCmo => "dimer_cmo",
            Self::DimerLmo => "dimer_lmo",
        }
    }

    pub fn is_dimer(&self) -> bool {
        *self != Self::Monomer
    }
}

impl FromStr for SystemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "monomer" => Ok(Self::Monomer),
            "dimer_cmo" => Ok(Self::DimerCmo),
            "dimer_lmo" => Ok(Self::DimerLmo),
            other => Err(format!("unknown system {other:?} (monomer, dimer_cmo, dimer_lmo)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub monomer_fcidump: PathBuf,
    pub dimer_fcidump_cmo: PathBuf,
    pub dimer_fcidump_lmo: PathBuf,
    pub systems: Vec<SystemId>,
    pub encoding: Encoding,
    pub time: f64,
    pub n_ancilla: usize,
    pub dimer_n_ancilla: usize,
    pub input_state: InputState,
    pub orderings: Vec<OrderingStrategy>,
    pub orders: Vec<TrotterOrder>,
    pub slices: Vec<usize>,
    pub include_trotter_free: bool,
    pub driver: Driver,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub shots: usize,
    pub window_halfwidth: usize,
    pub peak_threshold: f64,
    pub bench_ancillas: Vec<usize>,
    pub bench_repeats: usize,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            monomer_fcidump: "fixtures/h4.fcidump".into(),
            dimer_fcidump_cmo: "fixtures/h8_cmo.fcidump".into(),
            dimer_fcidump_lmo: "fixtures/h8_lmo.fcidump".into(),
            systems: vec![SystemId::Monomer, SystemId::DimerCmo, SystemId::DimerLmo],
            encoding: Encoding::TaperedParity,
            time: 1.0,
            n_ancilla: 10,
            dimer_n_ancilla: 8,
            input_state: InputState::FullCi,
            orderings: vec![OrderingStrategy::Magnitude, OrderingStrategy::Lexicographic],
            orders: vec![TrotterOrder::First, TrotterOrder::Second],
            slices: vec![1, 2, 5, 10],
            include_trotter_free: true,
            driver: Driver::Sequential,
            output_dir: "out".into(),
            seed: 0,
            shots: 0,
            window_halfwidth: 3,
            peak_threshold: 0.01,
            bench_ancillas: vec![4, 6, 8],
            bench_repeats: 3,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

fn list<T: FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

fn scalar<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("{value:?}: {e}"))
}

fn boolean(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("{other:?} is not a boolean")),
    }
}

fn order(value: &str) -> Result<TrotterOrder, String> {
    scalar::<u8>(value).and_then(|k| TrotterOrder::from_int(k).ok_or_else(|| format!("Trotter order {k} (1 or 2)")))
}

fn joined<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Reads `key = value` lines; `#` starts a comment. Relative paths are
    /// taken relative to the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), i + 1))?;
            cfg.set(key.trim(), value.trim(), Some(base))
                .map_err(|e| format!("{}:{}: {e}", path.display(), i + 1))?;
        }
        Ok(cfg)
    }

    /// Applies one `key=value` override. Relative paths are joined to `base`
    /// when given.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<(), String> {
        let path = |v: &str| {
            let p = PathBuf::from(v);
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        };
        match key {
            "monomer_fcidump" => self.monomer_fcidump = path(value),
            "dimer_fcidump_cmo" => self.dimer_fcidump_cmo = path(value),
            "dimer_fcidump_lmo" => self.dimer_fcidump_lmo = path(value),
            "output_dir" => self.output_dir = path(value),
            "systems" => self.systems = list(value)?,
            "encoding" => {
                self.encoding = match value {
                    "jw" => Encoding::JordanWigner,
                    "jw_tapered" => Encoding::TaperedParity,
                    other => return Err(format!("encoding {other:?} (jw or jw_tapered)")),
                }
            }
            "t" => self.time = scalar(value)?,
            "n_ancilla" => self.n_ancilla = scalar(value)?,
            "dimer_n_ancilla" => self.dimer_n_ancilla = scalar(value)?,
            "input_state" => self.input_state = scalar(value)?,
            "orderings" => self.orderings = list(value)?,
            "orders" => {
                self.orders = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(order)
                    .collect::<Result<_, _>>()?
            }
            "slices" => self.slices = list(value)?,
            "include_trotter_free" => self.include_trotter_free = boolean(value)?,
            "driver" => self.driver = scalar(value)?,
            "seed" => self.seed = scalar(value)?,
            "shots" => self.shots = scalar(value)?,
            "window_halfwidth" => self.window_halfwidth = scalar(value)?,
            "peak_threshold" => self.peak_threshold = scalar(value)?,
            "bench_ancillas" => self.bench_ancillas = list(value)?,
            "bench_repeats" => self.bench_repeats = scalar(value)?,
            "workers" => self.workers = scalar(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Rejects empty grids and meaningless values.
    pub fn validate(&self) -> Result<(), String> {
        if self.systems.is_empty() {
            return Err("no systems selected".into());
        }
        let trotter_points = self.orderings.len() * self.orders.len() * self.slices.len();
        if trotter_points == 0 && !self.include_trotter_free {
            return Err("empty grid: orderings, orders and slices must be non-empty, or include_trotter_free set".into());
        }
        if self.slices.contains(&0) {
            return Err("slices must be positive".into());
        }
        if !(self.time > 0.0) {
            return Err(format!("t = {} must be positive", self.time));
        }
        if self.workers == 0 {
            return Err("workers must be positive".into());
        }
        Ok(())
    }

    pub fn fcidump(&self, system: SystemId) -> &Path {
        match system {
            SystemId::Monomer => &self.monomer_fcidump,
            SystemId::DimerCmo => &self.dimer_fcidump_cmo,
            SystemId::DimerLmo => &self.dimer_fcidump_lmo,
        }
    }

    pub fn ancillas(&self, system: SystemId) -> usize {
        if system.is_dimer() {
            self.dimer_n_ancilla
        } else {
            self.n_ancilla
        }
    }

    /// Every setting as `key=value`, in a fixed order.
    pub fn settings_string(&self) -> String {
        let encoding = match self.encoding {
            Encoding::JordanWigner => "jw",
            _ => "jw_tapered",
        };
        [
            format!("monomer_fcidump={}", self.monomer_fcidump.display()),
            format!("dimer_fcidump_cmo={}", self.dimer_fcidump_cmo.display()),
            format!("dimer_fcidump_lmo={}", self.dimer_fcidump_lmo.display()),
            format!("systems={}", joined(&self.systems, |s| s.name().into())),
            format!("encoding={encoding}"),
            format!("t={}", self.time),
            format!("n_ancilla={}", self.n_ancilla),
            format!("dimer_n_ancilla={}", self.dimer_n_ancilla),
            format!("input_state={}", self.input_state.name()),
            format!("orderings={}", joined(&self.orderings, |o| o.name().into())),
            format!("orders={}", joined(&self.orders, |o| o.as_int().to_string())),
            format!("slices={}", joined(&self.slices, |m| m.to_string())),
            format!("include_trotter_free={}", self.include_trotter_free),
            format!("driver={}", self.driver.name()),
            format!("seed={}", self.seed),
            format!("shots={}", self.shots),
            format!("window_halfwidth={}", self.window_halfwidth),
            format!("peak_threshold={}", self.peak_threshold),
        ]
        .join(" ")
    }
}
