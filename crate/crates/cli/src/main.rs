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

//! Command-line driver for the QPE size-consistency experiments.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qpefci", version, about = "Trotterized QPE on FCIDUMP Hamiltonians")]
struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Ancilla count for monomer and dimer runs alike.
    #[arg(long, global = true)]
    ancilla: Option<usize>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact sector spectra of the configured systems.
    Spectrum,
    /// Phase distributions, peak fits and secondary peaks over the grid.
    Qpe,
    /// Dimer-to-monomer energy ratios over the grid.
    Ratio,
    /// Naive versus sequential driver timings.
    Bench,
    /// Print the effective configuration.
    Config,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    for item in &cli.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("--set {item:?}: expected KEY=VALUE"))?;
        cfg.set(key.trim(), value.trim(), None).map_err(|e| format!("--set {item:?}: {e}"))?;
    }
    if let Some(n) = cli.ancilla {
        cfg.n_ancilla = n;
        cfg.dimer_n_ancilla = n;
    }
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Qpe => commands::qpe(&cfg),
        Command::Ratio => commands::ratio(&cfg),
        Command::Bench => commands::bench(&cfg),
        Command::Config => {
            println!("{}", cfg.settings_string().replace(' ', "\n"));
            return ExitCode::SUCCESS;
        }
    };
    match result {
        Ok(report) if report.failures == 0 => ExitCode::SUCCESS,
        Ok(report) => {
            eprintln!("{} grid point(s) failed", report.failures);
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
