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

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qpefci-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpefci"))
        .current_dir(workspace())
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> BTreeMap<String, String> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read_to_string(e.path()).unwrap())
        })
        .collect()
}

const MONOMER_GRID: &[&str] = &[
    "--set",
    "systems=monomer",
    "--set",
    "orderings=magnitude",
    "--set",
    "orders=1,2",
    "--set",
    "slices=1,2,5,10",
    "--ancilla",
    "6",
];

fn monomer_qpe(out: &Path, trotter_free: bool) -> Output {
    let mut args = vec!["qpe"];
    args.extend_from_slice(MONOMER_GRID);
    args.extend_from_slice(&["--set", if trotter_free { "include_trotter_free=true" } else { "include_trotter_free=false" }]);
    run(&args, out)
}

#[test]
fn grid_writes_one_distribution_per_point() {
    let a = scratch("grid-a");
    let out = monomer_qpe(&a, false);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dists: Vec<String> = files(&a).into_keys().filter(|f| f.starts_with("dist_")).collect();
    assert_eq!(dists.len(), 8, "{dists:?}");

    let b = scratch("grid-b");
    assert!(monomer_qpe(&b, true).status.success());
    let with_free = files(&b);
    let extra: Vec<&String> = with_free
        .keys()
        .filter(|f| f.starts_with("dist_") && !files(&a).contains_key(*f))
        .collect();
    assert_eq!(extra, vec!["dist_monomer_fci_trotter_free_N6.csv"]);
    for (name, text) in &with_free {
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("# settings: system=monomer"), "{name}: {first}");
        assert!(first.contains("slices=1,2,5,10"), "{name}");
    }
    std::fs::remove_dir_all(&a).unwrap();
    std::fs::remove_dir_all(&b).unwrap();
}

#[test]
fn reruns_are_bit_identical() {
    let a = scratch("rerun-a");
    let b = scratch("rerun-b");
    let args = |dir: &Path| {
        let mut v = vec!["qpe"];
        v.extend_from_slice(MONOMER_GRID);
        v.extend_from_slice(&["--set", "shots=500", "--set", "seed=7", "--set", "workers=3"]);
        run(&v, dir)
    };
    assert!(args(&a).status.success());
    assert!(args(&b).status.success());
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa.len(), 9 * 4);
    for (name, text) in &fa {
        let other = fb[name].replace(b.to_str().unwrap(), a.to_str().unwrap());
        assert_eq!(text, &other, "{name} differs");
    }
    std::fs::remove_dir_all(&a).unwrap();
    std::fs::remove_dir_all(&b).unwrap();
}

#[test]
fn config_file_and_errors() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    let fixture = workspace().join("fixtures/h4.fcidump");
    std::fs::write(
        &cfg,
        format!("monomer_fcidump = {}\nsystems = monomer\n", fixture.canonicalize().unwrap().display()),
    )
    .unwrap();
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap()], &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spectrum = std::fs::read_to_string(dir.join("spectrum_monomer.csv")).unwrap();
    let mut lines = spectrum.lines();
    assert!(lines.next().unwrap().starts_with("# settings: "));
    assert_eq!(lines.next(), Some("index,energy"));
    assert_eq!(lines.count(), 36);

    let bad = run(&["qpe", "--set", "orders=3"], &dir);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("orders"));

    let capacity = run(&["qpe", "--set", "systems=monomer", "--set", "slices=1", "--set", "orders=1", "--ancilla", "40"], &dir);
    assert_eq!(capacity.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&capacity.stdout);
    assert_eq!(stdout.matches("ERROR").count(), 3, "{stdout}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn ratio_table_has_unit_trotter_free_row() {
    let dir = scratch("ratio");
    let out = run(
        &[
            "ratio",
            "--set",
            "systems=dimer_cmo",
            "--set",
            "orderings=magnitude",
            "--set",
            "orders=2",
            "--set",
            "slices=1,2",
            "--set",
            "driver=autocorrelation",
            "--ancilla",
            "5",
        ],
        &dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("ratio_cmo.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3, "{text}");
    let free = rows.iter().find(|r| r.starts_with("magnitude,2,inf,")).unwrap();
    let norm: f64 = free.rsplit(',').next().unwrap().parse().unwrap();
    assert!((norm - 1.0).abs() < 1e-12);
    for row in &rows {
        let ratio: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
        assert!((ratio - 2.0).abs() < 0.05, "{row}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
