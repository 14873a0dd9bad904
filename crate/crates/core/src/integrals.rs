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

//! Molecular integrals: FCIDUMP ingestion, spin-orbital expansion and
//! orthogonal orbital rotations.
//!
//! Spatial two-electron integrals are kept in chemist notation `(pq|rs)`.
//! Spin-orbital integrals use physicist notation `<pq|rs> = (pr|qs)` and a
//! blocked layout: spin orbitals `0..l` are alpha, `l..2l` are beta, each
//! block following the spatial orbital order.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Largest number of spatial orbitals accepted anywhere in the crate.
pub const MAX_ORBITALS: usize = 16;

const SYMMETRY_TOL: f64 = 1e-12;
const DUPLICATE_TOL: f64 = 1e-10;
const ORTHOGONALITY_TOL: f64 = 1e-10;

/// One- and two-electron integrals over `l` spatial orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialIntegrals {
    n_orbitals: usize,
    n_electrons: usize,
    ms2: i32,
    h: Vec<f64>,
    g: Vec<f64>,
    core_energy: f64,
}

impl SpatialIntegrals {
    /// Builds integrals from dense arrays, checking shapes and permutational
    /// symmetry. `h` is row-major `l*l`, `g` is row-major `l^4` in chemist order.
    pub fn new(
        n_orbitals: usize,
        n_electrons: usize,
        h: Vec<f64>,
        g: Vec<f64>,
        core_energy: f64,
    ) -> Result<Self> {
        let l = n_orbitals;
        if l == 0 || l > MAX_ORBITALS {
            return Err(Error::Capacity(format!(
                "{l} orbitals (supported: 1..={MAX_ORBITALS})"
            )));
        }
        if h.len() != l * l || g.len() != l * l * l * l {
            return Err(Error::Index(format!(
                "integral arrays have lengths {}, {} for l = {l}",
                h.len(),
                g.len()
            )));
        }
        if n_electrons > 2 * l {
            return Err(Error::Capacity(format!(
                "{n_electrons} electrons in {l} orbitals"
            )));
        }
        let s = Self {
            n_orbitals,
            n_electrons,
            ms2: 0,
            h,
            g,
            core_energy,
        };
        s.check_symmetry()?;
        Ok(s)
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    /// Twice the spin projection, as read from the FCIDUMP header.
    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n_orbitals + q]
    }

    /// Chemist-notation `(pq|rs)`.
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.g[self.g_index(p, q, r, s)]
    }

    pub fn h_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_orbitals, self.n_orbitals, &self.h)
    }

    /// Alpha/beta electron counts implied by `NELEC` and `MS2`.
    pub fn electron_split(&self) -> Result<(usize, usize)> {
        let n = self.n_electrons as i64;
        let ms2 = self.ms2 as i64;
        if (n + ms2) % 2 != 0 || ms2.abs() > n {
            return Err(Error::Sector(format!("NELEC={n} incompatible with MS2={ms2}")));
        }
        Ok((((n + ms2) / 2) as usize, ((n - ms2) / 2) as usize))
    }

    fn g_index(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let l = self.n_orbitals;
        ((p * l + q) * l + r) * l + s
    }

    fn check_symmetry(&self) -> Result<()> {
        let l = self.n_orbitals;
        for p in 0..l {
            for q in 0..l {
                let d = (self.h(p, q) - self.h(q, p)).abs();
                if d > SYMMETRY_TOL {
                    return Err(Error::Consistency {
                        indices: [p, q, 0, 0],
                        old: self.h(p, q),
                        new: self.h(q, p),
                    });
                }
            }
        }
        for p in 0..l {
            for q in 0..l {
                for r in 0..l {
                    for s in 0..l {
                        let v = self.g(p, q, r, s);
                        for w in [self.g(q, p, r, s), self.g(p, q, s, r), self.g(r, s, p, q)] {
                            if (v - w).abs() > SYMMETRY_TOL {
                                return Err(Error::Consistency {
                                    indices: [p, q, r, s],
                                    old: v,
                                    new: w,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The eight index permutations that leave a real chemist integral unchanged.
fn eightfold(p: usize, q: usize, r: usize, s: usize) -> [[usize; 4]; 8] {
    [
        [p, q, r, s],
        [q, p, r, s],
        [p, q, s, r],
        [q, p, s, r],
        [r, s, p, q],
        [s, r, p, q],
        [r, s, q, p],
        [s, r, q, p],
    ]
}

#[derive(Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: Option<i32>,
}

fn parse_header(text: &str, first_line: usize) -> Result<Header> {
    let perr = |msg: String| Error::Parse {
        line: first_line,
        msg,
    };
    let mut body = text.trim().to_string();
    let upper = body.to_ascii_uppercase();
    let start = upper
        .find("&FCI")
        .ok_or_else(|| perr("missing &FCI namelist".into()))?;
    body = body[start + 4..].to_string();
    for end in ["&END", "/"] {
        if body.to_ascii_uppercase().ends_with(end) {
            let cut = body.len() - end.len();
            body.truncate(cut);
            break;
        }
    }
    // collapse "KEY = v" to "KEY=v", then split on commas and whitespace
    let mut norm = String::with_capacity(body.len());
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '=' {
            while norm.ends_with(char::is_whitespace) {
                norm.pop();
            }
            norm.push('=');
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
        } else {
            norm.push(c);
        }
    }
    let mut header = Header::default();
    let mut seen = Vec::new();
    for item in norm.split(|c: char| c == ',' || c.is_whitespace()) {
        let Some((key, value)) = item.split_once('=') else {
            // continuation of a list-valued key such as ORBSYM
            continue;
        };
        let key = key.trim().to_ascii_uppercase();
        let value = value.trim();
        let bad = |k: &str| perr(format!("invalid value {value:?} for {k}"));
        match key.as_str() {
            "NORB" => header.norb = Some(value.parse().map_err(|_| bad("NORB"))?),
            "NELEC" => header.nelec = Some(value.parse().map_err(|_| bad("NELEC"))?),
            "MS2" => header.ms2 = Some(value.parse().map_err(|_| bad("MS2"))?),
            "" => return Err(perr("empty key".into())),
            _ => {}
        }
        seen.push(key);
    }
    for key in ["NORB", "NELEC", "MS2"] {
        if !seen.iter().any(|k| k == key) {
            return Err(perr(format!("header lacks {key}")));
        }
    }
    Ok(header)
}

fn parse_real(tok: &str) -> Option<f64> {
    tok.replace(['D', 'd'], "E").parse().ok()
}

/// Parses FCIDUMP text into fully symmetrized spatial integrals.
///
/// Integral lines read `value i j k l` with 1-based indices. `i=j=k=l=0` is the
/// core energy, `k=l=0` a one-electron integral and otherwise `(ij|kl)`. Lines of
/// the form `value i 0 0 0` (orbital energies) are ignored. Symmetry-equivalent
/// entries that disagree by more than 1e-10 are rejected.
pub fn parse_fcidump(text: &str) -> Result<SpatialIntegrals> {
    let lines: Vec<&str> = text.lines().collect();
    let end = lines
        .iter()
        .position(|l| {
            let u = l.trim().to_ascii_uppercase();
            u.ends_with("&END") || u == "/" || u.ends_with(" /") || u.ends_with(",/")
        })
        .ok_or_else(|| Error::Parse {
            line: lines.len(),
            msg: "namelist header is not terminated".into(),
        })?;
    let header = parse_header(&lines[..=end].join(" "), 1)?;
    let l = header.norb.unwrap_or(0);
    if l == 0 || l > MAX_ORBITALS {
        return Err(Error::Capacity(format!(
            "NORB={l} (supported: 1..={MAX_ORBITALS})"
        )));
    }
    let n_elec = header.nelec.unwrap_or(0);

    let mut h = vec![0.0; l * l];
    let mut h_set = vec![false; l * l];
    let mut g = vec![0.0; l * l * l * l];
    let mut g_set = vec![false; l * l * l * l];
    let mut core = 0.0;
    let mut core_set = false;

    for (offset, raw) in lines[end + 1..].iter().enumerate() {
        let line_no = end + 2 + offset;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `value i j k l`, got {} fields", toks.len()),
            });
        }
        let value = parse_real(toks[0]).ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("invalid real {:?}", toks[0]),
        })?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let v: i64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid index {tok:?}"),
            })?;
            if v < 0 || v as usize > l {
                return Err(Error::Index(format!(
                    "index {v} on line {line_no} outside 0..={l}"
                )));
            }
            *slot = v as usize;
        }
        let [i, j, k, m] = idx;
        match (i, j, k, m) {
            (0, 0, 0, 0) => {
                if core_set && (core - value).abs() > DUPLICATE_TOL {
                    return Err(Error::Consistency {
                        indices: idx,
                        old: core,
                        new: value,
                    });
                }
                core = value;
                core_set = true;
            }
            (_, 0, 0, 0) => {}
            (i, j, 0, 0) if i > 0 && j > 0 => {
                for (p, q) in [(i - 1, j - 1), (j - 1, i - 1)] {
                    let at = p * l + q;
                    if h_set[at] && (h[at] - value).abs() > DUPLICATE_TOL {
                        return Err(Error::Consistency {
                            indices: idx,
                            old: h[at],
                            new: value,
                        });
                    }
                    h[at] = value;
                    h_set[at] = true;
                }
            }
            (i, j, k, m) if i > 0 && j > 0 && k > 0 && m > 0 => {
                for [p, q, r, s] in eightfold(i - 1, j - 1, k - 1, m - 1) {
                    let at = ((p * l + q) * l + r) * l + s;
                    if g_set[at] && (g[at] - value).abs() > DUPLICATE_TOL {
                        return Err(Error::Consistency {
                            indices: idx,
                            old: g[at],
                            new: value,
                        });
                    }
                    g[at] = value;
                    g_set[at] = true;
                }
            }
            _ => {
                return Err(Error::Index(format!(
                    "unsupported index pattern {idx:?} on line {line_no}"
                )))
            }
        }
    }

    let mut s = SpatialIntegrals::new(l, n_elec, h, g, core)?;
    s.ms2 = header.ms2.unwrap_or(0);
    Ok(s)
}

/// Orthogonal `l x l` matrix relating two orbital bases (`C' = C V`).
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalRotation {
    v: DMatrix<f64>,
}

impl OrbitalRotation {
    pub fn new(v: DMatrix<f64>) -> Result<Self> {
        if v.nrows() != v.ncols() {
            return Err(Error::Rotation(f64::INFINITY));
        }
        let n = v.nrows();
        let dev = (v.transpose() * &v - DMatrix::<f64>::identity(n, n)).amax();
        if !(dev < ORTHOGONALITY_TOL) {
            return Err(Error::Rotation(dev));
        }
        Ok(Self { v })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            v: DMatrix::identity(n, n),
        }
    }

    /// Reads a whitespace-separated square matrix, one row per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| {
                    parse_real(t).ok_or_else(|| Error::Parse {
                        line: i + 1,
                        msg: format!("invalid real {t:?}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse {
                line: 1,
                msg: "rotation matrix is not square".into(),
            });
        }
        Self::new(DMatrix::from_row_iterator(n, n, rows.into_iter().flatten()))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn transpose(&self) -> Self {
        Self {
            v: self.v.transpose(),
        }
    }
}

/// Transforms integrals into the rotated orbital basis: `h' = V^T h V` and the
/// matching four-index transformation of `g`. The core energy is unchanged.
pub fn rotate_integrals(s: &SpatialIntegrals, v: &OrbitalRotation) -> Result<SpatialIntegrals> {
    let l = s.n_orbitals;
    let vm = v.matrix();
    if vm.nrows() != l {
        return Err(Error::Index(format!(
            "rotation is {}x{} but there are {l} orbitals",
            vm.nrows(),
            vm.ncols()
        )));
    }
    let h = vm.transpose() * s.h_matrix() * vm;
    let h: Vec<f64> = (0..l)
        .flat_map(|p| (0..l).map(move |q| (p, q)))
        .map(|(p, q)| h[(p, q)])
        .collect();

    // one index at a time: O(l^5)
    let mut cur = s.g.clone();
    let mut next = vec![0.0; cur.len()];
    let stride = [l * l * l, l * l, l, 1];
    for &st in &stride {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (at, out) in next.iter_mut().enumerate() {
            let p = (at / st) % l;
            let base = at - p * st;
            let mut acc = 0.0;
            for a in 0..l {
                acc += vm[(a, p)] * cur[base + a * st];
            }
            *out = acc;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    // restore exact symmetry lost to rounding
    let mut g = cur;
    for p in 0..l {
        for q in 0..l {
            for r in 0..l {
                for t in 0..l {
                    let perms = eightfold(p, q, r, t);
                    let idx = |x: &[usize; 4]| ((x[0] * l + x[1]) * l + x[2]) * l + x[3];
                    let mean = perms.iter().map(|x| g[idx(x)]).sum::<f64>() / 8.0;
                    for x in &perms {
                        g[idx(x)] = mean;
                    }
                }
            }
        }
    }
    let mut hs = h;
    for p in 0..l {
        for q in 0..p {
            let m = 0.5 * (hs[p * l + q] + hs[q * l + p]);
            hs[p * l + q] = m;
            hs[q * l + p] = m;
        }
    }
    let mut out = SpatialIntegrals::new(l, s.n_electrons, hs, g, s.core_energy)?;
    out.ms2 = s.ms2;
    Ok(out)
}

/// Integrals over `2l` spin orbitals in blocked order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOrbitalIntegrals {
    n_spatial: usize,
    n_alpha: usize,
    n_beta: usize,
    h_so: Vec<f64>,
    g_so: Vec<f64>,
    core_energy: f64,
}

impl SpinOrbitalIntegrals {
    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h_so[p * self.n_spin_orbitals() + q]
    }

    /// Physicist-notation `<pq|rs>`.
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spin_orbitals();
        self.g_so[((p * n + q) * n + r) * n + s]
    }

    /// Spin of a spin orbital: 0 for alpha, 1 for beta.
    pub fn spin(&self, p: usize) -> usize {
        p / self.n_spatial
    }
}

/// Expands spatial integrals to blocked spin orbitals, converting the
/// two-electron part to physicist notation `<pq|rs> = (PR|QS)`.
pub fn to_spin_orbitals(
    s: &SpatialIntegrals,
    n_alpha: usize,
    n_beta: usize,
) -> Result<SpinOrbitalIntegrals> {
    let l = s.n_orbitals;
    if n_alpha > l || n_beta > l {
        return Err(Error::Capacity(format!(
            "({n_alpha}, {n_beta}) electrons in {l} spatial orbitals"
        )));
    }
    if n_alpha + n_beta != s.n_electrons {
        return Err(Error::Sector(format!(
            "n_alpha + n_beta = {} but NELEC = {}",
            n_alpha + n_beta,
            s.n_electrons
        )));
    }
    let n = 2 * l;
    let mut h_so = vec![0.0; n * n];
    for p in 0..n {
        for q in 0..n {
            if p / l == q / l {
                h_so[p * n + q] = s.h(p % l, q % l);
            }
        }
    }
    let mut g_so = vec![0.0; n * n * n * n];
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                if p / l != r / l {
                    continue;
                }
                for t in 0..n {
                    if q / l != t / l {
                        continue;
                    }
                    g_so[((p * n + q) * n + r) * n + t] = s.g(p % l, r % l, q % l, t % l);
                }
            }
        }
    }
    Ok(SpinOrbitalIntegrals {
        n_spatial: l,
        n_alpha,
        n_beta,
        h_so,
        g_so,
        core_energy: s.core_energy,
    })
}
