#!/usr/bin/env python3
"""Generate the FCIDUMP fixtures used by the test suite.

Monomer: square H4, R(H-H) = 1.0583 A, STO-3G, all orbitals active.
Dimer:   two H4 squares stacked into a cuboid 100 A apart.

Writes into ../fixtures/:
  h4.fcidump            monomer, canonical orbitals
  h8_cmo.fcidump        dimer, canonical (delocalized) orbitals
  h8_lmo.fcidump        dimer, monomer-localized orbitals
  h8_cmo_to_lmo.txt     orthogonal V with C_lmo = C_cmo V
  reference.txt         key=value reference energies from pyscf

Run once; the outputs are committed.
"""

import os
import sys

import numpy as np
from pyscf import ao2mo, fci, gto, scf
from pyscf.tools import fcidump

R = 1.0583
SEP = 100.0
OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def square(z):
    h = R / 2.0
    return [("H", (sx * h, sy * h, z)) for sx in (-1, 1) for sy in (-1, 1)]


def build(atoms, symmetry):
    mol = gto.M(atom=atoms, basis="sto-3g", unit="Angstrom", symmetry=symmetry, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-13
    mf.conv_tol_grad = 1e-10
    mf.max_cycle = 500
    mf.kernel()
    if not mf.converged:
        sys.exit("RHF did not converge")
    return mol, mf


def integrals(mol, mf, c):
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.full(mol, c, compact=False), c.shape[1])
    return h1, eri


def fci_energy(h1, eri, norb, nelec, ecore):
    solver = fci.direct_spin1.FCI()
    solver.conv_tol = 1e-13
    e, _ = solver.kernel(h1, eri, norb, nelec, ecore=ecore, nroots=1)
    return e


def hf_energy(h1, eri, nocc, ecore):
    occ = range(nocc)
    e = ecore + 2.0 * sum(h1[i, i] for i in occ)
    for i in occ:
        for j in occ:
            e += 2.0 * eri[i, i, j, j] - eri[i, j, j, i]
    return e


def localize(mol, mf, c, nmono_ao):
    """Rotate occupied and virtual spaces separately onto the two monomers."""
    s = mol.intor("int1e_ovlp")
    fock = mf.get_fock()
    nocc = mol.nelectron // 2
    blocks = []
    for sl in (slice(0, nocc), slice(nocc, c.shape[1])):
        cs = c[:, sl]
        # Mulliken population on monomer A
        pop = cs.T @ s[:, :nmono_ao] @ cs[:nmono_ao, :]
        pop = 0.5 * (pop + pop.T)
        w, u = np.linalg.eigh(pop)
        on_a = u[:, w > 0.5]
        on_b = u[:, w <= 0.5]
        sub = []
        for part in (on_a, on_b):
            cl = cs @ part
            f = cl.T @ fock @ cl
            e, r = np.linalg.eigh(f)
            sub.append((e, cl @ r))
        # interleave by orbital energy, monomer A first on ties
        es = np.concatenate([sub[0][0], sub[1][0]])
        cols = np.hstack([sub[0][1], sub[1][1]])
        order = np.argsort(np.round(es, 8), kind="stable")
        blocks.append(cols[:, order])
    lmo = np.hstack(blocks)
    # fix signs: largest-magnitude AO coefficient positive
    for k in range(lmo.shape[1]):
        i = np.argmax(np.abs(lmo[:, k]))
        if lmo[i, k] < 0:
            lmo[:, k] *= -1
    return lmo


def main():
    os.makedirs(OUT, exist_ok=True)
    ref = {}

    mol, mf = build(square(0.0), symmetry=False)
    c = mf.mo_coeff
    h1, eri = integrals(mol, mf, c)
    ecore = mol.energy_nuc()
    fcidump.from_integrals(os.path.join(OUT, "h4.fcidump"), h1, eri, 4, 4, nuc=ecore, ms=0, tol=1e-14)
    ref["h4_fci"] = fci_energy(h1, eri, 4, (2, 2), ecore)
    ref["h4_hf"] = hf_energy(h1, eri, 2, ecore)
    ref["h4_scf"] = mf.e_tot

    dimer = square(0.0) + square(SEP)
    mol, mf = build(dimer, symmetry="D2h")
    c = mf.mo_coeff
    ecore = mol.energy_nuc()
    h1, eri = integrals(mol, mf, c)
    fcidump.from_integrals(os.path.join(OUT, "h8_cmo.fcidump"), h1, eri, 8, 8, nuc=ecore, ms=0, tol=1e-14)
    ref["h8_fci"] = fci_energy(h1, eri, 8, (4, 4), ecore)
    ref["h8_hf"] = hf_energy(h1, eri, 4, ecore)
    ref["h8_scf"] = mf.e_tot

    # the first four AOs (one s function per H) belong to the monomer at z=0
    lmo = localize(mol, mf, c, 4)
    s = mol.intor("int1e_ovlp")
    v = c.T @ s @ lmo
    assert np.allclose(v.T @ v, np.eye(8), atol=1e-10)
    h1l, eril = integrals(mol, mf, lmo)
    fcidump.from_integrals(os.path.join(OUT, "h8_lmo.fcidump"), h1l, eril, 8, 8, nuc=ecore, ms=0, tol=1e-14)
    ref["h8_lmo_fci"] = fci_energy(h1l, eril, 8, (4, 4), ecore)
    ref["h8_lmo_hf"] = hf_energy(h1l, eril, 4, ecore)
    np.savetxt(os.path.join(OUT, "h8_cmo_to_lmo.txt"), v, fmt="%.17e")

    with open(os.path.join(OUT, "reference.txt"), "w") as fh:
        fh.write("# reference energies (Hartree) from pyscf %s\n" % __import__("pyscf").__version__)
        for k, val in ref.items():
            fh.write("%s=%.12f\n" % (k, val))
    for k, val in ref.items():
        print(k, val)


if __name__ == "__main__":
    main()
