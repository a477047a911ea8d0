from __future__ import annotations

import itertools

import pytest

from molbench.aromatic import aromatize, kekulize
from molbench.canon import canonical_form, same_molecule
from molbench.graph import (
    Atom,
    Bond,
    KekulizationFailure,
    build_molecule,
    total_hydrogens,
)
from molbench.smiles import parse_smiles


def exhaustive_kekulizations(mol):
    """Oracle: every single/double assignment to the aromatic bonds that
    keeps each atom's bond-order sum at its pre-assignment target valence."""
    from molbench.graph import effective_valence

    aromatic = [b for b in mol.bonds if b.order == 1.5]
    targets = {}
    for i in {x for b in aromatic for x in (b.a, b.b)}:
        atom = mol.atoms[i]
        sigma = mol.degree(i) + total_hydrogens(mol, i)
        targets[i] = effective_valence(atom.element, atom.formal_charge, sigma)

    solutions = []
    for assignment in itertools.product((1, 2), repeat=len(aromatic)):
        sums = dict.fromkeys(targets, 0)
        for b, order in zip(aromatic, assignment):
            sums[b.a] += order
            sums[b.b] += order
        for b in mol.bonds:
            if b.order != 1.5:
                for i in (b.a, b.b):
                    if i in sums:
                        sums[i] += b.order
        ok = all(
            sums[i] + total_hydrogens(mol, i) == targets[i] for i in targets
        )
        if ok:
            solutions.append(assignment)
    return solutions


class TestKekulize:
    def test_benzene_alternating(self):
        mol = kekulize(parse_smiles("c1ccccc1"))
        assert sorted(b.order for b in mol.bonds) == [1, 1, 1, 2, 2, 2]

    def test_pyridine_matches_exhaustive_oracle(self):
        mol = parse_smiles("c1ccncc1")
        assert exhaustive_kekulizations(mol), "oracle finds a valid assignment"
        kek = kekulize(mol)
        n = next(i for i, a in enumerate(mol.atoms) if a.element == "N")
        assert sum(1 for b in kek.bonds if b.order == 2) == 3
        assert any(b.order == 2 and n in (b.a, b.b) for b in kek.bonds)

    def test_pyrrole_nitrogen_excluded_from_matching(self):
        kek = kekulize(parse_smiles("c1cc[nH]c1"))
        n = next(i for i, a in enumerate(kek.atoms) if a.element == "N")
        assert all(b.order != 2 for b in kek.bonds if n in (b.a, b.b))
        assert sum(1 for b in kek.bonds if b.order == 2) == 2

    def test_furan_and_thiophene(self):
        for smiles in ("c1ccoc1", "c1ccsc1"):
            kek = kekulize(parse_smiles(smiles))
            assert sum(1 for b in kek.bonds if b.order == 2) == 2

    def test_lone_aromatic_bond_fails(self):
        mol = build_molecule([Atom("C"), Atom("C")], [Bond(0, 1, 1.5)])
        with pytest.raises(KekulizationFailure):
            kekulize(mol)

    def test_odd_ring_without_heteroatom_fails(self):
        mol = build_molecule(
            [Atom("C")] * 5,
            [Bond(i, (i + 1) % 5, 1.5) for i in range(5)],
        )
        with pytest.raises(KekulizationFailure):
            kekulize(mol)

    def test_no_aromatic_bonds_identity(self):
        mol = parse_smiles("C1CCCCC1")
        assert kekulize(mol) is mol


class TestAromatize:
    def test_kekulized_benzene_becomes_aromatic(self):
        mol = aromatize(parse_smiles("C1=CC=CC=C1"))
        assert sorted(b.order for b in mol.bonds) == [1.5] * 6

    def test_cyclohexane_unchanged(self):
        mol = parse_smiles("C1CCCCC1")
        assert aromatize(mol) is mol

    def test_cyclohexene_not_aromatic(self):
        mol = aromatize(parse_smiles("C1=CCCCC1"))
        assert all(b.order != 1.5 for b in mol.bonds)

    def test_exocyclic_double_blocks_ring(self):
        mol = aromatize(parse_smiles("O=C1C=CC=CC1"))  # cyclohexadienone-like
        assert all(b.order != 1.5 for b in mol.bonds)

    def test_idempotent(self):
        for smiles in ("c1ccccc1", "C1=CC=CC=C1", "c1cc[nH]c1", "CCO"):
            once = aromatize(parse_smiles(smiles))
            assert canonical_form(aromatize(once)) == canonical_form(once)

    def test_fixed_point_with_kekulize(self):
        for smiles in ("c1ccccc1", "c1ccncc1", "c1cc[nH]c1", "Cc1ccccc1O"):
            mol = parse_smiles(smiles)
            lhs = aromatize(kekulize(aromatize(mol)))
            rhs = aromatize(mol)
            assert canonical_form(lhs) == canonical_form(rhs)

    def test_pyridinium_hydrogen_is_pinned(self):
        mol = aromatize(parse_smiles("C1=CC=C[NH+]=C1"))
        n = next(i for i, a in enumerate(mol.atoms) if a.element == "N")
        assert mol.atoms[n].explicit_h == 1
        assert same_molecule(mol, parse_smiles("C1=CC=C[NH+]=C1"))

    def test_kekulized_and_aromatic_forms_equal(self):
        assert same_molecule(parse_smiles("C1=CC=CC=C1"), parse_smiles("c1ccccc1"))
