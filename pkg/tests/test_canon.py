from __future__ import annotations

import itertools
import random

from molbench.canon import canonical_form, canonical_ranks, same_molecule
from molbench.graph import Atom, Bond, build_molecule, permute_molecule
from molbench.moljson import parse_moljson
from molbench.smiles import parse_smiles

from conftest import ACETIC_MOLJSON, acetic_molecule, brute_force_isomorphic


def enumerate_small_molecules():
    """Deterministic set of small molecules over a few graph shapes and
    element labelings, for oracle-based equivalence testing."""
    shapes = {
        "path3": ([0, 1], [1, 2]),
        "path4": ([0, 1], [1, 2], [2, 3]),
        "star4": ([0, 1], [0, 2], [0, 3]),
        "cycle3": ([0, 1], [1, 2], [0, 2]),
        "cycle4": ([0, 1], [1, 2], [2, 3], [0, 3]),
        "cycle5": ([0, 1], [1, 2], [2, 3], [3, 4], [0, 4]),
        "tadpole": ([0, 1], [1, 2], [0, 2], [2, 3]),
        "path5": ([0, 1], [1, 2], [2, 3], [3, 4]),
    }
    elements = ("C", "N", "O")
    out = []
    for edges in shapes.values():
        n = max(max(e) for e in edges) + 1
        for labeling in itertools.product(elements, repeat=n):
            if labeling.count("O") > 1:
                continue  # keep the set small
            try:
                mol = build_molecule(
                    [Atom(el) for el in labeling], [Bond(a, b) for a, b in edges]
                )
            except ValueError:
                continue
            out.append(mol)
    return out


class TestCanonicalRanks:
    def test_ranks_are_a_permutation(self):
        mol = parse_smiles("CC(=O)Oc1ccccc1C(=O)O")
        ranks = canonical_ranks(mol)
        assert sorted(ranks) == list(range(len(mol.atoms)))

    def test_acetic_acid_all_relabelings_agree(self):
        mol = acetic_molecule()
        base = canonical_form(mol)
        for perm in itertools.permutations(range(4)):
            assert canonical_form(permute_molecule(mol, list(perm))) == base

    def test_benzene_rotation_invariance(self):
        mol = parse_smiles("c1ccccc1")
        base = canonical_form(mol)
        rng = random.Random(5)
        for _ in range(30):
            perm = list(range(6))
            rng.shuffle(perm)
            assert canonical_form(permute_molecule(mol, perm)) == base


class TestSameMolecule:
    def test_formats_agree_on_acetic_acid(self):
        assert same_molecule(parse_smiles("CC(=O)O"), parse_moljson(ACETIC_MOLJSON))

    def test_constitutional_isomers_differ(self):
        assert not same_molecule(parse_smiles("CCO"), parse_smiles("COC"))
        assert not same_molecule(parse_smiles("CC(=O)O"), parse_smiles("COC=O"))

    def test_kekulized_vs_aromatic(self):
        assert same_molecule(parse_smiles("C1=CC=CC=C1"), parse_smiles("c1ccccc1"))

    def test_explicit_vs_implicit_hydrogens(self):
        assert same_molecule(parse_smiles("C"), parse_smiles("[H]C([H])([H])[H]"))
        assert same_molecule(parse_smiles("O"), parse_smiles("[H]O[H]"))

    def test_equivalence_relation_on_permutations(self):
        mol = parse_smiles("CC1CCC(N)CC1")
        rng = random.Random(1)
        perm = list(range(len(mol.atoms)))
        rng.shuffle(perm)
        other = permute_molecule(mol, perm)
        assert same_molecule(mol, other)
        assert same_molecule(other, mol)


class TestAgainstBruteForce:
    def test_small_molecule_pairs(self):
        molecules = enumerate_small_molecules()
        # Compare within size/shape-compatible groups only; brute force is
        # the oracle, canonical equality the implementation under test.
        rng = random.Random(3)
        pool = rng.sample(molecules, 80)
        for a, b in itertools.combinations(pool, 2):
            assert same_molecule(a, b) == brute_force_isomorphic(a, b)

    def test_self_equality(self):
        for mol in enumerate_small_molecules()[:50]:
            assert same_molecule(mol, mol)
