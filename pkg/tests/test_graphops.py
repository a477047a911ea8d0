from __future__ import annotations

import random

import pytest

from molbench.graph import Atom, Bond, build_molecule
from molbench.graphops import (
    Unreachable,
    classify_topology,
    fragment_count,
    fragments,
    halogen_atoms,
    ring_atoms,
    ring_count,
    ring_sizes,
    shortest_path_bonds,
    sssr_rings,
)
from molbench.smiles import parse_smiles

from conftest import floyd_warshall


class TestRings:
    def test_ring_count_examples(self):
        assert ring_count(parse_smiles("CCCC")) == 0
        assert ring_count(parse_smiles("C1CCCCC1")) == 1
        assert ring_count(parse_smiles("C1CC2CCC1CC2")) == 2
        assert ring_count(parse_smiles("C1CC12CC2")) == 2

    def test_ring_count_is_cyclomatic_number(self):
        rng = random.Random(17)
        for _ in range(200):
            n = rng.randint(2, 9)
            possible = [(a, b) for a in range(n) for b in range(a + 1, n)]
            edges = rng.sample(possible, min(len(possible), rng.randint(1, 12)))
            mol = build_molecule([Atom("*")] * n, [Bond(a, b) for a, b in edges])
            assert ring_count(mol) == len(edges) - n + fragment_count(mol)

    def test_sssr_sizes(self):
        assert ring_sizes(parse_smiles("C1CCCCC1")) == (6,)
        assert ring_sizes(parse_smiles("c1ccc2ccccc2c1")) == (6, 6)
        assert ring_sizes(parse_smiles("C1CC12CCC2")) == (3, 4)

    def test_sssr_bridged_bicycle(self):
        # bicyclo[2.2.1]heptane: SSSR is two 5-rings, not the 6-perimeter
        sizes = ring_sizes(parse_smiles("C1CC2CCC1C2"))
        assert sizes == (5, 5)

    def test_sssr_rings_are_cycles(self):
        mol = parse_smiles("c1ccc2ccccc2c1")
        for ring in sssr_rings(mol):
            for i in range(len(ring)):
                a, b = ring[i], ring[(i + 1) % len(ring)]
                assert mol.bond_between(a, b) is not None

    def test_ring_atoms(self):
        mol = parse_smiles("CC1CCCCC1")
        assert len(ring_atoms(mol)) == 6


class TestTopology:
    @pytest.mark.parametrize(
        "smiles,expected",
        [
            ("CCO", "acyclic"),
            ("C1CCCCC1", "monocyclic"),
            ("C1CC1CCC1CC1", "separate"),
            ("c1ccc2ccccc2c1", "fused"),
            ("C1CC12CC2", "spiro"),
            # norbornane's SSSR five-rings share edges, so it counts as fused
            ("C1CC2CCC1C2", "fused"),
            ("C1CC1C1CC1C1CC1", "other"),  # three rings
        ],
    )
    def test_classification(self, smiles, expected):
        assert classify_topology(parse_smiles(smiles)) == expected


class TestShortestPath:
    def test_simple_chain(self):
        mol = parse_smiles("CCCCC")
        assert shortest_path_bonds(mol, 0, 4) == 4
        assert shortest_path_bonds(mol, 2, 2) == 0

    def test_para_difluorobenzene(self):
        mol = parse_smiles("Fc1ccc(F)cc1")
        f1, f2 = [i for i, a in enumerate(mol.atoms) if a.element == "F"]
        assert shortest_path_bonds(mol, f1, f2) == 5

    def test_unreachable_across_fragments(self):
        mol = parse_smiles("C.C")
        with pytest.raises(Unreachable):
            shortest_path_bonds(mol, 0, 1)

    def test_zero_order_bonds_not_traversed(self):
        mol = build_molecule(
            [Atom("C"), Atom("O")], [Bond(0, 1, 0)]
        )
        with pytest.raises(Unreachable):
            shortest_path_bonds(mol, 0, 1)

    def test_agrees_with_floyd_warshall(self):
        for smiles in ("CC(C)CC1CCC(Br)CC1", "c1ccc2ccccc2c1", "ClCC(F)CCBr"):
            mol = parse_smiles(smiles)
            dist = floyd_warshall(mol)
            n = len(mol.atoms)
            for i in range(n):
                for j in range(n):
                    assert shortest_path_bonds(mol, i, j) == dist[i][j]


class TestFragmentsAndHalogens:
    def test_fragments(self):
        mol = parse_smiles("CC.O.[NH4+]")
        assert fragment_count(mol) == 3
        assert sorted(len(f) for f in fragments(mol)) == [1, 1, 2]

    def test_halogen_atoms(self):
        mol = parse_smiles("FC(Cl)(Br)I")
        assert len(halogen_atoms(mol)) == 4
        assert halogen_atoms(parse_smiles("CCO")) == []
