"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import itertools
import json

import pytest

from molbench.graph import Atom, Bond, Molecule, build_molecule, total_hydrogens

# --- Reference fixtures: acetic acid in all three formats -------------------

ACETIC_SMILES = "CC(=O)O"

ACETIC_MOLBLOCK = "\n".join(
    [
        "",
        "     test           2D",
        "",
        "  4  3  0  0  0  0  0  0  0  0999 V2000",
        "   -0.8660    0.5000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0",
        "    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0",
        "    0.0000   -1.0000    0.0000 O   0  0  0  0  0  0  0  0  0  0  0  0",
        "    2.5981   -0.0000    0.0000 O   0  0  0  0  0  0  0  0  0  0  0  0",
        "  1  2  1  0",
        "  2  3  2  0",
        "  2  4  1  0",
        "M  END",
        "",
    ]
)

ACETIC_MOLJSON = json.dumps(
    {
        "atoms": [
            {"id": "C1", "element": "C"},
            {"id": "C2", "element": "C"},
            {"id": "O1", "element": "O"},
            {"id": "O2", "element": "O"},
        ],
        "bonds": [
            {"source": "C1", "target": "C2", "order": 1},
            {"source": "C2", "target": "O1", "order": 2},
            {"source": "C2", "target": "O2", "order": 1},
        ],
        "charges": None,
        "aromatic_n_h": None,
    }
)

PYRAZOLIUM_MOLJSON = json.dumps(
    {
        "atoms": [
            {"id": f"a{i}", "element": el}
            for i, el in enumerate(
                ["N", "N", "C", "C", "C", "C", "C", "C", "C", "C", "O"], start=1
            )
        ],
        "bonds": [
            {"source": "a1", "target": "a2", "order": 1.5},
            {"source": "a2", "target": "a3", "order": 1.5},
            {"source": "a3", "target": "a4", "order": 1.5},
            {"source": "a4", "target": "a5", "order": 1.5},
            {"source": "a5", "target": "a1", "order": 1.5},
            {"source": "a2", "target": "a7", "order": 1},
            {"source": "a7", "target": "a8", "order": 1},
            {"source": "a5", "target": "a6", "order": 1},
            {"source": "a4", "target": "a9", "order": 1},
            {"source": "a9", "target": "a10", "order": 1},
            {"source": "a10", "target": "a11", "order": 1},
        ],
        "charges": [{"atom_id": "a2", "formal_charge": 1}],
        "aromatic_n_h": [{"atom_id": "a1", "hcount": 1}],
    }
)


def acetic_molecule() -> Molecule:
    return build_molecule(
        [Atom("C"), Atom("C"), Atom("O"), Atom("O")],
        [Bond(0, 1, 1), Bond(1, 2, 2), Bond(1, 3, 1)],
    )


# --- Independent oracles -----------------------------------------------------


def brute_force_isomorphic(a: Molecule, b: Molecule) -> bool:
    """Labeled-graph isomorphism by trying every atom permutation.

    Labels are (element, charge, total hydrogens); bond labels are orders.
    Only usable for small molecules.
    """
    if len(a.atoms) != len(b.atoms) or len(a.bonds) != len(b.bonds):
        return False

    def labels(m: Molecule) -> list[tuple]:
        return [
            (m.atoms[i].element, m.atoms[i].formal_charge, total_hydrogens(m, i))
            for i in range(len(m.atoms))
        ]

    la, lb = labels(a), labels(b)
    if sorted(la) != sorted(lb):
        return False
    bonds_a = {(bond.a, bond.b): bond.order for bond in a.bonds}
    bonds_b = {(bond.a, bond.b): bond.order for bond in b.bonds}
    n = len(a.atoms)
    for perm in itertools.permutations(range(n)):
        if any(la[i] != lb[perm[i]] for i in range(n)):
            continue
        mapped = {
            (min(perm[x], perm[y]), max(perm[x], perm[y])): order
            for (x, y), order in bonds_a.items()
        }
        if mapped == bonds_b:
            return True
    return False


def floyd_warshall(mol: Molecule) -> list[list[float]]:
    """All-pairs bond distances over bonds of order >= 1."""
    n = len(mol.atoms)
    inf = float("inf")
    dist = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for bond in mol.bonds:
        if bond.order >= 1:
            dist[bond.a][bond.b] = dist[bond.b][bond.a] = 1
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik == inf:
                continue
            row_k = dist[k]
            row_i = dist[i]
            for j in range(n):
                alt = dik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    return dist


@pytest.fixture(scope="session")
def small_corpus():
    """420 deterministic corpus records spanning all sampling strata."""
    from molbench.corpus import curated_corpus

    return curated_corpus(seed=11, per_cell=4, charged_per_cell=1)
