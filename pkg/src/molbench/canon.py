"""Canonical atom ranking and canonical form strings.

Equivalence is decided on the aromaticity-normalized, hydrogen-folded graph:
two molecules are the same iff their canonical form strings are equal. Ranks
come from iterative neighborhood refinement seeded with per-atom invariants,
with recursive branch-and-refine tie-breaking on the lowest ambiguous rank.
"""

from __future__ import annotations

from dataclasses import replace

from .aromatic import aromatize
from .graph import Atom, Bond, Molecule, build_molecule, total_hydrogens

_ORDER_KEY = {0: "0", 1: "1", 1.5: "a", 2: "2", 3: "3"}


def _fold_hydrogens(mol: Molecule) -> Molecule:
    """Collapse plain explicit H atoms onto their heavy neighbor.

    Only uncharged H atoms with a single order-1 bond to a non-hydrogen are
    folded; anything else (H2, hydride ions) stays a graph atom.
    """
    fold: dict[int, int] = {}
    for i, atom in enumerate(mol.atoms):
        if atom.element != "H" or atom.formal_charge != 0 or atom.explicit_h != 0:
            continue
        adj = mol.adjacency[i]
        if len(adj) != 1 or adj[0][1] != 1:
            continue
        j = adj[0][0]
        if mol.atoms[j].element == "H":
            continue
        if any(b.order == 0 and i in (b.a, b.b) for b in mol.bonds):
            continue
        fold[i] = j
    if not fold:
        return mol

    keep = [i for i in range(len(mol.atoms)) if i not in fold]
    remap = {old: new for new, old in enumerate(keep)}
    gained: dict[int, int] = {}
    for h, heavy in fold.items():
        gained[heavy] = gained.get(heavy, 0) + 1
    atoms = []
    for old in keep:
        atom = mol.atoms[old]
        if old in gained:
            atom = replace(atom, explicit_h=atom.explicit_h + gained[old])
        atoms.append(atom)
    bonds = [
        Bond(remap[b.a], remap[b.b], b.order)
        for b in mol.bonds
        if b.a not in fold and b.b not in fold
    ]
    return build_molecule(atoms, bonds)


def _initial_invariants(mol: Molecule) -> list[tuple]:
    invs = []
    for i, atom in enumerate(mol.atoms):
        invs.append(
            (
                atom.element,
                atom.formal_charge,
                total_hydrogens(mol, i),
                mol.degree(i),
                mol.has_aromatic_bond(i),
            )
        )
    return invs


def _dense_ranks(keys: list) -> list[int]:
    order = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _refine(adj: list[list[tuple[str, int]]], ranks: list[int]) -> list[int]:
    """Weisfeiler-Leman style refinement to a stable partition."""
    while True:
        keys = [
            (ranks[i], tuple(sorted((o, ranks[j]) for o, j in adj[i])))
            for i in range(len(ranks))
        ]
        new = _dense_ranks(keys)
        if new == ranks:
            return ranks
        ranks = new


def _serialize(mol: Molecule, ranks: list[int]) -> str:
    pos = ranks  # discrete ranks are a permutation: atom i sits at pos[i]
    atoms_by_rank = sorted(range(len(ranks)), key=lambda i: pos[i])
    atom_parts = []
    for i in atoms_by_rank:
        atom = mol.atoms[i]
        atom_parts.append(f"{atom.element}{atom.formal_charge:+d}H{total_hydrogens(mol, i)}")
    bond_parts = sorted(
        (min(pos[b.a], pos[b.b]), max(pos[b.a], pos[b.b]), _ORDER_KEY[b.order])
        for b in mol.bonds
    )
    return (
        "|".join(atom_parts)
        + "//"
        + ";".join(f"{a}-{b}{o}" for a, b, o in bond_parts)
    )


def _canonical_search(mol: Molecule, adj, ranks: list[int]) -> tuple[str, list[int]]:
    ranks = _refine(adj, ranks)
    n = len(ranks)
    if len(set(ranks)) == n:
        return _serialize(mol, ranks), ranks

    # Lowest ambiguous rank; try each member and keep the smallest form.
    counts: dict[int, int] = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    split_rank = min(r for r, c in counts.items() if c > 1)
    cell = [i for i in range(n) if ranks[i] == split_rank]

    best: tuple[str, list[int]] | None = None
    for chosen in cell:
        keys = [(ranks[i], 0 if i == chosen else 1) for i in range(n)]
        result = _canonical_search(mol, adj, _dense_ranks(keys))
        if best is None or result[0] < best[0]:
            best = result
    return best


def _prepared(mol: Molecule) -> Molecule:
    return _fold_hydrogens(aromatize(mol))


def _adj_with_orders(mol: Molecule) -> list[list[tuple[str, int]]]:
    adj: list[list[tuple[str, int]]] = [[] for _ in range(len(mol.atoms))]
    for b in mol.bonds:  # zero-order bonds included: they are structure
        adj[b.a].append((_ORDER_KEY[b.order], b.b))
        adj[b.b].append((_ORDER_KEY[b.order], b.a))
    return adj


def canonical_ranks(mol: Molecule) -> list[int]:
    """Canonical rank per atom of mol (a permutation of 0..n-1)."""
    adj = _adj_with_orders(mol)
    _, ranks = _canonical_search(mol, adj, _dense_ranks(_initial_invariants(mol)))
    return ranks


def canonical_molecule(mol: Molecule) -> Molecule:
    """Aromaticity-normalized, hydrogen-folded molecule in canonical atom order."""
    prepared = _prepared(mol)
    from .graph import permute_molecule

    return permute_molecule(prepared, canonical_ranks(prepared))


def canonical_form(mol: Molecule) -> str:
    """Relabeling-invariant serialization of the normalized molecule."""
    prepared = _prepared(mol)
    adj = _adj_with_orders(prepared)
    form, _ = _canonical_search(prepared, adj, _dense_ranks(_initial_invariants(prepared)))
    return form


def same_molecule(a: Molecule, b: Molecule) -> bool:
    return canonical_form(a) == canonical_form(b)
