"""Kekulization and aromaticity normalization.

Kekulization replaces 1.5-order bonds with alternating single/double bonds
via a maximum matching over the atoms that still need one pi bond.
Aromatization is the inverse normalization: rings passing a 4n+2 electron
count get all their bonds set to 1.5. Running aromatize before comparison
makes kekulized and aromatic encodings of the same molecule equal.
"""

from __future__ import annotations

import math

import networkx as nx

from .graph import (
    KekulizationFailure,
    Molecule,
    effective_valence,
    replace_bonds,
    total_hydrogens,
    with_explicit_h,
)
from .graphops import sssr_rings


def _pi_deficit(mol: Molecule, i: int) -> int:
    """Double bonds atom i still needs on top of its sigma framework.

    Counts every bond (aromatic included) as one sigma bond plus hydrogens,
    and compares against the target valence. 0 means lone-pair type
    (pyrrole N, furan O), 1 means the atom must take part in one double bond.
    """
    atom = mol.atoms[i]
    sigma = mol.degree(i) + total_hydrogens(mol, i)
    v = effective_valence(atom.element, atom.formal_charge, sigma)
    if v is None:
        return 0
    return v - sigma


def kekulize(mol: Molecule) -> Molecule:
    """Assign concrete orders to all aromatic bonds; raises on failure."""
    aromatic_bonds = [b for b in mol.bonds if b.order == 1.5]
    if not aromatic_bonds:
        return mol

    ring_edges = {
        (min(r[i], r[(i + 1) % len(r)]), max(r[i], r[(i + 1) % len(r)]))
        for r in sssr_rings(mol)
        for i in range(len(r))
    }
    for b in aromatic_bonds:
        if (b.a, b.b) not in ring_edges:
            raise KekulizationFailure(f"aromatic bond ({b.a}, {b.b}) is not in any ring")

    aromatic_atoms = {i for b in aromatic_bonds for i in (b.a, b.b)}
    needs_double = set()
    for i in aromatic_atoms:
        deficit = _pi_deficit(mol, i)
        if deficit == 1:
            needs_double.add(i)
        elif deficit != 0:
            raise KekulizationFailure(f"atom {i} cannot be kekulized (pi deficit {deficit})")

    graph = nx.Graph()
    graph.add_nodes_from(sorted(needs_double))
    for b in aromatic_bonds:
        if b.a in needs_double and b.b in needs_double:
            graph.add_edge(b.a, b.b)
    matching = nx.max_weight_matching(graph, maxcardinality=True)
    matched = {i for pair in matching for i in pair}
    if matched != needs_double:
        raise KekulizationFailure("no perfect matching over the aromatic system")

    double_pairs = {(min(a, b), max(a, b)) for a, b in matching}
    orders = {
        (b.a, b.b): (2 if (b.a, b.b) in double_pairs else 1) for b in aromatic_bonds
    }
    return replace_bonds(mol, orders)


def _ring_pi_electrons(mol: Molecule, ring: list[int]) -> int | None:
    """Pi electrons the ring atoms contribute, or None if any atom blocks."""
    ring_set = set(ring)
    total = 0
    for i in ring:
        atom = mol.atoms[i]
        double_partners = [j for j, order in mol.adjacency[i] if order == 2]
        in_ring_double = any(j in ring_set for j in double_partners)
        if in_ring_double and atom.element in ("C", "N"):
            total += 1
        elif double_partners:
            return None  # exocyclic double bond blocks the ring
        elif atom.element == "N" and _pi_deficit(mol, i) <= 0:
            total += 2  # pyrrole-type nitrogen donates its lone pair
        elif atom.element in ("O", "S") and mol.degree(i) == 2 and atom.formal_charge == 0:
            total += 2
        else:
            return None
    return total


def aromatize(mol: Molecule) -> Molecule:
    """Mark 4n+2 rings aromatic; idempotent.

    Any pre-existing aromatic bonds are kekulized first so perception always
    runs on concrete bond orders; rings that fail to kekulize are left as
    the input declared them.
    """
    work = mol
    if any(b.order == 1.5 for b in mol.bonds):
        try:
            work = kekulize(mol)
        except KekulizationFailure:
            work = mol

    aromatic_edges: set[tuple[int, int]] = set()
    for ring in sssr_rings(work):
        pi = _ring_pi_electrons(work, ring)
        if pi is not None and pi >= 2 and (pi - 2) % 4 == 0:
            for i in range(len(ring)):
                a, b = ring[i], ring[(i + 1) % len(ring)]
                aromatic_edges.add((min(a, b), max(a, b)))
    if not aromatic_edges and work is mol:
        return mol
    orders = {edge: 1.5 for edge in aromatic_edges}
    marked = {i for edge in aromatic_edges for i in edge}
    # Aromatic nitrogens carry no implicit hydrogens, so any hydrogen they
    # held in the concrete-order form must be pinned before conversion.
    pins = {
        i: total_hydrogens(work, i)
        for i in marked
        if work.atoms[i].element == "N" and total_hydrogens(work, i) > 0
    }
    result = replace_bonds(work, orders)
    for i, count in pins.items():
        result = with_explicit_h(result, i, count)
    return result
