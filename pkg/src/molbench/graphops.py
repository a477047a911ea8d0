"""Ring perception, topology classification, and shortest paths.

All traversal runs over bonds of order >= 1; zero-order bonds are invisible
to connectivity, ring perception, and path search.
"""

from __future__ import annotations

from collections import deque

from .graph import HALOGENS, Molecule

TOPOLOGIES = ("acyclic", "monocyclic", "separate", "fused", "spiro", "other")


class Unreachable(ValueError):
    pass


def fragments(mol: Molecule) -> list[list[int]]:
    """Connected components as sorted atom-index lists."""
    seen: set[int] = set()
    out = []
    for start in range(len(mol.atoms)):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in mol.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


def fragment_count(mol: Molecule) -> int:
    return len(fragments(mol))


def ring_count(mol: Molecule) -> int:
    """Cyclomatic number: bonds - atoms + components."""
    nbonds = sum(1 for b in mol.bonds if b.order >= 1)
    return nbonds - len(mol.atoms) + fragment_count(mol)


def _shortest_cycle_through(mol: Molecule, a: int, b: int) -> list[int]:
    """Smallest cycle using edge (a, b): shortest a-b path avoiding that edge."""
    prev = {a: -1}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for w in mol.neighbors(v):
            if v == a and w == b:
                continue
            if w not in prev:
                prev[w] = v
                if w == b:
                    queue.clear()
                    break
                queue.append(w)
    if b not in prev:
        return []
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path


def sssr_rings(mol: Molecule) -> list[list[int]]:
    """Smallest set of smallest rings.

    One shortest cycle is extracted per non-tree edge, then cycles are
    admitted smallest-first while linearly independent over GF(2) on the
    edge space, until the cyclomatic count is reached.
    """
    target = ring_count(mol)
    if target == 0:
        return []

    edge_index = {(b.a, b.b): k for k, b in enumerate(bb for bb in mol.bonds if bb.order >= 1)}

    def cycle_vector(cycle: list[int]) -> int:
        vec = 0
        for i in range(len(cycle)):
            a, b = cycle[i], cycle[(i + 1) % len(cycle)]
            vec |= 1 << edge_index[(min(a, b), max(a, b))]
        return vec

    # Spanning forest to locate the non-tree edges.
    tree_edges: set[tuple[int, int]] = set()
    seen: set[int] = set()
    for start in range(len(mol.atoms)):
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in mol.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    tree_edges.add((min(v, w), max(v, w)))
                    queue.append(w)

    candidates = []
    for (a, b) in edge_index:
        if (a, b) in tree_edges:
            continue
        cycle = _shortest_cycle_through(mol, a, b)
        if cycle:
            candidates.append(cycle)
    candidates.sort(key=lambda c: (len(c), sorted(c)))

    basis: list[int] = []
    rings: list[list[int]] = []
    for cycle in candidates:
        vec = cycle_vector(cycle)
        reduced = vec
        for bv in basis:
            reduced = min(reduced, reduced ^ bv)
        if reduced:
            basis.append(reduced)
            rings.append(cycle)
            if len(rings) == target:
                break
    return rings


def ring_atoms(mol: Molecule) -> set[int]:
    return {a for ring in sssr_rings(mol) for a in ring}


def ring_sizes(mol: Molecule) -> tuple[int, ...]:
    """Multiset of SSSR ring sizes, sorted ascending."""
    return tuple(sorted(len(r) for r in sssr_rings(mol)))


def _ring_edge_set(ring: list[int]) -> set[tuple[int, int]]:
    return {
        (min(ring[i], ring[(i + 1) % len(ring)]), max(ring[i], ring[(i + 1) % len(ring)]))
        for i in range(len(ring))
    }


def classify_topology(mol: Molecule) -> str:
    rings = sssr_rings(mol)
    if len(rings) == 0:
        return "acyclic"
    if len(rings) == 1:
        return "monocyclic"
    if len(rings) > 2:
        return "other"
    shared_atoms = set(rings[0]) & set(rings[1])
    if _ring_edge_set(rings[0]) & _ring_edge_set(rings[1]):
        return "fused"
    if len(shared_atoms) == 1:
        return "spiro"
    if not shared_atoms:
        return "separate"
    return "other"  # bridged: >= 2 shared atoms without a shared edge


def has_fused_or_spiro(mol: Molecule) -> bool:
    """True when any SSSR ring pair shares at least one atom."""
    rings = sssr_rings(mol)
    for i in range(len(rings)):
        for j in range(i + 1, len(rings)):
            if set(rings[i]) & set(rings[j]):
                return True
    return False


def shortest_path_bonds(mol: Molecule, a: int, b: int) -> int:
    """BFS distance in bonds between atoms a and b."""
    if a == b:
        return 0
    dist = {a: 0}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for w in mol.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                if w == b:
                    return dist[w]
                queue.append(w)
    raise Unreachable(f"atoms {a} and {b} are in different fragments")


def halogen_atoms(mol: Molecule) -> list[int]:
    return [i for i, atom in enumerate(mol.atoms) if atom.element in HALOGENS]
