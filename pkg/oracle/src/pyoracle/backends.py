"""Independent molecule backends used to cross-check the primary toolkit.

Two backends share one small interface:

* ``RDKitBackend`` delegates to RDKit when it is installed and raises
  ``ToolchainMissing`` otherwise.
* ``NetworkxBackend`` is a self-contained fallback: its own SMILES reader,
  hydrogen/aromaticity model, and graph queries built on ``networkx``.

Neither backend imports anything from the toolkit under test.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import networkx as nx


class ToolchainMissing(RuntimeError):
    """Raised when a backend's underlying toolkit is not installed."""


HALOGENS = frozenset({"F", "Cl", "Br", "I"})

ELEMENTS = frozenset(
    """H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co
    Ni Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te
    I Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir
    Pt Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No
    Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og *""".split()
)

# Default valence states per element; multi-valent elements list every state.
VALENCES: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "F": (1,),
    "Si": (4,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

# Charge-adjusted valences for the handful of charged states the corpus uses.
CHARGED_VALENCES: dict[tuple[str, int], tuple[int, ...]] = {
    ("N", 1): (4,),
    ("N", -1): (2,),
    ("O", 1): (3,),
    ("O", -1): (1,),
    ("S", 1): (3,),
    ("S", -1): (1,),
    ("C", 1): (3,),
    ("C", -1): (3,),
    ("B", -1): (4,),
    ("P", 1): (4,),
}

ORGANIC_SUBSET = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
AROMATIC_SUBSET = ("b", "c", "n", "o", "p", "s")

_BRACKET_RE = re.compile(
    r"\[(?P<element>\*|[A-Z][a-z]?|[a-z]{1,2})"
    r"(?P<h>H\d*)?"
    r"(?P<charge>\+{1,5}|-{1,5}|[+-]\d)?"
    r"\]"
)


class SmilesError(ValueError):
    """Input is not SMILES this backend understands."""


@dataclass
class _PendingRing:
    atom: int
    order: float | None


def _valence_states(element: str, charge: int) -> tuple[int, ...] | None:
    if charge:
        return CHARGED_VALENCES.get((element, charge))
    return VALENCES.get(element)


def _parse_bracket(body: str, pos: int) -> tuple[str, int, int, bool, int]:
    m = _BRACKET_RE.match(body, pos)
    if m is None:
        raise SmilesError(f"bad bracket atom at position {pos}")
    element = m.group("element")
    aromatic = element.islower() and element != "*"
    if aromatic:
        element = element.capitalize()
    if element not in ELEMENTS:
        raise SmilesError(f"unknown element {element!r}")
    h_spec = m.group("h")
    if h_spec is None:
        hydrogens = 0
    elif h_spec == "H":
        hydrogens = 1
    else:
        hydrogens = int(h_spec[1:])
    c_spec = m.group("charge") or ""
    if not c_spec:
        charge = 0
    elif c_spec[-1].isdigit():
        charge = int(c_spec[1]) * (1 if c_spec[0] == "+" else -1)
    else:
        charge = len(c_spec) * (1 if c_spec[0] == "+" else -1)
    return element, hydrogens, charge, aromatic, m.end()


class NetworkxBackend:
    """Pure-python reference backend.

    Molecules are ``networkx.Graph`` objects with node attributes
    ``element``, ``charge``, ``hydrogens`` (total attached H) and
    ``aromatic``, and an ``order`` attribute on each edge (1, 1.5, 2, 3).
    Zero-order coordination bonds carry no edge at all, so path and ring
    queries never traverse them.
    """

    name = "networkx"

    # -- SMILES reading ----------------------------------------------------

    def parse(self, smiles: str) -> nx.Graph:
        text = smiles.strip()
        if not text or any(ch.isspace() for ch in text):
            raise SmilesError("empty or whitespace-containing input")
        g = nx.Graph()
        stack: list[int] = []
        prev: int | None = None
        pending_order: float | None = None
        rings: dict[str, _PendingRing] = {}
        pins: dict[int, int] = {}
        i = 0
        n = 0

        def add_atom(element: str, charge: int, aromatic: bool,
                     pinned_h: int | None) -> None:
            nonlocal prev, pending_order, n
            g.add_node(n, element=element, charge=charge, aromatic=aromatic)
            if pinned_h is not None:
                pins[n] = pinned_h
            if prev is not None:
                order = pending_order
                if order is None:
                    order = 1.5 if (aromatic and g.nodes[prev]["aromatic"]) else 1.0
                if order > 0:
                    g.add_edge(prev, n, order=order)
            pending_order = None
            prev = n
            n += 1

        while i < len(text):
            ch = text[i]
            if ch == "[":
                element, hydrogens, charge, aromatic, i = _parse_bracket(text, i)
                add_atom(element, charge, aromatic, hydrogens)
                continue
            if ch == "(":
                if prev is None:
                    raise SmilesError("branch before any atom")
                stack.append(prev)
                i += 1
                continue
            if ch == ")":
                if not stack:
                    raise SmilesError("unmatched ')'")
                prev = stack.pop()
                i += 1
                continue
            if ch in "-=#:/\\":
                pending_order = {"-": 1.0, "=": 2.0, "#": 3.0, ":": 1.5}.get(ch)
                if pending_order is None:
                    raise SmilesError("stereo bonds unsupported")
                i += 1
                continue
            if ch == ".":
                if pending_order is not None:
                    raise SmilesError("bond before dot")
                prev = None
                i += 1
                continue
            if ch.isdigit() or ch == "%":
                if ch == "%":
                    label, i = text[i + 1 : i + 3], i + 3
                    if len(label) != 2 or not label.isdigit():
                        raise SmilesError("bad %nn ring closure")
                else:
                    label, i = ch, i + 1
                if prev is None:
                    raise SmilesError("ring closure before any atom")
                if label in rings:
                    open_side = rings.pop(label)
                    if open_side.atom == prev:
                        raise SmilesError("ring closure onto the same atom")
                    order = open_side.order or pending_order
                    if order is None:
                        a, b = g.nodes[open_side.atom], g.nodes[prev]
                        order = 1.5 if (a["aromatic"] and b["aromatic"]) else 1.0
                    g.add_edge(open_side.atom, prev, order=order)
                else:
                    rings[label] = _PendingRing(prev, pending_order)
                pending_order = None
                continue
            if ch == "*":
                add_atom("*", 0, False, None)
                i += 1
                continue
            for symbol in ORGANIC_SUBSET:
                if text.startswith(symbol, i):
                    add_atom(symbol, 0, False, None)
                    i += len(symbol)
                    break
            else:
                if ch in AROMATIC_SUBSET:
                    add_atom(ch.upper(), 0, True, None)
                    i += 1
                else:
                    raise SmilesError(f"unexpected character {ch!r} at {i}")
        if rings:
            raise SmilesError("unclosed ring bond")
        if stack:
            raise SmilesError("unclosed branch")
        if pending_order is not None:
            raise SmilesError("dangling bond symbol")
        if len(g) == 0:
            raise SmilesError("no atoms")
        self._assign_hydrogens(g, pins)
        self._aromatize(g)
        return g

    def _assign_hydrogens(self, g: nx.Graph, pins: dict[int, int]) -> None:
        for node, data in g.nodes(data=True):
            if node in pins:
                data["hydrogens"] = pins[node]
                continue
            orders = [g.edges[e]["order"] for e in g.edges(node)]
            has_aromatic = data["aromatic"] or any(o == 1.5 for o in orders)
            bond_sum = int(sum(orders))  # floor: each 1.5 pair sums to 3
            if data["element"] == "*":
                data["hydrogens"] = 0
                continue
            if data["element"] == "N" and has_aromatic:
                data["hydrogens"] = 0
                continue
            states = _valence_states(data["element"], data["charge"])
            if states is None:
                data["hydrogens"] = 0
                continue
            lower = len(orders) if has_aromatic else bond_sum
            valence = next((v for v in states if v >= lower), None)
            if valence is None:
                data["hydrogens"] = 0
            else:
                data["hydrogens"] = max(0, valence - bond_sum)

    def _aromatize(self, g: nx.Graph) -> None:
        """Rewrite Hueckel-aromatic rings to uniform 1.5-order edges.

        This normalizes kekulized and aromatic inputs to the same labeled
        graph, so equivalence never depends on which Kekule structure the
        writer happened to choose.
        """
        for ring in nx.minimum_cycle_basis(g):
            members = set(ring)
            pi = 0
            ok = True
            for node in ring:
                data = g.nodes[node]
                ring_orders = [
                    g.edges[node, nb]["order"]
                    for nb in g.neighbors(node)
                    if nb in members
                ]
                exo_double = any(
                    g.edges[node, nb]["order"] >= 2
                    for nb in g.neighbors(node)
                    if nb not in members
                )
                if any(o == 3 for o in ring_orders):
                    ok = False
                    break
                if any(o in (2, 1.5) for o in ring_orders):
                    pi += 1  # contributes one pi electron to the ring
                elif exo_double:
                    ok = False  # cross-conjugated; not a simple aromatic ring
                    break
                elif data["element"] in ("O", "S") and data["charge"] == 0:
                    pi += 2  # lone pair donor
                elif data["element"] == "N" and (
                    data["hydrogens"] > 0 or g.degree(node) == 3
                ):
                    pi += 2  # pyrrole-type nitrogen
                elif data["element"] == "C" and data["charge"] == -1:
                    pi += 2
                else:
                    ok = False
                    break
            if ok and pi % 4 == 2:
                for node in ring:
                    for nb in g.neighbors(node):
                        if nb in members:
                            g.edges[node, nb]["order"] = 1.5
                    g.nodes[node]["aromatic"] = True

    # -- graph queries -----------------------------------------------------

    def equivalent(self, a: nx.Graph, b: nx.Graph) -> bool:
        def node_match(x, y):
            return (
                x["element"] == y["element"]
                and x["charge"] == y["charge"]
                and x["hydrogens"] == y["hydrogens"]
            )

        def edge_match(x, y):
            return x["order"] == y["order"]

        return nx.is_isomorphic(a, b, node_match=node_match, edge_match=edge_match)

    def ring_count(self, g: nx.Graph) -> int:
        return g.number_of_edges() - g.number_of_nodes() + nx.number_connected_components(g)

    def topology(self, g: nx.Graph) -> str:
        rings = nx.minimum_cycle_basis(g)
        if len(rings) == 0:
            return "acyclic"
        if len(rings) == 1:
            return "monocyclic"
        if len(rings) > 2:
            return "other"
        first, second = set(rings[0]), set(rings[1])
        shared = first & second
        if any(g.has_edge(u, v) for u in shared for v in shared if u < v):
            return "fused"
        if len(shared) == 1:
            return "spiro"
        if not shared:
            return "separate"
        return "other"

    def halogen_path(self, g: nx.Graph) -> int | None:
        halos = [n for n, d in g.nodes(data=True) if d["element"] in HALOGENS]
        if len(halos) != 2:
            return None
        try:
            return nx.shortest_path_length(g, halos[0], halos[1])
        except nx.NetworkXNoPath:
            return None


class RDKitBackend:
    """RDKit-based backend; available only when rdkit is installed."""

    name = "rdkit"

    def __init__(self) -> None:
        try:
            from rdkit import Chem  # noqa: F401
        except ImportError as exc:
            raise ToolchainMissing("rdkit is not installed") from exc
        from rdkit import Chem

        self._chem = Chem

    def parse(self, smiles: str):
        mol = self._chem.MolFromSmiles(smiles, sanitize=True)
        if mol is None:
            raise SmilesError("rdkit could not parse input")
        return mol

    def equivalent(self, a, b) -> bool:
        canon = self._chem.MolToSmiles
        return canon(a) == canon(b)

    def ring_count(self, mol) -> int:
        return self._chem.GetSSSR(mol)

    def topology(self, mol) -> str:
        rings = [set(r) for r in mol.GetRingInfo().AtomRings()]
        if len(rings) == 0:
            return "acyclic"
        if len(rings) == 1:
            return "monocyclic"
        if len(rings) > 2:
            return "other"
        shared = rings[0] & rings[1]
        bonds = {
            frozenset((b.GetBeginAtomIdx(), b.GetEndAtomIdx()))
            for b in mol.GetBonds()
        }
        if any(frozenset((u, v)) in bonds for u in shared for v in shared if u < v):
            return "fused"
        if len(shared) == 1:
            return "spiro"
        if not shared:
            return "separate"
        return "other"

    def halogen_path(self, mol) -> int | None:
        from rdkit.Chem import rdmolops

        halos = [
            a.GetIdx() for a in mol.GetAtoms() if a.GetSymbol() in HALOGENS
        ]
        if len(halos) != 2:
            return None
        path = rdmolops.GetShortestPath(mol, halos[0], halos[1])
        return len(path) - 1 if path else None


def load_backend(name: str = "auto"):
    """Return a backend instance: rdkit when requested/available, else networkx."""
    if name == "rdkit":
        return RDKitBackend()
    if name == "networkx":
        return NetworkxBackend()
    if name == "auto":
        try:
            return RDKitBackend()
        except ToolchainMissing:
            return NetworkxBackend()
    raise ValueError(f"unknown backend {name!r}")
