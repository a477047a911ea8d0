"""SMILES reader and writer for the organic subset.

Supports organic-subset atoms, bracket atoms with charge and hydrogen count,
aromatic lowercase atoms, branches, multi-digit ring closures, and dots.
Stereo markers, isotopes, and radical-style brackets are rejected with a
distinguishing error so corpus filtering can classify them.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .aromatic import kekulize
from .graph import (
    Atom,
    Bond,
    Molecule,
    build_molecule,
    effective_valence,
    total_hydrogens,
)
from .graphops import fragments

ORGANIC_SUBSET = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
AROMATIC_ORGANIC = ("b", "c", "n", "o", "p", "s")

_BRACKET = re.compile(
    r"^(?P<isotope>\d+)?"
    r"(?P<element>\*|[A-Z][a-z]?|[a-z][a-z]?)"
    r"(?P<stereo>@{1,2})?"
    r"(?P<hcount>H\d*)?"
    r"(?P<charge>\+\d+|-\d+|\++|-+)?"
    r"(?::\d+)?$"
)


class SmilesError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SmilesSyntaxError(SmilesError):
    pass


class UnclosedRing(SmilesError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"ring closure {index} is never closed")


class UnclosedBranch(SmilesError):
    pass


class UnsupportedFeature(SmilesError):
    def __init__(self, feature: str, position: int | None = None):
        self.feature = feature
        super().__init__(f"unsupported SMILES feature: {feature}", position)


@dataclass
class _ParsedAtom:
    element: str
    aromatic: bool
    charge: int = 0
    bracket_h: int | None = None  # None for organic-subset atoms


def _parse_bracket(body: str, pos: int) -> _ParsedAtom:
    m = _BRACKET.match(body)
    if not m:
        raise SmilesSyntaxError(f"bad bracket atom [{body}]", pos)
    if m.group("isotope"):
        raise UnsupportedFeature("isotope", pos)
    if m.group("stereo"):
        raise UnsupportedFeature("stereo", pos)
    raw_el = m.group("element")
    aromatic = raw_el[0].islower() and raw_el != "*"
    element = raw_el[0].upper() + raw_el[1:] if aromatic else raw_el
    h = m.group("hcount")
    if h is None:
        hcount = 0
    elif h == "H":
        hcount = 1
    else:
        hcount = int(h[1:])
    c = m.group("charge")
    if c is None:
        charge = 0
    elif c in ("+", "-") or set(c) in ({"+"}, {"-"}):
        charge = len(c) if c[0] == "+" else -len(c)
    else:
        charge = int(c) if c[0] != "+" else int(c[1:])
    return _ParsedAtom(element, aromatic, charge, hcount)


_BOND_SYMBOLS = {"-": 1, "=": 2, "#": 3, ":": 1.5}


def _tokenize_and_build(text: str):
    atoms: list[_ParsedAtom] = []
    bonds: list[tuple[int, int, float | None]] = []  # None: default order
    stack: list[int] = []
    ring_open: dict[int, tuple[int, float | None, int]] = {}
    prev: int | None = None
    pending: float | None = None
    pending_dot = False

    def add_atom(parsed: _ParsedAtom, pos: int):
        nonlocal prev, pending, pending_dot
        atoms.append(parsed)
        idx = len(atoms) - 1
        if prev is not None and not pending_dot:
            bonds.append((prev, idx, pending))
        elif pending is not None:
            raise SmilesSyntaxError("dangling bond symbol", pos)
        prev = idx
        pending = None
        pending_dot = False

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in "/\\":
            raise UnsupportedFeature("stereo", i)
        if ch == "[":
            end = text.find("]", i)
            if end == -1:
                raise SmilesSyntaxError("unterminated bracket atom", i)
            add_atom(_parse_bracket(text[i + 1 : end], i), i)
            i = end + 1
            continue
        if text[i : i + 2] in ("Cl", "Br"):
            add_atom(_ParsedAtom(text[i : i + 2], aromatic=False), i)
            i += 2
            continue
        if ch in "BCNOPSFI":
            add_atom(_ParsedAtom(ch, aromatic=False), i)
            i += 1
            continue
        if ch in "bcnops":
            add_atom(_ParsedAtom(ch.upper(), aromatic=True), i)
            i += 1
            continue
        if ch == "*":
            add_atom(_ParsedAtom("*", aromatic=False), i)
            i += 1
            continue
        if ch in _BOND_SYMBOLS:
            if pending is not None:
                raise SmilesSyntaxError("doubled bond symbol", i)
            pending = _BOND_SYMBOLS[ch]
            i += 1
            continue
        if ch == "(":
            if prev is None:
                raise SmilesSyntaxError("branch before any atom", i)
            stack.append(prev)
            i += 1
            continue
        if ch == ")":
            if not stack:
                raise UnclosedBranch("unmatched closing parenthesis", i)
            prev = stack.pop()
            i += 1
            continue
        if ch == ".":
            if pending is not None:
                raise SmilesSyntaxError("bond symbol before dot", i)
            pending_dot = True
            i += 1
            continue
        if ch.isdigit() or ch == "%":
            if ch == "%":
                if i + 2 >= n or not text[i + 1 : i + 3].isdigit():
                    raise SmilesSyntaxError("bad %nn ring closure", i)
                num = int(text[i + 1 : i + 3])
                i += 3
            else:
                num = int(ch)
                i += 1
            if prev is None:
                raise SmilesSyntaxError("ring closure before any atom", i)
            if num in ring_open:
                other, order_there, _ = ring_open.pop(num)
                if pending is not None and order_there is not None and pending != order_there:
                    raise SmilesSyntaxError(f"conflicting orders on ring closure {num}", i)
                order = pending if pending is not None else order_there
                if other == prev:
                    raise SmilesSyntaxError(f"ring closure {num} forms a self-loop", i)
                bonds.append((other, prev, order))
                pending = None
            else:
                ring_open[num] = (prev, pending, i)
                pending = None
            continue
        if ch == "@":
            raise UnsupportedFeature("stereo", i)
        if ch.isspace():
            if text[i:].isspace():
                break  # trailing whitespace is harmless
            raise SmilesSyntaxError("whitespace inside SMILES", i)
        raise SmilesSyntaxError(f"unexpected character {ch!r}", i)

    if ring_open:
        raise UnclosedRing(min(ring_open))
    if stack:
        raise UnclosedBranch("unclosed branch")
    if pending is not None:
        raise SmilesSyntaxError("dangling bond symbol", n - 1)
    return atoms, bonds


def _build(atoms: list[_ParsedAtom], raw_bonds) -> Molecule:
    bond_list = []
    for a, b, order in raw_bonds:
        if order is None:
            order = 1.5 if atoms[a].aromatic and atoms[b].aromatic else 1
        bond_list.append(Bond(a, b, order))
    atom_list = [
        Atom(p.element, p.charge, p.bracket_h if p.bracket_h is not None else 0)
        for p in atoms
    ]
    return build_molecule(atom_list, bond_list)


def parse_smiles(text: str) -> Molecule:
    atoms, bonds = _tokenize_and_build(text)
    if not atoms:
        raise SmilesSyntaxError("empty SMILES", 0)
    return _build(atoms, bonds)


def bracket_hydrogen_deficit(text: str) -> bool:
    """True when a bracket atom pins fewer hydrogens than valence implies.

    Such atoms encode radicals in standard SMILES semantics, which this
    toolkit does not model; the corpus filter uses this to reject them.
    """
    atoms, raw_bonds = _tokenize_and_build(text)
    mol = _build(atoms, raw_bonds)
    for i, parsed in enumerate(atoms):
        if parsed.bracket_h is None or parsed.element == "*":
            continue
        s = math.floor(mol.bond_order_sum(i))
        load = s + parsed.bracket_h
        v = effective_valence(parsed.element, parsed.charge, load)
        if v is not None and load < v:
            return True
    return False


def _atom_token(mol: Molecule, i: int) -> str:
    atom = mol.atoms[i]
    total_h = total_hydrogens(mol, i)
    if atom.element in ORGANIC_SUBSET and atom.formal_charge == 0:
        s = math.floor(mol.bond_order_sum(i))
        v = effective_valence(atom.element, 0, s)
        if v is not None and max(0, v - s) == total_h:
            return atom.element
    body = atom.element
    if total_h == 1:
        body += "H"
    elif total_h > 1:
        body += f"H{total_h}"
    if atom.formal_charge == 1:
        body += "+"
    elif atom.formal_charge == -1:
        body += "-"
    elif atom.formal_charge > 1:
        body += f"+{atom.formal_charge}"
    elif atom.formal_charge < -1:
        body += str(atom.formal_charge)
    return f"[{body}]"


_BOND_TOKEN = {1: "", 2: "=", 3: "#", 1.5: ":"}


def write_smiles(mol: Molecule, ordering: str = "input-order") -> str:
    """Serialize to SMILES; kekulized, uppercase-atom output.

    With ordering="canonical" the atoms are first relabeled by canonical
    rank so canonically equal molecules produce byte-identical strings.
    """
    if ordering == "canonical":
        from .canon import canonical_molecule

        m = kekulize(canonical_molecule(mol))
    elif ordering == "input-order":
        m = kekulize(mol)
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    if any(b.order == 0 for b in m.bonds):
        raise ValueError("zero-order bonds are not representable in SMILES")

    pieces = [_write_fragment(m, frag) for frag in fragments(m)]
    return ".".join(pieces)


def _write_fragment(mol: Molecule, frag: list[int]) -> str:
    start = frag[0]
    visited: set[int] = set()
    tree_children: dict[int, list[int]] = {i: [] for i in frag}
    back_edges: list[tuple[int, int]] = []
    order_stack = [start]
    parent: dict[int, int | None] = {start: None}
    visited.add(start)
    # Iterative DFS preserving ascending neighbor order.
    stack = [(start, iter(sorted(mol.neighbors(start))))]
    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if w not in visited:
                visited.add(w)
                parent[w] = v
                tree_children[v].append(w)
                stack.append((w, iter(sorted(mol.neighbors(w)))))
                advanced = True
                break
            elif w != parent[v] and (min(v, w), max(v, w)) not in {
                (min(a, b), max(a, b)) for a, b in back_edges
            }:
                back_edges.append((v, w))
        if not advanced:
            stack.pop()

    ring_digit: dict[tuple[int, int], int] = {}
    ring_at: dict[int, list[tuple[int, float]]] = {i: [] for i in frag}
    for k, (a, b) in enumerate(back_edges):
        digit = k + 1
        bond = mol.bond_between(a, b)
        ring_at[a].append((digit, bond.order))
        ring_at[b].append((digit, bond.order))

    def closure_token(digit: int, order: float, first: bool) -> str:
        sym = _BOND_TOKEN[order] if (first and order != 1) else ""
        return f"{sym}%{digit:02d}" if digit > 9 else f"{sym}{digit}"

    emitted_digit: set[int] = set()
    out: list[str] = []

    def emit(v: int) -> None:
        out.append(_atom_token(mol, v))
        for digit, order in ring_at[v]:
            first = digit not in emitted_digit
            emitted_digit.add(digit)
            out.append(closure_token(digit, order, first))
        children = tree_children[v]
        for idx, w in enumerate(children):
            bond = mol.bond_between(v, w)
            token = _BOND_TOKEN[bond.order]
            if idx < len(children) - 1:
                out.append("(" + token)
                emit(w)
                out.append(")")
            else:
                out.append(token)
                emit(w)

    emit(start)
    return "".join(out)
