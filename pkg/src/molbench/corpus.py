"""Seeded synthetic-corpus generation.

The benchmark pipeline is corpus-driven: it ingests records of the form
{id, smiles, iupac?}. This module generates reproducible corpora with
controlled heavy-atom counts, ring counts, and halogen placement so the
sampling and task-generation arithmetic can be exercised offline.

The synthetic "name" scheme stands in for real IUPAC names: a name is the
string "MOL[<smiles>]", and :func:`synthetic_name_adapter` parses it back.
Real deployments plug in an external name-to-structure tool instead.
"""

from __future__ import annotations

import random
import re

from .graph import Atom, Bond, Molecule, build_molecule, heavy_atom_count
from .graphops import fragment_count, ring_count
from .smiles import parse_smiles, write_smiles

_RING_DECOR = ("C", "C", "C", "C", "N", "O", "S")
_CHAIN_DECOR = ("C", "C", "C", "N", "O")
_HALOGEN_CHOICES = ("F", "Cl", "Br", "I")


class _Builder:
    """Mutable scratchpad for one random molecule."""

    def __init__(self) -> None:
        self.elements: list[str] = []
        self.charges: list[int] = []
        self.bonds: list[Bond] = []
        self.degree: list[int] = []

    def add_atom(self, element: str) -> int:
        self.elements.append(element)
        self.charges.append(0)
        self.degree.append(0)
        return len(self.elements) - 1

    def add_bond(self, a: int, b: int, order: float = 1) -> None:
        self.bonds.append(Bond(a, b, order))
        self.degree[a] += 1
        self.degree[b] += 1

    def capacity(self, i: int) -> int:
        caps = {"C": 4, "N": 3, "O": 2, "S": 2, "F": 1, "Cl": 1, "Br": 1, "I": 1}
        return caps[self.elements[i]] - sum(
            b.order for b in self.bonds if i in (b.a, b.b)
        )

    def build(self) -> Molecule:
        atoms = [Atom(el, chg) for el, chg in zip(self.elements, self.charges)]
        return build_molecule(atoms, self.bonds)


def _add_ring(builder: _Builder, rng: random.Random, size: int) -> list[int]:
    members = [builder.add_atom("C") for _ in range(size)]
    if size == 6 and rng.random() < 0.4:
        # Benzene-like ring, possibly a pyridine: alternating bond orders.
        for k in range(size):
            builder.add_bond(members[k], members[(k + 1) % size], 2 if k % 2 else 1)
        if rng.random() < 0.3:
            builder.elements[members[0]] = "N"
        return members
    for k in range(size):
        builder.add_bond(members[k], members[(k + 1) % size])
    # Sprinkle at most two heteroatoms per ring, never adjacent to each other.
    for idx in rng.sample(members, k=min(2, size)):
        el = rng.choice(_RING_DECOR)
        if el != "C" and all(
            builder.elements[j] == "C"
            for b in builder.bonds
            if idx in (b.a, b.b)
            for j in (b.a, b.b)
            if j != idx
        ):
            builder.elements[idx] = el
    return members


def _connect(builder: _Builder, rng: random.Random, comp_a: list[int], comp_b: list[int]) -> None:
    a = rng.choice([i for i in comp_a if builder.capacity(i) >= 1])
    b = rng.choice([i for i in comp_b if builder.capacity(i) >= 1])
    builder.add_bond(a, b)


def _random_attempt(
    rng: random.Random,
    heavy: int,
    rings: int,
    halogens: int,
    charged: bool,
) -> Molecule | None:
    builder = _Builder()
    components: list[list[int]] = []
    for r in range(rings):
        used = sum(len(c) for c in components)
        reserve = 3 * (rings - r - 1)  # keep room for the remaining rings
        cap = min(7, heavy - halogens - used - reserve)
        if cap < 3:
            return None
        components.append(_add_ring(builder, rng, rng.randint(3, cap)))
    if not components:
        components.append([builder.add_atom("C")])
    while len(components) > 1:
        a = components.pop(rng.randrange(len(components)))
        _connect(builder, rng, a, components[rng.randrange(len(components))])

    while len(builder.elements) < heavy - halogens:
        anchors = [i for i in range(len(builder.elements)) if builder.capacity(i) >= 1]
        if not anchors:
            return None
        anchor = rng.choice(anchors)
        new = builder.add_atom(rng.choice(_CHAIN_DECOR))
        # Occasional carbonyl for bond-order variety.
        if (
            builder.elements[new] == "O"
            and builder.elements[anchor] == "C"
            and builder.capacity(anchor) >= 2
            and rng.random() < 0.5
        ):
            builder.add_bond(anchor, new, 2)
        else:
            builder.add_bond(anchor, new)

    for _ in range(halogens):
        anchors = [
            i
            for i in range(len(builder.elements))
            if builder.elements[i] == "C" and builder.capacity(i) >= 1
        ]
        if not anchors:
            return None
        new = builder.add_atom(rng.choice(_HALOGEN_CHOICES))
        builder.add_bond(rng.choice(anchors), new)

    if charged:
        candidates = [i for i, el in enumerate(builder.elements) if el == "N"]
        if not candidates:
            # Convert a terminal carbon with only single bonds into nitrogen.
            terminals = [
                i
                for i, el in enumerate(builder.elements)
                if el == "C"
                and builder.degree[i] == 1
                and all(b.order == 1 for b in builder.bonds if i in (b.a, b.b))
            ]
            if not terminals:
                return None
            idx = rng.choice(terminals)
            builder.elements[idx] = "N"
            candidates = [idx]
        builder.charges[rng.choice(candidates)] = 1

    try:
        mol = builder.build()
    except ValueError:
        return None
    if heavy_atom_count(mol) != heavy or ring_count(mol) != rings:
        return None
    if fragment_count(mol) != 1:
        return None
    return mol


def random_molecule(
    rng: random.Random,
    heavy: int,
    rings: int,
    halogens: int = 0,
    charged: bool = False,
    max_tries: int = 50,
) -> Molecule:
    """One random sanitized molecule with the requested shape.

    Raises ValueError when the shape is infeasible under the generator's
    element palette within the retry budget.
    """
    if heavy < max(1, 3 * rings):
        raise ValueError(f"{heavy} heavy atoms cannot hold {rings} rings")
    for _ in range(max_tries):
        mol = _random_attempt(rng, heavy, rings, halogens, charged)
        if mol is not None:
            return mol
    raise ValueError(f"no molecule with heavy={heavy} rings={rings} after {max_tries} tries")


def curated_corpus(
    seed: int = 0,
    per_cell: int = 2,
    heavy_range: tuple[int, int] = (10, 30),
    ring_range: tuple[int, int] = (0, 3),
    charged_per_cell: int = 0,
    with_names: bool = True,
) -> list[dict]:
    """Corpus records covering every (heavy, ring) stratum.

    Returns ingest-format records {id, smiles, iupac?}; ids are stable for a
    fixed seed, so downstream sampling is reproducible.
    """
    rng = random.Random(seed)
    records = []
    serial = 0
    for heavy in range(heavy_range[0], heavy_range[1] + 1):
        for rings in range(ring_range[0], ring_range[1] + 1):
            for k in range(per_cell + charged_per_cell):
                charged = k >= per_cell
                budget = heavy - 3 * rings - (1 if charged else 0)
                halogens = min(rng.choice((0, 0, 1, 2)), max(0, budget))
                mol = random_molecule(rng, heavy, rings, halogens, charged)
                smiles = write_smiles(mol)
                serial += 1
                record = {"id": f"SYN{serial:06d}", "smiles": smiles}
                if with_names:
                    record["iupac"] = synthetic_name(mol)
                records.append(record)
    return records


def two_halogen_corpus(seed: int = 0, per_length: int = 5, lengths=range(2, 19)) -> list[dict]:
    """Records with exactly two halogens at controlled path separations.

    Each molecule is a decorated chain placing the two halogens exactly
    `length` bonds apart, feeding the shortest-path task generator.
    """
    rng = random.Random(seed)
    records = []
    serial = 0
    for length in lengths:
        for _ in range(per_length):
            backbone = length - 2  # halogen-C ... C-halogen contributes 2 bonds
            builder = _Builder()
            chain = [builder.add_atom("C") for _ in range(backbone + 1)]
            for a, b in zip(chain, chain[1:]):
                builder.add_bond(a, b)
            first, second = rng.sample(sorted(set(_HALOGEN_CHOICES) - {"I"}), 2)
            builder.add_bond(chain[0], builder.add_atom(first))
            builder.add_bond(chain[-1], builder.add_atom(second))
            for _ in range(rng.randint(0, 3)):  # off-path decoration
                anchors = [i for i in chain if builder.capacity(i) >= 1]
                if not anchors:
                    break
                builder.add_bond(rng.choice(anchors), builder.add_atom(rng.choice(_CHAIN_DECOR)))
            mol = builder.build()
            serial += 1
            records.append(
                {
                    "id": f"HAL{serial:06d}",
                    "smiles": write_smiles(mol),
                    "iupac": synthetic_name(mol),
                }
            )
    return records


_NAME = re.compile(r"^MOL\[(?P<smiles>.+)\]$")


def synthetic_name(mol: Molecule) -> str:
    return f"MOL[{write_smiles(mol, ordering='canonical')}]"


def synthetic_name_adapter(name: str) -> Molecule:
    """Name-to-structure adapter for the synthetic naming scheme."""
    m = _NAME.match(name.strip())
    if not m:
        raise ValueError(f"not a synthetic name: {name!r}")
    return parse_smiles(m.group("smiles"))
