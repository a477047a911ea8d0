"""Benchmark task generation.

Three task families over a corpus of {id, smiles, iupac?} records:

* translation — convert a molecule between formats (one task per ordered
  format pair per molecule);
* shortest path — count bonds between the two halogens of a molecule;
* constrained generation — produce any molecule satisfying a constraint set
  (halogen pairwise path lengths plus ring count/sizes/topology), each set
  carrying a witness molecule proving satisfiability.

All sampling is seeded and input-order-insensitive, so a fixed seed and
corpus contents fully determine every task id and prompt byte.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field

from .graph import Atom, Bond, Molecule, build_molecule
from .graphops import (
    classify_topology,
    fragment_count,
    halogen_atoms,
    ring_atoms,
    ring_count,
    ring_sizes,
    shortest_path_bonds,
)
from .moljson import emit_schema, write_moljson
from .molfile import write_molv2000
from .smiles import UnsupportedFeature, parse_smiles, bracket_hydrogen_deficit

ALLOWED_ELEMENTS = frozenset(
    {"H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Br", "I"}
)

REJECTION_REASONS = (
    "stereo",
    "salt/multifragment",
    "isotope",
    "radical",
    "inorganic-element",
    "charged-when-excluded",
    "parse-failure",
)

FORMAT_LABELS = {
    "smiles": "SMILES",
    "iupac": "IUPAC name",
    "moljson": "MolJSON",
    "molv2000": "MOL V2000",
}

# Sampling ranges per constrained-generation subset:
# (ring size range or None, halogen shortest-path range).
SUBSET_RANGES = {
    "acyclic": (None, (2, 13)),
    "monocyclic": ((3, 27), (3, 11)),
    "separate": ((3, 7), (3, 9)),
    "fused": ((3, 7), (3, 8)),
    "spiro": ((3, 7), (3, 8)),
}


class MissingSourceRendering(ValueError):
    def __init__(self, external_id: str, fmt: str):
        self.external_id = external_id
        self.fmt = fmt
        super().__init__(f"record {external_id} has no {fmt} rendering")


@dataclass
class CorpusRecord:
    external_id: str
    smiles: str
    iupac: str | None = None
    accepted: bool = False
    rejection_reason: str | None = None
    molecule: Molecule | None = None


@dataclass
class Task:
    task_id: str
    task_type: str  # translation | shortest_path | constrained_generation
    input_format: str | None
    output_format: str
    prompt: str
    output_schema: dict
    ground_truth: object  # canonical form, integer, or constraint tuple

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "task_type": self.task_type,
            "input_format": self.input_format,
            "output_format": self.output_format,
            "prompt": self.prompt,
            "output_schema": self.output_schema,
            "ground_truth": self.ground_truth,
        }


@dataclass
class ConstraintSet:
    path_f_cl: int
    path_f_br: int
    path_cl_br: int
    ring_count: int
    ring_sizes: tuple[int, ...]
    topology: str
    halogen_on_ring: bool
    witness: Molecule = field(repr=False)
    subset: str = ""

    def key(self) -> tuple:
        """Identity up to halogen permutation."""
        paths = tuple(sorted((self.path_f_cl, self.path_f_br, self.path_cl_br)))
        return (paths, self.ring_sizes, self.topology)

    def stratum(self) -> object:
        """Ring-size multiset for cyclic subsets, total path length otherwise."""
        if self.ring_count:
            return self.ring_sizes
        return self.path_f_cl + self.path_f_br + self.path_cl_br

    def to_json(self) -> dict:
        from .smiles import write_smiles

        return {
            "paths": {
                "F-Cl": self.path_f_cl,
                "F-Br": self.path_f_br,
                "Cl-Br": self.path_cl_br,
            },
            "ring_count": self.ring_count,
            "ring_sizes": list(self.ring_sizes),
            "topology": self.topology,
            "halogen_on_ring": self.halogen_on_ring,
            "subset": self.subset,
            "witness_smiles": write_smiles(self.witness, ordering="canonical"),
        }


def constraint_set_from_json(doc: dict) -> ConstraintSet:
    witness = parse_smiles(doc["witness_smiles"])
    return ConstraintSet(
        path_f_cl=doc["paths"]["F-Cl"],
        path_f_br=doc["paths"]["F-Br"],
        path_cl_br=doc["paths"]["Cl-Br"],
        ring_count=doc["ring_count"],
        ring_sizes=tuple(doc["ring_sizes"]),
        topology=doc["topology"],
        halogen_on_ring=doc["halogen_on_ring"],
        witness=witness,
        subset=doc.get("subset", ""),
    )


def _task_id(prefix: str, *parts: object) -> str:
    digest = hashlib.sha256(json.dumps(parts, sort_keys=True).encode()).hexdigest()
    return f"{prefix}-{digest[:16]}"


# ---------------------------------------------------------------------------
# Corpus filtering and sampling


def filter_corpus(records: list[dict], charged_allowed: bool = True) -> list[CorpusRecord]:
    """Parse raw records and tag rejections with the first triggered reason.

    Rejection precedence: stereo, salt/multifragment, isotope, radical,
    inorganic element, charged (when excluded), parse failure.
    """
    out = []
    for raw in records:
        rec = CorpusRecord(str(raw["id"]), raw["smiles"], raw.get("iupac"))
        rec.rejection_reason = _rejection_reason(rec, charged_allowed)
        rec.accepted = rec.rejection_reason is None
        out.append(rec)
    return out


def _rejection_reason(rec: CorpusRecord, charged_allowed: bool) -> str | None:
    s = rec.smiles
    if any(ch in s for ch in "/\\@"):
        return "stereo"
    if "." in s:
        return "salt/multifragment"
    if any(part[:1].isdigit() for part in s.split("[")[1:]):
        return "isotope"
    try:
        if bracket_hydrogen_deficit(s):
            return "radical"
        mol = parse_smiles(s)
    except UnsupportedFeature as exc:
        return exc.feature
    except ValueError:
        return "parse-failure"
    if any(a.element not in ALLOWED_ELEMENTS and a.element != "*" for a in mol.atoms):
        return "inorganic-element"
    if not charged_allowed and any(a.formal_charge for a in mol.atoms):
        return "charged-when-excluded"
    if fragment_count(mol) != 1:
        return "salt/multifragment"
    rec.molecule = mol
    return None


def stratified_sample(
    records: list[CorpusRecord],
    heavy_range: tuple[int, int] = (10, 30),
    ring_range: tuple[int, int] = (0, 3),
    per_stratum_neutral: int = 5,
    per_stratum_charged: int = 0,
    seed: int = 0,
) -> list[CorpusRecord]:
    """Seeded uniform draw of up to n neutral + m charged records per
    (heavy-atom count, ring count) cell; short cells yield what they have."""
    from .graph import heavy_atom_count

    cells: dict[tuple[int, int, bool], list[CorpusRecord]] = {}
    for rec in sorted(records, key=lambda r: r.external_id):
        if not rec.accepted:
            continue
        heavy = heavy_atom_count(rec.molecule)
        rings = ring_count(rec.molecule)
        if not (heavy_range[0] <= heavy <= heavy_range[1]):
            continue
        if not (ring_range[0] <= rings <= ring_range[1]):
            continue
        charged = any(a.formal_charge for a in rec.molecule.atoms)
        cells.setdefault((heavy, rings, charged), []).append(rec)

    rng = random.Random(seed)
    sample = []
    for key in sorted(cells):
        cap = per_stratum_charged if key[2] else per_stratum_neutral
        pool = cells[key]
        take = pool if len(pool) <= cap else rng.sample(pool, cap)
        sample.extend(sorted(take, key=lambda r: r.external_id))
    return sample


# ---------------------------------------------------------------------------
# Prompt rendering


def _single_key_schema(key: str, value_type: str = "string") -> dict:
    return {
        "type": "object",
        "additionalProperties": False,
        "required": [key],
        "properties": {key: {"type": value_type}},
    }


def output_schema_for(output_format: str) -> dict:
    if output_format == "moljson":
        return emit_schema("standard")
    return _single_key_schema(output_format)


def _render_source(rec: CorpusRecord, fmt: str) -> str:
    if fmt == "smiles":
        return rec.smiles
    if fmt == "iupac":
        if not rec.iupac:
            raise MissingSourceRendering(rec.external_id, "iupac")
        return rec.iupac
    if fmt == "moljson":
        return write_moljson(rec.molecule)
    if fmt == "molv2000":
        return write_molv2000(rec.molecule)
    raise ValueError(f"unknown format {fmt!r}")


def translation_prompt(source: str, input_format: str, output_format: str) -> str:
    return (
        f"Convert the following {FORMAT_LABELS[input_format]} representation of a "
        f"molecule into the {FORMAT_LABELS[output_format]} representation.\n"
        "\n"
        f"{source}\n"
        "\n"
        "Return only the molecule in the requested output format."
    )


def shortest_path_prompt(source: str, input_format: str) -> str:
    return (
        "The molecule below contains exactly two halogen atoms. Determine the "
        "number of bonds on the shortest path between the two halogen atoms "
        "(count all bonds on the path, including the bond to each halogen).\n"
        "\n"
        f"{FORMAT_LABELS[input_format]}:\n"
        f"{source}\n"
        "\n"
        "Return only the integer answer."
    )


def _plural_ring_sizes(sizes: tuple[int, ...]) -> str:
    if len(sizes) == 1:
        return f"exactly one {sizes[0]}-membered ring"
    if sizes[0] == sizes[1]:
        return f"exactly two {sizes[0]}-membered rings"
    return (
        f"exactly one {sizes[0]}-membered ring and one {sizes[1]}-membered ring"
    )

_TOPOLOGY_LINES = {
    "separate": "two separate rings that share no atoms",
    "fused": "exactly one fused ring system (the two rings share an edge)",
    "spiro": "exactly one spiro center",
}


def constrained_prompt(cs: ConstraintSet) -> str:
    path_line = (
        "- Shortest path between {a} and {b}: exactly {n} bonds "
        "(count all bonds on the path, including the bond to each halogen)."
    )
    lines = [
        "Generate one valid molecule that satisfies all constraints below.",
        "- Connectivity: exactly 1 connected component (single connected molecule).",
        "- Number of F atoms: exactly 1.",
        "- Number of Cl atoms: exactly 1.",
        "- Number of Br atoms: exactly 1.",
        path_line.format(a="F", b="Cl", n=cs.path_f_cl),
        path_line.format(a="F", b="Br", n=cs.path_f_br),
        path_line.format(a="Cl", b="Br", n=cs.path_cl_br),
        f"- Number of rings: exactly {cs.ring_count}.",
    ]
    if cs.ring_count:
        lines.append(f"- Ring sizes: {_plural_ring_sizes(cs.ring_sizes)}.")
        if cs.topology in _TOPOLOGY_LINES:
            lines.append(f"- Ring topology: {_TOPOLOGY_LINES[cs.topology]}.")
        lines.append(
            "- Halogen placement: each halogen must be directly bonded to a ring atom."
        )
    lines.append("Return only the molecule in the requested output format.")
    return "\n".join(lines)


def render_prompt(task: Task) -> dict:
    return {"prompt": task.prompt, "output_schema": task.output_schema}


# ---------------------------------------------------------------------------
# Task families


def gen_translation_tasks(sample: list[CorpusRecord], formats: list[str]) -> list[Task]:
    """One task per ordered format pair per molecule (no self-pairs)."""
    from .canon import canonical_form

    tasks = []
    for rec in sample:
        truth = canonical_form(rec.molecule)
        for src, dst in itertools.permutations(formats, 2):
            source = _render_source(rec, src)
            tasks.append(
                Task(
                    task_id=_task_id("tr", rec.external_id, src, dst),
                    task_type="translation",
                    input_format=src,
                    output_format=dst,
                    prompt=translation_prompt(source, src, dst),
                    output_schema=output_schema_for(dst),
                    ground_truth=truth,
                )
            )
    return sorted(tasks, key=lambda t: t.task_id)


def gen_shortest_path_tasks(
    records: list[CorpusRecord],
    per_length_cap: int = 200,
    length_range: tuple[int, int] = (2, 18),
    formats: tuple[str, ...] = ("smiles", "iupac", "moljson"),
    seed: int = 0,
) -> list[Task]:
    """Tasks over molecules with exactly two halogen atoms."""
    by_length: dict[int, list[tuple[CorpusRecord, int]]] = {}
    for rec in sorted(records, key=lambda r: r.external_id):
        if not rec.accepted:
            continue
        halos = halogen_atoms(rec.molecule)
        if len(halos) != 2:
            continue
        length = shortest_path_bonds(rec.molecule, halos[0], halos[1])
        if length_range[0] <= length <= length_range[1]:
            by_length.setdefault(length, []).append((rec, length))

    rng = random.Random(seed)
    tasks = []
    for length in sorted(by_length):
        pool = by_length[length]
        take = pool if len(pool) <= per_length_cap else rng.sample(pool, per_length_cap)
        for rec, answer in take:
            for fmt in formats:
                if fmt == "iupac" and not rec.iupac:
                    continue
                source = _render_source(rec, fmt)
                tasks.append(
                    Task(
                        task_id=_task_id("sp", rec.external_id, fmt),
                        task_type="shortest_path",
                        input_format=fmt,
                        output_format="answer",
                        prompt=shortest_path_prompt(source, fmt),
                        output_schema=_single_key_schema("answer", "integer"),
                        ground_truth=answer,
                    )
                )
    return sorted(tasks, key=lambda t: t.task_id)


# ---------------------------------------------------------------------------
# Constraint-set enumeration


def _spider_witness(x: int, y: int, z: int) -> Molecule:
    """Three carbon chains of lengths x, y, z from a hub; halogens at tips."""
    atoms = [Atom("C")]
    bonds = []
    tips = []
    for length, halogen in zip((x, y, z), ("F", "Cl", "Br")):
        prev = 0
        for _ in range(length - 1):
            atoms.append(Atom("C"))
            bonds.append(Bond(prev, len(atoms) - 1))
            prev = len(atoms) - 1
        atoms.append(Atom(halogen))
        bonds.append(Bond(prev, len(atoms) - 1))
        tips.append(len(atoms) - 1)
    return build_molecule(atoms, bonds)


def _cycle_scaffold(size: int) -> tuple[list[Atom], list[Bond]]:
    atoms = [Atom("C") for _ in range(size)]
    bonds = [Bond(i, (i + 1) % size) for i in range(size)]
    return atoms, bonds


def _scaffolds(subset: str):
    """Yield (atoms, bonds) carbon scaffolds for one cyclic subset."""
    if subset == "monocyclic":
        for size in range(3, 28):
            yield _cycle_scaffold(size)
    elif subset == "separate":
        for s1 in range(3, 8):
            for s2 in range(s1, 8):
                for link in range(1, 5):  # bonds in the connecting chain
                    atoms, bonds = _cycle_scaffold(s1)
                    offset = len(atoms)
                    atoms += [Atom("C") for _ in range(s2)]
                    bonds += [
                        Bond(offset + i, offset + (i + 1) % s2) for i in range(s2)
                    ]
                    prev = 0
                    for _ in range(link - 1):
                        atoms.append(Atom("C"))
                        bonds.append(Bond(prev, len(atoms) - 1))
                        prev = len(atoms) - 1
                    bonds.append(Bond(prev, offset))
                    yield atoms, bonds
    elif subset == "fused":
        for s1 in range(3, 8):
            for s2 in range(s1, 8):
                atoms, bonds = _cycle_scaffold(s1)
                # Second ring shares the (0, 1) edge: bridge of s2 - 2 atoms.
                prev = 0
                for _ in range(s2 - 2):
                    atoms.append(Atom("C"))
                    bonds.append(Bond(prev, len(atoms) - 1))
                    prev = len(atoms) - 1
                bonds.append(Bond(prev, 1))
                yield atoms, bonds
    elif subset == "spiro":
        for s1 in range(3, 8):
            for s2 in range(s1, 8):
                atoms, bonds = _cycle_scaffold(s1)
                # Second ring shares atom 0 only.
                prev = 0
                for _ in range(s2 - 1):
                    atoms.append(Atom("C"))
                    bonds.append(Bond(prev, len(atoms) - 1))
                    prev = len(atoms) - 1
                bonds.append(Bond(prev, 0))
                yield atoms, bonds
    else:
        raise ValueError(f"unknown cyclic subset {subset!r}")


def _measure(witness: Molecule, subset: str) -> ConstraintSet | None:
    halos = {witness.atoms[i].element: i for i in halogen_atoms(witness)}
    cs = ConstraintSet(
        path_f_cl=shortest_path_bonds(witness, halos["F"], halos["Cl"]),
        path_f_br=shortest_path_bonds(witness, halos["F"], halos["Br"]),
        path_cl_br=shortest_path_bonds(witness, halos["Cl"], halos["Br"]),
        ring_count=ring_count(witness),
        ring_sizes=ring_sizes(witness),
        topology=classify_topology(witness),
        halogen_on_ring=ring_count(witness) >= 1,
        witness=witness,
        subset=subset,
    )
    size_range, path_range = SUBSET_RANGES[subset]
    paths = (cs.path_f_cl, cs.path_f_br, cs.path_cl_br)
    if not all(path_range[0] <= p <= path_range[1] for p in paths):
        return None
    if size_range and not all(size_range[0] <= s <= size_range[1] for s in cs.ring_sizes):
        return None
    if subset != cs.topology and not (subset == "acyclic" and cs.topology == "acyclic"):
        return None
    return cs


def enumerate_constraint_sets(subset: str) -> list[ConstraintSet]:
    """All distinct constraint tuples for one Table-style subset, each with a
    witness; halogen permutations collapse to a single tuple."""
    seen: dict[tuple, ConstraintSet] = {}

    if subset == "acyclic":
        _, path_range = SUBSET_RANGES["acyclic"]
        for x in range(1, path_range[1]):
            for y in range(x, path_range[1] - x + 1):
                for z in range(y, path_range[1] - y + 1):
                    witness = _spider_witness(x, y, z)
                    cs = _measure(witness, subset)
                    if cs is not None:
                        seen.setdefault(cs.key(), cs)
        return [seen[k] for k in sorted(seen)]

    for atoms, bonds in _scaffolds(subset):
        scaffold = build_molecule(atoms, bonds)
        candidates = sorted(ring_atoms(scaffold))
        for combo in itertools.combinations(candidates, 3):
            decorated = list(atoms)
            extra = list(bonds)
            for pos, halogen in zip(combo, ("F", "Cl", "Br")):
                decorated.append(Atom(halogen))
                extra.append(Bond(pos, len(decorated) - 1))
            try:
                witness = build_molecule(decorated, extra)
            except ValueError:
                continue  # placement exceeds valence (e.g. spiro center)
            cs = _measure(witness, subset)
            if cs is not None:
                seen.setdefault(cs.key(), cs)
    return [seen[k] for k in sorted(seen)]


def sample_constraint_sets(
    sets: list[ConstraintSet], per_subset_cap: int = 100, seed: int = 0
) -> list[ConstraintSet]:
    """Round-robin draw across strata until the per-subset cap is met.

    Enumeration favors large molecules, so the draw spreads uniformly over
    strata (ring-size multisets for cyclic subsets, total halogen path
    length for acyclic) instead of over raw sets.
    """
    rng = random.Random(seed)
    out = []
    by_subset: dict[str, list[ConstraintSet]] = {}
    for cs in sets:
        by_subset.setdefault(cs.subset, []).append(cs)
    for subset in sorted(by_subset):
        strata: dict[object, list[ConstraintSet]] = {}
        for cs in sorted(by_subset[subset], key=lambda c: c.key()):
            strata.setdefault(cs.stratum(), []).append(cs)
        queues = [strata[k] for k in sorted(strata, key=str)]
        for queue in queues:
            rng.shuffle(queue)
        picked: list[ConstraintSet] = []
        while queues and len(picked) < per_subset_cap:
            for queue in list(queues):
                if len(picked) >= per_subset_cap:
                    break
                picked.append(queue.pop())
                if not queue:
                    queues.remove(queue)
        out.extend(sorted(picked, key=lambda c: c.key()))
    return out


def gen_constrained_tasks(
    sets: list[ConstraintSet],
    formats: tuple[str, ...] = ("smiles", "iupac", "moljson"),
) -> list[Task]:
    """One task per (constraint set, output format)."""
    tasks = []
    for cs in sets:
        prompt = constrained_prompt(cs)
        truth = cs.to_json()
        for fmt in formats:
            tasks.append(
                Task(
                    task_id=_task_id("cg", cs.key(), fmt),
                    task_type="constrained_generation",
                    input_format=None,
                    output_format=fmt,
                    prompt=prompt,
                    output_schema=output_schema_for(fmt),
                    ground_truth=truth,
                )
            )
    return sorted(tasks, key=lambda t: t.task_id)
