"""MolJSON parsing, validation, serialization, and schema emission.

A MolJSON document is a JSON object with "atoms" and "bonds" arrays plus two
sparse optional lists: "charges" (non-zero formal charges) and "aromatic_n_h"
(explicit hydrogens on aromatic nitrogens). Molecular identity is defined by
the sets of atoms and bonds, independent of array ordering.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass

from .graph import (
    BOND_ORDERS,
    SCHEMA_ELEMENTS,
    Atom,
    Bond,
    Molecule,
    build_molecule,
    expand_hydrogens,
)

MOLJSON_SCHEMA: dict = {
    "type": "object",
    "additionalProperties": False,
    "required": ["atoms", "bonds", "charges", "aromatic_n_h"],
    "properties": {
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "description": "Unique atom id."},
                    "element": {
                        "type": "string",
                        "enum": list(SCHEMA_ELEMENTS),
                        "description": "Element symbol like 'C' or 'Cl', or '*' dummy atom.",
                    },
                },
                "required": ["id", "element"],
            },
        },
        "bonds": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "source": {"type": "string"},
                    "target": {"type": "string"},
                    "order": {
                        "type": "number",
                        "enum": [0, 1, 1.5, 2, 3],
                        "description": "Bond order. Aromatic bonds are 1.5. ZERO bonds are 0.",
                    },
                },
                "required": ["source", "target", "order"],
            },
        },
        "charges": {
            "type": ["array", "null"],
            "description": "Sparse list of NON-ZERO formal charges. Null means none.",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "atom_id": {"type": "string"},
                    "formal_charge": {"type": "integer", "minimum": -5, "maximum": 5},
                },
                "required": ["atom_id", "formal_charge"],
            },
        },
        "aromatic_n_h": {
            "type": ["array", "null"],
            "description": "Sparse list of aromatic nitrogens with explicit hydrogen count. Null means none.",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "atom_id": {"type": "string"},
                    "hcount": {"type": "integer", "minimum": 1, "maximum": 2},
                },
                "required": ["atom_id", "hcount"],
            },
        },
    },
}


class MolJsonError(ValueError):
    pass


class MalformedJson(MolJsonError):
    pass


class SchemaViolation(MolJsonError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class DuplicateAtomId(MolJsonError):
    pass


class DanglingReference(MolJsonError):
    pass


class EmptyMolecule(MolJsonError):
    pass


@dataclass(frozen=True)
class Violation:
    path: str
    reason: str


def emit_schema(variant: str = "standard") -> dict:
    """Schema document for structured-output prompting.

    The "enum-ranges" variant replaces min/max integer ranges with explicit
    value enumerations (zero stays excluded from formal_charge because the
    charges list is sparse by definition).
    """
    schema = copy.deepcopy(MOLJSON_SCHEMA)
    if variant == "standard":
        return schema
    if variant == "enum-ranges":
        charge = schema["properties"]["charges"]["items"]["properties"]["formal_charge"]
        charge.pop("minimum")
        charge.pop("maximum")
        charge["enum"] = [c for c in range(-5, 6) if c != 0]
        hcount = schema["properties"]["aromatic_n_h"]["items"]["properties"]["hcount"]
        hcount.pop("minimum")
        hcount.pop("maximum")
        hcount["enum"] = [1, 2]
        return schema
    raise ValueError(f"unknown schema variant {variant!r}")


def _structural_violations(doc) -> list[Violation]:
    import jsonschema

    validator = jsonschema.Draft202012Validator(MOLJSON_SCHEMA)
    out = [
        Violation("$." + ".".join(str(p) for p in err.absolute_path), err.message)
        for err in validator.iter_errors(doc)
    ]
    if out or not isinstance(doc, dict):
        return out

    ids = [a["id"] for a in doc.get("atoms", [])]
    id_set = set(ids)
    if len(id_set) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        out.append(Violation("$.atoms", f"duplicate atom ids: {dupes}"))
    if not ids:
        out.append(Violation("$.atoms", "empty molecule: zero atoms"))

    seen_pairs: set[frozenset] = set()
    for k, bond in enumerate(doc.get("bonds", [])):
        for key in ("source", "target"):
            if bond[key] not in id_set:
                out.append(
                    Violation(f"$.bonds[{k}].{key}", f"unknown atom id {bond[key]!r}")
                )
        if bond["source"] == bond["target"]:
            out.append(Violation(f"$.bonds[{k}]", "self-loop bond"))
            continue
        pair = frozenset((bond["source"], bond["target"]))
        if pair in seen_pairs:
            out.append(Violation(f"$.bonds[{k}]", f"duplicate bond {sorted(pair)}"))
        seen_pairs.add(pair)

    for k, entry in enumerate(doc.get("charges") or []):
        if entry["atom_id"] not in id_set:
            out.append(
                Violation(f"$.charges[{k}].atom_id", f"unknown atom id {entry['atom_id']!r}")
            )
        if entry["formal_charge"] == 0:
            out.append(
                Violation(f"$.charges[{k}].formal_charge", "zero charge in sparse list")
            )

    aromatic_ids = {
        a["id"]
        for a in doc.get("atoms", [])
        for b in doc.get("bonds", [])
        if b["order"] == 1.5 and a["id"] in (b["source"], b["target"])
    }
    nitrogen_ids = {a["id"] for a in doc.get("atoms", []) if a["element"] == "N"}
    for k, entry in enumerate(doc.get("aromatic_n_h") or []):
        aid = entry["atom_id"]
        if aid not in id_set:
            out.append(Violation(f"$.aromatic_n_h[{k}].atom_id", f"unknown atom id {aid!r}"))
        elif aid not in nitrogen_ids:
            out.append(
                Violation(f"$.aromatic_n_h[{k}].atom_id", f"{aid!r} is not a nitrogen")
            )
        elif aid not in aromatic_ids:
            out.append(
                Violation(
                    f"$.aromatic_n_h[{k}].atom_id",
                    f"{aid!r} has no aromatic (1.5-order) bond",
                )
            )
    return out


def validate_document(text: str) -> list[Violation]:
    """Schema and referential checks; empty list iff parsing would succeed
    through schema validation (valence errors are reported separately)."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        return [Violation("$", f"malformed JSON: {exc}")]
    return _structural_violations(doc)


def parse_moljson_with_ids(text: str) -> tuple[Molecule, list[str]]:
    """Parse a document, returning the molecule and the id for each atom index."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedJson(str(exc)) from exc

    violations = _structural_violations(doc)
    if violations:
        first = violations[0]
        ids = [a.get("id") for a in doc.get("atoms", [])] if isinstance(doc, dict) else []
        if "duplicate atom ids" in first.reason:
            raise DuplicateAtomId(first.reason)
        if "empty molecule" in first.reason and len(violations) == 1:
            raise EmptyMolecule("document has zero atoms")
        if "unknown atom id" in first.reason:
            raise DanglingReference(str(first.reason))
        raise SchemaViolation(first.path, first.reason)

    ids = [a["id"] for a in doc["atoms"]]
    index = {aid: i for i, aid in enumerate(ids)}
    charges = {e["atom_id"]: e["formal_charge"] for e in doc.get("charges") or []}
    explicit = {e["atom_id"]: e["hcount"] for e in doc.get("aromatic_n_h") or []}
    atoms = [
        Atom(a["element"], charges.get(a["id"], 0), explicit.get(a["id"], 0))
        for a in doc["atoms"]
    ]
    bonds = [
        Bond(index[b["source"]], index[b["target"]], b["order"]) for b in doc["bonds"]
    ]
    return build_molecule(atoms, bonds), ids


def parse_moljson(text: str) -> Molecule:
    mol, _ = parse_moljson_with_ids(text)
    return mol


def document_for(mol: Molecule, id_style: str = "element-numbered") -> dict:
    """Document model for a sanitized molecule.

    id_style "element-numbered" yields ids like C1, C2, O1; "a-numbered"
    yields a1..an. Hydrogens that valence inference cannot recover are
    materialized as explicit H atoms first.
    """
    m = expand_hydrogens(mol)
    ids: list[str] = []
    if id_style == "element-numbered":
        counters: dict[str, int] = {}
        for atom in m.atoms:
            key = atom.element if atom.element != "*" else "X"
            counters[key] = counters.get(key, 0) + 1
            ids.append(f"{key}{counters[key]}")
    elif id_style == "a-numbered":
        ids = [f"a{i + 1}" for i in range(len(m.atoms))]
    else:
        raise ValueError(f"unknown id style {id_style!r}")

    def jsonable_order(order: float):
        return int(order) if order == int(order) else order

    charges = [
        {"atom_id": ids[i], "formal_charge": a.formal_charge}
        for i, a in enumerate(m.atoms)
        if a.formal_charge != 0
    ]
    aromatic_n_h = [
        {"atom_id": ids[i], "hcount": a.explicit_h}
        for i, a in enumerate(m.atoms)
        if a.element == "N" and a.explicit_h > 0 and m.has_aromatic_bond(i)
    ]
    return {
        "atoms": [
            {"id": ids[i], "element": a.element} for i, a in enumerate(m.atoms)
        ],
        "bonds": [
            {"source": ids[b.a], "target": ids[b.b], "order": jsonable_order(b.order)}
            for b in m.bonds
        ],
        "charges": charges or None,
        "aromatic_n_h": aromatic_n_h or None,
    }


def write_moljson(mol: Molecule, id_style: str = "element-numbered") -> str:
    return json.dumps(document_for(mol, id_style), indent=2)
