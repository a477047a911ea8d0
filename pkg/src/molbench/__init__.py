"""Molecular-graph toolkit and LLM chemistry benchmark pipeline."""

from .graph import (
    Atom,
    Bond,
    Molecule,
    build_molecule,
    heavy_atom_count,
    implicit_hydrogens,
    molecular_formula,
)
from .aromatic import aromatize, kekulize
from .canon import canonical_form, canonical_ranks, same_molecule
from .graphops import (
    classify_topology,
    fragment_count,
    halogen_atoms,
    ring_count,
    shortest_path_bonds,
    sssr_rings,
)
from .moljson import emit_schema, parse_moljson, validate_document, write_moljson
from .molfile import parse_molv2000, rescue_parse, write_molv2000
from .smiles import parse_smiles, write_smiles

__all__ = [
    "Atom",
    "Bond",
    "Molecule",
    "aromatize",
    "build_molecule",
    "canonical_form",
    "canonical_ranks",
    "classify_topology",
    "emit_schema",
    "fragment_count",
    "halogen_atoms",
    "heavy_atom_count",
    "implicit_hydrogens",
    "kekulize",
    "molecular_formula",
    "parse_moljson",
    "parse_molv2000",
    "parse_smiles",
    "rescue_parse",
    "ring_count",
    "same_molecule",
    "shortest_path_bonds",
    "sssr_rings",
    "validate_document",
    "write_moljson",
    "write_molv2000",
    "write_smiles",
]
