"""Core molecular graph model.

Molecules are immutable graphs of atoms and bonds. Hydrogens are implicit by
default and inferred from element valence, formal charge, and bond orders;
explicit hydrogen counts can be pinned per atom (e.g. protonated aromatic
nitrogens). Aromatic bonds carry order 1.5, zero-order bonds are retained as
annotations but do not participate in valence, connectivity, or ring logic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

# Element symbols accepted in documents ('*' is a valence-free dummy atom).
SCHEMA_ELEMENTS: tuple[str, ...] = (
    "*", "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg",
    "Al", "Si", "P", "S", "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn",
    "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb",
    "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm",
    "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta",
    "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At",
    "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt",
    "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
)
SCHEMA_ELEMENT_SET = frozenset(SCHEMA_ELEMENTS)

BOND_ORDERS = (0, 1, 1.5, 2, 3)

# Allowed valences for the organic subset the benchmark corpus is drawn from.
# Tuples list increasingly hypervalent states (P and S).
DEFAULT_VALENCES: dict[str, tuple[int, ...]] = {
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

# Valence overrides for the common charged states.
CHARGED_VALENCES: dict[tuple[str, int], tuple[int, ...]] = {
    ("N", 1): (4,),
    ("N", -1): (2,),
    ("O", 1): (3,),
    ("O", -1): (1,),
    ("C", -1): (3,),
    ("C", 1): (3,),
    ("S", 1): (3,),
    ("B", -1): (4,),
}

HALOGENS = frozenset({"F", "Cl", "Br", "I"})


class MoleculeError(ValueError):
    """Base class for molecular-graph construction and sanitization errors."""


class DuplicateBond(MoleculeError):
    pass


class SelfLoop(MoleculeError):
    pass


class UnknownElement(MoleculeError):
    pass


class ValenceOverflow(MoleculeError):
    def __init__(self, atom_index: int, valence: float, allowed: int):
        self.atom_index = atom_index
        self.valence = valence
        self.allowed = allowed
        super().__init__(
            f"atom {atom_index}: valence {valence} exceeds allowed maximum {allowed}"
        )


class KekulizationFailure(MoleculeError):
    pass


@dataclass(frozen=True)
class Atom:
    element: str
    formal_charge: int = 0
    explicit_h: int = 0


@dataclass(frozen=True, order=True)
class Bond:
    a: int
    b: int
    order: float = 1


class Molecule:
    """Immutable molecular graph. Construct through :func:`build_molecule`."""

    __slots__ = ("atoms", "bonds", "sanitized", "_adjacency", "_implicit_h")

    def __init__(self, atoms: tuple[Atom, ...], bonds: tuple[Bond, ...], sanitized: bool):
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "bonds", bonds)
        object.__setattr__(self, "sanitized", sanitized)
        object.__setattr__(self, "_adjacency", None)
        object.__setattr__(self, "_implicit_h", None)

    def __setattr__(self, *_):
        raise AttributeError("Molecule is immutable")

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"Molecule({len(self.atoms)} atoms, {len(self.bonds)} bonds)"

    @property
    def adjacency(self) -> dict[int, list[tuple[int, float]]]:
        """Neighbors over bonds of order >= 1 (zero-order bonds excluded)."""
        adj = object.__getattribute__(self, "_adjacency")
        if adj is None:
            adj = {i: [] for i in range(len(self.atoms))}
            for bond in self.bonds:
                if bond.order >= 1:
                    adj[bond.a].append((bond.b, bond.order))
                    adj[bond.b].append((bond.a, bond.order))
            object.__setattr__(self, "_adjacency", adj)
        return adj

    def neighbors(self, i: int) -> list[int]:
        return [j for j, _ in self.adjacency[i]]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def bond_order_sum(self, i: int) -> float:
        return sum(order for _, order in self.adjacency[i])

    def has_aromatic_bond(self, i: int) -> bool:
        return any(order == 1.5 for _, order in self.adjacency[i])

    def bond_between(self, a: int, b: int) -> Bond | None:
        key = (min(a, b), max(a, b))
        for bond in self.bonds:
            if (bond.a, bond.b) == key:
                return bond
        return None


def allowed_valences(element: str, charge: int) -> tuple[int, ...] | None:
    """Allowed valence states, or None for atoms without a valence model."""
    if charge != 0 and (element, charge) in CHARGED_VALENCES:
        return CHARGED_VALENCES[(element, charge)]
    return DEFAULT_VALENCES.get(element)


def effective_valence(element: str, charge: int, lower_bound: float = 0) -> int | None:
    """Smallest allowed valence covering lower_bound, or the hypervalent max."""
    allowed = allowed_valences(element, charge)
    if allowed is None:
        return None
    for v in allowed:
        if v >= lower_bound:
            return v
    return allowed[-1]


def build_molecule(atoms: list[Atom], bonds: list[Bond]) -> Molecule:
    """Assemble and sanitize a molecule from raw atoms and bonds.

    Rejects self-loops, duplicate bonds (per unordered atom pair), unknown
    elements, out-of-range charges, bad bond orders, and valence overflows.
    Atom order is preserved.
    """
    for i, atom in enumerate(atoms):
        if atom.element not in SCHEMA_ELEMENT_SET:
            raise UnknownElement(f"atom {i}: unknown element {atom.element!r}")
        if abs(atom.formal_charge) > 5:
            raise MoleculeError(f"atom {i}: formal charge {atom.formal_charge} out of [-5, 5]")
        if atom.explicit_h < 0:
            raise MoleculeError(f"atom {i}: negative explicit hydrogen count")

    n = len(atoms)
    normalized = []
    seen_pairs: set[tuple[int, int]] = set()
    for bond in bonds:
        if not (0 <= bond.a < n and 0 <= bond.b < n):
            raise MoleculeError(f"bond ({bond.a}, {bond.b}) references a missing atom")
        if bond.a == bond.b:
            raise SelfLoop(f"self-loop on atom {bond.a}")
        if bond.order not in BOND_ORDERS:
            raise MoleculeError(f"bond ({bond.a}, {bond.b}): bad order {bond.order}")
        key = (min(bond.a, bond.b), max(bond.a, bond.b))
        if key in seen_pairs:
            raise DuplicateBond(f"duplicate bond between atoms {key[0]} and {key[1]}")
        seen_pairs.add(key)
        order = bond.order
        normalized.append(Bond(key[0], key[1], int(order) if order == int(order) else order))

    mol = Molecule(tuple(atoms), tuple(sorted(normalized)), sanitized=False)
    _check_valences(mol)
    return Molecule(mol.atoms, mol.bonds, sanitized=True)


def _check_valences(mol: Molecule) -> None:
    for i, atom in enumerate(mol.atoms):
        allowed = allowed_valences(atom.element, atom.formal_charge)
        if atom.element == "*" or allowed is None:
            continue
        cap = allowed[-1]
        if mol.has_aromatic_bond(i):
            # Sigma framework only; pi feasibility is kekulize's job.
            load = mol.degree(i) + atom.explicit_h
        else:
            load = math.floor(mol.bond_order_sum(i)) + atom.explicit_h
        if load > cap:
            raise ValenceOverflow(i, load, cap)


def implicit_hydrogens(mol: Molecule, i: int) -> int:
    """Hydrogens inferred from valence rules for atom i.

    Aromatic bonds contribute 1.5 each and the sum is floored before
    subtraction; dummy atoms and aromatic nitrogens get no implicit
    hydrogens (the latter only carry hydrogens when explicitly pinned).
    """
    atom = mol.atoms[i]
    if atom.element == "*":
        return 0
    if atom.element == "N" and mol.has_aromatic_bond(i):
        return 0
    s = math.floor(mol.bond_order_sum(i))
    if mol.has_aromatic_bond(i):
        # Aromatic rings must not escalate multi-valence atoms (e.g. S in
        # thiophene): the valence state is fixed by the sigma framework.
        lower = mol.degree(i) + atom.explicit_h
    else:
        lower = s + atom.explicit_h
    v = effective_valence(atom.element, atom.formal_charge, lower)
    if v is None:
        return 0
    return max(0, v - s - atom.explicit_h)


def total_hydrogens(mol: Molecule, i: int) -> int:
    return mol.atoms[i].explicit_h + implicit_hydrogens(mol, i)


def heavy_atom_count(mol: Molecule) -> int:
    return sum(1 for a in mol.atoms if a.element not in ("H", "*"))


def molecular_formula(mol: Molecule) -> str:
    """Molecular formula in Hill order, including implicit hydrogens."""
    counts: dict[str, int] = {}
    h = 0
    for i, atom in enumerate(mol.atoms):
        if atom.element == "*":
            continue
        if atom.element == "H":
            h += 1
        else:
            counts[atom.element] = counts.get(atom.element, 0) + 1
        h += total_hydrogens(mol, i)
    if h:
        counts["H"] = h
    if "C" in counts:
        ordered = ["C"] + (["H"] if "H" in counts else [])
        ordered += sorted(k for k in counts if k not in ("C", "H"))
    else:
        ordered = sorted(counts)
    return "".join(el if counts[el] == 1 else f"{el}{counts[el]}" for el in ordered)


def permute_molecule(mol: Molecule, perm: list[int]) -> Molecule:
    """Relabel atoms so that old index i becomes new index perm[i]."""
    n = len(mol.atoms)
    new_atoms: list[Atom | None] = [None] * n
    for i, atom in enumerate(mol.atoms):
        new_atoms[perm[i]] = atom
    new_bonds = [Bond(perm[b.a], perm[b.b], b.order) for b in mol.bonds]
    return build_molecule(list(new_atoms), new_bonds)


def replace_bonds(mol: Molecule, orders: dict[tuple[int, int], float]) -> Molecule:
    """Rebuild the molecule with new orders for the given (a < b) bond pairs."""
    new_bonds = []
    for bond in mol.bonds:
        order = orders.get((bond.a, bond.b), bond.order)
        new_bonds.append(Bond(bond.a, bond.b, order))
    return build_molecule(list(mol.atoms), new_bonds)


def with_explicit_h(mol: Molecule, i: int, explicit_h: int) -> Molecule:
    atoms = list(mol.atoms)
    atoms[i] = replace(atoms[i], explicit_h=explicit_h)
    return build_molecule(atoms, list(mol.bonds))


def hydrogens_need_expansion(mol: Molecule, i: int) -> bool:
    """True when dropping explicit_h from atom i would change its total H.

    Serializers without an explicit hydrogen-count field must then
    materialize the hydrogens as real atoms to preserve the molecule.
    """
    atom = mol.atoms[i]
    if atom.explicit_h == 0:
        return False
    if atom.element == "N" and mol.has_aromatic_bond(i):
        return False  # representable through the aromatic N-H channel
    s = math.floor(mol.bond_order_sum(i))
    v = effective_valence(atom.element, atom.formal_charge, s)
    implied = max(0, v - s) if v is not None else 0
    return implied != total_hydrogens(mol, i)


def expand_hydrogens(mol: Molecule) -> Molecule:
    """Materialize pinned hydrogens as H atoms where inference cannot recover them."""
    targets = [i for i in range(len(mol.atoms)) if hydrogens_need_expansion(mol, i)]
    if not targets:
        return mol
    atoms = list(mol.atoms)
    bonds = list(mol.bonds)
    for i in targets:
        count = total_hydrogens(mol, i)
        atoms[i] = replace(atoms[i], explicit_h=0)
        for _ in range(count):
            atoms.append(Atom("H"))
            bonds.append(Bond(i, len(atoms) - 1, 1))
    return build_molecule(atoms, bonds)
