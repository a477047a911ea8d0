"""MOL V2000 connection-table reader/writer and a heuristic rescue parser.

The strict parser expects a well-formed block: three header lines, a counts
line tagged V2000, atom and bond blocks of the declared lengths, and an
"M  END" terminator. The rescue parser ignores header placement entirely and
recovers the molecule from the shapes of the atom and bond rows, which makes
it robust to misplaced or inconsistent counts lines.
"""

from __future__ import annotations

from .aromatic import kekulize
from .graph import (
    SCHEMA_ELEMENT_SET,
    Atom,
    Bond,
    Molecule,
    build_molecule,
    expand_hydrogens,
)

_BOND_CODES = {1: 1, 2: 2, 3: 3, 4: 1.5}


class MolfileError(ValueError):
    pass


class BadCountsLine(MolfileError):
    pass


class TruncatedBlock(MolfileError):
    pass


class BadBondIndex(MolfileError):
    pass


class MissingTerminator(MolfileError):
    pass


class NoAtomBlockFound(MolfileError):
    pass


class AmbiguousBlocks(MolfileError):
    pass


def _parse_charge_lines(lines: list[str], natoms: int) -> dict[int, int]:
    charges: dict[int, int] = {}
    for line in lines:
        if not line.startswith("M  CHG"):
            continue
        fields = line.split()
        try:
            count = int(fields[2])
            pairs = fields[3 : 3 + 2 * count]
            for k in range(count):
                idx = int(pairs[2 * k]) - 1
                chg = int(pairs[2 * k + 1])
                if not 0 <= idx < natoms:
                    raise BadBondIndex(f"M  CHG references atom {idx + 1} of {natoms}")
                charges[idx] = chg
        except (IndexError, ValueError) as exc:
            raise MolfileError(f"malformed charge line: {line!r}") from exc
    return charges


def parse_molv2000(text: str) -> Molecule:
    lines = text.splitlines()
    if len(lines) < 4:
        raise BadCountsLine("block too short to contain a counts line")
    counts = lines[3]
    if "V2000" not in counts:
        raise BadCountsLine(f"missing V2000 tag: {counts!r}")
    fields = counts.split()
    try:
        natoms, nbonds = int(fields[0]), int(fields[1])
    except (IndexError, ValueError) as exc:
        raise BadCountsLine(f"unreadable counts line: {counts!r}") from exc

    atom_lines = lines[4 : 4 + natoms]
    bond_lines = lines[4 + natoms : 4 + natoms + nbonds]
    if len(atom_lines) < natoms or len(bond_lines) < nbonds:
        raise TruncatedBlock(
            f"declared {natoms} atoms / {nbonds} bonds, block is shorter"
        )

    atoms = []
    for line in atom_lines:
        fields = line.split()
        if len(fields) < 4:
            raise TruncatedBlock(f"short atom row: {line!r}")
        atoms.append(Atom(fields[3]))

    bonds = []
    for line in bond_lines:
        fields = line.split()
        if len(fields) < 3:
            raise TruncatedBlock(f"short bond row: {line!r}")
        try:
            a, b, code = int(fields[0]), int(fields[1]), int(fields[2])
        except ValueError as exc:
            raise TruncatedBlock(f"unreadable bond row: {line!r}") from exc
        if not (1 <= a <= natoms and 1 <= b <= natoms):
            raise BadBondIndex(f"bond row ({a}, {b}) out of range 1..{natoms}")
        if code not in _BOND_CODES:
            raise MolfileError(f"unsupported bond code {code}")
        bonds.append(Bond(a - 1, b - 1, _BOND_CODES[code]))

    trailer = lines[4 + natoms + nbonds :]
    if not any(line.startswith("M  END") for line in trailer):
        raise MissingTerminator("no 'M  END' terminator")
    charges = _parse_charge_lines(trailer, natoms)
    atoms = [
        Atom(atom.element, charges.get(i, 0)) for i, atom in enumerate(atoms)
    ]
    return build_molecule(atoms, bonds)


def write_molv2000(mol: Molecule, name: str = "") -> str:
    """Fixed-width V2000 block with zeroed 2D coordinates."""
    m = expand_hydrogens(kekulize(mol))
    lines = [name, "  molbench      2D", ""]
    lines.append(
        f"{len(m.atoms):3d}{len(m.bonds):3d}  0  0  0  0  0  0  0  0999 V2000"
    )
    for atom in m.atoms:
        lines.append(
            f"{0.0:10.4f}{0.0:10.4f}{0.0:10.4f} {atom.element:<3}"
            " 0  0  0  0  0  0  0  0  0  0  0  0"
        )
    code = {1: 1, 2: 2, 3: 3, 0: 1}  # zero-order bonds degrade to single
    for bond in m.bonds:
        lines.append(f"{bond.a + 1:3d}{bond.b + 1:3d}{code[int(bond.order)]:3d}  0")
    charged = [(i + 1, a.formal_charge) for i, a in enumerate(m.atoms) if a.formal_charge]
    for start in range(0, len(charged), 8):
        chunk = charged[start : start + 8]
        lines.append(
            f"M  CHG{len(chunk):3d}"
            + "".join(f"{idx:4d}{chg:4d}" for idx, chg in chunk)
        )
    lines.append("M  END")
    return "\n".join(lines) + "\n"


def _is_atom_row(line: str) -> bool:
    fields = line.split()
    if len(fields) < 4:
        return False
    try:
        for f in fields[:3]:
            float(f)
    except ValueError:
        return False
    return fields[3] in SCHEMA_ELEMENT_SET


def _is_bond_row(line: str, natoms: int) -> bool:
    fields = line.split()
    if not 2 <= len(fields) <= 4:
        return False
    try:
        values = [int(f) for f in fields]
    except ValueError:
        return False
    a, b = values[0], values[1]
    return 1 <= a <= natoms and 1 <= b <= natoms and a != b


def _runs(flags: list[bool]) -> list[tuple[int, int]]:
    """Maximal contiguous runs of True, as (start, length)."""
    runs = []
    i = 0
    while i < len(flags):
        if flags[i]:
            j = i
            while j < len(flags) and flags[j]:
                j += 1
            runs.append((i, j - i))
            i = j
        else:
            i += 1
    return runs


def rescue_parse(text: str) -> Molecule:
    """Reconstruct a molecule from a malformed V2000-like block.

    Atom rows are recognized by shape (three decimals plus an element
    symbol), bond rows by 2-4 small integers indexing into the recovered
    atom block; the largest contiguous runs win. Counts lines and headers
    are ignored entirely, and "M  CHG" properties are honored when present.
    """
    lines = text.splitlines()
    atom_runs = _runs([_is_atom_row(line) for line in lines])
    if not atom_runs:
        raise NoAtomBlockFound("no rows shaped like an atom block")
    best = max(length for _, length in atom_runs)
    winners = [run for run in atom_runs if run[1] == best]
    if len(winners) > 1:
        raise AmbiguousBlocks(
            f"{len(winners)} disjoint atom-block candidates of length {best}"
        )
    astart, alen = winners[0]
    atoms = [Atom(line.split()[3]) for line in lines[astart : astart + alen]]

    bond_flags = [_is_bond_row(line, alen) for line in lines]
    for k in range(astart, astart + alen):
        bond_flags[k] = False
    bond_runs = _runs(bond_flags)
    # Prefer the run immediately after the atom block, else the longest.
    following = [run for run in bond_runs if run[0] >= astart + alen]
    bonds: list[Bond] = []
    if following or bond_runs:
        pool = following if following else bond_runs
        bstart, blen = max(pool, key=lambda run: run[1])
        for line in lines[bstart : bstart + blen]:
            fields = [int(f) for f in line.split()]
            code = fields[2] if len(fields) >= 3 else 1
            order = _BOND_CODES.get(code, 1)
            bonds.append(Bond(fields[0] - 1, fields[1] - 1, order))

    charges = _parse_charge_lines(lines, alen)
    atoms = [Atom(a.element, charges.get(i, 0)) for i, a in enumerate(atoms)]
    return build_molecule(atoms, bonds)
