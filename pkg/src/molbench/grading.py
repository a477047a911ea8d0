"""Response grading, constraint checking, and statistical aggregation.

Every response maps to exactly one status:

* correct — parses and matches the ground truth;
* wrong_molecule — parses to a valid but non-matching molecule (also used
  for wrong integer answers on shortest-path tasks);
* invalid — does not parse in the requested format;
* empty — empty string or a MolJSON document with zero atoms;
* ungradable — cannot be judged (e.g. IUPAC output with no name-to-structure
  adapter configured); excluded from accuracy denominators.
"""

from __future__ import annotations

import json
import math
import re
import statistics
from dataclasses import dataclass, field
from typing import Callable

from .canon import canonical_form
from .graph import SCHEMA_ELEMENTS, Molecule
from .graphops import (
    Unreachable,
    classify_topology,
    fragment_count,
    halogen_atoms,
    ring_atoms,
    ring_count,
    ring_sizes,
    shortest_path_bonds,
)
from .moljson import EmptyMolecule, parse_moljson
from .molfile import parse_molv2000, rescue_parse
from .smiles import parse_smiles
from .taskgen import ConstraintSet, Task, constraint_set_from_json

STATUSES = ("correct", "wrong_molecule", "invalid", "empty", "ungradable")
WRONG_ANSWER = "wrong_molecule"  # shortest-path alias for the same stage

NameAdapter = Callable[[str], Molecule]


class ZeroTrials(ValueError):
    pass


class JoinMismatch(ValueError):
    pass


@dataclass
class EvalRecord:
    task_id: str
    status: str
    parsed_canonical: str | None = None
    violations: list[str] = field(default_factory=list)
    diagnostics: str = ""

    def to_json(self) -> dict:
        doc = {"task_id": self.task_id, "status": self.status}
        if self.parsed_canonical is not None:
            doc["parsed_canonical"] = self.parsed_canonical
        if self.violations:
            doc["violations"] = self.violations
        if self.diagnostics:
            doc["diagnostics"] = self.diagnostics
        return doc


def _extract_payload(text: str, key: str) -> str:
    """Value of a single-key JSON payload, or the raw text itself."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return text
    if isinstance(doc, dict) and key in doc:
        value = doc[key]
        return value if isinstance(value, str) else json.dumps(value)
    return text


def _parse_response(
    text: str, output_format: str, name_adapter: NameAdapter | None
) -> tuple[Molecule | None, str]:
    """(molecule, status-on-failure) for one response body."""
    if output_format == "moljson":
        try:
            return parse_moljson(text), ""
        except EmptyMolecule:
            return None, "empty"
        except ValueError as exc:
            return None, f"invalid: {exc}"
    if output_format == "smiles":
        payload = _extract_payload(text, "smiles")
        try:
            return parse_smiles(payload), ""
        except ValueError as exc:
            return None, f"invalid: {exc}"
    if output_format == "molv2000":
        payload = _extract_payload(text, "molv2000")
        try:
            return parse_molv2000(payload), ""
        except ValueError:
            try:
                return rescue_parse(payload), ""
            except ValueError as exc:
                return None, f"invalid: {exc}"
    if output_format == "iupac":
        if name_adapter is None:
            return None, "ungradable: no name-to-structure adapter configured"
        payload = _extract_payload(text, "iupac")
        try:
            return name_adapter(payload), ""
        except ValueError as exc:
            return None, f"invalid: {exc}"
    return None, f"invalid: unknown output format {output_format!r}"


def _failure_record(task_id: str, failure: str) -> EvalRecord:
    status, _, detail = failure.partition(":")
    return EvalRecord(task_id, status, diagnostics=detail.strip())


def grade_translation(
    response_text: str,
    output_format: str,
    truth: str,
    task_id: str = "",
    name_adapter: NameAdapter | None = None,
) -> EvalRecord:
    """Grade one translation response against a ground-truth canonical form."""
    if not response_text.strip():
        return EvalRecord(task_id, "empty")
    mol, failure = _parse_response(response_text, output_format, name_adapter)
    if mol is None:
        return _failure_record(task_id, failure)
    form = canonical_form(mol)
    if form == truth:
        return EvalRecord(task_id, "correct", parsed_canonical=form)
    return EvalRecord(task_id, "wrong_molecule", parsed_canonical=form)


def grade_shortest_path(response_text: str, truth: int, task_id: str = "") -> EvalRecord:
    if not response_text.strip():
        return EvalRecord(task_id, "empty")
    try:
        doc = json.loads(response_text)
    except json.JSONDecodeError:
        return EvalRecord(task_id, "invalid", diagnostics="not JSON")
    value = doc.get("answer") if isinstance(doc, dict) else doc
    if isinstance(value, bool) or not isinstance(value, int):
        return EvalRecord(task_id, "invalid", diagnostics=f"non-integer answer {value!r}")
    if value == truth:
        return EvalRecord(task_id, "correct")
    return EvalRecord(task_id, WRONG_ANSWER, diagnostics=f"answered {value}, expected {truth}")


def check_constraints(mol: Molecule, cs: ConstraintSet) -> list[str]:
    """Named violations of one constraint set; empty list means accept."""
    violations = []
    if fragment_count(mol) != 1:
        violations.append(f"connectivity: {fragment_count(mol)} fragments, expected 1")

    halos: dict[str, list[int]] = {"F": [], "Cl": [], "Br": [], "I": []}
    for i in halogen_atoms(mol):
        halos[mol.atoms[i].element].append(i)
    counts_ok = True
    for el in ("F", "Cl", "Br"):
        if len(halos[el]) != 1:
            violations.append(f"halogen-count: {len(halos[el])} {el} atoms, expected 1")
            counts_ok = False
    if halos["I"]:
        violations.append(f"halogen-count: {len(halos['I'])} I atoms, expected 0")
        counts_ok = False

    if counts_ok:
        expected = {
            ("F", "Cl"): cs.path_f_cl,
            ("F", "Br"): cs.path_f_br,
            ("Cl", "Br"): cs.path_cl_br,
        }
        for (a, b), want in expected.items():
            try:
                got = shortest_path_bonds(mol, halos[a][0], halos[b][0])
            except Unreachable:
                violations.append(f"path-{a}-{b}: halogens are in different fragments")
                continue
            if got != want:
                violations.append(f"path-{a}-{b}: {got} bonds, expected {want}")

    rings = ring_count(mol)
    if rings != cs.ring_count:
        violations.append(f"ring-count: {rings}, expected {cs.ring_count}")
    elif cs.ring_count:
        sizes = ring_sizes(mol)
        if sizes != cs.ring_sizes:
            violations.append(f"ring-sizes: {list(sizes)}, expected {list(cs.ring_sizes)}")
        topology = classify_topology(mol)
        if topology != cs.topology:
            violations.append(f"topology: {topology}, expected {cs.topology}")

    if cs.halogen_on_ring and counts_ok:
        on_ring = ring_atoms(mol)
        for el in ("F", "Cl", "Br"):
            idx = halos[el][0]
            if not any(j in on_ring for j in mol.neighbors(idx)):
                violations.append(f"halogen-placement: {el} is not bonded to a ring atom")
    return violations


def grade_constrained(
    response_text: str,
    output_format: str,
    cs: ConstraintSet,
    task_id: str = "",
    name_adapter: NameAdapter | None = None,
) -> EvalRecord:
    if not response_text.strip():
        return EvalRecord(task_id, "empty")
    mol, failure = _parse_response(response_text, output_format, name_adapter)
    if mol is None:
        return _failure_record(task_id, failure)
    violations = check_constraints(mol, cs)
    if violations:
        return EvalRecord(task_id, "wrong_molecule", violations=violations)
    return EvalRecord(task_id, "correct")


def grade_task(task: Task, response_text: str, name_adapter: NameAdapter | None = None) -> EvalRecord:
    """Dispatch one (task, response) pair to the right grader."""
    if task.task_type == "translation":
        return grade_translation(
            response_text, task.output_format, task.ground_truth, task.task_id, name_adapter
        )
    if task.task_type == "shortest_path":
        return grade_shortest_path(response_text, task.ground_truth, task.task_id)
    if task.task_type == "constrained_generation":
        cs = (
            task.ground_truth
            if isinstance(task.ground_truth, ConstraintSet)
            else constraint_set_from_json(task.ground_truth)
        )
        return grade_constrained(
            response_text, task.output_format, cs, task.task_id, name_adapter
        )
    raise ValueError(f"unknown task type {task.task_type!r}")


def wilson_interval(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for k successes in n Bernoulli trials."""
    if n == 0:
        raise ZeroTrials("no trials")
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    halfwidth = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # At the boundaries the closed form cancels algebraically to exactly
    # 0 and 1; bypass the float round-off.
    low = 0.0 if k == 0 else max(0.0, center - halfwidth)
    high = 1.0 if k == n else min(1.0, center + halfwidth)
    return (low, high)


_INTEGER = re.compile(r"^\d+$")
_A_NUM = re.compile(r"^a\d+$")
_SINGLE_LETTER_NUM = re.compile(r"^[A-Za-z]\d+$")
_ELEMENT_NUM = re.compile(r"^([A-Z][a-z]?)\d+$")


def classify_atom_id(atom_id: str) -> str:
    """Crude binning of atom identifiers into five buckets, fixed match order."""
    if _A_NUM.match(atom_id):
        return "a#"
    m = _ELEMENT_NUM.match(atom_id)
    if m and m.group(1) in SCHEMA_ELEMENTS:
        return "el#"
    if _SINGLE_LETTER_NUM.match(atom_id):
        return "@#"
    if _INTEGER.match(atom_id):
        return "#"
    return "other"


def aggregate_report(
    tasks: list[Task],
    grades: list[EvalRecord],
    responses: list[dict] | None = None,
    group_by: tuple[str, ...] = ("task_type", "input_format", "output_format"),
) -> list[dict]:
    """Accuracy rows with Wilson bounds and token statistics per group.

    Ungradable records are excluded from denominators. `responses` rows need
    task_id and output_tokens; omit them to skip token statistics.
    """
    task_index = {t.task_id: t for t in tasks}
    token_index = {r["task_id"]: r.get("output_tokens", 0) for r in responses or []}

    groups: dict[tuple, dict] = {}
    for grade in grades:
        task = task_index.get(grade.task_id)
        if task is None:
            raise JoinMismatch(f"grade for unknown task {grade.task_id}")
        if grade.status == "ungradable":
            continue
        key = tuple(getattr(task, name) for name in group_by)
        bucket = groups.setdefault(key, {"n": 0, "k": 0, "tokens": []})
        bucket["n"] += 1
        bucket["k"] += grade.status == "correct"
        if grade.task_id in token_index:
            bucket["tokens"].append(token_index[grade.task_id])

    rows = []
    for key in sorted(groups, key=str):
        bucket = groups[key]
        n, k = bucket["n"], bucket["k"]
        low, high = wilson_interval(k, n)
        row = dict(zip(group_by, key))
        row.update(
            {
                "n": n,
                "k": k,
                "accuracy": k / n,
                "wilson_low": low,
                "wilson_high": high,
            }
        )
        tokens = bucket["tokens"]
        if tokens:
            mean = statistics.fmean(tokens)
            sem = statistics.stdev(tokens) / math.sqrt(len(tokens)) if len(tokens) > 1 else 0.0
            row["mean_output_tokens"] = mean
            row["output_tokens_ci"] = 1.96 * sem
        rows.append(row)
    return rows
