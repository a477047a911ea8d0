"""Cross-validate the primary toolkit's answers against an independent backend.

The primary is driven exclusively through its command-line interface using
line-delimited JSON batches (``molbench convert --batch`` and ``molbench
analyze --batch``); nothing from the primary package is imported.
Disagreements are data, not errors: the report records both verdicts and the
caller decides what agreement rate is acceptable.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .backends import SmilesError, load_backend

CHECKS = ("parse", "equivalence", "ring_count", "topology", "halogen_path")


@dataclass
class Disagreement:
    molecule_id: str
    check: str
    primary: object
    reference: object


@dataclass
class CheckResult:
    compared: int = 0
    agreed: int = 0

    @property
    def rate(self) -> float:
        return self.agreed / self.compared if self.compared else 1.0


@dataclass
class AgreementReport:
    corpus_size: int
    backend: str
    checks: dict[str, CheckResult] = field(default_factory=dict)
    disagreements: list[Disagreement] = field(default_factory=list)

    @property
    def overall_rate(self) -> float:
        compared = sum(c.compared for c in self.checks.values())
        agreed = sum(c.agreed for c in self.checks.values())
        return agreed / compared if compared else 1.0

    def to_dict(self) -> dict:
        return {
            "corpus_size": self.corpus_size,
            "backend": self.backend,
            "overall_rate": self.overall_rate,
            "checks": {
                name: {"compared": c.compared, "agreed": c.agreed, "rate": c.rate}
                for name, c in self.checks.items()
            },
            "disagreements": [
                {
                    "id": d.molecule_id,
                    "check": d.check,
                    "primary": d.primary,
                    "reference": d.reference,
                }
                for d in self.disagreements
            ],
        }


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _write_jsonl(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def _run_primary(primary_cli: list[str], args: list[str]) -> None:
    result = subprocess.run(
        primary_cli + args, capture_output=True, text=True
    )
    if result.returncode != 0:
        raise RuntimeError(
            f"primary command {args[:2]} failed "
            f"(exit {result.returncode}): {result.stderr.strip()}"
        )


def crosscheck(
    corpus_path: str | Path,
    primary_cli: str | list[str] = "molbench",
    backend_name: str = "auto",
) -> AgreementReport:
    """Compare the primary's parse/convert/analyze answers with a backend.

    ``corpus_path`` is line-delimited JSON with ``id`` and ``smiles`` fields
    (the format ``molbench make-corpus`` emits). ``primary_cli`` is the
    command used to invoke the primary, e.g. ``"molbench"`` or
    ``"python3 -m molbench.cli"``.
    """
    if isinstance(primary_cli, str):
        primary_cli = shlex.split(primary_cli)
    backend = load_backend(backend_name)
    records = _read_jsonl(Path(corpus_path))
    report = AgreementReport(corpus_size=len(records), backend=backend.name)
    for name in CHECKS:
        report.checks[name] = CheckResult()

    with tempfile.TemporaryDirectory() as tmp:
        tmp_path = Path(tmp)
        batch_in = tmp_path / "in.jsonl"
        _write_jsonl(
            batch_in, [{"id": r["id"], "input": r["smiles"]} for r in records]
        )

        analyzed = tmp_path / "analyzed.jsonl"
        _run_primary(
            primary_cli,
            ["analyze", "smiles", "--batch", str(batch_in), "--out", str(analyzed)],
        )
        stats = {row["id"]: row for row in _read_jsonl(analyzed)}

        # smiles -> moljson -> smiles through the primary, for the
        # equivalence check below.
        as_moljson = tmp_path / "moljson.jsonl"
        _run_primary(
            primary_cli,
            [
                "convert", "smiles", "moljson",
                "--batch", str(batch_in), "--out", str(as_moljson),
            ],
        )
        forward = {row["id"]: row for row in _read_jsonl(as_moljson)}
        back_in = tmp_path / "back_in.jsonl"
        _write_jsonl(
            back_in,
            [
                {"id": mid, "input": row["output"]}
                for mid, row in forward.items()
                if "output" in row
            ],
        )
        back_out = tmp_path / "back_out.jsonl"
        _run_primary(
            primary_cli,
            [
                "convert", "moljson", "smiles",
                "--batch", str(back_in), "--out", str(back_out),
            ],
        )
        round_trips = {row["id"]: row for row in _read_jsonl(back_out)}

    def record(mid: str, check: str, primary_value, reference_value) -> None:
        result = report.checks[check]
        result.compared += 1
        if primary_value == reference_value:
            result.agreed += 1
        else:
            report.disagreements.append(
                Disagreement(mid, check, primary_value, reference_value)
            )

    for rec in records:
        mid = rec["id"]
        primary_stats = stats.get(mid, {"error": "missing from primary output"})
        primary_ok = "error" not in primary_stats
        try:
            graph = backend.parse(rec["smiles"])
            reference_ok = True
        except SmilesError:
            graph = None
            reference_ok = False
        record(mid, "parse", primary_ok, reference_ok)
        if not (primary_ok and reference_ok):
            continue

        record(mid, "ring_count", primary_stats["ring_count"], backend.ring_count(graph))
        record(mid, "topology", primary_stats["topology"], backend.topology(graph))
        record(
            mid, "halogen_path",
            primary_stats["halogen_path"], backend.halogen_path(graph),
        )

        # The primary asserts its round trip preserves the molecule; the
        # reference verdict is the backend's own isomorphism test.
        round_trip = round_trips.get(mid, {})
        if "output" in round_trip:
            try:
                back = backend.parse(round_trip["output"])
                reference = backend.equivalent(graph, back)
            except SmilesError as exc:
                reference = f"round-trip output unparseable: {exc}"
            record(mid, "equivalence", True, reference)
        else:
            record(
                mid, "equivalence",
                round_trip.get("error", "no round-trip output"), True,
            )
    return report
