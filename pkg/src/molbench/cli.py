"""Command-line surface for the benchmark pipeline.

Subcommands cover the full batch flow: corpus generation and ingestion, task
generation for the three families, single-molecule conversion/validation,
provider runs (live or replay), grading, and report aggregation. All file
interchange is line-delimited JSON except raw molecule text (SMILES / MOL
blocks / MolJSON documents).

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus as corpus_mod
from . import grading, runner, taskgen
from .graph import heavy_atom_count, molecular_formula
from .graphops import (
    Unreachable,
    classify_topology,
    halogen_atoms,
    ring_count,
    ring_sizes,
    shortest_path_bonds,
)
from .moljson import emit_schema, parse_moljson, validate_document, write_moljson
from .molfile import parse_molv2000, rescue_parse, write_molv2000
from .smiles import parse_smiles, write_smiles

_PARSERS = {
    "smiles": parse_smiles,
    "moljson": parse_moljson,
    "molv2000": parse_molv2000,
}

_WRITERS = {
    "smiles": lambda m: write_smiles(m, ordering="canonical"),
    "moljson": write_moljson,
    "molv2000": write_molv2000,
}


def _read_text(path: str | None) -> str:
    if path and path != "-":
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    return sys.stdin.read()


def _read_jsonl(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _write_jsonl(path: str, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    import tomllib

    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _write_manifest(out_path: str, args: argparse.Namespace, stage: str) -> None:
    manifest = {
        "stage": stage,
        "args": {k: v for k, v in vars(args).items() if k != "func" and v is not None},
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_tasks(path: str) -> list[taskgen.Task]:
    return [taskgen.Task(**doc) for doc in _read_jsonl(path)]


def _load_filtered(path: str) -> list[taskgen.CorpusRecord]:
    records = []
    for doc in _read_jsonl(path):
        rec = taskgen.CorpusRecord(
            external_id=doc["id"],
            smiles=doc["smiles"],
            iupac=doc.get("iupac"),
            accepted=doc.get("accepted", True),
            rejection_reason=doc.get("rejection_reason"),
        )
        if rec.accepted:
            rec.molecule = parse_smiles(rec.smiles)
        records.append(rec)
    return records


# ---------------------------------------------------------------------------
# Subcommand handlers (each returns an exit code)


def cmd_make_corpus(args) -> int:
    records = corpus_mod.curated_corpus(
        seed=args.seed, per_cell=args.per_cell, charged_per_cell=args.charged_per_cell
    )
    if args.two_halogen_per_length:
        records += corpus_mod.two_halogen_corpus(
            seed=args.seed + 1, per_length=args.two_halogen_per_length
        )
    _write_jsonl(args.out, records)
    _write_manifest(args.out, args, "make-corpus")
    return 0


def cmd_ingest(args) -> int:
    raw = _read_jsonl(args.corpus)
    records = taskgen.filter_corpus(raw, charged_allowed=not args.exclude_charged)
    rows = []
    for rec in records:
        row = {"id": rec.external_id, "smiles": rec.smiles, "accepted": rec.accepted}
        if rec.iupac:
            row["iupac"] = rec.iupac
        if rec.rejection_reason:
            row["rejection_reason"] = rec.rejection_reason
        rows.append(row)
    _write_jsonl(args.out, rows)
    _write_manifest(args.out, args, "ingest")
    return 0


def cmd_gen_translation(args) -> int:
    cfg = _load_config(args.config)
    records = [r for r in _load_filtered(args.corpus) if r.accepted]
    sample = taskgen.stratified_sample(
        records,
        heavy_range=tuple(cfg.get("heavy_range", (10, 30))),
        ring_range=tuple(cfg.get("ring_range", (0, 3))),
        per_stratum_neutral=args.per_stratum_neutral,
        per_stratum_charged=args.per_stratum_charged,
        seed=args.seed,
    )
    tasks = taskgen.gen_translation_tasks(sample, args.formats.split(","))
    _write_jsonl(args.out, [t.to_json() for t in tasks])
    _write_manifest(args.out, args, "gen-translation")
    return 0


def cmd_gen_shortest_path(args) -> int:
    records = [r for r in _load_filtered(args.corpus) if r.accepted]
    tasks = taskgen.gen_shortest_path_tasks(
        records,
        per_length_cap=args.cap,
        formats=tuple(args.formats.split(",")),
        seed=args.seed,
    )
    _write_jsonl(args.out, [t.to_json() for t in tasks])
    _write_manifest(args.out, args, "gen-shortest-path")
    return 0


def cmd_gen_constrained(args) -> int:
    sets = []
    for subset in args.subsets.split(","):
        sets.extend(taskgen.enumerate_constraint_sets(subset.strip()))
    sampled = taskgen.sample_constraint_sets(sets, per_subset_cap=args.cap, seed=args.seed)
    tasks = taskgen.gen_constrained_tasks(sampled, tuple(args.formats.split(",")))
    _write_jsonl(args.out, [t.to_json() for t in tasks])
    if args.sets_out:
        _write_jsonl(args.sets_out, [cs.to_json() for cs in sampled])
    _write_manifest(args.out, args, "gen-constrained")
    return 0


def _parse_one(fmt: str, text: str):
    return _PARSERS[fmt](text if fmt != "smiles" else text.strip())


def cmd_convert(args) -> int:
    if args.batch:
        if not args.out:
            print("--batch requires --out", file=sys.stderr)
            return 2
        rows = []
        for doc in _read_jsonl(args.batch):
            row = {"id": doc["id"]}
            try:
                row["output"] = _WRITERS[args.out_format](
                    _parse_one(args.in_format, doc["input"])
                )
            except ValueError as exc:
                row["error"] = str(exc)
            rows.append(row)
        _write_jsonl(args.out, rows)
        return 0
    text = _read_text(args.input)
    try:
        mol = _parse_one(args.in_format, text)
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    print(_WRITERS[args.out_format](mol))
    return 0


def cmd_validate(args) -> int:
    violations = validate_document(_read_text(args.input))
    for v in violations:
        print(f"{v.path}: {v.reason}")
    return 1 if violations else 0


def cmd_rescue_mol(args) -> int:
    try:
        mol = rescue_parse(_read_text(args.input))
    except ValueError as exc:
        print(f"rescue failed: {exc}", file=sys.stderr)
        return 1
    print(_WRITERS[args.to](mol))
    return 0


def _analyze_stats(mol) -> dict:
    halos = halogen_atoms(mol)
    halogen_path = None
    if len(halos) == 2:
        try:
            halogen_path = shortest_path_bonds(mol, halos[0], halos[1])
        except Unreachable:
            halogen_path = None
    return {
        "formula": molecular_formula(mol),
        "heavy_atoms": heavy_atom_count(mol),
        "ring_count": ring_count(mol),
        "ring_sizes": list(ring_sizes(mol)),
        "topology": classify_topology(mol),
        "halogen_path": halogen_path,
    }


def cmd_analyze(args) -> int:
    if args.batch:
        if not args.out:
            print("--batch requires --out", file=sys.stderr)
            return 2
        rows = []
        for doc in _read_jsonl(args.batch):
            row = {"id": doc["id"]}
            try:
                row.update(_analyze_stats(_parse_one(args.in_format, doc["input"])))
            except ValueError as exc:
                row["error"] = str(exc)
            rows.append(row)
        _write_jsonl(args.out, rows)
        return 0
    text = _read_text(args.input)
    try:
        mol = _parse_one(args.in_format, text)
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(_analyze_stats(mol), sort_keys=True))
    return 0


def cmd_run(args) -> int:
    cfg = _load_config(args.config).get("provider", {})
    config = runner.ProviderConfig(
        kind=args.provider or cfg.get("kind", "replay"),
        model=args.model or cfg.get("model", ""),
        fixtures_path=args.fixtures or cfg.get("fixtures_path"),
        parallelism=args.parallelism or cfg.get("parallelism", 4),
        max_attempts=cfg.get("max_attempts", 3),
        base_url=cfg.get("base_url"),
    )
    tasks = _load_tasks(args.tasks)
    runner.run_tasks(tasks, config, args.out)
    _write_manifest(args.out, args, "run")
    return 0


def _name_adapter(name: str | None):
    if name is None:
        return None
    if name == "synthetic":
        return corpus_mod.synthetic_name_adapter
    raise SystemExit(f"unknown name adapter {name!r}")


def cmd_grade(args) -> int:
    tasks = {t.task_id: t for t in _load_tasks(args.tasks)}
    adapter = _name_adapter(args.name_adapter)
    rows = []
    for resp in runner.load_responses(args.responses):
        task = tasks.get(resp.task_id)
        if task is None:
            print(f"response for unknown task {resp.task_id}", file=sys.stderr)
            return 1
        rows.append(grading.grade_task(task, resp.raw_text, adapter).to_json())
    rows.sort(key=lambda r: r["task_id"])
    _write_jsonl(args.out, rows)
    _write_manifest(args.out, args, "grade")
    return 0


def cmd_report(args) -> int:
    tasks = _load_tasks(args.tasks)
    grades = [
        grading.EvalRecord(
            task_id=doc["task_id"],
            status=doc["status"],
            parsed_canonical=doc.get("parsed_canonical"),
            violations=doc.get("violations", []),
            diagnostics=doc.get("diagnostics", ""),
        )
        for doc in _read_jsonl(args.grades)
    ]
    responses = _read_jsonl(args.responses) if args.responses else None
    rows = grading.aggregate_report(
        tasks, grades, responses, group_by=tuple(args.group_by.split(","))
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.csv:
        import csv

        keys = sorted({k for row in rows for k in row})
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=keys)
            writer.writeheader()
            writer.writerows(rows)
    _write_manifest(args.out, args, "report")
    return 0


def cmd_schema(args) -> int:
    print(json.dumps(emit_schema(args.variant), indent=2))
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="molbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-corpus", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-cell", type=int, default=2)
    p.add_argument("--charged-per-cell", type=int, default=0)
    p.add_argument("--two-halogen-per-length", type=int, default=0)
    p.set_defaults(func=cmd_make_corpus)

    p = sub.add_parser("ingest", help="filter a raw corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--exclude-charged", action="store_true")
    p.set_defaults(func=cmd_ingest)

    gen = sub.add_parser("gen", help="generate benchmark tasks").add_subparsers(
        dest="family", required=True
    )

    p = gen.add_parser("translation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--formats", default="smiles,moljson,molv2000")
    p.add_argument("--per-stratum-neutral", type=int, default=5)
    p.add_argument("--per-stratum-charged", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_translation)

    p = gen.add_parser("shortest-path")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--formats", default="smiles,iupac,moljson")
    p.add_argument("--cap", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_shortest_path)

    p = gen.add_parser("constrained")
    p.add_argument("--out", required=True)
    p.add_argument("--sets-out")
    p.add_argument("--subsets", default="acyclic,monocyclic,separate,fused,spiro")
    p.add_argument("--formats", default="smiles,iupac,moljson")
    p.add_argument("--cap", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_constrained)

    p = sub.add_parser("convert", help="convert molecules between formats")
    p.add_argument("in_format", choices=sorted(_PARSERS))
    p.add_argument("out_format", choices=sorted(_WRITERS))
    p.add_argument("--input", help="file path, or - for stdin (default)")
    p.add_argument("--batch", help="JSONL of {id, input} rows instead of --input")
    p.add_argument("--out", help="output JSONL path (required with --batch)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("validate", help="validate a MolJSON document")
    p.add_argument("target", choices=["moljson"])
    p.add_argument("--input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("rescue-mol", help="recover a molecule from a malformed MOL block")
    p.add_argument("--input")
    p.add_argument("--to", choices=sorted(_WRITERS), default="smiles")
    p.set_defaults(func=cmd_rescue_mol)

    p = sub.add_parser("analyze", help="graph statistics for molecules")
    p.add_argument("in_format", choices=sorted(_PARSERS))
    p.add_argument("--input")
    p.add_argument("--batch", help="JSONL of {id, input} rows instead of --input")
    p.add_argument("--out", help="output JSONL path (required with --batch)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run", help="answer tasks with a provider")
    p.add_argument("--tasks", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--provider", choices=["replay", "openai", "anthropic"])
    p.add_argument("--model")
    p.add_argument("--fixtures")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grade", help="grade recorded responses")
    p.add_argument("--tasks", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--name-adapter", choices=["synthetic"])
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("report", help="aggregate grades into accuracy rows")
    p.add_argument("--tasks", required=True)
    p.add_argument("--grades", required=True)
    p.add_argument("--responses")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.add_argument("--group-by", default="task_type,input_format,output_format")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("schema", help="emit a response schema document")
    p.add_argument("action", choices=["emit"])
    p.add_argument("--variant", choices=["standard", "enum-ranges"], default="standard")
    p.set_defaults(func=cmd_schema)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
