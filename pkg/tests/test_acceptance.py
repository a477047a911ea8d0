"""Acceptance suite: one criterion per test, one printed pass/fail line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines inline.
"""

from __future__ import annotations

import functools
import itertools
import json
import random
import time

import pytest

from molbench.canon import canonical_form, same_molecule
from molbench.cli import main as cli_main
from molbench.corpus import curated_corpus
from molbench.grading import check_constraints, grade_translation, wilson_interval
from molbench.graph import Atom, Bond, build_molecule, heavy_atom_count, permute_molecule
from molbench.graphops import fragment_count, ring_count, shortest_path_bonds
from molbench.moljson import parse_moljson, write_moljson
from molbench.molfile import parse_molv2000, rescue_parse, write_molv2000
from molbench.smiles import parse_smiles, write_smiles
from molbench.taskgen import (
    enumerate_constraint_sets,
    filter_corpus,
    gen_constrained_tasks,
    gen_translation_tasks,
    sample_constraint_sets,
    stratified_sample,
)

from conftest import (
    ACETIC_MOLBLOCK,
    ACETIC_MOLJSON,
    ACETIC_SMILES,
    brute_force_isomorphic,
    floyd_warshall,
)
from test_grading import wilson_decimal


def criterion(name):
    """Print exactly one PASS/FAIL line for one acceptance criterion."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"FAIL  {name}")
                raise
            print(f"PASS  {name}")

        return wrapper

    return deco


@pytest.fixture(scope="module")
def corpus_1000():
    records = curated_corpus(seed=23, per_cell=12)[:1000]
    assert len(records) == 1000
    return [(r["id"], parse_smiles(r["smiles"])) for r in records]


class TestAcceptance:
    @criterion("figure-1 fixture closure across all three formats")
    def test_figure1_closure(self):
        started = time.monotonic()
        from_smiles = parse_smiles(ACETIC_SMILES)
        from_block = parse_molv2000(ACETIC_MOLBLOCK)
        from_doc = parse_moljson(ACETIC_MOLJSON)
        for a, b in itertools.combinations((from_smiles, from_block, from_doc), 2):
            assert same_molecule(a, b)
        doc = json.loads(write_moljson(from_smiles))
        assert [a["id"] for a in doc["atoms"]] == ["C1", "C2", "O1", "O2"]
        assert [b["order"] for b in doc["bonds"]] == [1, 2, 1]
        assert time.monotonic() - started < 1.0

    @criterion("1,000-molecule round-trip through every format, 100%, <30s")
    def test_round_trip_corpus(self, corpus_1000):
        started = time.monotonic()
        failures = []
        for ext_id, mol in corpus_1000:
            for writer, reader in (
                (write_smiles, parse_smiles),
                (write_molv2000, parse_molv2000),
                (write_moljson, parse_moljson),
            ):
                if not same_molecule(reader(writer(mol)), mol):
                    failures.append((ext_id, writer.__name__))
        assert not failures, failures[:10]
        assert time.monotonic() - started < 30.0

    @criterion("canonical form invariant over 200 molecules x 100 permutations")
    def test_canonical_invariance(self, corpus_1000):
        rng = random.Random(99)
        failures = 0
        for _, mol in corpus_1000[:200]:
            base = canonical_form(mol)
            n = len(mol.atoms)
            for _ in range(100):
                perm = list(range(n))
                rng.shuffle(perm)
                if canonical_form(permute_molecule(mol, perm)) != base:
                    failures += 1
        assert failures == 0

    @criterion("same_molecule agrees with brute-force isomorphism (<=7 heavy)")
    def test_brute_force_oracle(self):
        from test_canon import enumerate_small_molecules

        molecules = [m for m in enumerate_small_molecules() if len(m.atoms) <= 7]
        rng = random.Random(12)
        pool = rng.sample(molecules, 130)
        disagreements = sum(
            1
            for a, b in itertools.combinations(pool, 2)
            if same_molecule(a, b) != brute_force_isomorphic(a, b)
        )
        assert disagreements == 0

    @criterion("ring-count identity on 10,000 random graphs + Floyd-Warshall oracle")
    def test_graph_identities(self, corpus_1000):
        rng = random.Random(3)
        for _ in range(10_000):
            n = rng.randint(1, 10)
            possible = [(a, b) for a in range(n) for b in range(a + 1, n)]
            edges = rng.sample(possible, min(len(possible), rng.randint(0, 14)))
            mol = build_molecule([Atom("*")] * n, [Bond(a, b) for a, b in edges])
            assert ring_count(mol) == len(edges) - n + fragment_count(mol)

        small = [m for _, m in corpus_1000 if heavy_atom_count(m) <= 12]
        assert small, "corpus has no <=12-heavy molecules"
        for mol in small:
            dist = floyd_warshall(mol)
            for i in range(len(mol.atoms)):
                for j in range(len(mol.atoms)):
                    assert shortest_path_bonds(mol, i, j) == dist[i][j]

    @criterion("generator-checker closure on all five subsets incl. figure tuple")
    def test_generator_checker_closure(self):
        started = time.monotonic()
        figure_key = ((5, 5, 6), (5, 6), "spiro")
        seen_figure = False
        for subset in ("acyclic", "monocyclic", "separate", "fused", "spiro"):
            sets = enumerate_constraint_sets(subset)
            assert sets, f"no constraint sets for {subset}"
            for cs in sets:
                assert check_constraints(cs.witness, cs) == [], (subset, cs.key())
                if cs.key() == figure_key:
                    seen_figure = True
            sampled = sample_constraint_sets(sets, per_subset_cap=100, seed=0)
            assert len(sampled) <= 100
        assert seen_figure
        assert time.monotonic() - started < 300.0

    @criterion("task count arithmetic: molecules x formats x (formats - 1)")
    def test_count_arithmetic(self):
        records = filter_corpus(curated_corpus(seed=31, per_cell=5))
        sample = stratified_sample(records, per_stratum_neutral=5, seed=0)
        assert len(sample) == 420
        tasks3 = gen_translation_tasks(sample, ["smiles", "moljson", "molv2000"])
        assert len(tasks3) == 2520 == 420 * 3 * 2
        tasks2 = gen_translation_tasks(sample, ["smiles", "moljson"])
        assert len(tasks2) == 420 * 2 * 1
        # the paper-scale configuration follows the same closed form
        assert 420 * 6 * 5 == 12_600

        sets = sample_constraint_sets(
            enumerate_constraint_sets("spiro"), per_subset_cap=100, seed=0
        )
        tasks = gen_constrained_tasks(sets, formats=("smiles", "iupac", "moljson"))
        assert len(tasks) == len(sets) * 3

    @criterion("wilson interval boundary exactness and 1e-9 oracle agreement")
    def test_wilson(self):
        for n in (1, 7, 100, 12345):
            assert wilson_interval(0, n)[0] == 0.0
            assert wilson_interval(n, n)[1] == 1.0
        low, high = wilson_interval(50, 100, 1.96)
        dlow, dhigh = wilson_decimal(50, 100, "1.96")
        assert abs(low - float(dlow)) < 1e-9
        assert abs(high - float(dhigh)) < 1e-9

    @criterion("rescue parser: >=95% on 500 corruptions, 100% equal on clean")
    def test_rescue_parser(self, corpus_1000):
        rng = random.Random(8)
        molecules = [m for _, m in rng.sample(corpus_1000, 100)]

        def move_counts(lines, rng):
            lines = list(lines)
            lines.append(lines.pop(3))
            return lines

        def wrong_counts(lines, rng):
            lines = list(lines)
            lines[3] = f"{rng.randint(90, 999):3d}{rng.randint(90, 999):3d}" + lines[3][6:]
            return lines

        def drop_header(lines, rng):
            return lines[3:]

        def drop_header_and_counts(lines, rng):
            return lines[4:]

        def prose_wrap(lines, rng):
            return ["Sure! Here is the molecule you asked for:", ""] + list(lines)

        corruptions = (
            move_counts,
            wrong_counts,
            drop_header,
            drop_header_and_counts,
            prose_wrap,
        )
        total = recovered = 0
        for mol in molecules:
            block = write_molv2000(mol)
            assert same_molecule(rescue_parse(block), parse_molv2000(block))
            lines = block.splitlines()
            for corrupt in corruptions:
                total += 1
                try:
                    if same_molecule(rescue_parse("\n".join(corrupt(lines, rng))), mol):
                        recovered += 1
                except ValueError:
                    pass
        assert total == 500
        assert recovered / total >= 0.95, f"recovered {recovered}/{total}"

    @criterion("error staging matches the reference taxonomy exactly")
    def test_staging_fixtures(self):
        truth = canonical_form(parse_smiles(ACETIC_SMILES))
        zero_atoms = json.dumps(
            {"atoms": [], "bonds": [], "charges": None, "aromatic_n_h": None}
        )
        fixtures = [
            ("", "smiles", "empty"),
            ("", "moljson", "empty"),
            ("   \n\t", "molv2000", "empty"),
            (zero_atoms, "moljson", "empty"),
            ("I cannot help with that request.", "smiles", "invalid"),
            ("CONVERSION_NOT_POSSIBLE", "smiles", "invalid"),
            ("{not json", "moljson", "invalid"),
            ("CCO", "smiles", "wrong_molecule"),
            (write_moljson(parse_smiles("CCC(=O)O")), "moljson", "wrong_molecule"),
            ("CC(=O)O", "smiles", "correct"),
            (ACETIC_MOLJSON, "moljson", "correct"),
            (write_molv2000(parse_smiles(ACETIC_SMILES)), "molv2000", "correct"),
            ("acetic acid", "iupac", "ungradable"),
        ]
        for text, fmt, expected in fixtures:
            got = grade_translation(text, fmt, truth).status
            assert got == expected, (text[:40], fmt, got, expected)

    @criterion("offline pipeline is byte-deterministic across two runs")
    def test_offline_determinism(self, tmp_path):
        def pipeline(root):
            root.mkdir()
            corpus = root / "corpus.jsonl"
            filtered = root / "filtered.jsonl"
            tasks = root / "tasks.jsonl"
            fixtures = root / "fixtures.jsonl"
            responses = root / "responses.jsonl"
            grades = root / "grades.jsonl"
            report = root / "report.json"
            assert cli_main(["make-corpus", "--out", str(corpus), "--seed", "3",
                             "--per-cell", "1"]) == 0
            assert cli_main(["ingest", "--corpus", str(corpus),
                             "--out", str(filtered)]) == 0
            assert cli_main(["gen", "translation", "--corpus", str(filtered),
                             "--out", str(tasks), "--per-stratum-neutral", "1",
                             "--formats", "smiles,moljson", "--seed", "3"]) == 0
            rows = [json.loads(line) for line in tasks.read_text().splitlines()]
            with open(fixtures, "w") as fh:
                for i, row in enumerate(rows):
                    text = row["prompt"].splitlines()[2] if i % 2 else ""
                    fh.write(json.dumps(
                        {"task_id": row["task_id"], "raw_text": text,
                         "output_tokens": 11}) + "\n")
            assert cli_main(["run", "--tasks", str(tasks), "--out", str(responses),
                             "--provider", "replay",
                             "--fixtures", str(fixtures)]) == 0
            assert cli_main(["grade", "--tasks", str(tasks),
                             "--responses", str(responses),
                             "--out", str(grades)]) == 0
            assert cli_main(["report", "--tasks", str(tasks),
                             "--grades", str(grades),
                             "--responses", str(responses),
                             "--out", str(report)]) == 0
            return grades.read_bytes(), report.read_bytes()

        first = pipeline(tmp_path / "run1")
        second = pipeline(tmp_path / "run2")
        assert first == second
