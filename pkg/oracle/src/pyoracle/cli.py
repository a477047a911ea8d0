from __future__ import annotations

import argparse
import json
import sys

from .backends import ToolchainMissing
from .crosscheck import crosscheck


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="pyoracle")
    sub = parser.add_subparsers(dest="command", required=True)
    cc = sub.add_parser(
        "crosscheck", help="cross-validate the primary toolkit over a corpus"
    )
    cc.add_argument("--corpus", required=True, help="JSONL with id/smiles rows")
    cc.add_argument("--out", help="write the full agreement report here")
    cc.add_argument(
        "--primary-cli", default="molbench",
        help="command invoking the primary toolkit (default: molbench)",
    )
    cc.add_argument(
        "--backend", default="auto", choices=("auto", "rdkit", "networkx")
    )
    args = parser.parse_args(argv)

    try:
        report = crosscheck(args.corpus, args.primary_cli, args.backend)
    except (ToolchainMissing, RuntimeError, OSError) as exc:
        print(f"crosscheck failed: {exc}", file=sys.stderr)
        return 1
    payload = report.to_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    summary = {k: v for k, v in payload.items() if k != "disagreements"}
    summary["disagreements"] = len(payload["disagreements"])
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
