#!/usr/bin/env python
"""Run the protection-vs-budget evaluation grid on a synthetic corpus.

Convenience wrapper around hideseek.evalgrid for quick desk runs:

    python scripts/run_protection_grid.py --n-docs 200 --seed 3
    python scripts/run_protection_grid.py --corpus my_docs.jsonl --json

The same grid is reachable through `hideseek eval`; this script exists so
the harness can be profiled or tweaked without going through argv parsing
of the full CLI.
"""

from __future__ import annotations

import argparse
import json
import time

from hideseek.corpus import SynthDoc, synth_corpus
from hideseek.dataset import read_corpus
from hideseek.evalgrid import format_eval_table, run_eval_grid


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", help="JSONL or plain-text corpus; omitted = synthetic docs")
    parser.add_argument("--n-docs", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", action="store_true", help="emit the raw grid as JSON")
    args = parser.parse_args()

    if args.corpus:
        docs = [SynthDoc(text=text, label="") for text in read_corpus(args.corpus)]
    else:
        docs = synth_corpus(args.n_docs, seed=args.seed)

    started = time.perf_counter()
    grid = run_eval_grid(docs, seed=args.seed)
    elapsed = time.perf_counter() - started

    if args.json:
        print(json.dumps(grid.to_dict(), indent=2, ensure_ascii=False))
    else:
        print(format_eval_table(grid))
    print(f"[{len(docs)} docs in {elapsed:.1f}s]")


if __name__ == "__main__":
    main()
