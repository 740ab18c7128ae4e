#!/usr/bin/env python3
"""Serve the annotation UI on a synthetic corpus.

Builds a planted corpus, runs ingest+extract, and starts the service with
gold labels loaded so both expert workflows are available. Open
http://127.0.0.1:<port>/ui/ once it is up (build the frontend first:
`cd frontend && npm install && npm run build`).

    python3 scripts/serve_demo.py --workdir /tmp/demo --port 8724
"""

import argparse
from pathlib import Path

from simpmine import synth
from simpmine.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="demo_run")
    parser.add_argument("--port", type=int, default=8724)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--sentences", type=int, default=5_000)
    args = parser.parse_args()

    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    corpus_path = workdir / "corpus.ndjson"
    gold_path = workdir / "gold.tsv"
    if not corpus_path.exists():
        corpus = synth.generate(synth.PlantedSpec(n_sentences=args.sentences, seed=args.seed))
        synth.write_corpus(corpus_path, corpus.sentences)
        synth.write_gold_pairs(gold_path, corpus.gold_positives)

    base = ["--corpus", str(corpus_path), "--labels", str(gold_path),
            "--run-dir", str(workdir / "run"), "--seed", str(args.seed)]
    for stage in ("ingest", "extract"):
        if cli_main([stage, *base]) != 0:
            raise SystemExit(f"stage {stage} failed")
    raise SystemExit(cli_main(["serve", *base, "--port", str(args.port)]))


if __name__ == "__main__":
    main()
