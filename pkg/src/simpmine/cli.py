"""Command line entry point.

    simpmine <stage> [--config run.yaml] [--set key=value ...] [--seed N] [flags]

Stages: ingest, extract, rank, cluster, queue, generate, eval-intrinsic,
eval-extrinsic, serve, convert-conllu. Flags mirror config keys; ``--set``
overrides anything, including nested kbc settings (``--set kbc.epochs=50``).
Each stage prints a JSON summary on success and exits non-zero on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .config import ConfigError, apply_overrides, load_config
from .corpus import CorpusError
from .filters import FilterConfigError
from .pipeline import STAGES, run_stage

# Flags that map 1:1 onto RunConfig keys.
_FLAG_KEYS = [
    "corpus", "labels", "verdicts", "filter_config", "conllu", "mentions",
    "type_a", "type_b", "relation", "run_dir", "index_dir", "sessions_dir",
    "workflow", "precision_threshold", "recall_threshold", "min_pair_count",
    "min_words", "include_sentence_root", "use_lemmas", "cluster_radius",
    "expand_clusters", "tune_threshold", "split", "session_size",
    "examples_per_item", "host", "port", "token", "seed",
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simpmine", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("stage", choices=STAGES)
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key")
    for key in _FLAG_KEYS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=f"flag_{key}",
                            default=None, metavar=key.upper())
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = list(args.overrides)
    for key in _FLAG_KEYS:
        value = getattr(args, f"flag_{key}")
        if value is not None:
            overrides.append(f"{key}={value}")
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, overrides)
        summary = run_stage(args.stage, cfg)
    except (ConfigError, CorpusError, FilterConfigError) as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return 2
    except Exception as e:  # keep stack traces out of operator-facing output
        print(json.dumps({"error": f"{type(e).__name__}: {e}"}), file=sys.stderr)
        return 1
    print(json.dumps(summary, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
