#!/usr/bin/env python3
"""Launch a real annotation service on a synthetic index, for the frontend
round-trip test. Usage: serve_fixture.py --port 8951 --dir /tmp/xyz"""

import argparse
import itertools

import uvicorn

from simpmine.corpus import EntityPair
from simpmine.index import IndexRecord, PairIndex
from simpmine.service import create_app
from simpmine.sessions import SessionStore

WORDS = ["ancient", "breeze", "crystal", "dromedary", "elephant", "falconry",
         "glacier", "harbormaster", "islander", "jaguar", "kestrel", "lagoon",
         "meridian", "nocturne", "obsidian", "palisade", "quicksilver", "rampart",
         "sycamore", "tundra", "umbrella", "vagabond", "wisteria", "xylophone"]


def build_index() -> PairIndex:
    index = PairIndex()
    for k, word in enumerate(WORDS):
        key = f"GENE {word} DISEASE"
        for i in range(4):
            pair = EntityPair(f"G:{k}-{i}", "D:1", "GENE", "DISEASE")
            index.insert(IndexRecord(
                doc_id="d", sent_id=f"{k}-{i}", pair=pair, simplification_key=key,
                display=f"~root~ GENE {word} DISEASE + hedging:[may]",
                sentence_text=f"{pair.a_id} {word} D:1 (sentence {i})",
                n_words=3))
    return index


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, required=True)
    parser.add_argument("--dir", required=True)
    args = parser.parse_args()
    store = SessionStore(args.dir, build_index())
    app = create_app(store)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
