#!/usr/bin/env python3
"""Cross-format round-trip checker for knowledge files.

For each given .ttl or .jsonld file, converts it through the other format
and back and reports whether the reloaded graph is isomorphic (treating
blank-node trees structurally).
"""

import argparse
import sys
from pathlib import Path

from kava.jsonld import parse_jsonld, serialize_jsonld
from kava.rdf import isomorphic_trees
from kava.turtle import parse_turtle, serialize_turtle


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("paths", nargs="+", help=".ttl or .jsonld files")
    args = parser.parse_args()
    failures = 0
    for path in args.paths:
        p = Path(path)
        text = p.read_text()
        if p.suffix == ".ttl":
            graph = parse_turtle(text)
            back = parse_turtle(
                serialize_turtle(parse_jsonld(serialize_jsonld(graph), graph.prefixes)),
                graph.prefixes,
            )
        elif p.suffix == ".jsonld":
            graph = parse_jsonld(text)
            back = parse_jsonld(
                serialize_jsonld(parse_turtle(serialize_turtle(graph), graph.prefixes)),
                graph.prefixes,
            )
        else:
            print(f"{path}: SKIP (unknown extension)")
            continue
        ok = isomorphic_trees(graph, back)
        print(f"{path}: {'OK' if ok else 'MISMATCH'} ({len(graph)} triples)")
        failures += 0 if ok else 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
