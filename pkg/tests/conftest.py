import random
from pathlib import Path

import pytest

from kava.rdf import DEFAULT_PREFIXES, BlankNode, Graph, Iri, Literal, Triple

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


def fixture_text(name):
    return (FIXTURES / name).read_text()


_PREDICATE_POOL = [
    Iri(DEFAULT_PREFIXES["skos"] + "prefLabel"),
    Iri(DEFAULT_PREFIXES["skos"] + "broader"),
    Iri(DEFAULT_PREFIXES["kava"] + "manifest"),
    Iri(DEFAULT_PREFIXES["kava"] + "value"),
    Iri(DEFAULT_PREFIXES["dct"] + "creator"),
    Iri("http://example.org/unregistered/p"),
]


def _random_literal(rng):
    pick = rng.randrange(3)
    if pick == 0:
        return Literal("v" + str(rng.randrange(1000)))
    if pick == 1:
        return Literal(str(rng.randrange(-500, 500)), "integer")
    return Literal(f"{rng.randrange(0, 100)}.{rng.randrange(1, 100)}", "decimal")


def random_tree_graph(rng: random.Random, max_triples: int = 50) -> Graph:
    """Graph whose blank nodes form trees hanging off IRI subjects."""
    graph = Graph()
    budget = rng.randrange(1, max_triples + 1)
    counter = [0]

    def fresh_bnode():
        counter[0] += 1
        return BlankNode(f"g{counter[0]}")

    def grow(subject, depth):
        nonlocal budget
        while budget > 0 and rng.random() < 0.7:
            budget -= 1
            pred = rng.choice(_PREDICATE_POOL)
            roll = rng.random()
            if roll < 0.25 and depth < 3 and budget > 0:
                child = fresh_bnode()
                graph.add(Triple(subject, pred, child))
                grow(child, depth + 1)
            elif roll < 0.5:
                graph.add(
                    Triple(subject, pred, Iri(f"http://example.org/o{rng.randrange(40)}"))
                )
            else:
                graph.add(Triple(subject, pred, _random_literal(rng)))

    while budget > 0:
        subject = Iri(f"http://example.org/s{rng.randrange(20)}")
        before = budget
        grow(subject, 0)
        if budget == before:
            budget -= 1
            graph.add(
                Triple(subject, rng.choice(_PREDICATE_POOL), _random_literal(rng))
            )
    return graph
