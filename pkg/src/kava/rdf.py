"""In-memory RDF triple graph: terms, prefix expansion, pattern matching,
and restricted isomorphism for tree-shaped blank nodes."""

from __future__ import annotations

import decimal
from dataclasses import dataclass, field

from .errors import NonTreeBlankNodes, UnknownPrefix

STRING = "string"
INTEGER = "integer"
DECIMAL = "decimal"

DEFAULT_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "skos": "http://www.w3.org/2004/02/skos/core#",
    "dct": "http://purl.org/dc/terms/",
    "foaf": "http://xmlns.com/foaf/0.1/",
    # Namespaces minted by this project; no authoritative IRIs exist for them.
    "kava": "http://example.org/kava/vocab#",
    "gps": "http://example.org/kava/gait-pattern-scheme#",
    "icd10": "http://example.org/kava/icd10#",
    "health": "http://example.org/kava/health#",
}


@dataclass(frozen=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value or any(c.isspace() for c in self.value):
            raise ValueError(f"invalid IRI: {self.value!r}")

    def __str__(self):
        return f"<{self.value}>"


@dataclass(frozen=True)
class BlankNode:
    label: str

    def __str__(self):
        return f"_:{self.label}"


def _canonical_numeric(lexical: str, datatype: str) -> str:
    try:
        if datatype == INTEGER:
            return str(int(lexical))
        d = decimal.Decimal(lexical)
    except (ValueError, decimal.InvalidOperation):
        raise ValueError(f"not a valid {datatype} literal: {lexical!r}")
    out = format(d.normalize(), "f")
    if "." not in out:
        out += ".0"
    return out


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = STRING

    def __post_init__(self):
        if self.datatype not in (STRING, INTEGER, DECIMAL):
            raise ValueError(f"unsupported datatype: {self.datatype!r}")
        if self.datatype != STRING:
            object.__setattr__(
                self, "lexical", _canonical_numeric(self.lexical, self.datatype)
            )

    def value(self):
        """Lexical form as a Python value (str, int, or float)."""
        if self.datatype == INTEGER:
            return int(self.lexical)
        if self.datatype == DECIMAL:
            return float(self.lexical)
        return self.lexical

    def __str__(self):
        if self.datatype == STRING:
            escaped = self.lexical.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        return f'"{self.lexical}"^^{self.datatype}'


Term = Iri | BlankNode | Literal


def literal_for(value) -> Literal:
    """Wrap a Python value as the matching Literal."""
    if isinstance(value, bool):
        raise ValueError("boolean literals are not supported")
    if isinstance(value, int):
        return Literal(str(value), INTEGER)
    if isinstance(value, float):
        return Literal(repr(value), DECIMAL)
    return Literal(str(value), STRING)


@dataclass(frozen=True)
class Triple:
    subject: Term
    predicate: Iri
    object: Term

    def __post_init__(self):
        if isinstance(self.subject, Literal):
            raise ValueError("triple subject cannot be a literal")
        if not isinstance(self.predicate, Iri):
            raise ValueError("triple predicate must be an IRI")

    def sort_key(self):
        return (str(self.subject), str(self.predicate), str(self.object))


def expand(name: str, prefixes: dict[str, str]) -> Iri:
    """Expand a prefixed name like ``skos:prefLabel`` to a full IRI."""
    if name.count(":") != 1:
        raise ValueError(f"not a prefixed name: {name!r}")
    label, local = name.split(":")
    if label not in prefixes:
        raise UnknownPrefix(label)
    return Iri(prefixes[label] + local)


def shrink(iri: Iri, prefixes: dict[str, str]) -> str | None:
    """Inverse of expand using the longest registered namespace, or None."""
    best = None
    for label, ns in prefixes.items():
        if iri.value.startswith(ns) and (best is None or len(ns) > len(prefixes[best])):
            best = label
    if best is None:
        return None
    return f"{best}:{iri.value[len(prefixes[best]):]}"


class Graph:
    """A set of triples plus a prefix map.

    Treat instances as immutable once populated; all read operations are
    pure and safe for concurrent readers.
    """

    def __init__(self, triples=(), prefixes=None):
        self._triples: set[Triple] = set(triples)
        self.prefixes: dict[str, str] = dict(
            prefixes if prefixes is not None else DEFAULT_PREFIXES
        )

    def __len__(self):
        return len(self._triples)

    def __iter__(self):
        return iter(sorted(self._triples, key=Triple.sort_key))

    def __contains__(self, triple):
        return triple in self._triples

    def __eq__(self, other):
        return isinstance(other, Graph) and self._triples == other._triples

    def __hash__(self):
        return hash(frozenset(self._triples))

    def add(self, triple: Triple) -> "Graph":
        self._triples.add(triple)
        return self

    def copy(self) -> "Graph":
        return Graph(self._triples, self.prefixes)

    def discard(self, triple: Triple) -> "Graph":
        self._triples.discard(triple)
        return self

    def match(self, s=None, p=None, o=None) -> list[Triple]:
        """Triples matching the bound positions; None is a wildcard.

        Result is sorted by canonical (subject, predicate, object) strings.
        """
        found = [
            t
            for t in self._triples
            if (s is None or t.subject == s)
            and (p is None or t.predicate == p)
            and (o is None or t.object == o)
        ]
        found.sort(key=Triple.sort_key)
        return found

    def subjects(self) -> list[Term]:
        seen = sorted({t.subject for t in self._triples}, key=str)
        return seen

    def expand(self, name: str) -> Iri:
        return expand(name, self.prefixes)


def insert(graph: Graph, triple: Triple) -> Graph:
    """Copy-on-write insertion; idempotent under set semantics."""
    return graph.copy().add(triple)


def _blank_object_counts(graph: Graph):
    counts: dict[BlankNode, int] = {}
    for t in graph:
        if isinstance(t.object, BlankNode):
            counts[t.object] = counts.get(t.object, 0) + 1
    return counts


def _signature(term: Term, graph: Graph, stack: tuple, visited: set | None = None) -> tuple:
    if not isinstance(term, BlankNode):
        return ("term", str(term))
    if term in stack:
        raise NonTreeBlankNodes(f"cycle through blank node {term}")
    if visited is not None:
        visited.add(term)
    children = tuple(
        sorted(
            (
                (str(t.predicate), _signature(t.object, graph, stack + (term,), visited))
                for t in graph.match(s=term)
            ),
            key=repr,
        )
    )
    return ("bnode", children)


def canonical_form(graph: Graph) -> tuple:
    """Order- and label-independent form of a graph with tree blank nodes.

    Raises NonTreeBlankNodes if any blank node is the object of more than
    one triple or blank nodes form a cycle.
    """
    counts = _blank_object_counts(graph)
    for node, n in counts.items():
        if n > 1:
            raise NonTreeBlankNodes(f"blank node {node} is object of {n} triples")
    visited = set()
    entries = []
    roots = {}
    for t in graph:
        if isinstance(t.subject, BlankNode):
            if t.subject in counts:
                continue  # folded into the parent's signature
            if t.subject not in roots:
                roots[t.subject] = _signature(t.subject, graph, (), visited)
        else:
            entries.append(
                (
                    "triple",
                    str(t.subject),
                    str(t.predicate),
                    _signature(t.object, graph, (), visited),
                )
            )
    entries.extend(("root", sig) for sig in roots.values())
    unreached = {
        t.subject for t in graph if isinstance(t.subject, BlankNode)
    } - visited - set(roots)
    if unreached:
        raise NonTreeBlankNodes(
            f"blank nodes unreachable from any root: {sorted(map(str, unreached))}"
        )
    return tuple(sorted(entries, key=repr))


def isomorphic_trees(a: Graph, b: Graph) -> bool:
    """True iff some blank-node relabeling makes the triple sets equal."""
    return canonical_form(a) == canonical_form(b)
