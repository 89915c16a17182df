"""Structured explicit domain knowledge for visual analytics: SKOS
concepts, their manifestation in datasets, and declarative utilization
fragments, plus a clinical gait case study."""

from .rdf import (
    DEFAULT_PREFIXES,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Triple,
    expand,
    insert,
    isomorphic_trees,
    shrink,
)
from .turtle import parse_turtle, serialize_turtle
from .jsonld import parse_jsonld, serialize_jsonld

__all__ = [
    "DEFAULT_PREFIXES",
    "BlankNode",
    "Graph",
    "Iri",
    "Literal",
    "Triple",
    "expand",
    "insert",
    "isomorphic_trees",
    "shrink",
    "parse_turtle",
    "serialize_turtle",
    "parse_jsonld",
    "serialize_jsonld",
]

__version__ = "0.1.0"
