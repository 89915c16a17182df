"""JSON-LD subset codec: node objects with @id/@type/@context, nested
blank-node trees, and plain string/number literals."""

from __future__ import annotations

import json

from .errors import JsonLdSyntaxError, UnknownPrefix, UnsupportedKeyword
from .rdf import (
    DECIMAL,
    DEFAULT_PREFIXES,
    INTEGER,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Triple,
    canonical_form,
    expand,
    shrink,
)
from .rdf import _signature
from .turtle import RDF_TYPE


class _DecimalLexical(str):
    """Raw lexical form of a JSON number with a fraction part."""


def _expand_name(name, prefixes):
    if name.startswith("http://") or name.startswith("https://") or name.startswith("urn:"):
        return Iri(name)
    return expand(name, prefixes)


class _Reader:
    def __init__(self, prefixes):
        self.prefixes = dict(prefixes)
        self.triples = []
        self._bnode_count = 0

    def fresh_bnode(self):
        self._bnode_count += 1
        return BlankNode(f"b{self._bnode_count}")

    def read_context(self, ctx):
        if not isinstance(ctx, dict):
            raise JsonLdSyntaxError("@context must be an object of prefix mappings")
        for label, ns in ctx.items():
            if not isinstance(ns, str):
                raise JsonLdSyntaxError(
                    f"@context entry {label!r} is not a plain namespace IRI"
                )
            self.prefixes[label] = ns

    def literal(self, value):
        if isinstance(value, bool):
            raise JsonLdSyntaxError("boolean values are not supported")
        if isinstance(value, _DecimalLexical):
            return Literal(str(value), DECIMAL)
        if isinstance(value, int):
            return Literal(str(value), INTEGER)
        if isinstance(value, str):
            return Literal(value)
        raise JsonLdSyntaxError(f"unsupported literal value: {value!r}")

    def node(self, obj):
        """Emit triples for one node object; returns its subject term."""
        if not isinstance(obj, dict):
            raise JsonLdSyntaxError("node object expected")
        if "@context" in obj:
            self.read_context(obj["@context"])
        for key in obj:
            if key.startswith("@") and key not in ("@id", "@type", "@context"):
                raise UnsupportedKeyword(key)
        if "@id" in obj:
            subject = _expand_name(obj["@id"], self.prefixes)
        else:
            subject = self.fresh_bnode()
        types = obj.get("@type", [])
        if isinstance(types, str):
            types = [types]
        for name in types:
            self.triples.append(
                Triple(subject, RDF_TYPE, _expand_name(name, self.prefixes))
            )
        for key, value in obj.items():
            if key.startswith("@"):
                continue
            predicate = _expand_name(key, self.prefixes)
            values = value if isinstance(value, list) else [value]
            for v in values:
                self.triples.append(Triple(subject, predicate, self.value_term(v)))
        return subject

    def value_term(self, value):
        if isinstance(value, dict):
            keys = set(value.keys())
            if keys == {"@id"}:
                return _expand_name(value["@id"], self.prefixes)
            return self.node(value)
        if isinstance(value, list):
            raise JsonLdSyntaxError("nested arrays are not supported")
        return self.literal(value)


def parse_jsonld(text: str, prefixes=None) -> Graph:
    """Parse a JSON-LD subset document (node object or array of them)."""
    try:
        data = json.loads(text, parse_float=_DecimalLexical)
    except json.JSONDecodeError as exc:
        raise JsonLdSyntaxError(str(exc)) from exc
    base = dict(DEFAULT_PREFIXES)
    if prefixes:
        base.update(prefixes)
    reader = _Reader(base)
    nodes = data if isinstance(data, list) else [data]
    for obj in nodes:
        reader.node(obj)
    return Graph(reader.triples, reader.prefixes)


def _name_of(iri, prefixes):
    pname = shrink(iri, prefixes)
    return pname if pname is not None else iri.value


class _JsonValue:
    """Wrapper carrying an exact numeric lexical form through serialization."""

    __slots__ = ("raw",)

    def __init__(self, raw):
        self.raw = raw


def _dump(value, indent):
    pad = "  " * indent
    if isinstance(value, _JsonValue):
        return value.raw
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, list):
        if not value:
            return "[]"
        inner = ",\n".join(pad + "  " + _dump(v, indent + 1) for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            pad + "  " + json.dumps(k, ensure_ascii=False) + ": " + _dump(v, indent + 1)
            for k, v in value.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise AssertionError(f"unexpected value {value!r}")


def _literal_json(lit):
    if lit.datatype in (INTEGER, DECIMAL):
        return _JsonValue(lit.lexical)
    return lit.lexical


def _object_json(term, graph, used):
    if isinstance(term, Iri):
        name = _name_of(term, graph.prefixes)
        if ":" in name and not name.startswith("http"):
            used.add(name.split(":")[0])
        return {"@id": name}
    if isinstance(term, Literal):
        return _literal_json(term)
    return _node_json(term, graph, used, with_id=False)


def _node_json(subject, graph, used, with_id=True):
    node = {}
    if with_id:
        name = _name_of(subject, graph.prefixes)
        if ":" in name and not name.startswith("http"):
            used.add(name.split(":")[0])
        node["@id"] = name
    triples = graph.match(s=subject)
    types = [t.object for t in triples if t.predicate == RDF_TYPE]
    if types:
        names = sorted(_name_of(o, graph.prefixes) for o in types)
        for n in names:
            if ":" in n and not n.startswith("http"):
                used.add(n.split(":")[0])
        node["@type"] = names[0] if len(names) == 1 else names
    by_pred = {}
    for t in triples:
        if t.predicate == RDF_TYPE:
            continue
        by_pred.setdefault(t.predicate, []).append(t.object)
    for pred in sorted(by_pred, key=lambda p: _name_of(p, graph.prefixes)):
        key = _name_of(pred, graph.prefixes)
        if ":" in key and not key.startswith("http"):
            used.add(key.split(":")[0])
        objs = sorted(by_pred[pred], key=str)
        rendered = [_object_json(o, graph, used) for o in objs]
        node[key] = rendered[0] if len(rendered) == 1 else rendered
    return node


def serialize_jsonld(graph: Graph) -> str:
    """Serialize a Graph with tree blank nodes to a JSON-LD subset array.

    The first node object carries an explicit @context with the prefixes
    actually used. Output is pretty-printed with 2-space indentation.
    """
    canonical_form(graph)  # validates the tree precondition
    nested = {t.object for t in graph if isinstance(t.object, BlankNode)}
    used = set()
    nodes = []
    iri_subjects = sorted({t.subject for t in graph if isinstance(t.subject, Iri)}, key=str)
    root_bnodes = sorted(
        {
            t.subject
            for t in graph
            if isinstance(t.subject, BlankNode) and t.subject not in nested
        },
        key=lambda b: repr(_signature(b, graph, ())),
    )
    for subject in iri_subjects:
        nodes.append(_node_json(subject, graph, used))
    for subject in root_bnodes:
        nodes.append(_node_json(subject, graph, used, with_id=False))
    if nodes and used:
        context = {label: graph.prefixes[label] for label in sorted(used)}
        nodes[0] = {"@context": context, **nodes[0]}
    return _dump(nodes, 0) + "\n"
