"""Direct and indirect concept-to-data mappings with provenance, stored
as blank-node trees under the kava: vocabulary."""

from __future__ import annotations

from dataclasses import dataclass, field

from .dataset import Dataset
from .errors import (
    ForeignDialect,
    InvalidKind,
    MalformedManifestation,
    UnknownVariable,
)
from .predicate import Predicate, compile_predicate, parse_predicate, variables
from .rdf import (
    DEFAULT_PREFIXES,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Triple,
    literal_for,
)

KAVA_NS = DEFAULT_PREFIXES["kava"]
DCT_NS = DEFAULT_PREFIXES["dct"]
FOAF_NS = DEFAULT_PREFIXES["foaf"]

KAVA_MANIFEST = Iri(KAVA_NS + "manifest")
KAVA_IS_PROTOTYPE = Iri(KAVA_NS + "isPrototype")
KAVA_MATCH_VARIABLE = Iri(KAVA_NS + "matchVariable")
KAVA_MATCH_QUERY = Iri(KAVA_NS + "matchQuery")
KAVA_VARIABLE = Iri(KAVA_NS + "variable")
KAVA_VALUE = Iri(KAVA_NS + "value")
KAVA_MIN_VALUE = Iri(KAVA_NS + "minValue")
KAVA_MAX_VALUE = Iri(KAVA_NS + "maxValue")
KAVA_DIALECT = Iri(KAVA_NS + "queryDialect")
DCT_CREATOR = Iri(DCT_NS + "creator")
DCT_DATE_SUBMITTED = Iri(DCT_NS + "dateSubmitted")
FOAF_NAME = Iri(FOAF_NS + "name")

KAVA_PREDICATE_DIALECT = "kava-predicate"


@dataclass(frozen=True)
class Provenance:
    creator_name: str | None = None
    date_submitted: str | None = None

    def is_empty(self):
        return self.creator_name is None and self.date_submitted is None


@dataclass(frozen=True)
class DirectMapping:
    bindings: tuple  # of (variable, value)


@dataclass(frozen=True)
class IndirectVariableMapping:
    variable: str | Iri
    min_value: float | int | None = None
    max_value: float | int | None = None

    def variable_name(self) -> str:
        """Plain dataset variable name; IRIs reduce to their local part."""
        if isinstance(self.variable, Iri):
            v = self.variable.value
            for sep in ("#", "/"):
                if sep in v:
                    v = v.rsplit(sep, 1)[1]
                    break
            return v
        return self.variable


@dataclass(frozen=True)
class IndirectQueryMapping:
    query_text: str
    dialect: str = KAVA_PREDICATE_DIALECT


Kind = DirectMapping | IndirectVariableMapping | IndirectQueryMapping


@dataclass(frozen=True)
class Manifestation:
    concept: Iri
    kind: Kind
    provenance: Provenance = Provenance()
    anchor: str = ""  # stable synthetic identifier assigned on load


def _literal_value(term):
    if isinstance(term, Literal):
        return term.value()
    return None


def _extract_provenance(graph, node):
    creator = None
    for t in graph.match(s=node, p=DCT_CREATOR):
        if isinstance(t.object, BlankNode):
            for t2 in graph.match(s=t.object, p=FOAF_NAME):
                creator = _literal_value(t2.object)
        elif isinstance(t.object, Literal):
            creator = t.object.lexical
    date = None
    for t in graph.match(s=node, p=DCT_DATE_SUBMITTED):
        date = _literal_value(t.object)
    return Provenance(creator_name=creator, date_submitted=date)


def _load_direct(graph, subject, node):
    bindings = []
    for t in graph.match(s=node, p=KAVA_IS_PROTOTYPE):
        proto = t.object
        if not isinstance(proto, BlankNode):
            raise MalformedManifestation(str(subject), "kava:isPrototype must be a node")
        var = None
        val = None
        for t2 in graph.match(s=proto, p=KAVA_VARIABLE):
            var = (
                t2.object.lexical
                if isinstance(t2.object, Literal)
                else t2.object
            )
        for t2 in graph.match(s=proto, p=KAVA_VALUE):
            val = _literal_value(t2.object)
        if var is None or val is None:
            raise MalformedManifestation(
                str(subject), "prototype needs kava:variable and kava:value"
            )
        if isinstance(var, Iri):
            var = IndirectVariableMapping(var).variable_name()
        bindings.append((var, val))
    bindings.sort(key=lambda b: str(b[0]))
    return DirectMapping(bindings=tuple(bindings))


def _load_indirect_variable(graph, subject, node):
    mv = graph.match(s=node, p=KAVA_MATCH_VARIABLE)
    if len(mv) != 1:
        raise MalformedManifestation(str(subject), "expected one kava:matchVariable")
    inner = mv[0].object
    if not isinstance(inner, BlankNode):
        raise MalformedManifestation(str(subject), "kava:matchVariable must be a node")
    var = None
    for t in graph.match(s=inner, p=KAVA_VARIABLE):
        var = t.object.lexical if isinstance(t.object, Literal) else t.object
    if var is None:
        raise MalformedManifestation(str(subject), "matchVariable needs kava:variable")
    lo = hi = None
    for t in graph.match(s=inner, p=KAVA_MIN_VALUE):
        lo = _literal_value(t.object)
    for t in graph.match(s=inner, p=KAVA_MAX_VALUE):
        hi = _literal_value(t.object)
    if lo is None and hi is None:
        raise MalformedManifestation(str(subject), "matchVariable needs a bound")
    if lo is not None and hi is not None and lo > hi:
        raise MalformedManifestation(str(subject), "minValue exceeds maxValue")
    return IndirectVariableMapping(variable=var, min_value=lo, max_value=hi)


def _load_indirect_query(graph, subject, node):
    texts = [
        t.object.lexical
        for t in graph.match(s=node, p=KAVA_MATCH_QUERY)
        if isinstance(t.object, Literal)
    ]
    if len(texts) != 1:
        raise MalformedManifestation(str(subject), "expected one kava:matchQuery string")
    dialect = KAVA_PREDICATE_DIALECT
    for t in graph.match(s=node, p=KAVA_DIALECT):
        if isinstance(t.object, Literal):
            dialect = t.object.lexical
    if dialect == KAVA_PREDICATE_DIALECT:
        parse_predicate(texts[0])  # must parse under the native dialect
    return IndirectQueryMapping(query_text=texts[0], dialect=dialect)


def load_manifestations(graph: Graph) -> list[Manifestation]:
    """One Manifestation per (concept, kava:manifest, node) triple.

    Raises MalformedManifestation for nodes with zero or several kinds.
    """
    out = []
    for t in graph.match(p=KAVA_MANIFEST):
        subject = t.subject
        if not isinstance(subject, Iri):
            raise MalformedManifestation(str(subject), "manifest subject must be an IRI")
        node = t.object
        if not isinstance(node, BlankNode):
            raise MalformedManifestation(str(subject), "manifest object must be a node")
        kinds = []
        if graph.match(s=node, p=KAVA_IS_PROTOTYPE):
            kinds.append(_load_direct(graph, subject, node))
        if graph.match(s=node, p=KAVA_MATCH_VARIABLE):
            kinds.append(_load_indirect_variable(graph, subject, node))
        if graph.match(s=node, p=KAVA_MATCH_QUERY):
            kinds.append(_load_indirect_query(graph, subject, node))
        if len(kinds) != 1:
            raise MalformedManifestation(
                str(subject), f"expected exactly one mapping kind, found {len(kinds)}"
            )
        out.append(
            Manifestation(
                concept=subject,
                kind=kinds[0],
                provenance=_extract_provenance(graph, node),
            )
        )
    out.sort(key=lambda m: (str(m.concept), repr(m.kind)))
    return [
        Manifestation(m.concept, m.kind, m.provenance, anchor=f"m{i}")
        for i, m in enumerate(out)
    ]


def _validate_kind(kind):
    if isinstance(kind, DirectMapping):
        if not kind.bindings:
            raise InvalidKind("direct mapping needs at least one binding")
    elif isinstance(kind, IndirectVariableMapping):
        if kind.min_value is None and kind.max_value is None:
            raise InvalidKind("indirect variable mapping needs at least one bound")
        if (
            kind.min_value is not None
            and kind.max_value is not None
            and kind.min_value > kind.max_value
        ):
            raise InvalidKind("minValue exceeds maxValue")
    elif isinstance(kind, IndirectQueryMapping):
        if kind.dialect == KAVA_PREDICATE_DIALECT:
            parse_predicate(kind.query_text)
    else:
        raise InvalidKind(f"unknown mapping kind: {kind!r}")


def create_manifestation(
    concept: Iri, kind: Kind, creator_name: str | None = None, date: str | None = None
) -> Manifestation:
    """Build a manifestation stamped with provenance."""
    _validate_kind(kind)
    return Manifestation(
        concept=concept,
        kind=kind,
        provenance=Provenance(creator_name=creator_name, date_submitted=date),
    )


def evaluate_manifestation(m: Manifestation, dataset: Dataset) -> set:
    """Record identifiers matched by the manifestation.

    Raises ForeignDialect for query mappings in a foreign dialect and
    UnknownVariable when a referenced variable is not in the schema.
    """
    known = set(dataset.schema.names())
    kind = m.kind
    if isinstance(kind, DirectMapping):
        for var, _ in kind.bindings:
            if var not in known:
                raise UnknownVariable(str(var))
        matched = []
        for record in dataset.records:
            vals = record.as_dict()
            if all(vals.get(var) == value for var, value in kind.bindings):
                matched.append(record)
        return {r.identifier(dataset.schema) for r in matched}
    if isinstance(kind, IndirectVariableMapping):
        name = kind.variable_name()
        if name not in known:
            raise UnknownVariable(name)
        out = set()
        for record in dataset.records:
            v = record.get(name)
            if v is None or isinstance(v, str):
                continue
            if kind.min_value is not None and v < kind.min_value:
                continue
            if kind.max_value is not None and v > kind.max_value:
                continue
            out.add(record.identifier(dataset.schema))
        return out
    if isinstance(kind, IndirectQueryMapping):
        if kind.dialect != KAVA_PREDICATE_DIALECT:
            raise ForeignDialect(kind.dialect)
        pred = parse_predicate(kind.query_text)
        missing = variables(pred) - known
        if missing:
            raise UnknownVariable(", ".join(sorted(missing)))
        test = compile_predicate(pred)
        return {
            r.identifier(dataset.schema) for r in dataset.records if test(r.as_dict())
        }
    raise InvalidKind(f"unknown mapping kind: {kind!r}")


def evaluate_concept(
    manifestations: list[Manifestation], concept: Iri, dataset: Dataset
) -> set:
    """Union of all evaluable manifestations of one concept."""
    out = set()
    for m in manifestations:
        if m.concept == concept:
            out |= evaluate_manifestation(m, dataset)
    return out


def prototype_conflicts(manifestations, dataset: Dataset) -> dict:
    """Per concept: prototype records that fall outside every indirect
    mapping's region. Reported, not resolved."""
    by_concept = {}
    for m in manifestations:
        by_concept.setdefault(m.concept, []).append(m)
    out = {}
    for concept, ms in by_concept.items():
        direct = [m for m in ms if isinstance(m.kind, DirectMapping)]
        indirect = [m for m in ms if not isinstance(m.kind, DirectMapping)]
        if not direct or not indirect:
            continue
        proto_ids = set()
        for m in direct:
            proto_ids |= evaluate_manifestation(m, dataset)
        region = set()
        for m in indirect:
            try:
                region |= evaluate_manifestation(m, dataset)
            except ForeignDialect:
                continue
        conflicts = proto_ids - region
        if conflicts:
            out[concept] = conflicts
    return out


class _BnodeAllocator:
    def __init__(self, start=0):
        self.count = start

    def fresh(self):
        self.count += 1
        return BlankNode(f"m{self.count}")


def _kind_triples(node, kind, alloc, triples):
    if isinstance(kind, DirectMapping):
        for var, value in kind.bindings:
            proto = alloc.fresh()
            triples.append(Triple(node, KAVA_IS_PROTOTYPE, proto))
            triples.append(Triple(proto, KAVA_VARIABLE, literal_for(var)))
            triples.append(Triple(proto, KAVA_VALUE, literal_for(value)))
    elif isinstance(kind, IndirectVariableMapping):
        inner = alloc.fresh()
        triples.append(Triple(node, KAVA_MATCH_VARIABLE, inner))
        var = kind.variable if isinstance(kind.variable, Iri) else literal_for(kind.variable)
        triples.append(Triple(inner, KAVA_VARIABLE, var))
        if kind.min_value is not None:
            triples.append(Triple(inner, KAVA_MIN_VALUE, literal_for(kind.min_value)))
        if kind.max_value is not None:
            triples.append(Triple(inner, KAVA_MAX_VALUE, literal_for(kind.max_value)))
    else:
        triples.append(Triple(node, KAVA_MATCH_QUERY, literal_for(kind.query_text)))
        if kind.dialect != KAVA_PREDICATE_DIALECT:
            triples.append(Triple(node, KAVA_DIALECT, literal_for(kind.dialect)))


def manifestations_to_graph(manifestations, prefixes=None, start=0) -> Graph:
    """Inverse of load_manifestations up to blank-node labels."""
    triples = []
    alloc = _BnodeAllocator(start)
    for m in manifestations:
        _validate_kind(m.kind)
        node = alloc.fresh()
        triples.append(Triple(m.concept, KAVA_MANIFEST, node))
        _kind_triples(node, m.kind, alloc, triples)
        if m.provenance.creator_name is not None:
            person = alloc.fresh()
            triples.append(Triple(node, DCT_CREATOR, person))
            triples.append(Triple(person, FOAF_NAME, literal_for(m.provenance.creator_name)))
        if m.provenance.date_submitted is not None:
            triples.append(
                Triple(node, DCT_DATE_SUBMITTED, literal_for(m.provenance.date_submitted))
            )
    return Graph(triples, prefixes if prefixes is not None else DEFAULT_PREFIXES)


def add_manifestation_to_graph(graph: Graph, m: Manifestation) -> Graph:
    """Append one manifestation tree to a copy of the graph, with blank-node
    labels chosen to avoid collisions."""
    existing = {
        t.subject.label for t in graph if isinstance(t.subject, BlankNode)
    } | {t.object.label for t in graph if isinstance(t.object, BlankNode)}
    start = len(existing) + 1
    while any(f"m{start + i}" in existing for i in range(8)):
        start += 8
    addition = manifestations_to_graph([m], graph.prefixes, start=start)
    out = graph.copy()
    for t in addition:
        out.add(t)
    return out
