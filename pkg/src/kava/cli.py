"""Command-line surface: validation, format conversion, knowledge editing,
manifestation evaluation, visualization export, and the gait pipeline.

Exit codes: 0 success, 1 validation findings, 2 input/parse error,
3 internal error. JSON lines go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import gait as gait_mod
from . import jsonld, manifestation, skos, turtle, utilization
from .dataset import NUMBER, STRING, Schema, load_csv
from .errors import ForeignDialect, KavaError, MalformedManifestation
from .predicate import parse_predicate
from .rdf import DEFAULT_PREFIXES, Graph, Iri, expand
from .skos import Finding

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _env_prefixes():
    prefixes = dict(DEFAULT_PREFIXES)
    path = os.environ.get("KAVA_PREFIXES")
    if path:
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            label, ns = line.split("=", 1)
            prefixes[label.strip()] = ns.strip()
    return prefixes


def _emit(obj):
    print(json.dumps(obj, ensure_ascii=False))


def _diag(message):
    print(message, file=sys.stderr)


def read_graph(path: str) -> Graph:
    p = Path(path)
    text = p.read_text()
    if p.suffix == ".ttl":
        return turtle.parse_turtle(text, _env_prefixes())
    if p.suffix == ".jsonld":
        return jsonld.parse_jsonld(text, _env_prefixes())
    raise KavaError(f"unsupported knowledge file extension: {p.suffix!r}")


def serialize_graph(graph: Graph, suffix: str) -> str:
    if suffix == ".ttl":
        return turtle.serialize_turtle(graph)
    if suffix == ".jsonld":
        return jsonld.serialize_jsonld(graph)
    raise KavaError(f"unsupported output extension: {suffix!r}")


def write_atomic(path: str, text: str) -> None:
    """Write-temp-then-rename; knowledge files are the system of record."""
    p = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(p.parent) or ".", prefix=p.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, str(p))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def graph_findings(graph: Graph) -> list[Finding]:
    """Scheme and manifestation validation over one knowledge graph."""
    findings = []
    for scheme_id in skos.scheme_ids(graph):
        try:
            scheme = skos.load_scheme(graph, scheme_id)
        except KavaError as exc:
            findings.append(Finding("EmptyScheme", "warning", str(scheme_id), str(exc)))
            continue
        for f in skos.validate_scheme(scheme):
            # edges to concepts outside the document are normal for
            # pre-existing external vocabularies
            if f.kind == "DanglingEdge":
                f = Finding(f.kind, "warning", f.subject, f.detail)
            findings.append(f)
    for t in graph.match(p=turtle.RDF_TYPE, o=skos.SKOS_CONCEPT):
        if not graph.match(s=t.subject, p=skos.SKOS_IN_SCHEME):
            findings.append(
                Finding(
                    "NoScheme",
                    "warning",
                    str(t.subject),
                    "concept lacks skos:inScheme and is ignored by scheme loading",
                )
            )
    try:
        manifestation.load_manifestations(graph)
    except MalformedManifestation as exc:
        findings.append(
            Finding("MalformedManifestation", "error", str(exc.subject), exc.reason)
        )
    return findings


def _report(findings, path):
    worst = EXIT_OK
    for f in findings:
        _emit({"file": path, **f.as_dict()})
        if f.severity == "error":
            worst = EXIT_FINDINGS
    return worst


def cmd_validate(args) -> int:
    worst = EXIT_OK
    for path in args.paths:
        try:
            graph = read_graph(path)
        except (OSError, KavaError) as exc:
            _diag(f"{path}: {exc}")
            return EXIT_INPUT
        worst = max(worst, _report(graph_findings(graph), path))
    return worst


def cmd_convert(args) -> int:
    try:
        graph = read_graph(args.input)
    except (OSError, KavaError) as exc:
        _diag(f"{args.input}: {exc}")
        return EXIT_INPUT
    suffix = "." + args.to
    text = serialize_graph(graph, suffix)
    if args.output:
        write_atomic(args.output, text)
        _emit({"written": args.output, "triples": len(graph)})
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _infer_schema(text: str, id_var: str | None) -> Schema:
    import csv as _csv
    import io as _io

    rows = list(_csv.reader(_io.StringIO(text)))
    if not rows:
        raise KavaError("empty CSV file")
    header = rows[0]

    def numeric(col):
        cells = [r[col] for r in rows[1:] if col < len(r) and r[col] != ""]
        if not cells:
            return False
        try:
            for c in cells:
                float(c)
            return True
        except ValueError:
            return False

    variables = tuple(
        (name, NUMBER if numeric(i) else STRING) for i, name in enumerate(header)
    )
    ident = id_var or header[0]
    return Schema(variables=variables, identifying=(ident,))


def cmd_manifest(args) -> int:
    try:
        graph = read_graph(args.knowledge)
        text = Path(args.data).read_text()
        schema = _infer_schema(text, args.id_var)
        dataset = load_csv(text, schema)
        concept = expand(args.concept, graph.prefixes)
        manifests = manifestation.load_manifestations(graph)
    except (OSError, KavaError) as exc:
        _diag(str(exc))
        return EXIT_INPUT
    matched = set()
    foreign = False
    for m in manifests:
        if m.concept != concept:
            continue
        try:
            matched |= manifestation.evaluate_manifestation(m, dataset)
        except ForeignDialect as exc:
            foreign = True
            _diag(f"warning: manifestation {m.anchor} uses foreign dialect "
                  f"{exc.dialect!r}; not evaluated")
    _emit(sorted(matched, key=lambda x: (str(type(x)), x)))
    return EXIT_FINDINGS if foreign else EXIT_OK


def _parse_bindings(pairs):
    bindings = []
    for pair in pairs:
        if "=" not in pair:
            raise KavaError(f"bad --prototype binding {pair!r}; expected var=value")
        var, raw = pair.split("=", 1)
        if raw.lstrip("-").isdigit():
            value = int(raw)
        else:
            try:
                value = float(raw)
            except ValueError:
                value = raw
        bindings.append((var, value))
    return tuple(sorted(bindings))


def _write_validated(graph, path) -> int:
    findings = graph_findings(graph)
    errors = [f for f in findings if f.severity == "error"]
    if errors:
        _report(errors, path)
        _diag("refusing to write an invalid knowledge store")
        return EXIT_FINDINGS
    write_atomic(path, serialize_graph(graph, Path(path).suffix))
    return EXIT_OK


def cmd_annotate(args) -> int:
    try:
        graph = read_graph(args.knowledge)
        concept = expand(args.concept, graph.prefixes)
        bindings = _parse_bindings(args.prototype)
    except (OSError, KavaError) as exc:
        _diag(str(exc))
        return EXIT_INPUT
    if not args.creator:
        _diag("warning: no --creator given; provenance omitted")
    m = manifestation.create_manifestation(
        concept,
        manifestation.DirectMapping(bindings=bindings),
        creator_name=args.creator,
        date=args.date,
    )
    existing = manifestation.load_manifestations(graph)
    for prior in existing:
        if (
            prior.concept == m.concept
            and prior.kind == m.kind
            and prior.provenance == m.provenance
        ):
            _emit({"written": args.knowledge, "changed": False})
            return EXIT_OK
    graph = manifestation.add_manifestation_to_graph(graph, m)
    code = _write_validated(graph, args.knowledge)
    if code == EXIT_OK:
        _emit({"written": args.knowledge, "changed": True})
    return code


def _single_scheme(graph, scheme_arg):
    if scheme_arg:
        return expand(scheme_arg, graph.prefixes)
    ids = skos.scheme_ids(graph)
    if len(ids) != 1:
        raise KavaError(
            f"expected exactly one concept scheme, found {len(ids)}; use --scheme"
        )
    return ids[0]


def cmd_export_vis(args) -> int:
    try:
        graph = read_graph(args.knowledge)
        manifests = manifestation.load_manifestations(graph)
        if args.pattern == "tree":
            scheme = skos.load_scheme(graph, _single_scheme(graph, args.scheme))
            frequencies = None
            doc = utilization.concept_tree_spec(
                scheme, frequencies, prefixes=graph.prefixes
            )
        elif args.pattern == "threshold":
            selected = _select_manifestation(
                manifests, graph, args.concept, indirect_only=True
            )
            axis = args.axis_var
            if axis is None and isinstance(
                selected.kind, manifestation.IndirectVariableMapping
            ):
                axis = selected.kind.variable_name()
            if axis is None:
                raise KavaError("--axis-var is required for query mappings")
            doc = utilization.threshold_region_spec(selected.kind, axis)
        else:
            if not args.data:
                raise KavaError(f"--pattern {args.pattern} requires a data CSV")
            text = Path(args.data).read_text()
            dataset = load_csv(text, _infer_schema(text, args.id_var))
            if args.pattern == "marks":
                doc = utilization.encoded_marks_spec(
                    dataset, manifests, channel=args.channel, prefixes=graph.prefixes
                )
            else:  # aggregate
                selected = _select_manifestation(manifests, graph, args.concept)
                doc = utilization.aggregate_mark_spec(
                    dataset, selected, time_variable=args.time_var
                )
    except (OSError, KavaError) as exc:
        _diag(str(exc))
        return EXIT_INPUT
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        write_atomic(args.output, text)
        _emit({"written": args.output, "kind": doc["kind"]})
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _select_manifestation(manifests, graph, concept_arg, indirect_only=False):
    pool = manifests
    if concept_arg:
        concept = expand(concept_arg, graph.prefixes)
        pool = [m for m in pool if m.concept == concept]
    if indirect_only:
        pool = [
            m
            for m in pool
            if not isinstance(m.kind, manifestation.DirectMapping)
        ]
    if not pool:
        raise KavaError("no matching manifestation found in the knowledge file")
    return pool[0]


def _gait_models(graph, trials, filter_text):
    population_filter = parse_predicate(filter_text) if filter_text else None
    models = []
    for t in graph.match(p=turtle.RDF_TYPE, o=skos.SKOS_CONCEPT):
        concept = t.subject
        if not gait_mod.prototype_ids(graph, concept):
            continue
        models.append(
            gait_mod.category_model_from_graph(
                graph, concept, trials, population_filter
            )
        )
    models.sort(key=lambda m: str(m.concept))
    return models


def cmd_gait(args) -> int:
    try:
        graph = read_graph(args.knowledge)
        if args.gait_command in ("analyze", "table", "add-prototype"):
            trials = gait_mod.load_trials_dir(args.trials)
        if args.gait_command in ("analyze", "table"):
            patient = trials.get(args.patient)
            if patient is None:
                raise KavaError(f"patient {args.patient!r} not found in trials dir")
            params = gait_mod.compute_params(patient)
            models = _gait_models(graph, trials, args.filter)
        if args.gait_command == "analyze":
            for model in models:
                result = gait_mod.match_category(params, model)
                _emit(
                    {
                        "concept": str(model.concept),
                        "score": result.score,
                        "perParameter": result.per_parameter,
                    }
                )
            return EXIT_OK
        if args.gait_command == "table":
            for row in gait_mod.knowledge_table(models, params):
                _emit(row)
            return EXIT_OK
        if args.gait_command == "add-prototype":
            trial = trials.get(args.patient)
            if trial is None:
                raise KavaError(f"patient {args.patient!r} not found in trials dir")
            concept = expand(args.concept, graph.prefixes)
            graph = gait_mod.add_prototype(
                graph, concept, trial, creator=args.creator, date=args.date
            )
            code = _write_validated(graph, args.knowledge)
            if code == EXIT_OK:
                _emit({"written": args.knowledge, "prototype": args.patient})
            return code
        # set-range
        concept = expand(args.concept, graph.prefixes)
        if args.param not in gait_mod.PARAMETER_NAMES:
            raise KavaError(f"unknown parameter {args.param!r}")
        if args.min > args.max:
            raise KavaError(f"inverted range: {args.min} > {args.max}")
        m = manifestation.create_manifestation(
            concept,
            manifestation.IndirectVariableMapping(
                variable=args.param, min_value=args.min, max_value=args.max
            ),
            creator_name=args.creator,
            date=args.date,
        )
        graph = manifestation.add_manifestation_to_graph(graph, m)
        code = _write_validated(graph, args.knowledge)
        if code == EXIT_OK:
            _emit({"written": args.knowledge, "param": args.param})
        return code
    except (OSError, KavaError) as exc:
        _diag(str(exc))
        return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kava",
        description="Explicit domain knowledge tooling: concepts, "
        "manifestations, and visualization fragments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate knowledge files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between Turtle and JSON-LD")
    p.add_argument("input")
    p.add_argument("--to", required=True, choices=["ttl", "jsonld"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("manifest", help="evaluate a concept's manifestations")
    p.add_argument("knowledge")
    p.add_argument("data")
    p.add_argument("--concept", required=True)
    p.add_argument("--id-var")
    p.set_defaults(func=cmd_manifest)

    p = sub.add_parser("annotate", help="record a direct-mapping prototype")
    p.add_argument("knowledge")
    p.add_argument("--concept", required=True)
    p.add_argument("--prototype", nargs="+", required=True, metavar="VAR=VALUE")
    p.add_argument("--creator")
    p.add_argument("--date")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("export-vis", help="emit a visualization spec fragment")
    p.add_argument("knowledge")
    p.add_argument("data", nargs="?")
    p.add_argument(
        "--pattern", required=True, choices=["tree", "marks", "aggregate", "threshold"]
    )
    p.add_argument("--scheme")
    p.add_argument("--concept")
    p.add_argument("--channel", default="color")
    p.add_argument("--time-var", default="t")
    p.add_argument("--axis-var")
    p.add_argument("--id-var")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_vis)

    p = sub.add_parser("gait", help="gait case-study pipeline")
    gsub = p.add_subparsers(dest="gait_command", required=True)
    for name in ("analyze", "table"):
        g = gsub.add_parser(name)
        g.add_argument("--knowledge", required=True)
        g.add_argument("--trials", required=True)
        g.add_argument("--patient", required=True)
        g.add_argument("--filter")
        g.set_defaults(func=cmd_gait)
    g = gsub.add_parser("add-prototype")
    g.add_argument("--knowledge", required=True)
    g.add_argument("--trials", required=True)
    g.add_argument("--patient", required=True)
    g.add_argument("--concept", required=True)
    g.add_argument("--creator")
    g.add_argument("--date")
    g.set_defaults(func=cmd_gait)
    g = gsub.add_parser("set-range")
    g.add_argument("--knowledge", required=True)
    g.add_argument("--concept", required=True)
    g.add_argument("--param", required=True)
    g.add_argument("--min", type=float, required=True)
    g.add_argument("--max", type=float, required=True)
    g.add_argument("--creator")
    g.add_argument("--date")
    g.set_defaults(func=cmd_gait)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KavaError as exc:
        _diag(str(exc))
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover
        _diag(f"internal error: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
