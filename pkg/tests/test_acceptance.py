"""End-to-end acceptance checks.

Each test prints a single PASS/FAIL line for its criterion, so running
``pytest tests/test_acceptance.py -v -s`` doubles as an acceptance report.
Tolerances are stated inline next to each assertion.
"""

import json
import random
import time
from contextlib import contextmanager

from conftest import FIXTURES, fixture_text, random_tree_graph
from kava.cli import main
from kava.dataset import NUMBER, Dataset, Record, Schema
from kava.gait import (
    PARAMETER_NAMES,
    build_category_model,
    compute_params,
    match_category,
    square_wave_trial,
)
from kava.jsonld import parse_jsonld, serialize_jsonld
from kava.manifestation import (
    IndirectQueryMapping,
    create_manifestation,
    evaluate_manifestation,
    load_manifestations,
)
from kava.predicate import parse_predicate, to_text
from kava.rdf import Iri, Literal, isomorphic_trees
from kava.skos import has_broader_cycle, load_scheme, validate_scheme
from kava.turtle import parse_turtle, serialize_turtle
from kava.utilization import (
    aggregate_mark_spec,
    concept_tree_spec,
    threshold_region_spec,
)
from test_predicate import _random_predicate, oracle_eval
from test_skos import _oracle_has_cycle, _random_scheme

R73 = Iri("http://example.org/kava/icd10#R73")


@contextmanager
def criterion(number, title):
    try:
        yield
    except BaseException:
        print(f"[criterion {number:2d}] FAIL  {title}")
        raise
    print(f"[criterion {number:2d}] PASS  {title}")


def test_criterion_1_listing_fidelity():
    with criterion(1, "listing fidelity (exact, < 1 s)"):
        start = time.perf_counter()
        g1 = parse_turtle(fixture_text("listing1.ttl"))
        g3 = parse_turtle(fixture_text("listing3.ttl"))
        g4 = parse_turtle(fixture_text("listing4.ttl"))
        g5 = parse_turtle(fixture_text("listing5.ttl"))
        mid_knee = g1.expand("gps:midKnee")
        about = g1.match(s=mid_knee)
        assert len(g1) == 5 and len(about) == 5
        labels = g1.match(s=mid_knee, p=g1.expand("skos:prefLabel"))
        assert [t.object for t in labels] == [
            Literal("abnormal mid stance phase of knee", "string")
        ]
        assert len(g3) == 7
        m3 = load_manifestations(g3)[0]
        assert m3.provenance.creator_name == "Doctor Dreamy"
        assert m3.provenance.date_submitted == "2019-02-04"
        assert len(g4) == 4 and len(g5) == 4
        assert time.perf_counter() - start < 1.0


def test_criterion_2_cross_format_roundtrip():
    with criterion(2, "ttl/jsonld round trip on listings + 200 random trees (< 10 s)"):
        start = time.perf_counter()
        graphs = [
            parse_turtle(fixture_text(name))
            for name in ("listing1.ttl", "listing3.ttl", "listing4.ttl", "listing5.ttl")
        ]
        rng = random.Random(20260823)
        graphs += [random_tree_graph(rng, max_triples=50) for _ in range(200)]
        for g in graphs:
            via_jsonld = parse_jsonld(serialize_jsonld(g), g.prefixes)
            back = parse_turtle(serialize_turtle(via_jsonld), g.prefixes)
            assert isomorphic_trees(back, g)
        assert time.perf_counter() - start < 10.0


def test_criterion_3_listing2_reconciliation(capsys):
    with criterion(3, "known jsonld/ttl discrepancy: corrected file isomorphic, raw file flagged"):
        corrected = parse_jsonld(fixture_text("listing2_corrected.jsonld"))
        assert isomorphic_trees(corrected, parse_turtle(fixture_text("listing1.ttl")))
        code = main(["validate", str(FIXTURES / "listing2.jsonld")])
        out = capsys.readouterr().out
        assert code == 1
        findings = [json.loads(l) for l in out.splitlines() if l.strip()]
        assert any(f["kind"] == "BroaderCycle" for f in findings)


def _random_dataset(rng):
    names = [f"v{i}" for i in range(rng.randrange(1, 6))]
    schema = Schema(
        variables=tuple([("id", NUMBER)] + [(n, NUMBER) for n in names]),
        identifying=("id",),
    )
    records = []
    for i in range(rng.randrange(0, 1001)):
        values = [("id", i)]
        for n in names:
            values.append((n, None if rng.random() < 0.1 else rng.randrange(-6, 7)))
        records.append(Record(values=tuple(values)))
    return Dataset(schema=schema, records=records), names


def test_criterion_4_predicate_oracle_equivalence():
    with criterion(4, "500 random datasets x random predicates vs per-record oracle (< 30 s)"):
        start = time.perf_counter()
        rng = random.Random(4)
        predicates = [_random_predicate(rng, rng.randrange(0, 5)) for _ in range(200)]
        for trial in range(500):
            dataset, names = _random_dataset(rng)
            pred = predicates[trial % len(predicates)]
            # retarget predicate variables onto this dataset's columns
            text = to_text(pred)
            for letter in "abcde":
                text = text.replace(f"[{letter}]", f"[{names[ord(letter) % len(names)]}]")
            pred = parse_predicate(text)
            m = create_manifestation(R73, IndirectQueryMapping(to_text(pred)))
            got = evaluate_manifestation(m, dataset)
            expected = {
                r.identifier(dataset.schema)
                for r in dataset.records
                if oracle_eval(pred, r.as_dict())
            }
            assert got == expected
        assert time.perf_counter() - start < 30.0


def test_criterion_5_hyperglycemia_semantics():
    with criterion(5, "strict query vs inclusive min-bound range semantics"):
        schema = Schema(
            variables=(("patientId", NUMBER), ("glucose", NUMBER), ("bloodSugar", NUMBER)),
            identifying=("patientId",),
        )
        records = [
            Record(values=(("patientId", v), ("glucose", v), ("bloodSugar", v)))
            for v in (150, 200, 250)
        ]
        ds = Dataset(schema=schema, records=records)
        strict = load_manifestations(parse_turtle(fixture_text("listing5.ttl")))[0]
        assert evaluate_manifestation(strict, ds) == {250}
        inclusive = load_manifestations(parse_turtle(fixture_text("listing4.ttl")))[0]
        assert evaluate_manifestation(inclusive, ds) == {200, 250}


def test_criterion_6_skos_validation():
    with criterion(6, "3-level scheme clean; injected cycles match DFS oracle (100 schemes)"):
        g = parse_turtle(fixture_text("gps_scheme.ttl"))
        scheme = load_scheme(g, g.expand("gps:gaitPatternSchema"))
        assert [f for f in validate_scheme(scheme) if f.severity == "error"] == []
        rng = random.Random(6)
        for _ in range(100):
            n = rng.randrange(3, 12)
            cycle_len = rng.choice([0, 2, 2, 3, 3])
            mutated = _random_scheme(rng, n, rng.randrange(0, 2 * n), cycle_len)
            assert has_broader_cycle(mutated) == _oracle_has_cycle(mutated)
            if cycle_len:
                assert has_broader_cycle(mutated)


def test_criterion_7_gait_ranges_and_matching():
    with criterion(7, "7 categories x 10 prototypes: ranges, scores to 1e-12, widening, filters (< 5 s)"):
        start = time.perf_counter()
        g = parse_turtle(fixture_text("gait_categories.ttl"))
        concepts = sorted(
            (t.subject for t in g.match(p=g.expand("rdf:type"), o=g.expand("skos:Concept"))),
            key=str,
        )
        assert len(concepts) == 7
        rng = random.Random(7)
        for concept in concepts:
            trials = [
                square_wave_trial(
                    f"{concept.value[-8:]}-{i}",
                    stance=0.45 + 0.02 * rng.randrange(12),
                    age=30 + rng.randrange(40),
                )
                for i in range(10)
            ]
            vectors = [compute_params(t) for t in trials]
            model = build_category_model(concept, trials)
            for k, name in enumerate(PARAMETER_NAMES):
                vals = [v.values[k] for v in vectors]
                lo, hi = model.effective_ranges()[name]
                assert lo == min(vals) and hi == max(vals)
            # matching scores vs the oracle fraction, to 1e-12
            probe = compute_params(square_wave_trial("probe", stance=0.55, age=50))
            result = match_category(probe, model)
            ranges = model.effective_ranges()
            oracle = sum(
                1
                for name in PARAMETER_NAMES
                if ranges[name][0] <= probe[name] <= ranges[name][1]
            ) / len(PARAMETER_NAMES)
            assert abs(result.score - oracle) < 1e-12
            # adding prototypes only widens or preserves ranges
            prev = build_category_model(concept, trials[:3]).effective_ranges()
            for k in range(4, 11):
                cur = build_category_model(concept, trials[:k]).effective_ranges()
                for name in PARAMETER_NAMES:
                    assert cur[name][0] <= prev[name][0] <= prev[name][1] <= cur[name][1]
                prev = cur
            # population filtering == filter-then-recompute
            pred = parse_predicate("[age] > 50")
            filtered = build_category_model(concept, trials, pred)
            manual = build_category_model(
                concept, [t for t in trials if t.age > 50]
            )
            assert filtered.effective_ranges() == manual.effective_ranges()
        assert time.perf_counter() - start < 5.0


def test_criterion_8_square_wave_parameters():
    with criterion(8, "square-wave trial: stance 0.600 s, step 0.500 s, cadence 120 (1e-6)"):
        params = compute_params(square_wave_trial("p1"))
        assert abs(params["stance_time_left"] - 0.600) < 1e-6
        assert abs(params["stance_time_right"] - 0.600) < 1e-6
        assert abs(params["step_time_left"] - 0.500) < 1e-6
        assert abs(params["step_time_right"] - 0.500) < 1e-6
        assert abs(params["cadence"] - 120.0) < 1e-6


def _oracle_spans(flags, times):
    spans, start = [], None
    for i, f in enumerate(flags):
        if f and start is None:
            start = i
        if not f and start is not None:
            spans.append((times[start], times[i - 1]))
            start = None
    if start is not None:
        spans.append((times[start], times[-1]))
    return spans


def test_criterion_9_utilization_fragments():
    with criterion(9, "threshold boundary bit-exact; aggregate spans vs 100 random match sets; tree counts"):
        g4 = parse_turtle(fixture_text("listing4.ttl"))
        kind = load_manifestations(g4)[0].kind
        doc = threshold_region_spec(kind, "bloodSugar")
        assert doc["region"]["lower"]["value"] == 200
        assert doc["encoding"]["y"]["datum"] == 200

        schema = Schema(
            variables=(("id", NUMBER), ("v", NUMBER), ("t", NUMBER)),
            identifying=("id",),
        )
        m = create_manifestation(R73, IndirectQueryMapping("[v] > 0"))
        rng = random.Random(9)
        for _ in range(100):
            flags = [rng.random() < 0.5 for _ in range(rng.randrange(0, 30))]
            records = [
                Record(values=(("id", i), ("v", 1 if f else 0), ("t", i)))
                for i, f in enumerate(flags)
            ]
            ds = Dataset(schema=schema, records=records)
            doc = aggregate_mark_spec(ds, m, "t")
            spans = [
                (l["encoding"]["x"]["datum"], l["encoding"]["x2"]["datum"])
                for l in doc["layer"]
            ]
            assert spans == _oracle_spans(flags, list(range(len(flags))))

        g = parse_turtle(fixture_text("gps_scheme.ttl"))
        scheme = load_scheme(g, g.expand("gps:gaitPatternSchema"))
        tree = concept_tree_spec(scheme, prefixes=g.prefixes)
        assert len(tree["data"]["values"]) == len(scheme.concepts)
        expected_edges = sum(
            len([b for b in c.broader if b in scheme.concepts])
            for c in scheme.concepts.values()
        )
        assert len(tree["edges"]) == expected_edges


def test_criterion_10_runtime_editing_and_provenance(capsys, tmp_path):
    with criterion(10, "annotation round trip, provenance stamping, idempotence"):
        store = tmp_path / "store.ttl"
        store.write_text("")
        args = [
            "annotate", str(store),
            "--concept", "icd10:R73",
            "--prototype", "patientId=12345",
            "--creator", "Doctor Dreamy",
            "--date", "2019-02-04",
        ]
        assert main(args) == 0
        reloaded = parse_turtle(store.read_text())
        assert isomorphic_trees(reloaded, parse_turtle(fixture_text("listing3.ttl")))
        m = load_manifestations(reloaded)[0]
        assert m.provenance.creator_name == "Doctor Dreamy"
        assert m.provenance.date_submitted == "2019-02-04"
        before = store.read_text()
        assert main(args) == 0
        out = capsys.readouterr().out
        assert store.read_text() == before
        assert json.loads(out.splitlines()[-1])["changed"] is False
