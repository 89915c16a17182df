"""Clinical gait case study: spatio-temporal parameters from vertical
ground-reaction-force trials, prototype-driven category models, and
category matching."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import TimeSeries
from .errors import (
    DuplicatePrototype,
    EmptyPopulation,
    InsufficientSteps,
    InvertedRange,
    NoDefinedRanges,
    NonPositivePhase,
    UnknownConcept,
    UnknownParameter,
)
from .manifestation import (
    DirectMapping,
    IndirectVariableMapping,
    Manifestation,
    add_manifestation_to_graph,
    create_manifestation,
    load_manifestations,
)
from .predicate import Predicate, compile_predicate
from .rdf import Graph, Iri
from .skos import SKOS_CONCEPT
from .turtle import RDF_TYPE

GRAVITY = 9.81

# Artifact-defined roster; the underlying tool names only a few examples
# (step time, stance time, cadence), so the exact list is fixed here.
PARAMETER_NAMES = (
    "step_time_left",
    "step_time_right",
    "stance_time_left",
    "stance_time_right",
    "swing_time_left",
    "swing_time_right",
    "stride_time_left",
    "stride_time_right",
    "double_support_left",
    "double_support_right",
    "peak_force_left",
    "peak_force_right",
    "time_to_peak_left",
    "time_to_peak_right",
    "cadence",
    "support_asymmetry",
)

PARAMETER_UNITS = {
    "step_time_left": "s",
    "step_time_right": "s",
    "stance_time_left": "s",
    "stance_time_right": "s",
    "swing_time_left": "s",
    "swing_time_right": "s",
    "stride_time_left": "s",
    "stride_time_right": "s",
    "double_support_left": "s",
    "double_support_right": "s",
    "peak_force_left": "N or body weights",
    "peak_force_right": "N or body weights",
    "time_to_peak_left": "s",
    "time_to_peak_right": "s",
    "cadence": "steps/min",
    "support_asymmetry": "ratio",
}

CONTACT_THRESHOLD_FRACTION = 0.05
DEBOUNCE_SECONDS = 0.05


@dataclass(frozen=True)
class GaitTrial:
    patient_id: str
    fv_left: TimeSeries
    fv_right: TimeSeries
    body_mass: float | None = None  # kg
    age: float | None = None  # years

    def metadata(self):
        return {
            "patientId": self.patient_id,
            "age": self.age,
            "bodyMass": self.body_mass,
        }


@dataclass(frozen=True)
class SpatioTemporalParams:
    values: tuple  # 16 floats, ordered per PARAMETER_NAMES

    def __post_init__(self):
        if len(self.values) != len(PARAMETER_NAMES):
            raise ValueError(f"expected {len(PARAMETER_NAMES)} parameters")

    def as_dict(self):
        return dict(zip(PARAMETER_NAMES, self.values))

    def __getitem__(self, name):
        return self.as_dict()[name]


@dataclass
class CategoryModel:
    concept: Iri
    prototypes: list  # of (patient_id, SpatioTemporalParams)
    overrides: dict = field(default_factory=dict)  # name -> (min, max)
    population_filter: Predicate | None = None

    def effective_ranges(self) -> dict:
        """Per parameter: override if present, else min/max over prototypes."""
        ranges = {}
        for i, name in enumerate(PARAMETER_NAMES):
            if name in self.overrides:
                ranges[name] = tuple(self.overrides[name])
                continue
            vals = [p.values[i] for _, p in self.prototypes]
            if vals:
                ranges[name] = (min(vals), max(vals))
            else:
                ranges[name] = None
        return ranges


@dataclass(frozen=True)
class MatchResult:
    concept: Iri
    score: float
    per_parameter: dict  # name -> "inside" | "below" | "above" | "undefined"


def _contacts(series: TimeSeries):
    """Contact intervals [(onset, offset)], detected by threshold crossing
    at 5% of the trial's peak force, with a 50 ms debounce."""
    t = np.asarray(series.times(), dtype=float)
    v = np.asarray(series.forces(), dtype=float)
    peak = float(v.max()) if len(v) else 0.0
    if peak <= 0:
        return []
    above = v > CONTACT_THRESHOLD_FRACTION * peak
    intervals = []
    start = None
    for i, flag in enumerate(above):
        if flag and start is None:
            start = t[i]
        elif not flag and start is not None:
            intervals.append([start, t[i]])
            start = None
    if start is not None:
        intervals.append([start, None])  # trailing contact without observed offset
    # debounce: merge short gaps, then drop short contacts
    merged = []
    for iv in intervals:
        if (
            merged
            and merged[-1][1] is not None
            and iv[0] - merged[-1][1] < DEBOUNCE_SECONDS
        ):
            merged[-1][1] = iv[1]
        else:
            merged.append(iv)
    kept = [
        iv
        for iv in merged
        if iv[1] is None or iv[1] - iv[0] >= DEBOUNCE_SECONDS
    ]
    return kept


def _complete(intervals):
    return [iv for iv in intervals if iv[1] is not None]


def _mean(xs):
    return sum(xs) / len(xs)


def _peak_stats(series: TimeSeries, intervals, body_mass):
    t = np.asarray(series.times(), dtype=float)
    v = np.asarray(series.forces(), dtype=float)
    peaks = []
    to_peak = []
    for onset, offset in intervals:
        mask = (t >= onset) & (t <= offset)
        if not mask.any():
            continue
        seg_t = t[mask]
        seg_v = v[mask]
        k = int(np.argmax(seg_v))
        peaks.append(float(seg_v[k]))
        to_peak.append(float(seg_t[k] - onset))
    if not peaks:
        raise InsufficientSteps("no complete contacts with force samples")
    peak = _mean(peaks)
    if body_mass:
        peak /= body_mass * GRAVITY
    return peak, _mean(to_peak)


def _step_times(own_onsets, other_onsets):
    """Time from the most recent contralateral onset to each own onset."""
    steps = []
    for onset in own_onsets:
        prev = [o for o in other_onsets if o < onset]
        if prev:
            steps.append(onset - prev[-1])
    return steps


def _initial_double_support(own_intervals, other_intervals):
    """Overlap with the contralateral stance at each own contact onset."""
    overlaps = []
    for onset, _ in own_intervals:
        for o_start, o_end in other_intervals:
            if o_end is None:
                continue
            if o_start <= onset < o_end:
                overlaps.append(o_end - onset)
                break
    return overlaps


def compute_params(trial: GaitTrial) -> SpatioTemporalParams:
    """Deterministic 16-parameter vector for one trial.

    Raises InsufficientSteps with fewer than two detected contacts per
    foot, NonPositivePhase when a derived phase is not positive.
    """
    sides = {}
    for side, series in (("left", trial.fv_left), ("right", trial.fv_right)):
        intervals = _contacts(series)
        complete = _complete(intervals)
        onsets = [iv[0] for iv in intervals]
        if len(onsets) < 2 or not complete:
            raise InsufficientSteps(f"{side}: fewer than two detected steps")
        stance = _mean([b - a for a, b in complete])
        strides = [b - a for a, b in zip(onsets, onsets[1:])]
        stride = _mean(strides)
        swing = stride - stance
        if stance <= 0 or stride <= 0 or swing <= 0:
            raise NonPositivePhase(f"{side}: degenerate gait phases")
        peak, to_peak = _peak_stats(series, complete, trial.body_mass)
        sides[side] = {
            "intervals": intervals,
            "complete": complete,
            "onsets": onsets,
            "stance": stance,
            "stride": stride,
            "swing": swing,
            "peak": peak,
            "to_peak": to_peak,
        }

    steps = {}
    dsup = {}
    for side, other in (("left", "right"), ("right", "left")):
        st = _step_times(sides[side]["onsets"], sides[other]["onsets"])
        if not st:
            raise InsufficientSteps(f"{side}: no alternating steps detected")
        if min(st) <= 0:
            raise NonPositivePhase(f"{side}: non-positive step time")
        steps[side] = _mean(st)
        overlaps = _initial_double_support(
            sides[side]["intervals"], sides[other]["intervals"]
        )
        dsup[side] = _mean(overlaps) if overlaps else 0.0

    cadence = 60.0 / _mean([steps["left"], steps["right"]])
    stance_l, stance_r = sides["left"]["stance"], sides["right"]["stance"]
    asymmetry = abs(stance_l - stance_r) / ((stance_l + stance_r) / 2.0)

    values = (
        steps["left"],
        steps["right"],
        stance_l,
        stance_r,
        sides["left"]["swing"],
        sides["right"]["swing"],
        sides["left"]["stride"],
        sides["right"]["stride"],
        dsup["left"],
        dsup["right"],
        sides["left"]["peak"],
        sides["right"]["peak"],
        sides["left"]["to_peak"],
        sides["right"]["to_peak"],
        cadence,
        asymmetry,
    )
    return SpatioTemporalParams(values=values)


def combined_force(trial: GaitTrial) -> TimeSeries:
    """Sum of both feet's vertical force on the union time grid, with
    linear interpolation between unequal grids."""
    tl = np.asarray(trial.fv_left.times(), dtype=float)
    vl = np.asarray(trial.fv_left.forces(), dtype=float)
    tr = np.asarray(trial.fv_right.times(), dtype=float)
    vr = np.asarray(trial.fv_right.forces(), dtype=float)
    grid = np.union1d(tl, tr)
    total = np.interp(grid, tl, vl, left=0.0, right=0.0) + np.interp(
        grid, tr, vr, left=0.0, right=0.0
    )
    return TimeSeries(
        samples=tuple(zip(grid.tolist(), total.tolist())), label="Fv combined"
    )


def _filtered(trials, population_filter):
    if population_filter is None:
        return list(trials)
    test = compile_predicate(population_filter)
    return [t for t in trials if test(t.metadata())]


def build_category_model(
    concept: Iri, trials, population_filter: Predicate | None = None
) -> CategoryModel:
    """Dynamic [min, max] ranges from the filtered prototype population."""
    kept = _filtered(trials, population_filter)
    if not kept:
        raise EmptyPopulation(str(concept))
    prototypes = [(t.patient_id, compute_params(t)) for t in kept]
    return CategoryModel(
        concept=concept, prototypes=prototypes, population_filter=population_filter
    )


def override_range(
    model: CategoryModel,
    parameter: str,
    min_value: float,
    max_value: float,
    creator: str | None = None,
    date: str | None = None,
):
    """Manual range adjustment; returns (new model, manifestation for the
    knowledge graph)."""
    if parameter not in PARAMETER_NAMES:
        raise UnknownParameter(parameter)
    if min_value > max_value:
        raise InvertedRange(f"{parameter}: {min_value} > {max_value}")
    overrides = dict(model.overrides)
    overrides[parameter] = (min_value, max_value)
    new_model = replace(model, overrides=overrides)
    m = create_manifestation(
        model.concept,
        IndirectVariableMapping(
            variable=parameter, min_value=min_value, max_value=max_value
        ),
        creator_name=creator,
        date=date,
    )
    return new_model, m


def match_category(params: SpatioTemporalParams, model: CategoryModel) -> MatchResult:
    """Classify every parameter against the effective (inclusive) ranges;
    score = inside / defined."""
    ranges = model.effective_ranges()
    per_parameter = {}
    inside = 0
    defined = 0
    for name in PARAMETER_NAMES:
        r = ranges[name]
        if r is None:
            per_parameter[name] = "undefined"
            continue
        defined += 1
        v = params[name]
        if v < r[0]:
            per_parameter[name] = "below"
        elif v > r[1]:
            per_parameter[name] = "above"
        else:
            per_parameter[name] = "inside"
            inside += 1
    if defined == 0:
        raise NoDefinedRanges(str(model.concept))
    return MatchResult(
        concept=model.concept, score=inside / defined, per_parameter=per_parameter
    )


def prototype_ids(graph: Graph, concept: Iri) -> list:
    """patientId bindings of the concept's direct mappings, in load order."""
    ids = []
    for m in load_manifestations(graph):
        if m.concept != concept or not isinstance(m.kind, DirectMapping):
            continue
        for var, value in m.kind.bindings:
            if var == "patientId":
                ids.append(value)
    return ids


def add_prototype(
    graph: Graph,
    concept: Iri,
    trial: GaitTrial,
    creator: str | None = None,
    date: str | None = None,
) -> Graph:
    """Append a direct-mapping prototype for the trial's patient.

    The concept must be typed skos:Concept in the graph; re-adding the
    same patient raises DuplicatePrototype.
    """
    if not graph.match(s=concept, p=RDF_TYPE, o=SKOS_CONCEPT):
        raise UnknownConcept(str(concept))
    existing = prototype_ids(graph, concept)
    if any(str(i) == str(trial.patient_id) for i in existing):
        raise DuplicatePrototype(f"{concept}: {trial.patient_id}")
    m = create_manifestation(
        concept,
        DirectMapping(bindings=(("patientId", _coerce_id(trial.patient_id)),)),
        creator_name=creator,
        date=date,
    )
    return add_manifestation_to_graph(graph, m)


def _coerce_id(patient_id):
    s = str(patient_id)
    return int(s) if s.lstrip("-").isdigit() else s


def range_overrides_from_graph(graph: Graph, concept: Iri) -> dict:
    """Manual [min, max] overrides stored as indirect variable mappings on
    roster parameter names."""
    overrides = {}
    for m in load_manifestations(graph):
        if m.concept != concept or not isinstance(m.kind, IndirectVariableMapping):
            continue
        name = m.kind.variable_name()
        if name in PARAMETER_NAMES:
            lo = m.kind.min_value if m.kind.min_value is not None else -math.inf
            hi = m.kind.max_value if m.kind.max_value is not None else math.inf
            overrides[name] = (lo, hi)
    return overrides


def category_model_from_graph(
    graph: Graph,
    concept: Iri,
    trials_by_id: dict,
    population_filter: Predicate | None = None,
) -> CategoryModel:
    """Build a category from the graph's prototypes plus stored overrides."""
    trials = []
    for pid in prototype_ids(graph, concept):
        trial = trials_by_id.get(str(pid))
        if trial is not None:
            trials.append(trial)
    model = build_category_model(concept, trials, population_filter)
    model.overrides = range_overrides_from_graph(graph, concept)
    return model


def box_plot_stats(model: CategoryModel) -> dict:
    """Per parameter: min, quartiles, median, max over the prototypes."""
    stats = {}
    for i, name in enumerate(PARAMETER_NAMES):
        vals = sorted(p.values[i] for _, p in model.prototypes)
        if not vals:
            stats[name] = None
            continue
        arr = np.asarray(vals, dtype=float)
        stats[name] = {
            "min": float(arr.min()),
            "q1": float(np.quantile(arr, 0.25)),
            "median": float(np.quantile(arr, 0.5)),
            "q3": float(np.quantile(arr, 0.75)),
            "max": float(arr.max()),
        }
    return stats


def knowledge_table(models, params: SpatioTemporalParams) -> list[dict]:
    """One row per category: match score, effective ranges, box-plot stats."""
    rows = []
    for model in models:
        result = match_category(params, model)
        ranges = model.effective_ranges()
        rows.append(
            {
                "concept": str(model.concept),
                "score": result.score,
                "parameters": {
                    name: {
                        "range": list(ranges[name]) if ranges[name] else None,
                        "overridden": name in model.overrides,
                        "status": result.per_parameter[name],
                        "value": params[name],
                    }
                    for name in PARAMETER_NAMES
                },
                "stats": box_plot_stats(model),
                "prototypes": [pid for pid, _ in model.prototypes],
            }
        )
    return rows


def load_trials_dir(path) -> dict:
    """Load a trials directory: metadata.csv (patientId, age, bodyMass)
    plus <patientId>_left.csv / <patientId>_right.csv force files."""
    from pathlib import Path

    from .dataset import NUMBER, STRING, Schema, load_csv, load_series_csv

    root = Path(path)
    schema = Schema(
        variables=(("patientId", STRING), ("age", NUMBER), ("bodyMass", NUMBER)),
        identifying=("patientId",),
    )
    meta = load_csv((root / "metadata.csv").read_text(), schema)
    trials = {}
    for record in meta.records:
        pid = record.get("patientId")
        left = load_series_csv((root / f"{pid}_left.csv").read_text(), "Fv left")
        right = load_series_csv((root / f"{pid}_right.csv").read_text(), "Fv right")
        trials[str(pid)] = GaitTrial(
            patient_id=str(pid),
            fv_left=left,
            fv_right=right,
            body_mass=record.get("bodyMass"),
            age=record.get("age"),
        )
    return trials


def write_trials_dir(path, trials) -> None:
    """Inverse of load_trials_dir, for fixtures and demos."""
    from pathlib import Path

    from .dataset import write_series_csv

    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    lines = ["patientId,age,bodyMass"]
    for trial in trials:
        age = "" if trial.age is None else trial.age
        mass = "" if trial.body_mass is None else trial.body_mass
        lines.append(f"{trial.patient_id},{age},{mass}")
        (root / f"{trial.patient_id}_left.csv").write_text(
            write_series_csv(trial.fv_left)
        )
        (root / f"{trial.patient_id}_right.csv").write_text(
            write_series_csv(trial.fv_right)
        )
    (root / "metadata.csv").write_text("\n".join(lines) + "\n")


def square_wave_trial(
    patient_id: str,
    stance: float = 0.6,
    stride: float = 1.0,
    strides: int = 10,
    amplitude: float = 800.0,
    dt: float = 0.01,
    body_mass: float | None = None,
    age: float | None = None,
    offset: float | None = None,
) -> GaitTrial:
    """Synthetic alternating square-wave trial with analytically known
    contact timing (left onsets at k*stride, right offset by stride/2)."""
    if offset is None:
        offset = stride / 2.0
    total = strides * stride + stance + offset
    n = int(round(total / dt)) + 1
    t = np.arange(n) * dt

    def force(onsets):
        v = np.zeros(n)
        for onset in onsets:
            v[(t >= onset - dt / 2) & (t < onset + stance - dt / 2)] = amplitude
        return v

    left_onsets = [k * stride for k in range(strides)]
    right_onsets = [k * stride + offset for k in range(strides)]
    left = TimeSeries(tuple(zip(t.tolist(), force(left_onsets).tolist())), "Fv left")
    right = TimeSeries(tuple(zip(t.tolist(), force(right_onsets).tolist())), "Fv right")
    return GaitTrial(
        patient_id=patient_id,
        fv_left=left,
        fv_right=right,
        body_mass=body_mass,
        age=age,
    )
