import pytest

from kava.dataset import (
    NUMBER,
    STRING,
    Dataset,
    Record,
    Schema,
    TimeSeries,
    filter_records,
    load_csv,
    load_series_csv,
    write_csv,
    write_series_csv,
)
from kava.errors import (
    CsvTypeError,
    DuplicateIdentifier,
    HeaderMismatch,
    UnknownVariable,
)
from kava.predicate import parse_predicate

PATIENT_SCHEMA = Schema(
    variables=(("patientId", NUMBER), ("bloodSugar", NUMBER)),
    identifying=("patientId",),
)


def test_load_simple():
    ds = load_csv("patientId,bloodSugar\n12345,250\n", PATIENT_SCHEMA)
    assert len(ds) == 1
    assert ds.records[0].get("bloodSugar") == 250
    assert ds.identifiers() == [12345]


def test_header_only():
    ds = load_csv("patientId,bloodSugar\n", PATIENT_SCHEMA)
    assert len(ds) == 0


def test_header_order_insensitive():
    ds = load_csv("bloodSugar,patientId\n250,12345\n", PATIENT_SCHEMA)
    assert ds.records[0].get("patientId") == 12345


def test_header_mismatch():
    with pytest.raises(HeaderMismatch):
        load_csv("patientId,glucose\n1,2\n", PATIENT_SCHEMA)


def test_duplicate_identifier():
    with pytest.raises(DuplicateIdentifier):
        load_csv("patientId,bloodSugar\n12345,1\n12345,2\n", PATIENT_SCHEMA)


def test_type_error_position():
    with pytest.raises(CsvTypeError) as exc:
        load_csv("patientId,bloodSugar\n1,abc\n", PATIENT_SCHEMA)
    assert exc.value.row == 2


def test_missing_cells():
    ds = load_csv("patientId,bloodSugar\n1,\n", PATIENT_SCHEMA)
    assert ds.records[0].get("bloodSugar") is None


def test_csv_roundtrip():
    text = "patientId,bloodSugar\n1,150\n2,\n3,250.5\n"
    ds = load_csv(text, PATIENT_SCHEMA)
    again = load_csv(write_csv(ds), PATIENT_SCHEMA)
    assert again.records == ds.records


def _age_dataset():
    schema = Schema(
        variables=(("patientId", NUMBER), ("age", NUMBER)), identifying=("patientId",)
    )
    rows = "\n".join(f"{i},{20 + 5 * i}" for i in range(10))
    return load_csv("patientId,age\n" + rows + "\n", schema)


def test_filter_matches_bruteforce():
    ds = _age_dataset()
    pred = parse_predicate("[age] >= 30 AND [age] <= 50")
    out = filter_records(ds, pred)
    expected = [r for r in ds.records if 30 <= r.get("age") <= 50]
    assert out.records == expected


def test_filter_always_true_false():
    ds = _age_dataset()
    assert filter_records(ds, parse_predicate("[age] >= 0")).records == ds.records
    assert filter_records(ds, parse_predicate("[age] < 0")).records == []


def test_filter_idempotent_and_subset():
    ds = _age_dataset()
    pred = parse_predicate("[age] > 35")
    once = filter_records(ds, pred)
    twice = filter_records(once, pred)
    assert once.records == twice.records
    assert set(once.identifiers()) <= set(ds.identifiers())


def test_filter_unknown_variable():
    with pytest.raises(UnknownVariable):
        filter_records(_age_dataset(), parse_predicate("[height] > 1"))


def test_timeseries_strictly_increasing():
    with pytest.raises(ValueError):
        TimeSeries(samples=((0.0, 1.0), (0.0, 2.0)))


def test_series_csv_roundtrip():
    series = TimeSeries(samples=((0.0, 0.0), (0.01, 800.0), (0.02, 640.5)), label="Fv")
    again = load_series_csv(write_series_csv(series), "Fv")
    assert again.samples == series.samples
