"""Tests for JSON documents, fixture files, and their round trips."""

import json
import os

import pytest

from etalestacks.corpus import (
    fixture_files,
    free_double_sheaf,
    point_bouquet,
    point_quotient,
    sierpinski_space,
    swap_groupoid,
)
from etalestacks.fintop import CMap, FinSpace, StructureError
from etalestacks.groupoid import translation_groupoid, unit_groupoid
from etalestacks.groups import cyclic_group
from etalestacks.serial import (
    cmap_document,
    groupoid_document,
    load_fixture,
    loads_fixture,
    parse_cmap,
    parse_fixture,
    parse_groupoid,
    parse_space,
    sheaf_document,
    space_document,
)


def test_space_document_round_trip():
    s = sierpinski_space()
    doc = space_document(s)
    assert doc == {"points": ["c", "o"], "leq": [["o", "c"]]}
    assert parse_space(doc) == s
    assert space_document(parse_space(doc)) == doc


def test_space_document_omits_reflexive_pairs():
    doc = space_document(FinSpace(["a", "b"]))
    assert doc["leq"] == []


def test_parse_space_rejects_reflexive_pairs():
    with pytest.raises(StructureError, match="space-leq"):
        parse_space({"points": ["a"], "leq": [["a", "a"]]})


def test_parse_space_rejects_non_transitive_input():
    doc = {"points": ["a", "b", "c"], "leq": [["a", "b"], ["b", "c"]]}
    with pytest.raises(StructureError, match="space-closure"):
        parse_space(doc)


def test_parse_space_rejects_unknown_keys():
    with pytest.raises(StructureError, match="document-keys"):
        parse_space({"points": ["a"], "leq": [], "extra": 1})


def test_cmap_document_round_trip():
    s = sierpinski_space()
    m = CMap(s, FinSpace(["*"]), {"o": "*", "c": "*"})
    doc = cmap_document(m)
    assert parse_cmap(doc) == m


def test_groupoid_document_round_trip():
    for g in (swap_groupoid(), point_quotient(), unit_groupoid(sierpinski_space())):
        doc = groupoid_document(g)
        back = parse_groupoid(doc)
        assert back == g
        assert groupoid_document(back) == doc


def test_groupoid_document_validation_names_first_broken_law():
    doc = groupoid_document(point_quotient())
    broken = json.loads(json.dumps(doc))
    broken["inv"]["g"] = "e"
    with pytest.raises(StructureError):
        parse_groupoid(broken)


def test_sheaf_document_round_trip():
    e = free_double_sheaf()
    doc = sheaf_document(e, "G")
    parsed = loads_fixture(json.dumps({
        "schema": 1,
        "groupoids": {"G": groupoid_document(e.base)},
        "sheaves": {"E": doc},
    }))
    back = parsed.sheaves["E"]
    assert back.total == e.total
    assert back.moment.graph == e.moment.graph
    assert back.action == e.action


def test_fixture_files_round_trip_exactly():
    for name, fixture in fixture_files().items():
        text = fixture.dumps()
        again = loads_fixture(text)
        assert again.dumps() == text, name


def test_fixture_files_are_deterministic():
    first = {name: fixture.dumps() for name, fixture in fixture_files().items()}
    second = {name: fixture.dumps() for name, fixture in fixture_files().items()}
    assert first == second


FIXTURE_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def test_shipped_fixture_files_match_builders():
    for name, fixture in fixture_files().items():
        on_disk = load_fixture(os.path.join(FIXTURE_DIR, name))
        assert on_disk.dumps() == fixture.dumps()


def test_groupoid_object_round_trip():
    text = fixture_files()["z2bouquet.json"].dumps()
    fixture = loads_fixture(text)
    k = fixture.groupoid_objects["K"]
    original = point_bouquet()
    assert k.base == original.base
    assert k.obj_sheaf.total == original.obj_sheaf.total
    assert k.arr_sheaf.total == original.arr_sheaf.total
    assert sorted(k.groupoid.arrows) == sorted(original.groupoid.arrows)


def test_fixture_schema_version_is_checked():
    with pytest.raises(StructureError, match="fixture-schema"):
        parse_fixture({"schema": 99})


def test_fixture_rejects_bad_json():
    with pytest.raises(StructureError, match="fixture-json"):
        loads_fixture("{not json")


def test_fixture_rejects_unknown_sections():
    with pytest.raises(StructureError, match="document-keys"):
        parse_fixture({"schema": 1, "widgets": {}})


def test_fixture_rejects_dangling_references():
    doc = {
        "schema": 1,
        "sheaves": {"E": sheaf_document(free_double_sheaf(), "MISSING")},
    }
    with pytest.raises(StructureError, match="fixture-reference"):
        parse_fixture(doc)


def test_translation_groupoid_survives_round_trip():
    x = FinSpace(["p", "q", "r"], [("p", "q"), ("p", "r")])
    act = {(h, t): t for h in cyclic_group(2).elements for t in x.points}
    g = translation_groupoid(cyclic_group(2), x, act)
    assert parse_groupoid(groupoid_document(g)) == g
