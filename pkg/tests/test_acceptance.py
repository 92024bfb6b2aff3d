"""Acceptance gate: one exactly-checked criterion per test over the full corpus."""

import pytest

from etalestacks.corpus import build_corpus, point_bouquet, point_quotient, run_verify
from etalestacks.effective import ineffective_isotropy
from etalestacks.gerbe import stalk_vs_ineffective_isotropy
from etalestacks.groups import cyclic_group

SEED = 7
INSTANCES = 200


@pytest.fixture(scope="module")
def report():
    corpus = build_corpus(seed=SEED, instances=INSTANCES)
    assert len(corpus) >= INSTANCES + 5
    for inst in corpus:
        assert len(inst.groupoid.objects) <= 4
        assert len(inst.groupoid.arrows) <= 24
    return run_verify(None, seed=SEED, instances=INSTANCES, corpus=corpus)


def _criterion(report, number, suite):
    entry = report["suites"][suite]
    failures = [f for f in report["failures"] if f["suite"] == suite]
    verdict = "PASS" if not failures else "FAIL"
    print("criterion %02d %s: %s (%d checks)" % (number, suite, verdict, entry["checks"]))
    assert entry["checks"] > 0
    assert failures == [], failures[:3]


def test_criterion_01_realization_counit(report):
    _criterion(report, 1, "realization-counit")


def test_criterion_02_sections_unit(report):
    _criterion(report, 2, "sections-unit")


def test_criterion_03_representable_opens(report):
    _criterion(report, 3, "representable-opens")


def test_criterion_04_inverse_image(report):
    _criterion(report, 4, "inverse-image")


def test_criterion_05_effective_part(report):
    _criterion(report, 5, "effective-part")


def test_criterion_06_gerbe_recognition(report):
    _criterion(report, 6, "gerbe-recognition")


def test_criterion_07_gerbe_sections(report):
    _criterion(report, 7, "gerbe-sections")


def test_criterion_08_isotropy(report):
    _criterion(report, 8, "isotropy")
    z2 = cyclic_group(2)
    kernel = ineffective_isotropy(point_quotient(), "*")
    assert len(kernel.elements) == 2
    assert kernel.is_isomorphic_to(z2)
    comparison = stalk_vs_ineffective_isotropy(point_bouquet(), "*")
    for group in (comparison.stalk_group, comparison.realization_group, comparison.fiber_group):
        assert len(group.elements) == 2
        assert group.is_isomorphic_to(z2)


def test_criterion_09_gets_roundtrip(report):
    _criterion(report, 9, "gets-roundtrip")


def test_criterion_10_derived_values(report):
    _criterion(report, 10, "derived-values")
    assert report["suites"]["derived-values"]["checks"] == 20


def test_whole_report_is_green(report):
    assert report["ok"] is True
    assert report["failures"] == []
    assert report["seed"] == SEED
    assert report["instances"] == INSTANCES
    assert list(report["suites"]) == [
        "realization-counit", "sections-unit", "representable-opens", "inverse-image",
        "effective-part", "gerbe-recognition", "gerbe-sections", "isotropy",
        "gets-roundtrip", "derived-values"]
