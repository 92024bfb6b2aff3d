"""Tests for bouquet and gerbe recognition and the isotropy correspondence."""

import pytest

from etalestacks.fintop import CMap, FinSpace, StructureError, disjoint_union
from etalestacks.groups import cyclic_group
from etalestacks.groupoid import (
    FinGroupoid,
    GroupoidHom,
    admits_local_sections,
    identity_hom,
    is_morita_equivalence,
    one_object_groupoid,
    translation_groupoid,
    unit_groupoid,
)
from etalestacks.equivariant import (
    EquivariantSheaf,
    constant_group_object,
    pair_sheaf_groupoid,
    representable_sheaf,
    terminal_sheaf_groupoid,
    unit_sheaf_groupoid,
)
from etalestacks.action import action_groupoid
from etalestacks.effective import effective_part, effective_part_on_hom, is_effective
from etalestacks.gerbe import (
    as_bouquet,
    ef_of_realization,
    gerbe_decomposition_check,
    gerbe_from_ineffective,
    is_bouquet,
    is_full,
    is_gerbe_stalkwise,
    presents_gerbe,
    stalk_vs_ineffective_isotropy,
)

PT = FinSpace(["*"])
S = FinSpace(["o", "c"], [("o", "c")])
D2 = FinSpace(["a", "b"])
Z2 = cyclic_group(2)
B = one_object_groupoid(Z2)
SWAP = translation_groupoid(Z2, D2, {("e", "a"): "a", ("e", "b"): "b", ("g", "a"): "b", ("g", "b"): "a"})
UNIT_PT = unit_groupoid(PT)
UNIT_S = unit_groupoid(S)
QUOT = GroupoidHom(SWAP, B, {"a": "*", "b": "*"}, {"(e,a)": "e", "(e,b)": "e", "(g,a)": "g", "(g,b)": "g"})
IOTA = GroupoidHom(B, UNIT_PT, {"*": "*"}, {"e": "*", "g": "*"})

E = constant_group_object(UNIT_PT, Z2)
TERMINAL_SWAP = terminal_sheaf_groupoid(SWAP)
SHEET_O = unit_sheaf_groupoid(representable_sheaf(UNIT_S, ["o"]))
TWO_POINTS = unit_sheaf_groupoid(EquivariantSheaf(UNIT_PT, FinSpace(["p", "q"]), {"p": "*", "q": "*"},
                                                  {("*", "p"): "p", ("*", "q"): "q"}))


def object_corpus():
    return [
        terminal_sheaf_groupoid(B),
        TERMINAL_SWAP,
        terminal_sheaf_groupoid(UNIT_S),
        E,
        constant_group_object(B, Z2),
        constant_group_object(UNIT_S, Z2),
        constant_group_object(unit_groupoid(D2), Z2),
        SHEET_O,
        TWO_POINTS,
        unit_sheaf_groupoid(representable_sheaf(SWAP, ["a"])),
        pair_sheaf_groupoid(representable_sheaf(B, ["*"])),
    ]


def bouquet_corpus():
    return [E, TERMINAL_SWAP, terminal_sheaf_groupoid(UNIT_S),
            constant_group_object(UNIT_S, Z2), constant_group_object(unit_groupoid(D2), Z2)]


def disjoint_union_groupoid(parts):
    obj, obj_inc = disjoint_union({tag: g.obj_space for tag, g in parts.items()})
    arr, arr_inc = disjoint_union({tag: g.arr_space for tag, g in parts.items()})
    s, t, unit, inv, compose = {}, {}, {}, {}, {}
    for tag, g in parts.items():
        oi, ai = obj_inc[tag], arr_inc[tag]
        for a in g.arrows:
            s[ai(a)], t[ai(a)], inv[ai(a)] = oi(g.s(a)), oi(g.t(a)), ai(g.inv(a))
        for x in g.objects:
            unit[oi(x)] = ai(g.one(x))
        for (a, b), v in g.composites().items():
            compose[(ai(a), ai(b))] = ai(v)
    return FinGroupoid(obj, arr, CMap(arr, obj, s), CMap(arr, obj, t),
                       CMap(obj, arr, unit), CMap(arr, arr, inv), compose)


def test_bouquet_examples():
    assert is_bouquet(E).ok
    assert is_bouquet(TERMINAL_SWAP).ok
    decision = is_bouquet(SHEET_O)
    assert not decision.ok
    assert decision.witness == "c"
    with pytest.raises(StructureError) as err:
        as_bouquet(SHEET_O)
    assert err.value.invariant == "bouquet"
    wrapped = as_bouquet(E)
    assert wrapped.onto_objects.ok and wrapped.onto_pairs.ok
    assert is_bouquet(wrapped).ok


def test_stalkwise_examples():
    assert is_gerbe_stalkwise(E).ok
    assert is_gerbe_stalkwise(terminal_sheaf_groupoid(B)).ok
    split = is_gerbe_stalkwise(TWO_POINTS)
    assert not split.ok and split.witness == "*"
    assert not is_gerbe_stalkwise(SHEET_O).ok


def test_bouquet_matches_stalkwise_on_corpus():
    for k in object_corpus():
        assert is_bouquet(k).ok == is_gerbe_stalkwise(k).ok


def test_surjectivity_matches_local_sections():
    for k in object_corpus():
        moment = k.obj_sheaf.moment
        assert moment.is_surjective() == admits_local_sections(moment).ok


def test_fullness_examples():
    assert is_full(identity_hom(SWAP)).ok
    assert is_full(IOTA).ok
    collapse = GroupoidHom(unit_groupoid(D2), UNIT_PT, {"a": "*", "b": "*"}, {"a": "*", "b": "*"})
    assert not is_full(collapse).ok
    quotient = is_full(QUOT)
    assert not quotient.ok
    assert quotient.witness == ["a", "a", "g"]


def test_anchor_fullness_tracks_the_joining_condition():
    for k in object_corpus():
        anchor = action_groupoid(k).anchor
        mu0 = k.obj_sheaf.moment
        joined = all(k.groupoid.arrows_between(x, y)
                     for x in k.groupoid.objects for y in k.groupoid.objects if mu0(x) == mu0(y))
        assert is_full(anchor).ok == joined
        if is_bouquet(k).ok:
            assert is_full(anchor).ok


def test_ef_of_realization_on_group_object_over_point():
    comparison = ef_of_realization(E)
    assert sorted(comparison.refined.arrows) == ["(*,*,*)"]
    assert len(comparison.effective.groupoid.arrows) == 1
    assert comparison.to_effective.then(comparison.from_effective) == identity_hom(comparison.refined)
    assert comparison.from_effective.then(comparison.to_effective) == identity_hom(comparison.effective.groupoid)


def test_ef_of_realization_on_terminal_object():
    comparison = ef_of_realization(TERMINAL_SWAP)
    assert len(comparison.refined.arrows) == len(SWAP.arrows)
    assert comparison.projection.cod == SWAP


def test_ef_of_realization_on_group_object_over_chain():
    comparison = ef_of_realization(constant_group_object(UNIT_S, Z2))
    assert sorted(comparison.refined.arrows) == ["(c,c,c)", "(o,o,o)"]


def test_ef_of_realization_round_trips_on_corpus():
    for k in bouquet_corpus():
        comparison = ef_of_realization(k)
        assert comparison.refinement.then(comparison.projection) == comparison.realization.anchor
        assert comparison.effective.projection.then(comparison.from_effective) == comparison.refinement
        assert comparison.to_effective.then(comparison.from_effective) == identity_hom(comparison.refined)
        assert comparison.from_effective.then(comparison.to_effective) == identity_hom(comparison.effective.groupoid)
        assert is_morita_equivalence(comparison.projection).ok


def test_ef_of_realization_preconditions():
    with pytest.raises(StructureError) as err:
        ef_of_realization(constant_group_object(B, Z2))
    assert err.value.invariant == "realization-effective"
    with pytest.raises(StructureError) as err:
        ef_of_realization(SHEET_O)
    assert err.value.invariant == "realization-bouquet"


def test_nontrivial_stalks_make_realizations_ineffective():
    for k in bouquet_corpus():
        realization = action_groupoid(k)
        nontrivial = any(len(k.groupoid.isotropy(x)) > 1 for x in k.groupoid.objects)
        assert is_effective(realization.groupoid).ok == (not nontrivial)


def test_gerbe_from_ineffective_on_group():
    presentation = gerbe_from_ineffective(B)
    stack = presentation.bouquet.stack
    assert sorted(stack.groupoid.objects) == ["([*|*>*],*)"]
    assert len(stack.groupoid.arrows) == 2
    assert stack.groupoid.isotropy_group(min(stack.groupoid.objects)).is_isomorphic_to(Z2)
    assert sorted(presentation.base.arrows) == ["[*|*>*]"]
    realized = presentation.counit.realization.groupoid
    assert len(realized.arrows) == len(B.arrows)


def test_gerbe_from_ineffective_on_effective_groupoid():
    presentation = gerbe_from_ineffective(SWAP)
    stack = presentation.bouquet.stack
    assert len(stack.groupoid.objects) == len(SWAP.arrows)
    for x in stack.groupoid.objects:
        assert len(stack.groupoid.isotropy(x)) == 1


def test_gerbe_from_ineffective_componentwise():
    union = disjoint_union_groupoid({"1": B, "2": SWAP})
    presentation = gerbe_from_ineffective(union)
    stack = presentation.bouquet.stack
    groups = {len(stack.groupoid.isotropy(x)) for x in stack.groupoid.objects
              if stack.obj_sheaf.moment(x).startswith("(1,")}
    assert groups == {2}
    trivial = {len(stack.groupoid.isotropy(x)) for x in stack.groupoid.objects
               if stack.obj_sheaf.moment(x).startswith("(2,")}
    assert trivial == {1}


def test_decomposition_examples():
    triple = gerbe_decomposition_check(effective_part(B).projection)
    assert (triple.over_codomain.ok, triple.over_effective.ok, triple.fullness.ok) == (True, True, True)
    triple = gerbe_decomposition_check(action_groupoid(E).anchor)
    assert (triple.over_codomain.ok, triple.over_effective.ok, triple.fullness.ok) == (True, True, True)
    inclusion = GroupoidHom(UNIT_PT, B, {"*": "*"}, {"*": "e"})
    triple = gerbe_decomposition_check(inclusion)
    assert (triple.over_codomain.ok, triple.over_effective.ok, triple.fullness.ok) == (False, True, False)


def test_decomposition_matches_fullness_plus_local_equivalence():
    inclusion = GroupoidHom(UNIT_PT, B, {"*": "*"}, {"*": "e"})
    homs = [effective_part(B).projection, action_groupoid(E).anchor, inclusion,
            identity_hom(SWAP), QUOT, IOTA, identity_hom(B)]
    for rho in homs:
        triple = gerbe_decomposition_check(rho)
        local = is_morita_equivalence(effective_part_on_hom(rho))
        assert triple.over_codomain.ok == (triple.fullness.ok and local.ok)


def test_decomposition_rejects_non_etale_components():
    closed_point = unit_groupoid(FinSpace(["c"]))
    with pytest.raises(StructureError) as err:
        gerbe_decomposition_check(GroupoidHom(closed_point, UNIT_S, {"c": "c"}, {"c": "c"}))
    assert err.value.invariant == "decomposition-etale"


def test_stalk_isotropy_on_group_object():
    report = stalk_vs_ineffective_isotropy(E, "*")
    assert report.stalk_group.is_isomorphic_to(Z2)
    assert report.realization_group.is_isomorphic_to(Z2)
    assert report.fiber_group.is_isomorphic_to(Z2)


def test_stalk_isotropy_on_terminal_object():
    report = stalk_vs_ineffective_isotropy(TERMINAL_SWAP, "a")
    assert len(report.stalk_group) == len(report.realization_group) == len(report.fiber_group) == 1


def test_stalk_isotropy_on_two_point_base():
    for point in ("a", "b"):
        report = stalk_vs_ineffective_isotropy(constant_group_object(unit_groupoid(D2), Z2), point)
        assert report.stalk_group.is_isomorphic_to(Z2)
        assert report.fiber_group.is_isomorphic_to(Z2)


def test_stalk_isotropy_across_corpus_points():
    for k in bouquet_corpus():
        for point in k.groupoid.objects:
            stalk_vs_ineffective_isotropy(k, point)


def test_stalk_isotropy_preconditions():
    with pytest.raises(StructureError) as err:
        stalk_vs_ineffective_isotropy(constant_group_object(B, Z2), "*")
    assert err.value.invariant == "realization-effective"
    with pytest.raises(StructureError) as err:
        stalk_vs_ineffective_isotropy(SHEET_O, "o")
    assert err.value.invariant == "realization-bouquet"
    with pytest.raises(StructureError) as err:
        stalk_vs_ineffective_isotropy(E, "missing")
    assert err.value.invariant == "isotropy-point"


def test_presents_gerbe_for_effective_projections():
    for g in (B, SWAP, UNIT_S, disjoint_union_groupoid({"1": B, "2": SWAP})):
        assert presents_gerbe(effective_part(g).projection).ok
