"""Groupoid layer: axioms, Cech refinements, Morita decision, weak pullbacks."""

import itertools

import pytest

from etalestacks.fintop import CMap, FinSpace, OpenSet, StructureError, disjoint_union, fibered_product, identity_map
from etalestacks.groupoid import (
    EquivalencePackage,
    FinGroupoid,
    GroupoidHom,
    NatTrans,
    admits_local_sections,
    all_homs,
    all_nat_trans,
    categorically_equivalent,
    cech_groupoid,
    connected_components,
    identity_hom,
    identity_nat,
    induce_into_weak_pullback,
    is_connected_nonempty,
    is_equivalent_to_space,
    is_etale_groupoid,
    is_morita_equivalence,
    one_object_groupoid,
    pair_groupoid,
    translation_groupoid,
    unit_groupoid,
    weak_pullback,
)
from etalestacks.groups import cyclic_group, klein_four_group, symmetric_group_3
from helpers import all_cmaps, oracle_opens

PT = FinSpace(["*"])
S = FinSpace(["o", "c"], [("o", "c")])
D2 = FinSpace(["a", "b"])
Z2 = cyclic_group(2)

B = one_object_groupoid(Z2)  # one object, arrows {e, g}
SWAP = translation_groupoid(Z2, D2, {("e", "a"): "a", ("e", "b"): "b", ("g", "a"): "b", ("g", "b"): "a"})
UNIT_S = unit_groupoid(S)
UNIT_PT = unit_groupoid(PT)


def test_group_tables():
    assert Z2.elements == ("e", "g") and Z2.mul("g", "g") == "e"
    assert klein_four_group().order_of("a") == 2
    s3 = symmetric_group_3()
    assert len(s3) == 6 and not s3.is_isomorphic_to(cyclic_group(6))
    assert cyclic_group(4).is_isomorphic_to(cyclic_group(4)) and not cyclic_group(4).is_isomorphic_to(klein_four_group())


def test_groupoid_validation_names_first_violated_equation():
    obj = FinSpace(["x"])
    arr = FinSpace(["i", "g"])
    s = CMap(arr, obj, {"i": "x", "g": "x"})
    unit = CMap(obj, arr, {"x": "i"})
    inv = CMap(arr, arr, {"i": "i", "g": "g"})
    good = {("i", "i"): "i", ("i", "g"): "g", ("g", "i"): "g", ("g", "g"): "i"}
    FinGroupoid(obj, arr, s, s, unit, inv, good)
    bad = dict(good)
    bad[("g", "g")] = "g"
    with pytest.raises(StructureError) as err:
        FinGroupoid(obj, arr, s, s, unit, inv, bad)
    assert err.value.invariant in {"inverse-law", "associativity"}
    with pytest.raises(StructureError) as err:
        FinGroupoid(obj, arr, s, s, unit, inv, {k: v for k, v in good.items() if k != ("g", "g")})
    assert err.value.invariant == "composition-total"


def test_etale_groupoid_examples():
    assert is_etale_groupoid(UNIT_S).ok
    assert is_etale_groupoid(B).ok
    assert is_etale_groupoid(SWAP).ok
    # collapsing the minimal open of c in the arrows of unit(S) breaks etaleness:
    # arrows = S with s constant lands every arrow on one point
    obj = FinSpace(["x"])
    arr = S
    s = CMap(arr, obj, {"o": "x", "c": "x"})
    with pytest.raises(StructureError):
        # not even a groupoid: two "unit-like" arrows cannot both be units
        FinGroupoid(obj, arr, s, s, CMap(obj, arr, {"x": "o"}), identity_map(arr), {(g, h): "o" for g in arr.points for h in arr.points})
    bad = pair_groupoid(S)  # s: S x S -> S is not etale at (o, c)
    assert not is_etale_groupoid(bad).ok


def test_pair_groupoid_on_discrete_is_etale():
    pg = pair_groupoid(D2)
    assert is_etale_groupoid(pg).ok and len(pg.arrows) == 4


def test_cech_groupoid_of_unit_s():
    total, incs = disjoint_union({"w": S.subspace({"o"}), "v": S})
    cover = CMap(total, S, {incs["w"]("o"): "o", incs["v"]("o"): "o", incs["v"]("c"): "c"})
    refined, proj = cech_groupoid(unit_groupoid(S), cover)
    # oracle: arrows are triples (identity, p, q) with cover(p) = cover(q)
    expected = sum(1 for p in total.points for q in total.points if cover(p) == cover(q))
    assert len(refined.arrows) == expected == 5
    assert is_morita_equivalence(proj).ok


def test_cech_groupoid_identity_cover():
    refined, proj = cech_groupoid(B, identity_map(B.obj_space))
    assert len(refined.arrows) == len(B.arrows)
    assert is_morita_equivalence(proj).ok


def test_cech_groupoid_of_two_point_cover_of_ptz2():
    total, _ = disjoint_union({"u1": PT, "u2": PT})
    cover = CMap(total, PT, {p: "*" for p in total.points})
    refined, proj = cech_groupoid(B, cover)
    # oracle: |cover fiber pairs| * |arrows| = 4 * 2
    assert len(refined.arrows) == 8 and len(refined.objects) == 2
    assert is_morita_equivalence(proj).ok


def test_cech_rejects_non_cover():
    with pytest.raises(StructureError) as err:
        cech_groupoid(UNIT_S, CMap(PT, S, {"*": "c"}))
    assert err.value.invariant == "cech-cover"


def test_morita_examples():
    assert is_morita_equivalence(identity_hom(SWAP)).ok
    iota = GroupoidHom(B, UNIT_PT, {"*": "*"}, {"e": "*", "g": "*"})
    d = is_morita_equivalence(iota)
    assert not d.ok and d.witness["condition"] == "fully-faithful"
    # the free action collapses to the orbit space: swap groupoid -> unit(pt)
    q = GroupoidHom(SWAP, UNIT_PT, {"a": "*", "b": "*"}, {a: "*" for a in SWAP.arrows})
    assert is_morita_equivalence(q).ok
    # but the group quotient swap -> pt//Z2 is not fully faithful
    q2 = GroupoidHom(SWAP, B, *_swap_quotient_components())
    d2 = is_morita_equivalence(q2)
    assert not d2.ok and d2.witness["condition"] == "fully-faithful"


def test_morita_sections_certificate_is_real():
    total, _ = disjoint_union({"u1": PT, "u2": PT})
    cover = CMap(total, PT, {p: "*" for p in total.points})
    refined, proj = cech_groupoid(B, cover)
    d = is_morita_equivalence(proj)
    # each certificate section really is a section of t.pr1 over the minimal open
    pb = fibered_product(B.source_map, proj.f0)
    t_pr1 = pb.pr1.then(B.target_map)
    for y, section in d.certificate["sections"].items():
        for z, a in section.items():
            assert t_pr1(a) == z


def test_morita_stable_under_composition():
    total, _ = disjoint_union({"u1": PT, "u2": PT})
    cover = CMap(total, PT, {p: "*" for p in total.points})
    refined, proj = cech_groupoid(B, cover)
    again, proj2 = cech_groupoid(refined, identity_map(refined.obj_space))
    composite = proj2.then(proj)
    assert is_morita_equivalence(proj2).ok and is_morita_equivalence(composite).ok


def test_admits_local_sections_negative():
    f = CMap(S.subspace({"o"}), S, {"o": "o"})
    d = admits_local_sections(f)
    assert not d.ok and d.witness == {"point": "c"}


def test_weak_pullback_loopspace_and_comma():
    # both legs the point inclusion: discrete Z2 (the loop-space computation)
    leg = GroupoidHom(UNIT_PT, B, {"*": "*"}, {"*": "e"})
    wp = weak_pullback(leg, leg)
    assert len(wp.groupoid.objects) == 2
    assert all(wp.groupoid.s(a) == wp.groupoid.t(a) for a in wp.groupoid.arrows)
    assert len(wp.groupoid.arrows) == 2
    # inclusion against the identity: the pair groupoid on Z2, equivalent to pt
    wp2 = weak_pullback(leg, identity_hom(B))
    assert len(wp2.groupoid.objects) == 2 and len(wp2.groupoid.arrows) == 4
    assert categorically_equivalent(wp2.groupoid, UNIT_PT).ok
    assert is_equivalent_to_space(wp2.groupoid).ok


def test_weak_pullback_against_identity_is_equivalent_to_domain():
    for phi in [identity_hom(SWAP), GroupoidHom(SWAP, B, *_swap_quotient_components())]:
        wp = weak_pullback(phi, identity_hom(phi.cod))
        assert categorically_equivalent(wp.groupoid, phi.dom).ok
        # the canonical comparison from the domain is a Morita equivalence
        comparison = induce_into_weak_pullback(wp, identity_hom(phi.dom), phi, identity_nat(phi))
        assert is_morita_equivalence(comparison).ok


def _swap_quotient_components():
    return {"a": "*", "b": "*"}, {"(e,a)": "e", "(e,b)": "e", "(g,a)": "g", "(g,b)": "g"}


def test_weak_pullback_universal_property_exhaustive():
    # every cone from small corpus groupoids factors strictly
    leg = GroupoidHom(UNIT_PT, B, {"*": "*"}, {"*": "e"})
    wp = weak_pullback(leg, identity_hom(B))
    for cone_dom in [UNIT_PT, B, SWAP, UNIT_S]:
        for a in all_homs(cone_dom, UNIT_PT):
            for b in all_homs(cone_dom, B):
                for gamma in all_nat_trans(a.then(leg), b):
                    u = induce_into_weak_pullback(wp, a, b, gamma)
                    assert u.then(wp.pr1) == a and u.then(wp.pr2) == b


def test_weak_pullback_fill_is_natural():
    leg = GroupoidHom(UNIT_PT, B, {"*": "*"}, {"*": "e"})
    wp = weak_pullback(leg, identity_hom(B))
    assert wp.fill.src == wp.pr1.then(leg) and wp.fill.dst == wp.pr2.then(identity_hom(B))


def test_is_equivalent_to_space_examples():
    d = is_equivalent_to_space(UNIT_S)
    assert d.ok and len(d.certificate["quotient"]) == 2

    d = is_equivalent_to_space(pair_groupoid(D2))
    assert d.ok and len(d.certificate["quotient"]) == 1
    assert is_morita_equivalence(d.certificate["hom"]).ok

    d = is_equivalent_to_space(B)
    assert not d.ok and set(d.witness["arrows"]) == {"e", "g"}


def test_quotient_topology_matches_preimage_opens():
    total, incs = disjoint_union({"w": S.subspace({"o"}), "v": S})
    cover = CMap(total, S, {incs["w"]("o"): "o", incs["v"]("o"): "o", incs["v"]("c"): "c"})
    refined, _ = cech_groupoid(unit_groupoid(S), cover)
    d = is_equivalent_to_space(refined)
    assert d.ok
    quotient, projection = d.certificate["quotient"], d.certificate["projection"]
    computed = {o.carrier for o in quotient.opens()}
    # quotient topology oracle: a set of classes is open iff its preimage is open
    oracle = {
        v for v in _subsets(quotient.points)
        if total.is_down_closed({p for p in total.points if projection(p) in v})}
    assert computed == oracle


def _subsets(points):
    out = []
    for r in range(len(points) + 1):
        out.extend(map(frozenset, itertools.combinations(points, r)))
    return out


def test_nat_trans_validation_and_uniqueness_into_trivial_isotropy():
    for f in all_homs(SWAP, UNIT_S):
        for g in all_homs(SWAP, UNIT_S):
            assert len(all_nat_trans(f, g)) <= 1
    # 2-cells between the two endofunctors of pt//Z2 over pt exist and invert
    endos = all_homs(B, B)
    for f in endos:
        for g in endos:
            for alpha in all_nat_trans(f, g):
                assert alpha.inverse().then(alpha) == identity_nat(g)
                assert alpha.then(alpha.inverse()) == identity_nat(f)


def test_nat_trans_whiskering():
    endos = all_homs(B, B)
    nontrivial = [f for f in endos if not f.is_identity()]
    assert len(nontrivial) == 1
    f = nontrivial[0]
    alpha = NatTrans(identity_hom(B), identity_hom(B), {"*": "g"})
    assert alpha.precompose(f).component("*") == "g"
    # the nontrivial endofunctor is the trivial homomorphism, so it kills g
    assert alpha.postcompose(f).component("*") == "e"


def test_equivalence_package_validation():
    # genuine equivalence: the swap groupoid contracts onto a point
    forward = GroupoidHom(SWAP, UNIT_PT, {"a": "*", "b": "*"}, {a: "*" for a in SWAP.arrows})
    backward = GroupoidHom(UNIT_PT, SWAP, {"*": "a"}, {"*": "(e,a)"})
    eta = NatTrans(identity_hom(SWAP), forward.then(backward), {"a": "(e,a)", "b": "(g,b)"})
    pkg = EquivalencePackage(forward=forward, backward=backward, eta=eta, eps=None)
    pkg.validate()
    assert pkg.check().ok
    # the unit inclusion into pt//Z2 is one-sided only; the strict demand fails
    incl = GroupoidHom(UNIT_PT, B, {"*": "*"}, {"*": "e"})
    proj = GroupoidHom(B, UNIT_PT, {"*": "*"}, {"e": "*", "g": "*"})
    bad = EquivalencePackage(forward=incl, backward=proj, eta=None, eps=None)
    with pytest.raises(StructureError) as err:
        bad.validate()
    assert err.value.invariant == "equivalence-eps"
    assert not bad.check().ok


def test_components_and_isotropy():
    assert connected_components(SWAP) == [frozenset({"a", "b"})]
    assert is_connected_nonempty(B)
    assert not is_connected_nonempty(UNIT_S)
    assert B.isotropy_group("*").is_isomorphic_to(Z2)
    assert SWAP.isotropy_group("a").elements == ("(e,a)",)


def test_categorically_equivalent():
    assert categorically_equivalent(SWAP, UNIT_PT).ok
    assert categorically_equivalent(B, B).ok
    assert not categorically_equivalent(B, UNIT_PT).ok
    assert not categorically_equivalent(UNIT_S, UNIT_PT).ok


def test_all_homs_against_bruteforce():
    # oracle: filter all pairs of continuous maps by the functor equations
    def oracle(g, h):
        count = 0
        for f0 in all_cmaps(g.obj_space, h.obj_space):
            for f1 in all_cmaps(g.arr_space, h.arr_space):
                if any(h.s(f1(a)) != f0(g.s(a)) or h.t(f1(a)) != f0(g.t(a)) for a in g.arrows):
                    continue
                if any(f1(g.one(x)) != h.one(f0(x)) for x in g.objects):
                    continue
                if any(f1(v) != h.mul(f1(a), f1(b)) for (a, b), v in g.composites().items()):
                    continue
                count += 1
        return count

    for g, h in [(B, B), (UNIT_PT, B), (SWAP, B), (UNIT_S, UNIT_S)]:
        assert len(all_homs(g, h)) == oracle(g, h)
