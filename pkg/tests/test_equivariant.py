"""Equivariant sheaves: actions, the site, representables, pullbacks, stalks."""

import pytest

from etalestacks.equivariant import (
    EquivariantMap,
    EquivariantSheaf,
    HSpace,
    SiteArrow,
    constant_group_object,
    equivariant_maps,
    hom_point_id,
    identity_equivariant_map,
    is_group_like,
    pair_sheaf_groupoid,
    pullback_sheaf,
    pullback_sheaf_groupoid,
    representable_map,
    representable_sheaf,
    sections_groupoid,
    site_arrow_from_map,
    site_hom,
    site_identity,
    stalk,
    terminal_sheaf,
    terminal_sheaf_groupoid,
    unit_sheaf_groupoid,
)
from etalestacks.fintop import CMap, FinSpace, StructureError, identity_map, pair_id
from etalestacks.groupoid import GroupoidHom, identity_hom, one_object_groupoid, translation_groupoid, unit_groupoid
from etalestacks.groups import cyclic_group
from helpers import all_cmaps

PT = FinSpace(["*"])
S = FinSpace(["o", "c"], [("o", "c")])
D2 = FinSpace(["a", "b"])
Z2 = cyclic_group(2)

B = one_object_groupoid(Z2)
SWAP = translation_groupoid(Z2, D2, {("e", "a"): "a", ("e", "b"): "b", ("g", "a"): "b", ("g", "b"): "a"})
UNIT_S = unit_groupoid(S)
UNIT_PT = unit_groupoid(PT)


def oracle_equivariant_maps(dom, cod):
    """Independent route: filter every continuous map by the two equations."""
    out = []
    for f in all_cmaps(dom.total, cod.total):
        if any(cod.moment(f(e)) != dom.moment(e) for e in dom.total.points):
            continue
        if any(f(v) != cod.act(g, f(e)) for (g, e), v in dom.action.items()):
            continue
        out.append(f)
    return out


def graphs(maps):
    return sorted(tuple(sorted(m.f.graph.items())) if isinstance(m, EquivariantMap) else tuple(sorted(m.graph.items())) for m in maps)


def test_hspace_validation_errors():
    ident = identity_map(D2)
    with pytest.raises(StructureError) as err:
        HSpace(SWAP, D2, ident, {(g, x): x for x in D2.points for g in SWAP.arrows_from(x) if g.startswith("(e")})
    assert err.value.invariant == "action-total"
    with pytest.raises(StructureError) as err:
        HSpace(SWAP, D2, ident, {(g, x): x for x in D2.points for g in SWAP.arrows_from(x)})
    assert err.value.invariant == "action-moment"
    const = CMap(D2, PT, {"a": "*", "b": "*"})
    with pytest.raises(StructureError) as err:
        HSpace(B, D2, const, {("e", "a"): "b", ("e", "b"): "a", ("g", "a"): "a", ("g", "b"): "b"})
    assert err.value.invariant == "action-unit"
    with pytest.raises(StructureError) as err:
        HSpace(B, D2, const, {("e", "a"): "a", ("e", "b"): "b", ("g", "a"): "a", ("g", "b"): "a"})
    assert err.value.invariant == "action-associative"
    const_s = CMap(S, PT, {"o": "*", "c": "*"})
    with pytest.raises(StructureError) as err:
        HSpace(B, S, const_s, {("e", "o"): "o", ("e", "c"): "c", ("g", "o"): "c", ("g", "c"): "o"})
    assert err.value.invariant == "action-continuous"
    with pytest.raises(StructureError) as err:
        EquivariantSheaf(UNIT_PT, S, const_s, {("*", "o"): "o", ("*", "c"): "c"})
    assert err.value.invariant == "sheaf-etale-moment"


def test_equivariant_map_validation():
    m = representable_sheaf(B, {"*"})
    with pytest.raises(StructureError) as err:
        EquivariantMap(m, m, {"e": "e", "g": "g", "extra": "e"})
    assert err.value.invariant in {"map-total", "equivariant-map"}
    trivial = EquivariantSheaf(B, D2, CMap(D2, PT, {"a": "*", "b": "*"}),
                               {(g, x): x for x in D2.points for g in ["e", "g"]})
    with pytest.raises(StructureError) as err:
        EquivariantMap(m, trivial, {"e": "a", "g": "b"})
    assert err.value.invariant == "equivariant-action"


def test_is_isomorphism_requires_continuous_inverse():
    disc = FinSpace(["o2", "c2"])
    dom = HSpace(UNIT_S, disc, {"o2": "o", "c2": "c"}, {("o", "o2"): "o2", ("c", "c2"): "c2"})
    cod = HSpace(UNIT_S, S, identity_map(S), {("o", "o"): "o", ("c", "c"): "c"})
    f = EquivariantMap(dom, cod, {"o2": "o", "c2": "c"})
    d = f.is_isomorphism()
    assert not d.ok and "inverse" in d.reason
    ident = identity_equivariant_map(cod)
    assert ident.is_isomorphism().ok


def test_representable_sheaf_frozen_values():
    m = representable_sheaf(B, {"*"})
    assert m.total.points == ("e", "g")
    assert m.act("g", "e") == "g" and m.act("g", "g") == "e"

    mo = representable_sheaf(UNIT_S, {"o"})
    assert mo.total.points == ("o",)

    ma = representable_sheaf(SWAP, {"a"})
    assert set(ma.total.points) == {"(e,a)", "(g,a)"}
    assert ma.moment("(e,a)") == "a" and ma.moment("(g,a)") == "b"


def test_representable_sheaf_rejects_non_open():
    with pytest.raises(StructureError) as err:
        representable_sheaf(UNIT_S, {"c"})
    assert err.value.invariant == "open-set"


def test_site_hom_frozen_counts():
    assert len(site_hom(B, {"*"}, {"*"})) == 2
    assert len(site_hom(UNIT_S, {"o"}, {"o", "c"})) == 1
    assert len(site_hom(UNIT_S, {"o"}, {"o"})) == 1
    assert len(site_hom(SWAP, {"a"}, {"b"})) == 1
    assert site_identity(B, {"*"}) in site_hom(B, {"*"}, {"*"})


def test_site_arrow_validation():
    with pytest.raises(StructureError) as err:
        SiteArrow(SWAP, {"a"}, {"a"}, {"a": "(g,a)"})
    assert err.value.invariant == "site-target"
    with pytest.raises(StructureError) as err:
        SiteArrow(SWAP, {"a"}, {"b"}, {"a": "(e,b)"})
    assert err.value.invariant == "site-section"


def all_opens(h):
    return [o.carrier for o in h.obj_space.opens()]


def test_representable_map_is_functorial_bijection():
    # the site embeds into sheaf maps: bijective on hom-sets, strictly functorial
    for h in [B, SWAP, UNIT_S]:
        opens = all_opens(h)
        for u in opens:
            assert representable_map(site_identity(h, u)).f == identity_map(representable_sheaf(h, u).total)
            for v in opens:
                arrows = site_hom(h, u, v)
                maps = equivariant_maps(representable_sheaf(h, u), representable_sheaf(h, v))
                images = [representable_map(sig) for sig in arrows]
                assert graphs(images) == graphs(maps)
                for sig in arrows:
                    assert site_arrow_from_map(h, u, v, representable_map(sig)) == sig
                for w in opens:
                    for tau in site_hom(h, v, w):
                        for sig in arrows:
                            lhs = representable_map(sig.then(tau))
                            rhs = representable_map(sig).then(representable_map(tau))
                            assert lhs == rhs


def test_representable_map_frozen_swap_example():
    sig = [s for s in site_hom(B, {"*"}, {"*"}) if s("*") == "g"][0]
    f = representable_map(sig)
    assert f("e") == "g" and f("g") == "e"


def test_equivariant_maps_against_oracle():
    m = representable_sheaf(B, {"*"})
    trivial = EquivariantSheaf(B, D2, CMap(D2, PT, {"a": "*", "b": "*"}),
                               {(g, x): x for x in D2.points for g in ["e", "g"]})
    ma = representable_sheaf(SWAP, {"a"})
    mb = representable_sheaf(SWAP, {"b"})
    cases = [
        (m, m), (m, trivial), (trivial, m), (trivial, trivial),
        (ma, mb), (ma, ma), (ma, terminal_sheaf(SWAP)), (terminal_sheaf(SWAP), ma),
        (representable_sheaf(UNIT_S, {"o"}), terminal_sheaf(UNIT_S)),
        (terminal_sheaf(UNIT_S), terminal_sheaf(UNIT_S)),
    ]
    for dom, cod in cases:
        assert graphs(equivariant_maps(dom, cod)) == graphs(oracle_equivariant_maps(dom, cod))


def test_free_sheaf_has_no_maps_from_trivial():
    # fixture sheaf with free action admits exactly |Z2| self maps and none from
    # the two fixed points sheaf
    m = representable_sheaf(B, {"*"})
    trivial = EquivariantSheaf(B, D2, CMap(D2, PT, {"a": "*", "b": "*"}),
                               {(g, x): x for x in D2.points for g in ["e", "g"]})
    assert len(equivariant_maps(m, m)) == 2
    assert len(equivariant_maps(trivial, m)) == 0
    assert len(equivariant_maps(m, trivial)) == 2


def test_pullback_sheaf_identity_and_frozen_example():
    m = representable_sheaf(B, {"*"})
    pb = pullback_sheaf(identity_hom(B), m)
    iso = EquivariantMap(pb.sheaf, m, {p: pb.pr_total(p) for p in pb.sheaf.total.points})
    assert iso.is_isomorphism().ok

    proj = GroupoidHom(B, UNIT_PT, {"*": "*"}, {"e": "*", "g": "*"})
    bundle = EquivariantSheaf(UNIT_PT, D2, CMap(D2, PT, {"a": "*", "b": "*"}),
                              {("*", "a"): "a", ("*", "b"): "b"})
    pulled = pullback_sheaf(proj, bundle).sheaf
    assert len(pulled.total) == 2
    assert all(pulled.act("g", e) == e for e in pulled.total.points)


def test_pullback_pseudo_functorial():
    incl = GroupoidHom(UNIT_PT, B, {"*": "*"}, {"*": "e"})
    proj = GroupoidHom(B, UNIT_PT, {"*": "*"}, {"e": "*", "g": "*"})
    collapse = GroupoidHom(SWAP, UNIT_PT, {"a": "*", "b": "*"}, {a: "*" for a in SWAP.arrows})
    cases = [
        (incl, proj, EquivariantSheaf(UNIT_PT, D2, CMap(D2, PT, {"a": "*", "b": "*"}),
                                      {("*", "a"): "a", ("*", "b"): "b"})),
        (proj, incl, representable_sheaf(B, {"*"})),
        (collapse, incl, representable_sheaf(B, {"*"})),
    ]
    for phi, psi, e in cases:
        once = pullback_sheaf(phi.then(psi), e).sheaf
        twice = pullback_sheaf(phi, pullback_sheaf(psi, e).sheaf).sheaf
        graph = {}
        for p in once.total.points:
            x = None
            for q in phi.dom.objects:
                for v in e.total.points:
                    if pair_id(q, v) == p:
                        x, val = q, v
            graph[p] = pair_id(x, pair_id(phi.f0(x), val))
        iso = EquivariantMap(once, twice, graph)
        assert iso.is_isomorphism().ok


def test_sheaf_groupoid_builders_and_validation():
    bq = constant_group_object(UNIT_PT, Z2)
    assert bq.groupoid.arrows == ("(e,*)", "(g,*)")
    assert terminal_sheaf_groupoid(B).groupoid.arrows == ("*",)
    m = representable_sheaf(B, {"*"})
    pair_obj = pair_sheaf_groupoid(m)
    assert len(pair_obj.groupoid.arrows) == 4
    unit_obj = unit_sheaf_groupoid(m)
    assert unit_obj.source_map().f == identity_map(m.total)


def test_stalk_frozen_values():
    bq = constant_group_object(UNIT_PT, Z2)
    st = stalk(bq, "*")
    assert len(st.groupoid.objects) == 1 and len(st.groupoid.arrows) == 2
    d = is_group_like(st.groupoid)
    assert d.ok and d.certificate["isotropy"].is_isomorphic_to(Z2)

    assert len(stalk(terminal_sheaf_groupoid(B), "*").groupoid.arrows) == 1

    bundle = EquivariantSheaf(UNIT_PT, D2, CMap(D2, PT, {"a": "*", "b": "*"}),
                              {("*", "a"): "a", ("*", "b"): "b"})
    st2 = stalk(unit_sheaf_groupoid(bundle), "*")
    assert len(st2.groupoid.objects) == 2 and len(st2.groupoid.arrows) == 2
    assert not is_group_like(st2.groupoid).ok

    with pytest.raises(StructureError) as err:
        stalk(bq, "missing")
    assert err.value.invariant == "stalk-point"


def test_stalk_nonempty_when_objects_cover():
    for k in [constant_group_object(UNIT_PT, Z2), terminal_sheaf_groupoid(SWAP),
              pair_sheaf_groupoid(representable_sheaf(B, {"*"})),
              unit_sheaf_groupoid(representable_sheaf(UNIT_S, {"o", "c"}))]:
        if k.obj_sheaf.moment.is_surjective():
            for x in k.base.objects:
                assert len(stalk(k, x).groupoid.objects) > 0


def test_sections_recovered_along_the_atlas():
    # sections over an open computed over the base agree with sections of the
    # pullback along the object inclusion computed over the bare space
    for k in [constant_group_object(UNIT_PT, Z2), terminal_sheaf_groupoid(SWAP),
              pair_sheaf_groupoid(representable_sheaf(SWAP, {"a", "b"}))]:
        h = k.base
        atlas = GroupoidHom(unit_groupoid(h.obj_space), h,
                            identity_map(h.obj_space), h.unit_map)
        plain = pullback_sheaf_groupoid(atlas, k)
        for u in h.obj_space.opens():
            over_base = sections_groupoid(k, u)
            over_space = sections_groupoid(plain, u)
            assert len(over_base.objects) == len(over_space.objects)
            assert len(over_base.arrows) == len(over_space.arrows)
            # canonical comparison on objects: evaluate at units, tag base point
            seen = set()
            for name, f in over_base.objects.items():
                image = {x: pair_id(x, f(h.one(x))) for x in u.points}
                target = EquivariantMap(
                    representable_sheaf(plain.base, u), plain.obj_sheaf, image)
                seen.add(hom_point_id(target))
            assert seen == set(over_space.objects)


def test_pullback_sheaf_groupoid_componentwise():
    proj = GroupoidHom(B, UNIT_PT, {"*": "*"}, {"e": "*", "g": "*"})
    bq = constant_group_object(UNIT_PT, Z2)
    pulled = pullback_sheaf_groupoid(proj, bq)
    assert len(pulled.groupoid.objects) == 1 and len(pulled.groupoid.arrows) == 2
    st = stalk(pulled, "*")
    assert is_group_like(st.groupoid).ok


def test_site_composition_associative():
    for h in [B, SWAP]:
        opens = all_opens(h)
        for u in opens:
            for v in opens:
                for w in opens:
                    for z in opens:
                        for s1 in site_hom(h, u, v):
                            for s2 in site_hom(h, v, w):
                                for s3 in site_hom(h, w, z):
                                    assert s1.then(s2).then(s3) == s1.then(s2.then(s3))
