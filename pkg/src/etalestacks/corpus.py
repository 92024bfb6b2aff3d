"""Named fixtures, randomized corpora, and the executable verification suites."""

import itertools
import random
from dataclasses import dataclass

from .action import (
    OverGroupoid,
    action_groupoid,
    counit_equivalence,
    inverse_image_compat,
    realize_representable,
    realize_sheaf,
    sections_bijection,
    sections_unit,
)
from .effective import (
    effective_part,
    effective_part_on_hom,
    effective_refinement_compare,
    effectiveness_iso,
    factor_through_effective,
    haefliger,
    ineffective_isotropy,
    is_effective,
)
from .equivariant import (
    EquivariantSheaf,
    constant_group_object,
    equivariant_maps,
    pair_sheaf_groupoid,
    representable_sheaf,
    stalk,
    terminal_sheaf,
    terminal_sheaf_groupoid,
    unit_sheaf_groupoid,
)
from .fintop import CMap, FinSpace, StructureError, fibered_product, pair_id
from .gerbe import (
    ef_of_realization,
    gerbe_decomposition_check,
    gerbe_from_ineffective,
    is_bouquet,
    is_full,
    is_gerbe_stalkwise,
    stalk_vs_ineffective_isotropy,
)
from .gets import theta, theta_on_hom, theta_xi_comparison, xi, xi_on_map
from .groupoid import (
    FinGroupoid,
    GroupoidHom,
    all_homs,
    categorically_equivalent,
    cech_groupoid,
    identity_hom,
    is_morita_equivalence,
    one_object_groupoid,
    translation_groupoid,
    unit_groupoid,
    weak_pullback,
)
from .groups import cyclic_group, klein_four_group
from .serial import Fixture


def point_space():
    """The one-point space."""
    return FinSpace(["*"])


def sierpinski_space():
    """Two points with the open point below the closed one."""
    return FinSpace(["o", "c"], [("o", "c")])


def discrete_pair_space():
    """Two points with no relation."""
    return FinSpace(["a", "b"])


def swap_groupoid():
    """The order-two group swapping two discrete points."""
    act = {("e", "a"): "a", ("e", "b"): "b", ("g", "a"): "b", ("g", "b"): "a"}
    return translation_groupoid(cyclic_group(2), discrete_pair_space(), act)


def point_quotient():
    """The order-two group as a one-object groupoid."""
    return one_object_groupoid(cyclic_group(2))


def sierpinski_unit():
    """The unit groupoid of the two-point chain."""
    return unit_groupoid(sierpinski_space())


def free_double_sheaf():
    """The free rank-one sheaf on the one-object order-two groupoid."""
    return representable_sheaf(point_quotient(), ["*"])


def point_bouquet():
    """The order-two group as a groupoid object over the one-point unit groupoid."""
    return constant_group_object(unit_groupoid(point_space()), cyclic_group(2))


def open_inclusion_hom(g, pts):
    """The inclusion of the unit groupoid on an open set of objects."""
    k = unit_groupoid(g.obj_space.subspace(pts))
    return GroupoidHom(k, g, {x: x for x in k.objects}, {x: g.one(x) for x in k.arrows})


def minimal_open_cover(space):
    """The cover by all minimal opens, one chart per point."""
    pts, graph, chart = [], {}, {}
    for q in space.points:
        for p in space.down_set(q):
            pid = pair_id(q, p)
            pts.append(pid)
            graph[pid] = p
            chart[pid] = q
    pairs = [(x, y) for x in pts for y in pts
             if x != y and chart[x] == chart[y] and space.le(graph[x], graph[y])]
    return CMap(FinSpace(pts, pairs), space, graph)


def max_star(g):
    """The largest number of arrows out of a single object."""
    return max((len(g.arrows_from(x)) for x in g.objects), default=0)


@dataclass
class CorpusInstance:
    """One groupoid with the sheaves, homs, and groupoid objects checked against it."""

    name: str
    groupoid: FinGroupoid
    sheaves: list
    overs: list
    pairs: list
    objects: list
    points: list
    size: tuple

    @property
    def heavy(self):
        """Whether the instance takes part in the stack-building suites."""
        return bool(self.overs)


def _instance(name, g, sheaves=(), overs=(), pairs=(), objects=(), points=()):
    size = (len(g.arrows), len(g.objects), name)
    return CorpusInstance(name, g, list(sheaves), list(overs), list(pairs), list(objects), list(points), size)


def named_instances():
    """The five named fixtures plus a few stress shapes."""
    out = []
    z2 = cyclic_group(2)

    a = swap_groupoid()
    out.append(_instance(
        "A-swap", a,
        sheaves=[("terminal", terminal_sheaf(a)), ("representable-a", representable_sheaf(a, ["a"]))],
        overs=[("identity", OverGroupoid(identity_hom(a))),
               ("realized terminal", realize_sheaf(terminal_sheaf(a)).over),
               ("realized representable-a", realize_sheaf(representable_sheaf(a, ["a"])).over)],
        pairs=[("identity over {a}", identity_hom(a), ["a"]),
               ("identity over all", identity_hom(a), ["a", "b"]),
               ("patch inclusion over {b}", open_inclusion_hom(a, ["a"]), ["b"])],
        objects=[("constant order-two object", constant_group_object(a, z2), True),
                 ("terminal object", terminal_sheaf_groupoid(a), True)],
        points=["a"]))

    b = point_quotient()
    out.append(_instance(
        "B-point-quotient", b,
        sheaves=[("free double", representable_sheaf(b, ["*"])), ("terminal", terminal_sheaf(b))],
        overs=[("identity", OverGroupoid(identity_hom(b))),
               ("realized free double", realize_sheaf(representable_sheaf(b, ["*"])).over),
               ("realized terminal", realize_sheaf(terminal_sheaf(b)).over)],
        pairs=[("identity over the point", identity_hom(b), ["*"])],
        objects=[("free double as unit object", unit_sheaf_groupoid(representable_sheaf(b, ["*"])), False),
                 ("constant order-two object", constant_group_object(b, z2), True),
                 ("terminal object", terminal_sheaf_groupoid(b), True)],
        points=["*"]))

    c = sierpinski_unit()
    out.append(_instance(
        "C-sierpinski-unit", c,
        sheaves=[("terminal", terminal_sheaf(c)),
                 ("representable-o", representable_sheaf(c, ["o"])),
                 ("representable-full", representable_sheaf(c, ["o", "c"]))],
        overs=[("identity", OverGroupoid(identity_hom(c))),
               ("realized representable-o", realize_sheaf(representable_sheaf(c, ["o"])).over)],
        pairs=[("identity over {o}", identity_hom(c), ["o"]),
               ("identity over all", identity_hom(c), ["o", "c"]),
               ("patch inclusion over {o}", open_inclusion_hom(c, ["o"]), ["o"])],
        objects=[("open unit object", unit_sheaf_groupoid(representable_sheaf(c, ["o"])), False),
                 ("constant order-two object", constant_group_object(c, z2), True)],
        points=["o", "c"]))

    d = point_quotient()
    out.append(_instance(
        "D-free-double", d,
        sheaves=[("free double", free_double_sheaf())],
        overs=[("realized free double", realize_sheaf(free_double_sheaf()).over)],
        points=["*"]))

    e = unit_groupoid(point_space())
    bouquet = point_bouquet()
    out.append(_instance(
        "E-point-bouquet", e,
        sheaves=[("terminal", terminal_sheaf(e)), ("order-two constant", bouquet.arr_sheaf)],
        overs=[("identity", OverGroupoid(identity_hom(e))),
               ("realized bouquet", action_groupoid(bouquet).over)],
        pairs=[("identity over the point", identity_hom(e), ["*"])],
        objects=[("order-two bouquet", bouquet, True)],
        points=["*"]))

    chain = translation_groupoid(
        cyclic_group(2), sierpinski_space(),
        {("e", "o"): "o", ("e", "c"): "c", ("g", "o"): "o", ("g", "c"): "c"})
    out.append(_instance(
        "X-chain-kernel", chain,
        sheaves=[("terminal", terminal_sheaf(chain))],
        overs=[("identity", OverGroupoid(identity_hom(chain)))],
        pairs=[("identity over {o}", identity_hom(chain), ["o"])],
        objects=[("constant order-two object", constant_group_object(chain, z2), True)],
        points=["o"]))

    out.append(_instance(
        "X-order-three-point", one_object_groupoid(cyclic_group(3)),
        sheaves=[("terminal", terminal_sheaf(one_object_groupoid(cyclic_group(3))))],
        overs=[("identity", OverGroupoid(identity_hom(one_object_groupoid(cyclic_group(3)))))],
        pairs=[("identity over the point", identity_hom(one_object_groupoid(cyclic_group(3))), ["*"])],
        objects=[("constant order-two object",
                  constant_group_object(one_object_groupoid(cyclic_group(3)), z2), True)],
        points=["*"]))

    out.append(_instance(
        "X-order-four-point", one_object_groupoid(cyclic_group(4)),
        objects=[("terminal object", terminal_sheaf_groupoid(one_object_groupoid(cyclic_group(4))), True)],
        points=["*"]))

    out.append(_instance(
        "X-klein-point", one_object_groupoid(klein_four_group()),
        objects=[("terminal object", terminal_sheaf_groupoid(one_object_groupoid(klein_four_group())), True)],
        points=["*"]))

    return out


def random_space(rng):
    """A random space on at most four points, closed under the order axioms."""
    n = rng.choice([1, 2, 2, 3, 3, 4])
    pts = ["p%d" % i for i in range(n)]
    pairs = [(pts[i], pts[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.3]
    return FinSpace(pts, pairs)


def space_automorphisms(space):
    """All self-homeomorphisms, by brute force over permutations."""
    pts = list(space.points)
    out = []
    for perm in itertools.permutations(pts):
        m = dict(zip(pts, perm))
        if all(space.le(p, q) == space.le(m[p], m[q]) for p in pts for q in pts):
            out.append(m)
    return out


def _perm_order(m):
    order = 1
    cur = dict(m)
    while any(cur[p] != p for p in cur):
        cur = {p: m[cur[p]] for p in cur}
        order += 1
    return order


def random_etale_groupoid(rng):
    """A random groupoid with open source and target maps."""
    kind = rng.random()
    if kind < 0.22:
        return unit_groupoid(random_space(rng))
    if kind < 0.42:
        return one_object_groupoid(cyclic_group(rng.choice([2, 2, 3])))
    n = rng.choice([2, 2, 2, 3])
    group = cyclic_group(n)
    space = random_space(rng)
    autos = [m for m in space_automorphisms(space) if n % _perm_order(m) == 0]
    sigma = rng.choice(autos)
    powers = {"e": {p: p for p in space.points}}
    name, table = "e", powers["e"]
    for _ in range(n - 1):
        name = group.mul("g", name)
        table = {p: sigma[table[p]] for p in table}
        powers[name] = table
    act = {(h, p): powers[h][p] for h in group.elements for p in space.points}
    return translation_groupoid(group, space, act)


def random_open(rng, space, nonempty=True):
    """A random open set of points."""
    opens = [sorted(u.points) for u in space.opens() if u.points or not nonempty]
    return rng.choice(opens)


def random_sheaf(rng, g):
    """A random sheaf over the groupoid, kept small enough to realize twice."""
    if rng.random() < 0.4:
        return terminal_sheaf(g)
    u = random_open(rng, g.obj_space)
    fiber = sum(1 for a in g.arrows if g.s(a) in u)
    if fiber * max_star(g) > 18:
        u = sorted(g.obj_space.down_set(rng.choice(g.objects)))
    return representable_sheaf(g, u)


def random_groupoid_object(rng, g):
    """A random groupoid object over the groupoid, with its expected bouquet flag."""
    kind = rng.random()
    if kind < 0.45:
        n = 3 if rng.random() < 0.25 and len(g.arrows) <= 6 else 2
        return ("constant order-%d object" % n, constant_group_object(g, cyclic_group(n)), True)
    if kind < 0.65:
        return ("terminal object", terminal_sheaf_groupoid(g), True)
    if kind < 0.85:
        return ("unit object", unit_sheaf_groupoid(random_sheaf(rng, g)), None)
    return ("pair object", pair_sheaf_groupoid(random_sheaf(rng, g)), None)


def random_instance(rng, idx):
    """One randomized groupoid with attached sheaves, homs, objects, and points."""
    g = random_etale_groupoid(rng)
    e = random_sheaf(rng, g)
    sheaves = [("random sheaf", e)]
    overs = [("realized sheaf", realize_sheaf(e).over)]
    if rng.random() < 0.5:
        overs.append(("identity", OverGroupoid(identity_hom(g))))
    pairs = [("identity over an open", identity_hom(g), random_open(rng, g.obj_space))]
    if rng.random() < 0.4:
        u = sorted(g.obj_space.down_set(rng.choice(g.objects)))
        pairs.append(("patch inclusion", open_inclusion_hom(g, u), random_open(rng, g.obj_space)))
    objects = [random_groupoid_object(rng, g)]
    points = [rng.choice(g.objects)]
    return _instance("R%03d" % idx, g, sheaves, overs, pairs, objects, points)


def build_corpus(seed=7, instances=200):
    """The named fixtures plus randomized instances, smallest first."""
    rng = random.Random(seed)
    out = named_instances() + [random_instance(rng, i) for i in range(instances)]
    out.sort(key=lambda inst: inst.size)
    return out


def instance_fixture(inst):
    """Serialize an instance as a fixture file for replay."""
    fixture = Fixture(groupoids={"G": inst.groupoid})
    for i, (label, e) in enumerate(inst.sheaves):
        fixture.sheaves["E%d" % i] = e
    return fixture


def _suite_realization_counit(corpus):
    for inst in corpus:
        for label, over in inst.overs:
            def fn(over=over):
                c = counit_equivalence(over)
                assert c.package.backward.then(c.package.forward) == identity_hom(over.total)
            yield inst, "counit of %s" % label, fn


def _suite_sections_unit(corpus):
    for inst in corpus:
        for label, e in inst.sheaves:
            def fn(e=e):
                comp = sections_unit(e)
                assert len(comp.classes) == len(e.total.points)
            yield inst, "sections of the realized %s" % label, fn


def _suite_representable_opens(corpus):
    for inst in corpus:
        def fn(g=inst.groupoid):
            for u in g.obj_space.opens():
                r = realize_representable(g, list(u.points))
                assert r.morita.ok
        yield inst, "realize every open patch", fn


def _fiber_groupoid(k, point):
    """The homotopy fiber of the realization anchor over one base point."""
    ag = action_groupoid(k)
    h = k.base
    incl = GroupoidHom(
        unit_groupoid(h.obj_space.subspace([point])), h,
        {point: point}, {point: h.one(point)})
    return weak_pullback(incl, ag.anchor).groupoid


def _suite_inverse_image(corpus):
    for inst in corpus:
        for label, phi, u in inst.pairs:
            def fn(phi=phi, u=u):
                ic = inverse_image_compat(phi, u)
                assert ic.compare.then(ic.realization.anchor) == ic.wp.pr1
                assert ic.section.then(ic.wp.pr1) == ic.realization.anchor
            yield inst, "inverse image along %s" % label, fn
        for label, k, _ in inst.objects:
            for p in inst.points:
                def fn(k=k, p=p):
                    st = stalk(k, p).groupoid
                    assert categorically_equivalent(st, _fiber_groupoid(k, p)).ok
                yield inst, "stalk of %s vs the realized fiber at %s" % (label, p), fn


def _suite_effective_part(corpus):
    for inst in corpus:
        def fn(g=inst.groupoid):
            ef = effective_part(g)
            assert is_effective(ef.groupoid).ok
            again = effective_part(ef.groupoid)
            assert len(again.groupoid.arrows) == len(ef.groupoid.arrows)
            effectiveness_iso(ef.groupoid)
            cover = minimal_open_cover(g.obj_space)
            refined, projection = cech_groupoid(g, cover)
            assert is_morita_equivalence(projection).ok
            assert is_morita_equivalence(effective_part_on_hom(projection)).ok
            effective_refinement_compare(g, cover)
            factored = factor_through_effective(ef.projection)
            assert ef.projection.then(factored) == ef.projection
            if len(ef.groupoid.arrows) <= 6:
                matches = [psi for psi in all_homs(ef.groupoid, ef.groupoid)
                           if ef.projection.then(psi) == ef.projection]
                assert matches == [factored]
        yield inst, "effective part laws", fn


def _suite_gerbe_recognition(corpus):
    for inst in corpus:
        for label, k, expect in inst.objects:
            def fn(k=k, expect=expect):
                b = is_bouquet(k)
                assert b.ok == is_gerbe_stalkwise(k).ok
                if expect is not None:
                    assert b.ok == expect
                ag = action_groupoid(k)
                if is_effective(k.base).ok:
                    full = is_full(ag.anchor)
                    collapse = is_morita_equivalence(effective_part_on_hom(ag.anchor))
                    assert b.ok == (full.ok and collapse.ok)
                gerbe_decomposition_check(ag.anchor)
            yield inst, "recognition of %s" % label, fn


def _suite_gerbe_sections(corpus):
    for inst in corpus:
        if inst.heavy:
            def fn(g=inst.groupoid):
                pres = gerbe_from_ineffective(g)
                assert is_bouquet(pres.bouquet.stack).ok
                assert is_effective(pres.base).ok
            yield inst, "gerbe presentation of the groupoid", fn
        for label, k, _ in inst.objects:
            if is_effective(k.base).ok and is_bouquet(k).ok:
                def fn(k=k):
                    comp = ef_of_realization(k)
                    assert is_effective(comp.effective.groupoid).ok
                yield inst, "effective part of the realized %s" % label, fn


def _suite_isotropy(corpus):
    for inst in corpus:
        for p in inst.points:
            def fn(g=inst.groupoid, p=p):
                kernel = ineffective_isotropy(g, p)
                if is_effective(g).ok:
                    assert len(kernel.elements) == 1
            yield inst, "kernel at %s" % p, fn
        for label, k, _ in inst.objects:
            if is_effective(k.base).ok and is_bouquet(k).ok:
                for p in inst.points:
                    def fn(k=k, p=p):
                        comp = stalk_vs_ineffective_isotropy(k, p)
                        assert comp.stalk_group.is_isomorphic_to(comp.fiber_group)
                    yield inst, "stalk isotropy of %s at %s" % (label, p), fn


def _suite_gets_roundtrip(corpus):
    for inst in corpus:
        def fn(g=inst.groupoid):
            obj = theta(g)
            assert xi(obj) == g
            comp = theta_xi_comparison(obj)
            assert comp.package.eps is None
            assert comp.package.backward.then(comp.package.forward) == identity_hom(obj.base)
            phi = identity_hom(g)
            assert xi_on_map(theta_on_hom(phi)) == phi
        yield inst, "round trip through the gerbed category", fn
        for label, phi, _ in inst.pairs:
            if phi.dom is not inst.groupoid and not phi.is_identity():
                def fn(phi=phi):
                    assert xi_on_map(theta_on_hom(phi)) == phi
                yield inst, "round trip of %s" % label, fn


def _oracle_minimal_open(space, q):
    best = set(space.points)
    for r in range(len(space.points) + 1):
        for sub in itertools.combinations(space.points, r):
            s = set(sub)
            if q in s and all(space.le(p, t) <= (p in s) for t in s for p in space.points):
                best &= s
    return best


def _oracle_germ_count(space):
    count = 0
    for p in space.points:
        up = sorted(space.down_set(p))
        for q in space.points:
            uq = sorted(space.down_set(q))
            if len(up) != len(uq):
                continue
            for perm in itertools.permutations(uq):
                m = dict(zip(up, perm))
                if m[p] == q and all(space.le(x, y) == space.le(m[x], m[y]) for x in up for y in up):
                    count += 1
    return count


def _oracle_equivariant_maps(e1, e2):
    pts1, pts2 = list(e1.total.points), list(e2.total.points)
    out = []
    for values in itertools.product(pts2, repeat=len(pts1)):
        f = dict(zip(pts1, values))
        if any(e1.moment(x) != e2.moment(f[x]) for x in pts1):
            continue
        if any(e1.total.le(x, y) and not e2.total.le(f[x], f[y]) for x in pts1 for y in pts1):
            continue
        if any(f[e1.act(h, x)] != e2.act(h, f[x]) for (h, x) in e1.action):
            continue
        out.append(f)
    return out


def _two_point_trivial_sheaf():
    base = unit_groupoid(point_space())
    total = discrete_pair_space()
    moment = CMap(total, point_space(), {"a": "*", "b": "*"})
    return EquivariantSheaf(base, total, moment, {("*", "a"): "a", ("*", "b"): "b"})


def _derived_checks():
    z2 = cyclic_group(2)
    s = sierpinski_space()
    d2 = discrete_pair_space()
    a, b, c = swap_groupoid(), point_quotient(), sierpinski_unit()
    e = unit_groupoid(point_space())
    bouquet = point_bouquet()

    def minimal_opens():
        assert _oracle_minimal_open(s, "c") == set(s.down_set("c")) == {"o", "c"}
        assert _oracle_minimal_open(s, "o") == set(s.down_set("o")) == {"o"}

    def germ_groupoids():
        assert len(haefliger(d2).arrows) == _oracle_germ_count(d2) == 4
        assert len(haefliger(s).arrows) == _oracle_germ_count(s) == 2
        assert all(haefliger(s).s(x) == haefliger(s).t(x) for x in haefliger(s).arrows)

    def effectivity_witness():
        d = is_effective(b)
        assert not d.ok and d.witness == ["e", "g"]
        pairs = [(x, y) for x in b.arrows for y in b.arrows if x < y]
        assert d.witness == list(min(pairs))
        assert is_effective(a).ok and is_effective(c).ok

    def effective_parts():
        ef = effective_part(b)
        assert len(ef.groupoid.objects) == 1 and len(ef.groupoid.arrows) == 1
        assert len(effective_part(a).groupoid.arrows) == len(a.arrows) == 4
        effectiveness_iso(a)

    def kernels():
        assert len(ineffective_isotropy(b, "*").elements) == 2
        assert ineffective_isotropy(b, "*").is_isomorphic_to(z2)
        assert len(ineffective_isotropy(a, "a").elements) == 1

    def free_double_action():
        m = free_double_sheaf()
        assert sorted(m.total.points) == ["e", "g"]
        base = point_quotient()
        assert m.act("g", "e") == base.mul("g", "e") == "g"
        assert m.act("g", "g") == base.mul("g", "g") == "e"

    def section_counts():
        one = equivariant_maps(representable_sheaf(a, ["a"]), representable_sheaf(a, ["b"]))
        assert len(one) == len(_oracle_equivariant_maps(representable_sheaf(a, ["a"]), representable_sheaf(a, ["b"]))) == 1
        two = equivariant_maps(free_double_sheaf(), free_double_sheaf())
        assert len(two) == len(_oracle_equivariant_maps(free_double_sheaf(), free_double_sheaf())) == 2

    def bouquet_realization():
        ag = action_groupoid(bouquet).groupoid
        assert len(ag.objects) == 1 and len(ag.arrows) == 2
        assert categorically_equivalent(ag, b).ok

    def pair_realization():
        ag = action_groupoid(unit_sheaf_groupoid(free_double_sheaf())).groupoid
        assert sorted(ag.objects) == ["e", "g"]
        assert len(ag.arrows) == 4
        ends = {(ag.s(x), ag.t(x)) for x in ag.arrows}
        assert len(ends) == 4

    def stalks():
        st = stalk(bouquet, "*").groupoid
        assert len(st.objects) == 1 and len(st.arrows) == 2
        flat = stalk(unit_sheaf_groupoid(_two_point_trivial_sheaf()), "*").groupoid
        assert len(flat.objects) == 2 and all(flat.s(x) == flat.t(x) for x in flat.arrows)

    def recognition():
        assert is_bouquet(bouquet).ok and is_gerbe_stalkwise(bouquet).ok
        miss = is_bouquet(unit_sheaf_groupoid(representable_sheaf(c, ["o"])))
        assert not miss.ok and miss.witness == "c"
        assert not is_gerbe_stalkwise(unit_sheaf_groupoid(_two_point_trivial_sheaf())).ok

    def fullness():
        assert is_full(action_groupoid(bouquet).anchor).ok
        down = GroupoidHom(unit_groupoid(d2), e, {"a": "*", "b": "*"}, {"a": "*", "b": "*"})
        assert not is_full(down).ok

    def gerbe_vs_kernel():
        pres = gerbe_from_ineffective(b)
        assert len(pres.base.arrows) == 1
        assert len(pres.bouquet.stack.arr_sheaf.total.points) == 2
        comp = ef_of_realization(bouquet)
        assert len(comp.effective.groupoid.arrows) == 1

    def three_way_isotropy():
        comp = stalk_vs_ineffective_isotropy(bouquet, "*")
        for grp in (comp.stalk_group, comp.realization_group, comp.fiber_group):
            assert len(grp.elements) == 2 and grp.is_isomorphic_to(z2)
        wide = stalk_vs_ineffective_isotropy(constant_group_object(unit_groupoid(d2), z2), "a")
        assert len(wide.stalk_group.elements) == 2

    def refinement_counts():
        doubled = FinSpace(["*1", "*2"])
        refined, projection = cech_groupoid(b, CMap(doubled, point_space(), {"*1": "*", "*2": "*"}))
        assert len(refined.objects) == 2 and len(refined.arrows) == 8
        assert 8 == len(b.arrows) * 2 * 2
        chart = FinSpace(["o1", "o2", "c2"], [("o2", "c2")])
        refined_c, _ = cech_groupoid(c, CMap(chart, s, {"o1": "o", "o2": "o", "c2": "c"}))
        assert len(refined_c.objects) == 3 and len(refined_c.arrows) == 5

    def products():
        pt = point_space()
        left = CMap(d2, pt, {"a": "*", "b": "*"})
        square = fibered_product(left, left)
        assert len(square.space.points) == 4
        assert all(square.space.le(x, y) == (x == y) for x in square.space.points for y in square.space.points)
        incl = CMap(s.subspace(["o"]), s, {"o": "o"})
        corner = fibered_product(incl, CMap(s, s, {"o": "o", "c": "c"}))
        assert len(corner.space.points) == 1

    def counit_collapse():
        iota = GroupoidHom(b, e, {"*": "*"}, {"e": "*", "g": "*"})
        comp = counit_equivalence(OverGroupoid(iota))
        total = comp.realization.groupoid
        assert len(total.objects) == 1 and len(total.arrows) == 2
        assert categorically_equivalent(total, b).ok
        sb = sections_bijection(iota, ["*"])
        assert len(sb.object_maps) == 1 and len(sb.arrow_maps) == 2

    def realized_patches():
        r = realize_representable(b, ["*"])
        assert len(r.patch.arrows) == 1
        total = r.realization.groupoid
        assert len(total.arrows) == 4 and len({(total.s(x), total.t(x)) for x in total.arrows}) == 4
        ra = realize_representable(a, ["a"])
        assert len(ra.realization.groupoid.objects) == 2

    def gerbed_round_trip():
        assert xi(theta(b)) == b
        assert xi(theta(a)) == a
        comp = theta_xi_comparison(theta(b))
        assert comp.package.eps is None

    def decomposition_negative():
        into = GroupoidHom(e, b, {"*": "*"}, {"*": "e"})
        dec = gerbe_decomposition_check(into)
        assert not dec.over_codomain.ok

    checks = [
        ("minimal opens of the two-point chain", minimal_opens),
        ("germ groupoid sizes", germ_groupoids),
        ("effectivity witness", effectivity_witness),
        ("effective part sizes", effective_parts),
        ("kernel groups", kernels),
        ("free double sheaf action", free_double_action),
        ("section counts", section_counts),
        ("bouquet realization", bouquet_realization),
        ("pair groupoid realization", pair_realization),
        ("stalk sizes", stalks),
        ("bouquet recognition", recognition),
        ("fullness of anchors", fullness),
        ("gerbe from the kernel", gerbe_vs_kernel),
        ("three-way isotropy", three_way_isotropy),
        ("refinement arrow counts", refinement_counts),
        ("fibered products", products),
        ("counit collapse", counit_collapse),
        ("realized patches", realized_patches),
        ("gerbed round trips", gerbed_round_trip),
        ("decomposition negative", decomposition_negative),
    ]
    return checks


def _suite_derived_values(corpus):
    holder = _instance("fixtures", point_quotient())
    for name, fn in _derived_checks():
        yield holder, name, fn


SUITES = {
    "realization-counit": _suite_realization_counit,
    "sections-unit": _suite_sections_unit,
    "representable-opens": _suite_representable_opens,
    "inverse-image": _suite_inverse_image,
    "effective-part": _suite_effective_part,
    "gerbe-recognition": _suite_gerbe_recognition,
    "gerbe-sections": _suite_gerbe_sections,
    "isotropy": _suite_isotropy,
    "gets-roundtrip": _suite_gets_roundtrip,
    "derived-values": _suite_derived_values,
}


def _run(fn):
    try:
        fn()
        return True, ""
    except StructureError as exc:
        return False, str(exc)
    except AssertionError as exc:
        return False, str(exc) or "exact check failed"


def run_verify(names=None, seed=7, instances=200, corpus=None):
    """Run the named suites over a corpus and report every check."""
    if names is None or names == ["all"] or names == "all":
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise StructureError("verify-suite", "unknown suite %r" % unknown[0])
    if corpus is None:
        corpus = build_corpus(seed, instances)
    by_name = {inst.name: inst for inst in corpus}
    report = {"seed": seed, "instances": instances, "suites": {}, "failures": [], "ok": True}
    for name in names:
        checks = failures = 0
        for inst, check, fn in SUITES[name](corpus):
            checks += 1
            ok, detail = _run(fn)
            if not ok:
                failures += 1
                report["failures"].append(
                    {"suite": name, "instance": inst.name, "check": check, "detail": detail})
        report["suites"][name] = {"checks": checks, "failures": failures}
    if report["failures"]:
        report["ok"] = False
        smallest = min(report["failures"],
                       key=lambda f: by_name[f["instance"]].size if f["instance"] in by_name else (0, 0, ""))
        if smallest["instance"] in by_name:
            report["counterexample"] = instance_fixture(by_name[smallest["instance"]]).document()
    return report


def fixture_files():
    """The shipped fixture files, as named document worlds."""
    b = point_quotient()
    a = swap_groupoid()
    c = sierpinski_unit()
    e = unit_groupoid(point_space())
    bouquet = point_bouquet()
    quot = GroupoidHom(
        a, b, {"a": "*", "b": "*"},
        {"(e,a)": "e", "(e,b)": "e", "(g,a)": "g", "(g,b)": "g"})
    files = {
        "ptz2.json": Fixture(groupoids={"G": b}),
        "swapd2.json": Fixture(groupoids={"G": a, "Q": b}, homs={"quot": quot}),
        "sierpinski.json": Fixture(
            spaces={"S": sierpinski_space(), "O": sierpinski_space().subspace(["o"])},
            maps={"open-o": CMap(sierpinski_space().subspace(["o"]), sierpinski_space(), {"o": "o"})},
            groupoids={"G": c}),
        "freez2.json": Fixture(groupoids={"G": b}, sheaves={"E": free_double_sheaf()}),
        "z2bouquet.json": Fixture(
            groupoids={"G": e},
            sheaves={"K-objects": bouquet.obj_sheaf, "K-arrows": bouquet.arr_sheaf},
            groupoid_objects={"K": bouquet}),
    }
    return files
