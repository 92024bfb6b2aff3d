"""Equivariant sheaves over an etale groupoid, the site of opens, and stalks."""

from dataclasses import dataclass

from .fintop import (
    CMap,
    Decision,
    FinSpace,
    OpenSet,
    StructureError,
    fibered_product,
    identity_map,
    pair_id,
)
from .groupoid import FinGroupoid, GroupoidHom, is_connected_nonempty


class HSpace:
    """A space with a moment map to the objects of a groupoid and an action.

    The action is keyed on pairs (arrow, point) with the arrow's source equal
    to the moment of the point; acting moves the point over the arrow's target.
    """

    __slots__ = ("_base", "_total", "_moment", "_action", "_action_map", "_key")

    def __init__(self, base, total, moment, action):
        if not isinstance(moment, CMap):
            moment = CMap(total, base.obj_space, moment)
        if moment.dom != total or moment.cod != base.obj_space:
            raise StructureError("moment-map", "moment must map the total space to the objects of the base")
        action = dict(action)
        expected = {(g, e) for e in total.points for g in base.arrows_from(moment(e))}
        if set(action) != expected:
            missing = sorted(expected - set(action)) + sorted(set(action) - expected)
            raise StructureError("action-total", f"action must be keyed exactly on composable pairs, mismatch at {missing[0]!r}")
        for (g, e), v in action.items():
            if v not in total:
                raise StructureError("action-total", f"action value {v!r} is not a point of the total space")
            if moment(v) != base.t(g):
                raise StructureError("action-moment", f"moment of {g!r}.{e!r} must be the target of {g!r}")
        for e in total.points:
            if action[(base.one(moment(e)), e)] != e:
                raise StructureError("action-unit", f"unit arrow must act trivially on {e!r}")
        for (g, h), gh in base.composites().items():
            for e in total.points:
                if moment(e) == base.s(h):
                    if action[(gh, e)] != action[(g, action[(h, e)])]:
                        raise StructureError("action-associative", f"composite action fails at ({g!r}, {h!r}, {e!r})")
        diagram = fibered_product(base.source_map, moment)
        try:
            self._action_map = CMap(diagram.space, total, {p: action[(diagram.pr1(p), diagram.pr2(p))] for p in diagram.space.points})
        except StructureError as err:
            raise StructureError("action-continuous", str(err)) from None
        self._base = base
        self._total = total
        self._moment = moment
        self._action = action
        self._key = None

    @property
    def base(self):
        return self._base

    @property
    def total(self):
        return self._total

    @property
    def moment(self):
        return self._moment

    @property
    def action(self):
        return dict(self._action)

    @property
    def action_map(self):
        return self._action_map

    def act(self, g, e):
        try:
            return self._action[(g, e)]
        except KeyError:
            raise StructureError("action-total", f"arrow {g!r} does not act on {e!r}") from None

    def orbits(self):
        """Partition of the total space into action orbits."""
        parent = {e: e for e in self._total.points}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for (g, e), v in self._action.items():
            ra, rb = find(e), find(v)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups = {}
        for e in self._total.points:
            groups.setdefault(find(e), set()).add(e)
        return [frozenset(groups[r]) for r in sorted(groups)]

    def orbit_reps(self):
        return [min(orbit) for orbit in self.orbits()]

    def stabilizer_arrows(self, e):
        return [g for g in self._base.arrows_from(self._moment(e)) if self._action[(g, e)] == e]

    def canonical_key(self):
        if self._key is None:
            self._key = (
                self._base.canonical_key(),
                tuple(self._total.points),
                tuple(sorted(self._total.pairs())),
                tuple(sorted(self._moment.graph.items())),
                tuple(sorted(self._action.items())),
            )
        return self._key

    def __eq__(self, other):
        if not isinstance(other, HSpace):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return f"{type(self).__name__}({len(self._total)} points over {len(self._base.objects)} objects)"


class EquivariantSheaf(HSpace):
    """An action space whose moment map is a local homeomorphism."""

    def __init__(self, base, total, moment, action):
        super().__init__(base, total, moment, action)
        from .fintop import is_etale

        d = is_etale(self.moment)
        if not d.ok:
            raise StructureError("sheaf-etale-moment", f"moment map is not etale: {d.reason}")


class EquivariantMap:
    """A continuous map of action spaces over the same base, over the moments."""

    __slots__ = ("_dom", "_cod", "_f")

    def __init__(self, dom, cod, f):
        if dom.base != cod.base:
            raise StructureError("equivariant-base", "domain and codomain live over different bases")
        if not isinstance(f, CMap):
            f = CMap(dom.total, cod.total, f)
        if f.dom != dom.total or f.cod != cod.total:
            raise StructureError("equivariant-map", "underlying map must go between the total spaces")
        for e in dom.total.points:
            if cod.moment(f(e)) != dom.moment(e):
                raise StructureError("equivariant-moment", f"map does not commute with moments at {e!r}")
        for (g, e), v in dom.action.items():
            if f(v) != cod.act(g, f(e)):
                raise StructureError("equivariant-action", f"map does not commute with the action at ({g!r}, {e!r})")
        self._dom = dom
        self._cod = cod
        self._f = f

    @property
    def dom(self):
        return self._dom

    @property
    def cod(self):
        return self._cod

    @property
    def f(self):
        return self._f

    def __call__(self, e):
        return self._f(e)

    def then(self, other):
        assert self._cod == other.dom
        return EquivariantMap(self._dom, other.cod, self._f.then(other.f))

    def is_isomorphism(self):
        """Decide invertibility; certificate carries the inverse map."""
        if not self._f.is_injective() or not self._f.is_surjective():
            return Decision(False, "underlying map is not bijective")
        back = {v: k for k, v in self._f.graph.items()}
        try:
            inverse = EquivariantMap(self._cod, self._dom, back)
        except StructureError as err:
            return Decision(False, f"inverse is not a map of action spaces: {err}")
        return Decision(True, certificate={"inverse": inverse})

    def __eq__(self, other):
        if not isinstance(other, EquivariantMap):
            return NotImplemented
        return self._dom == other._dom and self._cod == other._cod and self._f == other._f

    def __hash__(self):
        return hash((self._dom.canonical_key(), self._cod.canonical_key(), tuple(sorted(self._f.graph.items()))))

    def __repr__(self):
        return f"EquivariantMap({self._dom!r} -> {self._cod!r})"


def identity_equivariant_map(e):
    return EquivariantMap(e, e, identity_map(e.total))


class SheafGroupoid:
    """A groupoid object in equivariant sheaves over a fixed etale base.

    Wraps a plain groupoid whose object and arrow spaces carry compatible
    actions of the base with etale moment maps.
    """

    __slots__ = ("_base", "_groupoid", "_obj_sheaf", "_arr_sheaf", "_key")

    def __init__(self, base, groupoid, obj_sheaf, arr_sheaf):
        if obj_sheaf.base != base or arr_sheaf.base != base:
            raise StructureError("sheaf-groupoid-base", "component sheaves must live over the declared base")
        if obj_sheaf.total != groupoid.obj_space or arr_sheaf.total != groupoid.arr_space:
            raise StructureError("sheaf-groupoid-total", "component sheaves must carry the groupoid's object and arrow spaces")
        mu0, mu1 = obj_sheaf.moment, arr_sheaf.moment
        for k in groupoid.arrows:
            if mu0(groupoid.s(k)) != mu1(k) or mu0(groupoid.t(k)) != mu1(k):
                raise StructureError("sheaf-groupoid-moment", f"arrow {k!r} has endpoints over a different base point")
        # the structure maps must be equivariant; their constructors check it
        EquivariantMap(arr_sheaf, obj_sheaf, groupoid.source_map)
        EquivariantMap(arr_sheaf, obj_sheaf, groupoid.target_map)
        EquivariantMap(obj_sheaf, arr_sheaf, groupoid.unit_map)
        EquivariantMap(arr_sheaf, arr_sheaf, groupoid.inverse_map)
        for (k1, k2), k12 in groupoid.composites().items():
            for h in base.arrows_from(mu1(k1)):
                if arr_sheaf.act(h, k12) != groupoid.mul(arr_sheaf.act(h, k1), arr_sheaf.act(h, k2)):
                    raise StructureError("sheaf-groupoid-composition", f"action of {h!r} does not preserve composition at ({k1!r}, {k2!r})")
        self._base = base
        self._groupoid = groupoid
        self._obj_sheaf = obj_sheaf
        self._arr_sheaf = arr_sheaf
        self._key = None

    @property
    def base(self):
        return self._base

    @property
    def groupoid(self):
        return self._groupoid

    @property
    def obj_sheaf(self):
        return self._obj_sheaf

    @property
    def arr_sheaf(self):
        return self._arr_sheaf

    def source_map(self):
        return EquivariantMap(self._arr_sheaf, self._obj_sheaf, self._groupoid.source_map)

    def target_map(self):
        return EquivariantMap(self._arr_sheaf, self._obj_sheaf, self._groupoid.target_map)

    def unit_map(self):
        return EquivariantMap(self._obj_sheaf, self._arr_sheaf, self._groupoid.unit_map)

    def inverse_map(self):
        return EquivariantMap(self._arr_sheaf, self._arr_sheaf, self._groupoid.inverse_map)

    def canonical_key(self):
        if self._key is None:
            self._key = (self._obj_sheaf.canonical_key(), self._arr_sheaf.canonical_key(), self._groupoid.canonical_key())
        return self._key

    def __eq__(self, other):
        if not isinstance(other, SheafGroupoid):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return f"SheafGroupoid({len(self._groupoid.objects)} objects, {len(self._groupoid.arrows)} arrows over {len(self._base.objects)} base objects)"


class SheafGroupoidHom:
    """An internal functor of groupoid objects: an equivariant groupoid map."""

    __slots__ = ("_dom", "_cod", "_hom")

    def __init__(self, dom, cod, hom):
        if hom.dom != dom.groupoid or hom.cod != cod.groupoid:
            raise StructureError("internal-functor", "underlying functor does not match the groupoid objects")
        EquivariantMap(dom.obj_sheaf, cod.obj_sheaf, hom.f0)
        EquivariantMap(dom.arr_sheaf, cod.arr_sheaf, hom.f1)
        self._dom = dom
        self._cod = cod
        self._hom = hom

    @property
    def dom(self):
        return self._dom

    @property
    def cod(self):
        return self._cod

    @property
    def hom(self):
        return self._hom

    def obj(self, x):
        return self._hom.obj(x)

    def arr(self, k):
        return self._hom.arr(k)

    def then(self, other):
        assert self._cod == other.dom
        return SheafGroupoidHom(self._dom, other.cod, self._hom.then(other.hom))

    def is_identity(self):
        return self._dom == self._cod and self._hom.is_identity()

    def __eq__(self, other):
        if not isinstance(other, SheafGroupoidHom):
            return NotImplemented
        return self._dom == other._dom and self._cod == other._cod and self._hom == other._hom

    def __hash__(self):
        return hash((self._dom.canonical_key(), self._cod.canonical_key(), self._hom))


def identity_sheaf_groupoid_hom(k):
    from .groupoid import identity_hom

    return SheafGroupoidHom(k, k, identity_hom(k.groupoid))


class SheafGroupoidNat:
    """An internal natural transformation between internal functors."""

    __slots__ = ("_src", "_dst", "_component")

    def __init__(self, src, dst, component):
        if src.dom != dst.dom or src.cod != dst.cod:
            raise StructureError("internal-nat-parallel", "source and destination functors are not parallel")
        if not isinstance(component, EquivariantMap):
            component = EquivariantMap(src.dom.obj_sheaf, src.cod.arr_sheaf, component)
        if component.dom != src.dom.obj_sheaf or component.cod != src.cod.arr_sheaf:
            raise StructureError("internal-nat-component", "component must map objects to codomain arrows")
        kk, ll = src.dom.groupoid, src.cod.groupoid
        for x in kk.objects:
            if ll.s(component(x)) != src.obj(x) or ll.t(component(x)) != dst.obj(x):
                raise StructureError("internal-nat-endpoints", f"component at {x!r} has wrong endpoints")
        for k in kk.arrows:
            if ll.mul(component(kk.t(k)), src.arr(k)) != ll.mul(dst.arr(k), component(kk.s(k))):
                raise StructureError("internal-nat-naturality", f"naturality fails at {k!r}")
        self._src = src
        self._dst = dst
        self._component = component

    @property
    def src(self):
        return self._src

    @property
    def dst(self):
        return self._dst

    @property
    def component(self):
        return self._component

    def at(self, x):
        return self._component(x)

    def __eq__(self, other):
        if not isinstance(other, SheafGroupoidNat):
            return NotImplemented
        return self._src == other._src and self._dst == other._dst and self._component == other._component

    def __hash__(self):
        return hash((self._src, self._dst, self._component))


def terminal_sheaf(h):
    """The base objects acting on themselves: the terminal equivariant sheaf."""
    space = h.obj_space
    action = {(g, x): h.t(g) for x in space.points for g in h.arrows_from(x)}
    return EquivariantSheaf(h, space, identity_map(space), action)


def unit_sheaf_groupoid(e):
    """The groupoid object with only unit arrows on a sheaf."""
    from .groupoid import unit_groupoid

    return SheafGroupoid(e.base, unit_groupoid(e.total), e, e)


def terminal_sheaf_groupoid(h):
    return unit_sheaf_groupoid(terminal_sheaf(h))


def pair_sheaf_groupoid(e):
    """The fiberwise pair groupoid of a sheaf, with the diagonal action."""
    diagram = fibered_product(e.moment, e.moment)
    arr = diagram.space
    obj = e.total
    s = CMap(arr, obj, {p: diagram.pr2(p) for p in arr.points})
    t = CMap(arr, obj, {p: diagram.pr1(p) for p in arr.points})
    unit = CMap(obj, arr, {x: pair_id(x, x) for x in obj.points})
    inv = CMap(arr, arr, {p: pair_id(diagram.pr2(p), diagram.pr1(p)) for p in arr.points})
    compose = {}
    for a in arr.points:
        for b in arr.points:
            if s(a) == t(b):
                compose[(a, b)] = pair_id(t(a), s(b))
    groupoid = FinGroupoid(obj, arr, s, t, unit, inv, compose)
    mu1 = CMap(arr, e.base.obj_space, {p: e.moment(diagram.pr1(p)) for p in arr.points})
    action1 = {}
    for p in arr.points:
        x, y = diagram.pr1(p), diagram.pr2(p)
        for g in e.base.arrows_from(mu1(p)):
            action1[(g, p)] = pair_id(e.act(g, x), e.act(g, y))
    arr_sheaf = EquivariantSheaf(e.base, arr, mu1, action1)
    return SheafGroupoid(e.base, groupoid, e, arr_sheaf)


def constant_group_object(h, group):
    """The group object with one copy of the base objects per group element."""
    obj_sheaf = terminal_sheaf(h)
    obj = h.obj_space
    pts = [pair_id(gamma, x) for gamma in group.elements for x in obj.points]
    pairs = [(pair_id(gamma, p), pair_id(gamma, q)) for gamma in group.elements for p, q in obj.pairs()]
    arr = FinSpace(pts, pairs)
    decode = {pair_id(gamma, x): (gamma, x) for gamma in group.elements for x in obj.points}
    proj = CMap(arr, obj, {a: decode[a][1] for a in arr.points})
    unit = CMap(obj, arr, {x: pair_id(group.unit, x) for x in obj.points})
    inv = CMap(arr, arr, {a: pair_id(group.inv(decode[a][0]), decode[a][1]) for a in arr.points})
    compose = {}
    for a in arr.points:
        ga, xa = decode[a]
        for b in arr.points:
            gb, xb = decode[b]
            if xa == xb:
                compose[(a, b)] = pair_id(group.mul(ga, gb), xa)
    groupoid = FinGroupoid(obj, arr, proj, proj, unit, inv, compose)
    action1 = {}
    for a in arr.points:
        gamma, x = decode[a]
        for g in h.arrows_from(x):
            action1[(g, a)] = pair_id(gamma, h.t(g))
    arr_sheaf = EquivariantSheaf(h, arr, proj, action1)
    return SheafGroupoid(h, groupoid, obj_sheaf, arr_sheaf)


def _open_carrier(h, u):
    if isinstance(u, OpenSet):
        if u.space != h.obj_space:
            raise StructureError("open-subset", "open set lives in a different space")
        return u
    return OpenSet(h.obj_space, u)


def representable_sheaf(h, u):
    """The source fiber over an open set, acted on by composition."""
    u = _open_carrier(h, u)
    carrier = {a for a in h.arrows if h.s(a) in u}
    total = h.arr_space.subspace(carrier)
    moment = CMap(total, h.obj_space, {a: h.t(a) for a in carrier})
    action = {}
    for a in carrier:
        for g in h.arrows_from(h.t(a)):
            action[(g, a)] = h.mul(g, a)
    return EquivariantSheaf(h, total, moment, action)


class SiteArrow:
    """A section of the source map over an open set, targeting another open."""

    __slots__ = ("_groupoid", "_src", "_dst", "_section")

    def __init__(self, groupoid, src, dst, section):
        src = _open_carrier(groupoid, src)
        dst = _open_carrier(groupoid, dst)
        if not isinstance(section, CMap):
            section = CMap(src.as_space(), groupoid.arr_space, section)
        if section.dom != src.as_space() or section.cod != groupoid.arr_space:
            raise StructureError("site-section", "section must map the source open into the arrows")
        for x in src.points:
            if groupoid.s(section(x)) != x:
                raise StructureError("site-section", f"not a section of the source map at {x!r}")
            if groupoid.t(section(x)) not in dst:
                raise StructureError("site-target", f"section leaves the target open at {x!r}")
        self._groupoid = groupoid
        self._src = src
        self._dst = dst
        self._section = section

    @property
    def groupoid(self):
        return self._groupoid

    @property
    def src(self):
        return self._src

    @property
    def dst(self):
        return self._dst

    @property
    def section(self):
        return self._section

    def __call__(self, x):
        return self._section(x)

    def target_map(self):
        """The continuous map of opens carried by the section."""
        return CMap(self._src.as_space(), self._dst.as_space(), {x: self._groupoid.t(self._section(x)) for x in self._src.points})

    def then(self, other):
        """Composition; acting arrows multiply along the transported point."""
        assert other.groupoid is self._groupoid or other.groupoid == self._groupoid
        if not self._dst <= other.src:
            raise StructureError("site-composition", "arrows are not composable")
        h = self._groupoid
        graph = {x: h.mul(other(h.t(self._section(x))), self._section(x)) for x in self._src.points}
        return SiteArrow(h, self._src, other.dst, graph)

    def is_identity_like(self):
        return self._src == self._dst and all(self._section(x) == self._groupoid.one(x) for x in self._src.points)

    def __eq__(self, other):
        if not isinstance(other, SiteArrow):
            return NotImplemented
        return (self._groupoid == other._groupoid and self._src == other._src
                and self._dst == other._dst and self._section == other._section)

    def __hash__(self):
        return hash((self._src.carrier, self._dst.carrier, tuple(sorted(self._section.graph.items()))))

    def __repr__(self):
        return f"SiteArrow({sorted(self._src.carrier)} -> {sorted(self._dst.carrier)})"


def site_identity(h, u):
    u = _open_carrier(h, u)
    return SiteArrow(h, u, u, {x: h.one(x) for x in u.points})


def site_hom(h, u, v):
    """All site arrows from one open to another, in a deterministic order."""
    u = _open_carrier(h, u)
    v = _open_carrier(h, v)
    points = sorted(u.points)
    candidates = {x: sorted(a for a in h.arrows_from(x) if h.t(a) in v) for x in points}
    space = u.as_space()
    out = []

    def extend(i, chosen):
        if i == len(points):
            out.append(SiteArrow(h, u, v, dict(chosen)))
            return
        x = points[i]
        for a in candidates[x]:
            ok = True
            for y, b in chosen.items():
                if space.le(x, y) and not h.arr_space.le(a, b):
                    ok = False
                    break
                if space.le(y, x) and not h.arr_space.le(b, a):
                    ok = False
                    break
            if ok:
                chosen[x] = a
                extend(i + 1, chosen)
                del chosen[x]

    extend(0, {})
    out.sort(key=lambda sig: tuple(sig.section.graph[x] for x in points))
    return out


def representable_map(sigma):
    """The sheaf map between source fibers induced by a site arrow."""
    h = sigma.groupoid
    dom = representable_sheaf(h, sigma.src)
    cod = representable_sheaf(h, sigma.dst)
    graph = {a: h.mul(a, h.inv(sigma(h.s(a)))) for a in dom.total.points}
    return EquivariantMap(dom, cod, graph)


def site_arrow_from_map(h, u, v, f):
    """Recover the site arrow from a sheaf map between source fibers."""
    u = _open_carrier(h, u)
    graph = {x: h.inv(f(h.one(x))) for x in u.points}
    return SiteArrow(h, u, v, graph)


_EQ_MAPS_CACHE = {}


def equivariant_maps(dom, cod):
    """All maps of action spaces, enumerated orbitwise and memoized."""
    key = (dom.canonical_key(), cod.canonical_key())
    hit = _EQ_MAPS_CACHE.get(key)
    if hit is not None:
        return list(hit)
    h = dom.base
    reps = dom.orbit_reps()
    candidates = {}
    for r in reps:
        stab = dom.stabilizer_arrows(r)
        fiber = [e for e in cod.total.points if cod.moment(e) == dom.moment(r)]
        candidates[r] = [e for e in fiber if all(cod.act(g, e) == e for g in stab)]
    out = []

    def build(i, values):
        if i == len(reps):
            graph = {}
            for r, e in values.items():
                graph[r] = e
                for g in h.arrows_from(dom.moment(r)):
                    graph[dom.act(g, r)] = cod.act(g, e)
            try:
                out.append(EquivariantMap(dom, cod, graph))
            except StructureError:
                pass
            return
        r = reps[i]
        for e in candidates[r]:
            values[r] = e
            build(i + 1, values)
            del values[r]

    build(0, {})
    out.sort(key=lambda f: tuple(sorted(f.f.graph.items())))
    _EQ_MAPS_CACHE[key] = tuple(out)
    return list(out)


@dataclass(frozen=True)
class PulledBackSheaf:
    """An inverse image sheaf with its two projections."""

    sheaf: EquivariantSheaf
    pr_base: CMap
    pr_total: CMap


def pullback_sheaf(phi, e):
    """Inverse image of a sheaf along a groupoid homomorphism."""
    if e.base != phi.cod:
        raise StructureError("pullback-base", "sheaf does not live over the codomain of the homomorphism")
    g = phi.dom
    diagram = fibered_product(phi.f0, e.moment)
    total = diagram.space
    moment = diagram.pr1
    action = {}
    for p in total.points:
        x, v = diagram.pr1(p), diagram.pr2(p)
        for a in g.arrows_from(x):
            action[(a, p)] = pair_id(g.t(a), e.act(phi.f1(a), v))
    sheaf = EquivariantSheaf(g, total, moment, action)
    return PulledBackSheaf(sheaf, diagram.pr1, diagram.pr2)


def pullback_sheaf_groupoid(phi, k):
    """Inverse image of a groupoid object, componentwise."""
    obj = pullback_sheaf(phi, k.obj_sheaf)
    arr = pullback_sheaf(phi, k.arr_sheaf)
    g = phi.dom
    kk = k.groupoid
    s = CMap(arr.sheaf.total, obj.sheaf.total, {p: pair_id(arr.pr_base(p), kk.s(arr.pr_total(p))) for p in arr.sheaf.total.points})
    t = CMap(arr.sheaf.total, obj.sheaf.total, {p: pair_id(arr.pr_base(p), kk.t(arr.pr_total(p))) for p in arr.sheaf.total.points})
    unit = CMap(obj.sheaf.total, arr.sheaf.total, {p: pair_id(obj.pr_base(p), kk.one(obj.pr_total(p))) for p in obj.sheaf.total.points})
    inv = CMap(arr.sheaf.total, arr.sheaf.total, {p: pair_id(arr.pr_base(p), kk.inv(arr.pr_total(p))) for p in arr.sheaf.total.points})
    compose = {}
    for a in arr.sheaf.total.points:
        for b in arr.sheaf.total.points:
            if arr.pr_base(a) == arr.pr_base(b) and kk.s(arr.pr_total(a)) == kk.t(arr.pr_total(b)):
                compose[(a, b)] = pair_id(arr.pr_base(a), kk.mul(arr.pr_total(a), arr.pr_total(b)))
    groupoid = FinGroupoid(obj.sheaf.total, arr.sheaf.total, s, t, unit, inv, compose)
    return SheafGroupoid(g, groupoid, obj.sheaf, arr.sheaf)


def hom_point_id(f):
    """A stable point id for a sheaf map, from its graph."""
    inner = ";".join(f"{k}>{v}" for k, v in sorted(f.f.graph.items()))
    return f"[map|{inner}]"


def _hom_space(maps):
    """Hom-sets ordered pointwise; the exponential order on sheaf maps."""
    ids = {hom_point_id(f): f for f in maps}
    pairs = []
    names = sorted(ids)
    for a in names:
        fa = ids[a]
        for b in names:
            fb = ids[b]
            if all(fa.cod.total.le(fa(p), fb(p)) for p in fa.dom.total.points):
                pairs.append((a, b))
    return FinSpace(names, pairs), ids


@dataclass(frozen=True)
class SectionsGroupoid:
    """Sections of a groupoid object over an open set, as a plain groupoid."""

    groupoid: FinGroupoid
    objects: dict
    arrows: dict


def sections_groupoid(k, u):
    """The groupoid of maps from the source fiber over an open set."""
    m = representable_sheaf(k.base, u)
    objs = equivariant_maps(m, k.obj_sheaf)
    arrs = equivariant_maps(m, k.arr_sheaf)
    obj_space, obj_by_id = _hom_space(objs)
    arr_space, arr_by_id = _hom_space(arrs)
    kk = k.groupoid
    s_map = {a: hom_point_id(arr_by_id[a].then(k.source_map())) for a in arr_space.points}
    t_map = {a: hom_point_id(arr_by_id[a].then(k.target_map())) for a in arr_space.points}
    unit = {x: hom_point_id(obj_by_id[x].then(k.unit_map())) for x in obj_space.points}
    inv = {a: hom_point_id(arr_by_id[a].then(k.inverse_map())) for a in arr_space.points}
    compose = {}
    for a in arr_space.points:
        for b in arr_space.points:
            if s_map[a] == t_map[b]:
                fa, fb = arr_by_id[a], arr_by_id[b]
                graph = {p: kk.mul(fa(p), fb(p)) for p in m.total.points}
                compose[(a, b)] = hom_point_id(EquivariantMap(m, k.arr_sheaf, graph))
    groupoid = FinGroupoid(
        obj_space, arr_space,
        CMap(arr_space, obj_space, s_map), CMap(arr_space, obj_space, t_map),
        CMap(obj_space, arr_space, unit), CMap(arr_space, arr_space, inv), compose)
    return SectionsGroupoid(groupoid, obj_by_id, arr_by_id)


def stalk(k, point):
    """Sections over the minimal open of a point; the stalk groupoid."""
    if point not in k.base.obj_space:
        raise StructureError("stalk-point", f"unknown base point {point!r}")
    return sections_groupoid(k, k.base.obj_space.down_set(point))


def is_group_like(g):
    """Nonempty and connected: equivalent to a one-object groupoid."""
    if is_connected_nonempty(g):
        return Decision(True, certificate={"isotropy": g.isotropy_group(min(g.objects))})
    return Decision(False, "groupoid is empty or has more than one component")
