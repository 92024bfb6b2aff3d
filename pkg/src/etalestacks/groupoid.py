"""Groupoids internal to finite spaces.

A FinGroupoid is an object space, an arrow space, and five continuous
structure maps satisfying the groupoid axioms pointwise.  The module also
provides homomorphisms, natural transformations, equivalence packages,
Cech groupoids, the Morita-equivalence decision procedure, weak pullbacks
in the triple model, and brute-force hom/2-cell enumeration for small
instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .fintop import (
    CMap,
    Decision,
    FinSpace,
    Pullback,
    StructureError,
    fibered_product,
    identity_map,
    is_etale,
    pair_id,
    tuple_id,
)
from .groups import FiniteGroup


class FinGroupoid:
    """An internal groupoid in finite spaces."""

    __slots__ = ("_obj", "_arr", "_s", "_t", "_unit", "_inv", "_mul",
                 "_by_source", "_by_target", "_hash", "_key")

    def __init__(self, obj, arr, s, t, unit, inv, compose):
        if s.dom != arr or s.cod != obj:
            raise StructureError("source-map", "s must be a map from the arrow space to the object space")
        if t.dom != arr or t.cod != obj:
            raise StructureError("target-map", "t must be a map from the arrow space to the object space")
        if unit.dom != obj or unit.cod != arr:
            raise StructureError("unit-map", "unit must be a map from the object space to the arrow space")
        if inv.dom != arr or inv.cod != arr:
            raise StructureError("inverse-map", "inv must be a map from the arrow space to itself")
        mul = {}
        for k, v in dict(compose).items():
            g, h = k
            mul[(g, h)] = v
        by_source = {x: [] for x in obj.points}
        by_target = {x: [] for x in obj.points}
        for g in arr.points:
            by_source[s(g)].append(g)
            by_target[t(g)].append(g)
        for g in arr.points:
            for h in by_target[s(g)]:
                if (g, h) not in mul:
                    raise StructureError("composition-total", f"no composite for composable pair ({g!r},{h!r})")
        for (g, h), v in mul.items():
            if g not in arr or h not in arr:
                raise StructureError("composition-domain", f"pair ({g!r},{h!r}) mentions an unknown arrow")
            if s(g) != t(h):
                raise StructureError("composition-domain", f"pair ({g!r},{h!r}) is not composable: s({g!r}) != t({h!r})")
            if v not in arr:
                raise StructureError("composition-domain", f"composite {v!r} of ({g!r},{h!r}) is not an arrow")
            if s(v) != s(h):
                raise StructureError("source-of-composite", f"s({g!r}.{h!r}) = {s(v)!r} but s({h!r}) = {s(h)!r}")
            if t(v) != t(g):
                raise StructureError("target-of-composite", f"t({g!r}.{h!r}) = {t(v)!r} but t({g!r}) = {t(g)!r}")
        for x in obj.points:
            u = unit(x)
            if s(u) != x or t(u) != x:
                raise StructureError("unit-endpoints", f"unit arrow of {x!r} has endpoints ({s(u)!r},{t(u)!r})")
        for g in arr.points:
            if mul[(unit(t(g)), g)] != g:
                raise StructureError("left-unit", f"1.{g!r} != {g!r}")
            if mul[(g, unit(s(g)))] != g:
                raise StructureError("right-unit", f"{g!r}.1 != {g!r}")
        for g in arr.points:
            gi = inv(g)
            if s(gi) != t(g) or t(gi) != s(g):
                raise StructureError("inverse-endpoints", f"inv({g!r}) has endpoints ({s(gi)!r},{t(gi)!r})")
            if mul[(gi, g)] != unit(s(g)):
                raise StructureError("inverse-law", f"inv({g!r}).{g!r} != unit")
            if mul[(g, gi)] != unit(t(g)):
                raise StructureError("inverse-law", f"{g!r}.inv({g!r}) != unit")
        for (g, h) in list(mul):
            gh = mul[(g, h)]
            for k in by_target[s(h)]:
                if mul[(mul[(g, h)], k)] != mul[(g, mul[(h, k)])]:
                    raise StructureError("associativity", f"({g!r}.{h!r}).{k!r} != {g!r}.({h!r}.{k!r})")
        # continuity of composition on the composable-pair space
        comp = fibered_product(s, t)
        m_graph = {p: mul[(comp.pr1(p), comp.pr2(p))] for p in comp.space.points}
        try:
            CMap(comp.space, arr, m_graph)
        except StructureError as err:
            raise StructureError("composition-continuous", err.detail) from None
        self._obj = obj
        self._arr = arr
        self._s = s
        self._t = t
        self._unit = unit
        self._inv = inv
        self._mul = mul
        self._by_source = {x: tuple(v) for x, v in by_source.items()}
        self._by_target = {x: tuple(v) for x, v in by_target.items()}
        key = (obj, arr, tuple(sorted(s.graph.items())), tuple(sorted(t.graph.items())),
               tuple(sorted(unit.graph.items())), tuple(sorted(inv.graph.items())),
               tuple(sorted(mul.items())))
        self._key = key
        self._hash = hash(key)

    @property
    def obj_space(self):
        return self._obj

    @property
    def arr_space(self):
        return self._arr

    @property
    def objects(self):
        return self._obj.points

    @property
    def arrows(self):
        return self._arr.points

    @property
    def source_map(self):
        return self._s

    @property
    def target_map(self):
        return self._t

    @property
    def unit_map(self):
        return self._unit

    @property
    def inverse_map(self):
        return self._inv

    def s(self, g):
        return self._s(g)

    def t(self, g):
        return self._t(g)

    def one(self, x):
        return self._unit(x)

    def inv(self, g):
        return self._inv(g)

    def mul(self, g, h):
        """Composite g.h, defined when s(g) = t(h) (h first, then g)."""
        try:
            return self._mul[(g, h)]
        except KeyError:
            raise StructureError("composition-domain", f"({g!r},{h!r}) is not a composable pair") from None

    def composites(self):
        return dict(self._mul)

    def arrows_from(self, x):
        return self._by_source[x]

    def arrows_to(self, x):
        return self._by_target[x]

    def arrows_between(self, x, y):
        return tuple(g for g in self._by_source[x] if self._t(g) == y)

    def isotropy(self, x):
        return self.arrows_between(x, x)

    def isotropy_group(self, x):
        els = self.isotropy(x)
        mul = {(a, b): self._mul[(a, b)] for a in els for b in els}
        return FiniteGroup(els, mul)

    def composable_space(self):
        return fibered_product(self._s, self._t)

    def composition_map(self):
        comp = self.composable_space()
        return comp, CMap(comp.space, self._arr, {p: self._mul[(comp.pr1(p), comp.pr2(p))] for p in comp.space.points})

    def canonical_key(self):
        return self._key

    def __eq__(self, other):
        if not isinstance(other, FinGroupoid):
            return NotImplemented
        if self is other:
            return True
        return self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FinGroupoid({len(self.objects)} objects, {len(self.arrows)} arrows)"


def unit_groupoid(space):
    """The groupoid with only identity arrows; arrow space = object space."""
    ident = identity_map(space)
    return FinGroupoid(space, space, ident, ident, ident, ident, {(p, p): p for p in space.points})


def pair_groupoid(space):
    """Exactly one arrow between any two points; etale only for discrete spaces."""
    pts = [pair_id(x, y) for x in space.points for y in space.points]
    pairs = [(pair_id(x, y), pair_id(u, v)) for x in space.points for y in space.points
             for u in space.points for v in space.points if space.le(x, u) and space.le(y, v)]
    arr = FinSpace(pts, pairs)
    back = {pair_id(x, y): (x, y) for x in space.points for y in space.points}
    s = CMap(arr, space, {p: back[p][0] for p in pts})
    t = CMap(arr, space, {p: back[p][1] for p in pts})
    unit = CMap(space, arr, {x: pair_id(x, x) for x in space.points})
    inv = CMap(arr, arr, {p: pair_id(back[p][1], back[p][0]) for p in pts})
    compose = {}
    for g in pts:
        for h in pts:
            if back[g][0] == back[h][1]:
                compose[(g, h)] = pair_id(back[h][0], back[g][1])
    return FinGroupoid(space, arr, s, t, unit, inv, compose)


def one_object_groupoid(group, object_name="*"):
    """A finite group as a groupoid with a single object and discrete arrows."""
    obj = FinSpace([object_name])
    arr = FinSpace(group.elements)
    s = CMap(arr, obj, {g: object_name for g in group.elements})
    unit = CMap(obj, arr, {object_name: group.unit})
    inv = CMap(arr, arr, {g: group.inv(g) for g in group.elements})
    compose = {(a, b): group.mul(a, b) for a in group.elements for b in group.elements}
    return FinGroupoid(obj, arr, s, s, unit, inv, compose)


def translation_groupoid(group, space, action):
    """Action groupoid of a finite group acting on a space by homeomorphisms.

    ``action`` maps (group element, point) to a point; each element must act
    as an order-automorphism and the action laws must hold.  Arrows are pairs
    (g, x) from x to g.x, topologized with the discrete order in g.  The
    source map is then etale by construction.
    """
    act = dict(action)
    for g in group.elements:
        for x in space.points:
            if act.get((g, x)) not in space:
                raise StructureError("action-total", f"no value for ({g!r},{x!r})")
        for x in space.points:
            for y in space.points:
                if space.le(x, y) != space.le(act[(g, x)], act[(g, y)]):
                    raise StructureError("action-homeomorphism", f"{g!r} does not preserve order at ({x!r},{y!r})")
    for x in space.points:
        if act[(group.unit, x)] != x:
            raise StructureError("action-unit", f"unit moves {x!r}")
        for g in group.elements:
            for h in group.elements:
                if act[(g, act[(h, x)])] != act[(group.mul(g, h), x)]:
                    raise StructureError("action-associative", f"({g!r}{h!r}).{x!r} != {g!r}.({h!r}.{x!r})")
    pts = [pair_id(g, x) for g in group.elements for x in space.points]
    back = {pair_id(g, x): (g, x) for g in group.elements for x in space.points}
    pairs = [(pair_id(g, x), pair_id(g, y)) for g in group.elements
             for x in space.points for y in space.points if space.le(x, y)]
    arr = FinSpace(pts, pairs)
    s = CMap(arr, space, {p: back[p][1] for p in pts})
    t = CMap(arr, space, {p: act[back[p]] for p in pts})
    unit = CMap(space, arr, {x: pair_id(group.unit, x) for x in space.points})
    inv = CMap(arr, arr, {p: pair_id(group.inv(back[p][0]), act[back[p]]) for p in pts})
    compose = {}
    for p in pts:
        g2, x2 = back[p]
        for q in pts:
            g1, x1 = back[q]
            if x2 == act[(g1, x1)]:
                compose[(p, q)] = pair_id(group.mul(g2, g1), x1)
    return FinGroupoid(space, arr, s, t, unit, inv, compose)


class GroupoidHom:
    """A continuous functor between internal groupoids."""

    __slots__ = ("_dom", "_cod", "_f0", "_f1", "_hash")

    def __init__(self, dom, cod, f0, f1):
        if not isinstance(f0, CMap):
            f0 = CMap(dom.obj_space, cod.obj_space, f0)
        if not isinstance(f1, CMap):
            f1 = CMap(dom.arr_space, cod.arr_space, f1)
        if f0.dom != dom.obj_space or f0.cod != cod.obj_space:
            raise StructureError("hom-objects", "object component has the wrong spaces")
        if f1.dom != dom.arr_space or f1.cod != cod.arr_space:
            raise StructureError("hom-arrows", "arrow component has the wrong spaces")
        for g in dom.arrows:
            if cod.s(f1(g)) != f0(dom.s(g)):
                raise StructureError("hom-source", f"s(f({g!r})) != f(s({g!r}))")
            if cod.t(f1(g)) != f0(dom.t(g)):
                raise StructureError("hom-target", f"t(f({g!r})) != f(t({g!r}))")
        for x in dom.objects:
            if f1(dom.one(x)) != cod.one(f0(x)):
                raise StructureError("hom-unit", f"f(1_{x!r}) != 1_f({x!r})")
        for (g, h), v in dom.composites().items():
            if f1(v) != cod.mul(f1(g), f1(h)):
                raise StructureError("hom-composition", f"f({g!r}.{h!r}) != f({g!r}).f({h!r})")
        self._dom = dom
        self._cod = cod
        self._f0 = f0
        self._f1 = f1
        self._hash = hash((dom, cod, f0, f1))

    @property
    def dom(self):
        return self._dom

    @property
    def cod(self):
        return self._cod

    @property
    def f0(self):
        return self._f0

    @property
    def f1(self):
        return self._f1

    def obj(self, x):
        return self._f0(x)

    def arr(self, g):
        return self._f1(g)

    def then(self, other):
        """Composite "first self, then other"."""
        if other._dom != self._cod:
            raise StructureError("hom-compose", "codomain/domain mismatch")
        return GroupoidHom(self._dom, other._cod, self._f0.then(other._f0), self._f1.then(other._f1))

    def is_identity(self):
        return self._dom == self._cod and all(self._f0(x) == x for x in self._dom.objects) and all(self._f1(g) == g for g in self._dom.arrows)

    def __eq__(self, other):
        if not isinstance(other, GroupoidHom):
            return NotImplemented
        return self._dom == other._dom and self._cod == other._cod and self._f0 == other._f0 and self._f1 == other._f1

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"GroupoidHom({self._dom!r} -> {self._cod!r})"


def identity_hom(g):
    return GroupoidHom(g, g, identity_map(g.obj_space), identity_map(g.arr_space))


class NatTrans:
    """A continuous natural transformation between parallel functors."""

    __slots__ = ("_src", "_dst", "_component", "_hash")

    def __init__(self, src, dst, component):
        if src.dom != dst.dom or src.cod != dst.cod:
            raise StructureError("nat-parallel", "source and destination functors are not parallel")
        if not isinstance(component, CMap):
            component = CMap(src.dom.obj_space, src.cod.arr_space, component)
        if component.dom != src.dom.obj_space or component.cod != src.cod.arr_space:
            raise StructureError("nat-component", "component has the wrong spaces")
        cod = src.cod
        for x in src.dom.objects:
            c = component(x)
            if cod.s(c) != src.obj(x):
                raise StructureError("nat-source", f"component at {x!r} starts at {cod.s(c)!r}, expected {src.obj(x)!r}")
            if cod.t(c) != dst.obj(x):
                raise StructureError("nat-target", f"component at {x!r} ends at {cod.t(c)!r}, expected {dst.obj(x)!r}")
        for g in src.dom.arrows:
            x, y = src.dom.s(g), src.dom.t(g)
            if cod.mul(component(y), src.arr(g)) != cod.mul(dst.arr(g), component(x)):
                raise StructureError("nat-naturality", f"naturality square fails at arrow {g!r}")
        self._src = src
        self._dst = dst
        self._component = component
        self._hash = hash((src, dst, component))

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

    def then(self, other):
        """Vertical composite: first self, then other."""
        if other._src != self._dst:
            raise StructureError("nat-compose", "2-cells not vertically composable")
        cod = self._src.cod
        comp = {x: cod.mul(other.at(x), self.at(x)) for x in self._src.dom.objects}
        return NatTrans(self._src, other._dst, comp)

    def inverse(self):
        cod = self._src.cod
        comp = {x: cod.inv(self.at(x)) for x in self._src.dom.objects}
        return NatTrans(self._dst, self._src, comp)

    def precompose(self, k):
        """Whisker with k into the domain: a 2-cell src.k => dst.k."""
        comp = {x: self.at(k.obj(x)) for x in k.dom.objects}
        return NatTrans(k.then(self._src), k.then(self._dst), comp)

    def postcompose(self, h):
        """Whisker with h out of the codomain: a 2-cell h.src => h.dst."""
        comp = {x: h.arr(self.at(x)) for x in self._src.dom.objects}
        return NatTrans(self._src.then(h), self._dst.then(h), comp)

    def __eq__(self, other):
        if not isinstance(other, NatTrans):
            return NotImplemented
        return self._src == other._src and self._dst == other._dst and self._component == other._component

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"NatTrans({dict(sorted(self._component.graph.items()))})"


def identity_nat(f):
    return NatTrans(f, f, {x: f.cod.one(f.obj(x)) for x in f.dom.objects})


def is_identity_nat(alpha):
    cod = alpha.src.cod
    return all(alpha.at(x) == cod.one(alpha.src.obj(x)) for x in alpha.src.dom.objects)


@dataclass(frozen=True)
class EquivalencePackage:
    """An equivalence of groupoids with all witnesses recorded.

    ``eta`` relates the identity of forward.dom with backward.forward and
    ``eps`` relates forward.backward with the identity of forward.cod, in
    either orientation; ``None`` records that the composite is strictly the
    identity functor.  ``extras`` holds additional validated cells, e.g.
    over-base 2-cells when both sides live over a common base.
    """

    forward: GroupoidHom
    backward: GroupoidHom
    eta: NatTrans | None = None
    eps: NatTrans | None = None
    extras: dict = field(default_factory=dict)

    def validate(self):
        if self.backward.dom != self.forward.cod or self.backward.cod != self.forward.dom:
            raise StructureError("equivalence-endpoints", "backward functor does not reverse forward")
        round_dom = self.forward.then(self.backward)
        round_cod = self.backward.then(self.forward)
        ident_dom = identity_hom(self.forward.dom)
        ident_cod = identity_hom(self.forward.cod)
        if self.eta is None:
            if round_dom != ident_dom:
                raise StructureError("equivalence-eta", "backward.forward is not strictly the identity and no eta is recorded")
        else:
            if {self.eta.src, self.eta.dst} != {round_dom, ident_dom}:
                raise StructureError("equivalence-eta", "eta does not relate backward.forward with the identity")
        if self.eps is None:
            if round_cod != ident_cod:
                raise StructureError("equivalence-eps", "forward.backward is not strictly the identity and no eps is recorded")
        else:
            if {self.eps.src, self.eps.dst} != {round_cod, ident_cod}:
                raise StructureError("equivalence-eps", "eps does not relate forward.backward with the identity")
        return self

    def check(self):
        try:
            self.validate()
        except StructureError as err:
            return Decision(False, str(err))
        return Decision(True)


def is_etale_groupoid(h):
    """Etale means the source map is a local homeomorphism."""
    d = is_etale(h.source_map)
    if d.ok:
        # t = s.inv is then etale as well; assert the consistency
        dt = is_etale(h.target_map)
        if not dt.ok:
            raise StructureError("etale-consistency", f"source map etale but target map is not: {dt.reason}")
    return d


def cech_groupoid(h, cover):
    """Refinement of a groupoid along an etale cover of its object space.

    Arrows are triples (arrow, p, q) with the arrow running from cover(p) to
    cover(q); returns the groupoid together with the canonical projection,
    which is always a Morita equivalence.
    """
    if cover.cod != h.obj_space:
        raise StructureError("cech-cover", "cover must land in the object space")
    if not cover.is_surjective():
        raise StructureError("cech-cover", "cover is not surjective")
    if not is_etale(cover).ok:
        raise StructureError("cech-cover", "cover is not etale")
    u = cover.dom
    pts = []
    back = {}
    for p in u.points:
        for q in u.points:
            for g in h.arrows_between(cover(p), cover(q)):
                pid = tuple_id(g, p, q)
                pts.append(pid)
                back[pid] = (g, p, q)
    pairs = []
    for a in pts:
        g1, p1, q1 = back[a]
        for b in pts:
            g2, p2, q2 = back[b]
            if h.arr_space.le(g1, g2) and u.le(p1, p2) and u.le(q1, q2):
                pairs.append((a, b))
    arr = FinSpace(pts, pairs)
    s = CMap(arr, u, {a: back[a][1] for a in pts})
    t = CMap(arr, u, {a: back[a][2] for a in pts})
    unit = CMap(u, arr, {p: tuple_id(h.one(cover(p)), p, p) for p in u.points})
    inv = CMap(arr, arr, {a: tuple_id(h.inv(back[a][0]), back[a][2], back[a][1]) for a in pts})
    compose = {}
    for a in pts:
        g2, p2, q2 = back[a]
        for b in pts:
            g1, p1, q1 = back[b]
            if p2 == q1:
                compose[(a, b)] = tuple_id(h.mul(g2, g1), p1, q2)
    refined = FinGroupoid(u, arr, s, t, unit, inv, compose)
    projection = GroupoidHom(refined, h, cover, CMap(arr, h.arr_space, {a: back[a][0] for a in pts}))
    return refined, projection


def find_section_over(q, down_points, base_space):
    """A monotone section of q over the given down-set, or None.

    Backtracking over the points in an order compatible with the preorder,
    pruning as soon as monotonicity fails.
    """
    pts = sorted(down_points, key=lambda p: (len(base_space.down_set(p)), p))
    fibers = {y: [a for a in q.dom.points if q(a) == y] for y in pts}
    assign = {}

    def extend(idx):
        if idx == len(pts):
            return True
        y = pts[idx]
        for a in fibers[y]:
            ok = True
            for w, b in assign.items():
                if base_space.le(y, w) and not q.dom.le(a, b):
                    ok = False
                    break
                if base_space.le(w, y) and not q.dom.le(b, a):
                    ok = False
                    break
            if ok:
                assign[y] = a
                if extend(idx + 1):
                    return True
                del assign[y]
        return False

    if extend(0):
        return dict(assign)
    return None


def admits_local_sections(q):
    """Sections over minimal opens of every point of the codomain."""
    cert = {}
    for y in q.cod.points:
        section = find_section_over(q, q.cod.down_set(y), q.cod)
        if section is None:
            return Decision(False, f"no continuous section over the minimal open of {y!r}", witness={"point": y})
        cert[y] = section
    return Decision(True, certificate=cert)


def is_morita_equivalence(phi):
    """Essential surjectivity with local sections + fully faithful square."""
    g, h = phi.dom, phi.cod
    if not is_etale_groupoid(g).ok or not is_etale_groupoid(h).ok:
        raise StructureError("morita-precondition", "both groupoids must be etale")
    # essential surjectivity: sections of t.pr1 on H1 x_{H0} G0 over minimal opens
    pb = fibered_product(h.source_map, phi.f0)
    t_pr1 = pb.pr1.then(h.target_map)
    es = admits_local_sections(t_pr1)
    if not es.ok:
        return Decision(False, "essential surjectivity fails: " + es.reason, witness={"condition": "essentially-surjective", **es.witness})
    # fully faithful: G1 is the fibered product of (s,t) against (phi0 x phi0)
    comparison = {}
    seen = {}
    for a in g.arrows:
        key = (phi.arr(a), g.s(a), g.t(a))
        if key in seen:
            return Decision(False, "fully faithful fails: comparison not injective", witness={"condition": "fully-faithful", "arrows": [seen[key], a]})
        seen[key] = a
        comparison[a] = key
    for k in h.arrows:
        for x in g.objects:
            if phi.obj(x) != h.s(k):
                continue
            for y in g.objects:
                if phi.obj(y) != h.t(k):
                    continue
                if (k, x, y) not in seen:
                    return Decision(False, "fully faithful fails: comparison not surjective", witness={"condition": "fully-faithful", "missing": [k, x, y]})
    # comparison must also be a homeomorphism onto the pullback
    for a in g.arrows:
        for b in g.arrows:
            ka, kb = comparison[a], comparison[b]
            le_pullback = (h.arr_space.le(ka[0], kb[0]) and g.obj_space.le(ka[1], kb[1]) and g.obj_space.le(ka[2], kb[2]))
            if le_pullback and not g.arr_space.le(a, b):
                return Decision(False, "fully faithful fails: comparison inverse not continuous", witness={"condition": "fully-faithful", "arrows": [a, b]})
    return Decision(True, certificate={"sections": es.certificate, "comparison": comparison})


@dataclass(frozen=True)
class WeakPullbackResult:
    groupoid: FinGroupoid
    pr1: GroupoidHom
    pr2: GroupoidHom
    fill: NatTrans
    object_parts: dict
    arrow_parts: dict

    def object_id(self, x, z, r):
        return tuple_id(x, z, r)

    def arrow_id(self, g, l, r):
        return tuple_id(g, l, r)


def weak_pullback(phi, psi):
    """The comparison square in the triple model.

    Objects are triples (x, z, r) with r an arrow phi(x) -> psi(z) in the
    common codomain; arrows are triples (g, l, r) recording their source
    object, with target filled in by conjugating r.
    """
    if phi.cod != psi.cod:
        raise StructureError("weak-pullback", "functors must share a codomain")
    g_, l_, k_ = phi.dom, psi.dom, phi.cod
    obj_pts, obj_back = [], {}
    for x in g_.objects:
        for z in l_.objects:
            for r in k_.arrows_between(phi.obj(x), psi.obj(z)):
                pid = tuple_id(x, z, r)
                obj_pts.append(pid)
                obj_back[pid] = (x, z, r)
    obj_pairs = []
    for a in obj_pts:
        xa, za, ra = obj_back[a]
        for b in obj_pts:
            xb, zb, rb = obj_back[b]
            if g_.obj_space.le(xa, xb) and l_.obj_space.le(za, zb) and k_.arr_space.le(ra, rb):
                obj_pairs.append((a, b))
    obj = FinSpace(obj_pts, obj_pairs)

    arr_pts, arr_back = [], {}
    for g in g_.arrows:
        for l in l_.arrows:
            for r in k_.arrows_between(phi.obj(g_.s(g)), psi.obj(l_.s(l))):
                pid = tuple_id(g, l, r)
                arr_pts.append(pid)
                arr_back[pid] = (g, l, r)
    arr_pairs = []
    for a in arr_pts:
        ga, la, ra = arr_back[a]
        for b in arr_pts:
            gb, lb, rb = arr_back[b]
            if g_.arr_space.le(ga, gb) and l_.arr_space.le(la, lb) and k_.arr_space.le(ra, rb):
                arr_pairs.append((a, b))
    arr = FinSpace(arr_pts, arr_pairs)

    def conj(g, l, r):
        return k_.mul(k_.mul(psi.arr(l), r), k_.inv(phi.arr(g)))

    s = CMap(arr, obj, {a: tuple_id(g_.s(arr_back[a][0]), l_.s(arr_back[a][1]), arr_back[a][2]) for a in arr_pts})
    t = CMap(arr, obj, {a: tuple_id(g_.t(arr_back[a][0]), l_.t(arr_back[a][1]), conj(*arr_back[a])) for a in arr_pts})
    unit = CMap(obj, arr, {o: tuple_id(g_.one(obj_back[o][0]), l_.one(obj_back[o][1]), obj_back[o][2]) for o in obj_pts})
    inv = CMap(arr, arr, {a: tuple_id(g_.inv(arr_back[a][0]), l_.inv(arr_back[a][1]), conj(*arr_back[a])) for a in arr_pts})
    compose = {}
    for a in arr_pts:
        g2, l2, r2 = arr_back[a]
        for b in arr_pts:
            g1, l1, r1 = arr_back[b]
            if r2 == conj(g1, l1, r1) and g_.s(g2) == g_.t(g1) and l_.s(l2) == l_.t(l1):
                compose[(a, b)] = tuple_id(g_.mul(g2, g1), l_.mul(l2, l1), r1)
    wp = FinGroupoid(obj, arr, s, t, unit, inv, compose)
    pr1 = GroupoidHom(wp, g_, {o: obj_back[o][0] for o in obj_pts}, {a: arr_back[a][0] for a in arr_pts})
    pr2 = GroupoidHom(wp, l_, {o: obj_back[o][1] for o in obj_pts}, {a: arr_back[a][1] for a in arr_pts})
    fill = NatTrans(pr1.then(phi), pr2.then(psi), {o: obj_back[o][2] for o in obj_pts})
    return WeakPullbackResult(wp, pr1, pr2, fill, obj_back, arr_back)


def induce_into_weak_pullback(wp, a, b, gamma):
    """Factor a cone through the weak pullback; commutation is strict."""
    u0 = {c: wp.object_id(a.obj(c), b.obj(c), gamma.at(c)) for c in a.dom.objects}
    u1 = {d: wp.arrow_id(a.arr(d), b.arr(d), gamma.at(a.dom.s(d))) for d in a.dom.arrows}
    u = GroupoidHom(a.dom, wp.groupoid, u0, u1)
    if u.then(wp.pr1) != a or u.then(wp.pr2) != b:
        raise StructureError("weak-pullback-factorization", "projections do not recover the cone legs")
    if wp.fill.precompose(u) != gamma:
        raise StructureError("weak-pullback-factorization", "structural 2-cell does not recover the cone 2-cell")
    return u


def is_equivalent_to_space(h):
    """A groupoid is a space exactly when (s,t) is injective on arrows.

    On success returns the quotient space with the image topology and the
    canonical hom to its unit groupoid.
    """
    if not is_etale_groupoid(h).ok:
        raise StructureError("space-precondition", "groupoid must be etale")
    seen = {}
    for g in h.arrows:
        key = (h.s(g), h.t(g))
        if key in seen:
            return Decision(False, "two distinct arrows share endpoints", witness={"arrows": [seen[key], g]})
        seen[key] = g
    # orbit classes, named by their least member
    parent = {x: x for x in h.objects}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in h.arrows:
        a, b = find(h.s(g)), find(h.t(g))
        if a != b:
            lo, hi = sorted((a, b))
            parent[hi] = lo
    rep = {x: find(x) for x in h.objects}
    classes = sorted(set(rep.values()))
    pairs = [(rep[p], rep[q]) for q in h.objects for p in h.obj_space.down_set(q)]
    quotient = FinSpace(classes, pairs)
    projection = CMap(h.obj_space, quotient, rep)
    target = unit_groupoid(quotient)
    hom = GroupoidHom(h, target, projection, CMap(h.arr_space, quotient, {g: rep[h.s(g)] for g in h.arrows}))
    return Decision(True, certificate={"quotient": quotient, "projection": projection, "hom": hom})


_HOM_CACHE = {}


def all_homs(g, h):
    """Every continuous functor g -> h, by pruned backtracking (memoized)."""
    key = (g.canonical_key(), h.canonical_key())
    if key in _HOM_CACHE:
        return _HOM_CACHE[key]
    out = []
    obj_maps = _all_cmaps(g.obj_space, h.obj_space)
    nonunit = [a for a in g.arrows if a not in {g.one(x) for x in g.objects}]
    for f0 in obj_maps:
        assign = {g.one(x): h.one(f0(x)) for x in g.objects}

        def consistent(a):
            fa = assign[a]
            # incremental closure under composition and inverses
            if assign.get(g.inv(a), h.inv(fa)) != h.inv(fa):
                return False
            for b, fb in list(assign.items()):
                if g.s(a) == g.t(b):
                    ab = g.mul(a, b)
                    if ab in assign and assign[ab] != h.mul(fa, fb):
                        return False
                if g.s(b) == g.t(a):
                    ba = g.mul(b, a)
                    if ba in assign and assign[ba] != h.mul(fb, fa):
                        return False
            return True

        def extend(idx):
            if idx == len(nonunit):
                graph = dict(assign)
                try:
                    f1 = CMap(g.arr_space, h.arr_space, graph)
                    out.append(GroupoidHom(g, h, f0, f1))
                except StructureError:
                    pass
                return
            a = nonunit[idx]
            if a in assign:
                extend(idx + 1)
                return
            for fa in h.arrows_between(f0(g.s(a)), f0(g.t(a))):
                assign[a] = fa
                ai = g.inv(a)
                had_inverse = ai in assign
                if not had_inverse:
                    assign[ai] = h.inv(fa)
                if consistent(a):
                    extend(idx + 1)
                del assign[a]
                if not had_inverse and ai in assign:
                    del assign[ai]

        extend(0)
    out = sorted(set(out), key=lambda f: (tuple(sorted(f.f0.graph.items())), tuple(sorted(f.f1.graph.items()))))
    _HOM_CACHE[key] = out
    return out


def _all_cmaps(dom, cod):
    pts = dom.points
    out = []
    for values in itertools.product(cod.points, repeat=len(pts)):
        graph = dict(zip(pts, values))
        if all(cod.le(graph[p], graph[q]) for q in pts for p in dom.down_set(q)):
            out.append(CMap(dom, cod, graph))
    return out


def all_nat_trans(f, g):
    """Every 2-cell f => g between parallel functors, by backtracking."""
    if f.dom != g.dom or f.cod != g.cod:
        raise StructureError("nat-parallel", "functors are not parallel")
    cod = f.cod
    objs = f.dom.objects
    candidates = {x: cod.arrows_between(f.obj(x), g.obj(x)) for x in objs}
    out = []
    assign = {}

    def extend(idx):
        if idx == len(objs):
            try:
                out.append(NatTrans(f, g, dict(assign)))
            except StructureError:
                pass
            return
        x = objs[idx]
        for c in candidates[x]:
            ok = True
            for w, d in assign.items():
                if f.dom.obj_space.le(x, w) and not cod.arr_space.le(c, d):
                    ok = False
                    break
                if f.dom.obj_space.le(w, x) and not cod.arr_space.le(d, c):
                    ok = False
                    break
            if ok:
                assign[x] = c
                extend(idx + 1)
                del assign[x]

    extend(0)
    return out


def connected_components(g):
    parent = {x: x for x in g.objects}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in g.arrows:
        p, q = find(g.s(a)), find(g.t(a))
        if p != q:
            lo, hi = sorted((p, q))
            parent[hi] = lo
    buckets = {}
    for x in g.objects:
        buckets.setdefault(find(x), set()).add(x)
    return [frozenset(v) for _, v in sorted(buckets.items())]


def is_connected_nonempty(g):
    return len(g.objects) > 0 and len(connected_components(g)) == 1


def categorically_equivalent(a, b):
    """Equivalence of the underlying groupoids, ignoring topology.

    Finite groupoids are equivalent exactly when their isomorphism classes of
    objects match up with isomorphic isotropy groups; that invariant is
    computed directly.
    """
    comps_a = connected_components(a)
    comps_b = connected_components(b)
    if len(comps_a) != len(comps_b):
        return Decision(False, f"{len(comps_a)} components vs {len(comps_b)}")
    groups_a = [a.isotropy_group(sorted(c)[0]) for c in comps_a]
    groups_b = [b.isotropy_group(sorted(c)[0]) for c in comps_b]
    used = set()
    matching = {}
    for i, ga in enumerate(groups_a):
        for j, gb in enumerate(groups_b):
            if j not in used and ga.is_isomorphic_to(gb):
                used.add(j)
                matching[i] = j
                break
        else:
            return Decision(False, "isotropy groups do not match across components", witness={"component": sorted(comps_a[i])})
    return Decision(True, certificate={"matching": matching})
