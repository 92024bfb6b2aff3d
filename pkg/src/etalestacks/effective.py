"""Effective parts of etale groupoids via germs of local bisections."""

from dataclasses import dataclass

from .fintop import (
    CMap,
    Decision,
    FinSpace,
    Germ,
    StructureError,
    all_germs,
    identity_germ,
    is_open_map,
    tuple_id,
)
from .groupoid import FinGroupoid, GroupoidHom, NatTrans, cech_groupoid, identity_hom, is_etale_groupoid
from .groups import group_from_arrows

_HAEFLIGER_CACHE = {}
_COMPARISON_CACHE = {}
_EFFECTIVE_CACHE = {}


def _haefliger(space):
    cached = _HAEFLIGER_CACHE.get(space)
    if cached is not None:
        return cached
    by_id = {g.id: g for g in all_germs(space)}
    pts = sorted(by_id)
    # a germ specializes to each of its restrictions at smaller points
    pairs = []
    for pid in pts:
        g = by_id[pid]
        for z in space.down_set(g.base):
            pairs.append((g.restrict_to(z).id, pid))
    arr = FinSpace(pts, pairs)
    s = CMap(arr, space, {pid: by_id[pid].base for pid in pts})
    t = CMap(arr, space, {pid: by_id[pid].target for pid in pts})
    unit = CMap(space, arr, {x: identity_germ(space, x).id for x in space.points})
    inv = CMap(arr, arr, {pid: by_id[pid].inverse().id for pid in pts})
    compose = {}
    for a in pts:
        for b in pts:
            if by_id[b].target == by_id[a].base:
                compose[(a, b)] = by_id[b].then(by_id[a]).id
    groupoid = FinGroupoid(space, arr, s, t, unit, inv, compose)
    d = is_etale_groupoid(groupoid)
    if not d.ok:
        raise StructureError("haefliger-etale", f"germ groupoid failed the etale check: {d.reason}")
    _HAEFLIGER_CACHE[space] = (groupoid, by_id)
    return groupoid, by_id


def haefliger(space):
    """The groupoid of all germs of locally defined open embeddings of a space."""
    return _haefliger(space)[0]


def germ_table(space):
    """All germs of the space keyed by their id."""
    return dict(_haefliger(space)[1])


def local_bisection_germ(h, g):
    """Germ at s(g) of the map carrying sources to targets across the arrows near g."""
    by_source = {}
    for a in h.arr_space.down_set(g):
        if h.s(a) in by_source:
            raise StructureError("effective-etale", f"source map is not injective near {g!r}")
        by_source[h.s(a)] = a
    return Germ(h.obj_space, h.s(g), {p: h.t(by_source[p]) for p in h.obj_space.down_set(h.s(g))})


def to_haefliger(h):
    """The comparison homomorphism sending an arrow to the germ of its local bisection."""
    cached = _COMPARISON_CACHE.get(h)
    if cached is not None:
        return cached
    d = is_etale_groupoid(h)
    if not d.ok:
        raise StructureError("effective-etale", f"groupoid is not etale: {d.reason}")
    ha = haefliger(h.obj_space)
    f1 = {g: local_bisection_germ(h, g).id for g in h.arrows}
    comparison = GroupoidHom(h, ha, {x: x for x in h.objects}, f1)
    _COMPARISON_CACHE[h] = comparison
    return comparison


def is_effective(h):
    """A groupoid is effective when distinct arrows have distinct local bisection germs."""
    comparison = to_haefliger(h)
    seen = {}
    for g in sorted(h.arrows):
        image = comparison.arr(g)
        if image in seen:
            return Decision(False, f"arrows {seen[image]!r} and {g!r} have the same germ", witness=[seen[image], g])
        seen[image] = g
    return Decision(True, certificate={"classes": len(seen)})


@dataclass(frozen=True)
class EffectivePart:
    """Image of a groupoid in the germ groupoid, with projection and inclusion."""

    groupoid: FinGroupoid
    projection: GroupoidHom
    inclusion: GroupoidHom


def _quotient_minimal_class_set(h, cls_of, b):
    """Classes in the smallest open of the quotient topology containing the class of b."""
    current = {cls_of[b]}
    while True:
        preimage = {a for a in h.arrows if cls_of[a] in current}
        grown = {cls_of[a] for a in h.arr_space.down_closure(preimage)}
        if grown == current:
            return current
        current = grown


def effective_part(h):
    """The effective part: germ classes of arrows as an open subgroupoid of germs."""
    cached = _EFFECTIVE_CACHE.get(h)
    if cached is not None:
        return cached
    comparison = to_haefliger(h)
    ha = comparison.cod
    cls_of = {a: comparison.arr(a) for a in h.arrows}
    image = sorted(set(cls_of.values()))
    arr = ha.arr_space.subspace(image)
    # the quotient topology from the arrow space must agree with the germ topology
    for b in h.arrows:
        quotient_open = _quotient_minimal_class_set(h, cls_of, b)
        subspace_open = {c for c in image if arr.le(c, cls_of[b])}
        if quotient_open != subspace_open:
            raise StructureError("effective-topology", f"quotient and subspace topologies disagree at {b!r}")
    table = germ_table(h.obj_space)
    s = CMap(arr, h.obj_space, {c: table[c].base for c in image})
    t = CMap(arr, h.obj_space, {c: table[c].target for c in image})
    unit = CMap(h.obj_space, arr, {x: identity_germ(h.obj_space, x).id for x in h.obj_space.points})
    inv = CMap(arr, arr, {c: table[c].inverse().id for c in image})
    compose = {}
    for a in image:
        for b in image:
            if table[b].target == table[a].base:
                compose[(a, b)] = table[b].then(table[a]).id
    ef = FinGroupoid(h.obj_space, arr, s, t, unit, inv, compose)
    d = is_etale_groupoid(ef)
    if not d.ok:
        raise StructureError("effective-etale", f"effective part failed the etale check: {d.reason}")
    projection = GroupoidHom(h, ef, comparison.f0, CMap(h.arr_space, arr, cls_of))
    inclusion = GroupoidHom(ef, ha, {x: x for x in ef.objects}, {c: c for c in image})
    result = EffectivePart(ef, projection, inclusion)
    _EFFECTIVE_CACHE[h] = result
    return result


def ineffective_isotropy(h, point):
    """The group of isotropy arrows at a point whose local bisection germ is the identity."""
    if point not in h.obj_space:
        raise StructureError("effective-point", f"unknown point {point!r}")
    comparison = to_haefliger(h)
    ident = identity_germ(h.obj_space, point).id
    members = sorted(a for a in h.isotropy(point) if comparison.arr(a) == ident)
    return group_from_arrows(members, h.mul, h.one(point))


def effective_part_on_hom(phi):
    """The induced homomorphism between effective parts, for open homomorphisms."""
    for name, component in (("objects", phi.f0), ("arrows", phi.f1)):
        d = is_open_map(component)
        if not d.ok:
            raise StructureError("effective-open", f"the map on {name} is not open: {d.reason}")
    dom = effective_part(phi.dom)
    cod = effective_part(phi.cod)
    graph = {}
    for g in phi.dom.arrows:
        cls = dom.projection.arr(g)
        value = cod.projection.arr(phi.arr(g))
        if graph.setdefault(cls, value) != value:
            raise StructureError("effective-functoriality", f"germ-equal arrows map to germ-distinct arrows at {g!r}")
    return GroupoidHom(dom.groupoid, cod.groupoid, phi.f0, CMap(dom.groupoid.arr_space, cod.groupoid.arr_space, graph))


def effective_part_on_2cell(alpha):
    """The induced 2-cell between effective parts of open parallel homomorphisms."""
    src = effective_part_on_hom(alpha.src)
    dst = effective_part_on_hom(alpha.dst)
    cod = effective_part(alpha.src.cod)
    return NatTrans(src, dst, {x: cod.projection.arr(alpha.at(x)) for x in alpha.src.dom.objects})


def effectiveness_iso(g):
    """Inverse of the projection onto the effective part, for an effective groupoid."""
    d = is_effective(g)
    if not d.ok:
        raise StructureError("effective-target", f"groupoid is not effective: {d.reason}")
    part = effective_part(g)
    back = {part.projection.arr(a): a for a in g.arrows}
    return GroupoidHom(part.groupoid, g, {x: x for x in g.objects}, back)


def factor_through_effective(phi):
    """Factor an open homomorphism into an effective groupoid through the effective part.

    The factorization is unique because the projection is surjective on
    objects and arrows; it is the class-level map followed by the
    effectiveness isomorphism of the codomain.
    """
    factored = effective_part_on_hom(phi).then(effectiveness_iso(phi.cod))
    if effective_part(phi.dom).projection.then(factored) != phi:
        raise StructureError("effective-factor", "factorization does not recover the homomorphism")
    return factored


@dataclass(frozen=True)
class RefinementComparison:
    """Effective part of a refinement against refinement of the effective part."""

    refined: FinGroupoid
    left: EffectivePart
    right: FinGroupoid
    forward: GroupoidHom
    backward: GroupoidHom


def effective_refinement_compare(h, cover):
    """The canonical isomorphism between Ef of a refinement and the refined Ef."""
    refined, projection = cech_groupoid(h, cover)
    left = effective_part(refined)
    ef = effective_part(h)
    right, _ = cech_groupoid(ef.groupoid, cover)
    graph = {}
    for a in refined.arrows:
        cls = left.projection.arr(a)
        value = tuple_id(ef.projection.arr(projection.arr(a)), refined.s(a), refined.t(a))
        if graph.setdefault(cls, value) != value:
            raise StructureError("effective-refinement", f"comparison is not constant on the germ class of {a!r}")
    if len(graph) != len(right.arrows):
        raise StructureError("effective-refinement", "comparison is not a bijection on arrows")
    ident = {p: p for p in cover.dom.points}
    forward = GroupoidHom(left.groupoid, right, ident, CMap(left.groupoid.arr_space, right.arr_space, graph))
    backward = GroupoidHom(right, left.groupoid, ident, CMap(right.arr_space, left.groupoid.arr_space, {v: c for c, v in graph.items()}))
    if forward.then(backward) != identity_hom(left.groupoid) or backward.then(forward) != identity_hom(right):
        raise StructureError("effective-refinement", "comparison is not invertible")
    return RefinementComparison(refined, left, right, forward, backward)


def refine_realization(realization):
    """Factor the structure map of a realization through the refinement along its object cover.

    Returns the factoring homomorphism into the refined base together with
    the canonical projection back; their composite is the structure map.
    """
    structure = realization.over.structure
    ag = realization.groupoid
    refined, projection = cech_groupoid(structure.cod, structure.f0)
    graph = {}
    for a in ag.arrows:
        h_part, _ = realization.arrow_parts[a]
        graph[a] = tuple_id(h_part, ag.s(a), ag.t(a))
    ident = {x: x for x in ag.objects}
    prime = GroupoidHom(ag, refined, ident, CMap(ag.arr_space, refined.arr_space, graph))
    if prime.then(projection) != structure:
        raise StructureError("refinement-factor", "refined map does not factor the structure map")
    return prime, projection


def same_germ_in_action_groupoid(realization, a1, a2):
    """Germ equality of two parallel realization arrows, checked against the refined map."""
    base = realization.over.structure.cod
    eff = is_effective(base)
    if not eff.ok:
        raise StructureError("situation-effective", f"base groupoid is not effective: {eff.reason}")
    ag = realization.groupoid
    for a in (a1, a2):
        if a not in ag.arr_space:
            raise StructureError("situation-arrow", f"unknown arrow {a!r}")
    if ag.s(a1) != ag.s(a2) or ag.t(a1) != ag.t(a2):
        raise StructureError("situation-parallel", "arrows must share source and target")
    prime, _ = refine_realization(realization)
    comparison = to_haefliger(ag)
    same_refined = prime.arr(a1) == prime.arr(a2)
    same_germ = comparison.arr(a1) == comparison.arr(a2)
    if same_refined != same_germ:
        raise StructureError("situation", f"germ equality and refined equality disagree on ({a1!r},{a2!r})")
    reason = "arrows have the same germ" if same_germ else "arrows have distinct germs"
    return Decision(same_germ, reason, witness={"refined": [prime.arr(a1), prime.arr(a2)], "germs": [comparison.arr(a1), comparison.arr(a2)]})
