"""Gerbed groupoids over effective bases and their dictionary with ineffective groupoids."""

import itertools
from dataclasses import dataclass

from .fintop import StructureError, is_open_map
from .groupoid import (
    EquivalencePackage,
    GroupoidHom,
    NatTrans,
    WeakPullbackResult,
    find_section_over,
    identity_hom,
    identity_nat,
    induce_into_weak_pullback,
    is_etale_groupoid,
    is_morita_equivalence,
    weak_pullback,
)
from .action import OverGroupoid, Slice2Cell, SliceMorphism
from .effective import (
    effective_part,
    effective_part_on_2cell,
    effective_part_on_hom,
    effectiveness_iso,
    is_effective,
)


def _as_over(structure):
    if isinstance(structure, OverGroupoid):
        return structure
    return OverGroupoid(structure)


@dataclass(frozen=True)
class PulledBackGerbe:
    """A realization pulled back along a homomorphism into its base."""

    over: OverGroupoid
    to_total: GroupoidHom
    pullback: WeakPullbackResult


def pullback_gerbe(f, tau):
    """Pull a realization back along a homomorphism into its base.

    Objects of the result are triples (x, z, r) with r an arrow from f(x) to
    the anchor image of z; the new anchor remembers x and the comparison to
    the original total groupoid remembers z.
    """
    tau = _as_over(tau)
    if f.cod != tau.base:
        raise StructureError("pullback-base", "the homomorphism must land in the base of the realization")
    wp = weak_pullback(f, tau.structure)
    return PulledBackGerbe(OverGroupoid(wp.pr1), wp.pr2, wp)


def twist_pullback(alpha, tau):
    """Compare the pullbacks along the two sides of a base 2-cell.

    For alpha from f to g this sends a g-pullback triple (x, z, r) to the
    f-pullback triple (x, z, r.alpha(x)); it is strict over the common domain
    and leaves the comparison to the original total groupoid unchanged.
    """
    tau = _as_over(tau)
    dom_pb = pullback_gerbe(alpha.dst, tau)
    cod_pb = pullback_gerbe(alpha.src, tau)
    base = tau.base
    x_gpd = alpha.src.dom
    f0 = {}
    for o, (x, z, r) in dom_pb.pullback.object_parts.items():
        f0[o] = cod_pb.pullback.object_id(x, z, base.mul(r, alpha.at(x)))
    f1 = {}
    for a, (u, v, r) in dom_pb.pullback.arrow_parts.items():
        f1[a] = cod_pb.pullback.arrow_id(u, v, base.mul(r, alpha.at(x_gpd.s(u))))
    hom = GroupoidHom(dom_pb.pullback.groupoid, cod_pb.pullback.groupoid, f0, f1)
    return SliceMorphism(dom_pb.over, cod_pb.over, hom)


def collapse_iterated_pullback(g, f, rho):
    """Collapse a pullback of a pullback into the pullback along the composite.

    Sends (w, (x, z, r), q) to (w, z, r.g(q)); strict over the domain of f and
    compatible with the comparisons to the original total groupoid.
    """
    rho = _as_over(rho)
    outer = pullback_gerbe(g, rho)
    iterated = pullback_gerbe(f, outer.over)
    collapsed = pullback_gerbe(f.then(g), rho)
    base = rho.base
    f0 = {}
    for o, (w, mid, q) in iterated.pullback.object_parts.items():
        _, z, r = outer.pullback.object_parts[mid]
        f0[o] = collapsed.pullback.object_id(w, z, base.mul(r, g.arr(q)))
    f1 = {}
    for a, (u, mid, q) in iterated.pullback.arrow_parts.items():
        _, v, r = outer.pullback.arrow_parts[mid]
        f1[a] = collapsed.pullback.arrow_id(u, v, base.mul(r, g.arr(q)))
    hom = GroupoidHom(iterated.pullback.groupoid, collapsed.pullback.groupoid, f0, f1)
    return SliceMorphism(iterated.over, collapsed.over, hom)


def pullback_gerbe_on_map(f, n):
    """Pull a morphism of realizations back along a homomorphism into their base."""
    dom_pb = pullback_gerbe(f, n.dom)
    cod_pb = pullback_gerbe(f, n.cod)
    base = n.dom.base
    total = n.dom.total
    cell = n.cell
    f0 = {}
    for o, (x, z, r) in dom_pb.pullback.object_parts.items():
        f0[o] = cod_pb.pullback.object_id(x, n.hom.obj(z), base.mul(cell.at(z), r))
    f1 = {}
    for a, (u, v, r) in dom_pb.pullback.arrow_parts.items():
        f1[a] = cod_pb.pullback.arrow_id(u, n.hom.arr(v), base.mul(cell.at(total.s(v)), r))
    hom = GroupoidHom(dom_pb.pullback.groupoid, cod_pb.pullback.groupoid, f0, f1)
    return SliceMorphism(dom_pb.over, cod_pb.over, hom)


def pullback_gerbe_on_2cell(f, omega):
    """Pull a 2-cell between morphisms of realizations back along a homomorphism."""
    src = pullback_gerbe_on_map(f, omega.src)
    dst = pullback_gerbe_on_map(f, omega.dst)
    pb = pullback_gerbe(f, omega.src.cod)
    dom_pb = pullback_gerbe(f, omega.src.dom)
    base = omega.src.dom.base
    cell = omega.src.cell
    x_gpd = f.dom
    comp = {}
    for o, (x, z, r) in dom_pb.pullback.object_parts.items():
        comp[o] = pb.pullback.arrow_id(x_gpd.one(x), omega.at(z), base.mul(cell.at(z), r))
    nat = NatTrans(src.hom, dst.hom, comp)
    return Slice2Cell(src, dst, nat)


class GerbedObject:
    """An effective etale base with a realization whose effective part is an equivalence."""

    __slots__ = ("_base", "_structure", "_certificate")

    def __init__(self, structure):
        over = _as_over(structure)
        base = over.base
        d = is_effective(base)
        if not d.ok:
            raise StructureError("gerbed-effective", f"the base must be effective: {d.reason}")
        for label, gpd in (("total", over.total), ("base", base)):
            d = is_etale_groupoid(gpd)
            if not d.ok:
                raise StructureError("gerbed-etale", f"the {label} groupoid must be etale: {d.reason}")
        d = over.is_etale()
        if not d.ok:
            raise StructureError("gerbed-etale", d.reason)
        cert = is_morita_equivalence(effective_part_on_hom(over.structure))
        if not cert.ok:
            raise StructureError("gerbed-equivalence", f"the effective part of the realization must be an equivalence: {cert.reason}")
        self._base = base
        self._structure = over
        self._certificate = cert

    @property
    def base(self):
        return self._base

    @property
    def structure(self):
        return self._structure

    @property
    def certificate(self):
        return self._certificate

    def __eq__(self, other):
        if not isinstance(other, GerbedObject):
            return NotImplemented
        return self._structure == other._structure

    def __hash__(self):
        return hash(self._structure)

    def __repr__(self):
        return f"GerbedObject({self._structure!r})"


class GerbedMap:
    """An open base homomorphism with a comparison into the pulled-back realization."""

    __slots__ = ("_dom", "_cod", "_base_map", "_over_map")

    def __init__(self, dom, cod, base_map, over_map):
        if base_map.dom != dom.base or base_map.cod != cod.base:
            raise StructureError("gerbed-map", "base homomorphism does not match the endpoints")
        for label, component in (("objects", base_map.f0), ("arrows", base_map.f1)):
            d = is_open_map(component)
            if not d.ok:
                raise StructureError("gerbed-open", f"base homomorphism is not open on {label}: {d.reason}")
        expected = pullback_gerbe(base_map, cod.structure)
        if over_map.dom != dom.structure or over_map.cod != expected.over:
            raise StructureError("gerbed-map", "comparison must run from the realization to the pulled-back realization")
        self._dom = dom
        self._cod = cod
        self._base_map = base_map
        self._over_map = over_map

    @property
    def dom(self):
        return self._dom

    @property
    def cod(self):
        return self._cod

    @property
    def base_map(self):
        return self._base_map

    @property
    def over_map(self):
        return self._over_map

    def then(self, other):
        """Compose with a following map of gerbed groupoids."""
        return compose_gerbed(other, self)

    def __eq__(self, other):
        if not isinstance(other, GerbedMap):
            return NotImplemented
        return (self._dom == other._dom and self._cod == other._cod
                and self._base_map == other._base_map and self._over_map == other._over_map)

    def __hash__(self):
        return hash((self._dom, self._cod, self._base_map, self._over_map))

    def __repr__(self):
        return f"GerbedMap({self._base_map!r})"


class Gerbed2Cell:
    """A base 2-cell together with a compatible twist of the comparisons."""

    __slots__ = ("_src", "_dst", "_base_cell", "_over_cell")

    def __init__(self, src, dst, base_cell, over_cell):
        if src.dom != dst.dom or src.cod != dst.cod:
            raise StructureError("gerbed-2cell", "source and destination maps are not parallel")
        if base_cell.src != src.base_map or base_cell.dst != dst.base_map:
            raise StructureError("gerbed-2cell", "base 2-cell does not run between the base homomorphisms")
        expected = dst.over_map.then(twist_pullback(base_cell, src.cod.structure))
        if over_cell.src != expected or over_cell.dst != src.over_map:
            raise StructureError("gerbed-2cell", "comparison 2-cell must run from the twisted destination comparison to the source comparison")
        self._src = src
        self._dst = dst
        self._base_cell = base_cell
        self._over_cell = over_cell

    @property
    def src(self):
        return self._src

    @property
    def dst(self):
        return self._dst

    @property
    def base_cell(self):
        return self._base_cell

    @property
    def over_cell(self):
        return self._over_cell

    def then(self, other):
        """Compose vertically with a following 2-cell."""
        return compose_gerbed_2cells(other, self)

    def __eq__(self, other):
        if not isinstance(other, Gerbed2Cell):
            return NotImplemented
        return (self._src == other._src and self._dst == other._dst
                and self._base_cell == other._base_cell
                and self._over_cell.omega == other._over_cell.omega)

    def __hash__(self):
        return hash((self._src, self._dst, self._base_cell, self._over_cell.omega))

    def __repr__(self):
        return f"Gerbed2Cell({self._base_cell!r})"


def identity_gerbed(obj):
    """The identity map of a gerbed groupoid."""
    f = identity_hom(obj.base)
    pb = pullback_gerbe(f, obj.structure)
    sigma = obj.structure.structure
    u = induce_into_weak_pullback(pb.pullback, sigma, identity_hom(obj.structure.total), identity_nat(sigma))
    return GerbedMap(obj, obj, f, SliceMorphism(obj.structure, pb.over, u))


def compose_gerbed(second, first):
    """Compose maps of gerbed groupoids, first ``first`` then ``second``."""
    if first.cod != second.dom:
        raise StructureError("gerbed-compose", "maps of gerbed groupoids are not composable")
    f, g = first.base_map, second.base_map
    over = first.over_map.then(pullback_gerbe_on_map(f, second.over_map))
    over = over.then(collapse_iterated_pullback(g, f, second.cod.structure))
    return GerbedMap(first.dom, second.cod, f.then(g), over)


def identity_gerbed_2cell(mapp):
    """The identity 2-cell of a map of gerbed groupoids."""
    alpha = identity_nat(mapp.base_map)
    source = mapp.over_map.then(twist_pullback(alpha, mapp.cod.structure))
    cod_gpd = source.cod.total
    comp = {w: cod_gpd.one(source.hom.obj(w)) for w in source.dom.total.objects}
    nat = NatTrans(source.hom, mapp.over_map.hom, comp)
    return Gerbed2Cell(mapp, mapp, alpha, Slice2Cell(source, mapp.over_map, nat))


def compose_gerbed_2cells(second, first):
    """Compose 2-cells of gerbed maps vertically, first ``first`` then ``second``."""
    if first.dst != second.src:
        raise StructureError("gerbed-compose", "2-cells are not vertically composable")
    alpha = first.base_cell.then(second.base_cell)
    tau = first.src.cod.structure
    lower = twist_pullback(first.base_cell, tau)
    nat = second.over_cell.omega.postcompose(lower.hom).then(first.over_cell.omega)
    source = second.dst.over_map.then(twist_pullback(alpha, tau))
    return Gerbed2Cell(first.src, second.dst, alpha, Slice2Cell(source, first.src.over_map, nat))


def postwhisker_gerbed(mapp, cell):
    """Apply a map of gerbed groupoids after both sides of a 2-cell."""
    if cell.src.cod != mapp.dom:
        raise StructureError("gerbed-compose", "whiskering endpoints do not match")
    src = compose_gerbed(mapp, cell.src)
    dst = compose_gerbed(mapp, cell.dst)
    g, n = mapp.base_map, mapp.over_map
    f = cell.src.base_map
    rho = mapp.cod.structure
    alpha = cell.base_cell.postcompose(g)
    chi = collapse_iterated_pullback(g, f, rho)
    inner = pullback_gerbe_on_map(f, n)
    nat = cell.over_cell.omega.postcompose(inner.hom.then(chi.hom))
    source = dst.over_map.then(twist_pullback(alpha, rho))
    return Gerbed2Cell(src, dst, alpha, Slice2Cell(source, src.over_map, nat))


def prewhisker_gerbed(cell, mapp):
    """Apply a map of gerbed groupoids before both sides of a 2-cell."""
    if mapp.cod != cell.src.dom:
        raise StructureError("gerbed-compose", "whiskering endpoints do not match")
    src = compose_gerbed(cell.src, mapp)
    dst = compose_gerbed(cell.dst, mapp)
    f, m = mapp.base_map, mapp.over_map
    g = cell.src.base_map
    rho = cell.src.cod.structure
    alpha = cell.base_cell.precompose(f)
    chi = collapse_iterated_pullback(g, f, rho)
    inner = pullback_gerbe_on_2cell(f, cell.over_cell)
    nat = inner.omega.precompose(m.hom).postcompose(chi.hom)
    source = dst.over_map.then(twist_pullback(alpha, rho))
    return Gerbed2Cell(src, dst, alpha, Slice2Cell(source, src.over_map, nat))


def paste_gerbed_2cells(second, first):
    """Compose 2-cells of gerbed maps horizontally, first ``first`` then ``second``."""
    left = postwhisker_gerbed(second.src, first)
    right = prewhisker_gerbed(second, first.dst)
    return compose_gerbed_2cells(right, left)


def theta(g):
    """The gerbed groupoid carried by an etale groupoid: the effective part under the germ projection."""
    part = effective_part(g)
    return GerbedObject(part.projection)


def theta_on_hom(phi):
    """The map of gerbed groupoids carried by an open homomorphism."""
    dom = theta(phi.dom)
    cod = theta(phi.cod)
    f = effective_part_on_hom(phi)
    pb = pullback_gerbe(f, cod.structure)
    sigma = dom.structure.structure
    u = induce_into_weak_pullback(pb.pullback, sigma, phi, identity_nat(sigma.then(f)))
    return GerbedMap(dom, cod, f, SliceMorphism(dom.structure, pb.over, u))


def theta_on_2cell(alpha):
    """The 2-cell of gerbed maps carried by a 2-cell of open homomorphisms."""
    src = theta_on_hom(alpha.src)
    dst = theta_on_hom(alpha.dst)
    base = effective_part_on_2cell(alpha)
    h = alpha.src.cod
    pb = pullback_gerbe(src.base_map, src.cod.structure)
    proj = src.cod.structure.structure
    comp = {}
    for w in alpha.src.dom.objects:
        comp[w] = pb.pullback.arrow_id(src.dom.base.one(w), h.inv(alpha.at(w)), proj.arr(alpha.at(w)))
    source = dst.over_map.then(twist_pullback(base, src.cod.structure))
    nat = NatTrans(source.hom, src.over_map.hom, comp)
    return Gerbed2Cell(src, dst, base, Slice2Cell(source, src.over_map, nat))


def xi(obj):
    """The etale groupoid underlying a gerbed groupoid: the total groupoid of its realization."""
    return obj.structure.total


def xi_on_map(mapp):
    """The homomorphism underlying a map of gerbed groupoids."""
    pb = pullback_gerbe(mapp.base_map, mapp.cod.structure)
    return mapp.over_map.hom.then(pb.pullback.pr2)


def xi_on_2cell(cell):
    """The 2-cell underlying a 2-cell of gerbed maps."""
    total = cell.src.cod.structure.total
    pb = pullback_gerbe(cell.src.base_map, cell.src.cod.structure)
    comp = {w: total.inv(pb.pullback.pr2.arr(cell.over_cell.at(w)))
            for w in cell.src.dom.structure.total.objects}
    return NatTrans(xi_on_map(cell.src), xi_on_map(cell.dst), comp)


def _unique_lift(f, u, v, h):
    hits = [l for l in f.dom.arrows_between(u, v) if f.arr(l) == h]
    if len(hits) != 1:
        raise StructureError("gets-section", f"expected a unique lift of {h!r} from {u!r} to {v!r}, found {len(hits)}")
    return hits[0]


def _continuous_maps(dom, cod):
    pts = sorted(dom.points)
    for values in itertools.product(sorted(cod.points), repeat=len(pts)):
        graph = dict(zip(pts, values))
        if all(cod.le(graph[p], graph[q]) for p in pts for q in pts if dom.le(p, q)):
            yield graph


def _quasi_inverse(f):
    """A continuous quasi-inverse of a fully faithful essentially surjective homomorphism.

    Prefers a strict section of the object component, in which case the
    counit is the identity; otherwise searches the finite space of continuous
    object assignments together with counit components.
    """
    a_, b_ = f.dom, f.cod
    section = find_section_over(f.f0, list(b_.objects), b_.obj_space)
    if section is not None:
        try:
            back = GroupoidHom(b_, a_, dict(section),
                               {h: _unique_lift(f, section[b_.s(h)], section[b_.t(h)], h) for h in b_.arrows})
            eta = NatTrans(identity_hom(a_), f.then(back),
                           {u: _unique_lift(f, u, section[f.obj(u)], b_.one(f.obj(u))) for u in a_.objects})
            return back, eta, None
        except StructureError:
            pass
    names = sorted(b_.objects)
    for graph in _continuous_maps(b_.obj_space, a_.obj_space):
        pools = [sorted(b_.arrows_between(f.obj(graph[x]), x)) for x in names]
        for pick in itertools.product(*pools):
            counit = dict(zip(names, pick))
            try:
                back = GroupoidHom(b_, a_, dict(graph),
                                   {h: _unique_lift(f, graph[b_.s(h)], graph[b_.t(h)],
                                                    b_.mul(b_.inv(counit[b_.t(h)]), b_.mul(h, counit[b_.s(h)])))
                                    for h in b_.arrows})
                eps = NatTrans(back.then(f), identity_hom(b_), counit)
                eta = NatTrans(identity_hom(a_), f.then(back),
                               {u: _unique_lift(f, u, graph[f.obj(u)], b_.inv(counit[f.obj(u)])) for u in a_.objects})
                return back, eta, eps
            except StructureError:
                continue
    raise StructureError("gets-section", "no continuous quasi-inverse of the base homomorphism was found")


@dataclass(frozen=True)
class GerbedComparison:
    """A gerbed groupoid against the round trip through its underlying groupoid."""

    original: GerbedObject
    round_trip: GerbedObject
    forward: GerbedMap
    backward: GerbedMap
    package: EquivalencePackage


def theta_xi_comparison(obj):
    """The canonical equivalence between a gerbed groupoid and the round trip through its underlying groupoid."""
    total = xi(obj)
    round_trip = theta(total)
    sigma = obj.structure.structure
    base = obj.base
    part = effective_part(total)
    forward_base = effective_part_on_hom(sigma).then(effectiveness_iso(base))
    pb = pullback_gerbe(forward_base, obj.structure)
    u = induce_into_weak_pullback(pb.pullback, part.projection, identity_hom(total),
                                  identity_nat(part.projection.then(forward_base)))
    forward = GerbedMap(round_trip, obj, forward_base, SliceMorphism(round_trip.structure, pb.over, u))
    back_f, eta, eps = _quasi_inverse(forward_base)

    def eps_at(x):
        return eps.at(x) if eps is not None else base.one(x)

    kappa = {w: _unique_lift(forward_base, back_f.obj(sigma.obj(w)), w, eps_at(sigma.obj(w)))
             for w in total.objects}
    gamma = NatTrans(sigma.then(back_f), part.projection, kappa)
    pb_back = pullback_gerbe(back_f, round_trip.structure)
    v = induce_into_weak_pullback(pb_back.pullback, sigma, identity_hom(total), gamma)
    backward = GerbedMap(obj, round_trip, back_f, SliceMorphism(obj.structure, pb_back.over, v))
    package = EquivalencePackage(forward_base, back_f, eta=eta, eps=eps).validate()
    return GerbedComparison(obj, round_trip, forward, backward, package)
