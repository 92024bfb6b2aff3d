"""Realization of equivariant groupoid objects and the stack of local sections."""

import itertools
from dataclasses import dataclass

from .fintop import CMap, Decision, FinSpace, StructureError, fibered_product, identity_map, is_etale, pair_id, tuple_id
from .groupoid import (
    EquivalencePackage,
    FinGroupoid,
    GroupoidHom,
    NatTrans,
    connected_components,
    identity_hom,
    is_etale_groupoid,
    is_morita_equivalence,
    unit_groupoid,
    weak_pullback,
)
from .equivariant import (
    EquivariantMap,
    EquivariantSheaf,
    SheafGroupoid,
    SheafGroupoidHom,
    SheafGroupoidNat,
    _open_carrier,
    equivariant_maps,
    pullback_sheaf,
    representable_sheaf,
    unit_sheaf_groupoid,
)


class OverGroupoid:
    """A groupoid together with a structure homomorphism to a base groupoid."""

    __slots__ = ("_structure",)

    def __init__(self, structure):
        if not isinstance(structure, GroupoidHom):
            raise StructureError("over-structure", "an over-groupoid is given by a structure homomorphism")
        self._structure = structure

    @property
    def structure(self):
        return self._structure

    @property
    def total(self):
        return self._structure.dom

    @property
    def base(self):
        return self._structure.cod

    def is_etale(self):
        """Both components of the structure map are etale maps of spaces."""
        for name, m in (("objects", self._structure.f0), ("arrows", self._structure.f1)):
            d = is_etale(m)
            if not d.ok:
                return Decision(False, f"structure map is not etale on {name}: {d.reason}", witness=d.witness)
        return Decision(True)

    def __eq__(self, other):
        if not isinstance(other, OverGroupoid):
            return NotImplemented
        return self._structure == other._structure

    def __hash__(self):
        return hash(self._structure)

    def __repr__(self):
        return f"OverGroupoid({self._structure!r})"


def _as_over(over):
    if isinstance(over, GroupoidHom):
        return OverGroupoid(over)
    return over


class SliceMorphism:
    """A homomorphism between groupoids over a common base, with a 2-cell.

    The cell runs from the domain structure map to the codomain structure map
    composed with the homomorphism; ``None`` records that the triangle
    commutes strictly.
    """

    __slots__ = ("_dom", "_cod", "_hom", "_cell", "_strict")

    def __init__(self, dom, cod, hom, cell=None):
        dom = _as_over(dom)
        cod = _as_over(cod)
        if dom.base != cod.base:
            raise StructureError("slice-base", "both sides must live over the same base")
        if hom.dom != dom.total or hom.cod != cod.total:
            raise StructureError("slice-hom", "homomorphism endpoints do not match the over-groupoids")
        strict = cell is None
        if strict:
            if hom.then(cod.structure) != dom.structure:
                raise StructureError("slice-cell", "triangle does not commute strictly and no 2-cell is given")
            cell = NatTrans(dom.structure, hom.then(cod.structure), {x: dom.base.one(dom.structure.obj(x)) for x in dom.total.objects})
        if cell.src != dom.structure or cell.dst != hom.then(cod.structure):
            raise StructureError("slice-cell", "the 2-cell must run from the domain structure map to the triangle composite")
        self._dom = dom
        self._cod = cod
        self._hom = hom
        self._cell = cell
        self._strict = strict

    @property
    def dom(self):
        return self._dom

    @property
    def cod(self):
        return self._cod

    @property
    def hom(self):
        return self._hom

    @property
    def cell(self):
        return self._cell

    @property
    def is_strict(self):
        return self._strict

    def then(self, other):
        if self._cod != other.dom:
            raise StructureError("slice-compose", "slice morphisms are not composable")
        hom = self._hom.then(other.hom)
        cell = self._cell.then(other.cell.precompose(self._hom))
        return SliceMorphism(self._dom, other.cod, hom, cell)

    def __eq__(self, other):
        if not isinstance(other, SliceMorphism):
            return NotImplemented
        return self._dom == other._dom and self._cod == other._cod and self._hom == other._hom and self._cell == other._cell

    def __hash__(self):
        return hash((self._dom, self._cod, self._hom, self._cell))


def identity_slice(over):
    over = _as_over(over)
    return SliceMorphism(over, over, identity_hom(over.total))


class Slice2Cell:
    """A 2-cell between slice morphisms, compatible with their cells."""

    __slots__ = ("_src", "_dst", "_omega")

    def __init__(self, src, dst, omega):
        if src.dom != dst.dom or src.cod != dst.cod:
            raise StructureError("slice-2cell", "source and destination are not parallel slice morphisms")
        if omega.src != src.hom or omega.dst != dst.hom:
            raise StructureError("slice-2cell", "underlying 2-cell does not run between the underlying homomorphisms")
        if src.cell.then(omega.postcompose(src.cod.structure)) != dst.cell:
            raise StructureError("slice-2cell", "cells are not compatible with the 2-cell")
        self._src = src
        self._dst = dst
        self._omega = omega

    @property
    def src(self):
        return self._src

    @property
    def dst(self):
        return self._dst

    @property
    def omega(self):
        return self._omega

    def at(self, x):
        return self._omega.at(x)


@dataclass(frozen=True)
class ActionGroupoidResult:
    """Realization of a groupoid object: total groupoid, anchor, comparison."""

    groupoid: FinGroupoid
    over: OverGroupoid
    tau: GroupoidHom
    arrow_parts: dict

    @property
    def anchor(self):
        return self.over.structure

    def arrow_id(self, h, k):
        return pair_id(h, k)


def action_groupoid(k):
    """Glue a groupoid object over a base into a single etale groupoid.

    Arrows are pairs (h, c) of a base arrow and an object arrow with matching
    anchor; the pair runs from the source of c translated back along h to the
    target of c.
    """
    h = k.base
    if not is_etale_groupoid(h).ok:
        raise StructureError("action-base", "the base groupoid must be etale")
    kk = k.groupoid
    obj = kk.obj_space
    mu0 = k.obj_sheaf.moment
    mu1 = k.arr_sheaf.moment
    act0 = k.obj_sheaf.act
    act1 = k.arr_sheaf.act
    diagram = fibered_product(h.target_map, mu1)
    arr = diagram.space
    parts = {a: (diagram.pr1(a), diagram.pr2(a)) for a in arr.points}
    s = CMap(arr, obj, {a: act0(h.inv(parts[a][0]), kk.s(parts[a][1])) for a in arr.points})
    t = CMap(arr, obj, {a: kk.t(parts[a][1]) for a in arr.points})
    unit = CMap(obj, arr, {x: pair_id(h.one(mu0(x)), kk.one(x)) for x in obj.points})
    inv = CMap(arr, arr, {a: pair_id(h.inv(parts[a][0]), act1(h.inv(parts[a][0]), kk.inv(parts[a][1]))) for a in arr.points})
    compose = {}
    for a in arr.points:
        h2, c2 = parts[a]
        for b in arr.points:
            h1, c1 = parts[b]
            if s(a) == t(b):
                compose[(a, b)] = pair_id(h.mul(h2, h1), kk.mul(c2, act1(h2, c1)))
    groupoid = FinGroupoid(obj, arr, s, t, unit, inv, compose)
    theta = GroupoidHom(groupoid, h, {x: mu0(x) for x in obj.points}, {a: parts[a][0] for a in arr.points})
    tau = GroupoidHom(kk, groupoid, identity_map(obj), {c: pair_id(h.one(mu1(c)), c) for c in kk.arrows})
    over = OverGroupoid(theta)
    d = is_etale_groupoid(groupoid)
    if not d.ok:
        raise StructureError("action-etale", f"realization failed to be etale: {d.reason}")
    d = over.is_etale()
    if not d.ok:
        raise StructureError("action-etale", f"anchor failed to be etale: {d.reason}")
    return ActionGroupoidResult(groupoid, over, tau, parts)


def realize_sheaf(e):
    """The realization of a sheaf, via its unit groupoid object."""
    return action_groupoid(unit_sheaf_groupoid(e))


def action_groupoid_on_map(ar_dom, ar_cod, f):
    """The realization of an internal functor; strictly over the base."""
    if not isinstance(f, SheafGroupoidHom):
        raise StructureError("action-map", "expected an internal functor of groupoid objects")
    g0 = {x: f.obj(x) for x in ar_dom.groupoid.objects}
    g1 = {a: pair_id(ar_dom.arrow_parts[a][0], f.arr(ar_dom.arrow_parts[a][1])) for a in ar_dom.groupoid.arrows}
    hom = GroupoidHom(ar_dom.groupoid, ar_cod.groupoid, g0, g1)
    return SliceMorphism(ar_dom.over, ar_cod.over, hom)


def action_groupoid_on_2cell(ar_dom, ar_cod, f_slice, g_slice, alpha):
    """The realization of an internal natural transformation."""
    if not isinstance(alpha, SheafGroupoidNat):
        raise StructureError("action-2cell", "expected an internal natural transformation")
    h = ar_cod.over.base
    mu1 = alpha.src.cod.arr_sheaf.moment
    comp = {x: pair_id(h.one(mu1(alpha.at(x))), alpha.at(x)) for x in ar_dom.groupoid.objects}
    nat = NatTrans(f_slice.hom, g_slice.hom, comp)
    return Slice2Cell(f_slice, g_slice, nat)


@dataclass(frozen=True)
class StackOfSections:
    """The groupoid object of local sections of a groupoid over the base."""

    over: OverGroupoid
    stack: SheafGroupoid
    obj_parts: dict
    arr_parts: dict

    def object_id(self, h, x):
        return pair_id(h, x)

    def arrow_id(self, h, g):
        return pair_id(h, g)


def stack_of_sections(over):
    """The stack of local sections of a groupoid over an etale base.

    Points over a base arrow h are pairs (h, x) with x an object over the
    source of h; arrows over h are pairs (h, g) running from (h.phi(g), s(g))
    to (h, t(g)); the base acts by composition in the first coordinate.
    """
    over = _as_over(over)
    phi = over.structure
    g, h = over.total, over.base
    if not is_etale_groupoid(h).ok:
        raise StructureError("sections-base", "the base groupoid must be etale")
    d = is_etale(phi.f0)
    if not d.ok:
        raise StructureError("sections-etale", f"the structure map must be etale on objects: {d.reason}")
    obj_diag = fibered_product(h.source_map, phi.f0)
    obj = obj_diag.space
    obj_parts = {p: (obj_diag.pr1(p), obj_diag.pr2(p)) for p in obj.points}
    arr_diag = fibered_product(h.source_map, g.target_map.then(phi.f0))
    arr = arr_diag.space
    arr_parts = {p: (arr_diag.pr1(p), arr_diag.pr2(p)) for p in arr.points}
    s = CMap(arr, obj, {p: pair_id(h.mul(arr_parts[p][0], phi.arr(arr_parts[p][1])), g.s(arr_parts[p][1])) for p in arr.points})
    t = CMap(arr, obj, {p: pair_id(arr_parts[p][0], g.t(arr_parts[p][1])) for p in arr.points})
    unit = CMap(obj, arr, {p: pair_id(obj_parts[p][0], g.one(obj_parts[p][1])) for p in obj.points})
    inv = CMap(arr, arr, {p: pair_id(h.mul(arr_parts[p][0], phi.arr(arr_parts[p][1])), g.inv(arr_parts[p][1])) for p in arr.points})
    compose = {}
    for a in arr.points:
        h2, g2 = arr_parts[a]
        for b in arr.points:
            h1, g1 = arr_parts[b]
            if s(a) == t(b):
                compose[(a, b)] = pair_id(h2, g.mul(g2, g1))
    groupoid = FinGroupoid(obj, arr, s, t, unit, inv, compose)
    act0 = {}
    for p in obj.points:
        hh, x = obj_parts[p]
        for l in h.arrows_from(h.t(hh)):
            act0[(l, p)] = pair_id(h.mul(l, hh), x)
    act1 = {}
    for p in arr.points:
        hh, gg = arr_parts[p]
        for l in h.arrows_from(h.t(hh)):
            act1[(l, p)] = pair_id(h.mul(l, hh), gg)
    obj_sheaf = EquivariantSheaf(h, obj, obj_diag.pr1.then(h.target_map), act0)
    arr_sheaf = EquivariantSheaf(h, arr, arr_diag.pr1.then(h.target_map), act1)
    stack = SheafGroupoid(h, groupoid, obj_sheaf, arr_sheaf)
    return StackOfSections(over, stack, obj_parts, arr_parts)


def stack_of_sections_on_map(sm, p_dom=None, p_cod=None):
    """Functoriality of the stack of sections in slice morphisms."""
    if p_dom is None:
        p_dom = stack_of_sections(sm.dom)
    if p_cod is None:
        p_cod = stack_of_sections(sm.cod)
    h = sm.dom.base
    phi = sm.dom.structure
    psi = sm.cod.structure
    f = sm.hom
    alpha = sm.cell
    f0 = {}
    for p in p_dom.stack.groupoid.objects:
        hh, x = p_dom.obj_parts[p]
        f0[p] = pair_id(h.mul(hh, h.inv(alpha.at(x))), f.obj(x))
    f1 = {}
    for p in p_dom.stack.groupoid.arrows:
        hh, gg = p_dom.arr_parts[p]
        lead = h.mul(h.mul(h.mul(hh, phi.arr(gg)), h.inv(alpha.at(sm.dom.total.s(gg)))), h.inv(psi.arr(f.arr(gg))))
        f1[p] = pair_id(lead, f.arr(gg))
    hom = GroupoidHom(p_dom.stack.groupoid, p_cod.stack.groupoid, f0, f1)
    return SheafGroupoidHom(p_dom.stack, p_cod.stack, hom)


def stack_of_sections_on_2cell(cell, p_dom=None, p_cod=None, on_src=None, on_dst=None):
    """Functoriality of the stack of sections in slice 2-cells."""
    if p_dom is None:
        p_dom = stack_of_sections(cell.src.dom)
    if p_cod is None:
        p_cod = stack_of_sections(cell.src.cod)
    if on_src is None:
        on_src = stack_of_sections_on_map(cell.src, p_dom, p_cod)
    if on_dst is None:
        on_dst = stack_of_sections_on_map(cell.dst, p_dom, p_cod)
    h = cell.src.dom.base
    alpha_dst = cell.dst.cell
    comp = {}
    for p in p_dom.stack.groupoid.objects:
        hh, x = p_dom.obj_parts[p]
        comp[p] = pair_id(h.mul(hh, h.inv(alpha_dst.at(x))), cell.at(x))
    return SheafGroupoidNat(on_src, on_dst, EquivariantMap(p_dom.stack.obj_sheaf, p_cod.stack.arr_sheaf, comp))


@dataclass(frozen=True)
class CounitEquivalence:
    """The realization of the stack of sections collapses back onto the total.

    ``counit`` and ``section`` are inverse slice morphisms over the base; the
    composite on the total groupoid is strictly the identity.
    """

    over: OverGroupoid
    sections: StackOfSections
    realization: ActionGroupoidResult
    counit: SliceMorphism
    section: SliceMorphism
    package: EquivalencePackage


def counit_equivalence(over, p=None):
    """Build and validate the counit of the realization/sections pair."""
    over = _as_over(over)
    if p is None:
        p = stack_of_sections(over)
    phi = over.structure
    g, h = over.total, over.base
    ag = action_groupoid(p.stack)
    total = ag.groupoid
    eps0 = {pid: p.obj_parts[pid][1] for pid in total.objects}
    eps1 = {a: p.arr_parts[ag.arrow_parts[a][1]][1] for a in total.arrows}
    epsilon = GroupoidHom(total, g, eps0, eps1)
    chi0 = {x: pair_id(h.one(phi.obj(x)), x) for x in g.objects}
    chi1 = {gg: pair_id(phi.arr(gg), pair_id(h.one(phi.obj(g.t(gg))), gg)) for gg in g.arrows}
    chi = GroupoidHom(g, total, chi0, chi1)
    if chi.then(epsilon) != identity_hom(g):
        raise StructureError("counit-retract", "collapsing after the canonical section is not the identity")
    xi = NatTrans(epsilon.then(phi), ag.anchor, {pid: p.obj_parts[pid][0] for pid in total.objects})
    counit = SliceMorphism(ag.over, over, epsilon, xi.inverse())
    section = SliceMorphism(over, ag.over, chi)
    lam = {}
    for pid in total.objects:
        hh, x = p.obj_parts[pid]
        lam[pid] = pair_id(h.inv(hh), pair_id(h.one(phi.obj(x)), g.one(x)))
    eta = NatTrans(identity_hom(total), epsilon.then(chi), lam)
    package = EquivalencePackage(epsilon, chi, eta=eta, eps=None, extras={"anchor_cell": xi}).validate()
    return CounitEquivalence(over, p, ag, counit, section, package)


@dataclass(frozen=True)
class RealizedOpen:
    """The realization of a representable sheaf, identified with its open."""

    sheaf: EquivariantSheaf
    realization: ActionGroupoidResult
    patch: FinGroupoid
    inclusion: GroupoidHom
    to_patch: SliceMorphism
    from_patch: SliceMorphism
    package: EquivalencePackage
    morita: Decision


def realize_representable(h, u):
    """Realize the source fiber over an open set and collapse it to the open."""
    u = _open_carrier(h, u)
    m = representable_sheaf(h, u)
    ag = realize_sheaf(m)
    total = ag.groupoid
    patch = unit_groupoid(u.as_space())
    inclusion = GroupoidHom(patch, h, {x: x for x in patch.objects}, {x: h.one(x) for x in patch.arrows})
    f0 = {gamma: h.s(gamma) for gamma in total.objects}
    f1 = {a: h.s(ag.arrow_parts[a][1]) for a in total.arrows}
    f = GroupoidHom(total, patch, f0, f1)
    g0 = {x: h.one(x) for x in patch.objects}
    g1 = {x: pair_id(h.one(x), h.one(x)) for x in patch.arrows}
    gmap = GroupoidHom(patch, total, g0, g1)
    if gmap.then(f) != identity_hom(patch):
        raise StructureError("realize-retract", "collapsing after the unit section is not the identity")
    alpha = NatTrans(ag.anchor, f.then(inclusion), {gamma: h.inv(gamma) for gamma in total.objects})
    to_patch = SliceMorphism(ag.over, OverGroupoid(inclusion), f, alpha)
    from_patch = SliceMorphism(OverGroupoid(inclusion), ag.over, gmap)
    eta = NatTrans(f.then(gmap), identity_hom(total), {gamma: pair_id(gamma, gamma) for gamma in total.objects})
    package = EquivalencePackage(f, gmap, eta=eta, eps=None).validate()
    morita = is_morita_equivalence(f)
    if not morita.ok:
        raise StructureError("realize-morita", f"collapse onto the open is not a Morita equivalence: {morita.reason}")
    return RealizedOpen(m, ag, patch, inclusion, to_patch, from_patch, package, morita)


@dataclass(frozen=True)
class InverseImageCompat:
    """Pulling back then realizing agrees with the comparison square."""

    wp: object
    base_realization: ActionGroupoidResult
    pulled: object
    realization: ActionGroupoidResult
    compare: GroupoidHom
    section: GroupoidHom
    unit: NatTrans
    package: EquivalencePackage


def inverse_image_compat(phi, u):
    """Identify the comparison square over an open with the realized pullback."""
    g, h = phi.dom, phi.cod
    u = _open_carrier(h, u)
    m = representable_sheaf(h, u)
    agh = realize_sheaf(m)
    wp = weak_pullback(phi, agh.anchor)
    pulled = pullback_sheaf(phi, m)
    agg = realize_sheaf(pulled.sheaf)
    zeta0 = {}
    for o in wp.groupoid.objects:
        x, z, r = wp.object_parts[o]
        zeta0[o] = pair_id(x, h.mul(h.inv(r), z))
    zeta1 = {}
    for a in wp.groupoid.arrows:
        gg = wp.arrow_parts[a][0]
        zeta1[a] = pair_id(gg, zeta0[wp.groupoid.t(a)])
    zeta = GroupoidHom(wp.groupoid, agg.groupoid, zeta0, zeta1)
    psi0 = {}
    for e in agg.groupoid.objects:
        w = pulled.pr_total(e)
        psi0[e] = tuple_id(pulled.pr_base(e), h.one(h.s(w)), h.inv(w))
    psi1 = {}
    for a in agg.groupoid.arrows:
        gg = agg.arrow_parts[a][0]
        w = pulled.pr_total(agg.groupoid.s(a))
        psi1[a] = tuple_id(gg, agh.groupoid.one(h.one(h.s(w))), h.inv(w))
    psi = GroupoidHom(agg.groupoid, wp.groupoid, psi0, psi1)
    if psi.then(zeta) != identity_hom(agg.groupoid):
        raise StructureError("inverse-image-retract", "comparison after its section is not the identity")
    if zeta.then(agg.anchor) != wp.pr1:
        raise StructureError("inverse-image-over", "comparison does not commute with the projections")
    if psi.then(wp.pr1) != agg.anchor:
        raise StructureError("inverse-image-over", "section does not commute with the projections")
    omega = {}
    for o in wp.groupoid.objects:
        x, z, r = wp.object_parts[o]
        omega[o] = tuple_id(g.one(x), pair_id(h.inv(z), h.one(h.s(z))), r)
    unit = NatTrans(identity_hom(wp.groupoid), zeta.then(psi), omega)
    package = EquivalencePackage(zeta, psi, eta=unit, eps=None).validate()
    return InverseImageCompat(wp, agh, pulled, agg, zeta, psi, unit, package)


class SectionDatum:
    """A local section: an orbitwise constant choice of objects with a cell."""

    __slots__ = ("_over", "_sheaf", "_sigma", "_alpha")

    def __init__(self, over, sheaf, sigma, alpha):
        over = _as_over(over)
        phi = over.structure
        g, h = over.total, over.base
        if not isinstance(sigma, CMap):
            sigma = CMap(sheaf.total, g.obj_space, sigma)
        if not isinstance(alpha, CMap):
            alpha = CMap(sheaf.total, h.arr_space, alpha)
        for gamma in sheaf.total.points:
            a = alpha(gamma)
            if h.s(a) != phi.obj(sigma(gamma)) or h.t(a) != sheaf.moment(gamma):
                raise StructureError("section-cell", f"cell at {gamma!r} has wrong endpoints")
        for gamma in sheaf.total.points:
            for l in h.arrows_from(sheaf.moment(gamma)):
                moved = sheaf.act(l, gamma)
                if sigma(moved) != sigma(gamma):
                    raise StructureError("section-constant", f"section is not constant on the orbit of {gamma!r}")
                if alpha(moved) != h.mul(l, alpha(gamma)):
                    raise StructureError("section-natural", f"cell is not natural at {gamma!r}")
        self._over = over
        self._sheaf = sheaf
        self._sigma = sigma
        self._alpha = alpha

    @property
    def over(self):
        return self._over

    @property
    def sheaf(self):
        return self._sheaf

    @property
    def sigma(self):
        return self._sigma

    @property
    def alpha(self):
        return self._alpha

    def __eq__(self, other):
        if not isinstance(other, SectionDatum):
            return NotImplemented
        return self._over == other._over and self._sheaf == other._sheaf and self._sigma == other._sigma and self._alpha == other._alpha

    def __hash__(self):
        return hash((self._over, self._sigma, self._alpha))


class SectionArrowDatum:
    """An arrow between local sections: an orbitwise constant arrow choice."""

    __slots__ = ("_src", "_dst", "_beta")

    def __init__(self, src, dst, beta):
        if src.over != dst.over or src.sheaf != dst.sheaf:
            raise StructureError("section-arrow", "endpoints live over different data")
        over = src.over
        phi = over.structure
        g, h = over.total, over.base
        sheaf = src.sheaf
        if not isinstance(beta, CMap):
            beta = CMap(sheaf.total, g.arr_space, beta)
        for gamma in sheaf.total.points:
            b = beta(gamma)
            if g.s(b) != src.sigma(gamma) or g.t(b) != dst.sigma(gamma):
                raise StructureError("section-arrow-endpoints", f"arrow at {gamma!r} has wrong endpoints")
            if h.mul(dst.alpha(gamma), phi.arr(b)) != src.alpha(gamma):
                raise StructureError("section-arrow-triangle", f"cells do not commute at {gamma!r}")
        for gamma in sheaf.total.points:
            for l in h.arrows_from(sheaf.moment(gamma)):
                if beta(sheaf.act(l, gamma)) != beta(gamma):
                    raise StructureError("section-arrow-constant", f"arrow is not constant on the orbit of {gamma!r}")
        self._src = src
        self._dst = dst
        self._beta = beta

    @property
    def src(self):
        return self._src

    @property
    def dst(self):
        return self._dst

    @property
    def beta(self):
        return self._beta

    def __eq__(self, other):
        if not isinstance(other, SectionArrowDatum):
            return NotImplemented
        return self._src == other._src and self._dst == other._dst and self._beta == other._beta

    def __hash__(self):
        return hash((self._src, self._dst, self._beta))


def enumerate_sections(over, u):
    """All local sections over an open, built orbitwise from scratch."""
    over = _as_over(over)
    phi = over.structure
    g, h = over.total, over.base
    m = representable_sheaf(h, u)
    reps = m.orbit_reps()
    candidates = {}
    for rep in reps:
        stab = m.stabilizer_arrows(rep)
        opts = []
        for x in g.objects:
            for r in h.arrows_between(phi.obj(x), m.moment(rep)):
                if all(h.mul(l, r) == r for l in stab):
                    opts.append((x, r))
        candidates[rep] = opts
    out = []
    for choice in itertools.product(*(candidates[rep] for rep in reps)):
        sigma, alpha = {}, {}
        for rep, (x, r) in zip(reps, choice):
            for l in h.arrows_from(m.moment(rep)):
                moved = m.act(l, rep)
                sigma[moved] = x
                alpha[moved] = h.mul(l, r)
        try:
            out.append(SectionDatum(over, m, sigma, alpha))
        except StructureError:
            continue
    out.sort(key=lambda d: (sorted(d.sigma.graph.items()), sorted(d.alpha.graph.items())))
    return out


def enumerate_section_arrows(over, u, data=None):
    """All arrows between local sections over an open."""
    over = _as_over(over)
    phi = over.structure
    g, h = over.total, over.base
    if data is None:
        data = enumerate_sections(over, u)
    out = []
    for src in data:
        for dst in data:
            m = src.sheaf
            reps = m.orbit_reps()
            per_rep = []
            for rep in reps:
                opts = [
                    b
                    for b in g.arrows_between(src.sigma(rep), dst.sigma(rep))
                    if h.mul(dst.alpha(rep), phi.arr(b)) == src.alpha(rep)
                ]
                per_rep.append(opts)
            for choice in itertools.product(*per_rep):
                beta = {}
                for rep, b in zip(reps, choice):
                    for l in h.arrows_from(m.moment(rep)):
                        beta[m.act(l, rep)] = b
                try:
                    out.append(SectionArrowDatum(src, dst, beta))
                except StructureError:
                    continue
    return out


def section_to_object_map(datum, p):
    """A local section determines a point of the stack of sections."""
    graph = {gamma: pair_id(datum.alpha(gamma), datum.sigma(gamma)) for gamma in datum.sheaf.total.points}
    return EquivariantMap(datum.sheaf, p.stack.obj_sheaf, graph)


def object_map_to_section(p, f):
    """A point of the stack of sections determines a local section."""
    sigma = {gamma: p.obj_parts[f(gamma)][1] for gamma in f.dom.total.points}
    alpha = {gamma: p.obj_parts[f(gamma)][0] for gamma in f.dom.total.points}
    return SectionDatum(p.over, f.dom, sigma, alpha)


def arrow_to_arrow_map(datum, p):
    """An arrow of local sections determines an arrow of the stack."""
    graph = {gamma: pair_id(datum.dst.alpha(gamma), datum.beta(gamma)) for gamma in datum.src.sheaf.total.points}
    return EquivariantMap(datum.src.sheaf, p.stack.arr_sheaf, graph)


def arrow_map_to_arrow(p, f):
    """An arrow of the stack determines an arrow of local sections."""
    over = p.over
    phi = over.structure
    g, h = over.total, over.base
    m = f.dom
    decoded = {gamma: p.arr_parts[f(gamma)] for gamma in m.total.points}
    src = SectionDatum(
        over,
        m,
        {gamma: g.s(decoded[gamma][1]) for gamma in m.total.points},
        {gamma: h.mul(decoded[gamma][0], phi.arr(decoded[gamma][1])) for gamma in m.total.points},
    )
    dst = SectionDatum(
        over,
        m,
        {gamma: g.t(decoded[gamma][1]) for gamma in m.total.points},
        {gamma: decoded[gamma][0] for gamma in m.total.points},
    )
    return SectionArrowDatum(src, dst, {gamma: decoded[gamma][1] for gamma in m.total.points})


@dataclass(frozen=True)
class SectionsBijection:
    """Local sections over an open against points of the stack of sections."""

    over: OverGroupoid
    sheaf: EquivariantSheaf
    sections: StackOfSections
    section_data: tuple
    arrow_data: tuple
    object_maps: tuple
    arrow_maps: tuple


def sections_bijection(over, u, p=None):
    """Match local sections with points of the stack, both ways, exactly."""
    over = _as_over(over)
    if p is None:
        p = stack_of_sections(over)
    data = enumerate_sections(over, u)
    arrows = enumerate_section_arrows(over, u, data)
    if data:
        m = data[0].sheaf
    else:
        m = representable_sheaf(over.base, u)
    from .equivariant import hom_point_id

    object_maps = [section_to_object_map(d, p) for d in data]
    arrow_maps = [arrow_to_arrow_map(a, p) for a in arrows]
    homs = equivariant_maps(m, p.stack.obj_sheaf)
    if {hom_point_id(f) for f in object_maps} != {hom_point_id(f) for f in homs} or len(object_maps) != len(homs):
        raise StructureError("sections-bijection", "local sections do not match points of the stack")
    for d, f in zip(data, object_maps):
        if object_map_to_section(p, f) != d:
            raise StructureError("sections-bijection", "object round trip failed")
    arr_homs = equivariant_maps(m, p.stack.arr_sheaf)
    if {hom_point_id(f) for f in arrow_maps} != {hom_point_id(f) for f in arr_homs} or len(arrow_maps) != len(arr_homs):
        raise StructureError("sections-bijection", "section arrows do not match arrows of the stack")
    for a, f in zip(arrows, arrow_maps):
        if arrow_map_to_arrow(p, f) != a:
            raise StructureError("sections-bijection", "arrow round trip failed")
    return SectionsBijection(over, m, p, tuple(data), tuple(arrows), tuple(object_maps), tuple(arrow_maps))


@dataclass(frozen=True)
class SectionsUnitComparison:
    """A sheaf recovered exactly from the stack of sections of its realization."""

    sheaf: EquivariantSheaf
    stack: SheafGroupoid
    retraction: EquivariantMap
    classes: tuple


def sections_unit(e):
    """Collapse the stack of sections of a realized sheaf back onto the sheaf.

    The stack of the realized sheaf has points (h, x); acting with h retracts
    them onto the sheaf, the fibres of the retraction are exactly the internal
    connected classes, and the quotient topology agrees with the sheaf's own.
    """
    p = stack_of_sections(realize_sheaf(e).over)
    k = p.stack
    graph = {o: e.act(h, x) for o, (h, x) in p.obj_parts.items()}
    retraction = EquivariantMap(k.obj_sheaf, e, graph)
    classes = connected_components(k.groupoid)
    fibre_of = {}
    for cls in classes:
        values = {graph[o] for o in cls}
        if len(values) != 1:
            raise StructureError("sections-unit", f"retraction is not constant on the class {sorted(cls)!r}")
        value = values.pop()
        if value in fibre_of:
            raise StructureError("sections-unit", f"two internal classes land on {value!r}")
        fibre_of[value] = cls
    for x in e.total.points:
        if x not in fibre_of:
            raise StructureError("sections-unit", f"no section class lands on {x!r}")
        if p.object_id(e.base.one(e.moment(x)), x) not in fibre_of[x]:
            raise StructureError("sections-unit", f"the unit section over {x!r} lies in the wrong class")
    pairs = []
    for x in e.total.points:
        for y in e.total.points:
            if x != y and any(k.obj_sheaf.total.le(o, q) for o in fibre_of[x] for q in fibre_of[y]):
                pairs.append((x, y))
    if FinSpace(e.total.points, pairs) != e.total:
        raise StructureError("sections-unit", "the quotient topology of the stack differs from the sheaf topology")
    return SectionsUnitComparison(e, k, retraction, tuple(classes))
