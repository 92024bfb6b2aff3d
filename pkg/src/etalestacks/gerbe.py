"""Bouquet and gerbe recognition, with the hidden-symmetry correspondence."""

from dataclasses import dataclass

from .fintop import Decision, FinSpace, StructureError, is_etale, pair_id, tuple_id
from .groups import FiniteGroup
from .groupoid import (
    FinGroupoid,
    GroupoidHom,
    identity_hom,
    is_etale_groupoid,
    is_morita_equivalence,
    unit_groupoid,
    weak_pullback,
)
from .equivariant import SheafGroupoid, is_group_like, stalk
from .action import (
    ActionGroupoidResult,
    CounitEquivalence,
    StackOfSections,
    action_groupoid,
    counit_equivalence,
    stack_of_sections,
)
from .effective import (
    EffectivePart,
    effective_part,
    effective_part_on_hom,
    factor_through_effective,
    ineffective_isotropy,
    is_effective,
    refine_realization,
)


@dataclass(frozen=True)
class Bouquet:
    """A groupoid object whose points cover the base and are joined over it."""

    stack: SheafGroupoid
    onto_objects: Decision
    onto_pairs: Decision


def _as_stack(k):
    return k.stack if isinstance(k, Bouquet) else k


def _onto_objects(k):
    mu0 = k.obj_sheaf.moment
    missing = sorted(set(k.base.objects) - set(mu0.graph.values()))
    if missing:
        return Decision(False, f"the moment map misses base point {missing[0]!r}", witness=missing[0])
    return Decision(True)


def _onto_pairs(k):
    mu0 = k.obj_sheaf.moment
    kk = k.groupoid
    for x in kk.objects:
        for y in kk.objects:
            if mu0(x) == mu0(y) and not kk.arrows_between(x, y):
                return Decision(False, f"no arrow from {x!r} to {y!r} over {mu0(x)!r}", witness=[x, y])
    return Decision(True)


def is_bouquet(k):
    """Moment map onto, and any two points over a common base point joined."""
    k = _as_stack(k)
    onto = _onto_objects(k)
    if not onto.ok:
        return onto
    return _onto_pairs(k)


def as_bouquet(k):
    """Wrap a groupoid object after validating both bouquet conditions."""
    k = _as_stack(k)
    onto = _onto_objects(k)
    pairs = _onto_pairs(k)
    for d in (onto, pairs):
        if not d.ok:
            raise StructureError("bouquet", d.reason)
    return Bouquet(k, onto, pairs)


def is_gerbe_stalkwise(k):
    """Every stalk of the groupoid object is nonempty and connected."""
    k = _as_stack(k)
    for x in k.base.objects:
        d = is_group_like(stalk(k, x).groupoid)
        if not d.ok:
            return Decision(False, f"the stalk at {x!r} is not equivalent to a group: {d.reason}", witness=x)
    return Decision(True)


def is_full(phi):
    """Every arrow between images of objects is itself an image."""
    for x in phi.dom.objects:
        for y in phi.dom.objects:
            for k in phi.cod.arrows_between(phi.obj(x), phi.obj(y)):
                if not any(phi.arr(g) == k for g in phi.dom.arrows_between(x, y)):
                    return Decision(False, f"no arrow from {x!r} to {y!r} maps to {k!r}", witness=[x, y, k])
    return Decision(True)


def presents_gerbe(rho):
    """Whether a hom with etale components presents a gerbe over its codomain."""
    return is_bouquet(stack_of_sections(rho).stack)


@dataclass(frozen=True)
class RealizationComparison:
    """Effective part of a realization identified with a refinement of the base."""

    realization: ActionGroupoidResult
    effective: EffectivePart
    refined: FinGroupoid
    refinement: GroupoidHom
    projection: GroupoidHom
    to_effective: GroupoidHom
    from_effective: GroupoidHom


def ef_of_realization(k):
    """Identify the effective part of a bouquet realization with a base refinement."""
    k = _as_stack(k)
    base = k.base
    d = is_effective(base)
    if not d.ok:
        raise StructureError("realization-effective", f"the base groupoid is not effective: {d.reason}")
    d = is_bouquet(k)
    if not d.ok:
        raise StructureError("realization-bouquet", d.reason)
    realization = action_groupoid(k)
    part = effective_part(realization.groupoid)
    refinement, projection = refine_realization(realization)
    refined = refinement.cod
    mu0 = k.obj_sheaf.moment
    act0 = k.obj_sheaf.act
    kk = k.groupoid
    graph = {}
    for x in kk.objects:
        for y in kk.objects:
            for h in base.arrows_between(mu0(x), mu0(y)):
                moved = act0(h, x)
                classes = {part.projection.arr(pair_id(h, c)) for c in kk.arrows_between(moved, y)}
                if len(classes) != 1:
                    raise StructureError("realization-choice", f"fillers over {h!r} from {x!r} to {y!r} give {len(classes)} classes")
                graph[tuple_id(h, x, y)] = classes.pop()
    to_effective = GroupoidHom(refined, part.groupoid, {x: x for x in refined.objects}, graph)
    from_effective = factor_through_effective(refinement)
    if to_effective.then(from_effective) != identity_hom(refined):
        raise StructureError("realization-inverse", "comparison maps do not compose to the identity on the refinement")
    if from_effective.then(to_effective) != identity_hom(part.groupoid):
        raise StructureError("realization-inverse", "comparison maps do not compose to the identity on the effective part")
    return RealizationComparison(realization, part, refined, refinement, projection, to_effective, from_effective)


@dataclass(frozen=True)
class GerbePresentation:
    """A groupoid realized from the sections of its effective-part projection."""

    total: FinGroupoid
    base: FinGroupoid
    projection: GroupoidHom
    bouquet: Bouquet
    sections: StackOfSections
    counit: CounitEquivalence


def gerbe_from_ineffective(g):
    """Present an etale groupoid as a bouquet realization over its effective part."""
    d = is_etale_groupoid(g)
    if not d.ok:
        raise StructureError("gerbe-etale", f"the groupoid is not etale: {d.reason}")
    part = effective_part(g)
    sections = stack_of_sections(part.projection)
    bouquet = as_bouquet(sections.stack)
    counit = counit_equivalence(part.projection, sections)
    return GerbePresentation(g, part.groupoid, part.projection, bouquet, sections, counit)


@dataclass(frozen=True)
class GerbeDecomposition:
    """Gerbe tests for a hom over its codomain and over the effective part."""

    over_codomain: Decision
    over_effective: Decision
    fullness: Decision


def gerbe_decomposition_check(rho):
    """Split the gerbe test for a hom into an effective-base test plus fullness."""
    for name, f in (("objects", rho.f0), ("arrows", rho.f1)):
        d = is_etale(f)
        if not d.ok:
            raise StructureError("decomposition-etale", f"the map on {name} is not etale: {d.reason}")
    part = effective_part(rho.cod)
    over_codomain = presents_gerbe(rho)
    over_effective = presents_gerbe(rho.then(part.projection))
    fullness = is_full(rho)
    if over_codomain.ok != (over_effective.ok and fullness.ok):
        raise StructureError("decomposition", "gerbe test disagrees with the effective-base test plus fullness")
    if is_effective(rho.cod).ok:
        local = is_morita_equivalence(effective_part_on_hom(rho))
        if over_codomain.ok != local.ok:
            raise StructureError("decomposition-effective", "gerbe test over an effective base disagrees with the local-equivalence test")
    return GerbeDecomposition(over_codomain, over_effective, fullness)


@dataclass(frozen=True)
class IsotropyComparison:
    """Three matching computations of the hidden symmetry group at a point."""

    stalk_group: FiniteGroup
    realization_group: FiniteGroup
    fiber_group: FiniteGroup


def stalk_vs_ineffective_isotropy(k, point):
    """Compare internal, ineffective, and fiber isotropy at a point of a bouquet."""
    k = _as_stack(k)
    base = k.base
    d = is_effective(base)
    if not d.ok:
        raise StructureError("realization-effective", f"the base groupoid is not effective: {d.reason}")
    d = is_bouquet(k)
    if not d.ok:
        raise StructureError("realization-bouquet", d.reason)
    if point not in k.groupoid.objects:
        raise StructureError("isotropy-point", f"unknown point {point!r}")
    internal = k.groupoid.isotropy_group(point)
    realization = action_groupoid(k)
    hidden = ineffective_isotropy(realization.groupoid, point)
    x = k.obj_sheaf.moment(point)
    dot = unit_groupoid(FinSpace([x]))
    incl = GroupoidHom(dot, base, {x: x}, {x: base.one(x)})
    wp = weak_pullback(incl, realization.anchor)
    fiber = wp.groupoid.isotropy_group(wp.object_id(x, point, base.one(x)))
    if not (internal.is_isomorphic_to(hidden) and hidden.is_isomorphic_to(fiber)):
        raise StructureError("stalk-isotropy", f"the three isotropy computations at {point!r} disagree")
    return IsotropyComparison(internal, hidden, fiber)
