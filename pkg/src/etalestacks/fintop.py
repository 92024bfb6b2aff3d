"""Finite topological spaces encoded as specialization preorders.

A finite space is a set of point ids with a reflexive transitive relation
``p <= q`` meaning "p lies in every open set containing q".  Open sets are
exactly the down-closed subsets, the minimal open neighborhood of q is the
principal down-set of q, and continuity of a function is the same thing as
monotonicity.  Everything downstream (etale maps, open maps, germs, fibered
products) is decided by finite enumeration on this encoding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class StructureError(ValueError):
    """A value failed one of its defining invariants.

    ``invariant`` is a short stable name for the first violated law, so
    loaders and the CLI can report exactly which equation broke.
    """

    def __init__(self, invariant, detail):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"{invariant}: {detail}")


@dataclass(frozen=True)
class Decision:
    """Outcome of a decidable check, with evidence either way.

    ``certificate`` carries positive evidence (restrictions, sections,
    bijections); ``witness`` carries a counterexample.  Truthiness is ``ok``.
    """

    ok: bool
    reason: str = ""
    witness: object = None
    certificate: object = None

    def __bool__(self):
        return self.ok

    def expect(self, context="check"):
        if not self.ok:
            raise StructureError(context, self.reason)
        return self

    def to_json(self):
        out = {"ok": self.ok}
        if self.reason:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        return out


def _jsonable(value):
    if isinstance(value, (str, int, bool, float)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in value]
        if isinstance(value, (set, frozenset)):
            items.sort(key=str)
        return items
    return str(value)


def check_point_id(pid):
    """Reject ids that would make composite ids (pairs, germs) ambiguous."""
    if not isinstance(pid, str) or pid == "":
        raise StructureError("point-id", f"point ids must be nonempty strings, got {pid!r}")
    depth = 0
    for ch in pid:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise StructureError("point-id", f"unbalanced brackets in {pid!r}")
        elif ch in ",;|" and depth == 0:
            raise StructureError("point-id", f"separator {ch!r} at top level in {pid!r}")
        elif ch.isspace():
            raise StructureError("point-id", f"whitespace in {pid!r}")
    if depth != 0:
        raise StructureError("point-id", f"unbalanced brackets in {pid!r}")
    return pid


def pair_id(x, y):
    return f"({x},{y})"


def tuple_id(*parts):
    return "(" + ",".join(parts) + ")"


class FinSpace:
    """A finite topological space, as a preorder of specialization."""

    __slots__ = ("_points", "_down", "_hash")

    def __init__(self, points, leq=()):
        pts = []
        seen = set()
        for p in points:
            check_point_id(p)
            if p not in seen:
                seen.add(p)
                pts.append(p)
        pts.sort()
        down = {p: {p} for p in pts}
        for p, q in leq:
            if p not in seen or q not in seen:
                raise StructureError("leq-points", f"pair ({p!r},{q!r}) mentions an unknown point")
            down[q].add(p)
        # reflexive-transitive closure by reachability along the declared pairs
        closed = {}
        for q in pts:
            reach = set()
            stack = [q]
            while stack:
                a = stack.pop()
                if a in reach:
                    continue
                reach.add(a)
                stack.extend(down[a] - reach)
            closed[q] = frozenset(reach)
        self._points = tuple(pts)
        self._down = closed
        self._hash = hash((self._points, tuple(sorted((q, tuple(sorted(d))) for q, d in closed.items()))))

    @property
    def points(self):
        return self._points

    def __contains__(self, p):
        return p in self._down

    def __len__(self):
        return len(self._points)

    def le(self, p, q):
        """p <= q, i.e. p lies in every open set containing q."""
        return p in self._down[q]

    def down_set(self, q):
        """Carrier of the minimal open neighborhood of q."""
        if q not in self._down:
            raise StructureError("point", f"unknown point {q!r}")
        return self._down[q]

    def minimal_open(self, q):
        return OpenSet(self, self.down_set(q))

    def down_closure(self, carrier):
        out = set()
        for q in carrier:
            out |= self.down_set(q)
        return frozenset(out)

    def is_down_closed(self, carrier):
        carrier = frozenset(carrier)
        return all(self._down[q] <= carrier for q in carrier)

    def pairs(self):
        """All related pairs (p, q) with p <= q, deterministically ordered."""
        for q in self._points:
            for p in sorted(self._down[q]):
                yield (p, q)

    def nonreflexive_pairs(self):
        return [(p, q) for p, q in self.pairs() if p != q]

    def opens(self):
        """Every open set, smallest first.  Exponential; guarded for size."""
        if len(self._points) > 16:
            raise StructureError("opens-enumeration", f"space has {len(self._points)} points; refusing to enumerate 2**n subsets")
        out = []
        for r in range(len(self._points) + 1):
            for sub in itertools.combinations(self._points, r):
                if self.is_down_closed(sub):
                    out.append(OpenSet(self, sub))
        return out

    def subspace(self, carrier):
        carrier = frozenset(carrier)
        for p in carrier:
            if p not in self._down:
                raise StructureError("subspace", f"unknown point {p!r}")
        pairs = [(p, q) for q in carrier for p in self._down[q] if p in carrier]
        return FinSpace(sorted(carrier), pairs)

    def __eq__(self, other):
        if not isinstance(other, FinSpace):
            return NotImplemented
        return self._points == other._points and self._down == other._down

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FinSpace({len(self._points)} points)"


class OpenSet:
    """A down-closed subset of a finite space."""

    __slots__ = ("_space", "_carrier")

    def __init__(self, space, carrier):
        carrier = frozenset(carrier)
        for q in carrier:
            if q not in space:
                raise StructureError("open-set", f"unknown point {q!r}")
            missing = space.down_set(q) - carrier
            if missing:
                raise StructureError("open-set", f"not down-closed: {q!r} is in the carrier but {sorted(missing)[0]!r} <= {q!r} is not")
        self._space = space
        self._carrier = carrier

    @property
    def space(self):
        return self._space

    @property
    def carrier(self):
        return self._carrier

    @property
    def points(self):
        return tuple(sorted(self._carrier))

    def as_space(self):
        return self._space.subspace(self._carrier)

    def inclusion(self):
        return CMap(self.as_space(), self._space, {p: p for p in self._carrier})

    def __contains__(self, p):
        return p in self._carrier

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self._carrier)

    def __le__(self, other):
        return self._space == other._space and self._carrier <= other._carrier

    def __eq__(self, other):
        if not isinstance(other, OpenSet):
            return NotImplemented
        return self._space == other._space and self._carrier == other._carrier

    def __hash__(self):
        return hash((self._space, self._carrier))

    def __repr__(self):
        return f"OpenSet({sorted(self._carrier)})"


class CMap:
    """A continuous map of finite spaces; continuity is monotonicity."""

    __slots__ = ("_dom", "_cod", "_graph")

    def __init__(self, dom, cod, graph):
        graph = dict(graph)
        missing = set(dom.points) - set(graph)
        if missing:
            raise StructureError("map-total", f"no value for point {sorted(missing)[0]!r}")
        extra = set(graph) - set(dom.points)
        if extra:
            raise StructureError("map-total", f"value declared for unknown point {sorted(extra)[0]!r}")
        for p, v in graph.items():
            if v not in cod:
                raise StructureError("map-codomain", f"f({p!r}) = {v!r} is not a point of the codomain")
        for q in dom.points:
            fq = graph[q]
            for p in dom.down_set(q):
                if not cod.le(graph[p], fq):
                    raise StructureError("map-continuous", f"{p!r} <= {q!r} but f({p!r}) = {graph[p]!r} is not <= f({q!r}) = {fq!r}")
        self._dom = dom
        self._cod = cod
        self._graph = graph

    @property
    def dom(self):
        return self._dom

    @property
    def cod(self):
        return self._cod

    @property
    def graph(self):
        return dict(self._graph)

    def __call__(self, p):
        try:
            return self._graph[p]
        except KeyError:
            raise StructureError("point", f"unknown point {p!r}") from None

    def then(self, other):
        """Composite "first self, then other"."""
        if other._dom != self._cod:
            raise StructureError("map-compose", "codomain/domain mismatch")
        return CMap(self._dom, other._cod, {p: other._graph[v] for p, v in self._graph.items()})

    def restrict(self, opens):
        sub = opens.as_space()
        return CMap(sub, self._cod, {p: self._graph[p] for p in sub.points})

    def image(self, carrier=None):
        if carrier is None:
            carrier = self._dom.points
        return frozenset(self._graph[p] for p in carrier)

    def is_surjective(self):
        return self.image() == frozenset(self._cod.points)

    def is_injective(self):
        return len(self.image()) == len(self._dom.points)

    def __eq__(self, other):
        if not isinstance(other, CMap):
            return NotImplemented
        return self._dom == other._dom and self._cod == other._cod and self._graph == other._graph

    def __hash__(self):
        return hash((self._dom, self._cod, tuple(sorted(self._graph.items()))))

    def __repr__(self):
        return f"CMap({self._graph})"


def identity_map(space):
    return CMap(space, space, {p: p for p in space.points})


def constant_map(dom, cod, value):
    return CMap(dom, cod, {p: value for p in dom.points})


def minimal_open(space, p):
    return space.minimal_open(p)


def is_etale(f):
    """Decide local homeomorphism: an order-isomorphism on every minimal open.

    The certificate records, per point p, the restriction of f as a bijection
    from the minimal open of p onto the minimal open of f(p).
    """
    cert = {}
    for p in f.dom.points:
        dn = f.dom.down_set(p)
        fp = f(p)
        target = f.cod.down_set(fp)
        restriction = {q: f(q) for q in dn}
        if len(set(restriction.values())) != len(dn):
            pts = sorted(dn)
            return Decision(False, f"not injective near {p!r}", witness={"point": p, "restriction": {q: restriction[q] for q in pts}})
        if set(restriction.values()) != target:
            return Decision(False, f"minimal open of {p!r} does not cover the minimal open of {fp!r}", witness={"point": p, "missing": sorted(target - set(restriction.values()))})
        # continuity gives order preservation; an iso must also reflect order
        for a in dn:
            for b in dn:
                if f.cod.le(restriction[a], restriction[b]) and not f.dom.le(a, b):
                    return Decision(False, f"order not reflected near {p!r}", witness={"point": p, "pair": [a, b]})
        cert[p] = restriction
    return Decision(True, certificate=cert)


def is_open_map(f):
    """Decide openness: image of each minimal open is down-closed.

    Images commute with unions and every open is a union of minimal opens,
    so checking minimal opens decides all opens.
    """
    for p in f.dom.points:
        img = f.image(f.dom.down_set(p))
        if not f.cod.is_down_closed(img):
            below = f.cod.down_closure(img) - img
            return Decision(False, f"image of the minimal open of {p!r} is not open", witness={"point": p, "missing": sorted(below)[0]})
    return Decision(True)


@dataclass(frozen=True)
class Pullback:
    space: FinSpace
    pr1: CMap
    pr2: CMap

    def __iter__(self):
        return iter((self.space, self.pr1, self.pr2))


def fibered_product(f, g):
    """Pullback of f: X -> Z against g: Y -> Z, ordered componentwise."""
    if f.cod != g.cod:
        raise StructureError("fibered-product", "maps must share a codomain")
    pts = []
    back = {}
    for x in f.dom.points:
        for y in g.dom.points:
            if f(x) == g(y):
                pid = pair_id(x, y)
                pts.append(pid)
                back[pid] = (x, y)
    pairs = []
    for a in pts:
        xa, ya = back[a]
        for b in pts:
            xb, yb = back[b]
            if f.dom.le(xa, xb) and g.dom.le(ya, yb):
                pairs.append((a, b))
    space = FinSpace(pts, pairs)
    pr1 = CMap(space, f.dom, {p: back[p][0] for p in pts})
    pr2 = CMap(space, g.dom, {p: back[p][1] for p in pts})
    return Pullback(space, pr1, pr2)


def disjoint_union(parts):
    """Coproduct of named spaces; points are tagged pairs (tag, point)."""
    pts = []
    pairs = []
    inclusions = {}
    for tag, space in parts.items():
        check_point_id(tag)
        for p in space.points:
            pts.append(pair_id(tag, p))
        pairs.extend((pair_id(tag, p), pair_id(tag, q)) for p, q in space.pairs())
    total = FinSpace(pts, pairs)
    for tag, space in parts.items():
        inclusions[tag] = CMap(space, total, {p: pair_id(tag, p) for p in space.points})
    return total, inclusions


class Germ:
    """Germ at a point of a locally defined open embedding of one space.

    Stored as the base point together with the full restriction of the map to
    the minimal open of the base; two locally defined maps have the same germ
    exactly when those restrictions agree.
    """

    __slots__ = ("_space", "_base", "_restriction", "_id")

    def __init__(self, space, base, restriction):
        if base not in space:
            raise StructureError("germ", f"unknown base point {base!r}")
        dn = space.down_set(base)
        restriction = dict(restriction)
        if set(restriction) != dn:
            raise StructureError("germ", f"restriction domain must be exactly the minimal open of {base!r}")
        target = restriction[base]
        if target not in space:
            raise StructureError("germ", f"unknown target point {target!r}")
        values = set(restriction.values())
        if len(values) != len(dn):
            raise StructureError("germ", f"restriction at {base!r} is not injective")
        if values != space.down_set(target):
            raise StructureError("germ", f"restriction at {base!r} is not onto the minimal open of {target!r}")
        for a in dn:
            for b in dn:
                if space.le(a, b) != space.le(restriction[a], restriction[b]):
                    raise StructureError("germ", f"restriction at {base!r} is not an order isomorphism at ({a!r},{b!r})")
        self._space = space
        self._base = base
        self._restriction = restriction
        body = ";".join(f"{p}>{restriction[p]}" for p in sorted(dn))
        self._id = f"[{base}|{body}]"

    @property
    def space(self):
        return self._space

    @property
    def base(self):
        return self._base

    @property
    def target(self):
        return self._restriction[self._base]

    @property
    def restriction(self):
        return dict(self._restriction)

    @property
    def id(self):
        return self._id

    def __call__(self, p):
        return self._restriction[p]

    def then(self, other):
        """Composite germ "first self, then other" (self.target = other.base)."""
        if other._space != self._space or other._base != self.target:
            raise StructureError("germ-compose", "germs not composable")
        return Germ(self._space, self._base, {p: other._restriction[v] for p, v in self._restriction.items()})

    def inverse(self):
        return Germ(self._space, self.target, {v: p for p, v in self._restriction.items()})

    def restrict_to(self, z):
        """The germ at z of the same locally defined map, for z <= base."""
        if not self._space.le(z, self._base):
            raise StructureError("germ-restrict", f"{z!r} is not in the minimal open of {self._base!r}")
        return Germ(self._space, z, {p: self._restriction[p] for p in self._space.down_set(z)})

    def __eq__(self, other):
        if not isinstance(other, Germ):
            return NotImplemented
        return self._space == other._space and self._base == other._base and self._restriction == other._restriction

    def __hash__(self):
        return hash((self._space, self._base, tuple(sorted(self._restriction.items()))))

    def __repr__(self):
        return f"Germ({self._id})"


def identity_germ(space, p):
    return Germ(space, p, {q: q for q in space.down_set(p)})


def germ_of(f, p, over=None):
    """Germ at p of a map f defined on an open subspace of its codomain.

    f.dom must be (the subspace on) an open carrier of f.cod, or ``over``
    names the open set to restrict to first.  Rejects inputs that are not
    open embeddings near p.
    """
    if over is not None:
        f = f.restrict(over)
    space = f.cod
    carrier = frozenset(f.dom.points)
    for q in carrier:
        if q not in space:
            raise StructureError("germ-domain", f"domain point {q!r} is not a point of the ambient space")
    if not space.is_down_closed(carrier):
        raise StructureError("germ-domain", "domain carrier is not open in the ambient space")
    if space.subspace(carrier) != f.dom:
        raise StructureError("germ-domain", "domain order does not match the subspace order")
    if p not in carrier:
        raise StructureError("germ-domain", f"base point {p!r} is not in the domain")
    return Germ(space, p, {q: f(q) for q in space.down_set(p)})


def order_isomorphisms(space, source, target, sending=None):
    """All order-isomorphisms between two subsets of one space.

    ``sending`` optionally pins (point, image) pairs.  Brute force over
    bijections; callers keep the subsets small (minimal opens).
    """
    source = sorted(source)
    target = sorted(target)
    if len(source) != len(target):
        return []
    pinned = dict(sending or ())
    out = []
    for perm in itertools.permutations(target):
        candidate = dict(zip(source, perm))
        if any(candidate.get(p) != v for p, v in pinned.items()):
            continue
        if all(space.le(candidate[a], candidate[b]) == space.le(a, b) for a in source for b in source):
            out.append(candidate)
    return out


def all_germs(space):
    """Every germ of a locally defined open embedding, deterministically ordered."""
    out = []
    for x in space.points:
        dn = space.down_set(x)
        for y in space.points:
            for iso in order_isomorphisms(space, dn, space.down_set(y), sending=[(x, y)]):
                out.append(Germ(space, x, iso))
    out.sort(key=lambda g: g.id)
    return out
