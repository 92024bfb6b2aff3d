"""Shared brute-force oracles and tiny enumerators for the test suite.

Everything here recomputes expected values by exhaustive enumeration over
opens / functions / arrows, independently of the library's own algorithms,
so frozen expected values in the tests are cross-checked rather than assumed.
"""

from __future__ import annotations

import itertools

from etalestacks.fintop import CMap, FinSpace


def oracle_opens(space):
    """Topology rebuilt from scratch: all unions of principal down-sets."""
    basis = [frozenset(space.down_set(p)) for p in space.points]
    out = {frozenset()}
    for r in range(1, len(basis) + 1):
        for combo in itertools.combinations(basis, r):
            u = frozenset().union(*combo)
            out.add(u)
    return out


def oracle_minimal_open(space, p):
    return frozenset.intersection(*[u for u in oracle_opens(space) if p in u])


def oracle_is_open_map(f):
    opens = oracle_opens(f.dom)
    cod_opens = oracle_opens(f.cod)
    return all(f.image(u) in cod_opens for u in opens)


def oracle_is_etale(f):
    """Local homeomorphism by quantifying over all open neighborhoods."""
    dom_opens = oracle_opens(f.dom)
    cod_opens = oracle_opens(f.cod)
    for p in f.dom.points:
        good = False
        for u in dom_opens:
            if p not in u:
                continue
            img = f.image(u)
            if img not in cod_opens or len(img) != len(u):
                continue
            # openness of the restriction: images of relatively open subsets open
            if all(f.image(v & u) in cod_opens for v in dom_opens):
                good = True
                break
        if not good:
            return False
    return True


def all_cmaps(dom, cod):
    """Every continuous map dom -> cod, by filtering all functions."""
    pts = dom.points
    out = []
    for values in itertools.product(cod.points, repeat=len(pts)):
        graph = dict(zip(pts, values))
        if all(cod.le(graph[p], graph[q]) for q in pts for p in dom.down_set(q)):
            out.append(CMap(dom, cod, graph))
    return out


def all_preorders(names):
    """Every reflexive-transitive relation on the given points."""
    names = list(names)
    offdiag = [(p, q) for p in names for q in names if p != q]
    out = []
    for bits in itertools.product((False, True), repeat=len(offdiag)):
        rel = {pair for pair, bit in zip(offdiag, bits) if bit}
        closed = all((a, d) in rel or a == d for a, b in rel for c, d in rel if b == c)
        if closed:
            out.append(FinSpace(names, sorted(rel)))
    return out
