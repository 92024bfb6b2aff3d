"""Small finite groups: multiplication tables, isomorphism testing.

Used for building one-object groupoids and translation groupoids, and for
comparing isotropy groups.  Elements are opaque strings.
"""

from __future__ import annotations

import itertools

from .fintop import StructureError


class FiniteGroup:
    """A finite group given by its multiplication table."""

    __slots__ = ("_elements", "_mul", "_unit", "_inv")

    def __init__(self, elements, mul):
        elements = tuple(sorted(set(elements)))
        mul = dict(mul)
        for a in elements:
            for b in elements:
                if (a, b) not in mul:
                    raise StructureError("group-total", f"no product for ({a!r},{b!r})")
                if mul[(a, b)] not in elements:
                    raise StructureError("group-closed", f"{a!r}*{b!r} = {mul[(a, b)]!r} is not an element")
        for a in elements:
            for b in elements:
                for c in elements:
                    if mul[(mul[(a, b)], c)] != mul[(a, mul[(b, c)])]:
                        raise StructureError("group-associative", f"({a!r}*{b!r})*{c!r} != {a!r}*({b!r}*{c!r})")
        unit = None
        for e in elements:
            if all(mul[(e, a)] == a and mul[(a, e)] == a for a in elements):
                unit = e
                break
        if unit is None:
            raise StructureError("group-unit", "no two-sided unit")
        inv = {}
        for a in elements:
            for b in elements:
                if mul[(a, b)] == unit and mul[(b, a)] == unit:
                    inv[a] = b
                    break
            else:
                raise StructureError("group-inverse", f"no inverse for {a!r}")
        self._elements = elements
        self._mul = mul
        self._unit = unit
        self._inv = inv

    @property
    def elements(self):
        return self._elements

    @property
    def unit(self):
        return self._unit

    def mul(self, a, b):
        return self._mul[(a, b)]

    def inv(self, a):
        return self._inv[a]

    def order_of(self, a):
        n, x = 1, a
        while x != self._unit:
            x = self.mul(x, a)
            n += 1
        return n

    def __len__(self):
        return len(self._elements)

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self._elements == other._elements and self._mul == other._mul

    def __hash__(self):
        return hash((self._elements, tuple(sorted(self._mul.items()))))

    def is_isomorphic_to(self, other):
        if len(self) != len(other):
            return False
        profile = sorted(self.order_of(a) for a in self._elements)
        if profile != sorted(other.order_of(a) for a in other._elements):
            return False
        mine = self._elements
        # backtracking over candidate images, pruned by element order
        candidates = {a: [b for b in other._elements if other.order_of(b) == self.order_of(a)] for a in mine}

        def extend(assign, idx):
            if idx == len(mine):
                return True
            a = mine[idx]
            for b in candidates[a]:
                if b in assign.values():
                    continue
                assign[a] = b
                ok = True
                for c, d in list(assign.items()):
                    if self.mul(a, c) in assign and assign[self.mul(a, c)] != other.mul(b, d):
                        ok = False
                        break
                    if self.mul(c, a) in assign and assign[self.mul(c, a)] != other.mul(d, b):
                        ok = False
                        break
                if ok and extend(assign, idx + 1):
                    return True
                del assign[a]
            return False

        return extend({}, 0)


def cyclic_group(n, names=None):
    """Z/n with default element names e, g, g2, ..."""
    if names is None:
        names = ["e"] + [f"g{i}" if i > 1 else "g" for i in range(1, n)]
    mul = {}
    for i in range(n):
        for j in range(n):
            mul[(names[i], names[j])] = names[(i + j) % n]
    return FiniteGroup(names, mul)


def klein_four_group():
    names = ["e", "a", "b", "c"]
    table = {
        ("e", "e"): "e", ("e", "a"): "a", ("e", "b"): "b", ("e", "c"): "c",
        ("a", "e"): "a", ("a", "a"): "e", ("a", "b"): "c", ("a", "c"): "b",
        ("b", "e"): "b", ("b", "a"): "c", ("b", "b"): "e", ("b", "c"): "a",
        ("c", "e"): "c", ("c", "a"): "b", ("c", "b"): "a", ("c", "c"): "e",
    }
    return FiniteGroup(names, table)


def symmetric_group_3():
    perms = list(itertools.permutations((0, 1, 2)))
    name = {p: "s" + "".join(str(i) for i in p) for p in perms}
    mul = {}
    for p in perms:
        for q in perms:
            comp = tuple(p[q[i]] for i in range(3))
            mul[(name[p], name[q])] = name[comp]
    return FiniteGroup(name.values(), mul)


def group_from_arrows(elements, compose, unit_element):
    """Group structure extracted from a set of mutually composable arrows."""
    mul = {(a, b): compose(a, b) for a in elements for b in elements}
    g = FiniteGroup(elements, mul)
    if g.unit != unit_element:
        raise StructureError("group-unit", f"expected unit {unit_element!r}, found {g.unit!r}")
    return g
