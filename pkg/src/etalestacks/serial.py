"""JSON documents for spaces, maps, groupoids, sheaves, and fixture files."""

import json

from .fintop import CMap, FinSpace, StructureError
from .groupoid import FinGroupoid, GroupoidHom, NatTrans
from .equivariant import EquivariantSheaf, SheafGroupoid

SCHEMA_VERSION = 1
SECTIONS = ("spaces", "maps", "groupoids", "homs", "cells", "sheaves", "groupoid_objects")


def _check_keys(doc, required, optional=(), kind="document"):
    if not isinstance(doc, dict):
        raise StructureError("document-keys", f"{kind} must be a JSON object")
    keys = set(doc)
    missing = set(required) - keys
    if missing:
        raise StructureError("document-keys", f"{kind} is missing key {sorted(missing)[0]!r}")
    extra = keys - set(required) - set(optional)
    if extra:
        raise StructureError("document-keys", f"{kind} has unexpected key {sorted(extra)[0]!r}")


def _resolve(table, name, kind):
    if not isinstance(name, str):
        raise StructureError("fixture-reference", f"{kind} reference must be a name, got {name!r}")
    if name not in table:
        raise StructureError("fixture-reference", f"unknown {kind} {name!r}")
    return table[name]


def _graph(doc, key, kind):
    value = doc[key]
    if not isinstance(value, dict):
        raise StructureError("document-keys", f"{kind} field {key!r} must be an object")
    return dict(value)


def space_document(space):
    pairs = [[p, q] for q in space.points for p in space.points if p != q and space.le(p, q)]
    return {"points": list(space.points), "leq": sorted(pairs)}


def parse_space(doc, kind="space"):
    _check_keys(doc, ("points", "leq"), kind=kind)
    pairs = []
    for pair in doc["leq"]:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise StructureError("space-leq", f"leq entries must be pairs, got {pair!r}")
        p, q = pair
        if p == q:
            raise StructureError("space-leq", f"reflexive pair ({p!r},{q!r}) must be omitted")
        pairs.append((p, q))
    space = FinSpace(doc["points"], pairs)
    declared = set(pairs)
    for q in space.points:
        for p in space.points:
            if p != q and space.le(p, q) and (p, q) not in declared:
                raise StructureError("space-closure", f"closure adds the undeclared pair ({p!r},{q!r})")
    return space


def groupoid_document(g):
    doc = space_document(g.obj_space)
    doc["arrows"] = space_document(g.arr_space)
    doc["s"] = dict(sorted(g.source_map.graph.items()))
    doc["t"] = dict(sorted(g.target_map.graph.items()))
    doc["unit"] = dict(sorted(g.unit_map.graph.items()))
    doc["inv"] = dict(sorted(g.inverse_map.graph.items()))
    doc["compose"] = sorted([a, b, v] for (a, b), v in g.composites().items())
    return doc


def parse_groupoid(doc, kind="groupoid"):
    _check_keys(doc, ("points", "leq", "arrows", "s", "t", "unit", "inv", "compose"), kind=kind)
    obj = parse_space({"points": doc["points"], "leq": doc["leq"]}, kind=f"{kind} objects")
    arr = parse_space(doc["arrows"], kind=f"{kind} arrows")
    compose = {}
    for entry in doc["compose"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise StructureError("document-keys", f"compose entries must be triples, got {entry!r}")
        compose[(entry[0], entry[1])] = entry[2]
    return FinGroupoid(obj, arr,
                       CMap(arr, obj, _graph(doc, "s", kind)),
                       CMap(arr, obj, _graph(doc, "t", kind)),
                       CMap(obj, arr, _graph(doc, "unit", kind)),
                       CMap(arr, arr, _graph(doc, "inv", kind)),
                       compose)


def cmap_document(m, dom=None, cod=None):
    return {"dom": dom if dom is not None else space_document(m.dom),
            "cod": cod if cod is not None else space_document(m.cod),
            "map": dict(sorted(m.graph.items()))}


def parse_cmap(doc, spaces=None, kind="map"):
    _check_keys(doc, ("dom", "cod", "map"), kind=kind)
    ends = []
    for key in ("dom", "cod"):
        if isinstance(doc[key], str):
            ends.append(_resolve(spaces or {}, doc[key], "space"))
        else:
            ends.append(parse_space(doc[key], kind=f"{kind} {key}"))
    return CMap(ends[0], ends[1], _graph(doc, "map", kind))


def hom_document(phi, dom, cod):
    return {"dom": dom, "cod": cod,
            "f0": dict(sorted(phi.f0.graph.items())),
            "f1": dict(sorted(phi.f1.graph.items()))}


def parse_hom(doc, groupoids, kind="hom"):
    _check_keys(doc, ("dom", "cod", "f0", "f1"), kind=kind)
    dom = _resolve(groupoids, doc["dom"], "groupoid")
    cod = _resolve(groupoids, doc["cod"], "groupoid")
    return GroupoidHom(dom, cod, _graph(doc, "f0", kind), _graph(doc, "f1", kind))


def cell_document(alpha, src, dst):
    return {"src": src, "dst": dst, "component": dict(sorted(alpha.component.graph.items()))}


def parse_cell(doc, homs, kind="cell"):
    _check_keys(doc, ("src", "dst", "component"), kind=kind)
    src = _resolve(homs, doc["src"], "hom")
    dst = _resolve(homs, doc["dst"], "hom")
    return NatTrans(src, dst, _graph(doc, "component", kind))


def sheaf_document(sheaf, base):
    return {"base": base,
            "total": space_document(sheaf.total),
            "moment": dict(sorted(sheaf.moment.graph.items())),
            "action": sorted([g, e, v] for (g, e), v in sheaf.action.items())}


def parse_sheaf(doc, groupoids, kind="sheaf"):
    _check_keys(doc, ("base", "total", "moment", "action"), kind=kind)
    base = _resolve(groupoids, doc["base"], "groupoid")
    total = parse_space(doc["total"], kind=f"{kind} total")
    action = {}
    for entry in doc["action"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise StructureError("document-keys", f"action entries must be triples, got {entry!r}")
        action[(entry[0], entry[1])] = entry[2]
    return EquivariantSheaf(base, total, _graph(doc, "moment", kind), action)


def groupoid_object_document(k, base, objects, arrows):
    g = k.groupoid
    return {"base": base, "objects": objects, "arrows": arrows,
            "s": dict(sorted(g.source_map.graph.items())),
            "t": dict(sorted(g.target_map.graph.items())),
            "unit": dict(sorted(g.unit_map.graph.items())),
            "inv": dict(sorted(g.inverse_map.graph.items())),
            "compose": sorted([a, b, v] for (a, b), v in g.composites().items())}


def parse_groupoid_object(doc, groupoids, sheaves, kind="groupoid object"):
    _check_keys(doc, ("base", "objects", "arrows", "s", "t", "unit", "inv", "compose"), kind=kind)
    base = _resolve(groupoids, doc["base"], "groupoid")
    obj_sheaf = _resolve(sheaves, doc["objects"], "sheaf")
    arr_sheaf = _resolve(sheaves, doc["arrows"], "sheaf")
    compose = {}
    for entry in doc["compose"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise StructureError("document-keys", f"compose entries must be triples, got {entry!r}")
        compose[(entry[0], entry[1])] = entry[2]
    g = FinGroupoid(obj_sheaf.total, arr_sheaf.total,
                    CMap(arr_sheaf.total, obj_sheaf.total, _graph(doc, "s", kind)),
                    CMap(arr_sheaf.total, obj_sheaf.total, _graph(doc, "t", kind)),
                    CMap(obj_sheaf.total, arr_sheaf.total, _graph(doc, "unit", kind)),
                    CMap(arr_sheaf.total, arr_sheaf.total, _graph(doc, "inv", kind)),
                    compose)
    return SheafGroupoid(base, g, obj_sheaf, arr_sheaf)


class Fixture:
    """A named world of documents that reference each other by name."""

    __slots__ = ("spaces", "maps", "groupoids", "homs", "cells", "sheaves", "groupoid_objects")

    def __init__(self, spaces=None, maps=None, groupoids=None, homs=None,
                 cells=None, sheaves=None, groupoid_objects=None):
        self.spaces = dict(spaces or {})
        self.maps = dict(maps or {})
        self.groupoids = dict(groupoids or {})
        self.homs = dict(homs or {})
        self.cells = dict(cells or {})
        self.sheaves = dict(sheaves or {})
        self.groupoid_objects = dict(groupoid_objects or {})

    def section(self, kind):
        if kind not in SECTIONS:
            raise StructureError("fixture-reference", f"unknown section {kind!r}")
        return getattr(self, kind)

    def _name_of(self, kind, value):
        for name in sorted(self.section(kind)):
            if self.section(kind)[name] == value:
                return name
        raise StructureError("fixture-reference", f"no named {kind} entry matches {value!r}")

    def document(self):
        doc = {"schema": SCHEMA_VERSION}
        if self.spaces:
            doc["spaces"] = {n: space_document(s) for n, s in sorted(self.spaces.items())}
        if self.maps:
            doc["maps"] = {n: cmap_document(m, self._name_of("spaces", m.dom), self._name_of("spaces", m.cod))
                           for n, m in sorted(self.maps.items())}
        if self.groupoids:
            doc["groupoids"] = {n: groupoid_document(g) for n, g in sorted(self.groupoids.items())}
        if self.homs:
            doc["homs"] = {n: hom_document(p, self._name_of("groupoids", p.dom), self._name_of("groupoids", p.cod))
                           for n, p in sorted(self.homs.items())}
        if self.cells:
            doc["cells"] = {n: cell_document(a, self._name_of("homs", a.src), self._name_of("homs", a.dst))
                            for n, a in sorted(self.cells.items())}
        if self.sheaves:
            doc["sheaves"] = {n: sheaf_document(s, self._name_of("groupoids", s.base))
                              for n, s in sorted(self.sheaves.items())}
        if self.groupoid_objects:
            doc["groupoid_objects"] = {n: groupoid_object_document(k, self._name_of("groupoids", k.base),
                                                                   self._name_of("sheaves", k.obj_sheaf),
                                                                   self._name_of("sheaves", k.arr_sheaf))
                                       for n, k in sorted(self.groupoid_objects.items())}
        return doc

    def dumps(self):
        return json.dumps(self.document(), indent=2, sort_keys=True)


def parse_fixture(doc):
    _check_keys(doc, ("schema",), SECTIONS, kind="fixture")
    if doc["schema"] != SCHEMA_VERSION:
        raise StructureError("fixture-schema", f"unsupported schema {doc['schema']!r}, expected {SCHEMA_VERSION}")
    fixture = Fixture()
    for kind in SECTIONS:
        section = doc.get(kind, {})
        if not isinstance(section, dict):
            raise StructureError("document-keys", f"section {kind!r} must be an object")
        for name in sorted(section):
            entry = section[name]
            label = f"{kind}[{name}]"
            if kind == "spaces":
                fixture.spaces[name] = parse_space(entry, kind=label)
            elif kind == "maps":
                fixture.maps[name] = parse_cmap(entry, fixture.spaces, kind=label)
            elif kind == "groupoids":
                fixture.groupoids[name] = parse_groupoid(entry, kind=label)
            elif kind == "homs":
                fixture.homs[name] = parse_hom(entry, fixture.groupoids, kind=label)
            elif kind == "cells":
                fixture.cells[name] = parse_cell(entry, fixture.homs, kind=label)
            elif kind == "sheaves":
                fixture.sheaves[name] = parse_sheaf(entry, fixture.groupoids, kind=label)
            else:
                fixture.groupoid_objects[name] = parse_groupoid_object(entry, fixture.groupoids, fixture.sheaves, kind=label)
    return fixture


def loads_fixture(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise StructureError("fixture-json", str(err)) from None
    return parse_fixture(doc)


def load_fixture(path):
    with open(path, "r", encoding="utf-8") as handle:
        return loads_fixture(handle.read())
