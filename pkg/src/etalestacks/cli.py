"""Command line interface over fixture files: check, compute, verify."""

import argparse
import json

from .action import action_groupoid, realize_representable, stack_of_sections
from .corpus import SUITES, run_verify
from .effective import effective_part, haefliger, ineffective_isotropy, is_effective
from .equivariant import stalk
from .fintop import StructureError, is_etale
from .gerbe import ef_of_realization, gerbe_from_ineffective, is_bouquet, is_full, is_gerbe_stalkwise, presents_gerbe
from .gets import GerbedObject, theta, xi
from .groupoid import cech_groupoid, is_etale_groupoid, is_morita_equivalence, weak_pullback
from .serial import Fixture, groupoid_document, load_fixture

CHECK_PROPERTIES = ("etale", "effective", "morita", "bouquet", "gerbe", "full")
COMPUTE_OPERATIONS = (
    "haefliger", "effective-part", "action-groupoid", "sections", "cech", "pullback",
    "stalk", "realize-representable", "theta", "xi", "gerbe-from-ineffective",
    "ef-of-realization", "ineffective-isotropy")


def _pick(fixture, kind, name, flag):
    section = fixture.section(kind)
    if name is None:
        if len(section) == 1:
            return next(iter(section.values()))
        raise StructureError("cli-argument", f"pass {flag} to choose among {sorted(section)!r}")
    if name not in section:
        raise StructureError("fixture-reference", f"no {kind[:-1]} named {name!r}")
    return section[name]


def _plain(value):
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if value is None or isinstance(value, (str, int, bool)):
        return value
    return repr(value)


def _require(value, flag):
    if value is None:
        raise StructureError("cli-argument", f"this operation needs {flag}")
    return value


def run_check(args, fixture):
    prop = args.property
    if prop == "etale":
        if args.map:
            decision = is_etale(_pick(fixture, "maps", args.map, "--map"))
        else:
            decision = is_etale_groupoid(_pick(fixture, "groupoids", args.groupoid, "--groupoid"))
    elif prop == "effective":
        decision = is_effective(_pick(fixture, "groupoids", args.groupoid, "--groupoid"))
    elif prop == "morita":
        decision = is_morita_equivalence(_pick(fixture, "homs", args.hom, "--hom"))
    elif prop == "bouquet":
        decision = is_bouquet(_pick(fixture, "groupoid_objects", args.object, "--object"))
    elif prop == "gerbe":
        if args.hom:
            decision = presents_gerbe(_pick(fixture, "homs", args.hom, "--hom"))
        else:
            decision = is_gerbe_stalkwise(_pick(fixture, "groupoid_objects", args.object, "--object"))
    else:
        decision = is_full(_pick(fixture, "homs", args.hom, "--hom"))
    out = {prop: bool(decision.ok)}
    if decision.witness is not None:
        out["witness"] = _plain(decision.witness)
    return out, 0 if decision.ok else 1


def run_compute(args, fixture):
    op = args.operation
    if op == "haefliger":
        space = _pick(fixture, "spaces", args.space, "--space")
        return groupoid_document(haefliger(space)), 0
    if op == "effective-part":
        g = _pick(fixture, "groupoids", args.groupoid, "--groupoid")
        return groupoid_document(effective_part(g).groupoid), 0
    if op == "action-groupoid":
        k = _pick(fixture, "groupoid_objects", args.object, "--object")
        ag = action_groupoid(k)
        return Fixture(groupoids={"base": k.base, "result": ag.groupoid},
                       homs={"anchor": ag.anchor}).document(), 0
    if op == "sections":
        phi = _pick(fixture, "homs", args.hom, "--hom")
        st = stack_of_sections(phi).stack
        return Fixture(groupoids={"base": st.base},
                       sheaves={"objects": st.obj_sheaf, "arrows": st.arr_sheaf},
                       groupoid_objects={"sections": st}).document(), 0
    if op == "cech":
        g = _pick(fixture, "groupoids", args.groupoid, "--groupoid")
        cover = _pick(fixture, "maps", args.map, "--map")
        refined, projection = cech_groupoid(g, cover)
        return Fixture(groupoids={"base": g, "refined": refined},
                       homs={"projection": projection}).document(), 0
    if op == "pullback":
        phi = _pick(fixture, "homs", args.hom, "--hom")
        psi = _pick(fixture, "homs", args.against, "--against")
        wp = weak_pullback(phi, psi)
        return Fixture(groupoids={"left": phi.dom, "right": psi.dom, "base": phi.cod,
                                  "pullback": wp.groupoid},
                       homs={"pr1": wp.pr1, "pr2": wp.pr2}).document(), 0
    if op == "stalk":
        k = _pick(fixture, "groupoid_objects", args.object, "--object")
        point = _require(args.point, "--point")
        return groupoid_document(stalk(k, point).groupoid), 0
    if op == "realize-representable":
        g = _pick(fixture, "groupoids", args.groupoid, "--groupoid")
        u = _require(args.open, "--open")
        r = realize_representable(g, u)
        return Fixture(groupoids={"base": g, "patch": r.patch, "realization": r.realization.groupoid},
                       homs={"inclusion": r.inclusion}).document(), 0
    if op == "theta":
        g = _pick(fixture, "groupoids", args.groupoid, "--groupoid")
        obj = theta(g)
        return Fixture(groupoids={"total": obj.structure.total, "base": obj.base},
                       homs={"structure": obj.structure.structure}).document(), 0
    if op == "xi":
        phi = _pick(fixture, "homs", args.hom, "--hom")
        return groupoid_document(xi(GerbedObject(phi))), 0
    if op == "gerbe-from-ineffective":
        g = _pick(fixture, "groupoids", args.groupoid, "--groupoid")
        pres = gerbe_from_ineffective(g)
        stack = pres.bouquet.stack
        return Fixture(groupoids={"total": pres.total, "base": pres.base},
                       homs={"projection": pres.projection},
                       sheaves={"bouquet-objects": stack.obj_sheaf, "bouquet-arrows": stack.arr_sheaf},
                       groupoid_objects={"bouquet": stack}).document(), 0
    if op == "ef-of-realization":
        k = _pick(fixture, "groupoid_objects", args.object, "--object")
        comp = ef_of_realization(k)
        return Fixture(groupoids={"base": k.base, "realization": comp.realization.groupoid,
                                  "effective": comp.effective.groupoid, "refined": comp.refined},
                       homs={"refinement": comp.refinement, "projection": comp.projection,
                             "to-effective": comp.to_effective,
                             "from-effective": comp.from_effective}).document(), 0
    g = _pick(fixture, "groupoids", args.groupoid, "--groupoid")
    point = _require(args.point, "--point")
    group = ineffective_isotropy(g, point)
    table = sorted([a, b, group.mul(a, b)] for a in group.elements for b in group.elements)
    return {"point": point, "order": len(group.elements), "unit": group.unit,
            "elements": sorted(group.elements), "table": table}, 0


def run_verify_command(args):
    report = run_verify(list(args.suites) or ["all"], seed=args.seed, instances=args.instances)
    return report, 0 if report["ok"] else 1


def _text_render(doc, indent=""):
    lines = []
    for key in sorted(doc) if isinstance(doc, dict) else []:
        value = doc[key]
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_text_render(value, indent + "  "))
        elif isinstance(value, list) and all(isinstance(v, (str, int, bool)) for v in value):
            lines.append(f"{indent}{key}: " + ", ".join(str(v) for v in value))
        else:
            lines.append(f"{indent}{key}: " + json.dumps(value, sort_keys=True))
    return lines


def _emit(doc, fmt):
    if fmt == "text":
        print("\n".join(_text_render(doc)))
    else:
        print(json.dumps(doc, indent=2, sort_keys=True))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    parser = argparse.ArgumentParser(
        prog="etalestacks",
        description="Check, compute, and verify structures stored in fixture files.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="decide a property of a named document")
    check.add_argument("property", choices=CHECK_PROPERTIES)
    check.add_argument("fixture")
    for flag in ("--groupoid", "--hom", "--object", "--map"):
        check.add_argument(flag)

    compute = sub.add_parser("compute", parents=[common], help="build a construction and print its document")
    compute.add_argument("operation", choices=COMPUTE_OPERATIONS)
    compute.add_argument("fixture")
    for flag in ("--groupoid", "--hom", "--against", "--object", "--space", "--map", "--point"):
        compute.add_argument(flag)
    compute.add_argument("--open", nargs="+")

    verify = sub.add_parser("verify", parents=[common], help="run the randomized suites and report")
    verify.add_argument("suites", nargs="*", default=["all"],
                        metavar="suite", help="all or any of: %s" % ", ".join(SUITES))
    verify.add_argument("--seed", type=int, default=7)
    verify.add_argument("--instances", type=int, default=200)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            out, code = run_verify_command(args)
        else:
            fixture = load_fixture(args.fixture)
            if args.command == "check":
                out, code = run_check(args, fixture)
            else:
                out, code = run_compute(args, fixture)
    except StructureError as exc:
        _emit({"error": {"invariant": exc.invariant, "detail": exc.detail}}, args.format)
        return 2
    _emit(out, args.format)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
