"""Command-line front end.

Exit status: 0 on success, 1 when a verification fails (rack axioms,
cubical identities, a rejected move in a replayed trace), 2 for parse and
usage errors.  Racks are given as a JSON file or inline as ``kind:params``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import cobordism as cob
from . import cubical, diagrams, racks
from .homology import BoundaryError, chain_complex, homology


class UsageError(Exception):
    pass


class Failure(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _rack(ref: str) -> racks.Rack:
    p = Path(ref)
    try:
        if p.is_file():
            return racks.load_rack(p.read_text())
        return racks.parse_rack_spec(ref)
    except racks.RackAxiomError as exc:
        raise Failure(f"{ref}: {exc}") from None
    except (racks.RackSpecError, racks.MalformedTableError, ValueError) as exc:
        raise UsageError(f"{ref}: {exc}") from None


def _diagram(args) -> diagrams.LinkDiagram:
    if args.gauss is not None:
        path, parse = args.gauss, diagrams.parse_gauss
    elif getattr(args, "pd", None) is not None:
        path, parse = args.pd, diagrams.parse_pd
    else:
        raise UsageError("give a diagram with --gauss or --pd")
    try:
        return parse(_read(path))
    except diagrams.DiagramError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _labelled(args, d: diagrams.LinkDiagram) -> cob.LabelledDiagram:
    rack = _rack(args.rack) if args.rack else None
    if args.labels:
        try:
            lab = diagrams.load_labelling(_read(args.labels), Path(args.labels).parent)
        except (KeyError, ValueError, racks.RackSpecError) as exc:
            raise UsageError(f"{args.labels}: {exc}") from None
        if rack is not None and lab.rack != rack:
            raise UsageError(f"{args.labels}: labelling rack differs from --rack {args.rack}")
    else:
        if rack is None:
            raise UsageError("need --rack or --labels")
        found = diagrams.colorings(d, rack, "list")
        if not found:
            raise Failure("the diagram has no labelling by this rack")
        lab = found[0]
    try:
        return cob.LabelledDiagram.from_labelling(d, lab)
    except (cob.LabellingError, KeyError) as exc:
        where = args.labels or "labelling"
        raise Failure(f"{where}: {exc}") from None


def _space(rack: racks.Rack, kind: str, dim: int) -> cubical.CubicalSet:
    build = cubical.build_rack_space if kind == "rack" else cubical.build_extended_rack_space
    cache = os.environ.get("RACKKIT_CACHE")
    if not cache:
        return build(rack, dim)
    key = hashlib.sha256(racks.dump_rack(rack).encode()).hexdigest()[:16]
    path = Path(cache) / f"{kind}-{key}-{dim}.cub"
    if path.is_file():
        return cubical.load_cubical(path.read_text())
    cs = build(rack, dim)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(cubical.dump_cubical(cs))
    return cs


# commands ---------------------------------------------------------------------------


def cmd_rack(args, out) -> int:
    if args.action == "make":
        rack = _rack(args.spec)
        text = racks.dump_rack(rack) + "\n"
        if args.output:
            Path(args.output).write_text(text)
        else:
            out.write(text)
        return 0
    if args.action == "check":
        p = Path(args.spec)
        if p.is_file():
            try:
                doc = json.loads(p.read_text())
                table = doc["table"]
                violations = racks.check_rack_axioms(table)
            except (json.JSONDecodeError, KeyError, TypeError, racks.MalformedTableError) as exc:
                raise UsageError(f"{args.spec}: {exc}") from None
        else:
            violations = racks.check_rack_axioms(_rack(args.spec).table)
        for v in violations:
            out.write(f"{v}\n")
        out.write("ok\n" if not violations else f"{len(violations)} violations\n")
        return 0 if not violations else 1
    rack = _rack(args.spec)
    for orb in racks.orbits(rack):
        out.write(" ".join(str(x) for x in orb) + "\n")
    return 0


def cmd_space(args, out) -> int:
    rack = _rack(args.rack)
    need = args.deg + 1
    if args.deg < 0:
        raise UsageError("--deg must be non-negative")
    dim = args.maxdim if args.maxdim is not None else need
    if dim < need:
        raise UsageError(f"H_{args.deg} needs the space built to dimension {need}; --maxdim is {dim}")
    cc = chain_complex(_space(rack, args.space, dim), check=args.check)
    group = homology(cc, args.deg)
    out.write((group.machine() if args.machine else str(group)) + "\n")
    return 0


def cmd_james(args, out) -> int:
    rack = _rack(args.rack)
    if args.n < 0 or args.maxdim < 0:
        raise UsageError("--n and --maxdim must be non-negative")
    base = _space(rack, "rack", args.n + args.maxdim)
    jc = cubical.james_complex(base, args.n, args.maxdim)
    for k, count in enumerate(jc.cubical.counts):
        out.write(f"{k} {count}\n")
    if args.validate:
        bad = cubical.validate_cubical(jc.cubical)
        for v in bad[:20]:
            out.write(f"violation dim={v.dim} cell={v.cell} i={v.i} j={v.j} eps={v.eps} omega={v.omega}\n")
        try:
            chain_complex(jc.cubical)
        except BoundaryError as exc:
            out.write(f"{exc}\n")
            return 1
        out.write("valid\n" if not bad else f"{len(bad)} violations\n")
        return 1 if bad else 0
    return 0


def cmd_diagram(args, out) -> int:
    d = _diagram(args)
    if args.action == "writhe":
        out.write(f"{diagrams.writhe(d)}\n")
    elif args.action == "rackpres":
        pres = diagrams.fundamental_rack(d)
        out.write("generators: " + " ".join(f"a{g}" for g in pres.generators) + "\n")
        for g, h, k in pres.relations:
            out.write(f"a{g}^a{h} = a{k}\n")
    elif args.action == "colorings":
        if not args.rack:
            raise UsageError("colorings needs --rack")
        out.write(f"{diagrams.colorings(d, _rack(args.rack))}\n")
    else:
        if not args.labels:
            raise UsageError("class needs --labels")
        ld = _labelled(args, d)
        out.write(f"{cob.cycle_class(ld)}\n")
    return 0


def cmd_moves(args, out) -> int:
    d = _diagram(args)
    ld = _labelled(args, d)
    if args.action == "replay":
        if not args.trace:
            raise UsageError("replay needs --trace")
        try:
            moves = cob.parse_trace(_read(args.trace))
        except (cob.MoveError, ValueError) as exc:
            raise UsageError(f"{args.trace}: {exc}") from None
        for no, m in enumerate(moves, start=1):
            try:
                ld = cob.apply_move(ld, m)
            except cob.MoveError as exc:
                raise Failure(f"{args.trace}: move {no} ({m}): {exc}") from None
        out.write(f"crossings: {ld.crossing_count}\n")
        out.write(f"gauss: {diagrams.print_gauss(ld.diagram)}\n")
        out.write(f"class: {cob.cycle_class(ld)}\n")
        return 0
    if args.budget < 0:
        raise UsageError("--budget must be non-negative")
    res = cob.reduce(ld, args.budget, args.scheme_colours_only)
    out.write(("reduced" if res.reduced else "exhausted") + "\n")
    out.write(f"crossings: {res.diagram.crossing_count}\n")
    out.write(f"steps: {res.steps}\n")
    out.write(cob.format_trace(res.trace))
    if args.trace_out:
        Path(args.trace_out).write_text(cob.format_trace(res.trace))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rackkit", description="Rack spaces, their homology, and labelled diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rack", help="build, check or inspect a rack")
    r.add_argument("action", choices=["make", "check", "orbits"])
    r.add_argument("spec", help="rack file or kind:params")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_rack)

    s = sub.add_parser("space", help="homology of a rack space")
    s.add_argument("action", choices=["homology"])
    s.add_argument("--rack", required=True)
    s.add_argument("--space", choices=["rack", "extended"], default="rack")
    s.add_argument("--deg", type=int, required=True)
    s.add_argument("--maxdim", type=int, help="build dimension (default deg+1)")
    s.add_argument("--machine", action="store_true", help="print rank;d1,d2,... instead of Z^r + Z/d")
    s.add_argument("--check", action="store_true", help="verify d o d = 0 before computing")
    s.set_defaults(func=cmd_space)

    j = sub.add_parser("james", help="James complex of a rack space")
    j.add_argument("--rack", required=True)
    j.add_argument("--n", type=int, required=True)
    j.add_argument("--maxdim", type=int, required=True)
    j.add_argument("--validate", action="store_true", help="check the cubical identities")
    j.set_defaults(func=cmd_james)

    helps = {"diagram": "colourings, writhe, presentation or class of a diagram",
             "moves": "search for or replay a move sequence on a labelled diagram"}
    for name, func, actions in (("diagram", cmd_diagram, ["colorings", "writhe", "rackpres", "class"]),
                                ("moves", cmd_moves, ["reduce", "replay"])):
        q = sub.add_parser(name, help=helps[name])
        q.add_argument("action", choices=actions)
        src = q.add_mutually_exclusive_group()
        src.add_argument("--gauss", help="Gauss code file")
        src.add_argument("--pd", help="PD code file")
        q.add_argument("--rack", help="rack file or kind:params")
        q.add_argument("--labels", help="labelling JSON (names its own rack)")
        if name == "moves":
            q.add_argument("--budget", type=int, default=1000, help="maximum move applications")
            q.add_argument("--scheme-colours-only", action="store_true",
                           help="new labels must already occur in the diagram")
            q.add_argument("--trace", help="trace file to replay")
            q.add_argument("--trace-out", help="write the found trace here")
        q.set_defaults(func=func)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"rackkit: error: {exc}\n")
        return 2
    except (Failure, racks.RackAxiomError, BoundaryError) as exc:
        err.write(f"rackkit: failed: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
