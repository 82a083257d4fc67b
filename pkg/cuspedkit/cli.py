"""Command-line interface for building and checking cusped spaces."""

import argparse
import logging
import sys
from typing import Callable, List, Optional

from . import blowup, chhs, cusped, formats, generators, horoball, hyperbolicity
from .config import BUDGET_ENV, Limits
from .errors import GraphFormatError, LemmaViolation, SizeGuardError
from .graph import Graph
from .models import RunReport, format_constant

logger = logging.getLogger("cuspedkit")

STDIO = "-"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_LEMMA = 3


def _read(path: str) -> str:
    if path == STDIO:
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    if path == STDIO:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _limits(args: argparse.Namespace) -> Limits:
    return Limits.from_env(vertex_budget=args.budget, jobs=args.jobs)


def _depth(value: str):
    if value == cusped.AUTO:
        return value
    try:
        cap = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"depth must be an integer or 'auto', got {value!r}")
    if cap < 0:
        raise argparse.ArgumentTypeError(f"depth must be non-negative, got {cap}")
    return cap


def _id_list(value: str) -> List[int]:
    try:
        return [int(t) for t in value.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ids, got {value!r}")


def _load_graph(args: argparse.Namespace) -> Graph:
    return formats.parse_graph(_read(args.input))


def _load_xw(args: argparse.Namespace) -> chhs.XWPair:
    return formats.parse_xw(_read(args.xw), limits=_limits(args))


def cmd_horoball(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    base = _load_graph(args)
    cap = horoball.default_cap(base) if args.depth == cusped.AUTO else args.depth
    h = horoball.build_horoball(base, cap)
    report.add_constant("cap", cap)
    report.add_constant("vertices", len(h.graph))
    report.add_constant("edges", h.graph.number_of_edges())
    return formats.format_graph(h.graph)


def cmd_blowup(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    data = formats.parse_blowup_data(_read(args.input), allow_empty_bases=args.allow_empty)
    x = blowup.build_blowup(data)
    if x.tainted:
        logger.warning("blowup has empty base sets; downstream checks are not meaningful")
        report.extra.append("TAINTED empty-base")
    p = chhs.XWPair(x, limits=_limits(args))
    report.add_constant("vertices", len(x.graph))
    report.add_constant("maxsimps", len(p.maxsimps))
    return formats.format_xw(p)


def cmd_cusp(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    p = _load_xw(args)
    c = cusped.build_cusped(p, args.depth, _limits(args))
    report.add_constant("cap", c.cap)
    report.add_constant("vertices", len(c.xhat.graph))
    report.add_constant("w_vertices", len(c.what.maxsimps))
    report.add_constant("w_edges", len(c.what.w_edges))
    return formats.format_xw(c.what)


def cmd_delta(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    g = _load_graph(args)
    result = hyperbolicity.four_point_delta(g, jobs=args.jobs)
    report.extra.append(f"DELTA {format_constant(result.delta)}")
    if result.witness is not None:
        report.extra.append("WITNESS " + " ".join(map(str, result.witness)))
    return None


def cmd_distort(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    g = _load_graph(args)
    sub = formats.parse_graph(_read(args.sub_graph)) if args.sub_graph else None
    vertices = sub.vertices if sub is not None else args.sub
    if not vertices:
        raise ValueError("give the subgraph with --sub or --sub-graph")
    result = hyperbolicity.distortion(g, vertices, sub, cap=_limits(args).distortion_cap)
    report.extra.append(f"DISTORT {format_constant(result.mult)}")
    if result.witness is not None:
        report.extra.append("WITNESS " + " ".join(map(str, result.witness)))
    if not result.lipschitz_ok:
        report.extra.append("LIPSCHITZ FAIL")
    return None


def cmd_check_chhs(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    p = _load_xw(args)
    result = chhs.check_axioms(
        p, delta_claim=args.delta, relative=args.relative, axioms=args.axioms or chhs.ALL_AXIOMS
    )
    report.add_constant("complexity", result.complexity_n)
    report.add_constant("delta", result.delta)
    report.add_constant("classes", len(result.domains))
    report.axioms.extend(result.verdicts)
    report.checks.append(chhs.check_w_meets_y(p))
    if args.lipschitz:
        report.checks.append(chhs.check_projection_lipschitz(p, args.lipschitz_bound))
    if args.cleanish:
        report.checks.append(blowup.has_cleanish(p.x, _limits(args).max_simplices, args.jobs))
    return None


def cmd_check_cusped(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    p = _load_xw(args)
    c = cusped.build_cusped(p, args.depth, _limits(args))
    report.add_constant("cap", c.cap)
    report.add_constant("w_vertices", len(c.what.maxsimps))
    for check in cusped.CUSPED_CHECKS:
        if check is cusped.check_w_coarse_embedding and args.among:
            report.checks.append(check(c, args.among))
        else:
            report.checks.append(check(c))
    return None


def cmd_check_horoball(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    base = formats.parse_graph(_read(args.base))
    cap = horoball.default_cap(base) if args.depth == cusped.AUTO else args.depth
    report.add_constant("cap", cap)
    report.checks.append(horoball.check_horoball_lower_bound(horoball.build_horoball(base, cap)))
    return None


def cmd_gen_relhyp(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    instance = generators.gen_relhyp(args.radius, args.margin, limits=_limits(args))
    report.add_constant("ball", len(instance.ball))
    report.add_constant("cosets", len(instance.cosets))
    if args.check_iso:
        report.checks.append(generators.check_augmented_iso(instance, args.depth))
    return formats.format_xw(instance.xw)


def cmd_gen_blowup(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    p = generators.gen_random_blowup(
        args.seed,
        support_size=args.support_size,
        base_max=args.base_max,
        w_density=args.density,
        kind=args.kind,
        limits=_limits(args),
    )
    report.add_constant("maxsimps", len(p.maxsimps))
    report.add_constant("w_edges", len(p.w_edges))
    return formats.format_xw(p)


def cmd_gen_family(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    g = generators.gen_family(args.kind, args.size)
    report.add_constant("vertices", len(g))
    report.add_constant("edges", g.number_of_edges())
    return formats.format_graph(g)


def cmd_gen_gnp(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    g = generators.gen_random_graph(args.n, args.p, args.seed)
    report.add_constant("edges", g.number_of_edges())
    return formats.format_graph(g)


def cmd_export_dot(args: argparse.Namespace, report: RunReport) -> Optional[str]:
    return formats.to_dot(_load_graph(args))


def _common(parser: argparse.ArgumentParser, out: bool = False) -> None:
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes (default: 1)")
    parser.add_argument(
        "--budget",
        type=int,
        default=None,
        help=f"Vertex budget for cusped builds (default: ${BUDGET_ENV} or 200000)",
    )
    if out:
        parser.add_argument("-o", "--out", default=STDIO, help="Output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuspedkit",
        description="Build and check horoballs, blowups and cusped spaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate the F2 relative to <a> toy and check the axioms
  cuspedkit gen relhyp --radius 2 | cuspedkit check chhs --xw -

  # Cusp a random blowup and run the structural checks
  cuspedkit gen blowup --seed 7 | cuspedkit check cusped --xw -

  # Horoball over a path, truncated automatically
  cuspedkit gen family --kind path --size 64 | cuspedkit horoball --input - --depth auto

  # Four-point delta of a graph file
  cuspedkit delta --input tree.graph
        """,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("horoball", help="Build a truncated combinatorial horoball")
    p.add_argument("--input", default=STDIO, help="Base graph file")
    p.add_argument("--depth", type=_depth, default=cusped.AUTO, help="Cap or 'auto'")
    _common(p, out=True)
    p.set_defaults(handler=cmd_horoball)

    p = sub.add_parser("blowup", help="Build a blowup graph from blowup data")
    p.add_argument("--input", default=STDIO, help="Blowup data file")
    p.add_argument("--allow-empty", action="store_true", help="Accept empty base sets")
    _common(p, out=True)
    p.set_defaults(handler=cmd_blowup)

    p = sub.add_parser("cusp", help="Build the cusped space of an XW file")
    p.add_argument("--xw", default=STDIO, help="XW pair file over a blowup")
    p.add_argument("--depth", type=_depth, default=cusped.AUTO, help="Cap or 'auto'")
    _common(p, out=True)
    p.set_defaults(handler=cmd_cusp)

    p = sub.add_parser("delta", help="Four-point hyperbolicity constant")
    p.add_argument("--input", default=STDIO, help="Graph file")
    _common(p)
    p.set_defaults(handler=cmd_delta)

    p = sub.add_parser("distort", help="Distortion of a subgraph")
    p.add_argument("--input", default=STDIO, help="Ambient graph file")
    p.add_argument("--sub", type=_id_list, default=None, help="Comma-separated vertex ids")
    p.add_argument("--sub-graph", default=None, help="Subgraph file with its own edges")
    _common(p)
    p.set_defaults(handler=cmd_distort)

    check = sub.add_parser("check", help="Run exhaustive checkers")
    check_sub = check.add_subparsers(dest="target", required=True)

    p = check_sub.add_parser("chhs", help="Combinatorial HHS axioms")
    p.add_argument("--xw", default=STDIO, help="XW pair file")
    p.add_argument("--delta", type=float, default=None, help="Claimed constant")
    p.add_argument("--relative", action="store_true", help="Exempt cone-type classes")
    p.add_argument("--axioms", type=_id_list, default=None, help="Subset, e.g. 1,5")
    p.add_argument("--cleanish", action="store_true", help="Also check cleanish links")
    p.add_argument("--lipschitz", action="store_true", help="Also measure projection spread")
    p.add_argument("--lipschitz-bound", type=float, default=None, help="Fail above this spread")
    _common(p)
    p.set_defaults(handler=cmd_check_chhs)

    p = check_sub.add_parser("cusped", help="Structural checks on the cusped space")
    p.add_argument("--xw", default=STDIO, help="XW pair file over a blowup")
    p.add_argument("--depth", type=_depth, default=cusped.AUTO, help="Cap or 'auto'")
    p.add_argument("--among", type=_id_list, default=None, help="W-vertices for the embedding check")
    _common(p)
    p.set_defaults(handler=cmd_check_cusped)

    p = check_sub.add_parser("horoball", help="Horoball distance lower bound")
    p.add_argument("--base", default=STDIO, help="Base graph file")
    p.add_argument("--depth", type=_depth, default=cusped.AUTO, help="Cap or 'auto'")
    _common(p)
    p.set_defaults(handler=cmd_check_horoball)

    gen = sub.add_parser("gen", help="Generate instances")
    gen_sub = gen.add_subparsers(dest="kind_of", required=True)

    p = gen_sub.add_parser("relhyp", help="F2 relative to <a> on a Cayley ball")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--margin", type=int, default=1)
    p.add_argument("--check-iso", action="store_true", help="Compare with the augmented space")
    p.add_argument("--depth", type=_depth, default=cusped.AUTO, help="Cap for --check-iso")
    _common(p, out=True)
    p.set_defaults(handler=cmd_gen_relhyp)

    p = gen_sub.add_parser("blowup", help="Random blowup with sampled W-edges")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--support-size", type=int, default=5)
    p.add_argument("--base-max", type=int, default=2)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--kind", choices=generators.SUPPORT_KINDS, default="tree")
    _common(p, out=True)
    p.set_defaults(handler=cmd_gen_blowup)

    p = gen_sub.add_parser("family", help="Named base graph")
    p.add_argument("--kind", choices=generators.list_families(), required=True)
    p.add_argument("--size", type=int, required=True)
    _common(p, out=True)
    p.set_defaults(handler=cmd_gen_family)

    p = gen_sub.add_parser("gnp", help="Erdős–Rényi random graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    _common(p, out=True)
    p.set_defaults(handler=cmd_gen_gnp)

    p = sub.add_parser("export-dot", help="Render a graph in dot, ranked by depth")
    p.add_argument("--input", default=STDIO, help="Graph file")
    _common(p, out=True)
    p.set_defaults(handler=cmd_export_dot)

    return parser


def main(argv: Optional[list] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    report = RunReport(command=argv)
    handler: Callable[[argparse.Namespace, RunReport], Optional[str]] = args.handler
    try:
        data = handler(args, report)
    except LemmaViolation as exc:
        print(f"lemma violation: {exc}", file=sys.stderr)
        return EXIT_LEMMA
    except (GraphFormatError, SizeGuardError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out = getattr(args, "out", None)
    if data is not None:
        _write(out, data)
    stream = sys.stderr if data is not None and out == STDIO else sys.stdout
    stream.write("\n".join(report.lines()) + "\n")
    return report.exit_status()


if __name__ == "__main__":
    sys.exit(main())
