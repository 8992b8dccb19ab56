"""Command-line interface.

Every command writes ``<command>_<table>.csv`` files plus a
``manifest_<command>.json`` into ``--out`` (default ``$LISNA_OUTPUT_DIR`` or
the current directory).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path as FsPath

from . import autocorr as ac
from .graph import SpatialNetwork, Traversal
from .intensity import LEVELS, NODE_LEVELS, PATH_LEVELS, field
from .io import (load_edge_rates, load_events, load_network, node_geojson, save_events,
                 summary_line, write_csv, write_json)
from .pattern import SnappedPattern, snap
from .second_order import EntityError, lag_second_order, parse_path, resolve, second_order
from .sim import MODELS, SimSpec, simulate
from .weights import CUMULATIVE, PARTIAL, ROW, adjacency, standardize

OUTPUT_ENV = "LISNA_OUTPUT_DIR"
RESULT_HEADER = ("statistic", "lag", "value", "null_mean", "null_sd", "p", "p_adjusted", "M", "seed")


class Run:
    """Output bookkeeping for one command invocation."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.command = args.command
        self.out = FsPath(args.out or os.environ.get(OUTPUT_ENV) or ".")
        self.out.mkdir(parents=True, exist_ok=True)
        self.argv = argv
        self.outputs: list[str] = []
        self.notes: list[str] = []
        self.extra: dict = {}

    def path(self, name: str) -> FsPath:
        self.outputs.append(name)
        return self.out / name

    def csv(self, table: str, header, rows) -> None:
        write_csv(self.path(f"{self.command}_{table}.csv".replace("-", "_")), header, rows)

    def note(self, text: str) -> None:
        self.notes.append(text)
        print(f"note: {text}", file=sys.stderr)

    def finish(self) -> None:
        manifest = {"command": self.command, "argv": self.argv, "outputs": self.outputs,
                    "notes": self.notes, **self.extra}
        write_json(self.out / f"manifest_{self.command.replace('-', '_')}.json", manifest)


# -- shared loading -----------------------------------------------------------

def _network(args) -> SpatialNetwork:
    net = load_network(args.nodes, args.edges)
    print(summary_line(net))
    return net


def _pattern(args, net: SpatialNetwork) -> SnappedPattern:
    return snap(net, load_events(args.events), args.max_snap_distance)


def _replicate(args, p: SnappedPattern):
    if args.replicate == "pooled":
        return None
    return int(args.replicate)


def _node_field(args, net: SpatialNetwork) -> ac.NodeField:
    if args.level not in NODE_LEVELS:
        raise ValueError(f"--level must be a node level: {', '.join(NODE_LEVELS)}")
    p = _pattern(args, net)
    return ac.NodeField.from_intensity(field(p, args.level, _replicate(args, p)))


def _weights(args, net: SpatialNetwork, f: ac.NodeField, row: bool = False):
    return ac.weights_for(net, f, args.order, args.flavor, args.mode,
                          ROW if (row or args.standardize) else "binary")


# -- commands -----------------------------------------------------------------

def cmd_summary(args, run: Run) -> None:
    net = _network(args)
    run.csv("vertices", ("vertex_id", "degree", "in_degree", "out_degree", "cg_degree"),
            [(v, net.degree(v), net.in_degree(v), net.out_degree(v), net.cg_degree(v))
             for v in net.vertex_ids])
    run.extra["summary"] = summary_line(net)


def cmd_snap(args, run: Run) -> None:
    net = _network(args)
    p = _pattern(args, net)
    run.csv("report", ("event_index", "edge_id", "snap_distance", "accepted"),
            [(r.index, r.edge, r.distance, r.accepted) for r in p.snap_report])
    run.csv("counts", ("replicate", "edge_id", "count"),
            [(rep, e, int(p.counts[i, j])) for i, rep in enumerate(p.replicates)
             for j, e in enumerate(net.edge_ids)])
    rejected = sum(not r.accepted for r in p.snap_report)
    if rejected:
        run.note(f"{rejected} events rejected by the snap cutoff")


def cmd_simulate(args, run: Run) -> None:
    net = _network(args)
    rates = load_edge_rates(args.edge_rates) if args.edge_rates else {}
    spec = SimSpec(args.model, args.rate, rates, args.sd, args.replicates, args.seed)
    p = simulate(net, spec)
    save_events(p.events, run.path("simulate_events.csv"))


def cmd_weights(args, run: Run) -> None:
    net = _network(args)
    w = adjacency(net, args.order, args.flavor, args.mode)
    if args.standardize:
        w = standardize(w)
    path = run.path(f"weights_{args.flavor}_{args.order}.csv")
    path.write_text(w.to_csv())


def cmd_intensity(args, run: Run) -> None:
    net = _network(args)
    p = _pattern(args, net)
    paths = [parse_path(net, text, directed=args.level in ("ancestors", "descendants"))
             for text in args.path]
    if args.level in PATH_LEVELS and not paths:
        raise ValueError(f"--level {args.level} needs at least one --path")
    fld = field(p, args.level, _replicate(args, p), paths)
    run.csv(args.level, ("entity_id", "level", "replicate", "value"), fld.to_rows())
    if args.geojson and args.level in NODE_LEVELS:
        geo = node_geojson(net, [{"vertex_id": v, "value": x} for v, x in fld.values.items()])
        write_json(run.path(f"intensity_{args.level}.geojson"), geo)


def _pair_rows(p, pairs):
    rows = []
    for a_text, b_text in pairs:
        a, b = resolve(p.network, a_text), resolve(p.network, b_text)
        res = second_order(p, a, b)
        rows.append((a.label, b.label, res.intensity, res.covariance, res.n_replicates, res.degenerate))
    return rows


SECOND_HEADER = ("a", "b", "second_order_intensity", "covariance_density", "n_replicates", "degenerate")


def cmd_second_order(args, run: Run) -> None:
    net = _network(args)
    p = _pattern(args, net)
    if not args.pair and not args.lag:
        raise ValueError("give at least one --pair or --lag")
    if args.pair:
        rows = _pair_rows(p, args.pair)
        run.csv("pairs", SECOND_HEADER, rows)
        for a, b, *_, degenerate in rows:
            if degenerate:
                run.note(f"{a} / {b}: single replicate, covariance fixed at 0")
    if args.lag:
        rows = []
        for lag in args.lag:
            try:
                res = lag_second_order(p, lag, args.mode)
            except EntityError as exc:
                run.note(f"lag {lag}: {exc}")
                continue
            rows.append((lag, res.intensity, res.covariance, res.n_pairs, res.n_replicates))
        run.csv("lag", ("lag", "second_order_intensity", "covariance_density", "n_pairs", "n_replicates"), rows)


def cmd_lisna2(args, run: Run) -> None:
    net = _network(args)
    p = _pattern(args, net)
    kinds = [resolve(net, s).kind.startswith("edge") for s in (args.a, args.b)]
    if kinds.count(True) != 1:
        raise EntityError("a cross-hierarchical pair needs exactly one single-edge entity")
    rows = _pair_rows(p, [(args.a, args.b)])
    run.csv("pair", SECOND_HEADER, rows)
    if rows[0][-1]:
        run.note("single replicate, covariance fixed at 0")


def _global_row(res: ac.AutocorrResult, p_adjusted=None):
    return (res.statistic, res.lag, res.value, res.null_mean, res.null_sd, res.p_value,
            res.p_value if p_adjusted is None else p_adjusted, res.permutations, res.seed)


_AUTOCORR = {
    "moran": ("moran", "local_moran"),
    "geary": ("geary", "local_geary"),
    "getis": ("getis_g", "local_g"),
}


def cmd_autocorr(args, run: Run) -> None:
    net = _network(args)
    f = _node_field(args, net)
    w = _weights(args, net, f)
    stats = list(_AUTOCORR) if args.stat == "all" else [args.stat]
    for stat in stats:
        g_name, l_name = _AUTOCORR[stat]
        g = ac.permutation_test(g_name, f, w, args.permutations, args.seed)
        run.csv(stat, RESULT_HEADER, [_global_row(g)])
        loc = ac.local_permutation_test(l_name, f, w, args.permutations, args.seed)
        quads = loc.quadrants or ("",) * f.size
        rows = [(v, val, q, pv) for v, val, q, pv in
                zip(loc.vertex_index, loc.values, quads, loc.p_values)]
        run.csv(f"local_{stat}", ("vertex_id", "value", "quadrant", "p"), rows)
        if args.geojson:
            geo = node_geojson(net, [{"vertex_id": v, "value": val, "quadrant": q or None, "p": pv}
                                     for v, val, q, pv in rows])
            write_json(run.path(f"autocorr_local_{stat}.geojson"), geo)
    run.extra["n_vertices"] = f.size


def cmd_correlogram(args, run: Run) -> None:
    net = _network(args)
    f = _node_field(args, net)
    rows = ac.correlogram(f, net, args.stat, args.max_lag, args.permutations, args.seed, args.mode)
    out = []
    for r in rows:
        if r.value is None:
            run.note(f"lag {r.lag}: no vertex pairs, statistic absent")
            continue
        out.append((args.stat, r.lag, r.value, r.null_mean, r.null_sd, r.p_value,
                    r.p_bonferroni, args.permutations, args.seed))
    run.csv(args.stat, RESULT_HEADER, out)


def cmd_scatter(args, run: Run) -> None:
    net = _network(args)
    f = _node_field(args, net)
    w = _weights(args, net, f, row=True)
    points, slope = ac.moran_scatter(f, w)
    run.csv("moran", ("vertex_id", "x", "lag"), points)
    run.extra["slope"] = slope


# -- parser -------------------------------------------------------------------

def _common(sp, events: bool = False):
    sp.add_argument("--nodes", required=True, help="nodes CSV (id,x,y)")
    sp.add_argument("--edges", required=True, help="edges CSV (id,tail,head,directed,length)")
    sp.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or .)")
    if events:
        sp.add_argument("--events", required=True, help="events CSV (x,y[,replicate][,mark])")
        sp.add_argument("--max-snap-distance", type=float, default=0.0,
                        help="reject events farther than this from every edge (0 = no cutoff)")


def _node_opts(sp, seed: bool):
    sp.add_argument("--level", default="node_mean", choices=sorted(NODE_LEVELS))
    sp.add_argument("--replicate", default="pooled", help="replicate id or 'pooled'")
    sp.add_argument("--mode", default="undirected", choices=[m.value for m in Traversal])
    if seed:
        sp.add_argument("--permutations", type=int, default=ac.PERMUTATIONS)
        sp.add_argument("--seed", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lisna", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("summary", help="network summary and per-vertex degrees")
    _common(sp)

    sp = sub.add_parser("snap", help="snap events onto edges")
    _common(sp, events=True)

    sp = sub.add_parser("simulate", help="simulate Poisson events on the network")
    _common(sp)
    sp.add_argument("--model", default="homogeneous_poisson", choices=MODELS)
    sp.add_argument("--rate", type=float, default=1.0)
    sp.add_argument("--edge-rates", help="CSV edge_id,rate for the inhomogeneous model")
    sp.add_argument("--sd", type=float, default=0.5)
    sp.add_argument("--replicates", type=int, default=1)
    sp.add_argument("--seed", type=int, required=True)

    sp = sub.add_parser("weights", help="export a weight matrix of a given order")
    _common(sp)
    sp.add_argument("--order", type=int, default=1)
    sp.add_argument("--flavor", default=PARTIAL, choices=(PARTIAL, CUMULATIVE))
    sp.add_argument("--mode", default="undirected", choices=[m.value for m in Traversal])
    sp.add_argument("--standardize", action="store_true")

    sp = sub.add_parser("intensity", help="first-order intensity field")
    _common(sp, events=True)
    sp.add_argument("--level", default="edge", choices=LEVELS)
    sp.add_argument("--replicate", default="pooled")
    sp.add_argument("--path", action="append", default=[],
                    help="path for path levels: 1-2-3 or 1..7 (repeatable)")
    sp.add_argument("--geojson", action="store_true")

    sp = sub.add_parser("second-order", help="second-order intensity and covariance density")
    _common(sp, events=True)
    sp.add_argument("--pair", nargs=2, action="append", metavar=("A", "B"), default=[])
    sp.add_argument("--lag", type=int, action="append", default=[],
                    help="single-realization edge-lag estimate (repeatable)")
    sp.add_argument("--mode", default="undirected", choices=[m.value for m in Traversal])

    sp = sub.add_parser("lisna2", help="cross-hierarchical edge/entity pair")
    _common(sp, events=True)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)

    for name, helptext in (("autocorr", "global and local Moran, Geary and G"),
                           ("scatter", "Moran scatterplot data")):
        sp = sub.add_parser(name, help=helptext)
        _common(sp, events=True)
        _node_opts(sp, seed=name == "autocorr")
        sp.add_argument("--order", type=int, default=1)
        sp.add_argument("--flavor", default=PARTIAL, choices=(PARTIAL, CUMULATIVE))
        sp.add_argument("--standardize", action="store_true")
        if name == "autocorr":
            sp.add_argument("--stat", default="all", choices=("moran", "geary", "getis", "all"))
            sp.add_argument("--geojson", action="store_true")

    sp = sub.add_parser("correlogram", help="statistic by partial lag with Bonferroni p-values")
    _common(sp, events=True)
    _node_opts(sp, seed=True)
    sp.add_argument("--stat", default="moran", choices=("moran", "geary"))
    sp.add_argument("--max-lag", type=int, default=8)
    return parser


COMMANDS = {
    "summary": cmd_summary, "snap": cmd_snap, "simulate": cmd_simulate,
    "weights": cmd_weights, "intensity": cmd_intensity, "second-order": cmd_second_order,
    "lisna2": cmd_lisna2, "autocorr": cmd_autocorr, "correlogram": cmd_correlogram,
    "scatter": cmd_scatter,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        run = Run(args, argv)
        COMMANDS[args.command](args, run)
        run.finish()
    except (ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"lisna {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
