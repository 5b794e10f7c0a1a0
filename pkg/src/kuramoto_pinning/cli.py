"""Command-line entry point.

Every subcommand accepts ``--seed``, ``--scale``, ``--config``, ``--threads``
and ``--out``. Exit status is 0 on success, 1 on usage errors and 2 on
runtime errors; failures print a single diagnostic line to stderr.

``KURAMOTO_PINNING_THREADS`` and ``KURAMOTO_PINNING_OUT`` stand in for
``--threads`` and the output directory when the flags are omitted.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import centrality, dynamics, experiments, generators, io_formats, metrics, selection
from . import rng as rngmod
from .experiments import ExperimentPlan, NetworkSpec

OUT_ENV = "KURAMOTO_PINNING_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_value(text: str) -> Any:
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    return text


def _params(pairs: Sequence[str] | None) -> dict:
    out = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"expected key=value, got {item!r}")
        out[key.replace("-", "_")] = _parse_value(value)
    return out


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _config(args) -> dict:
    if not args.config:
        return {}
    cfg = io_formats.load_config(args.config)
    # a result sidecar carries the plan under "plan"
    return dict(cfg.get("plan", cfg))


def _out_path(args, default_name: str) -> Path | None:
    """``--out`` as given, else ``$KURAMOTO_PINNING_OUT/default_name``, else stdout (None)."""
    if args.out:
        p = Path(args.out)
        if p.is_dir():
            p = p / default_name
    elif os.environ.get(OUT_ENV):
        p = Path(os.environ[OUT_ENV]) / default_name
    else:
        return None
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _scaled(n: int, scale: float) -> int:
    return max(1, int(round(n * scale)))


def _network_spec(kind: str, params: dict) -> NetworkSpec:
    try:
        return NetworkSpec(kind, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_graph(args, rng: np.random.Generator):
    """Graph from ``--graph FILE`` or a generator ``--kind`` with ``--param``s."""
    if getattr(args, "graph", None):
        return io_formats.parse_edge_list(args.graph), None
    kind = getattr(args, "kind", None)
    if not kind:
        raise UsageError("give --graph FILE or --kind GENERATOR")
    return experiments.build_network(_network_spec(kind, _params(args.param)), rng)


def _emit_graph(g, args, name: str) -> None:
    path = _out_path(args, name)
    if path is None:
        sys.stdout.write(f"# nodes {g.n_nodes} edges {g.n_edges}\n")
        sys.stdout.writelines(f"{u} {v}\n" for u, v in g.edges)
    else:
        io_formats.write_edge_list(g, path)


def _emit_table(args, name: str, header, rows, meta=None) -> None:
    path = _out_path(args, name)
    if path is None:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(io_formats.fmt(x) if isinstance(x, float) else str(x) for x in row) + "\n")
    else:
        io_formats.write_table(path, header, rows, meta)


# subcommands

def cmd_generate(args) -> None:
    g, core = _load_graph(args, rngmod.stream(args.seed, rngmod.NETWORK))
    _emit_graph(g, args, "graph.txt")
    if core is not None:
        print(f"core: {' '.join(map(str, core))}", file=sys.stderr)


def cmd_centrality(args) -> None:
    g, _ = _load_graph(args, rngmod.stream(args.seed, rngmod.NETWORK))
    sc = centrality.scores(g, args.measure, args.alpha)
    rows = [(i, float(v)) for i, v in enumerate(sc.values)]
    _emit_table(args, f"{sc.kind.value}.csv", ["node", "score"], rows,
                {"kind": "centrality", "measure": sc.kind.value, "alpha": args.alpha})


def cmd_simulate(args) -> None:
    cfg = _config(args)
    g, _ = _load_graph(args, rngmod.stream(args.seed, rngmod.NETWORK))
    drng = rngmod.stream(args.seed, rngmod.DYNAMICS)
    omegas = dynamics.draw_frequencies(g.n_nodes, drng, cfg.get("omega_mean", dynamics.OMEGA_MEAN),
                                       cfg.get("omega_std", dynamics.OMEGA_STD),
                                       cfg.get("freq_gap_min", dynamics.DEFAULT_FREQ_GAP))
    phases = dynamics.draw_phases(g.n_nodes, drng)
    coupling = args.coupling if args.coupling is not None else cfg.get("coupling", dynamics.DEFAULT_COUPLING)
    system = dynamics.OscillatorSystem(phases, omegas, coupling, g)
    ctl = None
    if args.controllers:
        nodes = _ints(args.controllers)
    elif args.m:
        nodes = selection.select_controllers(g, args.strategy, args.m, rngmod.stream(args.seed, rngmod.SELECTION))
    else:
        nodes = []
    if nodes:
        ctl = dynamics.ControlConfig(tuple(nodes), args.strength,
                                     cfg.get("neighbor_decay", dynamics.DEFAULT_NEIGHBOR_DECAY),
                                     cfg.get("freq_gap_min", dynamics.DEFAULT_FREQ_GAP))
    dt = args.dt if args.dt is not None else cfg.get("dt", dynamics.DEFAULT_DT)
    t_end = args.t_end if args.t_end is not None else cfg.get("t_end", dynamics.DEFAULT_T_END)
    traj = dynamics.integrate(system, ctl, dt=dt, t_end=t_end, record_every=args.record_every)
    r_as = metrics.asymptotic_order(traj, cfg.get("transient_fraction", metrics.DEFAULT_TRANSIENT))
    _emit_table(args, "trajectory.csv", ["t", "R"], zip(map(float, traj.times), map(float, traj.R_series)),
                {"kind": "trajectory", "seed": args.seed, "coupling": coupling, "dt": dt, "t_end": t_end,
                 "controllers": list(nodes), "strength": args.strength, "R_as": r_as})
    print(f"R_as {io_formats.fmt(r_as)}", file=sys.stderr)


def _plan(args, cfg: dict, **defaults) -> ExperimentPlan:
    cfg = {**defaults, **cfg}
    if "network" not in cfg:
        raise UsageError("plan needs a network (use --config or --kind)")
    if getattr(args, "strategy", None):
        cfg["strategy"] = args.strategy
    if args.seed_given or "seed" not in cfg:
        cfg["seed"] = args.seed
    try:
        plan = ExperimentPlan.from_dict(cfg)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad plan: {exc}") from None
    if args.scale != 1.0:
        plan = plan.replace(replicas=_scaled(plan.replicas, args.scale))
    return plan


def _cli_network(args) -> dict:
    if getattr(args, "kind", None):
        return {"network": {"kind": args.kind, "params": _params(args.param)}}
    return {}


def _write_sweep(args, res, plan: ExperimentPlan, name: str) -> None:
    meta = {"plan": plan.to_dict(), "seed": plan.seed, "delta": metrics.delta_fraction(res)}
    path = _out_path(args, name) or Path(name)
    io_formats.write_results(res, path, meta)
    print(f"delta {io_formats.fmt(meta['delta'])} -> {path}", file=sys.stderr)


def cmd_sweep(args) -> None:
    plan = _plan(args, {**_config(args), **_cli_network(args)})
    _write_sweep(args, experiments.run_sweep(plan, threads=args.threads), plan, f"sweep_{plan.strategy.value}.csv")


def cmd_core_sweep(args) -> None:
    cfg = {"network": {"kind": "core_periphery", "params": {}}, "m_core": 5, **_config(args), **_cli_network(args)}
    plan = _plan(args, cfg)
    res = experiments.run_core_split_sweep(plan, threads=args.threads)
    _write_sweep(args, res, plan, f"core_sweep_{plan.strategy.value}.csv")


def _emit_scan(args, scan: experiments.ScanResult, template: ExperimentPlan, name: str) -> None:
    rows = [(float(v), lab, i, float(d)) for v, lab, i, d in scan.rows]
    _emit_table(args, name, [scan.parameter, "label", "network", "delta"], rows,
                {"kind": f"{scan.parameter}-scan", "plan": template.to_dict(), "networks": args.networks})
    for v, lab, mean, std, n in scan.summary():
        print(f"{scan.parameter}={v:g} {lab}: delta {mean:.4f} +- {std:.4f} (n={n})", file=sys.stderr)


def cmd_gamma_scan(args) -> None:
    cfg = {"network": {"kind": "scale_free", "params": {}}, **_config(args)}
    template = _plan(args, cfg)
    scan = experiments.run_gamma_scan(_floats(args.gammas), template, _scaled(args.networks, args.scale),
                                      args.strategies.split(","), threads=args.threads)
    _emit_scan(args, scan, template, "gamma_scan.csv")


def cmd_p_scan(args) -> None:
    cfg = {"network": {"kind": "core_periphery", "params": {}}, "m_core": 5, **_config(args)}
    template = _plan(args, cfg)
    ks = _ints(args.k_values) if args.k_values else None
    scan = experiments.run_p_scan(_floats(args.ps), template, _scaled(args.networks, args.scale), ks,
                                  args.strategies.split(","), threads=args.threads)
    _emit_scan(args, scan, template, "p_scan.csv")


def cmd_reshuffle(args) -> None:
    g = io_formats.parse_edge_list(args.graph)
    n = experiments.resolve_swaps(args.swaps, g)
    h = generators.criss_cross_reshuffle(g, n, rngmod.stream(args.seed, rngmod.RESHUFFLE))
    _emit_graph(h, args, "reshuffled.txt")
    print(f"swaps {n}", file=sys.stderr)


def cmd_analyze(args) -> None:
    did = False
    if args.result:
        res, _ = io_formats.read_results(args.result)
        if args.delta or not (args.correlation or args.distance):
            print(io_formats.fmt(metrics.delta_fraction(res, args.threshold)))
            did = True
    if args.correlation or args.distance:
        g, _ = _load_graph(args, rngmod.stream(args.seed, rngmod.NETWORK))
        if args.correlation:
            deg = centrality.degree_scores(g).values
            fun = centrality.functionability_scores(g, args.alpha).values
            print(io_formats.fmt(metrics.pearson(deg, fun)))
        if args.distance:
            ctrl = selection.select_controllers(g, args.strategy or "degree", args.m,
                                                rngmod.stream(args.seed, rngmod.SELECTION))
            d = metrics.controller_distance_stats(g, ctrl)
            lam = centrality.reduced_laplacian_min_eig(g, ctrl)
            print(f"normalized {io_formats.fmt(d.normalized)} raw {io_formats.fmt(d.raw)} "
                  f"network_mean {io_formats.fmt(d.network_mean)} lambda_min {io_formats.fmt(lam)}")
        did = True
    if not did:
        raise UsageError("analyze needs a result file or --correlation/--distance with a graph")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="root seed (default 0)")
    p.add_argument("--scale", type=float, default=1.0, help="multiplier on replica/network counts")
    p.add_argument("--config", help="YAML/JSON plan file, or a result sidecar to replay")
    p.add_argument("--threads", type=int, default=None, help="worker threads; <= 0 uses every core")
    p.add_argument("--out", help="output file or directory (default stdout or $%s)" % OUT_ENV)


def _graph_source(p: argparse.ArgumentParser, required_kind: bool = False) -> None:
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--kind", choices=[k.replace("_", "-") for k in NetworkSpec.KINDS if k != "file"],
                   required=required_kind, help="generator")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter, repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kuramoto-pinning", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    strategies = [s.value for s in selection.Strategy]

    p = sub.add_parser("generate", help="emit a generated network as an edge list")
    _common(p)
    _graph_source(p, required_kind=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("centrality", help="per-node centrality scores")
    _common(p)
    _graph_source(p)
    p.add_argument("--measure", choices=[k.value for k in centrality.CentralityKind], default="degree")
    p.add_argument("--alpha", type=float, default=centrality.DEFAULT_ALPHA)
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("simulate", help="integrate one trajectory and emit (t, R)")
    _common(p)
    _graph_source(p)
    p.add_argument("--coupling", type=float)
    p.add_argument("--strength", type=float, default=1.0, help="control strength c")
    p.add_argument("--controllers", help="comma-separated node indices")
    p.add_argument("--m", type=int, default=0, help="number of controllers to select")
    p.add_argument("--strategy", choices=strategies, default="degree")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--record-every", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    for name, func, text in (("sweep", cmd_sweep, "synchronisation map over controller count and strength"),
                             ("core-sweep", cmd_core_sweep, "synchronisation map over core share and strength")):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("--kind", choices=[k.replace("_", "-") for k in NetworkSpec.KINDS])
        p.add_argument("--param", action="append", metavar="KEY=VALUE")
        p.add_argument("--strategy", choices=strategies)
        p.set_defaults(func=func)

    p = sub.add_parser("gamma-scan", help="delta against the scale-free exponent")
    _common(p)
    p.add_argument("--gammas", default="-2,-2.5,-3,-3.5,-4")
    p.add_argument("--networks", type=int, default=100)
    p.add_argument("--strategies", default="random,degree,functionability")
    p.set_defaults(func=cmd_gamma_scan)

    p = sub.add_parser("p-scan", help="delta against the core-periphery attachment probability")
    _common(p)
    p.add_argument("--ps", default="0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--networks", type=int, default=100)
    p.add_argument("--k-values", help="comma-separated controllers-in-core counts")
    p.add_argument("--strategies", default="degree,functionability")
    p.set_defaults(func=cmd_p_scan)

    p = sub.add_parser("reshuffle", help="degree-preserving criss-cross rewiring of an edge list")
    _common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--swaps", default="L/2", help="count, or L/2 / L for fractions of the edge count")
    p.set_defaults(func=cmd_reshuffle)

    p = sub.add_parser("analyze", help="delta, correlations and distance statistics")
    _common(p)
    p.add_argument("result", nargs="?", help="sweep result CSV")
    p.add_argument("--delta", action="store_true", help="fraction of cells with mean R-hat <= threshold")
    p.add_argument("--threshold", type=float)
    p.add_argument("--correlation", action="store_true", help="degree/functionability Pearson of a graph")
    p.add_argument("--distance", action="store_true", help="controller distance and reduced-Laplacian stats")
    p.add_argument("--strategy", choices=strategies)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--alpha", type=float, default=centrality.DEFAULT_ALPHA)
    _graph_source(p)
    p.set_defaults(func=cmd_analyze)
    return parser


_RUNTIME_ERRORS = (experiments.ExperimentError, generators.GenerationError, centrality.CentralityError,
                   centrality.NumericalError, dynamics.ResonanceError, dynamics.IntegrationError,
                   metrics.DegenerateBaselineError, io_formats.FormatError, selection.SelectionError,
                   OSError, ValueError, KeyError)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.seed_given = args.seed is not None
        if args.seed is None:
            args.seed = 0
        if args.threads is None and os.environ.get(experiments.THREADS_ENV):
            args.threads = int(os.environ[experiments.THREADS_ENV])
        args.func(args)
    except UsageError as exc:
        print(f"kuramoto-pinning: usage error: {exc}", file=sys.stderr)
        return 1
    except _RUNTIME_ERRORS as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"kuramoto-pinning: error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
