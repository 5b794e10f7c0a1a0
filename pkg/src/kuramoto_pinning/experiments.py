"""Paired controlled/uncontrolled ensembles and parameter sweeps.

Every random draw comes from :func:`kuramoto_pinning.rng.stream` keyed by the
plan seed and a role-specific tuple:

* network of replica ``r``: ``(NETWORK, r)`` (``(NETWORK, 0)`` for fixed networks)
* frequencies and initial phases of replica ``r``, draw ``q``: ``(DYNAMICS, r, q)``
* random controller choice: ``(SELECTION, r, i)`` for axis index ``i``

so a sweep's output depends only on the plan, never on worker count or
scheduling. All cells of a sweep share the same replica networks and draws
(common random numbers); each replica's uncontrolled baseline is integrated
once and reused by every cell.
"""

from __future__ import annotations

import dataclasses
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from . import dynamics, generators, io_formats, metrics, rng as rngmod
from .graph import Graph
from .metrics import SweepResult
from .selection import Strategy, cached_scores, select_controllers, select_core_split

logger = logging.getLogger(__name__)

THREADS_ENV = "KURAMOTO_PINNING_THREADS"
UNUSABLE_EXCLUSION = 0.2
FILE_REPLICAS = 50


class ExperimentError(RuntimeError):
    pass


class CellError(ExperimentError):
    """Every replica of a cell was unusable."""


@dataclass(frozen=True)
class NetworkSpec:
    """Where replica networks come from.

    ``kind`` is one of ``scale_free``, ``core_periphery``, ``watts_strogatz``,
    ``ring``, ``star`` or ``file``; ``params`` are the generator keyword
    arguments. ``fixed`` forces one network for all replicas; by default only
    ``star`` and ``file`` sources are fixed.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    fixed: bool | None = None

    KINDS = ("scale_free", "core_periphery", "watts_strogatz", "ring", "star", "file")

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        if kind not in self.KINDS:
            raise ValueError(f"unknown network kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", dict(self.params))

    @property
    def is_fixed(self) -> bool:
        if self.fixed is not None:
            return bool(self.fixed)
        return self.kind in ("star", "file")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "params": dict(self.params)}
        if self.fixed is not None:
            d["fixed"] = self.fixed
        return d


def build_network(spec: NetworkSpec, rng: np.random.Generator,
                  reshuffle_rng: np.random.Generator | None = None) -> tuple[Graph, tuple[int, ...] | None]:
    """Materialise one network; returns ``(graph, core)`` with ``core`` only for core-periphery."""
    p = dict(spec.params)
    if spec.kind == "scale_free":
        window = tuple(p.pop("lcc_window", (85, 115)))
        return generators.gen_scale_free(p.pop("gamma", -3.0), window, rng, **p), None
    if spec.kind == "core_periphery":
        return generators.gen_core_periphery(p.get("n_core", 10), p.get("n_total", 100), p.get("p", 0.7), rng)
    if spec.kind == "watts_strogatz":
        return generators.gen_watts_strogatz(p.get("n", 100), p.get("k_mean", 10), p.get("p_ws", 0.1), rng), None
    if spec.kind == "ring":
        g = generators.gen_regular_ring(p.get("n", 50), p.get("k", 6))
        switches = resolve_swaps(p.get("switches", 0), g)
        return generators.criss_cross_reshuffle(g, switches, rng), None
    if spec.kind == "star":
        return generators.gen_star(p.get("n", 10)), None
    g = io_formats.parse_edge_list(p["path"])
    swaps = p.get("reshuffle")
    if swaps:
        g = generators.criss_cross_reshuffle(g, resolve_swaps(swaps, g), reshuffle_rng or rng)
    return g, None


def resolve_swaps(value: int | str, g: Graph) -> int:
    """Swap count, accepting the keyword ``"L/2"`` for half the edge count."""
    if isinstance(value, str):
        v = value.strip().upper()
        if v == "L/2":
            return g.n_edges // 2
        if v == "L":
            return g.n_edges
        return int(v)
    return int(value)


@dataclass(frozen=True)
class ExperimentPlan:
    network: NetworkSpec
    strategy: Strategy = Strategy.DEGREE
    m_axis: tuple[int, ...] = tuple(range(1, 31))
    c_axis: tuple[float, ...] = tuple(np.linspace(0.05, 3.0, 30).round(12).tolist())
    replicas: int = 100
    draws_per_network: int = 1
    seed: int = 0
    coupling: float = dynamics.DEFAULT_COUPLING
    dt: float = dynamics.DEFAULT_DT
    t_end: float = dynamics.DEFAULT_T_END
    record_every: int = 1
    transient_fraction: float = metrics.DEFAULT_TRANSIENT
    omega_mean: float = dynamics.OMEGA_MEAN
    omega_std: float = dynamics.OMEGA_STD
    freq_gap_min: float = dynamics.DEFAULT_FREQ_GAP
    neighbor_decay: float = dynamics.DEFAULT_NEIGHBOR_DECAY
    threshold: float = metrics.DEFAULT_THRESHOLD
    baseline_eps: float = metrics.BASELINE_EPS
    alpha: float = 0.5
    m_core: int | None = None
    k_axis: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        object.__setattr__(self, "m_axis", tuple(int(m) for m in self.m_axis))
        object.__setattr__(self, "c_axis", tuple(float(c) for c in self.c_axis))
        if self.k_axis is not None:
            object.__setattr__(self, "k_axis", tuple(int(k) for k in self.k_axis))
        if not self.m_axis or not self.c_axis:
            raise ValueError("m_axis and c_axis must be non-empty")
        if self.replicas < 1 or self.draws_per_network < 1:
            raise ValueError("replicas and draws_per_network must be >= 1")

    @property
    def samples_per_cell(self) -> int:
        return self.replicas * self.draws_per_network

    def replace(self, **changes) -> "ExperimentPlan":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["network"] = self.network.to_dict()
        d["strategy"] = self.strategy.value
        d["m_axis"] = list(self.m_axis)
        d["c_axis"] = list(self.c_axis)
        d["k_axis"] = None if self.k_axis is None else list(self.k_axis)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ExperimentPlan":
        d = dict(d)
        net = d.pop("network")
        if not isinstance(net, NetworkSpec):
            net = NetworkSpec(net["kind"], net.get("params", {}), net.get("fixed"))
        if net.kind == "file":
            # a fixed real network gets fewer, fresh-draw replicas by default
            d.setdefault("replicas", FILE_REPLICAS)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown plan keys: {sorted(unknown)}")
        for key in ("m_axis", "c_axis", "k_axis"):
            if key in d and d[key] is not None:
                d[key] = expand_axis(d[key])
        # YAML 1.1 leaves forms like 1e-6 as strings
        for f in dataclasses.fields(cls):
            if f.type in ("float", "int") and isinstance(d.get(f.name), str):
                d[f.name] = float(d[f.name]) if f.type == "float" else int(d[f.name])
        return cls(network=net, **d)


def expand_axis(spec: Any) -> tuple:
    """Axis from a list or a ``{start, stop, num}`` / ``{start, stop, step}`` mapping."""
    if isinstance(spec, Mapping):
        if "num" in spec:
            return tuple(np.linspace(spec["start"], spec["stop"], int(spec["num"])).round(12).tolist())
        step = spec.get("step", 1)
        vals = np.arange(spec["start"], spec["stop"] + step / 2, step)
        return tuple(vals.round(12).tolist())
    return tuple(spec)


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def _map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class _Replica:
    index: int
    draw: int
    graph: Graph
    core: tuple[int, ...] | None
    scores: Mapping[Strategy, np.ndarray | None]
    system: dynamics.OscillatorSystem
    baseline: float


class SweepEngine:
    """Shared replica setup (networks, centralities, draws, baselines) for one plan.

    ``graph``/``core`` override the plan's network source with a fixed network.
    """

    def __init__(self, plan: ExperimentPlan, strategies: Iterable[Strategy | str] | None = None,
                 threads: int | None = None, graph: Graph | None = None,
                 core: Sequence[int] | None = None, kernels=None):
        self.plan = plan
        self.strategies = [Strategy.parse(s) for s in (strategies or [plan.strategy])]
        self.threads = resolve_threads(threads)
        self.kernels = kernels
        self._graph = graph
        self._core = None if core is None else tuple(core)
        self._networks: dict[int, tuple[Graph, tuple[int, ...] | None, Mapping]] = {}
        self.replicas: list[_Replica] = []

    def _network(self, r: int):
        plan = self.plan
        key = 0 if (self._graph is not None or plan.network.is_fixed) else r
        if key not in self._networks:
            if self._graph is not None:
                g, core = self._graph, self._core
            else:
                g, core = build_network(plan.network, rngmod.stream(plan.seed, rngmod.NETWORK, key),
                                        rngmod.stream(plan.seed, rngmod.RESHUFFLE))
            self._networks[key] = (g, core, cached_scores(g, self.strategies, plan.alpha))
        return self._networks[key]

    def _integrate(self, system, ctl=None) -> float:
        p = self.plan
        traj = dynamics.integrate(system, ctl, p.dt, p.t_end, p.record_every, kernels=self.kernels)
        return metrics.asymptotic_order(traj, p.transient_fraction)

    def _setup(self, rq: tuple[int, int]) -> _Replica:
        r, q = rq
        p = self.plan
        g, core, scores = self._network(r)
        gen = rngmod.stream(p.seed, rngmod.DYNAMICS, r, q)
        om = dynamics.draw_frequencies(g.n_nodes, gen, p.omega_mean, p.omega_std, p.freq_gap_min)
        ph = dynamics.draw_phases(g.n_nodes, gen)
        system = dynamics.OscillatorSystem(ph, om, p.coupling, g)
        return _Replica(r, q, g, core, scores, system, self._integrate(system))

    def prepare(self) -> "SweepEngine":
        if self.replicas:
            return self
        p = self.plan
        # networks and centralities are built serially so caches stay deterministic
        for r in range(p.replicas):
            self._network(r)
        keys = [(r, q) for r in range(p.replicas) for q in range(p.draws_per_network)]
        self.replicas = _map(self._setup, keys, self.threads)
        return self

    def _controlled(self, rep: _Replica, controllers: tuple[int, ...], c: float) -> float:
        if len(controllers) < 2 or c == 0.0:
            # fewer than two controllers leave the frequency-weighted sum empty
            return rep.baseline
        p = self.plan
        ctl = dynamics.ControlConfig(controllers, c, p.neighbor_decay, p.freq_gap_min)
        return self._integrate(rep.system, ctl)

    def _controllers(self, rep: _Replica, strategy: Strategy, m: int, axis_index: int,
                     k_core: int | None = None) -> tuple[int, ...]:
        p = self.plan
        gen = rngmod.stream(p.seed, rngmod.SELECTION, rep.index, rep.draw, axis_index)
        if k_core is None:
            return select_controllers(rep.graph, strategy, m, gen, rep.scores[strategy])
        if rep.core is None:
            raise ExperimentError("core-split sweeps need a core-periphery network")
        return select_core_split(rep.graph, rep.core, k_core, m, strategy, gen, rep.scores[strategy])

    def _grid(self, strategy: Strategy, axis: Sequence[int], core_split: bool) -> SweepResult:
        p = self.plan
        self.prepare()
        reps = self.replicas
        n_a, n_c = len(axis), len(p.c_axis)
        selections = {}
        for i, a in enumerate(axis):
            for rep in reps:
                if core_split:
                    sel = self._controllers(rep, strategy, p.m_core, i, k_core=a)
                else:
                    sel = self._controllers(rep, strategy, a, i)
                selections[i, rep.index, rep.draw] = sel
        tasks = [(i, j, n) for i in range(n_a) for j in range(n_c) for n in range(len(reps))]

        def work(task):
            i, j, n = task
            rep = reps[n]
            if rep.baseline <= p.baseline_eps:
                return None
            try:
                ctl_r = self._controlled(rep, selections[i, rep.index, rep.draw], p.c_axis[j])
            except (dynamics.ResonanceError, dynamics.IntegrationError) as exc:
                return exc
            return ctl_r / rep.baseline

        results = _map(work, tasks, self.threads)
        values = np.full((n_a, n_c, len(reps)), np.nan)
        errors: dict[tuple[int, int], list[str]] = {}
        for (i, j, n), res in zip(tasks, results):
            if isinstance(res, Exception):
                errors.setdefault((i, j), []).append(f"replica {n}: {res}")
            elif res is not None:
                values[i, j, n] = res
        return _aggregate(list(axis), p, values, errors, "k" if core_split else "m")

    def sweep(self, strategy: Strategy | str | None = None) -> SweepResult:
        s = Strategy.parse(strategy or self.strategies[0])
        return self._grid(s, self.plan.m_axis, core_split=False)

    def core_split_sweep(self, strategy: Strategy | str | None = None) -> SweepResult:
        p = self.plan
        if p.m_core is None:
            raise ExperimentError("core-split sweeps need m_core")
        s = Strategy.parse(strategy or self.strategies[0])
        axis = p.k_axis if p.k_axis is not None else tuple(range(p.m_core + 1))
        return self._grid(s, axis, core_split=True)


def _aggregate(axis: list[int], plan: ExperimentPlan, values: np.ndarray,
               errors: Mapping[tuple[int, int], list[str]], axis_name: str) -> SweepResult:
    n_a, n_c, n_r = values.shape
    mean = np.full((n_a, n_c), np.nan)
    std = np.full((n_a, n_c), np.nan)
    valid = np.zeros((n_a, n_c), dtype=np.int64)
    flags: dict[tuple[int, int], list[str]] = {}
    for i in range(n_a):
        for j in range(n_c):
            v = values[i, j][~np.isnan(values[i, j])]
            valid[i, j] = v.size
            notes = list(errors.get((i, j), []))
            excluded = n_r - v.size
            if excluded:
                notes.append(f"excluded {excluded}/{n_r} replicas")
            if excluded > UNUSABLE_EXCLUSION * n_r:
                notes.append("unusable")
            if v.size:
                mean[i, j] = v.mean()
                std[i, j] = v.std()
            else:
                notes.append("cell error: no valid replicas")
            if notes:
                flags[(i, j)] = notes
    return SweepResult(axis, list(plan.c_axis), mean, std, valid, n_r, plan.threshold, axis_name, flags)


def run_cell(plan: ExperimentPlan, m: int, c: float, threads: int | None = None,
             **kw) -> tuple[float, float, list[str]]:
    """Mean and std of R-hat over the plan's replicas for one ``(m, c)`` cell.

    Raises
    ------
    CellError
        If no replica produced a usable R-hat.
    """
    res = SweepEngine(plan.replace(m_axis=(m,), c_axis=(c,)), threads=threads, **kw).sweep()
    notes = res.flags.get((0, 0), [])
    if res.n_valid[0, 0] == 0:
        raise CellError("; ".join(notes) or "no valid replicas")
    return float(res.mean_rhat[0, 0]), float(res.std_rhat[0, 0]), notes


def run_sweep(plan: ExperimentPlan, threads: int | None = None, **kw) -> SweepResult:
    return SweepEngine(plan, threads=threads, **kw).sweep()


def run_sweeps(plan: ExperimentPlan, strategies: Sequence[Strategy | str],
               threads: int | None = None, **kw) -> dict[Strategy, SweepResult]:
    """Sweeps for several strategies over the same replica networks and draws."""
    eng = SweepEngine(plan, strategies, threads=threads, **kw)
    return {s: eng.sweep(s) for s in eng.strategies}


def run_core_split_sweep(plan: ExperimentPlan, threads: int | None = None, **kw) -> SweepResult:
    if plan.network.kind != "core_periphery":
        raise ExperimentError("core-split sweeps need a core_periphery network source")
    return SweepEngine(plan, threads=threads, **kw).core_split_sweep()


def _sub_seed(seed: int, *key: int) -> int:
    return int(rngmod.stream(seed, rngmod.MISC, *key).integers(2 ** 63))


@dataclass
class ScanResult:
    """Per-network delta values of a gamma- or p-scan.

    ``rows`` hold ``(parameter, label, network_index, delta)``; use
    :meth:`summary` for mean and standard deviation per ``(parameter, label)``.
    """

    parameter: str
    rows: list[tuple[float, str, int, float]]

    def summary(self) -> list[tuple[float, str, float, float, int]]:
        groups: dict[tuple[float, str], list[float]] = {}
        for value, label, _, delta in self.rows:
            groups.setdefault((value, label), []).append(delta)
        return [(v, lab, float(np.mean(d)), float(np.std(d)), len(d)) for (v, lab), d in groups.items()]

    def mean(self, value: float, label: str) -> float:
        return float(np.mean([d for v, lab, _, d in self.rows if v == value and lab == label]))


def run_gamma_scan(gammas: Sequence[float], template: ExperimentPlan, networks: int,
                   strategies: Sequence[Strategy | str] = ("random", "degree", "functionability"),
                   threads: int | None = None) -> ScanResult:
    """Delta over independent scale-free networks for each exponent and strategy.

    Each network gets its own sweep with ``template.replicas`` frequency draws;
    all strategies are evaluated on the same networks and draws.
    """
    rows = []
    for gi, gamma in enumerate(gammas):
        if not -4.0 <= gamma <= -2.0:
            raise ValueError(f"gamma {gamma} outside [-4, -2]")
        params = dict(template.network.params) if template.network.kind == "scale_free" else {}
        params["gamma"] = float(gamma)
        for i in range(networks):
            seed = _sub_seed(template.seed, 0, gi, i)
            g, _ = build_network(NetworkSpec("scale_free", params), rngmod.stream(seed, rngmod.NETWORK))
            plan = template.replace(seed=seed, network=NetworkSpec("scale_free", params, fixed=True),
                                    draws_per_network=template.replicas, replicas=1)
            for s, res in run_sweeps(plan, strategies, threads=threads, graph=g).items():
                rows.append((float(gamma), s.value, i, metrics.delta_fraction(res)))
    return ScanResult("gamma", rows)


def run_p_scan(ps: Sequence[float], template: ExperimentPlan, networks: int,
               k_values: Sequence[int] | None = None,
               strategies: Sequence[Strategy | str] = ("degree", "functionability"),
               threads: int | None = None) -> ScanResult:
    """Delta over the strength axis per core-periphery ``p`` and core assignment ``k``.

    Labels are ``"<strategy>:k=<k>"``. Each network gets a core-split sweep
    with ``template.replicas`` frequency draws.
    """
    if template.m_core is None:
        raise ExperimentError("p-scan needs m_core")
    m = template.m_core
    ks = tuple(k_values) if k_values is not None else (0, 1, m)
    for p in ps:
        if not 0.5 <= p <= 1.0:
            raise ValueError(f"p {p} outside [0.5, 1]")
    rows = []
    for pi, p in enumerate(ps):
        params = dict(template.network.params) if template.network.kind == "core_periphery" else {}
        params["p"] = float(p)
        spec = NetworkSpec("core_periphery", params, fixed=True)
        for i in range(networks):
            seed = _sub_seed(template.seed, 1, pi, i)
            g, core = build_network(spec, rngmod.stream(seed, rngmod.NETWORK))
            plan = template.replace(seed=seed, network=spec, k_axis=ks,
                                    draws_per_network=template.replicas, replicas=1)
            eng = SweepEngine(plan, strategies, threads=threads, graph=g, core=core)
            for s in eng.strategies:
                res = eng.core_split_sweep(s)
                for row, k in enumerate(ks):
                    vals = np.nan_to_num(res.mean_rhat[row], nan=np.inf)
                    rows.append((float(p), f"{s.value}:k={k}", i, float(np.mean(vals <= plan.threshold))))
    return ScanResult("p", rows)
