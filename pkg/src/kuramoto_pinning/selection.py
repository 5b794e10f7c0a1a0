"""Controller placement strategies."""

from __future__ import annotations

from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from . import centrality
from .graph import Graph


class SelectionError(ValueError):
    pass


class Strategy(str, Enum):
    RANDOM = "random"
    DEGREE = "degree"
    FUNCTIONABILITY = "functionability"
    BETWEENNESS_HIGH = "betweenness-high"
    BETWEENNESS_LOW = "betweenness-low"

    @classmethod
    def parse(cls, name: "str | Strategy") -> "Strategy":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower().replace("_", "-"))
        except ValueError:
            choices = "|".join(s.value for s in cls)
            raise SelectionError(f"unknown strategy {name!r}; expected {choices}") from None

    @property
    def score_kind(self) -> centrality.CentralityKind | None:
        return {
            Strategy.DEGREE: centrality.CentralityKind.DEGREE,
            Strategy.FUNCTIONABILITY: centrality.CentralityKind.FUNCTIONABILITY,
            Strategy.BETWEENNESS_HIGH: centrality.CentralityKind.BETWEENNESS,
            Strategy.BETWEENNESS_LOW: centrality.CentralityKind.BETWEENNESS,
        }.get(self)


def strategy_scores(g: Graph, strategy: Strategy | str, alpha: float = centrality.DEFAULT_ALPHA) -> np.ndarray | None:
    """Scores a strategy ranks by, or ``None`` for random selection."""
    kind = Strategy.parse(strategy).score_kind
    return None if kind is None else centrality.scores(g, kind, alpha).values


def _rank(candidates: np.ndarray, values: np.ndarray, m: int, lowest: bool) -> list[int]:
    # stable sort on ascending index keeps index tie-breaks
    key = values[candidates] if lowest else -values[candidates]
    order = np.argsort(key, kind="stable")
    return [int(c) for c in candidates[order[:m]]]


def _pick(candidates: np.ndarray, strategy: Strategy, m: int,
          values: np.ndarray | None, rng: np.random.Generator | None) -> list[int]:
    if m == 0:
        return []
    if strategy is Strategy.RANDOM:
        if rng is None:
            raise SelectionError("random selection needs an rng")
        return [int(c) for c in rng.choice(candidates, size=m, replace=False)]
    return _rank(candidates, values, m, lowest=strategy is Strategy.BETWEENNESS_LOW)


def select_controllers(g: Graph, strategy: Strategy | str, m: int,
                       rng: np.random.Generator | None = None,
                       scores: np.ndarray | None = None) -> tuple[int, ...]:
    """Pick ``m`` controllers.

    Score strategies take the top ``m`` nodes (bottom ``m`` for
    ``betweenness-low``), ties going to the lower index. Pass precomputed
    ``scores`` to avoid recomputing centralities.
    """
    strategy = Strategy.parse(strategy)
    if not 0 <= m <= g.n_nodes:
        raise SelectionError(f"cannot select {m} controllers among {g.n_nodes} nodes")
    if scores is None and strategy is not Strategy.RANDOM:
        scores = strategy_scores(g, strategy)
    return tuple(_pick(np.arange(g.n_nodes), strategy, m, scores, rng))


def select_core_split(g: Graph, core: Sequence[int], k_core: int, m: int,
                      strategy: Strategy | str, rng: np.random.Generator | None = None,
                      scores: np.ndarray | None = None) -> tuple[int, ...]:
    """``k_core`` controllers from ``core`` and ``m - k_core`` from the rest.

    Each side is ranked by the strategy restricted to that side. Core picks
    come first in the returned tuple.
    """
    strategy = Strategy.parse(strategy)
    core_arr = np.asarray(sorted(set(int(c) for c in core)), dtype=np.int64)
    periphery = np.setdiff1d(np.arange(g.n_nodes), core_arr)
    if not (0 <= k_core <= m and k_core <= len(core_arr) and m - k_core <= len(periphery)):
        raise SelectionError(
            f"infeasible split: k_core={k_core}, m={m}, core={len(core_arr)}, periphery={len(periphery)}")
    if scores is None and strategy is not Strategy.RANDOM:
        scores = strategy_scores(g, strategy)
    chosen = _pick(core_arr, strategy, k_core, scores, rng)
    chosen += _pick(periphery, strategy, m - k_core, scores, rng)
    return tuple(chosen)


def cached_scores(g: Graph, strategies: Sequence[Strategy | str],
                  alpha: float = centrality.DEFAULT_ALPHA) -> Mapping[Strategy, np.ndarray | None]:
    """Compute each needed centrality once for a set of strategies."""
    by_kind = {}
    out = {}
    for s in map(Strategy.parse, strategies):
        kind = s.score_kind
        if kind is None:
            out[s] = None
            continue
        if kind not in by_kind:
            by_kind[kind] = centrality.scores(g, kind, alpha).values
        out[s] = by_kind[kind]
    return out
