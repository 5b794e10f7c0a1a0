"""Edge-list ingestion, result files and experiment configs.

Numbers are written with ``'.'`` decimals and 10 significant digits so
re-running a recorded plan reproduces its files byte for byte.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import yaml

from . import __version__
from .graph import Graph, build_graph
from .metrics import SweepResult

SCHEMA_VERSION = 1


class FormatError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".10g")


def parse_edge_list(path: str | os.PathLike) -> Graph:
    """Read ``u v [w]`` lines into a symmetric unweighted graph.

    Labels are arbitrary tokens, numbered in order of first appearance.
    Weights are ignored, reversed duplicates collapse into one edge and
    self-loops are dropped. ``#`` starts a comment line.
    """
    labels: dict[str, int] = {}
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) not in (2, 3):
                raise FormatError(f"{path}:{lineno}: expected 'u v [w]', got {text!r}")
            if len(parts) == 3:
                try:
                    float(parts[2])
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: weight {parts[2]!r} is not a number") from None
            ids = [labels.setdefault(tok, len(labels)) for tok in parts[:2]]
            edges.append(ids)
    if not labels:
        raise FormatError(f"{path}: no edges")
    return build_graph(len(labels), edges)


def write_edge_list(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# nodes {g.n_nodes} edges {g.n_edges}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def sidecar_path(path: str | os.PathLike) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".json")


def _write_sidecar(path, meta: Mapping[str, Any]) -> None:
    payload = {"schema_version": SCHEMA_VERSION, "code_version": __version__, **meta}
    with open(sidecar_path(path), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def read_sidecar(path: str | os.PathLike) -> dict:
    with open(sidecar_path(path), encoding="utf-8") as fh:
        meta = json.load(fh)
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise FormatError(f"schema version {meta.get('schema_version')} != {SCHEMA_VERSION}")
    return meta


def write_results(result: SweepResult, path: str | os.PathLike,
                  meta: Mapping[str, Any] | None = None) -> None:
    """Write a sweep as CSV plus a ``<path>.json`` sidecar."""
    axis = result.axis_name
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([axis, "c", "mean_rhat", "std_rhat", "n_valid_replicas"])
        for i, m in enumerate(result.m_axis):
            for j, c in enumerate(result.c_axis):
                w.writerow([int(m), fmt(c), fmt(result.mean_rhat[i, j]),
                            fmt(result.std_rhat[i, j]), int(result.n_valid[i, j])])
    flags = {f"{i},{j}": notes for (i, j), notes in sorted(result.flags.items())}
    _write_sidecar(path, {"kind": "sweep", "axis_name": axis, "replicas": result.replicas,
                          "threshold": result.threshold, "flags": flags, **(meta or {})})


def read_results(path: str | os.PathLike) -> tuple[SweepResult, dict]:
    meta = read_sidecar(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[1:] != ["c", "mean_rhat", "std_rhat", "n_valid_replicas"]:
        raise FormatError(f"{path}: unexpected header {header}")
    m_axis = sorted({int(r[0]) for r in body}, key=[int(r[0]) for r in body].index)
    c_axis = sorted({float(r[1]) for r in body}, key=[float(r[1]) for r in body].index)
    shape = (len(m_axis), len(c_axis))
    if len(body) != shape[0] * shape[1]:
        raise FormatError(f"{path}: {len(body)} rows do not form a full grid")
    mean = np.array([float(r[2]) for r in body]).reshape(shape)
    std = np.array([float(r[3]) for r in body]).reshape(shape)
    valid = np.array([int(r[4]) for r in body]).reshape(shape)
    flags = {tuple(int(x) for x in k.split(",")): v for k, v in meta.get("flags", {}).items()}
    res = SweepResult(m_axis, c_axis, mean, std, valid, int(meta.get("replicas", 0)),
                      float(meta.get("threshold", 0.15)), header[0], flags)
    return res, meta


def write_table(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]],
                meta: Mapping[str, Any] | None = None) -> None:
    """Generic CSV with 10-significant-digit floats and an optional sidecar."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    if meta is not None:
        _write_sidecar(path, meta)


def write_trajectory(times: Sequence[float], r_series: Sequence[float], path, meta=None) -> None:
    write_table(path, ["t", "R"], zip(map(float, times), map(float, r_series)), meta)


def write_scores(values: Sequence[float], path, meta=None) -> None:
    write_table(path, ["node", "score"], ((i, float(v)) for i, v in enumerate(values)), meta)


def load_config(path: str | os.PathLike) -> dict:
    """Load a YAML (or JSON, which YAML accepts) experiment config."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh) if str(path).endswith(".json") else yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise FormatError(f"{path}: config must be a mapping")
    return data
