"""Partial and cumulative higher-order adjacency and spatial weight matrices."""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .graph import SpatialNetwork, Traversal

PARTIAL = "partial"
CUMULATIVE = "cumulative"
BINARY = "binary"
ROW = "row-standardized"


@dataclass(frozen=True)
class WeightMatrix:
    order: int
    flavor: str
    mode: Traversal
    standardization: str
    entries: np.ndarray
    vertex_index: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.vertex_index)

    @property
    def s0(self) -> float:
        return float(self.entries.sum())

    def restrict(self, vertex_ids: Sequence[int]) -> "WeightMatrix":
        """Sub-matrix over ``vertex_ids`` (rows and columns), in that order.

        Row-standardized matrices are re-standardized after the cut.
        """
        pos = {v: i for i, v in enumerate(self.vertex_index)}
        try:
            idx = np.array([pos[v] for v in vertex_ids], dtype=int)
        except KeyError as exc:
            raise KeyError(f"vertex {exc.args[0]} not in weight matrix") from None
        sub = self.entries[np.ix_(idx, idx)]
        out = replace(self, entries=sub, vertex_index=tuple(vertex_ids))
        if self.standardization == ROW:
            out = standardize(replace(out, standardization=BINARY))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(["vertex"] + [str(v) for v in self.vertex_index]) + "\n")
        for v, row in zip(self.vertex_index, self.entries):
            buf.write(",".join([str(v)] + [_fmt(x) for x in row]) + "\n")
        return buf.getvalue()


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def hop_matrix(net: SpatialNetwork, mode: Traversal | str = Traversal.UNDIRECTED,
               max_depth: int | None = None) -> np.ndarray:
    """Hop distances between all vertex pairs; ``-1`` marks unreachable.

    Row ``i`` holds distances *from* vertex ``net.vertex_ids[i]``.
    """
    n = net.n_vertices
    d = np.full((n, n), -1, dtype=int)
    for i, v in enumerate(net.vertex_ids):
        for u, hops in net.bfs_distances(v, mode, max_depth=max_depth).items():
            d[i, net.vertex_position(u)] = hops
    return d


def adjacency(net: SpatialNetwork, order: int = 1, flavor: str = PARTIAL,
              mode: Traversal | str = Traversal.UNDIRECTED) -> WeightMatrix:
    """Binary adjacency of the given order.

    ``partial`` marks pairs at hop distance exactly ``order``; ``cumulative``
    marks pairs at distance ``1..order``. Distances come from truncated BFS, so
    walks that revisit vertices never count.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    mode = Traversal.parse(mode)
    return adjacency_from_hops(hop_matrix(net, mode, max_depth=order), order, flavor, mode,
                               net.vertex_ids)


def adjacency_from_hops(d: np.ndarray, order: int, flavor: str, mode: Traversal,
                        vertex_index: Sequence[int]) -> WeightMatrix:
    """Same as :func:`adjacency`, from a precomputed :func:`hop_matrix`."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if flavor == PARTIAL:
        hit = d == order
    elif flavor == CUMULATIVE:
        hit = (d >= 1) & (d <= order)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return WeightMatrix(order, flavor, Traversal.parse(mode), BINARY, hit.astype(float),
                        tuple(vertex_index))


def standardize(w: WeightMatrix) -> WeightMatrix:
    sums = w.entries.sum(axis=1, keepdims=True)
    safe = np.where(sums > 0, sums, 1.0)
    return replace(w, entries=w.entries / safe, standardization=ROW)
