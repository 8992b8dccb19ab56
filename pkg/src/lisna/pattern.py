"""Events, snapping to edge intervals, and counting measures."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import Path, SpatialNetwork, ancestors_edge_set, descendants_edge_set

log = logging.getLogger(__name__)

#: Incident-edge selectors: ``all`` = undirected lines, ``in``/``out`` = arcs
#: with head/tail at the vertex, ``fam`` = in + out, ``cg`` = every incident edge.
SELECTORS = ("all", "in", "out", "fam", "cg")


@dataclass(frozen=True)
class Event:
    x: float
    y: float
    replicate: int = 0
    mark: str | None = None


@dataclass(frozen=True)
class SnapRecord:
    index: int
    edge: int | None
    distance: float
    accepted: bool


@dataclass
class SnappedPattern:
    """Per-replicate event counts on the edges of one network.

    ``counts[r, j]`` is the number of events of replicate ``replicates[r]`` on
    edge ``network.edge_ids[j]``.
    """

    network: SpatialNetwork
    replicates: tuple[int, ...]
    counts: np.ndarray
    snap_report: list[SnapRecord] = field(default_factory=list)
    events: list[Event] | None = None

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (len(self.replicates), self.network.n_edges):
            raise ValueError(f"counts shape {self.counts.shape} does not match "
                             f"{len(self.replicates)} replicates x {self.network.n_edges} edges")
        if (self.counts < 0).any():
            raise ValueError("negative counts")
        self._rpos = {r: i for i, r in enumerate(self.replicates)}

    @property
    def n_replicates(self) -> int:
        return len(self.replicates)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def replicate_index(self, replicate: int) -> int:
        try:
            return self._rpos[replicate]
        except KeyError:
            raise KeyError(f"unknown replicate {replicate}") from None

    def edge_set_counts(self, edge_ids: Iterable[int]) -> np.ndarray:
        """Event counts over an edge set, one entry per replicate."""
        cols = [self.network.edge_position(e) for e in set(edge_ids)]
        return self.counts[:, cols].sum(axis=1)

    def edge_set_length(self, edge_ids: Iterable[int]) -> float:
        return math.fsum(self.network.edge(e).length for e in set(edge_ids))

    def count_edge(self, e: int, replicate: int = 0) -> int:
        return int(self.counts[self.replicate_index(replicate), self.network.edge_position(e)])

    def count_incident(self, v: int, selector: str = "all", replicate: int = 0) -> tuple[int, float]:
        edges = incident_edge_set(self.network, v, selector)
        return self._count(edges, replicate)

    def count_path(self, path: Path, variant: str = "full", replicate: int = 0) -> tuple[int, float]:
        return self._count(path_edge_set(path, variant), replicate)

    def _count(self, edges: set[int], replicate: int) -> tuple[int, float]:
        if not edges:
            return 0, 0.0
        r = self.replicate_index(replicate)
        return int(self.edge_set_counts(edges)[r]), self.edge_set_length(edges)


def incident_edge_set(net: SpatialNetwork, v: int, selector: str) -> set[int]:
    if selector == "all":
        return set(net.line_edges(v))
    if selector == "in":
        return set(net.in_edges(v))
    if selector == "out":
        return set(net.out_edges(v))
    if selector == "fam":
        return set(net.in_edges(v)) | set(net.out_edges(v))
    if selector == "cg":
        return set(net.incident_edges(v))
    raise ValueError(f"unknown selector {selector!r}; expected one of {SELECTORS}")


def path_edge_set(path: Path, variant: str = "full") -> set[int]:
    if not path.edges:
        raise ValueError("path has no edges")
    if variant == "full":
        return set(path.edges)
    if variant == "minus_terminal":
        return ancestors_edge_set(path)
    if variant == "minus_origin":
        return descendants_edge_set(path)
    raise ValueError(f"unknown path variant {variant!r}")


def _segment_arrays(net: SpatialNetwork) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([[net.vertex(e.tail).x, net.vertex(e.tail).y] for e in net.edges], dtype=float)
    b = np.array([[net.vertex(e.head).x, net.vertex(e.head).y] for e in net.edges], dtype=float)
    return a, b


def point_segment_distances(px: np.ndarray, py: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from each point to each segment, shape ``(points, segments)``."""
    d = b - a
    dd = (d ** 2).sum(axis=1)
    safe = np.where(dd > 0, dd, 1.0)
    rx = px[:, None] - a[None, :, 0]
    ry = py[:, None] - a[None, :, 1]
    t = np.clip((rx * d[None, :, 0] + ry * d[None, :, 1]) / safe, 0.0, 1.0)
    t = np.where(dd > 0, t, 0.0)
    return np.hypot(rx - t * d[None, :, 0], ry - t * d[None, :, 1])


def snap(net: SpatialNetwork, events: Sequence[Event], max_snap_distance: float = 0.0,
         replicates: Sequence[int] | None = None, chunk: int = 2048) -> SnappedPattern:
    """Assign each event to its nearest edge segment.

    Parameters
    ----------
    max_snap_distance : float
        Events farther than this from every edge are rejected. ``0`` disables
        the cutoff.
    replicates : sequence of int, optional
        Replicate ids to carry, including ones that received no events.
        Defaults to the ids seen in ``events`` (or ``(0,)`` if none).
    """
    if net.n_edges == 0:
        raise ValueError("cannot snap onto a network without edges")
    if max_snap_distance < 0:
        raise ValueError("max_snap_distance must be >= 0")
    seen = sorted({ev.replicate for ev in events})
    reps = tuple(sorted(set(replicates))) if replicates is not None else tuple(seen or [0])
    missing = set(seen) - set(reps)
    if missing:
        raise ValueError(f"events reference undeclared replicates {sorted(missing)}")
    rpos = {r: i for i, r in enumerate(reps)}
    counts = np.zeros((len(reps), net.n_edges), dtype=np.int64)
    a, b = _segment_arrays(net)
    scale = max(1.0, float(np.abs(np.concatenate([a, b])).max()))
    report: list[SnapRecord] = []
    for start in range(0, len(events), chunk):
        block = events[start:start + chunk]
        px = np.array([ev.x for ev in block], dtype=float)
        py = np.array([ev.y for ev in block], dtype=float)
        dist = point_segment_distances(px, py, a, b)
        best = dist.min(axis=1)
        # edges come sorted by id, so the first near-minimal column is the smallest id
        ties = dist <= best[:, None] + 1e-12 * scale
        j = ties.argmax(axis=1)
        for k, ev in enumerate(block):
            d = float(dist[k, j[k]])
            ok = max_snap_distance == 0 or d <= max_snap_distance
            eid = net.edge_ids[j[k]]
            report.append(SnapRecord(start + k, eid if ok else None, d, ok))
            if ok:
                counts[rpos[ev.replicate], j[k]] += 1
    rejected = sum(not rec.accepted for rec in report)
    if rejected:
        log.warning("%d of %d events farther than %g from every edge were rejected",
                    rejected, len(report), max_snap_distance)
    return SnappedPattern(net, reps, counts, report, list(events))


def pattern_from_counts(net: SpatialNetwork, counts: dict[tuple[int, int], int]
                        | dict[int, int], replicates: Sequence[int] | None = None) -> SnappedPattern:
    """Build a pattern directly from ``{edge: n}`` or ``{(replicate, edge): n}``."""
    keyed = {(k if isinstance(k, tuple) else (0, k)): n for k, n in counts.items()}
    reps = tuple(sorted(set(replicates) if replicates is not None
                        else ({r for r, _ in keyed} or {0})))
    rpos = {r: i for i, r in enumerate(reps)}
    arr = np.zeros((len(reps), net.n_edges), dtype=np.int64)
    for (r, e), n in keyed.items():
        arr[rpos[r], net.edge_position(e)] = n
    return SnappedPattern(net, reps, arr)
