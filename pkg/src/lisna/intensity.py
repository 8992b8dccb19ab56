"""First-order network intensity estimators (events per unit length).

Every estimator is a plug-in count/length ratio. ``replicate`` selects one
replicate id; ``None`` averages over all replicates of the pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import Path
from .pattern import SnappedPattern, incident_edge_set, path_edge_set


class UndefinedIntensityError(ValueError):
    """The selected edge set is empty, so the estimator has no value."""


POOLED = "pooled"

_MEAN_SELECTORS = {"neighbors": "all", "parents": "in", "children": "out"}
_SET_SELECTORS = {"neighborhood": "all", "parents": "in", "children": "out",
                  "family": "fam", "cg": "cg"}
_PATH_VARIANTS = {"mean": "full", "pooled": "full",
                  "ancestors": "minus_terminal", "descendants": "minus_origin"}

NODE_LEVELS = {
    "node_mean": ("mean", "neighbors"),
    "parent_mean": ("mean", "parents"),
    "children_mean": ("mean", "children"),
    "neighborhood": ("set", "neighborhood"),
    "parents": ("set", "parents"),
    "children": ("set", "children"),
    "family": ("set", "family"),
    "cg_node": ("cg", None),
}
PATH_LEVELS = {"path_mean": "mean", "path_pooled": "pooled",
               "ancestors": "ancestors", "descendants": "descendants"}
LEVELS = ("edge",) + tuple(NODE_LEVELS) + tuple(PATH_LEVELS)


@dataclass(frozen=True)
class IntensityField:
    level: str
    values: dict
    replicate: int | str

    def __len__(self) -> int:
        return len(self.values)

    def ids(self) -> list:
        return list(self.values)

    def array(self) -> np.ndarray:
        return np.array(list(self.values.values()), dtype=float)

    def to_rows(self) -> list[tuple]:
        return [(k, self.level, self.replicate, v) for k, v in self.values.items()]


def _counts(p: SnappedPattern, edges: Iterable[int], replicate: int | None) -> float:
    per_rep = p.edge_set_counts(edges)
    if replicate is None:
        return float(per_rep.mean())
    return float(per_rep[p.replicate_index(replicate)])


def set_intensity(p: SnappedPattern, edges: Iterable[int], replicate: int | None = 0) -> float:
    """Pooled intensity of an arbitrary edge set: total count over total length."""
    edges = set(edges)
    if not edges:
        raise UndefinedIntensityError("empty edge set")
    return _counts(p, edges, replicate) / p.edge_set_length(edges)


def edge_intensity(p: SnappedPattern, e: int, role: str = "any", vertex: int | None = None,
                   replicate: int | None = 0) -> float:
    """Intensity on a single edge.

    ``role`` is ``"any"``, ``"in"`` or ``"out"``; the latter two check that
    ``e`` is an arc with head (resp. tail) ``vertex`` but do not change the value.
    """
    edge = p.network.edge(e)
    if role != "any":
        if vertex is None:
            raise ValueError(f"role {role!r} needs a vertex")
        if role == "in":
            ok = edge.directed and edge.head == vertex
        elif role == "out":
            ok = edge.directed and edge.tail == vertex
        else:
            raise ValueError(f"unknown edge role {role!r}")
        if not ok:
            raise ValueError(f"edge {e} is not an {role}-arc of vertex {vertex}")
    return _counts(p, (e,), replicate) / edge.length


def node_mean_intensity(p: SnappedPattern, v: int, selector: str = "neighbors",
                        replicate: int | None = 0) -> float:
    """Average of edge intensities over the incident lines, in-arcs or out-arcs of ``v``."""
    try:
        edges = incident_edge_set(p.network, v, _MEAN_SELECTORS[selector])
    except KeyError:
        raise ValueError(f"unknown selector {selector!r}") from None
    if not edges:
        raise UndefinedIntensityError(f"vertex {v} has no {selector}")
    return _mean_edge_intensity(p, edges, replicate)


def _mean_edge_intensity(p: SnappedPattern, edges: Iterable[int], replicate: int | None) -> float:
    vals = [edge_intensity(p, e, replicate=replicate) for e in sorted(edges)]
    return float(np.mean(vals))


def pooled_set_intensity(p: SnappedPattern, v: int, selector: str | Sequence[str] = "neighborhood",
                         replicate: int | None = 0) -> float:
    """Total count over total length of an incident edge set of ``v``.

    ``selector`` may also be a sequence such as ``("neighborhood", "children")``
    to pool a union of incident sets.
    """
    names = (selector,) if isinstance(selector, str) else tuple(selector)
    edges: set[int] = set()
    for name in names:
        try:
            edges |= incident_edge_set(p.network, v, _SET_SELECTORS[name])
        except KeyError:
            raise ValueError(f"unknown selector {name!r}") from None
    if not edges:
        raise UndefinedIntensityError(f"vertex {v} has an empty {'+'.join(names)} set")
    return set_intensity(p, edges, replicate)


def cg_node_intensity(p: SnappedPattern, v: int, replicate: int | None = 0) -> float:
    """Mean edge intensity over every incident edge of ``v`` regardless of orientation."""
    edges = set(p.network.incident_edges(v))
    if not edges:
        raise UndefinedIntensityError(f"vertex {v} is isolated")
    return _mean_edge_intensity(p, edges, replicate)


def path_intensity(p: SnappedPattern, path: Path, variant: str = "pooled",
                   replicate: int | None = 0) -> float:
    """Path intensity.

    ``mean`` averages per-edge intensities along the path, ``pooled`` divides
    the path's total count by its total length, and ``ancestors`` /
    ``descendants`` pool over the directed path without its last / first arc.
    """
    try:
        edges = path_edge_set(path, _PATH_VARIANTS[variant])
    except KeyError:
        raise ValueError(f"unknown path variant {variant!r}") from None
    if not edges:
        raise UndefinedIntensityError(f"{variant} set of path {path.handle} is empty")
    if variant == "mean":
        return _mean_edge_intensity(p, edges, replicate)
    return set_intensity(p, edges, replicate)


def node_intensity(p: SnappedPattern, v: int, level: str, replicate: int | None = 0) -> float:
    kind, selector = NODE_LEVELS[level]
    if kind == "mean":
        return node_mean_intensity(p, v, selector, replicate)
    if kind == "set":
        return pooled_set_intensity(p, v, selector, replicate)
    return cg_node_intensity(p, v, replicate)


def field(p: SnappedPattern, level: str = "node_mean", replicate: int | None = 0,
          paths: Sequence[Path] = ()) -> IntensityField:
    """Evaluate one intensity level over every edge, vertex, or given path.

    Vertices whose selected edge set is empty are left out.
    """
    label = POOLED if replicate is None else replicate
    if level == "edge":
        vals = {e: edge_intensity(p, e, replicate=replicate) for e in p.network.edge_ids}
    elif level in NODE_LEVELS:
        vals = {}
        for v in p.network.vertex_ids:
            try:
                vals[v] = node_intensity(p, v, level, replicate)
            except UndefinedIntensityError:
                continue
    elif level in PATH_LEVELS:
        vals = {path.handle: path_intensity(p, path, PATH_LEVELS[level], replicate)
                for path in sorted(paths, key=lambda q: q.vertices)}
    else:
        raise ValueError(f"unknown intensity level {level!r}; expected one of {LEVELS}")
    return IntensityField(level, vals, label)
