"""Second-order intensity and covariance density for pairs of network entities.

Entities are edge sets resolved from short text descriptions::

    edge 5            edge 5 in 3        edge 5 out 3
    nach(2)  pa(2)  child(2)  fam(2)  cg(2)
    path 1-2-3        path 1..7          (explicit / shortest undirected)
    dpath 1-2-3       dpath 1..7         (direction-preserving)
    anch(1-2-3)       dech(1..7)         (directed path minus last / first arc)

Vertex ids may carry a ``v`` prefix (``nach(v2)``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .graph import NetworkError, Path, SpatialNetwork, Traversal
from .pattern import SnappedPattern, incident_edge_set, path_edge_set
from .weights import hop_matrix


class EntityError(ValueError):
    pass


@dataclass(frozen=True)
class EntityRef:
    label: str
    kind: str
    edges: frozenset
    length: float


@dataclass(frozen=True)
class SecondOrderResult:
    """``per_replicate`` holds the two normalized counts for an entity pair, or
    the product mean and covariance for a lag estimate."""

    intensity: float
    covariance: float
    per_replicate: list = field(repr=False)
    n_replicates: int
    n_pairs: int | None = None

    @property
    def degenerate(self) -> bool:
        return self.n_replicates == 1 and self.n_pairs is None


_SET_NAMES = {
    "nach": "all", "neighborhood": "all", "neighbors": "all",
    "pa": "in", "parents": "in",
    "child": "out", "children": "out",
    "fam": "fam", "family": "fam",
    "cg": "cg",
}
_VID = r"v?(\d+)"
_EDGE_RE = re.compile(rf"^edge\s+(\d+)(?:\s+(in|out)\s+{_VID})?$")
_SET_RE = re.compile(rf"^(\w+)\(\s*{_VID}\s*\)$")
_PATH_RE = re.compile(r"^(path|dpath)\s+(.+)$")
_REDUCED_RE = re.compile(r"^(anch|dech|ancestors|descendants)\(\s*(?:path\s+)?(.+?)\s*\)$")


def _vid(token: str) -> int:
    token = token.strip()
    if token.startswith("v"):
        token = token[1:]
    if not token.isdigit():
        raise EntityError(f"bad vertex id {token!r}")
    return int(token)


def parse_path(net: SpatialNetwork, text: str, directed: bool = False) -> Path:
    """``1-2-3`` (explicit vertices) or ``1..7`` (shortest path)."""
    text = text.strip()
    try:
        if ".." in text:
            u, v = text.split("..")
            mode = Traversal.DIRECTED if directed else Traversal.UNDIRECTED
            path = net.shortest_path(_vid(u), _vid(v), mode)
        else:
            path = net.path([_vid(t) for t in text.split("-")])
    except (NetworkError, KeyError) as exc:
        raise EntityError(str(exc).strip("'\"")) from None
    if directed and not path.directed:
        raise EntityError(f"path {path.handle} is not direction-preserving")
    return path


def resolve(net: SpatialNetwork, entity: str) -> EntityRef:
    """Map an entity description onto its edge set and total length."""
    text = " ".join(entity.strip().split())
    try:
        edges, kind = _resolve_edges(net, text)
    except KeyError as exc:
        raise EntityError(f"{entity!r}: {exc.args[0]}") from None
    if not edges:
        raise EntityError(f"{entity!r} resolves to an empty edge set")
    length = sum(sorted(net.edge(e).length for e in edges))
    return EntityRef(text, kind, frozenset(edges), float(length))


def _resolve_edges(net: SpatialNetwork, text: str) -> tuple[set[int], str]:
    m = _EDGE_RE.match(text)
    if m:
        e = int(m.group(1))
        edge = net.edge(e)
        role = m.group(2)
        if role:
            v = int(m.group(3))
            net.vertex(v)
            ok = edge.directed and (edge.head if role == "in" else edge.tail) == v
            if not ok:
                raise EntityError(f"edge {e} is not an {role}-arc of vertex {v}")
            return {e}, f"edge-{role}"
        return {e}, "edge"
    m = _REDUCED_RE.match(text)
    if m:
        path = parse_path(net, m.group(2), directed=True)
        variant = "minus_terminal" if m.group(1) in ("anch", "ancestors") else "minus_origin"
        return path_edge_set(path, variant), "ancestors" if variant == "minus_terminal" else "descendants"
    m = _SET_RE.match(text)
    if m:
        name = m.group(1).lower()
        if name not in _SET_NAMES:
            raise EntityError(f"unknown node set {name!r}")
        return incident_edge_set(net, int(m.group(2)), _SET_NAMES[name]), name
    m = _PATH_RE.match(text)
    if m:
        directed = m.group(1) == "dpath"
        return set(parse_path(net, m.group(2), directed).edges), m.group(1)
    raise EntityError(f"cannot parse entity {text!r}")


def normalized_counts(p: SnappedPattern, ref: EntityRef) -> np.ndarray:
    """Per-replicate counts on the entity divided by its length."""
    return p.edge_set_counts(ref.edges) / ref.length


def second_order(p: SnappedPattern, a: EntityRef, b: EntityRef) -> SecondOrderResult:
    """Second-order intensity and covariance density of a disjoint entity pair.

    The covariance density is the across-replicate covariance (divided by the replicate count) of
    the normalized counts, so a single replicate always yields 0.
    """
    shared = a.edges & b.edges
    if shared:
        raise EntityError(f"{a.label!r} and {b.label!r} share edges {sorted(shared)}")
    ya = normalized_counts(p, a)
    yb = normalized_counts(p, b)
    product = float(np.mean(ya * yb))
    cov = float(np.mean((ya - ya.mean()) * (yb - yb.mean())))
    pairs = [(float(s), float(t)) for s, t in zip(ya, yb)]
    return SecondOrderResult(product, cov, pairs, p.n_replicates)


def edge_lags(net: SpatialNetwork, mode: Traversal | str = Traversal.UNDIRECTED) -> np.ndarray:
    """Minimum hop distance between the endpoint sets of every ordered edge pair.

    Unreachable pairs get ``-1``; edges sharing a vertex are at lag 0.
    """
    d = hop_matrix(net, mode).astype(float)
    d[d < 0] = np.inf
    tails = np.array([net.vertex_position(e.tail) for e in net.edges], dtype=int)
    heads = np.array([net.vertex_position(e.head) for e in net.edges], dtype=int)
    lag = np.minimum.reduce([
        d[np.ix_(tails, tails)], d[np.ix_(tails, heads)],
        d[np.ix_(heads, tails)], d[np.ix_(heads, heads)],
    ])
    out = np.where(np.isfinite(lag), lag, -1).astype(int)
    np.fill_diagonal(out, -1)
    return out


def lag_second_order(p: SnappedPattern, lag: int, mode: Traversal | str = Traversal.UNDIRECTED,
                     replicate: int | None = None) -> SecondOrderResult:
    """Single-realization second-order estimate at edge lag ``lag``.

    Averages normalized count products over every ordered edge pair at that
    lag and subtracts the squared mean edge intensity. Assumes the pattern
    is homogeneous across the network. Without ``replicate`` the per-replicate
    estimates are averaged.
    """
    if lag < 1:
        raise ValueError(f"lag must be >= 1, got {lag}")
    net = p.network
    ii, jj = np.nonzero(edge_lags(net, mode) == lag)
    if ii.size == 0:
        raise EntityError(f"no edge pairs at lag {lag}")
    lengths = np.array([e.length for e in net.edges])
    y = p.counts / lengths
    if replicate is not None:
        y = y[[p.replicate_index(replicate)]]
    product_r = (y[:, ii] * y[:, jj]).mean(axis=1)
    cov_r = product_r - y.mean(axis=1) ** 2
    pairs = [(float(s), float(t)) for s, t in zip(product_r, cov_r)]
    return SecondOrderResult(float(product_r.mean()), float(cov_r.mean()), pairs,
                             y.shape[0], n_pairs=int(ii.size))
