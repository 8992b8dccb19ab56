"""Global and local autocorrelation of node-wise intensity fields.

All statistics take a :class:`NodeField` and a :class:`WeightMatrix`; the
matrix is cut down to the field's vertices before use, so vertices without a
defined intensity drop out of both rows and columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graph import SpatialNetwork, Traversal
from .intensity import IntensityField
from .weights import BINARY, PARTIAL, ROW, WeightMatrix, adjacency_from_hops, hop_matrix, standardize

PERMUTATIONS = 999


class UndefinedStatisticError(ValueError):
    """Zero variance, zero total weight or a zero denominator."""


@dataclass(frozen=True)
class NodeField:
    """One value per vertex, in ``vertex_index`` order."""

    vertex_index: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.values, dtype=float)
        if data.ndim != 1 or data.size != len(self.vertex_index):
            raise ValueError("field values do not match the vertex index")
        if not np.isfinite(data).all():
            raise ValueError("field values must be finite")
        if len(set(self.vertex_index)) != data.size:
            raise ValueError("duplicate vertex ids in field")
        object.__setattr__(self, "values", data)
        object.__setattr__(self, "vertex_index", tuple(self.vertex_index))

    @classmethod
    def from_intensity(cls, field: IntensityField) -> "NodeField":
        return cls(tuple(field.values), np.array(list(field.values.values()), dtype=float))

    @classmethod
    def from_mapping(cls, values: dict) -> "NodeField":
        return cls(tuple(values), np.array(list(values.values()), dtype=float))

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def centered(self) -> np.ndarray:
        return self.values - self.values.mean()

    def with_values(self, data: np.ndarray) -> "NodeField":
        return NodeField(self.vertex_index, data)


@dataclass(frozen=True)
class AutocorrResult:
    statistic: str
    value: float
    null_mean: float
    null_sd: float
    p_value: float
    method: str
    permutations: int | None = None
    seed: int | None = None
    lag: int = 1


@dataclass(frozen=True)
class LocalResult:
    statistic: str
    vertex_index: tuple[int, ...]
    values: np.ndarray
    quadrants: tuple[str, ...] | None = None
    null_mean: np.ndarray | None = None
    null_sd: np.ndarray | None = None
    p_values: np.ndarray | None = None
    permutations: int | None = None
    seed: int | None = None


@dataclass(frozen=True)
class CorrelogramRow:
    lag: int
    value: float | None
    p_value: float | None
    p_bonferroni: float | None
    s0: float
    null_mean: float | None = None
    null_sd: float | None = None


# -- helpers ------------------------------------------------------------------

def _weights(f: NodeField, w: WeightMatrix) -> np.ndarray:
    if w.vertex_index != f.vertex_index:
        w = w.restrict(f.vertex_index)
    return w.entries


def _check(f: NodeField, minimum: int = 3) -> None:
    if f.size < minimum:
        raise UndefinedStatisticError(f"need at least {minimum} vertices, got {f.size}")


def _sum_sq(dev: np.ndarray) -> float:
    ss = float(np.dot(dev, dev))
    if ss <= 0:
        raise UndefinedStatisticError("field has zero variance")
    return ss


def _s0(mat: np.ndarray) -> float:
    s0 = float(mat.sum())
    if s0 <= 0:
        raise UndefinedStatisticError("weights sum to zero")
    return s0


# -- global statistics --------------------------------------------------------

def lagged_autocovariance(f: NodeField, w: WeightMatrix, centered: bool = True) -> float:
    """Weighted cross-product of the field with itself over the total weight.

    Uses mean-centered values by default, raw values with ``centered=False``.
    """
    mat = _weights(f, w)
    s0 = _s0(mat)
    v = f.centered if centered else f.values
    return float(v @ mat @ v) / s0


def autocorrelation(f: NodeField, w: WeightMatrix) -> float:
    """Lagged autocovariance over the field variance (divisor n)."""
    _check(f)
    var = _sum_sq(f.centered) / f.size
    return lagged_autocovariance(f, w, centered=True) / var


def moran_i(f: NodeField, w: WeightMatrix) -> float:
    _check(f)
    mat = _weights(f, w)
    dev = f.centered
    return f.size / _s0(mat) * float(dev @ mat @ dev) / _sum_sq(dev)


def geary_c(f: NodeField, w: WeightMatrix) -> float:
    _check(f)
    mat = _weights(f, w)
    dev = f.centered
    data = f.values
    diff = data[:, None] - data[None, :]
    return (f.size - 1) / (2 * _s0(mat)) * float((mat * diff ** 2).sum()) / _sum_sq(dev)


def _require_nonnegative(f: NodeField) -> None:
    if (f.values < 0).any():
        raise ValueError("G statistics need nonnegative values")


def getis_g_global(f: NodeField, w: WeightMatrix) -> float:
    """Weighted over unweighted sum of value cross-products, diagonal excluded."""
    _check(f)
    _require_nonnegative(f)
    mat = _weights(f, w).copy()
    np.fill_diagonal(mat, 0.0)
    data = f.values
    den = float(data.sum() ** 2 - np.dot(data, data))
    if den <= 0:
        raise UndefinedStatisticError("G denominator is zero")
    return float(data @ mat @ data) / den


def _local_g_parts(f: NodeField, mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = f.size
    sd = math.sqrt(float(np.mean(f.values ** 2)) - f.mean ** 2)
    rs = mat.sum(axis=1)
    spread = (n * (mat ** 2).sum(axis=1) - rs ** 2) / (n - 1)
    denom = sd * np.sqrt(np.clip(spread, 0.0, None))
    return rs, denom


def local_g(f: NodeField, w: WeightMatrix) -> LocalResult:
    """Standardized local G for every vertex; ``nan`` where the denominator vanishes."""
    _check(f)
    _require_nonnegative(f)
    mat = _weights(f, w)
    rs, denom = _local_g_parts(f, mat)
    num = mat @ f.values - f.mean * rs
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(denom > 0, num / np.where(denom > 0, denom, 1.0), np.nan)
    return LocalResult("local_g", f.vertex_index, vals)


def getis_g(f: NodeField, w: WeightMatrix, scope: str | int = "global") -> float:
    """Global G (``scope="global"``) or the local G of one vertex."""
    if scope == "global":
        return getis_g_global(f, w)
    try:
        i = f.vertex_index.index(scope)
    except ValueError:
        raise KeyError(f"vertex {scope} not in field") from None
    val = local_g(f, w).values[i]
    if not np.isfinite(val):
        raise UndefinedStatisticError(f"local G of vertex {scope} has a zero denominator")
    return float(val)


# -- local statistics ---------------------------------------------------------

def _quadrants(dev: np.ndarray, mat: np.ndarray) -> tuple[str, ...]:
    rs = mat.sum(axis=1)
    lag = (mat @ dev) / np.where(rs > 0, rs, 1.0)
    out = []
    for d, li, r in zip(dev, lag, rs):
        if r == 0:
            out.append("isolated")
        else:
            out.append(("high" if d >= 0 else "low") + "-" + ("high" if li >= 0 else "low"))
    return tuple(out)


def local_moran(f: NodeField, w: WeightMatrix) -> LocalResult:
    """Local Moran value per vertex, with high/low quadrant labels.

    Each value is the centered value times the weighted sum of centered
    neighbour values, scaled by ``(n - 1)`` over the total sum of squares.
    """
    _check(f)
    mat = _weights(f, w)
    dev = f.centered
    vals = dev * (mat @ dev) * (f.size - 1) / _sum_sq(dev)
    return LocalResult("local_moran", f.vertex_index, vals, _quadrants(dev, mat))


def local_geary(f: NodeField, w: WeightMatrix, unweighted: bool = False) -> LocalResult:
    """Weighted squared differences to each neighbour over the population variance.

    ``unweighted=True`` evaluates the unweighted double-sum variant on raw
    values instead, which is the same number for every vertex.
    """
    _check(f)
    data = f.values
    if unweighted:
        sq = float(np.dot(data, data))
        if sq <= 0:
            raise UndefinedStatisticError("field is identically zero")
        total = float(((data[:, None] - data[None, :]) ** 2).sum())
        val = total / sq / (sq / f.size)
        return LocalResult("local_geary_unweighted", f.vertex_index, np.full(f.size, val))
    mat = _weights(f, w)
    var = _sum_sq(f.centered) / f.size
    vals = (mat * (data[:, None] - data[None, :]) ** 2).sum(axis=1) / var
    return LocalResult("local_geary", f.vertex_index, vals)


def moran_scatter(f: NodeField, w: WeightMatrix) -> tuple[list[tuple[int, float, float]], float]:
    """Spatial lag of each vertex and the least-squares slope of lag on value.

    Vertices without neighbours are left out of both the points and the fit.
    """
    if w.standardization != ROW:
        raise ValueError("moran_scatter needs a row-standardized weight matrix")
    mat = _weights(f, w)
    keep = mat.sum(axis=1) > 0
    lag = mat @ f.values
    xs, ls = f.values[keep], lag[keep]
    dx = xs - xs.mean()
    ssx = float(np.dot(dx, dx))
    if ssx <= 0:
        raise UndefinedStatisticError("field has zero variance over connected vertices")
    slope = float(np.dot(dx, ls - ls.mean())) / ssx
    points = [(v, float(a), float(b))
              for v, a, b, ok in zip(f.vertex_index, f.values, lag, keep) if ok]
    return points, slope


# -- inference ----------------------------------------------------------------

def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def _batch_global(name: str, f: NodeField, mat: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized statistic over a stack of permuted fields, shape ``(M, n)``."""
    n = f.size
    s0 = _s0(mat)
    avg = f.mean
    ss = _sum_sq(f.centered)
    if name == "moran":
        return lambda stack: n / s0 * (((stack - avg) @ mat) * (stack - avg)).sum(axis=1) / ss
    if name == "geary":
        rc = mat.sum(axis=1) + mat.sum(axis=0)
        return lambda stack: (n - 1) / (2 * s0) * (
            (stack ** 2) @ rc - 2 * ((stack @ mat) * stack).sum(axis=1)) / ss
    if name == "autocorrelation":
        return lambda stack: (((stack - avg) @ mat) * (stack - avg)).sum(axis=1) / s0 / (ss / n)
    if name == "getis_g":
        mat0 = mat.copy()
        np.fill_diagonal(mat0, 0.0)
        den = float(f.values.sum() ** 2 - np.dot(f.values, f.values))
        if den <= 0:
            raise UndefinedStatisticError("G denominator is zero")
        return lambda stack: ((stack @ mat0) * stack).sum(axis=1) / den
    raise ValueError(f"unknown global statistic {name!r}")


GLOBAL_STATISTICS = {
    "moran": moran_i,
    "geary": geary_c,
    "autocorrelation": autocorrelation,
    "getis_g": getis_g_global,
}


def _p_value(obs: float, sims: np.ndarray, center: float) -> float:
    dev = abs(obs - center)
    hits = int(np.count_nonzero(np.abs(sims - center) >= dev * (1 - 1e-12)))
    return (1 + hits) / (sims.size + 1)


def permutation_test(statistic: str, f: NodeField, w: WeightMatrix,
                     permutations: int = PERMUTATIONS, seed: int = 0) -> AutocorrResult:
    """Randomization test of a global statistic.

    Permutation ``r`` shuffles the field with a generator seeded by
    ``(seed, r)``. The two-sided p-value counts permuted statistics at least
    as far from the permutation mean as the observed one.
    """
    if permutations < 99:
        raise ValueError("use at least 99 permutations")
    if statistic == "getis_g":
        _require_nonnegative(f)
    obs = GLOBAL_STATISTICS[statistic](f, w)
    mat = _weights(f, w)
    batch = _batch_global(statistic, f, mat)
    stack = np.empty((permutations, f.size))
    for r in range(permutations):
        stack[r] = _stream(seed, r).permutation(f.values)
    sims = batch(stack)
    mu = float(sims.mean())
    return AutocorrResult(statistic, float(obs), mu, float(sims.std(ddof=1)),
                          _p_value(obs, sims, mu), "permutation", permutations, seed, w.order)


def _weight_sums(mat: np.ndarray) -> tuple[float, float, float]:
    s0 = float(mat.sum())
    s1 = 0.5 * float(((mat + mat.T) ** 2).sum())
    s2 = float(((mat.sum(axis=1) + mat.sum(axis=0)) ** 2).sum())
    return s0, s1, s2


def analytic_test(statistic: str, f: NodeField, w: WeightMatrix) -> AutocorrResult:
    """Normal approximation for Moran's I or Geary's C under the normality assumption."""
    mat = _weights(f, w)
    n = f.size
    s0, s1, s2 = _weight_sums(mat)
    if statistic == "moran":
        obs = moran_i(f, w)
        mean = -1.0 / (n - 1)
        var = (n * n * s1 - n * s2 + 3 * s0 * s0) / ((n * n - 1) * s0 * s0) - mean ** 2
    elif statistic == "geary":
        obs = geary_c(f, w)
        mean = 1.0
        var = ((2 * s1 + s2) * (n - 1) - 4 * s0 * s0) / (2 * (n + 1) * s0 * s0)
    else:
        raise ValueError(f"no analytic approximation for {statistic!r}")
    sd = math.sqrt(var)
    p = math.erfc(abs(obs - mean) / sd / math.sqrt(2))
    return AutocorrResult(statistic, float(obs), mean, sd, p, "analytic-normal", lag=w.order)


LOCAL_STATISTICS = ("local_moran", "local_geary", "local_g")


def local_permutation_test(statistic: str, f: NodeField, w: WeightMatrix,
                           permutations: int = PERMUTATIONS, seed: int = 0) -> LocalResult:
    """Conditional permutation test for a local statistic.

    For vertex ``i`` its own value stays put while the other values are
    shuffled ``permutations`` times with a generator seeded by ``(seed, i)``.
    """
    if permutations < 99:
        raise ValueError("use at least 99 permutations")
    mat = _weights(f, w)
    data, n, avg = f.values, f.size, f.mean
    if statistic == "local_moran":
        obs = local_moran(f, w)
        scale = (n - 1) / _sum_sq(f.centered)
    elif statistic == "local_geary":
        obs = local_geary(f, w)
        scale = n / _sum_sq(f.centered)
    elif statistic == "local_g":
        obs = local_g(f, w)
        rs, denom = _local_g_parts(f, mat)
    else:
        raise ValueError(f"unknown local statistic {statistic!r}")

    mu = np.full(n, np.nan)
    sd = np.full(n, np.nan)
    p = np.full(n, np.nan)
    idx = np.arange(n)
    for i in range(n):
        others = np.delete(idx, i)
        wi = mat[i, others]
        draws = _stream(seed, i).permuted(np.tile(data[others], (permutations, 1)), axis=1)
        if statistic == "local_moran":
            sims = (data[i] - avg) * scale * ((draws - avg) @ wi)
        elif statistic == "local_geary":
            sims = scale * (((data[i] - draws) ** 2) @ wi)
        else:
            if not denom[i] > 0:
                continue
            sims = (draws @ wi - avg * rs[i]) / denom[i]
        mu[i] = sims.mean()
        sd[i] = sims.std(ddof=1)
        p[i] = _p_value(float(obs.values[i]), sims, mu[i])
    return LocalResult(statistic, f.vertex_index, obs.values, obs.quadrants,
                       mu, sd, p, permutations, seed)


def correlogram(f: NodeField, net: SpatialNetwork, statistic: str = "moran", max_lag: int = 8,
                permutations: int = PERMUTATIONS, seed: int = 0,
                mode: Traversal | str = Traversal.UNDIRECTED) -> list[CorrelogramRow]:
    """Statistic and permutation p-value at each partial lag ``1..max_lag``.

    Lags with no vertex pairs among the field's vertices come back with
    ``value=None``. Bonferroni factor is ``max_lag``.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if statistic not in ("moran", "geary"):
        raise ValueError(f"correlogram supports moran and geary, not {statistic!r}")
    mode = Traversal.parse(mode)
    d = hop_matrix(net, mode, max_depth=max_lag)
    rows = []
    for lag in range(1, max_lag + 1):
        wl = adjacency_from_hops(d, lag, PARTIAL, mode, net.vertex_ids).restrict(f.vertex_index)
        if wl.s0 == 0:
            rows.append(CorrelogramRow(lag, None, None, None, 0.0))
            continue
        res = permutation_test(statistic, f, wl, permutations, seed)
        rows.append(CorrelogramRow(lag, res.value, res.p_value,
                                   min(1.0, max_lag * res.p_value), wl.s0,
                                   res.null_mean, res.null_sd))
    return rows


def weights_for(net: SpatialNetwork, f: NodeField, order: int = 1, flavor: str = PARTIAL,
                mode: Traversal | str = Traversal.UNDIRECTED,
                standardization: str = BINARY) -> WeightMatrix:
    """Weights of the given order over the network, cut down to the field's vertices."""
    mode = Traversal.parse(mode)
    d = hop_matrix(net, mode, max_depth=order)
    w = adjacency_from_hops(d, order, flavor, mode, net.vertex_ids).restrict(f.vertex_index)
    return standardize(w) if standardization == ROW else w


__all__ = [
    "NodeField", "AutocorrResult", "LocalResult", "CorrelogramRow", "UndefinedStatisticError",
    "lagged_autocovariance", "autocorrelation", "moran_i", "geary_c", "getis_g",
    "getis_g_global", "local_g", "local_moran", "local_geary", "moran_scatter",
    "permutation_test", "local_permutation_test", "analytic_test", "correlogram",
    "weights_for",
]

