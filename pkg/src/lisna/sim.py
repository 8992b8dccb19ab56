"""Poisson point patterns on network edges, used as a verification oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import SpatialNetwork
from .pattern import Event, SnappedPattern, SnapRecord

MODELS = ("homogeneous_poisson", "inhomogeneous_poisson", "doubly_stochastic")


@dataclass(frozen=True)
class SimSpec:
    """Simulation model.

    ``rate`` is the events-per-unit-length rate for the homogeneous and
    doubly stochastic models; ``edge_rates`` maps edge id to rate for the
    inhomogeneous one (missing edges get ``rate``). ``sd`` is the log-scale
    standard deviation of the mean-one lognormal factor shared by all edges
    within a doubly stochastic replicate.
    """

    model: str = "homogeneous_poisson"
    rate: float = 1.0
    edge_rates: dict = field(default_factory=dict)
    sd: float = 0.5
    replicates: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.rate < 0 or any(r < 0 for r in self.edge_rates.values()):
            raise ValueError("rates must be nonnegative")
        if self.sd < 0:
            raise ValueError("sd must be nonnegative")


def edge_rates(net: SpatialNetwork, spec: SimSpec) -> np.ndarray:
    if spec.model == "inhomogeneous_poisson":
        for e in spec.edge_rates:
            net.edge(e)
        return np.array([spec.edge_rates.get(e, spec.rate) for e in net.edge_ids], dtype=float)
    return np.full(net.n_edges, float(spec.rate))


def simulate(net: SpatialNetwork, spec: SimSpec, positions: bool = True) -> SnappedPattern:
    """Draw ``spec.replicates`` independent patterns.

    Replicate ``r`` uses a generator seeded by ``(seed, r)``. Counts are
    Poisson per edge; with ``positions`` each event is also placed uniformly
    along its edge segment so the pattern can be written out as events.
    """
    base = edge_rates(net, spec)
    lengths = np.array([e.length for e in net.edges])
    tails = np.array([[net.vertex(e.tail).x, net.vertex(e.tail).y] for e in net.edges])
    heads = np.array([[net.vertex(e.head).x, net.vertex(e.head).y] for e in net.edges])
    counts = np.zeros((spec.replicates, net.n_edges), dtype=np.int64)
    events: list[Event] = []
    report: list[SnapRecord] = []
    for r in range(spec.replicates):
        rng = np.random.default_rng([int(spec.seed), r])
        rates = base
        if spec.model == "doubly_stochastic":
            rates = base * np.exp(spec.sd * rng.standard_normal() - spec.sd ** 2 / 2)
        counts[r] = rng.poisson(rates * lengths)
        if not positions:
            continue
        for j, n in enumerate(counts[r]):
            t = rng.random(n)
            xy = tails[j] + t[:, None] * (heads[j] - tails[j])
            for x, y in xy:
                report.append(SnapRecord(len(events), net.edge_ids[j], 0.0, True))
                events.append(Event(float(x), float(y), r))
    return SnappedPattern(net, tuple(range(spec.replicates)), counts, report,
                          events if positions else None)
