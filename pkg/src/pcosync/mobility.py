"""Node placement, Brownian mobility with drift/repulsion, density tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import _kernels


@dataclass
class MobilityParams:
    """Brownian motion plus a weak outward drift and short-range repulsion.

    The force law is deliberately simple: what matters downstream is
    that the population spreads and density falls over time.  With
    ``enabled`` false the positions never move.
    """
    enabled: bool = False
    sigma: float = 2.0          # m per sqrt(s) Brownian intensity
    k_attract: float = 0.06     # m/s; applied with inverted sign (net outward)
    k_repel: float = 10.0       # m^3/s; saturated inverse-square kick inside r0
    r0: float = 30.0            # m, repulsion range
    step_dt: float = 1.0        # s

    def validate(self) -> None:
        if self.sigma < 0.0:
            raise ValueError("sigma must be non-negative")
        if self.step_dt <= 0.0:
            raise ValueError("step_dt must be positive")
        if self.r0 < 0.0 or self.k_repel < 0.0:
            raise ValueError("r0 and k_repel must be non-negative")


def place_uniform(n: int, side_m: float, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. uniform points in [0, side]^2, deterministic per generator state."""
    if n < 1:
        raise ValueError("need at least one node")
    return rng.uniform(0.0, side_m, size=(n, 2))


def step_mobility(positions: np.ndarray, params: MobilityParams,
                  rng: np.random.Generator, dt: float) -> np.ndarray:
    """One mobility step; returns new positions (input untouched).

    displacement = sigma*sqrt(dt)*N(0,1)
                 + dt * (outward drift at k_attract m/s + repulsion kicks)

    Nodes are unconfined: the placement square only bounds the initial
    layout, so a drifting population genuinely dilutes.
    """
    n = positions.shape[0]
    noise = params.sigma * math.sqrt(dt) * rng.standard_normal((n, 2))
    centroid = positions.mean(axis=0)
    away = positions - centroid
    norms = np.sqrt(np.einsum("ij,ij->i", away, away))
    safe = np.where(norms == 0.0, 1.0, norms)
    unit_away = away / safe[:, None]
    unit_away[norms == 0.0] = 0.0
    drift = params.k_attract * unit_away
    repel = _kernels.repulsion_forces(np.ascontiguousarray(positions, dtype=np.float64),
                                      params.r0, params.k_repel)
    return positions + noise + dt * (drift + repel)


def nearest_neighbor(i: int, positions: np.ndarray) -> tuple[int, float]:
    """Exact nearest node to i by Euclidean distance; ties to the lowest id."""
    n = positions.shape[0]
    if n < 2:
        raise ValueError("nearest_neighbor needs at least two nodes")
    deltas = positions - positions[i]
    d2 = np.einsum("ij,ij->i", deltas, deltas)
    d2[i] = np.inf
    j = int(np.argmin(d2))  # argmin returns the first (lowest-id) minimum
    return j, math.sqrt(float(d2[j]))


def nearest_neighbor_all(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vector form over a full distance matrix: (indices, distances)."""
    d = dist.copy()
    np.fill_diagonal(d, np.inf)
    idx = np.argmin(d, axis=1)
    return idx, d[np.arange(d.shape[0]), idx]


def density(positions: np.ndarray) -> float:
    """Nodes per m^2 over the convex hull of the layout.

    Degenerate hulls fall back to the bounding-box area; a layout with
    zero extent has no meaningful density and raises.
    """
    n = positions.shape[0]
    area = 0.0
    if n >= 3:
        try:
            area = ConvexHull(positions).volume  # 2-d "volume" is the area
        except QhullError:
            area = 0.0
    if area == 0.0:
        spans = positions.max(axis=0) - positions.min(axis=0)
        area = float(spans[0] * spans[1])
    if area == 0.0:
        raise ValueError("degenerate layout: zero hull and bounding-box area")
    return n / area
