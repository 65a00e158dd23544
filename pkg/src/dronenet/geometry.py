"""Ground-node placement and aerial access-point positioning.

Roadside units (RSUs) are laid out either as a homogeneous Poisson pattern or
as a Matern type-I hard-core pattern; drones are placed on k-means centroids
of the RSU positions at a fixed altitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle with origin at (0, 0), dimensions in meters."""

    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("region dimensions must be positive")

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class RsuSite:
    """A roadside unit at ground level. Ids are 1-based and contiguous."""

    id: int
    x: float
    y: float


@dataclass(frozen=True)
class DroneSite:
    """A child-drone hovering at a fixed altitude. Ids are 1-based."""

    id: int
    x: float
    y: float
    altitude: float


@dataclass(frozen=True)
class PointProcessParams:
    """Parent intensity (points per m^2) and hard-core radius (m)."""

    density: float
    min_distance: float

    def __post_init__(self):
        if self.density < 0 or self.min_distance < 0:
            raise ValueError("density and min_distance must be non-negative")


@dataclass(frozen=True)
class LinkGeometry:
    horizontal_distance: float
    slant_distance: float
    elevation_angle_deg: float


@dataclass
class ClusteringResult:
    """Final centroids, RSU-to-cluster assignment and the squared-distance cost.

    ``objective_history`` records the cost after each assignment step; it is
    non-increasing for Lloyd's iteration.
    """

    centroids: list[tuple[float, float]]
    assignment: dict[int, int]
    final_objective: float
    objective_history: list[float] = field(default_factory=list)


def sample_matern_type1(region: Region, params: PointProcessParams, seed: int) -> list[RsuSite]:
    """Sample a Matern type-I hard-core pattern inside ``region``.

    A homogeneous Poisson parent process of intensity ``params.density`` is
    drawn, then every point with at least one other parent closer than
    ``params.min_distance`` is deleted (both members of a close pair are
    removed). Parents are drawn on a region extended by the hard-core radius
    on every side so that points near the border see the same parent
    neighborhood as interior points; only survivors inside the region are
    returned. Deterministic for a given seed (PCG64).

    Ids are assigned in order of ascending x, then y.
    """
    rng = np.random.default_rng(seed)
    if params.density == 0:
        return []
    buf = params.min_distance
    bw = region.width + 2 * buf
    bh = region.height + 2 * buf
    n = rng.poisson(params.density * bw * bh)
    if n == 0:
        return []
    xs = rng.uniform(-buf, region.width + buf, n)
    ys = rng.uniform(-buf, region.height + buf, n)
    pts = np.column_stack([xs, ys])

    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    conflicted = (d2 < params.min_distance**2).any(axis=1)

    inside = (xs >= 0) & (xs <= region.width) & (ys >= 0) & (ys <= region.height)
    keep = pts[inside & ~conflicted]
    order = np.lexsort((keep[:, 1], keep[:, 0]))
    keep = keep[order]
    return [RsuSite(i + 1, float(p[0]), float(p[1])) for i, p in enumerate(keep)]


def sample_poisson(region: Region, density: float, seed: int) -> list[RsuSite]:
    """Sample a plain homogeneous Poisson pattern of the given intensity."""
    rng = np.random.default_rng(seed)
    if density == 0:
        return []
    n = rng.poisson(density * region.area)
    xs = rng.uniform(0, region.width, n)
    ys = rng.uniform(0, region.height, n)
    order = np.lexsort((ys, xs))
    return [RsuSite(i + 1, float(xs[k]), float(ys[k])) for i, k in enumerate(order)]


def kmeans_place_drones(
    rsus: list[RsuSite],
    k: int,
    altitude: float,
    seed: int,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> tuple[list[DroneSite], ClusteringResult]:
    """Place ``k`` drones on k-means centroids of the RSU positions.

    Lloyd's iteration, initialized with ``k`` distinct RSU positions chosen
    uniformly at random. Assignment ties go to the lowest cluster index. An
    empty cluster is reseeded at the RSU currently farthest from its own
    centroid. Stops when the objective decrease falls below ``tol`` or after
    ``max_iters`` rounds.
    """
    u = len(rsus)
    if not rsus:
        raise ValueError("rsus must be non-empty")
    if k < 1 or k >= u:
        raise ValueError(f"k must satisfy 1 <= k < {u}, got {k}")
    if altitude <= 0:
        raise ValueError("altitude must be positive")

    rng = np.random.default_rng(seed)
    pts = np.array([[r.x, r.y] for r in rsus])
    centroids = pts[rng.choice(u, size=k, replace=False)].copy()

    history = []
    prev_obj = math.inf
    for _ in range(max_iters):
        d2 = np.sum((pts[:, None, :] - centroids[None, :, :]) ** 2, axis=-1)
        assign = np.argmin(d2, axis=1)
        obj = float(d2[np.arange(u), assign].sum())
        history.append(obj)
        if prev_obj - obj < tol:
            break
        prev_obj = obj

        new_centroids = centroids.copy()
        counts = np.bincount(assign, minlength=k)
        for l in range(k):
            if counts[l] > 0:
                new_centroids[l] = pts[assign == l].mean(axis=0)
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            dist_to_own = d2[np.arange(u), assign].copy()
            for l in empties:
                far = int(np.argmax(dist_to_own))
                new_centroids[l] = pts[far]
                dist_to_own[far] = -1.0
        centroids = new_centroids

    d2 = np.sum((pts[:, None, :] - centroids[None, :, :]) ** 2, axis=-1)
    assign = np.argmin(d2, axis=1)
    obj = float(d2[np.arange(u), assign].sum())
    if not history or obj != history[-1]:
        history.append(obj)

    drones = [
        DroneSite(l + 1, float(centroids[l, 0]), float(centroids[l, 1]), altitude)
        for l in range(k)
    ]
    result = ClusteringResult(
        centroids=[(float(c[0]), float(c[1])) for c in centroids],
        assignment={r.id: int(assign[i]) + 1 for i, r in enumerate(rsus)},
        final_objective=obj,
        objective_history=history,
    )
    return drones, result


def link_geometry(rsu: RsuSite, drone: DroneSite) -> LinkGeometry:
    """Horizontal distance, slant distance and elevation angle (degrees)."""
    if drone.altitude <= 0:
        raise ValueError("drone altitude must be positive")
    s = math.hypot(rsu.x - drone.x, rsu.y - drone.y)
    d = math.hypot(s, drone.altitude)
    theta = math.degrees(math.atan2(drone.altitude, s))
    return LinkGeometry(s, d, theta)
