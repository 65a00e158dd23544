"""Greedy RSU-to-drone association under bandwidth, link-count, QoS and
backhaul constraints, plus metrics and a brute-force oracle for small cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, TransmitPolicy


@dataclass
class DemandProfile:
    """Requested downlink rate per RSU id, in bits/s."""

    rates_bps: dict[int, float]

    @classmethod
    def draw(cls, rate_vector_bps, rsu_ids, seed: int) -> "DemandProfile":
        """Assign each RSU a rate drawn uniformly from the demand vector."""
        rng = np.random.default_rng(seed)
        vec = np.asarray(rate_vector_bps, dtype=float)
        if vec.size == 0 or np.any(vec <= 0):
            raise ValueError("rate vector must be non-empty and positive")
        picks = rng.choice(vec, size=len(rsu_ids))
        return cls({rid: float(r) for rid, r in zip(rsu_ids, picks)})

    def as_array(self, rsu_ids) -> np.ndarray:
        return np.array([self.rates_bps[r] for r in rsu_ids])


@dataclass(frozen=True)
class Constraints:
    bandwidth_per_drone: float = 400e6  # Hz
    max_links_per_drone: int = 20
    max_power: float = 1.5  # W
    sinr_min: float = 0.1  # linear
    interference_threshold: float = 1e-6  # W
    backhaul_rate: float = 1.4e9  # bits/s, may be math.inf

    def __post_init__(self):
        if min(self.bandwidth_per_drone, self.max_links_per_drone, self.max_power,
               self.sinr_min, self.interference_threshold) <= 0:
            raise ValueError("constraint values must be positive")
        if self.backhaul_rate <= 0:
            raise ValueError("backhaul rate must be positive")


@dataclass(frozen=True)
class EnergyModel:
    pa_inefficiency: float = 0.20
    circuit_power_per_link: float = 0.1  # W

    def __post_init__(self):
        if self.pa_inefficiency <= 0 or self.circuit_power_per_link <= 0:
            raise ValueError("energy model parameters must be positive")


@dataclass
class AssociationMatrix:
    """Binary U x V matrix; entry (i, j) = 1 links RSU row i to drone column j."""

    entries: np.ndarray

    def copy(self) -> "AssociationMatrix":
        return AssociationMatrix(self.entries.copy())

    def links(self):
        return list(zip(*np.nonzero(self.entries)))

    @property
    def served_count(self) -> int:
        return int(self.entries.sum())


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class NetworkMetrics:
    sum_rate: float
    served_count: int
    served_fraction: float
    avg_bandwidth_consumed: float
    energy_efficiency: float


def _check_dims(channel: ChannelRealization, demand: np.ndarray):
    u, _ = channel.shape
    if demand.shape != (u,):
        raise ValueError("demand vector does not match channel dimensions")


def greedy_associate(
    channel: ChannelRealization,
    demands: DemandProfile,
    constraints: Constraints,
) -> AssociationMatrix:
    """Two-phase greedy association followed by backhaul enforcement.

    Phase 1: every RSU nominates the single drone with its highest SINR
    (ties to the lowest drone id). Phase 2: each drone admits its nominees in
    descending spectral-efficiency order (ties to the lowest RSU id) while its
    link counter stays below the per-drone cap and the running bandwidth plus
    the nominee's requirement fits the per-drone bandwidth; the first nominee
    whose bandwidth does not fit ends that drone's admissions. Links below the
    SINR floor are never set. Phase 3: backhaul_enforce.
    """
    u, v = channel.shape
    demand = demands.as_array(channel.rsu_ids)
    _check_dims(channel, demand)

    sinr = channel.sinr_linear
    bw = channel.required_bandwidth_hz
    nominee_of = np.argmax(sinr, axis=1)  # ties resolve to lowest drone index

    entries = np.zeros((u, v), dtype=np.int8)
    se = np.log2(1.0 + sinr)
    for j in range(v):
        nominees = np.flatnonzero(nominee_of == j)
        order = sorted(nominees, key=lambda i: (-se[i, j], i))
        t_links = 0
        t_bw = 0.0
        for i in order:
            if t_links >= constraints.max_links_per_drone:
                break
            if sinr[i, j] < constraints.sinr_min:
                continue
            if t_bw + bw[i, j] <= constraints.bandwidth_per_drone:
                entries[i, j] = 1
                t_links += 1
                t_bw += bw[i, j]
            else:
                break

    assoc = AssociationMatrix(entries)
    return backhaul_enforce(assoc, demands, constraints, rsu_ids=channel.rsu_ids)


def backhaul_enforce(
    assoc: AssociationMatrix,
    demands: DemandProfile,
    constraints: Constraints,
    rsu_ids=None,
) -> AssociationMatrix:
    """De-associate links until the sum-rate fits the backhaul limit.

    While the sum-rate exceeds the limit: take the drone with the most links
    (ties to the lowest drone id) and clear its minimum-rate RSU (ties to the
    lowest RSU id).
    """
    out = assoc.copy()
    u, _ = out.entries.shape
    ids = rsu_ids if rsu_ids is not None else list(range(1, u + 1))
    demand = demands.as_array(ids)
    s_r = float((demand[:, None] * out.entries).sum())
    while s_r > constraints.backhaul_rate:
        loads = out.entries.sum(axis=0)
        j = int(np.argmax(loads))
        members = np.flatnonzero(out.entries[:, j])
        i = min(members, key=lambda m: (demand[m], m))
        out.entries[i, j] = 0
        s_r -= demand[i]
    return out


def sum_rate(assoc: AssociationMatrix, demands: DemandProfile, rsu_ids=None) -> float:
    u, _ = assoc.entries.shape
    ids = rsu_ids if rsu_ids is not None else list(range(1, u + 1))
    demand = demands.as_array(ids)
    return float((demand[:, None] * assoc.entries).sum())


def energy_efficiency(
    assoc: AssociationMatrix,
    policy: TransmitPolicy,
    model: EnergyModel,
    demands: DemandProfile,
    rsu_ids=None,
) -> float:
    """Sum-rate per Watt of amplifier-scaled transmit plus circuit power.

    Zero by convention when there are no active links.
    """
    served = assoc.served_count
    if served == 0:
        return 0.0
    s_r = sum_rate(assoc, demands, rsu_ids)
    tx_power = policy.per_drone_power * served
    return s_r / (model.pa_inefficiency * tx_power + served * model.circuit_power_per_link)


def check_feasibility(
    assoc: AssociationMatrix,
    channel: ChannelRealization,
    demands: DemandProfile,
    constraints: Constraints,
    policy: TransmitPolicy,
) -> list[Violation]:
    """Report every constraint violated by the association; empty means feasible."""
    u, v = channel.shape
    demand = demands.as_array(channel.rsu_ids)
    e = assoc.entries
    out = []

    bw_used = (channel.required_bandwidth_hz * e).sum(axis=0)
    for j in np.flatnonzero(bw_used > constraints.bandwidth_per_drone):
        out.append(Violation("bandwidth_cap", f"drone {channel.drone_ids[j]} uses {bw_used[j]:.6g} Hz"))

    loads = e.sum(axis=0)
    for j in np.flatnonzero(loads > constraints.max_links_per_drone):
        out.append(Violation("link_cap", f"drone {channel.drone_ids[j]} serves {int(loads[j])} RSUs"))

    if policy.per_drone_power > constraints.max_power:
        for i, j in zip(*np.nonzero(e)):
            out.append(Violation(
                "power_cap",
                f"link ({channel.rsu_ids[i]},{channel.drone_ids[j]}) power {policy.per_drone_power} W",
            ))

    rx = channel.link_gain * policy.per_drone_power
    for i, j in zip(*np.nonzero(e * (rx > constraints.interference_threshold))):
        out.append(Violation(
            "interference_cap",
            f"link ({channel.rsu_ids[i]},{channel.drone_ids[j]}) received power {rx[i, j]:.3g} W",
        ))

    for i, j in zip(*np.nonzero(e * (channel.sinr_linear < constraints.sinr_min))):
        out.append(Violation(
            "sinr_floor",
            f"link ({channel.rsu_ids[i]},{channel.drone_ids[j]}) SINR {channel.sinr_linear[i, j]:.3g}",
        ))

    for i in np.flatnonzero(e.sum(axis=1) > 1):
        out.append(Violation("single_association", f"RSU {channel.rsu_ids[i]} has multiple drones"))

    s_r = float((demand[:, None] * e).sum())
    if s_r > constraints.backhaul_rate:
        out.append(Violation("backhaul", f"sum-rate {s_r:.6g} exceeds limit {constraints.backhaul_rate:.6g}"))
    return out


def brute_force_optimal(
    channel: ChannelRealization,
    demands: DemandProfile,
    constraints: Constraints,
) -> tuple[AssociationMatrix, float]:
    """Exhaustive maximizer of the sum-rate on small instances (U*V <= 20).

    Enumerates every assignment of each RSU to one drone or none, subject to
    the per-drone bandwidth and link caps, the SINR floor, single association
    and the backhaul limit. Returns the lexicographically first maximizer.
    """
    u, v = channel.shape
    if u * v > 20:
        raise ValueError("instance too large for exhaustive search (U*V must be <= 20)")
    demand = demands.as_array(channel.rsu_ids)
    sinr = channel.sinr_linear
    bw = channel.required_bandwidth_hz

    best_rate = -1.0
    best = np.zeros((u, v), dtype=np.int8)
    choice = np.full(u, -1, dtype=int)
    bw_used = np.zeros(v)
    links = np.zeros(v, dtype=int)

    def rec(i: int, rate: float):
        nonlocal best_rate, best
        if i == u:
            if rate > best_rate:
                best_rate = rate
                best = np.zeros((u, v), dtype=np.int8)
                for r, c in enumerate(choice):
                    if c >= 0:
                        best[r, c] = 1
            return
        rec(i + 1, rate)  # leave RSU i unassigned
        for j in range(v):
            if sinr[i, j] < constraints.sinr_min:
                continue
            if links[j] + 1 > constraints.max_links_per_drone:
                continue
            if bw_used[j] + bw[i, j] > constraints.bandwidth_per_drone:
                continue
            if rate + demand[i] > constraints.backhaul_rate:
                continue
            choice[i] = j
            links[j] += 1
            bw_used[j] += bw[i, j]
            rec(i + 1, rate + demand[i])
            choice[i] = -1
            links[j] -= 1
            bw_used[j] -= bw[i, j]

    rec(0, 0.0)
    return AssociationMatrix(best), float(best_rate)


def compute_metrics(
    assoc: AssociationMatrix,
    channel: ChannelRealization,
    demands: DemandProfile,
    policy: TransmitPolicy,
    model: EnergyModel,
) -> NetworkMetrics:
    """Aggregate network metrics for one association."""
    u, v = channel.shape
    served = assoc.served_count
    s_r = sum_rate(assoc, demands, channel.rsu_ids)
    bw_total = float((channel.required_bandwidth_hz * assoc.entries).sum())
    return NetworkMetrics(
        sum_rate=s_r,
        served_count=served,
        served_fraction=served / u if u else 0.0,
        avg_bandwidth_consumed=bw_total / v if v else 0.0,
        energy_efficiency=energy_efficiency(assoc, policy, model, demands, channel.rsu_ids),
    )
