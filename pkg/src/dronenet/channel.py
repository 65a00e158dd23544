"""Air-to-ground link budget: LoS probability, path loss, fading, SINR, bandwidth.

All dB quantities are power ratios (10*log10); the noise power is configured
in dB relative to 1 W (dBW).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DroneSite, LinkGeometry, RsuSite

FADING_DETERMINISTIC_ZERO = "deterministic_zero"
FADING_SAMPLED = "sampled"


@dataclass(frozen=True)
class Environment:
    """Propagation constants for the probabilistic LoS/NLoS model."""

    alpha: float = 9.61
    beta: float = 0.16  # per degree of elevation angle
    excess_los_db: float = 1.0
    excess_nlos_db: float = 20.0
    carrier_wavelength: float = 0.15
    noise_power_db: float = -125.0  # dBW
    nakagami_shape: float = 4.0
    fading_floor_db: float = -10.0
    fading_mode: str = FADING_DETERMINISTIC_ZERO

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.carrier_wavelength <= 0:
            raise ValueError("carrier wavelength must be positive")
        if self.nakagami_shape < 0.5:
            raise ValueError("nakagami shape must be >= 0.5")
        if self.fading_mode not in (FADING_DETERMINISTIC_ZERO, FADING_SAMPLED):
            raise ValueError(f"unknown fading mode {self.fading_mode!r}")

    @property
    def noise_power_w(self) -> float:
        return db_to_linear(self.noise_power_db)


@dataclass(frozen=True)
class TransmitPolicy:
    """Fixed per-drone transmit power. Extension point for power allocation."""

    per_drone_power: float = 1.5
    max_power: float = 1.5

    def __post_init__(self):
        if not 0 < self.per_drone_power <= self.max_power:
            raise ValueError("0 < per_drone_power <= max_power required")


@dataclass
class ChannelRealization:
    """Per-link quantities for all RSU x drone pairs, as (U, V) arrays."""

    rsu_ids: list[int]
    drone_ids: list[int]
    horizontal_m: np.ndarray
    slant_m: np.ndarray
    theta_deg: np.ndarray
    plos: np.ndarray
    path_loss_db: np.ndarray
    fading_db: np.ndarray
    link_gain: np.ndarray
    received_power_w: np.ndarray
    interference_w: np.ndarray
    sinr_linear: np.ndarray
    required_bandwidth_hz: np.ndarray
    noise_power_w: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.sinr_linear.shape


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def _plos(theta_deg, env: Environment):
    return 1.0 / (1.0 + env.alpha * np.exp(-env.beta * (np.asarray(theta_deg, dtype=float) - env.alpha)))


def los_probability(theta_deg: float, env: Environment) -> float:
    """Sigmoid-in-elevation-angle LoS probability; theta in (0, 90] degrees."""
    if not 0 < theta_deg <= 90:
        raise ValueError(f"theta must be in (0, 90] degrees, got {theta_deg}")
    return float(_plos(theta_deg, env))


def free_space_path_loss_db(d: float, wavelength: float) -> float:
    """20*log10(4*pi*d / wavelength)."""
    if d <= 0 or wavelength <= 0:
        raise ValueError("distance and wavelength must be positive")
    return 20.0 * math.log10(4.0 * math.pi * d / wavelength)


def _nakagami_envelope(rng: np.random.Generator, m: float, size=None):
    # envelope g with E[g^2] = 1: g^2 ~ Gamma(shape=m, scale=1/m)
    return np.sqrt(rng.gamma(m, 1.0 / m, size=size))


def sample_fading_db(rho_los: float, env: Environment, seed) -> float:
    """Shadow-fading term in dB, clamped from below at the configured floor.

    Two independent Nakagami envelopes (unit spread) are drawn for the LoS and
    NLoS components; each enters in dB as 20*log10 of its envelope and the two
    are mixed by the LoS/NLoS probabilities.
    """
    if not 0 <= rho_los <= 1:
        raise ValueError("rho_los must be a probability")
    if env.fading_mode == FADING_DETERMINISTIC_ZERO:
        return 0.0
    rng = np.random.default_rng(seed)
    g = _nakagami_envelope(rng, env.nakagami_shape, size=2)
    xi = 20.0 * np.log10(g)
    psi = rho_los * xi[0] + (1.0 - rho_los) * xi[1]
    return float(max(psi, env.fading_floor_db))


def path_loss_db(geom: LinkGeometry, env: Environment, psi_db: float = 0.0) -> float:
    """Free-space loss plus LoS/NLoS excess losses minus fading."""
    rho = los_probability(geom.elevation_angle_deg, env)
    f0 = free_space_path_loss_db(geom.slant_distance, env.carrier_wavelength)
    return f0 + rho * env.excess_los_db + (1.0 - rho) * env.excess_nlos_db - psi_db


def compute_channel(
    rsus: list[RsuSite],
    drones: list[DroneSite],
    env: Environment,
    policy: TransmitPolicy,
    demand_bps,
    seed: int = 0,
) -> ChannelRealization:
    """Evaluate the full U x V link budget.

    The interference seen by RSU i on its link to drone j is the summed
    received power from the other V-1 drones, each over its own path loss.
    Fading draws use per-link seeds derived from (seed, i, j) so the result
    does not depend on evaluation order. The required bandwidth is
    demand / log2(1 + SINR), infinite where the SINR is zero.
    """
    if not rsus or not drones:
        raise ValueError("need at least one RSU and one drone")
    demand = np.asarray(demand_bps, dtype=float)
    if demand.shape != (len(rsus),):
        raise ValueError("demand_bps must have one entry per RSU")

    rx = np.array([[r.x, r.y] for r in rsus])
    dx = np.array([[d.x, d.y] for d in drones])
    alt = np.array([d.altitude for d in drones])

    s = np.sqrt(np.sum((rx[:, None, :] - dx[None, :, :]) ** 2, axis=-1))
    d = np.sqrt(s**2 + alt[None, :] ** 2)
    theta = np.degrees(np.arctan2(alt[None, :], s))
    plos = _plos(theta, env)

    f0 = 20.0 * np.log10(4.0 * math.pi * d / env.carrier_wavelength)
    if env.fading_mode == FADING_DETERMINISTIC_ZERO:
        psi = np.zeros_like(f0)
    else:
        psi = np.empty_like(f0)
        for i in range(len(rsus)):
            for j in range(len(drones)):
                psi[i, j] = sample_fading_db(float(plos[i, j]), env, [seed, i, j])

    ploss = f0 + plos * env.excess_los_db + (1.0 - plos) * env.excess_nlos_db - psi
    gain = 10.0 ** (-ploss / 10.0)
    received = policy.per_drone_power * gain
    interference = received.sum(axis=1, keepdims=True) - received
    sinr = received / (env.noise_power_w + interference)

    se = np.log2(1.0 + sinr)
    with np.errstate(divide="ignore"):
        bw = np.where(se > 0, demand[:, None] / np.where(se > 0, se, 1.0), np.inf)

    return ChannelRealization(
        rsu_ids=[r.id for r in rsus],
        drone_ids=[dr.id for dr in drones],
        horizontal_m=s,
        slant_m=d,
        theta_deg=theta,
        plos=plos,
        path_loss_db=ploss,
        fading_db=psi,
        link_gain=gain,
        received_power_w=received,
        interference_w=interference,
        sinr_linear=sinr,
        required_bandwidth_hz=bw,
        noise_power_w=env.noise_power_w,
    )


def spectral_efficiency(sinr_linear):
    """log2(1 + SINR) in bits/s/Hz."""
    sinr = np.asarray(sinr_linear, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("SINR must be non-negative")
    out = np.log2(1.0 + sinr)
    return float(out) if out.ndim == 0 else out
