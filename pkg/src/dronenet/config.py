"""Scenario configuration: defaults, validation and a flat key-value format.

Config files are UTF-8 text, one ``section.key_with_units = value`` pair per
line, ``#`` comments allowed. Lists are comma-separated; ``inf`` is accepted
for unbounded limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .association import Constraints, EnergyModel
from .channel import Environment, TransmitPolicy
from .geometry import PointProcessParams, Region
from .ledger import GasSchedule

PROCESS_POISSON = "poisson"
PROCESS_MATERN = "matern_type1"


@dataclass
class ScenarioConfig:
    region: Region = field(default_factory=lambda: Region(5000.0, 5000.0))
    rsu_process: str = PROCESS_POISSON
    rsu_density_per_m2: float = 5e-6
    rsu_min_distance_m: float = 200.0
    drone_count: int = 6
    drone_altitude_m: float = 200.0
    kmeans_max_iters: int = 100
    kmeans_tol_m2: float = 1e-6
    environment: Environment = field(default_factory=Environment)
    policy: TransmitPolicy = field(default_factory=TransmitPolicy)
    demand_rates_bps: tuple = (5e6, 10e6, 15e6, 20e6, 25e6)
    constraints: Constraints = field(default_factory=Constraints)
    energy: EnergyModel = field(default_factory=EnergyModel)
    gas: GasSchedule = field(default_factory=GasSchedule)
    block_gas_limit: int = 6_000_000
    sv_count: int = 10
    unregistered_drones: int = 0
    unregistered_rsus: int = 0
    master_seed: int = 1
    replications: int = 100

    def validate(self) -> list[str]:
        """Return a list of field-named problems; empty means valid."""
        errors = []
        if self.rsu_process not in (PROCESS_POISSON, PROCESS_MATERN):
            errors.append(f"geometry.rsu_process: unknown process {self.rsu_process!r}")
        if self.rsu_density_per_m2 < 0:
            errors.append("geometry.rsu_density_per_m2: must be >= 0")
        if self.rsu_min_distance_m < 0:
            errors.append("geometry.rsu_min_distance_m: must be >= 0")
        if self.drone_count < 1:
            errors.append("geometry.drone_count: must be >= 1")
        if self.drone_altitude_m <= 0:
            errors.append("geometry.drone_altitude_m: must be > 0")
        if not self.demand_rates_bps or any(r <= 0 for r in self.demand_rates_bps):
            errors.append("demand.rates_bps: must be non-empty and positive")
        if self.unregistered_drones < 0 or self.unregistered_drones > self.drone_count:
            errors.append("ledger.unregistered_drones: must be in [0, drone_count]")
        if self.unregistered_rsus < 0:
            errors.append("ledger.unregistered_rsus: must be >= 0")
        if self.sv_count < 0:
            errors.append("ledger.sv_count: must be >= 0")
        if self.block_gas_limit <= 0:
            errors.append("ledger.block_gas_limit: must be > 0")
        if self.replications < 1:
            errors.append("run.replications: must be >= 1")
        return errors

    def point_process_params(self) -> PointProcessParams:
        return PointProcessParams(self.rsu_density_per_m2, self.rsu_min_distance_m)


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("invalid configuration: " + "; ".join(errors))
        self.errors = errors


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def _parse_float(s: str) -> float:
    return math.inf if s.strip().lower() == "inf" else float(s)


def _parse_list(s: str) -> tuple:
    return tuple(_parse_float(p) for p in s.split(",") if p.strip())


# dotted key -> (getter, setter-from-string)
_SCHEMA: dict = {
    "region.width_m": (lambda c: c.region.width,
                       lambda c, s: replace(c, region=Region(_parse_float(s), c.region.height))),
    "region.height_m": (lambda c: c.region.height,
                        lambda c, s: replace(c, region=Region(c.region.width, _parse_float(s)))),
    "geometry.rsu_process": (lambda c: c.rsu_process,
                             lambda c, s: replace(c, rsu_process=s.strip())),
    "geometry.rsu_density_per_m2": (lambda c: c.rsu_density_per_m2,
                                    lambda c, s: replace(c, rsu_density_per_m2=_parse_float(s))),
    "geometry.rsu_min_distance_m": (lambda c: c.rsu_min_distance_m,
                                    lambda c, s: replace(c, rsu_min_distance_m=_parse_float(s))),
    "geometry.drone_count": (lambda c: c.drone_count,
                             lambda c, s: replace(c, drone_count=int(s))),
    "geometry.drone_altitude_m": (lambda c: c.drone_altitude_m,
                                  lambda c, s: replace(c, drone_altitude_m=_parse_float(s))),
    "geometry.kmeans_max_iters": (lambda c: c.kmeans_max_iters,
                                  lambda c, s: replace(c, kmeans_max_iters=int(s))),
    "geometry.kmeans_tol_m2": (lambda c: c.kmeans_tol_m2,
                               lambda c, s: replace(c, kmeans_tol_m2=_parse_float(s))),
    "channel.alpha": (lambda c: c.environment.alpha,
                      lambda c, s: _env(c, alpha=_parse_float(s))),
    "channel.beta_per_deg": (lambda c: c.environment.beta,
                             lambda c, s: _env(c, beta=_parse_float(s))),
    "channel.excess_los_db": (lambda c: c.environment.excess_los_db,
                              lambda c, s: _env(c, excess_los_db=_parse_float(s))),
    "channel.excess_nlos_db": (lambda c: c.environment.excess_nlos_db,
                               lambda c, s: _env(c, excess_nlos_db=_parse_float(s))),
    "channel.carrier_wavelength_m": (lambda c: c.environment.carrier_wavelength,
                                     lambda c, s: _env(c, carrier_wavelength=_parse_float(s))),
    "channel.noise_power_dbw": (lambda c: c.environment.noise_power_db,
                                lambda c, s: _env(c, noise_power_db=_parse_float(s))),
    "channel.nakagami_shape": (lambda c: c.environment.nakagami_shape,
                               lambda c, s: _env(c, nakagami_shape=_parse_float(s))),
    "channel.fading_floor_db": (lambda c: c.environment.fading_floor_db,
                                lambda c, s: _env(c, fading_floor_db=_parse_float(s))),
    "channel.fading_mode": (lambda c: c.environment.fading_mode,
                            lambda c, s: _env(c, fading_mode=s.strip())),
    "policy.per_drone_power_w": (lambda c: c.policy.per_drone_power,
                                 lambda c, s: _pol(c, per_drone_power=_parse_float(s))),
    "policy.max_power_w": (lambda c: c.policy.max_power,
                           lambda c, s: _pol(c, max_power=_parse_float(s))),
    "demand.rates_bps": (lambda c: c.demand_rates_bps,
                         lambda c, s: replace(c, demand_rates_bps=_parse_list(s))),
    "constraints.bandwidth_per_drone_hz": (lambda c: c.constraints.bandwidth_per_drone,
                                           lambda c, s: _con(c, bandwidth_per_drone=_parse_float(s))),
    "constraints.max_links_per_drone": (lambda c: c.constraints.max_links_per_drone,
                                        lambda c, s: _con(c, max_links_per_drone=int(s))),
    "constraints.max_power_w": (lambda c: c.constraints.max_power,
                                lambda c, s: _con(c, max_power=_parse_float(s))),
    "constraints.sinr_min_linear": (lambda c: c.constraints.sinr_min,
                                    lambda c, s: _con(c, sinr_min=_parse_float(s))),
    "constraints.interference_threshold_w": (lambda c: c.constraints.interference_threshold,
                                             lambda c, s: _con(c, interference_threshold=_parse_float(s))),
    "constraints.backhaul_rate_bps": (lambda c: c.constraints.backhaul_rate,
                                      lambda c, s: _con(c, backhaul_rate=_parse_float(s))),
    "energy.pa_inefficiency": (lambda c: c.energy.pa_inefficiency,
                               lambda c, s: _ene(c, pa_inefficiency=_parse_float(s))),
    "energy.circuit_power_per_link_w": (lambda c: c.energy.circuit_power_per_link,
                                        lambda c, s: _ene(c, circuit_power_per_link=_parse_float(s))),
    "ledger.base_tx_gas": (lambda c: c.gas.base_tx_gas,
                           lambda c, s: _gas(c, base_tx_gas=int(s))),
    "ledger.per_byte_gas": (lambda c: c.gas.per_byte_gas,
                            lambda c, s: _gas(c, per_byte_gas=int(s))),
    "ledger.drone_overhead_gas": (lambda c: c.gas.drone_overhead_gas,
                                  lambda c, s: _gas(c, drone_overhead_gas=int(s))),
    "ledger.rsu_overhead_gas": (lambda c: c.gas.rsu_overhead_gas,
                                lambda c, s: _gas(c, rsu_overhead_gas=int(s))),
    "ledger.sv_overhead_gas": (lambda c: c.gas.sv_overhead_gas,
                               lambda c, s: _gas(c, sv_overhead_gas=int(s))),
    "ledger.block_gas_limit": (lambda c: c.block_gas_limit,
                               lambda c, s: replace(c, block_gas_limit=int(s))),
    "ledger.sv_count": (lambda c: c.sv_count,
                        lambda c, s: replace(c, sv_count=int(s))),
    "ledger.unregistered_drones": (lambda c: c.unregistered_drones,
                                   lambda c, s: replace(c, unregistered_drones=int(s))),
    "ledger.unregistered_rsus": (lambda c: c.unregistered_rsus,
                                 lambda c, s: replace(c, unregistered_rsus=int(s))),
    "run.master_seed": (lambda c: c.master_seed,
                        lambda c, s: replace(c, master_seed=int(s))),
    "run.replications": (lambda c: c.replications,
                         lambda c, s: replace(c, replications=int(s))),
}


def _env(c, **kw):
    return replace(c, environment=replace(c.environment, **kw))


def _pol(c, **kw):
    return replace(c, policy=replace(c.policy, **kw))


def _con(c, **kw):
    return replace(c, constraints=replace(c.constraints, **kw))


def _ene(c, **kw):
    return replace(c, energy=replace(c.energy, **kw))


def _gas(c, **kw):
    return replace(c, gas=replace(c.gas, **kw))


def config_to_text(config: ScenarioConfig) -> str:
    lines = [f"{key} = {_fmt(getter(config))}" for key, (getter, _) in _SCHEMA.items()]
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> ScenarioConfig:
    config = ScenarioConfig()
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        key, value = (p.strip() for p in line.split("=", 1))
        entry = _SCHEMA.get(key)
        if entry is None:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        try:
            config = entry[1](config, value)
        except (ValueError, TypeError) as exc:
            errors.append(f"{key}: {exc}")
    if errors:
        raise ConfigError(errors)
    problems = config.validate()
    if problems:
        raise ConfigError(problems)
    return config


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as f:
        return config_from_text(f.read())


def save_config(config: ScenarioConfig, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(config_to_text(config))


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter, its values, and replications per point."""

    parameter: str  # a _SWEEPABLE key
    values: tuple
    replications: int = 100

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.parameter!r}; one of {sorted(SWEEPABLE)}")
        if not self.values:
            raise ValueError("sweep needs a non-empty value list")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")


SWEEPABLE = {
    "bandwidth_per_drone_hz": lambda c, v: _con(c, bandwidth_per_drone=float(v)),
    "drone_count": lambda c, v: replace(c, drone_count=int(v)),
    "backhaul_rate_bps": lambda c, v: _con(c, backhaul_rate=float(v)),
    "max_links_per_drone": lambda c, v: _con(c, max_links_per_drone=int(v)),
    "rsu_density_per_m2": lambda c, v: replace(c, rsu_density_per_m2=float(v)),
    "block_gas_limit": lambda c, v: replace(c, block_gas_limit=int(v)),
}


def apply_sweep_value(config: ScenarioConfig, parameter: str, value) -> ScenarioConfig:
    return SWEEPABLE[parameter](config, value)
