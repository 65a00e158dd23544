"""End-to-end scenario pipeline, parameter sweeps and CSV emission.

A scenario run follows the registration-first flow: entities are registered
on the ledger by the C&C and mined, authentication gates which drones and
RSUs enter the radio pipeline, then placement, channel evaluation, demand
assignment and greedy association produce the network metrics.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import association as assoc_mod
from . import channel as channel_mod
from . import geometry as geom_mod
from .association import AssociationMatrix, DemandProfile, NetworkMetrics
from .channel import ChannelRealization
from .config import (
    PROCESS_MATERN,
    ConfigError,
    ScenarioConfig,
    SweepSpec,
    apply_sweep_value,
)
from .geometry import DroneSite, RsuSite
from .ledger import (
    KIND_DRONE,
    KIND_RSU,
    KIND_SV,
    Address,
    EntityRecord,
    LedgerChain,
)

# Stream tags keep the per-stage PCG64 generators independent of each other;
# geometry and demand streams must not depend on the drone count so that
# sweeps over the fleet size reuse identical ground truth per seed.
_TAG_ADDRESS = 10
_TAG_GEOMETRY = 11
_TAG_KMEANS = 12
_TAG_DEMAND = 13
_TAG_FADING = 14


@dataclass
class RunResult:
    config: ScenarioConfig
    seed: int
    rsus: list[RsuSite]
    drones: list[DroneSite]
    clustering: geom_mod.ClusteringResult
    channel: ChannelRealization
    demands: DemandProfile
    assoc: AssociationMatrix
    metrics: NetworkMetrics
    chain: LedgerChain
    ledger_stats: dict
    stage_log: list[str] = field(default_factory=list)
    excluded_drones: list[int] = field(default_factory=list)
    excluded_rsus: list[int] = field(default_factory=list)

    def write_artifacts(self, outdir) -> dict[str, str]:
        os.makedirs(outdir, exist_ok=True)
        paths = {}

        def w(name, lines):
            path = os.path.join(outdir, name)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                for line in lines:
                    f.write(line + "\n")
            paths[name] = path

        w("rsus.csv", ["id,x_m,y_m"] + [f"{r.id},{_f(r.x)},{_f(r.y)}" for r in self.rsus])
        w("drones.csv", ["id,x_m,y_m,altitude_m"]
          + [f"{d.id},{_f(d.x)},{_f(d.y)},{_f(d.altitude)}" for d in self.drones])

        ch = self.channel
        lines = ["rsu_id,drone_id,s_m,d_m,theta_deg,plos,pathloss_db,sinr_db,bw_req_hz"]
        for a, rid in enumerate(ch.rsu_ids):
            for b, did in enumerate(ch.drone_ids):
                sinr_db = 10.0 * math.log10(ch.sinr_linear[a, b])
                lines.append(
                    f"{rid},{did},{_f(ch.horizontal_m[a, b])},{_f(ch.slant_m[a, b])},"
                    f"{_f(ch.theta_deg[a, b])},{_f(ch.plos[a, b])},"
                    f"{_f(ch.path_loss_db[a, b])},{_f(sinr_db)},{_f(ch.required_bandwidth_hz[a, b])}"
                )
        w("channel.csv", lines)

        lines = ["rsu_id,drone_id,rate_bps,bw_hz"]
        for a, b in self.assoc.links():
            rid, did = ch.rsu_ids[a], ch.drone_ids[b]
            lines.append(f"{rid},{did},{_f(self.demands.rates_bps[rid])},"
                         f"{_f(ch.required_bandwidth_hz[a, b])}")
        w("association.csv", lines)

        m = self.metrics
        w("metrics.csv", ["seed,sum_rate_bps,served_frac,avg_bw_hz,ee_bps_per_w",
                          f"{self.seed},{_f(m.sum_rate)},{_f(m.served_fraction)},"
                          f"{_f(m.avg_bandwidth_consumed)},{_f(m.energy_efficiency)}"])
        w("stages.txt", self.stage_log)
        self.chain.save(os.path.join(outdir, "chain.txt"))
        paths["chain.txt"] = os.path.join(outdir, "chain.txt")
        return paths


def _f(x) -> str:
    return repr(float(x))


def run_scenario(config: ScenarioConfig, seed: int, outdir=None) -> RunResult:
    """Execute one end-to-end scenario for the given seed.

    Order: register drones (C&C) -> mine -> authenticate -> sample RSUs ->
    register and authenticate RSUs -> place drones on k-means centroids ->
    channel -> demands -> greedy association with backhaul enforcement.
    Entities failing authentication never reach the radio stages.
    """
    problems = config.validate()
    if problems:
        raise ConfigError(problems)

    log: list[str] = []
    addr_rng = np.random.default_rng([seed, _TAG_ADDRESS])
    cc = Address.random(addr_rng)
    chain = LedgerChain(cc, config.gas)
    rogue = Address.random(addr_rng)

    # register the drone fleet; the first `unregistered_drones` submissions
    # come from a non-C&C sender and are turned down
    drone_addrs = [Address.random(addr_rng) for _ in range(config.drone_count)]
    for k, addr in enumerate(drone_addrs):
        sender = rogue if k < config.unregistered_drones else cc
        rec = EntityRecord(KIND_DRONE, addr, drone_id=f"D{k + 1:03d}", area_code="Z001")
        res = chain.register_entity(sender, rec)
        log.append(f"register drone {k + 1}: {res.reason}")
    while chain.pending:
        chain.mine_block(config.block_gas_limit)

    auth_drones = []
    for k, addr in enumerate(drone_addrs):
        ok, _ = chain.authenticate(addr, KIND_DRONE)
        if ok:
            auth_drones.append(k + 1)
        else:
            log.append(f"exclude drone {k + 1}: authentication failed")
    excluded_drones = [k for k in range(1, config.drone_count + 1) if k not in auth_drones]
    log.append(f"drones authenticated: {len(auth_drones)}/{config.drone_count}")

    # sample the RSU pattern
    geo_seed = np.random.default_rng([seed, _TAG_GEOMETRY]).integers(2**63)
    if config.rsu_process == PROCESS_MATERN:
        rsus_all = geom_mod.sample_matern_type1(config.region, config.point_process_params(), geo_seed)
    else:
        rsus_all = geom_mod.sample_poisson(config.region, config.rsu_density_per_m2, geo_seed)
    log.append(f"rsus sampled: {len(rsus_all)}")

    rsu_addrs = {r.id: Address.random(addr_rng) for r in rsus_all}
    for n, r in enumerate(rsus_all):
        sender = rogue if n < config.unregistered_rsus else cc
        quadrant = 1 + (r.x > config.region.width / 2) + 2 * (r.y > config.region.height / 2)
        res = chain.register_entity(sender, EntityRecord(KIND_RSU, rsu_addrs[r.id], area_code=f"Q{quadrant:02d}"))
        log.append(f"register rsu {r.id}: {res.reason}")
    for _ in range(config.sv_count):
        chain.register_entity(cc, EntityRecord(KIND_SV, Address.random(addr_rng)))
    while chain.pending:
        chain.mine_block(config.block_gas_limit)

    rsus = []
    for r in rsus_all:
        ok, _ = chain.authenticate(rsu_addrs[r.id], KIND_RSU)
        if ok:
            rsus.append(r)
        else:
            log.append(f"exclude rsu {r.id}: authentication failed")
    excluded_rsus = [r.id for r in rsus_all if r.id not in {x.id for x in rsus}]
    log.append(f"rsus authenticated: {len(rsus)}/{len(rsus_all)}")

    k_drones = len(auth_drones)
    if k_drones < 1:
        raise ValueError("no drone passed authentication; nothing to place")
    if len(rsus) <= k_drones:
        raise ValueError(f"need more RSUs than drones (got {len(rsus)} RSUs, {k_drones} drones)")

    kmeans_seed = np.random.default_rng([seed, _TAG_KMEANS]).integers(2**63)
    drones, clustering = geom_mod.kmeans_place_drones(
        rsus, k_drones, config.drone_altitude_m, kmeans_seed,
        max_iters=config.kmeans_max_iters, tol=config.kmeans_tol_m2,
    )
    log.append(f"drones placed: {len(drones)}")

    demand_seed = np.random.default_rng([seed, _TAG_DEMAND]).integers(2**63)
    demands = DemandProfile.draw(config.demand_rates_bps, [r.id for r in rsus], demand_seed)

    fading_seed = int(np.random.default_rng([seed, _TAG_FADING]).integers(2**63))
    log.append(f"channel stage entities: rsus={[r.id for r in rsus]} drones={[d.id for d in drones]}")
    channel = channel_mod.compute_channel(
        rsus, drones, config.environment, config.policy,
        demands.as_array([r.id for r in rsus]), seed=fading_seed,
    )

    matrix = assoc_mod.greedy_associate(channel, demands, config.constraints)
    metrics = assoc_mod.compute_metrics(matrix, channel, demands, config.policy, config.energy)
    log.append(f"associated: {metrics.served_count}/{len(rsus)} sum_rate={metrics.sum_rate!r}")

    result = RunResult(
        config=config, seed=seed, rsus=rsus, drones=drones, clustering=clustering,
        channel=channel, demands=demands, assoc=matrix, metrics=metrics,
        chain=chain, ledger_stats=chain.stats(), stage_log=log,
        excluded_drones=excluded_drones, excluded_rsus=excluded_rsus,
    )
    if outdir is not None:
        result.write_artifacts(outdir)
    return result


@dataclass
class ResultRow:
    """Seed-averaged metrics for one sweep value; per-seed values retained."""

    value: float
    seeds: list[int]
    per_seed: list[dict[str, float]]
    means: dict[str, float]
    stderr: dict[str, float]


_METRIC_KEYS = ("sum_rate_bps", "served_frac", "avg_bw_hz", "ee_bps_per_w", "served_count", "tx_per_block")


def _metrics_dict(result: RunResult) -> dict[str, float]:
    m = result.metrics
    return {
        "sum_rate_bps": m.sum_rate,
        "served_frac": m.served_fraction,
        "avg_bw_hz": m.avg_bandwidth_consumed,
        "ee_bps_per_w": m.energy_efficiency,
        "served_count": float(m.served_count),
        "tx_per_block": float(result.ledger_stats["tx_per_block"]),
    }


def _aggregate(value, seeds, per_seed) -> ResultRow:
    means, stderr = {}, {}
    for key in _METRIC_KEYS:
        xs = np.array([p[key] for p in per_seed])
        means[key] = float(xs.mean())
        stderr[key] = float(xs.std(ddof=1) / math.sqrt(len(xs))) if len(xs) > 1 else 0.0
    return ResultRow(value=value, seeds=list(seeds), per_seed=per_seed, means=means, stderr=stderr)


def replication_seeds(master_seed: int, replications: int) -> list[int]:
    """Per-replication seeds; the same list is reused at every sweep value."""
    return [master_seed + k for k in range(replications)]


def run_sweep(config: ScenarioConfig, spec: SweepSpec) -> list[ResultRow]:
    """Run `spec.replications` seeds at each sweep value and aggregate.

    Rows are ordered by sweep value; all values share the same seed list so
    that curves are comparable point to point.
    """
    rows = []
    seeds = replication_seeds(config.master_seed, spec.replications)
    for value in sorted(spec.values):
        cfg = apply_sweep_value(config, spec.parameter, value)
        per_seed = [_metrics_dict(run_scenario(cfg, s)) for s in seeds]
        rows.append(_aggregate(float(value), seeds, per_seed))
    return rows


def emit_plot_data(rows: list[ResultRow], path, value_name: str = "value") -> list[str]:
    """Write sweep rows as a CSV plus a plain-column .dat twin.

    The CSV carries every aggregated metric with its standard error; the .dat
    file holds space-separated x/y columns (value, sum-rate mean, stderr) for
    direct plotting.
    """
    if not rows:
        raise ValueError("no rows to emit")
    base, _ = os.path.splitext(path)
    csv_path, dat_path = base + ".csv", base + ".dat"
    header = [value_name]
    for key in _METRIC_KEYS:
        header += [key, key + "_stderr"]
    with open(csv_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            cells = [_f(row.value)]
            for key in _METRIC_KEYS:
                cells += [_f(row.means[key]), _f(row.stderr[key])]
            f.write(",".join(cells) + "\n")
    with open(dat_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# {value_name} sum_rate_bps stderr\n")
        for row in rows:
            f.write(f"{_f(row.value)} {_f(row.means['sum_rate_bps'])} {_f(row.stderr['sum_rate_bps'])}\n")
    return [csv_path, dat_path]


# -- figure recipes ---------------------------------------------------------


def bandwidth_sweep(config: ScenarioConfig, taus, w_values, replications) -> dict[int, list[ResultRow]]:
    """Sum-rate and consumed bandwidth versus available bandwidth, per link cap."""
    out = {}
    for tau in taus:
        cfg = apply_sweep_value(config, "max_links_per_drone", tau)
        out[int(tau)] = run_sweep(cfg, SweepSpec("bandwidth_per_drone_hz", tuple(w_values), replications))
    return out


def write_bandwidth_csv(curves: dict[int, list[ResultRow]], path) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("W_hz,tau,sum_rate_bps,bw_consumed_hz,stderr\n")
        for tau in sorted(curves):
            for row in curves[tau]:
                f.write(f"{_f(row.value)},{tau},{_f(row.means['sum_rate_bps'])},"
                        f"{_f(row.means['avg_bw_hz'])},{_f(row.stderr['sum_rate_bps'])}\n")
    return path


def backhaul_sweep(config: ScenarioConfig, backhauls, w_values, replications) -> dict[float, list[ResultRow]]:
    """Sum-rate versus available bandwidth for several backhaul limits."""
    out = {}
    for br in backhauls:
        cfg = apply_sweep_value(config, "backhaul_rate_bps", br)
        out[float(br)] = run_sweep(cfg, SweepSpec("bandwidth_per_drone_hz", tuple(w_values), replications))
    return out


def write_backhaul_csv(curves: dict[float, list[ResultRow]], path) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("W_hz,backhaul_bps,sum_rate_bps,stderr\n")
        for br in sorted(curves):
            for row in curves[br]:
                f.write(f"{_f(row.value)},{_f(br)},{_f(row.means['sum_rate_bps'])},"
                        f"{_f(row.stderr['sum_rate_bps'])}\n")
    return path


def fleet_sweep(config: ScenarioConfig, densities, v_values, replications) -> dict[float, list[ResultRow]]:
    """Served fraction, energy efficiency and sum-rate versus drone count."""
    out = {}
    for delta in densities:
        cfg = apply_sweep_value(config, "rsu_density_per_m2", delta)
        out[float(delta)] = run_sweep(cfg, SweepSpec("drone_count", tuple(v_values), replications))
    return out


def write_fleet_csv(curves: dict[float, list[ResultRow]], path) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("V,delta_per_m2,sum_rate_bps,served_frac,ee_bps_per_w,stderr\n")
        for delta in sorted(curves):
            for row in curves[delta]:
                f.write(f"{int(row.value)},{_f(delta)},{_f(row.means['sum_rate_bps'])},"
                        f"{_f(row.means['served_frac'])},{_f(row.means['ee_bps_per_w'])},"
                        f"{_f(row.stderr['sum_rate_bps'])}\n")
    return path


def gas_limit_sweep(config: ScenarioConfig, gas_limits, entities_per_kind: int = 60) -> list[dict]:
    """Transactions per block versus block gas limit, separately per kind.

    For each kind, a fresh chain is loaded with `entities_per_kind` pending
    registrations and mined to exhaustion at each gas limit.
    """
    rng = np.random.default_rng([config.master_seed, _TAG_ADDRESS, 99])
    rows = []
    for limit in sorted(int(g) for g in gas_limits):
        for kind in (KIND_DRONE, KIND_RSU, KIND_SV):
            cc = Address.random(rng)
            chain = LedgerChain(cc, config.gas)
            for n in range(entities_per_kind):
                if kind == KIND_DRONE:
                    rec = EntityRecord(kind, Address.random(rng), drone_id=f"D{n:04d}", area_code="Z001")
                elif kind == KIND_RSU:
                    rec = EntityRecord(kind, Address.random(rng), area_code=f"Q{n % 100:02d}")
                else:
                    rec = EntityRecord(kind, Address.random(rng))
                chain.register_entity(cc, rec)
            while chain.pending:
                chain.mine_block(limit)
            rows.append({"gas_limit": limit, "kind": kind, "tx_per_block": chain.stats()["tx_per_block"]})
    return rows


def write_gas_csv(rows: list[dict], path) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("gas_limit,kind,tx_per_block\n")
        for r in rows:
            f.write(f"{r['gas_limit']},{r['kind']},{_f(r['tx_per_block'])}\n")
    return path
