"""Command-line interface: scenario runs, sweeps, ledger operations, oracle checks.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 verification or
authentication failure, 1 other runtime errors. Errors print a single
``error.<category>: message`` line on stderr. The output directory may be
overridden with the DRONENET_OUT environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import association as assoc_mod
from .association import Constraints, DemandProfile
from .channel import Environment, TransmitPolicy, compute_channel
from .config import ConfigError, ScenarioConfig, SweepSpec, load_config
from .geometry import DroneSite, RsuSite
from .harness import (
    backhaul_sweep,
    bandwidth_sweep,
    emit_plot_data,
    fleet_sweep,
    gas_limit_sweep,
    run_scenario,
    run_sweep,
    write_backhaul_csv,
    write_bandwidth_csv,
    write_fleet_csv,
    write_gas_csv,
)
from .ledger import KINDS, Address, EntityRecord, GasSchedule, LedgerChain


def _outdir(args) -> str:
    return os.environ.get("DRONENET_OUT", args.out)


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.reps is not None:
        cfg.replications = args.reps
    return cfg


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    result = run_scenario(cfg, cfg.master_seed, outdir=out)
    m = result.metrics
    print(f"rsus={len(result.rsus)} drones={len(result.drones)} "
          f"served={m.served_count} ({m.served_fraction:.4f}) "
          f"sum_rate_bps={m.sum_rate:.6g} avg_bw_hz={m.avg_bandwidth_consumed:.6g} "
          f"ee_bps_per_w={m.energy_efficiency:.6g}")
    print(f"artifacts written to {out}")
    return 0


_FIGURES = ("bandwidth", "backhaul", "fleet", "gas")


def cmd_sweep(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    os.makedirs(out, exist_ok=True)
    reps = cfg.replications
    if args.figure:
        if args.figure == "bandwidth":
            w_values = [w * 1e6 for w in (25, 50, 100, 150, 200, 250, 300, 350, 400)]
            curves = bandwidth_sweep(cfg, (5, 10, 15, 20), w_values, reps)
            path = write_bandwidth_csv(curves, os.path.join(out, "bandwidth_sweep.csv"))
        elif args.figure == "backhaul":
            w_values = [w * 1e6 for w in (50, 100, 150, 200, 250, 300, 350, 400)]
            curves = backhaul_sweep(cfg, (1.5e9, 2.0e9, 2.5e9), w_values, reps)
            path = write_backhaul_csv(curves, os.path.join(out, "backhaul_sweep.csv"))
        elif args.figure == "fleet":
            curves = fleet_sweep(cfg, (3e-6, 5e-6, 7e-6), range(1, 11), reps)
            path = write_fleet_csv(curves, os.path.join(out, "fleet_sweep.csv"))
        else:
            rows = gas_limit_sweep(cfg, [g * 1e6 for g in (1, 2, 3, 4, 5, 6, 8)])
            path = write_gas_csv(rows, os.path.join(out, "gas_sweep.csv"))
        print(f"wrote {path}")
        return 0
    values = tuple(float(v) for v in args.values.split(","))
    rows = run_sweep(cfg, SweepSpec(args.param, values, reps))
    paths = emit_plot_data(rows, os.path.join(out, f"sweep_{args.param}"), value_name=args.param)
    print("wrote " + " ".join(paths))
    return 0


def _open_chain(args) -> LedgerChain:
    return LedgerChain.load(args.chain)


def cmd_ledger(args) -> int:
    if args.action == "init":
        rng = np.random.default_rng(args.seed if args.seed is not None else 1)
        chain = LedgerChain(Address.random(rng), GasSchedule())
        chain.save(args.chain)
        print(f"initialized chain at {args.chain} cc={chain.cc_address.hex}")
        return 0

    chain = _open_chain(args)
    if args.action == "register":
        sender = chain.cc_address if args.sender is None else Address.from_hex(args.sender)
        rng = np.random.default_rng(args.seed if args.seed is not None else 1)
        addr = Address.from_hex(args.address) if args.address else Address.random(rng)
        rec = EntityRecord(args.kind, addr, drone_id=args.id or "", area_code=args.area or "")
        res = chain.register_entity(sender, rec)
        chain.save(args.chain)
        print(f"{'accepted' if res.accepted else 'rejected'} ({res.reason}) address={addr.hex}")
        return 0 if res.accepted else 3
    if args.action == "auth":
        ok, comparisons = chain.authenticate(Address.from_hex(args.address), args.kind)
        print(f"{'authenticated' if ok else 'unknown'} comparisons={comparisons}")
        return 0 if ok else 3
    if args.action == "mine":
        block = chain.mine_block(args.gas_limit)
        chain.save(args.chain)
        print(f"block {block.index} txs={len(block.tx_list)} gas={block.gas_total} hash={block.hash.hex()}")
        return 0
    if args.action == "verify":
        ok = chain.verify_chain()
        print("chain ok" if ok else "chain corrupt")
        return 0 if ok else 3
    stats = chain.stats()
    for key, value in stats.items():
        print(f"{key}: {value}")
    return 0


def cmd_oracle_compare(args) -> int:
    """Compare the greedy association against exhaustive search on small instances."""
    rng = np.random.default_rng(args.seed if args.seed is not None else 1)
    worst_gap = 0.0
    for n in range(args.instances):
        u = int(rng.integers(1, args.max_rsus + 1))
        v = int(rng.integers(1, args.max_drones + 1))
        channel, demands = _random_instance(rng, u, v)
        constraints = Constraints(
            bandwidth_per_drone=float(rng.uniform(20e6, 120e6)),
            max_links_per_drone=int(rng.integers(1, 6)),
            sinr_min=0.1,
            backhaul_rate=float(rng.uniform(30e6, 200e6)),
        )
        greedy = assoc_mod.greedy_associate(channel, demands, constraints)
        _, best = assoc_mod.brute_force_optimal(channel, demands, constraints)
        g = assoc_mod.sum_rate(greedy, demands, channel.rsu_ids)
        if best < g - 1e-9:
            print(f"error.oracle: instance {n} greedy {g} exceeds optimum {best}", file=sys.stderr)
            return 1
        if best > 0:
            worst_gap = max(worst_gap, (best - g) / best)
    print(f"instances={args.instances} worst_relative_gap={worst_gap:.4f}")
    return 0


def _random_instance(rng, u: int, v: int):
    rsus = [RsuSite(i + 1, float(rng.uniform(0, 3000)), float(rng.uniform(0, 3000))) for i in range(u)]
    drones = [DroneSite(j + 1, float(rng.uniform(0, 3000)), float(rng.uniform(0, 3000)), 200.0) for j in range(v)]
    demands = DemandProfile.draw((5e6, 10e6, 15e6, 20e6, 25e6), [r.id for r in rsus], int(rng.integers(2**32)))
    channel = compute_channel(rsus, drones, Environment(), TransmitPolicy(),
                              demands.as_array([r.id for r in rsus]))
    return channel, demands


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dronenet", description=__doc__)
    parser.add_argument("--config", help="path to a scenario config file")
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--reps", type=int, help="replications override")
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("run", help="run one scenario and write per-stage CSV artifacts")

    p_sweep = sub.add_parser("sweep", help="sweep a parameter or emit a named figure recipe")
    p_sweep.add_argument("--param", choices=sorted(
        ("bandwidth_per_drone_hz", "drone_count", "backhaul_rate_bps",
         "max_links_per_drone", "rsu_density_per_m2", "block_gas_limit")))
    p_sweep.add_argument("--values", help="comma-separated sweep values")
    p_sweep.add_argument("--figure", choices=_FIGURES, help="named sweep recipe")

    p_ledger = sub.add_parser("ledger", help="operate on a chain file")
    p_ledger.add_argument("action", choices=("init", "register", "auth", "mine", "verify", "stats"))
    p_ledger.add_argument("--chain", required=True, help="chain file path")
    p_ledger.add_argument("--kind", choices=KINDS)
    p_ledger.add_argument("--id", help="drone id (at most 5 characters)")
    p_ledger.add_argument("--area", help="area code (at most 4 characters)")
    p_ledger.add_argument("--address", help="entity address, 40 hex characters")
    p_ledger.add_argument("--sender", help="sender address; defaults to the chain's C&C")
    p_ledger.add_argument("--gas-limit", type=int, default=6_000_000)

    p_oracle = sub.add_parser("oracle-compare", help="greedy vs exhaustive search on random small instances")
    p_oracle.add_argument("--instances", type=int, default=100)
    p_oracle.add_argument("--max-rsus", type=int, default=8)
    p_oracle.add_argument("--max-drones", type=int, default=2)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            if not args.figure and not (args.param and args.values):
                parser.error("sweep needs --figure or both --param and --values")
            return cmd_sweep(args)
        if args.command == "ledger":
            if args.action == "register" and not args.kind:
                parser.error("ledger register needs --kind")
            if args.action == "auth" and not args.address:
                parser.error("ledger auth needs --address")
            return cmd_ledger(args)
        return cmd_oracle_compare(args)
    except ConfigError as exc:
        print(f"error.config: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error.runtime: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
