"""Simulated permissioned ledger for entity registration and authentication.

A single command-and-control (C&C) address is the only sender whose
registration transactions are accepted. Accepted transactions wait in a
pending pool until they are packed, first-come-first-served, into hash-linked
blocks under a block gas limit. The registry of known entities is derived by
replaying mined transactions; authentication is a linear scan over it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

KIND_DRONE = "drone"
KIND_RSU = "rsu"
KIND_SV = "sv"
KINDS = (KIND_DRONE, KIND_RSU, KIND_SV)

MAX_DRONE_ID_CHARS = 5
MAX_AREA_CODE_CHARS = 4

_KIND_BYTE = {KIND_DRONE: 0, KIND_RSU: 1, KIND_SV: 2}
_BYTE_KIND = {v: k for k, v in _KIND_BYTE.items()}


@dataclass(frozen=True)
class Address:
    """20-byte opaque identifier, rendered as 40 hex characters."""

    value: bytes

    def __post_init__(self):
        if len(self.value) != 20:
            raise ValueError("address must be exactly 20 bytes")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Address":
        return cls(rng.bytes(20))

    @classmethod
    def from_hex(cls, s: str) -> "Address":
        return cls(bytes.fromhex(s))

    @property
    def hex(self) -> str:
        return self.value.hex()


@dataclass(frozen=True)
class EntityRecord:
    """What gets stored on the ledger for a drone, RSU or smart vehicle.

    Drones carry an id (at most 5 characters) and a flying-area code (at most
    4); RSUs carry only a deployed-area code; vehicles carry only the address.
    """

    kind: str
    address: Address
    drone_id: str = ""
    area_code: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown entity kind {self.kind!r}")

    def payload_bytes(self) -> int:
        return 20 + len(self.drone_id.encode()) + len(self.area_code.encode())

    def length_ok(self) -> bool:
        if self.kind == KIND_DRONE:
            return (len(self.drone_id) <= MAX_DRONE_ID_CHARS
                    and len(self.area_code) <= MAX_AREA_CODE_CHARS)
        if self.kind == KIND_RSU:
            return not self.drone_id and len(self.area_code) <= MAX_AREA_CODE_CHARS
        return not self.drone_id and not self.area_code


@dataclass(frozen=True)
class GasSchedule:
    base_tx_gas: int = 21000
    per_byte_gas: int = 68
    drone_overhead_gas: int = 40000
    rsu_overhead_gas: int = 20000
    sv_overhead_gas: int = 20000

    def __post_init__(self):
        if min(self.base_tx_gas, self.per_byte_gas, self.drone_overhead_gas,
               self.rsu_overhead_gas, self.sv_overhead_gas) <= 0:
            raise ValueError("gas schedule entries must be positive")

    def overhead(self, kind: str) -> int:
        return {
            KIND_DRONE: self.drone_overhead_gas,
            KIND_RSU: self.rsu_overhead_gas,
            KIND_SV: self.sv_overhead_gas,
        }[kind]


def gas_cost(record: EntityRecord, schedule: GasSchedule) -> int:
    """Deterministic gas figure: base + per-byte payload + per-kind overhead."""
    return schedule.base_tx_gas + schedule.per_byte_gas * record.payload_bytes() + schedule.overhead(record.kind)


@dataclass(frozen=True)
class Transaction:
    sender: Address
    payload: EntityRecord
    gas_used: int

    def to_bytes(self) -> bytes:
        rid = self.payload.drone_id.encode()
        area = self.payload.area_code.encode()
        return b"".join([
            self.sender.value,
            self.payload.address.value,
            bytes([_KIND_BYTE[self.payload.kind]]),
            bytes([len(rid)]), rid,
            bytes([len(area)]), area,
            self.gas_used.to_bytes(8, "big"),
        ])

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Transaction":
        sender = Address(raw[0:20])
        addr = Address(raw[20:40])
        kind = _BYTE_KIND[raw[40]]
        n = raw[41]
        rid = raw[42:42 + n].decode()
        pos = 42 + n
        m = raw[pos]
        area = raw[pos + 1:pos + 1 + m].decode()
        gas = int.from_bytes(raw[pos + 1 + m:pos + 9 + m], "big")
        return cls(sender, EntityRecord(kind, addr, rid, area), gas)


@dataclass
class Block:
    index: int
    prev_hash: bytes
    tx_list: list[Transaction]
    gas_limit: int
    gas_total: int
    hash: bytes = b""

    def compute_hash(self) -> bytes:
        h = hashlib.sha256()
        h.update(self.index.to_bytes(8, "big"))
        h.update(self.prev_hash)
        for tx in self.tx_list:
            raw = tx.to_bytes()
            h.update(len(raw).to_bytes(4, "big"))
            h.update(raw)
        h.update(self.gas_total.to_bytes(8, "big"))
        return h.digest()


@dataclass(frozen=True)
class RegistrationResult:
    accepted: bool
    reason: str  # "ok", "unauthorized", "payload-too-long", "already-registered"


REASON_OK = "ok"
REASON_UNAUTHORIZED = "unauthorized"
REASON_TOO_LONG = "payload-too-long"
REASON_DUPLICATE = "already-registered"
REASON_OVER_GAS = "over-gas-limit"


class LedgerChain:
    """Hash-linked chain with a pending pool and a replay-derived registry.

    Writes (register, mine) are single-threaded; reads against a committed
    chain are safe from any thread.
    """

    def __init__(self, cc_address: Address, schedule: GasSchedule | None = None):
        self.cc_address = cc_address
        self.schedule = schedule or GasSchedule()
        self.pending: list[Transaction] = []
        self.rejected: list[tuple[Transaction, str]] = []
        genesis = Block(0, b"\x00" * 32, [], 0, 0)
        genesis.hash = genesis.compute_hash()
        self.blocks: list[Block] = [genesis]
        self.registry: dict[bytes, EntityRecord] = {}

    def register_entity(self, sender: Address, record: EntityRecord) -> RegistrationResult:
        """Queue a registration. Only the C&C may register; strings are
        length-limited; an address may be registered at most once."""
        if sender.value != self.cc_address.value:
            return RegistrationResult(False, REASON_UNAUTHORIZED)
        if not record.length_ok():
            return RegistrationResult(False, REASON_TOO_LONG)
        key = record.address.value
        if key in self.registry or any(t.payload.address.value == key for t in self.pending):
            return RegistrationResult(False, REASON_DUPLICATE)
        self.pending.append(Transaction(sender, record, gas_cost(record, self.schedule)))
        return RegistrationResult(True, REASON_OK)

    def mine_block(self, gas_limit: int) -> Block:
        """Pack pending transactions first-come-first-served under the limit.

        A transaction whose own gas exceeds the limit can never be mined and
        is dropped from the pool. Packing stops at the first transaction that
        does not fit the remaining budget.
        """
        txs: list[Transaction] = []
        gas_total = 0
        while self.pending:
            nxt = self.pending[0]
            if nxt.gas_used > gas_limit:
                self.rejected.append((self.pending.pop(0), REASON_OVER_GAS))
                continue
            if gas_total + nxt.gas_used > gas_limit:
                break
            txs.append(self.pending.pop(0))
            gas_total += nxt.gas_used
        block = Block(len(self.blocks), self.blocks[-1].hash, txs, gas_limit, gas_total)
        block.hash = block.compute_hash()
        self.blocks.append(block)
        for tx in txs:
            self.registry[tx.payload.address.value] = tx.payload
        return block

    def authenticate(self, address: Address, kind: str | None = None) -> tuple[bool, int]:
        """Linear scan of the registered addresses; returns (found, comparisons).

        With ``kind`` given, only records of that kind are scanned (mirrors the
        per-kind lookup used for vehicles, drones and RSUs).
        """
        comparisons = 0
        for key, record in self.registry.items():
            if kind is not None and record.kind != kind:
                continue
            comparisons += 1
            if key == address.value:
                return True, comparisons
        return False, comparisons

    def verify_chain(self) -> bool:
        """Recompute every hash and the previous-hash linkage."""
        for k, block in enumerate(self.blocks):
            if block.hash != block.compute_hash():
                return False
            if block.gas_total != sum(t.gas_used for t in block.tx_list):
                return False
            if k > 0 and block.prev_hash != self.blocks[k - 1].hash:
                return False
        return True

    def rebuild_registry(self) -> dict[bytes, EntityRecord]:
        """Replay all mined transactions into a fresh registry."""
        reg: dict[bytes, EntityRecord] = {}
        for block in self.blocks:
            for tx in block.tx_list:
                reg[tx.payload.address.value] = tx.payload
        return reg

    def stats(self) -> dict:
        mined = [b for b in self.blocks[1:]]
        ntx = sum(len(b.tx_list) for b in mined)
        kind_counts = {k: 0 for k in KINDS}
        for rec in self.registry.values():
            kind_counts[rec.kind] += 1
        return {
            "blocks": len(self.blocks),
            "transactions": ntx,
            "gas_total": sum(b.gas_total for b in mined),
            "pending": len(self.pending),
            "rejected": len(self.rejected),
            "registered": dict(kind_counts),
            "tx_per_block": ntx / len(mined) if mined else 0.0,
        }

    # -- newline-delimited persistence ------------------------------------
    #
    # Line 1:   H,<cc address hex>
    # Pending:  P,<byte length>:<transaction hex>
    # Blocks:   B,<index>,<prev hash hex>,<gas limit>,<gas total>,<hash hex>,
    #           <tx count>[,<byte length>:<transaction hex>...]
    # Transaction bytes: sender(20) | address(20) | kind(1) | id length(1) |
    # id | area length(1) | area | gas(8, big-endian).

    def export_lines(self) -> list[str]:
        lines = [f"H,{self.cc_address.hex}"]
        for tx in self.pending:
            raw = tx.to_bytes()
            lines.append(f"P,{len(raw)}:{raw.hex()}")
        for b in self.blocks:
            fields = [
                "B", str(b.index), b.prev_hash.hex(), str(b.gas_limit),
                str(b.gas_total), b.hash.hex(), str(len(b.tx_list)),
            ]
            for tx in b.tx_list:
                raw = tx.to_bytes()
                fields.append(f"{len(raw)}:{raw.hex()}")
            lines.append(",".join(fields))
        return lines

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for line in self.export_lines():
                f.write(line + "\n")

    @classmethod
    def from_lines(cls, lines, schedule: GasSchedule | None = None) -> "LedgerChain":
        it = [ln.strip() for ln in lines if ln.strip()]
        if not it or not it[0].startswith("H,"):
            raise ValueError("chain file must start with an H header line")
        chain = cls(Address.from_hex(it[0][2:]), schedule)
        chain.blocks = []
        for line in it[1:]:
            tag, rest = line.split(",", 1)
            if tag == "P":
                chain.pending.append(_parse_tx(rest))
            elif tag == "B":
                parts = rest.split(",")
                index, prev_hex, glimit, gtotal, hash_hex, ntx = parts[:6]
                txs = [_parse_tx(p) for p in parts[6:6 + int(ntx)]]
                chain.blocks.append(Block(
                    int(index), bytes.fromhex(prev_hex), txs,
                    int(glimit), int(gtotal), bytes.fromhex(hash_hex),
                ))
            else:
                raise ValueError(f"unknown record tag {tag!r}")
        if not chain.blocks:
            raise ValueError("chain file has no blocks")
        chain.registry = chain.rebuild_registry()
        return chain

    @classmethod
    def load(cls, path, schedule: GasSchedule | None = None) -> "LedgerChain":
        with open(path, encoding="utf-8") as f:
            return cls.from_lines(f.readlines(), schedule)


def _parse_tx(field: str) -> Transaction:
    length, hexpart = field.split(":", 1)
    raw = bytes.fromhex(hexpart)
    if len(raw) != int(length):
        raise ValueError("transaction length prefix does not match payload")
    return Transaction.from_bytes(raw)
