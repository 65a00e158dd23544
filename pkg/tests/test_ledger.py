import numpy as np
import pytest

from dronenet.ledger import (
    KIND_DRONE,
    KIND_RSU,
    KIND_SV,
    REASON_DUPLICATE,
    REASON_OK,
    REASON_TOO_LONG,
    REASON_UNAUTHORIZED,
    Address,
    EntityRecord,
    GasSchedule,
    LedgerChain,
    Transaction,
    gas_cost,
)

RNG = np.random.default_rng(2024)


def fresh_chain(schedule=None):
    return LedgerChain(Address.random(np.random.default_rng(1)), schedule)


def rand_addr():
    return Address.random(RNG)


def test_cc_registration_accepted_and_mined():
    chain = fresh_chain()
    rec = EntityRecord(KIND_DRONE, rand_addr(), drone_id="D0001", area_code="A001")
    res = chain.register_entity(chain.cc_address, rec)
    assert res.accepted and res.reason == REASON_OK
    chain.mine_block(6_000_000)
    ok, _ = chain.authenticate(rec.address)
    assert ok


def test_non_cc_sender_is_turned_down():
    chain = fresh_chain()
    rec = EntityRecord(KIND_SV, rand_addr())
    res = chain.register_entity(rand_addr(), rec)
    assert not res.accepted and res.reason == REASON_UNAUTHORIZED
    chain.mine_block(6_000_000)
    assert chain.registry == {}


def test_length_limits_enforced():
    chain = fresh_chain()
    too_long_id = EntityRecord(KIND_DRONE, rand_addr(), drone_id="ABCDEF", area_code="A001")
    assert chain.register_entity(chain.cc_address, too_long_id).reason == REASON_TOO_LONG
    too_long_area = EntityRecord(KIND_RSU, rand_addr(), area_code="ABCDE")
    assert chain.register_entity(chain.cc_address, too_long_area).reason == REASON_TOO_LONG
    ok = EntityRecord(KIND_DRONE, rand_addr(), drone_id="ABCDE", area_code="ABCD")
    assert chain.register_entity(chain.cc_address, ok).accepted


def test_duplicate_addresses_rejected_even_while_pending():
    chain = fresh_chain()
    addr = rand_addr()
    assert chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, addr)).accepted
    res = chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, addr))
    assert res.reason == REASON_DUPLICATE
    chain.mine_block(6_000_000)
    res = chain.register_entity(chain.cc_address, EntityRecord(KIND_RSU, addr, area_code="Q01"))
    assert res.reason == REASON_DUPLICATE


def test_gas_cost_worked_example_and_kind_ordering():
    schedule = GasSchedule(base_tx_gas=21000, per_byte_gas=68, sv_overhead_gas=20000)
    sv = EntityRecord(KIND_SV, rand_addr())
    assert gas_cost(sv, schedule) == 41000 + 68 * 20  # 42360

    default = GasSchedule()
    drone = EntityRecord(KIND_DRONE, rand_addr(), drone_id="D0001", area_code="A001")
    rsu = EntityRecord(KIND_RSU, rand_addr(), area_code="A001")
    assert gas_cost(drone, default) >= gas_cost(rsu, default) >= gas_cost(sv, default)

    # payload monotonicity: shorter strings never cost more
    short = EntityRecord(KIND_DRONE, rand_addr(), drone_id="", area_code="")
    assert gas_cost(short, default) <= gas_cost(drone, default)


def test_block_packs_sixty_uniform_transactions():
    # base picked so one vehicle registration costs exactly 100k gas
    schedule = GasSchedule(base_tx_gas=78640, per_byte_gas=68, sv_overhead_gas=20000)
    chain = fresh_chain(schedule)
    for _ in range(70):
        assert chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, rand_addr())).accepted
    assert chain.pending[0].gas_used == 100_000
    block = chain.mine_block(6_000_000)
    assert len(block.tx_list) == 60
    assert block.gas_total == 6_000_000
    assert len(chain.pending) == 10


def test_oversized_transaction_is_rejected_not_blocking():
    chain = fresh_chain()
    a, b = rand_addr(), rand_addr()
    chain.register_entity(chain.cc_address, EntityRecord(KIND_DRONE, a, drone_id="D0001", area_code="A001"))
    chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, b))
    drone_gas = chain.pending[0].gas_used
    limit = drone_gas - 1  # drone cannot fit in any block at this limit
    block = chain.mine_block(limit)
    assert [t.payload.address.value for t in block.tx_list] == [b.value]
    assert chain.rejected and chain.rejected[0][1] == "over-gas-limit"
    assert chain.rejected[0][0].payload.address.value == a.value


def test_limit_below_everything_gives_empty_block():
    chain = fresh_chain()
    chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, rand_addr()))
    block = chain.mine_block(10)
    assert block.tx_list == []
    assert chain.pending == []


def test_verify_chain_fresh_and_genesis_only():
    chain = fresh_chain()
    assert chain.verify_chain()  # genesis only
    for _ in range(5):
        chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, rand_addr()))
    chain.mine_block(6_000_000)
    assert chain.verify_chain()


def test_single_byte_tamper_is_detected():
    chain = fresh_chain()
    for _ in range(4):
        chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, rand_addr()))
    chain.mine_block(6_000_000)
    tx = chain.blocks[1].tx_list[2]
    tampered = Transaction(tx.sender, EntityRecord(tx.payload.kind, rand_addr()), tx.gas_used)
    chain.blocks[1].tx_list[2] = tampered
    assert not chain.verify_chain()


def test_gas_total_tamper_is_detected():
    chain = fresh_chain()
    chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, rand_addr()))
    chain.mine_block(6_000_000)
    chain.blocks[1].gas_total += 1
    assert not chain.verify_chain()


def test_registry_replay_matches():
    chain = fresh_chain()
    for k in range(12):
        kind = (KIND_DRONE, KIND_RSU, KIND_SV)[k % 3]
        rec = {
            KIND_DRONE: EntityRecord(kind, rand_addr(), drone_id=f"D{k:03d}", area_code="Z001"),
            KIND_RSU: EntityRecord(kind, rand_addr(), area_code=f"Q{k:02d}"),
            KIND_SV: EntityRecord(kind, rand_addr()),
        }[kind]
        chain.register_entity(chain.cc_address, rec)
        if k % 4 == 3:
            chain.mine_block(200_000)
    while chain.pending:
        chain.mine_block(6_000_000)
    assert chain.rebuild_registry() == chain.registry


def test_gas_conservation_across_blocks():
    chain = fresh_chain()
    accepted = []
    for _ in range(15):
        rec = EntityRecord(KIND_SV, rand_addr())
        if chain.register_entity(chain.cc_address, rec).accepted:
            accepted.append(gas_cost(rec, chain.schedule))
    while chain.pending:
        chain.mine_block(150_000)
    assert sum(b.gas_total for b in chain.blocks) == sum(accepted)


def test_export_import_round_trip():
    chain = fresh_chain()
    for k in range(9):
        kind = (KIND_DRONE, KIND_RSU, KIND_SV)[k % 3]
        rec = EntityRecord(kind, rand_addr(),
                           drone_id="D0001" if kind == KIND_DRONE else "",
                           area_code="Q001" if kind != KIND_SV else "")
        chain.register_entity(chain.cc_address, rec)
    chain.mine_block(250_000)  # leaves some pending
    lines = chain.export_lines()
    loaded = LedgerChain.from_lines(lines)
    assert loaded.export_lines() == lines
    assert loaded.verify_chain()
    assert loaded.registry == chain.registry
    assert [t.to_bytes() for t in loaded.pending] == [t.to_bytes() for t in chain.pending]


def test_authenticate_counts_comparisons_per_kind():
    chain = fresh_chain()
    svs = [rand_addr() for _ in range(10)]
    for a in svs:
        chain.register_entity(chain.cc_address, EntityRecord(KIND_SV, a))
    chain.register_entity(chain.cc_address,
                          EntityRecord(KIND_DRONE, rand_addr(), drone_id="D0001", area_code="Z001"))
    while chain.pending:
        chain.mine_block(6_000_000)

    ok, comparisons = chain.authenticate(Address.random(np.random.default_rng(555)), KIND_SV)
    assert not ok and comparisons == 10  # full scan of the vehicle list

    ok, comparisons = chain.authenticate(svs[0], KIND_SV)
    assert ok and comparisons == 1

    empty = fresh_chain()
    assert empty.authenticate(rand_addr()) == (False, 0)


def test_address_validation():
    with pytest.raises(ValueError):
        Address(b"short")
    a = Address.from_hex("00" * 20)
    assert a.hex == "00" * 20
