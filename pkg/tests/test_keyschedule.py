"""Key schedule: stored contents, consumer service, and fault paths."""

import pytest

from drablocus import aesref
from drablocus.controller import RUN, Controller
from drablocus.datapath import RoundDatapath, Word
from drablocus.fabric import SimulationFault
from drablocus.keyschedule import READY, KeyScheduler
from drablocus.tables import MODE_DECRYPT, MODE_ENCRYPT, key_store_address

FIPS_KEY = bytes.fromhex("000102030405060708090a0b0c0d0e0f")


def initialize(key: bytes):
    dp = RoundDatapath()
    ctrl = Controller()
    ks = KeyScheduler()
    ks.load_key(int.from_bytes(key, "big"))
    while ctrl.fsm != RUN:
        ctrl.begin_cycle(ks.ready)
        divert = ctrl.divert_decision(dp)
        ks.compute(dp, ctrl.fsm)
        sig = ctrl.signals()
        dp.compute_cycle(
            divert=divert,
            main_key=ks.main_key_out,
            final_key=ks.final_key_out,
            initial_reset=sig.initial_reset,
            main_reset=sig.main_reset,
            shift_rows_reset=sig.shift_rows_reset,
            final_reset=sig.final_reset,
            ks_sub_bytes=ks.sub_bytes_inject,
            ks_mix_columns=ks.mix_columns_inject,
        )
        dp.commit_cycle()
        ctrl.commit()
        ks.commit()
        if ctrl.cycle > 400:
            raise AssertionError("initialization never finished")
    return dp, ctrl, ks


def stored(ks, mode, round_index):
    return ks.store.image[key_store_address(mode, round_index)]


def test_stored_encrypt_keys_match_expansion():
    _, _, ks = initialize(FIPS_KEY)
    oracle = aesref.key_expand(FIPS_KEY).keys
    for r in range(11):
        assert stored(ks, MODE_ENCRYPT, r) == int.from_bytes(oracle[r], "big")


def test_stored_decrypt_keys_are_equivalent_inverse_set():
    _, _, ks = initialize(FIPS_KEY)
    oracle = aesref.key_expand_equivalent_inverse(FIPS_KEY).keys
    for r in range(11):
        assert stored(ks, MODE_DECRYPT, r) == int.from_bytes(oracle[r], "big")


def test_decrypt_inner_keys_are_inverse_mixed_encrypt_keys():
    _, _, ks = initialize(FIPS_KEY)
    enc = aesref.key_expand(FIPS_KEY).keys
    for r in range(1, 10):
        expected = aesref.mix_columns(enc[10 - r], inverse=True)
        assert stored(ks, MODE_DECRYPT, r) == int.from_bytes(expected, "big")


def test_zero_key_round_1():
    _, _, ks = initialize(bytes(16))
    assert stored(ks, MODE_ENCRYPT, 1) == int("62636363" * 4, 16)


def test_initial_key_registers():
    _, _, ks = initialize(FIPS_KEY)
    oracle = aesref.key_expand(FIPS_KEY).keys
    assert ks.initial_key(MODE_ENCRYPT) == int.from_bytes(oracle[0], "big")
    assert ks.initial_key(MODE_DECRYPT) == int.from_bytes(oracle[10], "big")


def test_unused_store_entries_are_zero():
    _, _, ks = initialize(FIPS_KEY)
    used = {key_store_address(m, r) for m in (0, 1) for r in range(11)}
    for addr in range(32):
        if addr not in used:
            assert ks.store.image[addr] == 0


def test_three_consumers_served_same_cycle():
    dp, ctrl, ks = initialize(FIPS_KEY)
    oracle = aesref.key_expand(FIPS_KEY).keys
    # Fake tags: an encrypt word in round 4 at stage 7, another at stage 1.
    dp.loop_tags[7] = Word(seq=0, mode=MODE_ENCRYPT, slot=3)
    dp.loop_tags[1] = Word(seq=1, mode=MODE_ENCRYPT, slot=5)
    ks.round_counters[3] = 3
    ks.compute(dp, ctrl.fsm)
    ks.commit()
    assert ks.main_key_out == int.from_bytes(oracle[4], "big")
    assert ks.final_key_out == int.from_bytes(oracle[10], "big")
    assert ks.initial_key(MODE_ENCRYPT) == int.from_bytes(oracle[0], "big")


def test_decrypt_arbitrary_round_is_transformed_key():
    dp, ctrl, ks = initialize(FIPS_KEY)
    enc = aesref.key_expand(FIPS_KEY).keys
    dp.loop_tags[7] = Word(seq=0, mode=MODE_DECRYPT, slot=2)
    ks.round_counters[2] = 3
    ks.compute(dp, ctrl.fsm)
    ks.commit()
    expected = aesref.mix_columns(enc[6], inverse=True)
    assert ks.main_key_out == int.from_bytes(expected, "big")


def test_counter_past_final_main_round_faults():
    dp, ctrl, ks = initialize(FIPS_KEY)
    dp.loop_tags[7] = Word(seq=0, mode=MODE_ENCRYPT, slot=0)
    ks.round_counters[0] = 9
    with pytest.raises(SimulationFault):
        ks.compute(dp, ctrl.fsm)


def test_load_key_rejected_mid_initialization():
    ks = KeyScheduler()
    ks.load_key(1)
    with pytest.raises(SimulationFault):
        ks.load_key(2)


def test_taps_quiet_once_ready():
    dp, ctrl, ks = initialize(FIPS_KEY)
    assert ks.fsm == READY
    for _ in range(50):
        ks.compute(dp, ctrl.fsm)
        assert ks.sub_bytes_inject == (0, 0)
        assert ks.mix_columns_inject == (0, 0)
        ks.commit()


def test_initialization_cycle_count_reported():
    _, _, ks = initialize(FIPS_KEY)
    assert ks.init_cycles == 46
