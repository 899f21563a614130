"""Key schedule: initialization FSM and the three-consumer key store.

During initialization the scheduler owns the datapath taps (the
controller holds everything else in reset): word substitutions for the
expansion run through the substitution RAMs with the encrypt mode bit,
and the nine inner decryption keys are produced by pushing encryption
keys through the byte-product path with the decrypt mode bit, which
computes exactly the inverse mix-columns each key needs for the
equivalent inverse cipher.

All 22 keys land in one dual-port RAM addressed by {mode bit, round}, so
service during operation is uniform: port a answers the arbitrary-round
consumer, port b constantly reads the final round key, and the initial
key-add instance is fed from dedicated holding registers. Per-slot
round counters select port-a addresses.

Initialization schedule (one line per cycle group, counted in the run
summary): cycle 0 writes round 0 and starts the first substitution;
each expansion round takes 3 cycles (inject, wait, read + write); the
inversion phase streams nine keys through the product path back to
back, reading each result 6 cycles after injection.
"""

from __future__ import annotations

from .datapath import MAIN_ROUNDS, RoundDatapath
from .fabric import BramModel, SimulationFault
from .gf256 import gf_pow
from .tables import MODE_DECRYPT, MODE_ENCRYPT, build_empty_key_store, key_store_address

IDLE = "idle"
EXPANDING = "expanding"
INVERTING = "inverting"
READY = "ready"

FINAL_ROUND = 10

_MASK32 = 0xFFFFFFFF
_MASK128 = (1 << 128) - 1


def _rot_word(w: int) -> int:
    return ((w << 8) | (w >> 24)) & _MASK32


class KeyScheduler:
    def __init__(self):
        self.store = BramModel(build_empty_key_store(), name="key_store")
        # Initial-round keys per mode: the cipher key for encryption, the
        # last expansion key for decryption. Two holding registers with a
        # mode mux stand in for the single register plus routing.
        self.initial_keys = [0, 0]
        self.round_counters = [0] * 12
        self.fsm = IDLE
        self.init_cycles = 0
        self._cipher_key = 0
        self._program = None
        self._inject_sb = (0, 0)
        self._inject_mc = (0, 0)
        self._pending_increment: int | None = None

    @property
    def ready(self) -> bool:
        return self.fsm == READY

    def load_key(self, key: int) -> None:
        if self.fsm not in (IDLE, READY):
            raise SimulationFault("key load attempted while initialization is running")
        self._cipher_key = key & _MASK128
        self.store.image = build_empty_key_store()
        self.round_counters = [0] * 12
        self.init_cycles = 0
        self.fsm = EXPANDING
        self._program = None

    def on_admission(self, slot: int) -> None:
        self.round_counters[slot] = 0

    def initial_key(self, mode: int) -> int:
        return self.initial_keys[mode & 1]

    @property
    def main_key_out(self) -> int:
        return self.store.out_a

    @property
    def final_key_out(self) -> int:
        return self.store.out_b

    @property
    def sub_bytes_inject(self) -> tuple[int, int]:
        return self._inject_sb

    @property
    def mix_columns_inject(self) -> tuple[int, int]:
        return self._inject_mc

    def compute(self, datapath: RoundDatapath, controller_fsm: str) -> None:
        self._inject_sb = (0, 0)
        self._inject_mc = (0, 0)
        if self.fsm in (EXPANDING, INVERTING):
            if controller_fsm != "key_init":
                return
            if self._program is None:
                self._program = self._initialization(datapath)
            try:
                next(self._program)
            except StopIteration:
                self.fsm = READY
                self._program = None
            else:
                self.init_cycles += 1
            self.store.compute()
            return
        if self.fsm == READY:
            self._serve(datapath)
        self.store.compute()

    def _serve(self, datapath: RoundDatapath) -> None:
        tags = datapath.loop_tags
        # Arbitrary-round consumer: the word now in stage 7 presents to the
        # main key-add next cycle, together with this port read's result.
        tag = tags[7]
        if tag is not None:
            round_index = self.round_counters[tag.slot] + 1
            if round_index > MAIN_ROUNDS:
                raise SimulationFault(
                    f"slot {tag.slot} requested main-loop key for round {round_index}"
                )
            self.store.addr_a = key_store_address(tag.mode, round_index)
        else:
            self.store.addr_a = 0
        # Final-key consumer: constantly reads round 10 for the mode of the
        # word that would reach the final instance two cycles from now.
        tag1 = tags[1]
        self.store.addr_b = key_store_address(tag1.mode if tag1 else MODE_ENCRYPT, FINAL_ROUND)
        # The word in stage 8 consumes its key at the next commit.
        tag8 = tags[8]
        self._pending_increment = tag8.slot if tag8 is not None else None

    def commit(self) -> None:
        self.store.commit()
        if self._pending_increment is not None:
            self.round_counters[self._pending_increment] += 1
            self._pending_increment = None

    def _initialization(self, datapath: RoundDatapath):
        rcon = [0] + [gf_pow(2, r - 1) for r in range(1, FINAL_ROUND + 1)]
        key = self._cipher_key
        self.initial_keys[MODE_ENCRYPT] = key
        self.store.present_write(key_store_address(MODE_ENCRYPT, 0), key)

        current = key
        round_keys = [key]
        for r in range(1, FINAL_ROUND + 1):
            self._inject_sb = (_rot_word(current & _MASK32) << 96, MODE_ENCRYPT)
            yield
            yield
            substituted = (datapath.sub_bytes.out >> 96) & _MASK32
            w0 = (current >> 96) ^ substituted ^ (rcon[r] << 24)
            w1 = ((current >> 64) & _MASK32) ^ w0
            w2 = ((current >> 32) & _MASK32) ^ w1
            w3 = (current & _MASK32) ^ w2
            current = (w0 << 96) | (w1 << 64) | (w2 << 32) | w3
            round_keys.append(current)
            self.store.present_write(key_store_address(MODE_ENCRYPT, r), current)
            yield

        self.initial_keys[MODE_DECRYPT] = round_keys[FINAL_ROUND]
        self.fsm = INVERTING

        # Stream encryption keys 9..1 back through the store and into the
        # product path; each inverse-transformed key returns 6 cycles after
        # injection and is stored as the decrypt key for round 10 - source.
        reads = list(range(MAIN_ROUNDS, 0, -1))
        injected: list[int] = []
        written = 0
        cycle_in_phase = 0
        while written < MAIN_ROUNDS:
            if cycle_in_phase < len(reads):
                self.store.addr_a = key_store_address(MODE_ENCRYPT, reads[cycle_in_phase])
            if cycle_in_phase == 0:
                self.store.present_write(
                    key_store_address(MODE_DECRYPT, 0), round_keys[FINAL_ROUND]
                )
            elif cycle_in_phase == 1:
                self.store.present_write(key_store_address(MODE_DECRYPT, FINAL_ROUND), key)
            if 1 <= cycle_in_phase <= len(reads):
                source_round = reads[cycle_in_phase - 1]
                self._inject_mc = (self.store.out_a, MODE_DECRYPT)
                injected.append(source_round)
            else:
                self._inject_mc = (0, 0)
            if cycle_in_phase >= 7:
                source_round = injected[cycle_in_phase - 7]
                self.store.present_write(
                    key_store_address(MODE_DECRYPT, FINAL_ROUND - source_round),
                    datapath.mix_columns.out,
                )
                written += 1
            cycle_in_phase += 1
            yield
        self.fsm = READY
