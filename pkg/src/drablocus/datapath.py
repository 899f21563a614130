"""The 12-stage iterative inner-pipelined AES round datapath.

One traversal of the loop crosses twelve register ranks:

====== ==========================================================
stage  register
====== ==========================================================
S0     substitution RAM read latch (8 dual-port RAMs, 2 bytes each)
S1     substitution RAM output register
S2     shift-rows switch register (slice flip flops)
S3     byte-product RAM read latch (8 dual-port RAMs)
S4     byte-product RAM output register
S5     XOR cascade rank 1 (slice-1 inputs, slice-2 input 1, fabric FF rank)
S6     XOR cascade rank 2 (slice-1 output, slice-2 input 2, slice-3 input 1)
S7     XOR cascade rank 3 (slice-2 output, slice-3 input 2)
S8     XOR cascade rank 4 (slice-3 output: full mix-columns result)
S9     main add-round-key input rank 1
S10    main add-round-key input rank 2
S11    main add-round-key output register
====== ==========================================================

The initial and final add-round-key instances sit outside the loop with
one input rank and one output rank each. A block makes the initial pass
(2 cycles), nine loop traversals (108), then re-enters S0..S2 for the
last substitution and row shift and diverts from S2 into the final
instance (2 + 1 + 2), 115 cycles in all.

Data and its (valid, mode, slot) tag advance in lockstep: the tag
pipeline here shifts on exactly the commits that move the data, and the
controller's shift registers mirror it. Inputs to the substitution and
product RAMs are OR-multiplexed; the controller's reset sequencing must
keep all but one source at zero, and the mux asserts that.
"""

from __future__ import annotations

from .fabric import BramModel, DspXorSlice, Register
from .tables import build_mixcolumns_image, build_sbox_image

NUM_LOOP_STAGES = 12
MAIN_ROUNDS = 9

SUB_BYTES_LATENCY = 2
SHIFT_ROWS_LATENCY = 1
MIX_COLUMNS_LATENCY = 6
ARK_MAIN_LATENCY = 3
ARK_EDGE_LATENCY = 2

# Admission to the last use of the shift-rows register: the track-register
# length. The final add-round-key instance adds two more cycles.
TRACK_CYCLES = ARK_EDGE_LATENCY + MAIN_ROUNDS * NUM_LOOP_STAGES + SUB_BYTES_LATENCY + SHIFT_ROWS_LATENCY
BLOCK_LATENCY = TRACK_CYCLES + ARK_EDGE_LATENCY

_MASK48 = (1 << 48) - 1
_MASK32 = (1 << 32) - 1
_MASK128 = (1 << 128) - 1


class ProtocolError(RuntimeError):
    """Two OR-multiplexed sources drove data in the same cycle."""


def or_mux_tap(*operands: int) -> int:
    """Bitwise-OR source multiplexing; at most one operand may be nonzero."""
    live = 0
    value = 0
    for v in operands:
        if v:
            live += 1
        value |= v
    if live > 1:
        raise ProtocolError(
            "OR-mux driven by multiple nonzero sources: "
            + ", ".join(f"{v:#034x}" for v in operands)
        )
    return value


class Word:
    """Tag riding alongside a 128-bit value in the pipeline."""

    __slots__ = ("seq", "mode", "slot")

    def __init__(self, seq: int, mode: int, slot: int):
        self.seq = seq
        self.mode = mode
        self.slot = slot

    def __repr__(self) -> str:
        return f"Word(seq={self.seq}, mode={self.mode}, slot={self.slot})"


# Row r rotates left by r for encryption, right for decryption; entries are
# source byte positions in the serialized column-major order.
_ENC_PERM = tuple(4 * ((n // 4 + n % 4) % 4) + n % 4 for n in range(16))
_DEC_PERM = tuple(4 * ((n // 4 - n % 4) % 4) + n % 4 for n in range(16))


def _permute_bytes(data: int, perm: tuple[int, ...]) -> int:
    v = 0
    for src in perm:
        v = (v << 8) | ((data >> ((15 - src) << 3)) & 0xFF)
    return v


class SubBytesUnit:
    """16 parallel {mode, byte} substitutions in 8 dual-port RAMs; 2 cycles."""

    def __init__(self, image=None):
        image = build_sbox_image() if image is None else image
        self.brams = [BramModel(image, output_register=True, name=f"sbox{i}") for i in range(8)]

    def present(self, data: int, mode: int) -> None:
        base = (mode & 1) << 8
        shift = 120
        for bram in self.brams:
            bram.addr_a = base | ((data >> shift) & 0xFF)
            bram.addr_b = base | ((data >> (shift - 8)) & 0xFF)
            shift -= 16

    @property
    def out(self) -> int:
        v = 0
        for bram in self.brams:
            v = (v << 16) | (bram.out_a << 8) | bram.out_b
        return v

    def compute(self) -> None:
        for bram in self.brams:
            bram.compute()

    def commit(self) -> None:
        for bram in self.brams:
            bram.commit()


class ShiftRowsUnit:
    """LUT switch selecting the rotation for the word's mode, then one register rank."""

    def __init__(self):
        self.reg = Register(128, name="shift_rows")

    def present(self, data: int, mode: int) -> None:
        self.reg.present(_permute_bytes(data, _DEC_PERM if mode else _ENC_PERM))

    @property
    def reset_in(self) -> bool:
        return self.reg.reset_in

    @reset_in.setter
    def reset_in(self, value: bool) -> None:
        self.reg.reset_in = value

    @property
    def out(self) -> int:
        return self.reg.out

    def compute(self) -> None:
        self.reg.compute()

    def commit(self) -> None:
        self.reg.commit()


def _build_pack_map() -> tuple[tuple[tuple[tuple[tuple[int, int], ...], ...], int], ...]:
    """Wiring of product-RAM output fields into the twelve cascade vectors.

    Output byte n (row i = n mod 4, column j = n div 4) is the XOR, over
    k = 0..3, of field (i - k) mod 4 of the product entry for input byte
    s(k, j). Lane k of each group gathers its terms so the four addends of
    every output byte line up at the same position across the four lanes.
    """
    groups = []
    for g, byte_range in enumerate((range(0, 6), range(6, 12), range(12, 16))):
        lanes = []
        for k in range(4):
            positions = []
            for n in byte_range:
                i, j = n % 4, n // 4
                source_index = 4 * j + k
                field = (i - k) % 4
                positions.append((source_index, 24 - 8 * field))
            lanes.append(tuple(positions))
        groups.append((tuple(lanes), len(byte_range) * 8))
    return tuple(groups)


PACK_MAP = _build_pack_map()


class MixColumnsUnit:
    """Two-phase mix columns: product lookups, then cascaded wide XORs.

    Phase 1 is 16 parallel {mode, byte} lookups returning 32-bit product
    vectors (2 cycles in the RAMs). Phase 2 packs the lookup fields into
    four vectors per output group (48, 48 and 32 bits wide) and XORs each
    group's vectors in a three-slice cascade. Lane delays are 1, 2 and 3
    cycles; the slices provide at most two input registers, so the third
    lane's extra cycle comes from a 128-bit fabric register rank.
    """

    def __init__(self, image=None):
        image = build_mixcolumns_image() if image is None else image
        self.brams = [BramModel(image, output_register=True, name=f"mcprod{i}") for i in range(8)]
        self.ff_rank = Register(128, name="mc_lane3_delay")
        self.cascades = []
        for g, (_, width) in enumerate(PACK_MAP):
            first = DspXorSlice(width, a_regs=1, b_regs=1, name=f"mc_g{g}s0")
            second = DspXorSlice(first.width, a_regs=0, b_regs=2, cascade_from=first,
                                 name=f"mc_g{g}s1")
            third = DspXorSlice(first.width, a_regs=0, b_regs=2, cascade_from=second,
                                name=f"mc_g{g}s2")
            self.cascades.append((first, second, third))
        self._parts = [self.ff_rank]
        for cascade in self.cascades:
            self._parts.extend(cascade)

    def present(self, data: int, mode: int) -> None:
        base = (mode & 1) << 8
        shift = 120
        for bram in self.brams:
            bram.addr_a = base | ((data >> shift) & 0xFF)
            bram.addr_b = base | ((data >> (shift - 8)) & 0xFF)
            shift -= 16

    def _wire_cascade(self) -> None:
        lookups = []
        for bram in self.brams:
            lookups.append(bram.out_a)
            lookups.append(bram.out_b)
        lane3_packed = 0
        for (lanes, width), (first, second, third) in zip(PACK_MAP, self.cascades):
            vectors = []
            for positions in lanes:
                v = 0
                for source_index, field_shift in positions:
                    v = (v << 8) | ((lookups[source_index] >> field_shift) & 0xFF)
                vectors.append(v)
            first.present(a=vectors[0], b=vectors[1])
            second.present(b=vectors[2])
            lane3_packed = (lane3_packed << width) | vectors[3]
        self.ff_rank.present(lane3_packed)
        delayed = self.ff_rank.out
        self.cascades[2][2].present(b=delayed & _MASK32)
        self.cascades[1][2].present(b=(delayed >> 32) & _MASK48)
        self.cascades[0][2].present(b=(delayed >> 80) & _MASK48)

    @property
    def out(self) -> int:
        return (
            (self.cascades[0][2].out << 80)
            | (self.cascades[1][2].out << 32)
            | self.cascades[2][2].out
        )

    def compute(self) -> None:
        for bram in self.brams:
            bram.compute()
        self._wire_cascade()
        for part in self._parts:
            part.compute()

    def commit(self) -> None:
        for bram in self.brams:
            bram.commit()
        for part in self._parts:
            part.commit()


class AddRoundKeyUnit:
    """128-bit XOR with a round key in three parallel slices (48/48/32).

    The main instance runs two input ranks plus the output rank; the
    initial and final instances use a single input rank.
    """

    def __init__(self, input_regs: int, name: str):
        self.hi = DspXorSlice(48, a_regs=input_regs, b_regs=input_regs, name=f"{name}_hi")
        self.mid = DspXorSlice(48, a_regs=input_regs, b_regs=input_regs, name=f"{name}_mid")
        self.lo = DspXorSlice(32, a_regs=input_regs, b_regs=input_regs, name=f"{name}_lo")
        self.latency = input_regs + 1
        self._slices = (self.hi, self.mid, self.lo)

    def present(self, data: int, key: int) -> None:
        self.hi.present(a=(data >> 80) & _MASK48, b=(key >> 80) & _MASK48)
        self.mid.present(a=(data >> 32) & _MASK48, b=(key >> 32) & _MASK48)
        self.lo.present(a=data & _MASK32, b=key & _MASK32)

    @property
    def reset_in(self) -> bool:
        return self.hi.reset_in

    @reset_in.setter
    def reset_in(self, value: bool) -> None:
        for s in self._slices:
            s.reset_in = value

    @property
    def out(self) -> int:
        return (self.hi.out << 80) | (self.mid.out << 32) | self.lo.out

    def compute(self) -> None:
        for s in self._slices:
            s.compute()

    def commit(self) -> None:
        for s in self._slices:
            s.commit()


class CollisionError(RuntimeError):
    """Two valid words tried to claim the same stage register."""


class RoundDatapath:
    """The composed loop plus initial/final key-add instances and tap points.

    Per cycle, drive :meth:`compute_cycle` with this cycle's control and
    key values, then :meth:`commit_cycle`. Tag accessors reflect the word
    whose data is visible at the matching tap in the same cycle.
    """

    def __init__(self, sbox_image=None, mc_image=None):
        self.sub_bytes = SubBytesUnit(sbox_image)
        self.shift_rows = ShiftRowsUnit()
        self.mix_columns = MixColumnsUnit(mc_image)
        self.main_ark = AddRoundKeyUnit(input_regs=2, name="ark_main")
        self.initial_ark = AddRoundKeyUnit(input_regs=1, name="ark_init")
        self.final_ark = AddRoundKeyUnit(input_regs=1, name="ark_final")
        self._units = (
            self.sub_bytes,
            self.shift_rows,
            self.mix_columns,
            self.main_ark,
            self.initial_ark,
            self.final_ark,
        )
        # Tag pipelines: entry k holds the tag of the word occupying that
        # register rank in the current cycle (None when the rank carries
        # no live word).
        self.loop_tags: list[Word | None] = [None] * NUM_LOOP_STAGES
        self.initial_tags: list[Word | None] = [None, None]
        self.final_tags: list[Word | None] = [None, None]
        self._pending_admit: Word | None = None
        self._pending_divert = False

    def compute_cycle(
        self,
        *,
        admit: tuple[int, int, Word] | None = None,
        divert: bool = False,
        main_key: int = 0,
        final_key: int = 0,
        initial_reset: bool = True,
        main_reset: bool = False,
        shift_rows_reset: bool = False,
        final_reset: bool = False,
        ks_sub_bytes: tuple[int, int] = (0, 0),
        ks_mix_columns: tuple[int, int] = (0, 0),
    ) -> None:
        recirc = self.main_ark.out
        arriving = self.initial_ark.out
        ks_sb_data, ks_sb_mode = ks_sub_bytes
        ks_mc_data, ks_mc_mode = ks_mix_columns

        sb_in = or_mux_tap(recirc, arriving, ks_sb_data)
        if self.loop_tags[11] is not None:
            sb_mode = self.loop_tags[11].mode
        elif self.initial_tags[1] is not None:
            sb_mode = self.initial_tags[1].mode
        else:
            sb_mode = ks_sb_mode
        self.sub_bytes.present(sb_in, sb_mode)

        sr_tag = self.loop_tags[1]
        self.shift_rows.present(self.sub_bytes.out, sr_tag.mode if sr_tag else 0)

        mc_in = or_mux_tap(self.shift_rows.out, ks_mc_data)
        mc_tag = self.loop_tags[2]
        self.mix_columns.present(mc_in, mc_tag.mode if mc_tag else ks_mc_mode)

        self.main_ark.present(self.mix_columns.out, main_key)
        self.final_ark.present(self.shift_rows.out, final_key)

        if admit is not None:
            block, key, tag = admit
            self.initial_ark.present(block, key)
            self._pending_admit = tag
        else:
            self.initial_ark.present(0, 0)
            self._pending_admit = None
        self._pending_divert = divert

        self.initial_ark.reset_in = initial_reset
        self.main_ark.reset_in = main_reset
        self.shift_rows.reset_in = shift_rows_reset
        self.final_ark.reset_in = final_reset

        for unit in self._units:
            unit.compute()

    def commit_cycle(self) -> None:
        for unit in self._units:
            unit.commit()

        tags = self.loop_tags
        entering = self.initial_tags[1]
        wrapping = tags[11]
        if entering is not None and wrapping is not None:
            raise CollisionError(
                f"stage S0 claimed by arriving {entering} and recirculating {wrapping}"
            )
        diverted = tags[2] if self._pending_divert else None
        into_s3 = None if self._pending_divert else tags[2]
        self.loop_tags = [entering or wrapping] + tags[0:2] + [into_s3] + tags[3:11]
        self.final_tags = [diverted, self.final_tags[0]]
        self.initial_tags = [self._pending_admit, self.initial_tags[0]]
        self._pending_admit = None
        self._pending_divert = False

    # Tap points; each value is aligned with its tag for the current cycle.
    @property
    def sub_bytes_tap(self) -> tuple[int, Word | None]:
        return self.sub_bytes.out, self.loop_tags[1]

    @property
    def shift_rows_tap(self) -> tuple[int, Word | None]:
        return self.shift_rows.out, self.loop_tags[2]

    @property
    def mix_columns_tap(self) -> tuple[int, Word | None]:
        return self.mix_columns.out, self.loop_tags[8]

    @property
    def main_ark_tap(self) -> tuple[int, Word | None]:
        return self.main_ark.out, self.loop_tags[11]

    @property
    def initial_ark_tap(self) -> tuple[int, Word | None]:
        return self.initial_ark.out, self.initial_tags[1]

    @property
    def final_output(self) -> tuple[int, Word | None]:
        return self.final_ark.out, self.final_tags[1]

    @property
    def occupied_loop_slots(self) -> int:
        return sum(1 for tag in self.loop_tags if tag is not None)
