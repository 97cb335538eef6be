"""Keccak-f[1600] and the SHA3 sponge lowered onto the fabric.

Lane-per-row layout: lane ``A[x,y]`` lives in row ``5y + x``, packed as
four 64-bit segments so four independent states run side by side
(block width 64 keeps every shift lane-confined).  Rows:

* 0..24    state lanes
* 25..31   theta parity lanes / rotation work rows (chi reuses them)
* 32..55   the 24 round constants, walked by a +1 stride rule in iota
* 56..73   staged message lanes for absorption (up to the SHA3-224 rate)
* 74       HMAC pad constant (ipad or opad pattern)

The permutation round is one fixed command stream: pi emits no commands
at all — the rho rotations simply deposit each lane at its permuted
row by walking the permutation cycle backwards — and chi then runs in
place with two saved lanes per group.
"""

from __future__ import annotations

from ..controller import (FunctionDescriptor, HostAction, Invocation,
                          KernelProgram, StrideRule, host_action)
from ..isa import CommandWord, LogicKind
from . import hostio
from .layout import LayoutMap, sha3_geometry

__all__ = ["SHA3_LAYOUT", "build_sha3_program", "gen_theta", "gen_rho_pi",
           "gen_pi", "gen_chi", "gen_iota", "gen_add_state", "pad_sha3"]

SHA3_LAYOUT = LayoutMap({
    "lanes": (0, 25),
    "temps": (25, 7),
    "rc": (32, 24),
    "stage": (56, 18),
    "pad": (74, 1),
})

GEOMETRY = sha3_geometry()
BLOCK_WIDTH = 64

RATE_BYTES = {224: 144, 256: 136, 384: 104, 512: 72}

_ROT = [[0, 36, 3, 41, 18],
        [1, 44, 10, 45, 2],
        [62, 6, 43, 15, 61],
        [28, 55, 25, 21, 56],
        [27, 20, 39, 8, 14]]

_RC = [0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
       0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
       0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
       0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
       0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
       0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
       0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
       0x8000000000008080, 0x0000000080000001, 0x8000000080008008]

_TEMP = list(SHA3_LAYOUT.span("temps"))
_RC0 = SHA3_LAYOUT.row("rc", 0)
_STAGE0 = SHA3_LAYOUT.row("stage", 0)
_PAD = SHA3_LAYOUT.row("pad")


def _row(x: int, y: int) -> int:
    return 5 * y + x


def _logic(a: int, kind: LogicKind, b: int, dst: int) -> list[CommandWord]:
    return [CommandWord.act_row(a), CommandWord.logic_op(b, kind),
            CommandWord.wr_row(dst)]


def _rot_into(src: int, dst: int, s: int, w1: int, w2: int) -> list[CommandWord]:
    """dst = src rotated left (toward higher z) by s within each lane."""
    return ([CommandWord.rd_row(src), CommandWord.shift(s, right=True),
             CommandWord.wr_row(w1),
             CommandWord.rd_row(src), CommandWord.shift(64 - s),
             CommandWord.wr_row(w2)]
            + _logic(w1, LogicKind.OR, w2, dst))


def gen_theta() -> list[CommandWord]:
    c = _TEMP[:5]
    w1, w2 = _TEMP[5], _TEMP[6]
    cmds: list[CommandWord] = []
    for x in range(5):
        cmds += [CommandWord.rd_row(_row(x, 0)), CommandWord.wr_row(c[x])]
        for y in range(1, 5):
            cmds += _logic(c[x], LogicKind.XOR, _row(x, y), c[x])
    for x in range(5):
        cmds += _rot_into(c[(x + 1) % 5], w1, 1, w1, w2)
        cmds += _logic(w1, LogicKind.XOR, c[(x - 1) % 5], w1)
        for y in range(5):
            cmds += _logic(_row(x, y), LogicKind.XOR, w1, _row(x, y))
    return cmds


def gen_pi() -> tuple[list[CommandWord], dict[tuple[int, int], tuple[int, int]]]:
    """Pure renaming: zero commands plus the position map.

    Lane ``(x, y)`` lands at ``(y, (2x + 3y) mod 5)``; the rotation pass
    uses the map to pick its destination rows, so the permutation itself
    never costs a cycle.
    """
    mapping = {(x, y): (y, (2 * x + 3 * y) % 5)
               for x in range(5) for y in range(5)}
    return [], mapping


def _pi_cycle() -> list[tuple[int, int]]:
    """The single 24-cycle pi traces over the non-origin lanes."""
    _, pi = gen_pi()
    cycle = [(1, 0)]
    while True:
        nxt = pi[cycle[-1]]
        if nxt == cycle[0]:
            return cycle
        cycle.append(nxt)


def gen_rho_pi() -> list[CommandWord]:
    """Rotate every lane and deposit it at its permuted position.

    Walking the permutation cycle backwards lets each write land in a
    row whose old value was already consumed; one temp row closes the
    cycle.  Lane (0, 0) is a fixed point with zero rotation.
    """
    w1, w2, hold = _TEMP[0], _TEMP[1], _TEMP[2]
    cycle = _pi_cycle()
    last = cycle[-1]
    cmds = _rot_into(_row(*last), hold, _ROT[last[0]][last[1]], w1, w2)
    for i in range(len(cycle) - 2, -1, -1):
        x, y = cycle[i]
        cmds += _rot_into(_row(x, y), _row(*cycle[i + 1]),
                          _ROT[x][y], w1, w2)
    cmds += [CommandWord.rd_row(hold), CommandWord.wr_row(_row(*cycle[0]))]
    return cmds


def gen_chi() -> list[CommandWord]:
    """In-place chi: two saved lanes per five-lane group cover the wrap."""
    t0, t1, t = _TEMP[3], _TEMP[4], _TEMP[5]
    cmds: list[CommandWord] = []
    for y in range(5):
        cmds += [CommandWord.rd_row(_row(0, y)), CommandWord.wr_row(t0),
                 CommandWord.rd_row(_row(1, y)), CommandWord.wr_row(t1)]
        saved = {0: t0, 1: t1}
        for x in range(5):
            b1 = saved.get((x + 1) % 5, _row((x + 1) % 5, y))
            b2 = saved.get((x + 2) % 5, _row((x + 2) % 5, y))
            cmds += [CommandWord.act_row(b1),
                     CommandWord.logic_op(b1, LogicKind.NOT),
                     CommandWord.wr_row(t)]
            cmds += _logic(t, LogicKind.AND, b2, t)
            cmds += _logic(t, LogicKind.XOR, saved.get(x, _row(x, y)),
                           _row(x, y))
    return cmds


def gen_iota() -> tuple[list[CommandWord], list[StrideRule]]:
    cmds = _logic(_row(0, 0), LogicKind.XOR, _RC0, _row(0, 0))
    return cmds, [StrideRule(1, 1)]


def gen_add_state(lanes: int) -> list[CommandWord]:
    cmds = []
    for i in range(lanes):
        cmds += _logic(i, LogicKind.XOR, _STAGE0 + i, i)
    return cmds


def gen_key_xor_pad(lanes: int) -> list[CommandWord]:
    cmds = []
    for i in range(lanes):
        cmds += _logic(_STAGE0 + i, LogicKind.XOR, _PAD, _STAGE0 + i)
    return cmds


# ---------------------------------------------------------------------------
# Program assembly
# ---------------------------------------------------------------------------

def pad_sha3(msg: bytes, rate: int) -> bytes:
    pad_len = -len(msg) % rate or rate
    padded = bytearray(msg) + bytearray(pad_len)
    padded[len(msg)] ^= 0x06
    padded[-1] ^= 0x80
    return bytes(padded)


def build_sha3_program(bits: int, nblocks: int,
                       key_prep: bool = False) -> KernelProgram:
    """Absorb ``nblocks`` staged rate-blocks and leave the state readable.

    ``key_prep`` XORs the pad-constant row into the first staged block
    before absorption (the HMAC key preparation).
    """
    rate_lanes = RATE_BYTES[bits] // 8
    theta, rho, chi = gen_theta(), gen_rho_pi(), gen_chi()
    iota, iota_strides = gen_iota()
    perm = theta + rho + chi + iota
    iota_off = len(theta) + len(rho) + len(chi)
    commands: list[CommandWord] = []
    functions: dict[str, FunctionDescriptor] = {}

    def add(name, cmds, strides=()):
        functions[name] = FunctionDescriptor(name, len(commands), len(cmds),
                                             strides=tuple(strides))
        commands.extend(cmds)

    add("StatePermute", perm,
        [StrideRule(iota_off + s.offset, s.increment) for s in iota_strides])
    add("AddState", gen_add_state(rate_lanes))
    if key_prep:
        add("KeyXorPad", gen_key_xor_pad(rate_lanes))

    schedule: list[Invocation] = []
    actions = [HostAction(0, "sha3_init", {})]
    for blk in range(nblocks):
        actions.append(HostAction(len(schedule), "sha3_load_block",
                                  {"index": blk}))
        if key_prep and blk == 0:
            schedule.append(Invocation("KeyXorPad"))
        schedule.append(Invocation("AddState"))
        schedule.append(Invocation("StatePermute", 24, 0))
    actions.append(HostAction(len(schedule), "sha3_read_state", {}))
    return KernelProgram(
        name=f"sha3-{bits}-{nblocks}blk" + ("-keyed" if key_prep else ""),
        commands=commands, functions=functions, schedule=schedule,
        host_actions=actions, block_width=BLOCK_WIDTH)


# ---------------------------------------------------------------------------
# Host actions
# ---------------------------------------------------------------------------

@host_action("sha3_init")
def _init(sub, env):
    for i in range(25):
        sub.write_row(i, 0)
    for i, rc in enumerate(_RC):
        sub.write_row(_RC0 + i, hostio.lane_value([rc] * 4))
    sub.write_row(_PAD, hostio.lane_value([env.get("pad_lane", 0)] * 4))


@host_action("sha3_load_block")
def _load_block(sub, env, index):
    rows = env["blocks"][index]      # already packed row values
    for i, value in enumerate(rows):
        sub.write_row(_STAGE0 + i, value)
    for i in range(len(rows), 18):
        sub.write_row(_STAGE0 + i, 0)


@host_action("sha3_read_state")
def _read_state(sub, env):
    env["state_rows"] = [sub.read_row(i) for i in range(25)]
