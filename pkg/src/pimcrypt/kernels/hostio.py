"""Host-side data packing between byte buffers and grid rows.

These run on the host port (zero fabric cycles) and model the DMA engine
plus whatever register shuffling the MCU does for free while staging
data.  Column conventions:

* AES: tile ``t`` owns columns ``16t .. 16t+15``; staged byte ``j`` of a
  block sits LSB-first in an 8-column field; sliced planes put bit ``b``
  of byte ``j`` at column ``16t + j`` of plane row ``b``.
* SHA3: lane segment ``s`` owns columns ``64s .. 64s+63``, lane bit ``z``
  at column ``64s + z``.
* GHASH: block bit ``x_i`` (MSB-first across the block) at column ``i``.
"""

from __future__ import annotations

__all__ = [
    "aes_stage_rows", "aes_unstage_rows", "aes_plane_rows",
    "aes_planes_to_blocks", "replicate_tiles",
    "lane_value", "lanes_from_value",
    "ghash_block_row", "ghash_row_block",
]


# -- AES ---------------------------------------------------------------------

def aes_stage_rows(blocks: list[bytes]) -> list[int]:
    """16 staging-row values; row j holds byte j of every block.

    Bytes 0..7 occupy the low half of each tile, bytes 8..15 the high
    half, so an OR of rows j and j+8 yields the matrix fed to the
    transpose network.
    """
    rows = [0] * 16
    for t, block in enumerate(blocks):
        for j, byte in enumerate(block):
            base = 16 * t + (0 if j < 8 else 8)
            rows[j] |= byte << base
    return rows


def aes_unstage_rows(rows: list[int], count: int) -> list[bytes]:
    blocks = []
    for t in range(count):
        block = bytearray(16)
        for j in range(16):
            base = 16 * t + (0 if j < 8 else 8)
            block[j] = (rows[j] >> base) & 0xFF
        blocks.append(bytes(block))
    return blocks


def aes_plane_rows(blocks: list[bytes]) -> list[int]:
    """Bit-sliced plane values: plane b, column 16t+j = bit b of byte j."""
    planes = [0] * 8
    for t, block in enumerate(blocks):
        for j, byte in enumerate(block):
            for b in range(8):
                if byte >> b & 1:
                    planes[b] |= 1 << (16 * t + j)
    return planes


def aes_planes_to_blocks(planes: list[int], count: int) -> list[bytes]:
    blocks = []
    for t in range(count):
        block = bytearray(16)
        for j in range(16):
            col = 16 * t + j
            block[j] = sum(((planes[b] >> col) & 1) << b for b in range(8))
        blocks.append(bytes(block))
    return blocks


def replicate_tiles(block: bytes) -> list[int]:
    """Plane values of one 16-byte value replicated into all 16 tiles."""
    return aes_plane_rows([block] * 16)


# -- SHA3 --------------------------------------------------------------------

def lane_value(segments: list[int]) -> int:
    """Pack up to four 64-bit lane values into one row."""
    value = 0
    for s, lane in enumerate(segments):
        value |= (lane & ((1 << 64) - 1)) << (64 * s)
    return value


def lanes_from_value(value: int) -> list[int]:
    return [(value >> (64 * s)) & ((1 << 64) - 1) for s in range(4)]


# -- GHASH -------------------------------------------------------------------

def ghash_block_row(block: bytes, reversed_bytes: bool = False) -> int:
    """Row value with GHASH bit x_i at column i.

    ``reversed_bytes`` stages the block in arrival order (last byte
    first), the convention the in-fabric byte-aligning step undoes.
    """
    data = block[::-1] if reversed_bytes else block
    value = 0
    for i, byte in enumerate(data):
        for b in range(8):
            if byte >> (7 - b) & 1:
                value |= 1 << (8 * i + b)
    return value


def ghash_row_block(value: int) -> bytes:
    out = bytearray(16)
    for i in range(16):
        byte = 0
        for b in range(8):
            if value >> (8 * i + b) & 1:
                byte |= 1 << (7 - b)
        out[i] = byte
    return bytes(out)
