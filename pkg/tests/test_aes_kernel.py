"""Fabric AES vs the independent oracle, plus pinned command counts."""

import pytest

from pimcrypt import oracle
from pimcrypt.controller import Controller, ExecutionStats
from pimcrypt.fabric import Subarray
from pimcrypt.kernels import aes, modes

FIPS_KEY128 = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
FIPS_KEY256 = bytes.fromhex(
    "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f")
FIPS_PT = bytes.fromhex("00112233445566778899aabbccddeeff")
FIPS_CT128 = bytes.fromhex("69c4e0d86a7b0430d8cdb78070b4c55a")
FIPS_CT256 = bytes.fromhex("8ea2b7ca516745bfeafc49904b496089")


def test_fips197_vectors_on_fabric():
    assert modes.ecb_crypt(FIPS_KEY128, FIPS_PT) == FIPS_CT128
    assert modes.ecb_crypt(FIPS_KEY256, FIPS_PT) == FIPS_CT256
    assert modes.ecb_crypt(FIPS_KEY128, FIPS_CT128, "decrypt") == FIPS_PT
    assert modes.ecb_crypt(FIPS_KEY256, FIPS_CT256, "decrypt") == FIPS_PT


@pytest.mark.parametrize("klen", [16, 32])
@pytest.mark.parametrize("direction", ["encrypt", "decrypt"])
def test_random_blocks_vs_oracle(klen, direction, rng):
    ref = (oracle.aes_encrypt_block if direction == "encrypt"
           else oracle.aes_decrypt_block)
    for _ in range(3):
        key = rng.randbytes(klen)
        blocks = [rng.randbytes(16) for _ in range(16)]
        out = modes.ecb_crypt(key, b"".join(blocks), direction)
        assert out == b"".join(ref(key, b) for b in blocks)


def test_sixteen_distinct_blocks_per_pass(rng):
    # One pass must keep the 16 column-lanes independent.
    key = rng.randbytes(16)
    blocks = [bytes([i]) * 16 for i in range(16)]
    out = modes.ecb_crypt(key, b"".join(blocks))
    for i, blk in enumerate(blocks):
        assert out[16 * i:16 * i + 16] == oracle.aes_encrypt_block(key, blk)


def test_key_schedule_matches_oracle():
    words = aes.expand_key_words(FIPS_KEY128)
    assert b"".join(words[:11]) == b"".join(oracle.expand_key(FIPS_KEY128))
    words256 = aes.expand_key_words(FIPS_KEY256)
    assert b"".join(words256[:15]) == b"".join(oracle.expand_key(FIPS_KEY256))


# Pinned counts for the control-kernel budget. [DERIVED]
GOLDEN_COUNTS = {
    "encrypt": {"BitSliceFwd": 240, "BitSliceInv": 280, "AddRoundKey": 24,
                "SubBytes": 357, "ShiftRows": 472, "MixColumns": 241,
                "ChainXor": 24},
    "decrypt": {"BitSliceFwd": 240, "BitSliceInv": 280, "AddRoundKey": 24,
                "SubBytes": 448, "ShiftRows": 472, "MixColumns": 379,
                "ChainXor": 24},
}


def test_function_command_counts():
    for direction, golden in GOLDEN_COUNTS.items():
        prog = aes.build_aes_program(128, direction)
        assert {n: fd.count for n, fd in prog.functions.items()} == golden


# Cycles for one 16-block pass, no chaining. [DERIVED]
GOLDEN_CYCLES = {(128, "encrypt"): 14875, (128, "decrypt"): 18179,
                 (256, "encrypt"): 20659, (256, "decrypt"): 25391}


@pytest.mark.parametrize("variant,direction", sorted(GOLDEN_CYCLES))
def test_pass_cycles(variant, direction, rng):
    prog = aes.build_aes_program(variant, direction)
    env = dict(modes._key_env(rng.randbytes(variant // 8), direction))
    env["blocks"] = [rng.randbytes(16) for _ in range(16)]
    stats = Controller(prog).run(Subarray(block_width=aes.BLOCK_WIDTH), env)
    assert stats.cycles == GOLDEN_CYCLES[(variant, direction)]


def test_chain_xor_adds_24_commands():
    base = aes.build_aes_program(128, "encrypt")
    chained = aes.build_aes_program(128, "encrypt", chain="pre")
    assert chained.functions["ChainXor"].count == 24
    n = sum(i.iterations * chained.functions[i.function].count
            for i in chained.schedule)
    m = sum(i.iterations * base.functions[i.function].count
            for i in base.schedule)
    assert n - m == 24
