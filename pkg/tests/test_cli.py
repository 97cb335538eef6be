"""CLI behavior: exit codes, file IO, and asm/disasm identity."""

import pytest

from pimcrypt import cli, isa, oracle

KEY = "000102030405060708090a0b0c0d0e0f"
IV = "0f0e0d0c0b0a09080706050403020100"


def run(argv):
    return cli.main(argv)


def test_cbc_round_trip(tmp_path, rng):
    pt = tmp_path / "pt.bin"
    ct = tmp_path / "ct.bin"
    out = tmp_path / "out.bin"
    data = rng.randbytes(48)
    pt.write_bytes(data)
    assert run(["encrypt", "--mode", "cbc",
                "--key", KEY, "--iv", IV,
                "--in", str(pt), "--out", str(ct)]) == 0
    assert ct.read_bytes() == oracle.cbc_encrypt(
        bytes.fromhex(KEY), bytes.fromhex(IV), data)
    assert run(["decrypt", "--mode", "cbc",
                "--key", KEY, "--iv", IV,
                "--in", str(ct), "--out", str(out)]) == 0
    assert out.read_bytes() == data


def test_gcm_tamper_exit_code(tmp_path, rng):
    pt, ct = tmp_path / "pt.bin", tmp_path / "ct.bin"
    pt.write_bytes(rng.randbytes(32))
    nonce = "00" * 12
    assert run(["encrypt", "--mode", "gcm",
                "--key", KEY, "--iv", nonce,
                "--in", str(pt), "--out", str(ct)]) == 0
    blob = bytearray(ct.read_bytes())
    blob[-1] ^= 1
    ct.write_bytes(bytes(blob))
    assert run(["decrypt", "--mode", "gcm",
                "--key", KEY, "--iv", nonce,
                "--in", str(ct), "--out", str(tmp_path / "o")]
               ) == cli.MISMATCH_ERROR


def test_hash_known_digest(tmp_path, capsys):
    src = tmp_path / "msg.bin"
    src.write_bytes(b"")
    assert run(["hash", "--alg", "sha3-256", "--in", str(src)]) == 0
    out = capsys.readouterr().out.strip()
    assert out == oracle.sha3(256, b"").hex()


def test_asm_disasm_identity(tmp_path, rng):
    words = [isa.CommandWord.rd_row(5), isa.CommandWord.shift(3, right=True),
             isa.CommandWord.act_row(127),
             isa.CommandWord.logic_op(9, isa.LogicKind.XOR),
             isa.CommandWord.wr_row(0)]
    blob = isa.to_bytes(words)
    binf, asmf, binf2 = (tmp_path / n for n in ("a.bin", "a.s", "b.bin"))
    binf.write_bytes(blob)
    assert run(["disasm", "--in", str(binf), "--out", str(asmf)]) == 0
    assert run(["asm", "--in", str(asmf), "--out", str(binf2)]) == 0
    assert binf2.read_bytes() == blob


def test_disasm_invalid_opcode(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"\x00\x00")
    assert run(["disasm", "--in", str(bad),
                "--out", str(tmp_path / "o")]) == cli.USAGE_ERROR


def test_bad_key_is_usage_error(tmp_path):
    src = tmp_path / "pt.bin"
    src.write_bytes(bytes(16))
    assert run(["encrypt", "--mode", "cbc",
                "--key", "zz", "--iv", IV, "--in", str(src),
                "--out", str(tmp_path / "o")]) == cli.USAGE_ERROR


def test_missing_input_is_io_error(tmp_path):
    assert run(["hash", "--alg", "sha3-256",
                "--in", str(tmp_path / "nope.bin")]) == cli.IO_ERROR


def test_no_verify_identical_output(tmp_path, rng):
    pt = tmp_path / "pt.bin"
    pt.write_bytes(rng.randbytes(32))
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    common = ["encrypt", "--mode", "ctr",
              "--key", KEY * 2, "--iv", IV, "--in", str(pt)]
    assert run(common + ["--out", str(a)]) == 0
    assert run(common + ["--out", str(b), "--no-verify"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_trace_emits_records(tmp_path, capsys):
    assert run(["trace", "--alg", "aes-128-encrypt"]) == 0
    out = capsys.readouterr().out
    assert "act_row" in out or "rd_row" in out


def test_bench_json(capsys):
    assert run(["bench", "--format", "json"]) == 0
    import json
    payload = json.loads(capsys.readouterr().out)
    assert "calibration" in payload and payload["rows"]
