"""Command-line front end.

Crypto subcommands run on the simulated fabric and, by default, verify
every output against the independent reference implementation (exit 1
on any mismatch).  ``bench`` reproduces the embedded baseline tables;
``asm``/``disasm``/``trace`` expose the ISA tooling.

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 I/O
error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import oracle, perfmodel
from .controller import Controller
from .fabric import CycleCostModel, Subarray
from .isa import (AsmError, InvalidOpcode, assemble, disassemble, from_bytes,
                  to_bytes)
from .kernels import aes, ghash, keccak, modes

USAGE_ERROR, MISMATCH_ERROR, IO_ERROR = 2, 1, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str | None) -> bytes:
    try:
        if path in (None, "-"):
            return sys.stdin.buffer.read()
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", IO_ERROR)


def _write(path: str | None, data: bytes) -> None:
    try:
        if path in (None, "-"):
            sys.stdout.buffer.write(data)
        else:
            with open(path, "wb") as fh:
                fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", IO_ERROR)


def _hex(value: str | None, name: str, lengths: tuple[int, ...] = ()) -> bytes:
    if value is None:
        raise CliError(f"--{name} is required", USAGE_ERROR)
    try:
        data = bytes.fromhex(value)
    except ValueError:
        raise CliError(f"--{name} must be hex", USAGE_ERROR)
    if lengths and len(data) not in lengths:
        raise CliError(f"--{name} must be {' or '.join(map(str, lengths))} "
                       f"bytes, got {len(data)}", USAGE_ERROR)
    return data


def _verify(label: str, got: bytes, expect: bytes, enabled: bool) -> None:
    if enabled and got != expect:
        raise CliError(f"{label}: fabric/reference mismatch", MISMATCH_ERROR)


# ---------------------------------------------------------------------------
# Crypto subcommands
# ---------------------------------------------------------------------------

def cmd_encrypt(args, decrypt: bool = False) -> int:
    data = _read(args.infile)
    key = _hex(args.key, "key", (16, 32))
    verify = not args.no_verify
    mode = args.mode
    direction = "decrypt" if decrypt else "encrypt"
    if mode in ("ecb", "cbc", "ctr") and mode != "ctr" and len(data) % 16:
        raise CliError("input must be a multiple of 16 bytes", USAGE_ERROR)
    try:
        if mode == "ecb":
            out = modes.ecb_crypt(key, data, direction)
            ref_one = (oracle.aes_decrypt_block if decrypt
                       else oracle.aes_encrypt_block)
            ref = b"".join(ref_one(key, data[i:i + 16])
                           for i in range(0, len(data), 16))
        elif mode == "cbc":
            iv = _hex(args.iv, "iv", (16,))
            if decrypt:
                out = modes.cbc_decrypt(key, iv, data)
                ref = oracle.cbc_decrypt(key, iv, data)
            else:
                out = modes.cbc_encrypt(key, iv, data)
                ref = oracle.cbc_encrypt(key, iv, data)
        elif mode == "ctr":
            iv = _hex(args.iv, "iv", (16,))
            out = modes.ctr_crypt(key, iv, data)
            ref = oracle.ctr_crypt(key, iv, data)
        elif mode == "ccm":
            nonce = _hex(args.iv, "iv", tuple(range(7, 14)))
            aad = bytes.fromhex(args.aad or "")
            if decrypt:
                out = modes.ccm_decrypt(key, nonce, aad, data)
                ref = oracle.ccm_decrypt(key, nonce, aad, data)
            else:
                out = modes.ccm_encrypt(key, nonce, aad, data)
                ref = oracle.ccm_encrypt(key, nonce, aad, data)
        elif mode == "gcm":
            iv = _hex(args.iv, "iv")
            aad = bytes.fromhex(args.aad or "")
            if decrypt:
                out = modes.gcm_decrypt(key, iv, aad, data)
                ref = oracle.gcm_decrypt(key, iv, aad, data)
            else:
                out = modes.gcm_encrypt(key, iv, aad, data)
                ref = oracle.gcm_encrypt(key, iv, aad, data)
        else:
            raise CliError(f"unknown mode {mode}", USAGE_ERROR)
    except (modes.TagMismatch, oracle.TagMismatch) as exc:
        raise CliError(str(exc), MISMATCH_ERROR)
    _verify(f"aes-{len(key)*8}-{mode}", out, ref, verify)
    _write(args.outfile, out)
    return 0


def cmd_decrypt(args) -> int:
    return cmd_encrypt(args, decrypt=True)


def _sha3_bits(alg: str) -> int:
    try:
        prefix, bits = alg.rsplit("-", 1)
        if prefix != "sha3":
            raise ValueError
        bits = int(bits)
        if bits not in keccak.RATE_BYTES:
            raise ValueError
        return bits
    except ValueError:
        raise CliError(f"--alg must be sha3-{{224,256,384,512}}, got {alg}",
                       USAGE_ERROR)


def cmd_hash(args) -> int:
    bits = _sha3_bits(args.alg)
    msg = _read(args.infile)
    out = modes.sha3_digest(bits, msg)
    _verify(args.alg, out, oracle.sha3(bits, msg), not args.no_verify)
    _write(args.outfile, out.hex().encode() + b"\n")
    return 0


def cmd_hmac(args) -> int:
    bits = _sha3_bits(args.alg)
    key = _hex(args.key, "key")
    msg = _read(args.infile)
    out = modes.hmac_sha3(bits, key, msg)
    _verify(f"hmac-{args.alg}", out, oracle.hmac_sha3(bits, key, msg),
            not args.no_verify)
    _write(args.outfile, out.hex().encode() + b"\n")
    return 0


# ---------------------------------------------------------------------------
# Tooling subcommands
# ---------------------------------------------------------------------------

def cmd_asm(args) -> int:
    try:
        cmds = assemble(_read(args.infile).decode())
    except AsmError as exc:
        raise CliError(str(exc), USAGE_ERROR)
    _write(args.outfile, to_bytes(cmds))
    return 0


def cmd_disasm(args) -> int:
    data = _read(args.infile)
    if len(data) % 2:
        raise CliError("binary command stream has odd length", USAGE_ERROR)
    cmds = []
    for off in range(0, len(data), 2):
        try:
            cmds += from_bytes(data[off:off + 2])
        except InvalidOpcode as exc:
            raise CliError(f"offset {off}: {exc}", USAGE_ERROR)
    _write(args.outfile, disassemble(cmds).encode())
    return 0


_TRACE_KERNELS = ("aes-128-encrypt", "aes-128-decrypt", "aes-256-encrypt",
                  "aes-256-decrypt", "sha3-224", "sha3-256", "sha3-384",
                  "sha3-512", "ghash")


def _demo_program(alg: str):
    if alg.startswith("aes"):
        _, variant, direction = alg.split("-")
        prog = aes.build_aes_program(int(variant), direction)
        key = bytes(range(int(variant) // 8))
        env = modes._key_env(key, direction)
        env["blocks"] = [bytes([i] * 16) for i in range(16)]
        return prog, env
    if alg.startswith("sha3"):
        bits = _sha3_bits(alg)
        rate = keccak.RATE_BYTES[bits]
        padded = [keccak.pad_sha3(b"pimcrypt", rate)] * 4
        return (keccak.build_sha3_program(bits, 1),
                {"blocks": modes._pack_sha3_blocks(padded, rate)})
    if alg == "ghash":
        return (ghash.build_ghash_program(8),
                {"hash_key": bytes(range(16)), "ghash_first": True,
                 "xblocks": [bytes([i] * 16) for i in range(8)]})
    raise CliError(f"--alg must be one of {', '.join(_TRACE_KERNELS)}",
                   USAGE_ERROR)


def cmd_trace(args) -> int:
    prog, env = _demo_program(args.alg)
    sub = Subarray(block_width=prog.block_width,
                   cost_model=CycleCostModel(args.cycles_per_command))
    records = []
    Controller(prog).run(sub, env, trace=records)
    lines = []
    for i, rec in enumerate(records):
        line = (f"{i:6d}  {rec.word:04x}  {rec.text.strip():<24} "
                f"{rec.cycles:4d}")
        if args.trace > 1:
            line += f"  latch={rec.latch:064x}"
        lines.append(line)
    lines.append(f"# {len(records)} commands, {sub.cycle_count} cycles")
    _write(args.outfile, ("\n".join(lines) + "\n").encode())
    return 0


def cmd_bench(args) -> int:
    cost = CycleCostModel(args.cycles_per_command)
    ms = perfmodel.measure_kernels(perfmodel.FabricConfig(cycle_cost=cost))
    cal = ({"aes": args.calibration, "sha3": args.calibration,
            "ghash": args.calibration} if args.calibration
           else perfmodel.calibrate(ms))
    report = perfmodel.compare_to_paper(ms, cal)
    if args.format == "json":
        _write(args.outfile, json.dumps(report.to_dict(), indent=2).encode())
    else:
        lines = [report.to_text()]
        for frac in (0.25, 0.5, 1.0):
            config = perfmodel.FabricConfig(isc_fraction=frac, calibration=cal)
            mode = perfmodel.POWER_MODES[args.power_mode]
            lines.append(f"-- modeled throughput @{int(frac*100)}% "
                         f"{mode.name} (MB/s) --")
            for name, m in ms.items():
                tput = perfmodel.throughput(m, config, mode)
                lines.append(f"  {name:<20} {tput/1e6:10.3f}")
        _write(args.outfile, ("\n".join(lines) + "\n").encode())
    return 0 if not report.violations else MISMATCH_ERROR


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pimcrypt",
        description="in-SRAM crypto fabric simulator and kernel compiler")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, key=False, iv=False, aad=False, alg=None, mode=False):
        sp.add_argument("--in", dest="infile", help="input file (- = stdin)")
        sp.add_argument("--out", dest="outfile",
                        help="output file (- = stdout)")
        sp.add_argument("--no-verify", action="store_true",
                        help="skip oracle cross-check")
        if alg is not None:
            sp.add_argument("--alg", default=alg)
        if mode:
            sp.add_argument("--mode", default="cbc",
                            choices=["ecb", "cbc", "ctr", "ccm", "gcm"])
        if key:
            sp.add_argument("--key", help="key (hex)")
        if iv:
            sp.add_argument("--iv", help="IV / nonce / counter (hex)")
        if aad:
            sp.add_argument("--aad", help="additional data (hex)")
        return sp

    common(sub.add_parser("encrypt"), key=True, iv=True, aad=True, mode=True)
    common(sub.add_parser("decrypt"), key=True, iv=True, aad=True, mode=True)
    common(sub.add_parser("hash"), alg="sha3-256")
    common(sub.add_parser("hmac"), alg="sha3-256", key=True)
    common(sub.add_parser("asm"))
    common(sub.add_parser("disasm"))
    tr = common(sub.add_parser("trace"), alg="aes-128-encrypt")
    tr.add_argument("--trace", type=int, default=1,
                    help="1 = commands, 2 = with latch snapshots")
    tr.add_argument("--cycles-per-command", type=int, default=1)
    be = common(sub.add_parser("bench"))
    be.add_argument("--fraction", type=float, default=1.0)
    be.add_argument("--power-mode", default="run0",
                    choices=list(perfmodel.POWER_MODES))
    be.add_argument("--cycles-per-command", type=int, default=1)
    be.add_argument("--calibration", type=float, default=None,
                    help="override the fitted per-family calibration")
    be.add_argument("--format", default="text", choices=["text", "json"])
    return p


_COMMANDS = {"encrypt": cmd_encrypt, "decrypt": cmd_decrypt,
             "hash": cmd_hash, "hmac": cmd_hmac, "asm": cmd_asm,
             "disasm": cmd_disasm, "trace": cmd_trace, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"pimcrypt: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
