"""Bit-exact in-SRAM compute-fabric simulator with crypto kernels.

Layers, bottom up:

* ``isa`` — the 16-bit control-command encoding, assembler, disassembler.
* ``fabric`` — one 128x256 subarray: bitline logic, shifter, cycle cost.
* ``controller`` — command array, function windows, stride rules, host I/O.
* ``kernels`` — AES / SHA3 / GHASH programs plus the mode orchestration.
* ``oracle`` — independent reference crypto (shares no code with kernels).
* ``perfmodel`` — cycles to throughput/energy, embedded baseline tables.
* ``cli`` — the ``pimcrypt`` command.
"""

from . import controller, fabric, isa, oracle, perfmodel
from .kernels import aes, ghash, keccak, modes

__all__ = ["isa", "fabric", "controller", "oracle", "perfmodel",
           "aes", "ghash", "keccak", "modes"]
__version__ = "0.1.0"
