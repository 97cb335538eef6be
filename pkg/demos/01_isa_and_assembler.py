"""Control ISA walkthrough: build command words, inspect their packing,
and round-trip them through the assembler.

Run:  python demos/01_isa_and_assembler.py
"""

from pimcrypt import isa
from pimcrypt.isa import CommandWord, LogicKind

# Every control command is one 16-bit word: a 4-bit opcode, an 8-bit
# index (row or column), and a 4-bit option field.
program = [
    CommandWord.rd_row(5),                    # row 5 -> sense-amp latch
    CommandWord.shift(3, right=True),         # slide the latch 3 columns
    CommandWord.wr_row(9),                    # latch -> row 9
    CommandWord.act_row(9),                   # stage row 9 as operand A
    CommandWord.logic_op(5, LogicKind.XOR),   # latch = row9 XOR row5
    CommandWord.wr_row(10),
    CommandWord.ext_bit(0, 256),              # broadcast column 0 externally
]

print("word  hex    mnemonic")
for cmd in program:
    print(f"{cmd.encode():#06x}  {isa.disassemble([cmd]).strip()}")

# The binary image is just the words, two bytes each.
blob = isa.to_bytes(program)
print(f"\nbinary image: {len(blob)} bytes -> {blob.hex()}")
assert isa.from_bytes(blob) == program

# Text form survives a full round trip.
text = isa.disassemble(program)
print("\nassembly listing:")
print(text)
assert isa.assemble(text) == program
print("assembler round trip: ok")
