#!/usr/bin/env python3
"""Regenerate crates/glitchprop/src/trig_reduce/constants.rs.

Computes 2/pi and pi/2 at 400 bits with mpmath, truncates each to a 256-bit
integer significand and splits the same values into three nonoverlapping
binary64 limbs (each the nearest double to the remaining tail).
"""
import struct
import sys
from mpmath import mp, mpf, pi, floor, ldexp

mp.prec = 400


def limbs256(v, shift):
    n = int(floor(ldexp(v, shift)))
    assert n.bit_length() == 256, n.bit_length()
    return [(n >> (64 * (3 - i))) & ((1 << 64) - 1) for i in range(4)]


def triple(v):
    out = []
    rest = v
    for _ in range(3):
        d = float(rest)  # nearest binary64
        out.append(d)
        rest = rest - mpf(d)
    return out


def main():
    two_over_pi = 2 / pi
    pio2 = pi / 2
    body = [
        "// Generated by tools/gen_constants.py; do not edit by hand.",
        "// Value = (limbs as a big-endian 256-bit integer) * 2^EXP.",
        "",
    ]
    for name, v, shift in (("TWO_OVER_PI", two_over_pi, 256), ("PIO2", pio2, 255)):
        limbs = limbs256(v, shift)
        tri = triple(v)
        body.append(f"pub const {name}_LIMBS: [u64; 4] = [")
        body += [f"    0x{l:016x}," for l in limbs]
        body.append("];")
        body.append(f"pub const {name}_EXP: i32 = -{shift};")
        body.append(f"/// {' + '.join(float.hex(t) for t in tri)}")
        body.append(f"pub const {name}_F64: [u64; 3] = [")
        body += [f"    0x{struct.unpack('<Q', struct.pack('<d', t))[0]:016x}," for t in tri]
        body.append("];")
        body.append("")
    text = "\n".join(body)
    if len(sys.argv) > 1:
        with open(sys.argv[1], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
