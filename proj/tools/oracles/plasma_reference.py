#!/usr/bin/env python3
"""Reference implementation of the diamond-square fog heightmap.

Generates the golden file used by the C++ test suite. Kept deliberately
independent of the C++ sources: it implements the documented algorithm
(toroidal diamond-square, amplitude divided by `decay` per level, output
shifted/scaled to [0, 1]) plus the documented splitmix64 substream scheme,
in plain Python floats (IEEE doubles).

Usage: plasma_reference.py SIZE DECAY SEED OUT.f64
"""

import struct
import sys

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def fnv1a64(label):
    h = 0xCBF29CE484222325
    for b in label.encode():
        h = ((h ^ b) * 0x100000001B3) & MASK
    return h


def stream_key(seed, label, index=0):
    k = mix64((seed ^ fnv1a64(label)) & MASK)
    return mix64(k ^ ((index * GOLDEN) & MASK))


class Splitmix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next_u64(self):
        self.state = (self.state + GOLDEN) & MASK
        return mix64(self.state)

    def next_symmetric(self):
        return 2.0 * ((self.next_u64() >> 11) * 2.0 ** -53) - 1.0


def plasma(size, decay, seed):
    g = [[0.0] * size for _ in range(size)]
    rng = Splitmix64(stream_key(seed, "plasma"))

    def at(y, x):
        return g[y % size][x % size]

    def put(y, x, v):
        g[y % size][x % size] = v

    amp = 1.0
    step = size
    while step >= 2:
        half = step // 2
        for y in range(0, size, step):
            for x in range(0, size, step):
                avg = (at(y, x) + at(y, x + step) + at(y + step, x)
                       + at(y + step, x + step)) / 4.0
                put(y + half, x + half, avg + amp * rng.next_symmetric())
        for y in range(0, size, step):
            for x in range(0, size, step):
                top = (at(y, x) + at(y, x + step) + at(y - half, x + half)
                       + at(y + half, x + half)) / 4.0
                put(y, x + half, top + amp * rng.next_symmetric())
                left = (at(y, x) + at(y + step, x) + at(y + half, x - half)
                        + at(y + half, x + half)) / 4.0
                put(y + half, x, left + amp * rng.next_symmetric())
        step //= 2
        amp /= decay

    flat = [v for row in g for v in row]
    mn, mx = min(flat), max(flat)
    return [(v - mn) / (mx - mn) for v in flat]


def main():
    if len(sys.argv) != 5:
        sys.exit(__doc__)
    size, decay, seed, out = (int(sys.argv[1]), float(sys.argv[2]),
                              int(sys.argv[3]), sys.argv[4])
    values = plasma(size, decay, seed)
    with open(out, "wb") as f:
        f.write(struct.pack("<%dd" % len(values), *values))
    print("wrote %s (%d doubles)" % (out, len(values)))


if __name__ == "__main__":
    main()
