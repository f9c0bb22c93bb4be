"""Seeded random block sums for property tests and experiment scripts."""
from __future__ import annotations

import random

from .blocks import Block, BlockSum, Gamma, GammaT, H, HT, J, canonical_block, validate
from .kernel import GQ

MU_POOL = (GQ(2), GQ(3), GQ(-2), GQ(0, 2), GQ(1, 1), GQ(1, 0) / 2, GQ(0, -3))


def random_block(rng: random.Random, max_size: int = 8, allow_h4: bool = False,
                 weights=None) -> Block:
    """One valid canonical block of size at most ``max_size``."""
    kinds = ["J", "G", "G~", "H", "H~", "H2-", "H-", "H+"]
    w = weights or [3, 2, 2, 1, 1, 3, 1, 1]
    while True:
        kind = rng.choices(kinds, w)[0]
        if kind == "J":
            b = J(rng.randint(1, max_size))
        elif kind in ("G", "G~"):
            k = rng.randint(1, max_size)
            b = Gamma(k) if kind == "G" else GammaT(k)
        elif kind in ("H", "H~"):
            if max_size < 2:
                continue
            size = 2 * rng.randint(1, max_size // 2)
            mu = rng.choice(MU_POOL)
            b = canonical_block(H(size, mu) if kind == "H" else HT(size, mu))
        elif kind == "H2-":
            b = H(2, -1)
        elif kind == "H-":
            # H_{4k+2}(-1), k >= 1
            if max_size < 6:
                continue
            b = HT(4 * rng.randint(1, (max_size - 2) // 4) + 2, -1)
        else:
            lo = 1 if allow_h4 else 2
            if max_size < 4 * lo:
                continue
            b = HT(4 * rng.randint(lo, max_size // 4), 1)
        if b.size <= max_size and validate(b) is None:
            return b


def random_blocksum(rng: random.Random, max_n: int = 32, max_block: int = 8,
                    allow_h4: bool = False, max_blocks: int | None = None) -> BlockSum:
    """Random valid BlockSum with total size in ``[1, max_n]``."""
    target = rng.randint(1, max_n)
    blocks: list[Block] = []
    n = 0
    while n < target and (max_blocks is None or len(blocks) < max_blocks):
        room = min(max_block, max_n - n)
        if room < 1:
            break
        b = random_block(rng, room, allow_h4)
        blocks.append(b)
        n += b.size
    return BlockSum.from_blocks(blocks)
