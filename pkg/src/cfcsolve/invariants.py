"""Block census, the invariants tau and upsilon, and the rank identity."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .blocks import Block, BlockSum
from .errors import CensusError
from .kernel import rank


@dataclass(frozen=True)
class BlockCensus:
    n: int = 0
    j1: int = 0
    jO: int = 0
    gammaO: int = 0
    gammaE: int = 0
    hMinus: int = 0
    hPlus: int = 0

    def __add__(self, other: "BlockCensus") -> "BlockCensus":
        return BlockCensus(*(a + b for a, b in zip(asdict(self).values(), asdict(other).values())))

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Invariants:
    tau: int
    upsilon: int

    @property
    def min_bound(self) -> int:
        return min(self.tau, self.upsilon)


def block_census(b: Block) -> BlockCensus:
    """Census of one block.

    The two non-canonical tridiagonal blocks produced mid-absorption,
    ``H~_4k(-1)`` and ``H~_{4k-2}(1)``, are counted through their canonical
    equivalents ``G~_2k (+) G~_2k`` and ``G~_{2k-1} (+) G~_{2k-1}``.
    """
    n = b.size
    if b.family == "J":
        if n == 1:
            return BlockCensus(n=1, j1=1)
        return BlockCensus(n=n, jO=1 if n % 2 else 0)
    if b.family == "G":
        return BlockCensus(n=n, gammaO=n % 2, gammaE=1 - n % 2)
    if b.mu == -1:
        if n % 4 == 2:
            return BlockCensus(n=n, hMinus=1)
        return BlockCensus(n=n, gammaE=2)
    if b.mu == 1:
        if n % 4 == 0:
            return BlockCensus(n=n, hPlus=1)
        return BlockCensus(n=n, gammaO=2)
    return BlockCensus(n=n)


def census(s: BlockSum | Block) -> BlockCensus:
    if isinstance(s, Block):
        return block_census(s)
    total = BlockCensus()
    for b, m in s.terms:
        c = block_census(b)
        for _ in range(m):
            total = total + c
    return total


def invariants_from_census(c: BlockCensus) -> Invariants:
    num = c.n - c.j1 + c.jO + c.gammaO + 2 * c.hPlus
    if num % 2:
        raise CensusError(f"odd numerator {num} for tau: inconsistent census {c}")
    ups = c.n - c.j1 - c.jO - c.gammaE - 2 * c.hMinus
    if ups < 0:
        raise CensusError(f"negative upsilon for census {c}")
    return Invariants(tau=num // 2, upsilon=ups)


def tau_upsilon(s: BlockSum | Block) -> Invariants:
    return invariants_from_census(census(s))


@dataclass(frozen=True)
class RankIdentity:
    lhs: int
    rhs: int
    j1: int = 0

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    @property
    def rhs_without_j1(self) -> int:
        return self.rhs - self.j1


def rank_identity_check(s: BlockSum) -> RankIdentity:
    """Compare ``n - rank(A + A^T)`` (exact) with ``j1 + jO + gammaE + 2 hMinus``.

    Each ``J1(0) = [0]`` adds one to the nullity of ``A + A^T``, so ``j1`` is
    part of the right-hand side; equivalently ``rank(A + A^T) = upsilon``.
    """
    m = s.materialize(allow_noncanonical=True)
    c = census(s)
    lhs = m.rows - rank(m + m.T)
    return RankIdentity(lhs=lhs, rhs=c.j1 + c.jO + c.gammaE + 2 * c.hMinus, j1=c.j1)
