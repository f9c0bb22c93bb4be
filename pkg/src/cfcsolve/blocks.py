"""Canonical blocks for congruence and their direct sums.

Five block kinds are modelled: ``J`` (nilpotent Jordan block ``J_k(0)``),
``G`` / ``G~`` (``Gamma_k`` and its tridiagonal variant) and ``H`` / ``H~``
(``H_2k(mu)`` and its tridiagonal variant).  Sizes are total sizes, so an
``H`` block of size ``2k`` carries ``k = size // 2``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import InvalidBlock
from .kernel import GQ, ONE, ZERO, Matrix, direct_sum, gq


class Kind(str, Enum):
    J = "J"
    GAMMA = "G"
    GAMMA_TILDE = "G~"
    H = "H"
    H_TILDE = "H~"


@dataclass(frozen=True)
class Block:
    kind: Kind
    size: int
    mu: GQ | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.mu is not None:
            object.__setattr__(self, "mu", gq(self.mu))

    @property
    def family(self) -> str:
        """'J', 'G' or 'H': the kind with plain/tilde identified."""
        return self.kind.value[0]

    @property
    def is_tilde(self) -> bool:
        return self.kind in (Kind.GAMMA_TILDE, Kind.H_TILDE)

    @property
    def half(self) -> int:
        return self.size // 2

    def tilde(self) -> "Block":
        if self.kind is Kind.GAMMA:
            return Block(Kind.GAMMA_TILDE, self.size)
        if self.kind is Kind.H:
            return Block(Kind.H_TILDE, self.size, self.mu)
        return self

    def plain(self) -> "Block":
        if self.kind is Kind.GAMMA_TILDE:
            return Block(Kind.GAMMA, self.size)
        if self.kind is Kind.H_TILDE:
            return Block(Kind.H, self.size, self.mu)
        return self

    def key(self):
        """Congruence class key: family, size and canonical mu."""
        mu = canonicalize_mu(self.mu, self.half) if self.family == "H" and self.mu else None
        return (self.family, self.size, mu)

    def is_h2_minus(self) -> bool:
        return self.family == "H" and self.size == 2 and self.mu == -1

    def is_h4_plus(self) -> bool:
        return self.family == "H" and self.size == 4 and self.mu == 1

    def __str__(self):
        from .io_formats import format_block
        return format_block(self)


# convenience constructors
def J(k: int) -> Block:
    return Block(Kind.J, k)


def Gamma(k: int) -> Block:
    return Block(Kind.GAMMA, k)


def GammaT(k: int) -> Block:
    return Block(Kind.GAMMA_TILDE, k)


def H(size: int, mu) -> Block:
    return Block(Kind.H, size, gq(mu))


def HT(size: int, mu) -> Block:
    return Block(Kind.H_TILDE, size, gq(mu))


def _structural_violation(b: Block) -> str | None:
    if not isinstance(b.size, int) or b.size < 1:
        return "size must be >= 1"
    if b.family == "H":
        if b.size % 2:
            return "H size must be even"
        if b.mu is None:
            return "H block needs mu"
        if not b.mu:
            return "μ = 0"
    elif b.mu is not None:
        return "only H blocks carry mu"
    return None


def validate(b: Block) -> str | None:
    """``None`` if ``b`` is a canonical block, else the violated constraint."""
    v = _structural_violation(b)
    if v:
        return v
    if b.family == "H":
        k = b.half
        if b.mu == (-1) ** (k + 1):
            return "μ = (−1)^{k+1}"
    return None


def canonicalize_mu(mu, k: int | None = None) -> GQ:
    """Representative of ``{mu, 1/mu}``: larger modulus, then ``im >= 0``."""
    mu = gq(mu)
    if not mu:
        raise InvalidBlock("μ = 0")
    a2 = mu.abs2()
    if a2 > 1:
        return mu
    if a2 < 1:
        return mu.inverse()
    inv = mu.inverse()
    if mu.im >= 0:
        return mu
    return inv


def canonical_block(b: Block) -> Block:
    if b.family == "H" and b.mu:
        mu = canonicalize_mu(b.mu, b.half)
        if mu != b.mu:
            return Block(b.kind, b.size, mu)
    return b


# -- explicit matrices -----------------------------------------------------

def _from_entries(n: int, entries: dict) -> Matrix:
    return Matrix._wrap(tuple(tuple(entries.get((i, j), ZERO) for j in range(n))
                              for i in range(n)), n, n)


def jordan(k: int, lam=0) -> Matrix:
    lam = gq(lam)
    e = {(i, i + 1): ONE for i in range(k - 1)}
    if lam:
        e.update({(i, i): lam for i in range(k)})
    return _from_entries(k, e)


def _sign(p: int) -> GQ:
    return ONE if p % 2 == 0 else -ONE


def materialize_block(b: Block, allow_noncanonical: bool = False) -> Matrix:
    v = _structural_violation(b) if allow_noncanonical else validate(b)
    if v:
        raise InvalidBlock(f"{b.kind.value}{b.size}: {v}")
    k = b.size
    if b.kind is Kind.J:
        return jordan(k)
    if b.kind is Kind.GAMMA_TILDE:
        e = {(0, 0): ONE}
        for i in range(1, k):
            e[(i - 1, i)] = ONE
            e[(i, i - 1)] = _sign(i)
        return _from_entries(k, e)
    if b.kind is Kind.GAMMA:
        e = {}
        for i in range(1, k + 1):
            s = _sign(k - i)
            e[(i - 1, k - i)] = s
            if i >= 2:
                e[(i - 1, k + 1 - i)] = s
        return _from_entries(k, e)
    h = b.half
    if b.kind is Kind.H_TILDE:
        e = {(i, i + 1): ONE for i in range(k - 1)}
        for i in range(1, h + 1):
            e[(2 * i - 1, 2 * i - 2)] = b.mu
        return _from_entries(k, e)
    # H_2h(mu) = [[0, I_h], [J_h(mu), 0]]
    e = {(i, h + i): ONE for i in range(h)}
    for i in range(h):
        e[(h + i, i)] = b.mu
        if i + 1 < h:
            e[(h + i, i + 1)] = ONE
    return _from_entries(k, e)


def materialize(obj, allow_noncanonical: bool = False) -> Matrix:
    """Explicit matrix of a Block or a BlockSum (ordered direct sum)."""
    if isinstance(obj, Block):
        return materialize_block(obj, allow_noncanonical)
    if isinstance(obj, BlockSum):
        return direct_sum(*(materialize_block(b, allow_noncanonical) for b in obj.flat()))
    raise TypeError(f"cannot materialize {type(obj).__name__}")


def shuffle_permutation(size: int) -> Matrix:
    """``P_2k = [e_1 e_{k+1} e_2 e_{k+2} ... e_k e_2k]``."""
    k = size // 2
    cols = []
    for j in range(k):
        cols += [j, k + j]
    e = {(c, pos): ONE for pos, c in enumerate(cols)}
    return _from_entries(size, e)


def tilde_congruence(b: Block, engine=None):
    """``(P, b~)`` with ``P^T b P = b~`` exactly.

    H blocks use the explicit shuffle permutation.  Gamma blocks use a
    congruence synthesized by the cosquare engine.
    """
    if b.kind is Kind.H:
        P = shuffle_permutation(b.size)
        target = b.tilde()
    elif b.kind is Kind.GAMMA:
        target = b.tilde()
        if b.size == 1:
            P = Matrix.identity(1)
        else:
            from .congruence import default_engine
            eng = engine or default_engine()
            w = eng.block_congruence(b, target)
            P = w.P
    else:
        raise InvalidBlock(f"tilde_congruence needs a Gamma or H block, got {b.kind.value}")
    M, Mt = materialize(b), materialize(target)
    if P.is_exact and P.T @ M @ P != Mt:
        raise AssertionError("tilde congruence failed to verify")
    return P, target


# -- direct sums -----------------------------------------------------------

@dataclass(frozen=True)
class BlockSum:
    """Ordered direct sum of ``(block, multiplicity)`` terms."""

    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((b, int(m)) for b, m in self.terms)
        for b, m in terms:
            if m < 1:
                raise InvalidBlock("multiplicity must be >= 1")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *items) -> "BlockSum":
        """Build from blocks and ``(block, mult)`` pairs, folding neighbours."""
        flat = []
        for it in items:
            if isinstance(it, Block):
                flat.append(it)
            else:
                b, m = it
                flat.extend([b] * m)
        return cls.from_blocks(flat)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Block]) -> "BlockSum":
        terms = []
        for b in blocks:
            if terms and terms[-1][0] == b:
                terms[-1][1] += 1
            else:
                terms.append([b, 1])
        return cls(tuple((b, m) for b, m in terms))

    def flat(self) -> list[Block]:
        return [b for b, m in self.terms for _ in range(m)]

    def offsets(self) -> list[int]:
        out, off = [], 0
        for b in self.flat():
            out.append(off)
            off += b.size
        return out

    @property
    def size(self) -> int:
        return sum(b.size * m for b, m in self.terms)

    total_size = size

    def __len__(self):
        return sum(m for _, m in self.terms)

    def __add__(self, other: "BlockSum") -> "BlockSum":
        return BlockSum.from_blocks(self.flat() + other.flat())

    def is_empty(self) -> bool:
        return not self.terms

    def count(self, pred) -> int:
        return sum(m for b, m in self.terms if pred(b))

    def validate(self) -> list[str]:
        out = []
        for b, _ in self.terms:
            v = validate(b)
            if v:
                out.append(f"{b}: {v}")
        return out

    def multiset(self) -> Counter:
        c = Counter()
        for b, m in self.terms:
            c[b.key()] += m
        return c

    def congruence_equal(self, other: "BlockSum") -> bool:
        return self.multiset() == other.multiset()

    def canonical(self) -> "BlockSum":
        return BlockSum(tuple((canonical_block(b), m) for b, m in self.terms))

    def materialize(self, allow_noncanonical: bool = False) -> Matrix:
        return materialize(self, allow_noncanonical)

    def __str__(self):
        from .io_formats import format_blocksum
        return format_blocksum(self)


def single(b: Block, mult: int = 1) -> BlockSum:
    return BlockSum(((b, mult),))


__all__ = [
    "Kind", "Block", "BlockSum", "J", "Gamma", "GammaT", "H", "HT", "validate",
    "canonicalize_mu", "canonical_block", "materialize", "materialize_block",
    "tilde_congruence", "shuffle_permutation", "jordan", "single",
]
