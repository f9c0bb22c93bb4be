"""Consistent transformations ``A ~> B`` as verified certificates.

A :class:`TransformationStep` carries ``X`` with ``X^T A X = B`` for two block
sums; a :class:`TransformationChain` composes them (transitivity).  The
absorption lemmas merge one ``H2(-1)`` block with a neighbour without
changing ``(tau, upsilon)``; :func:`reduce` applies them until either no
``H2(-1)`` is left (case C0) or nothing can absorb the rest (case C1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .blocks import (Block, BlockSum, Gamma, GammaT, H, HT, J, Kind, materialize,
                     materialize_block, tilde_congruence)
from .errors import DimensionError, InvalidRequest, UnpairedH4Error, UnsupportedAbsorption
from .invariants import tau_upsilon
from .kernel import GQ, I, ONE, ZERO, Matrix, direct_sum, gq

DEFAULT_TOLERANCE = 1e-9


class Law(str, Enum):
    ADDITION = "Addition"
    TRANSITIVITY = "Transitivity"
    PERMUTATION = "Permutation"
    ELIMINATION = "Elimination"
    CANONICAL_REDUCTION = "CanonicalReduction"
    J1 = "J1Law"
    LEMMA_J = "LemmaJ"
    LEMMA_J3 = "LemmaJ3"
    LEMMA_GAMMA = "LemmaGamma"
    LEMMA_H_I = "LemmaH_i"
    LEMMA_H_II = "LemmaH_ii"
    LEMMA_H_III = "LemmaH_iii"
    GAMMA_TILDE2_DROP = "GammaTilde2Drop"
    CONGRUENCE = "Congruence"
    DEFLATION = "Deflation"


ABSORPTIONS = {Law.LEMMA_J, Law.LEMMA_GAMMA, Law.LEMMA_H_I, Law.LEMMA_H_II, Law.LEMMA_H_III}

H2M = H(2, -1)
G1 = Gamma(1)


def _norm(b: Block) -> Block:
    # G1~ = G1 and H2(mu)~ = H2(mu) as matrices; keep the plain spelling
    if b.kind is Kind.GAMMA_TILDE and b.size == 1:
        return G1
    if b.kind is Kind.H_TILDE and b.size == 2:
        return b.plain()
    return b


def _sum(blocks: Sequence[Block]) -> BlockSum:
    return BlockSum.from_blocks([_norm(b) for b in blocks])


def _as_sum(s) -> BlockSum:
    return s if isinstance(s, BlockSum) else _sum([s])


# -- steps and chains ----------------------------------------------------------

@dataclass(frozen=True)
class TransformationStep:
    source: BlockSum
    target: BlockSum
    X: Matrix
    justification: str
    residual: float = 0.0
    mode: str = "exact"
    note: str = ""

    def to_json(self) -> dict:
        from .io_formats import matrix_to_json
        d = {"source": str(self.source), "target": str(self.target),
             "justification": str(Law(self.justification).value), "X": matrix_to_json(self.X),
             "residual": self.residual, "mode": self.mode}
        if self.note:
            d["note"] = self.note
        return d


def step_residual(source: BlockSum, X: Matrix, target: BlockSum) -> Matrix:
    A = materialize(source, True)
    B = materialize(target, True) if target.terms else Matrix.zeros(0)
    return X.T @ A @ X - B


def make_step(source, target, X: Matrix, law: Law, note: str = "",
              tolerance: float = DEFAULT_TOLERANCE) -> TransformationStep:
    """Build a step and verify it (exactly for exact ``X``)."""
    source, target = _as_sum(source), _as_sum(target)
    if X.rows != source.size or X.cols != target.size:
        raise DimensionError(f"{law.value}: X is {X.rows}x{X.cols}, "
                             f"expected {source.size}x{target.size}")
    R = step_residual(source, X, target)
    if X.is_exact:
        if not R.is_zero():
            raise AssertionError(f"{law.value} step {source} ~> {target} has nonzero residual")
        res, mode = 0.0, "exact"
    else:
        res, mode = R.max_abs(), "numeric"
        if res > tolerance:
            raise AssertionError(f"{law.value} step residual {res:.3e} above tolerance")
    if law in ABSORPTIONS and tau_upsilon(source) != tau_upsilon(target):
        raise AssertionError(f"{law.value} step {source} ~> {target} changes (tau, upsilon)")
    return TransformationStep(source, target, X, law.value, res, mode, note)


@dataclass
class TransformationChain:
    source: BlockSum
    steps: list = field(default_factory=list)

    @property
    def target(self) -> BlockSum:
        return self.steps[-1].target if self.steps else self.source

    def append(self, step: TransformationStep) -> "TransformationChain":
        if [_norm(b) for b in step.source.flat()] != [_norm(b) for b in self.target.flat()]:
            raise DimensionError(f"chain mismatch: {self.target} then {step.source}")
        self.steps.append(step)
        return self

    def extend(self, steps) -> "TransformationChain":
        for s in steps:
            self.append(s)
        return self

    def composed_X(self) -> Matrix:
        X = Matrix.identity(self.source.size)
        for s in self.steps:
            X = X @ s.X
        return X

    @property
    def mode(self) -> str:
        return "exact" if all(s.mode == "exact" for s in self.steps) else "numeric"

    def verify(self, tolerance: float = DEFAULT_TOLERANCE) -> float:
        """End-to-end residual of the composed matrix; raises when it fails."""
        X = self.composed_X()
        R = step_residual(self.source, X, self.target)
        if X.is_exact:
            if not R.is_zero():
                raise AssertionError("chain residual is nonzero")
            return 0.0
        res = R.max_abs()
        if res > tolerance:
            raise AssertionError(f"chain residual {res:.3e} above tolerance")
        return res

    def count(self, law: Law) -> int:
        return sum(1 for s in self.steps if s.justification == law.value)

    def to_json(self) -> list:
        return [s.to_json() for s in self.steps]


# -- laws ------------------------------------------------------------------------

def _block_rows(blocks: Sequence[Block]):
    out, off = [], 0
    for b in blocks:
        out.append(range(off, off + b.size))
        off += b.size
    return out


def addition(steps: Sequence[TransformationStep], law: Law = Law.ADDITION) -> TransformationStep:
    """``(+) A_i ~> (+) B_i`` with ``X = (+) X_i``."""
    src = _sum([b for s in steps for b in s.source.flat()])
    tgt = _sum([b for s in steps for b in s.target.flat()])
    return make_step(src, tgt, direct_sum(*(s.X for s in steps)), law)


def transitivity(steps: Sequence[TransformationStep]) -> TransformationStep:
    chain = TransformationChain(steps[0].source).extend(steps)
    return make_step(chain.source, chain.target, chain.composed_X(), Law.TRANSITIVITY)


def permutation(s: BlockSum, sigma: Sequence[int]) -> TransformationStep:
    """Reorder addends: target block ``t`` is source block ``sigma[t]`` (0-based)."""
    blocks = s.flat()
    if sorted(sigma) != list(range(len(blocks))):
        raise DimensionError("sigma must be a permutation of the addends")
    rows = _block_rows(blocks)
    entries = {}
    col = 0
    for t in sigma:
        for r in rows[t]:
            entries[(r, col)] = ONE
            col += 1
    X = _sparse(s.size, s.size, entries)
    return make_step(s, _sum([blocks[t] for t in sigma]), X, Law.PERMUTATION)


def elimination(s: BlockSum, keep: Sequence[int], law: Law = Law.ELIMINATION) -> TransformationStep:
    """Keep the addends with the given (0-based) indices, in order."""
    blocks = s.flat()
    rows = _block_rows(blocks)
    entries = {}
    col = 0
    for t in keep:
        for r in rows[t]:
            entries[(r, col)] = ONE
            col += 1
    return make_step(s, _sum([blocks[t] for t in keep]), _sparse(s.size, col, entries), law)


def j1_law(s: BlockSum) -> TransformationStep:
    """Drop every ``J1`` addend."""
    keep = [t for t, b in enumerate(s.flat()) if not (b.kind is Kind.J and b.size == 1)]
    return elimination(s, keep, Law.J1)


def law_combinators(kind, *args) -> TransformationStep:
    """Dispatch by law name: Addition, Transitivity, Permutation, Elimination, J1Law."""
    law = Law(kind)
    if law is Law.ADDITION:
        return addition(*args)
    if law is Law.TRANSITIVITY:
        return transitivity(*args)
    if law is Law.PERMUTATION:
        return permutation(*args)
    if law is Law.ELIMINATION:
        return elimination(*args)
    if law is Law.J1:
        return j1_law(*args)
    raise InvalidRequest(f"{law.value} is not a combinator law")


def _sparse(rows: int, cols: int, entries: dict) -> Matrix:
    return Matrix._wrap(tuple(tuple(entries.get((i, j), ZERO) for j in range(cols))
                              for i in range(rows)), rows, cols)


# -- explicit lemma matrices ----------------------------------------------------

def _m(rows) -> Matrix:
    return Matrix([[gq(x) for x in r] for r in rows])


HALF = GQ(1, 0) / 2


def type0_X2() -> Matrix:
    """``J2 (+) H2(-1) ~> G1^2``."""
    return _m([[I, 1], [-I, 1], [0, 1], [I, 0]])


def type0_X3() -> Matrix:
    """``J3 (+) H2(-1) ~> J1 (+) G1^2``: X2 bordered by (1,0,0) and (0,-1,-1,1)."""
    x2 = type0_X2()
    rows = [[1, 0, 0]]
    for r, c in enumerate([0, -1, -1, 1]):
        rows.append([c, x2[r, 0], x2[r, 1]])
    return _m(rows)


def j3_X0() -> Matrix:
    return _m([[1, 0], [1, I], [0, -I]])


def typeI_P(k: int) -> Matrix:
    """``[[0, I_k], [I_2, 0]]``: ``G~k (+) H2(-1) ~> H2(-1) (+) G~k``."""
    e = {}
    for c in range(2):
        e[(k + c, c)] = ONE
    for c in range(k):
        e[(c, 2 + c)] = ONE
    return _sparse(k + 2, k + 2, e)


def typeI_X3() -> Matrix:
    return _m([[1, 0, I], [0, -I, 0], [0, 1, 0], [-I, 0, 1], [I * HALF, 0, HALF]])


def typeI_X4() -> Matrix:
    x3 = typeI_X3()
    extra = [0, -I * HALF, 0, 0, 0]
    rows = [list(x3.row(r)) + [extra[r]] for r in range(5)]
    rows.append([0, 0, 0, 1])
    return _m(rows)


def typeII_X1(mu) -> Matrix:
    mu = gq(mu)
    a = (1 + mu).inverse()
    return _m([[1, I], [a, -I * a], [0, 1 - mu], [-I * a, 0]])


def typeII_X2(mu) -> Matrix:
    mu = gq(mu)
    x1 = typeII_X1(mu)
    left = [0, -(1 + mu).inverse(), -I, -I * (mu * mu - 1).inverse()]
    rows = [[1, 0, 0, 0], [0, 1, 0, 0]]
    for r in range(4):
        rows.append([0, left[r], x1[r, 0], x1[r, 1]])
    return _m(rows)


def typeII_C_ii() -> Matrix:
    return _m([[1, 0, 0, 0], [0, 0, 1, -I], [0, 0, 1, I], [0, 0, 0, -I],
               [0, -1, 1, -I], [1, 0, 0, 0]])


def typeII_C_iii() -> Matrix:
    return _m([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, I], [0, -HALF, HALF, -I * HALF],
               [0, 0, 1, I], [0, HALF, 0, 0]])


def gamma_tilde2_drop_X() -> Matrix:
    return _m([[1], [0]])


# -- local absorption steps (absorber (+) H2(-1)) ----------------------------------

def absorb_type0(k: int) -> TransformationStep:
    """``J_k (+) H2(-1) ~> J_{k-2} (+) G1^2`` for ``k = 2`` or ``k >= 4``."""
    if k == 2:
        return make_step(_sum([J(2), H2M]), _sum([G1, G1]), type0_X2(), Law.LEMMA_J)
    if k < 4:
        raise UnsupportedAbsorption(f"J{k} cannot absorb H2(-1)")
    X = direct_sum(Matrix.identity(k - 3), type0_X3())
    return make_step(_sum([J(k), H2M]), _sum([J(k - 2), G1, G1]), X, Law.LEMMA_J)


def lemma_j3() -> TransformationStep:
    """``J3 ~> G1^2``."""
    return make_step(_sum([J(3)]), _sum([G1, G1]), j3_X0(), Law.LEMMA_J3)


def typeI_local_X(k: int) -> Matrix:
    if k < 3:
        raise UnsupportedAbsorption(f"G{k}~ cannot absorb H2(-1)")
    Xk = typeI_X3() if k == 3 else direct_sum(typeI_X4(), Matrix.identity(k - 4))
    return typeI_P(k) @ Xk


def absorb_typeI(k: int) -> TransformationStep:
    """``G~k (+) H2(-1) ~> G1^2 (+) G~_{k-2}`` for ``k >= 3``."""
    X = typeI_local_X(k)
    return make_step(_sum([GammaT(k), H2M]), _sum([G1, G1, GammaT(k - 2)]), X,
                     Law.LEMMA_GAMMA)


def typeII_case(b: Block) -> str:
    if b.family != "H":
        raise UnsupportedAbsorption(f"{b} is not a Type-II block")
    if b.mu != 1 and b.mu != -1:
        return "i"
    if b.mu == -1 and b.size % 4 == 2 and b.size >= 6:
        return "ii"
    if b.mu == 1 and b.size % 4 == 0:
        return "iii"
    raise UnsupportedAbsorption(f"{b} cannot absorb H2(-1)")


def typeII_first_stage(b: Block):
    """``(X, target blocks, law)`` for the exact stage of a Type-II absorption."""
    case = typeII_case(b)
    size, mu = b.size, b.mu
    if case == "i":
        k = b.half
        if k == 1:
            X = typeII_X1(mu)
        elif k == 2:
            X = typeII_X2(mu)
        else:
            X = direct_sum(Matrix.identity(2 * k - 4), typeII_X2(mu))
        rest = [HT(size - 2, mu)] if size > 2 else []
        return X, rest + [G1, G1], Law.LEMMA_H_I
    if case == "ii":
        # size = 4k + 2
        X = direct_sum(Matrix.identity(size - 4), typeII_C_ii())
        return X, [HT(size - 2, -1), G1, G1], Law.LEMMA_H_II
    X = direct_sum(Matrix.identity(size - 4), typeII_C_iii())
    return X, [HT(size - 2, 1), G1, G1], Law.LEMMA_H_III


def split_noncanonical(b: Block, engine=None) -> TransformationStep | None:
    """``H~_4k(-1) ~> G~_2k^2`` or ``H~_{4k-2}(1) ~> G~_{2k-1}^2`` via the engine."""
    if b.family != "H":
        return None
    if b.mu == -1 and b.size % 4 == 0:
        g = GammaT(b.size // 2)
    elif b.mu == 1 and b.size % 4 == 2:
        g = GammaT(b.size // 2)
    else:
        return None
    from .congruence import default_engine
    eng = engine or default_engine()
    target = _sum([g, g])
    w = eng.block_congruence(b, target)
    return make_step(_sum([b]), target, w.P, Law.CONGRUENCE,
                     note=f"cosquare congruence ({w.method})", tolerance=eng.tolerance)


def absorb_typeII(block: Block, engine=None) -> list[TransformationStep]:
    """Type-II absorption of one ``H2(-1)``.

    Case i is a single exact step.  Cases ii and iii return two steps: the
    exact lemma stage, then the congruence turning the non-canonical
    tridiagonal block into two ``G~`` blocks.
    """
    b = block.tilde() if block.kind is Kind.H else block
    X, tgt, law = typeII_first_stage(b)
    first = make_step(_sum([b, H2M]), _sum(tgt), X, law)
    if law is Law.LEMMA_H_I:
        return [first]
    inner = split_noncanonical(tgt[0], engine)
    rest = [G1, G1]
    second = make_step(first.target, _sum(list(inner.target.flat()) + rest),
                       direct_sum(inner.X, Matrix.identity(2)), Law.CONGRUENCE, inner.note)
    return [first, second]


def gamma_tilde2_drop() -> TransformationStep:
    return make_step(_sum([GammaT(2)]), _sum([G1]), gamma_tilde2_drop_X(), Law.GAMMA_TILDE2_DROP)


# -- embedding local steps into a full direct sum ----------------------------------

def embed(state: Sequence[Block], positions: Sequence[int], local_X: Matrix,
          local_target: Sequence[Block], law: Law, note: str = "",
          tolerance: float = DEFAULT_TOLERANCE) -> TransformationStep:
    """Apply a local step to the addends at ``positions`` of ``state``.

    The local source is the addends at ``positions`` in that order; the local
    target replaces the first of them and the others are removed.  Every
    other addend is carried by an identity block.
    """
    rows = _block_rows(state)
    local_rows = [r for p in positions for r in rows[p]]
    if local_X.rows != len(local_rows):
        raise DimensionError("local matrix does not match the selected addends")
    new_blocks = []
    entries = {}
    col = 0
    exact = local_X.is_exact
    for t, b in enumerate(state):
        if t == positions[0]:
            for c in range(local_X.cols):
                for lr, r in enumerate(local_rows):
                    x = local_X[lr, c]
                    if x:
                        entries[(r, col + c)] = x
            col += local_X.cols
            new_blocks.extend(local_target)
        elif t in positions:
            continue
        else:
            for r in rows[t]:
                entries[(r, col)] = ONE if exact else 1 + 0j
                col += 1
            new_blocks.append(b)
    n = rows[-1].stop if rows else 0
    zero = ZERO if exact else 0j
    X = Matrix._wrap(tuple(tuple(entries.get((i, j), zero) for j in range(col))
                           for i in range(n)), n, col)
    return make_step(_sum(state), _sum(new_blocks), X, law, note, tolerance)


def canonical_reduction(s: BlockSum, engine=None) -> TransformationStep | None:
    """Replace plain ``G_k`` and ``H_2k(mu)`` addends by their tilde forms."""
    blocks = s.flat()
    def needs(b):
        return b.kind in (Kind.GAMMA, Kind.H) and b.size > (1 if b.kind is Kind.GAMMA else 2)

    if not any(needs(b) for b in blocks):
        return None
    parts, tgt = [], []
    for b in blocks:
        if needs(b):
            P, t = tilde_congruence(b, engine)
            parts.append(P)
            tgt.append(t)
        else:
            parts.append(Matrix.identity(b.size))
            tgt.append(b)
    return make_step(s, _sum(tgt), direct_sum(*parts), Law.CANONICAL_REDUCTION)


# -- reduce --------------------------------------------------------------------------

def _absorber_rank(b: Block):
    """Priority key (type, size) of an addend able to absorb H2(-1), else None."""
    if b.kind is Kind.J and (b.size == 2 or b.size >= 4):
        return (0, b.size)
    if b.kind is Kind.GAMMA_TILDE and b.size >= 3:
        return (1, b.size)
    if b.family == "H" and (b.is_tilde or b.size == 2) and not b.is_h2_minus():
        try:
            typeII_case(b)
        except UnsupportedAbsorption:
            return None
        return (2, b.size)
    return None


def _h2_positions(state):
    return [t for t, b in enumerate(state) if b.is_h2_minus()]


def absorb_at(state: list[Block], i: int, j: int, engine=None) -> list[TransformationStep]:
    """Absorb the ``H2(-1)`` at position ``j`` into the addend at position ``i``."""
    b = state[i]
    if not state[j].is_h2_minus():
        raise UnsupportedAbsorption(f"addend {j} is {state[j]}, not H2(-1)")
    if b.kind is Kind.J:
        loc = absorb_type0(b.size)
        return [embed(state, [i, j], loc.X, loc.target.flat(), Law.LEMMA_J)]
    if b.kind is Kind.GAMMA_TILDE:
        loc_X = typeI_local_X(b.size)
        tgt = [G1, G1] + ([GammaT(b.size - 2)] if b.size > 3 else [G1])
        return [embed(state, [i, j], loc_X, tgt, Law.LEMMA_GAMMA)]
    if b.family == "H":
        X, tgt, law = typeII_first_stage(b)
        tgt = [_norm(t) for t in tgt]
        first = embed(state, [i, j], X, tgt, law)
        if law is Law.LEMMA_H_I:
            return [first]
        new_state = first.target.flat()
        at = i - 1 if j < i else i
        inner = split_noncanonical(new_state[at], engine)
        second = embed(new_state, [at], inner.X, inner.target.flat(), Law.CONGRUENCE,
                       inner.note, tolerance=inner.residual + DEFAULT_TOLERANCE)
        return [first, second]
    raise UnsupportedAbsorption(f"{b} cannot absorb H2(-1)")


@dataclass
class ReductionResult:
    chain: TransformationChain
    end_state: BlockSum
    case: str  # "C0" | "C1"


def pair_h4_blocks(chain: TransformationChain, engine=None) -> int:
    """Absorb every ``H~4(1)`` with its own ``H2(-1)``; returns the number paired."""
    state = chain.target.flat()
    n4 = sum(1 for b in state if b.is_h4_plus())
    if n4 > len(_h2_positions(state)):
        raise UnpairedH4Error(f"{n4} H4(1) blocks but only {len(_h2_positions(state))} H2(-1)")
    paired = 0
    while True:
        state = chain.target.flat()
        h4 = [t for t, b in enumerate(state) if b.is_h4_plus()]
        if not h4:
            return paired
        j = _h2_positions(state)[0]
        chain.extend(absorb_at(state, h4[0], j, engine))
        paired += 1


def reduce(s: BlockSum, engine=None, pair_h4: bool = False) -> ReductionResult:
    """Absorb ``H2(-1)`` addends greedily; Type-0 first, then Type-I, then Type-II.

    Within a type the largest absorber goes first.  Gamma~ addends produced
    by Type-II absorptions are absorbed again while ``H2(-1)`` remain.
    """
    chain = TransformationChain(_as_sum(s))
    step = canonical_reduction(chain.target, engine)
    if step:
        chain.append(step)
    if any(b.kind is Kind.J and b.size == 1 for b in chain.target.flat()):
        chain.append(j1_law(chain.target))
    if any(b.is_h4_plus() for b in chain.target.flat()):
        if not pair_h4:
            raise UnpairedH4Error("H4(1) blocks must be paired with H2(-1) before reduction")
        pair_h4_blocks(chain, engine)
    while True:
        state = chain.target.flat()
        h2 = _h2_positions(state)
        if not h2:
            break
        best = None
        for t, b in enumerate(state):
            r = _absorber_rank(b)
            if r is None:
                continue
            key = (r[0], -r[1], t)
            if best is None or key < best[0]:
                best = (key, t)
        if best is None:
            break
        chain.extend(absorb_at(state, best[1], h2[0], engine))
    end = chain.target
    case = "C1" if any(b.is_h2_minus() for b in end.flat()) else "C0"
    return ReductionResult(chain, end, case)
