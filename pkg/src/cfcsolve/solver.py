"""Decide and solve ``X^T A X = B`` for a block-sum ``A`` and symmetric ``B``.

Negatives come only from the bound ``rank B <= min(tau, upsilon)``.  Positives
are constructed: the reduction chain absorbs ``H2(-1)`` blocks, then either
per-block diagonal certificates (case C0) or the explicit C1 finish reach
``G1^m``; finally ``B`` is reassembled from its Lagrange normal form.
"""
from __future__ import annotations

import logging
import random
import zlib
from dataclasses import dataclass, field
from functools import lru_cache

from .blocks import Block, BlockSum, Kind, materialize
from .congruence import DEFAULT_SEED, DEFAULT_TOLERANCE, default_engine
from .errors import (ConstructionBudgetExhausted, DimensionError, InvalidRequest,
                     NotSymmetric)
from .invariants import Invariants, tau_upsilon
from .kernel import ONE, ZERO, GQ, Matrix, direct_sum, gq, inverse, nullspace, rank, sqrt_exact
from .kernel.linalg import nullspace_matrix
from .reduction import (G1, Law, TransformationChain, addition, elimination, gamma_tilde2_drop,
                        lemma_j3, make_step, reduce)

_log = logging.getLogger(__name__)

CONSISTENT = "Consistent"
INCONSISTENT = "Inconsistent"
UNDECIDED = "Undecided"


# -- symmetric normal form ----------------------------------------------------------

@dataclass
class SymmetricNormalization:
    """``Q^T B Q = diag(d) (+) 0_k`` with every ``d_i != 0``."""

    Q: Matrix
    m: int
    k: int
    d: list


def normalize_symmetric(B: Matrix) -> SymmetricNormalization:
    """Lagrange congruence diagonalization of an exact symmetric matrix."""
    if not B.is_square():
        raise DimensionError("B must be square")
    if not B.is_symmetric():
        raise NotSymmetric("B is not symmetric")
    if not B.is_exact:
        raise InvalidRequest("B must have exact entries")
    n = B.rows
    S = [list(r) for r in B.tolist()]
    Q = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]

    def add_col(dst, src, c):
        # x_dst <- x_dst + c x_src, applied as a congruence
        for r in range(n):
            Q[r][dst] = Q[r][dst] + c * Q[r][src]
        for r in range(n):
            S[r][dst] = S[r][dst] + c * S[r][src]
        for r in range(n):
            S[dst][r] = S[dst][r] + c * S[src][r]

    def swap(a, b):
        if a == b:
            return
        for r in range(n):
            Q[r][a], Q[r][b] = Q[r][b], Q[r][a]
            S[r][a], S[r][b] = S[r][b], S[r][a]
        S[a], S[b] = S[b], S[a]

    d = []
    for t in range(n):
        p = next((i for i in range(t, n) if S[i][i]), None)
        if p is None:
            pair = next(((i, j) for i in range(t, n) for j in range(t, n) if S[i][j]), None)
            if pair is None:
                break
            add_col(pair[0], pair[1], ONE)
            p = pair[0]
        swap(t, p)
        piv = S[t][t]
        for r in range(t + 1, n):
            if S[t][r]:
                add_col(r, t, -(S[t][r] / piv))
        d.append(piv)
    Qm = Matrix(Q)
    m = len(d)
    check = Qm.T @ B @ Qm
    if check != direct_sum(Matrix.diag(d), Matrix.zeros(n - m)):
        raise AssertionError("Lagrange diagonalization failed to verify")
    return SymmetricNormalization(Qm, m, n - m, d)


# -- decision ------------------------------------------------------------------------

@dataclass
class Decision:
    status: str
    m: int
    tau: int
    upsilon: int
    min_bound: int
    notes: list = field(default_factory=list)
    chain: TransformationChain | None = None
    X: Matrix | None = None
    certificate: tuple | None = None  # (X0, d) with X0^T A X0 = diag(d)
    residual: float | None = None
    mode: str | None = None
    case: str | None = None
    seed: int | None = None

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT

    def to_json(self, include_chain: bool = True) -> dict:
        from .io_formats import matrix_to_json
        from .kernel import format_scalar
        out = {"status": self.status, "m": self.m, "tau": self.tau,
               "upsilon": self.upsilon, "min_bound": self.min_bound, "notes": list(self.notes)}
        if self.case:
            out["case"] = self.case
        if self.chain is not None and include_chain:
            out["chain"] = self.chain.to_json()
        if self.X is not None:
            out["X"] = matrix_to_json(self.X)
        if self.certificate is not None:
            X0, d = self.certificate
            out["certificate"] = {"X0": matrix_to_json(X0), "d": [format_scalar(x) for x in d]}
        if self.residual is not None:
            out["residual"] = self.residual
        if self.mode:
            out["mode"] = self.mode
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _count_h4(s: BlockSum) -> int:
    return s.count(lambda b: b.is_h4_plus())


def _count_h2(s: BlockSum) -> int:
    return s.count(lambda b: b.is_h2_minus())


def decide(A: BlockSum, m: int) -> Decision:
    """Tri-state decision without construction."""
    if not isinstance(m, int) or m < 0:
        raise InvalidRequest(f"m must be a nonnegative integer, got {m!r}")
    inv = tau_upsilon(A)
    dec = Decision(UNDECIDED, m, inv.tau, inv.upsilon, inv.min_bound)
    if m > inv.min_bound:
        dec.status = INCONSISTENT
        dec.notes.append(f"necessary condition fails: m = {m} > min(tau, upsilon) = {inv.min_bound}")
        return dec
    n4, n2 = _count_h4(A), _count_h2(A)
    if n4 == 0:
        dec.status = CONSISTENT
        dec.notes.append("no H4(1) blocks: m <= min(tau, upsilon) is sufficient")
    elif n4 <= n2:
        dec.status = CONSISTENT
        dec.notes.append(f"H4(1) pairing: {n4} H4(1) blocks absorbed by {n2} H2(-1) blocks")
    else:
        dec.notes.append(
            f"H4(1) pairing unavailable: {n4} H4(1) blocks but only {n2} H2(-1) blocks; "
            "the bound is not sufficient in general here (X^T H4(1) X = I_3 is inconsistent "
            "although min(tau, upsilon) = 3)")
    return dec


# -- deflation oracle ---------------------------------------------------------------------

def _rand_gauss(rng: random.Random, span: int = 2) -> GQ:
    if rng.random() < 0.7:
        return GQ(rng.randint(-span, span))
    return GQ(rng.randint(-span, span), rng.randint(-span, span))


def _rand_vec(rng: random.Random, n: int) -> list:
    v = [_rand_gauss(rng) for _ in range(n)]
    if not any(v):
        v[rng.randrange(n)] = ONE
    return v


def random_lagrangian(A: Matrix, rng: random.Random) -> Matrix:
    """Basis of a random maximal isotropic subspace of the skew part of ``A``."""
    n = A.rows
    K = (A - A.T).scale(GQ(1, 0) / 2)
    cols = list(nullspace(K))
    target = n - rank(K) // 2
    while len(cols) < target:
        if cols:
            L = cols[0].hstack(*cols[1:])
            U = nullspace_matrix(L.T @ K)
        else:
            U = Matrix.identity(n)
        for _ in range(64):
            x = U @ Matrix.column(_rand_vec(rng, U.cols))
            if not cols or rank(cols[0].hstack(*cols[1:], x)) == len(cols) + 1:
                cols.append(x)
                break
        else:
            raise ConstructionBudgetExhausted("could not extend the isotropic subspace")
    if not cols:
        return Matrix.zeros(n, 0)
    return cols[0].hstack(*cols[1:])


def _qform(G: Matrix, x: Matrix, y: Matrix):
    return (x.T @ G @ y)[0, 0]


def _hyperbolic_pair(G: Matrix, pool):
    """Two columns ``e, f`` with ``q(e) = q(f) = 1`` and ``e.f = 0`` for symmetric ``G``.

    Looks for an isotropic ``u`` among the pool vectors and their pairwise
    combinations ``x + t y`` (``t`` a root of a Gaussian-rational quadratic),
    then completes it to a hyperbolic plane; since ``-1 = i^2`` the plane is
    spanned by ``u + v/2`` and ``i (u - v/2)``.
    """
    def complete(u):
        Gu = G @ u
        j = next((r for r in range(G.rows) if Gu[r, 0]), None)
        if j is None:
            return None
        v = Matrix.canonical_e(j + 1, G.rows).scale(Gu[j, 0].inverse())
        v = v - u.scale(_qform(G, v, v) / 2)
        half = v.scale(GQ(1, 0) / 2)
        return (u + half), (u - half).scale(GQ(0, 1))

    qs = [_qform(G, x, x) for x in pool]
    for x, q in zip(pool, qs):
        if not q:
            got = complete(x)
            if got:
                return got
    for a in range(len(pool)):
        for b in range(a + 1, len(pool)):
            qa, qb = qs[a], qs[b]
            if not qb:
                continue
            beta = _qform(G, pool[a], pool[b])
            r = sqrt_exact(beta * beta - qa * qb)
            if r is None:
                continue
            t = (r - beta) / qb
            u = pool[a] + pool[b].scale(t)
            if u.is_zero() or _qform(G, u, u):
                continue
            got = complete(u)
            if got:
                return got
    return None


def _pick(G: Matrix, rng: random.Random, tries: int, prefer_squares: bool, room: int):
    """Columns (coefficient vectors) and their values ``c^T G c != 0``.

    Preference: a single vector with a square value (normalized to 1), a
    hyperbolic pair of unit vectors (symmetric ``G`` only), anything nonzero.
    """
    v = G.rows
    fallback = None
    pool = [Matrix.canonical_e(j + 1, v) for j in range(v)]
    pool += [Matrix.column(_rand_vec(rng, v)) for _ in range(tries)]
    for cm in pool:
        q = _qform(G, cm, cm)
        if not q:
            continue
        if not prefer_squares:
            return [cm], [q]
        r = sqrt_exact(q)
        if r is not None:
            return [cm.scale(r.inverse())], [ONE]
        if fallback is None:
            fallback = ([cm], [q])
    if prefer_squares and G.is_symmetric():
        pair = _hyperbolic_pair(G, pool[:max(v, 8)])
        if pair:
            return list(pair[:room]), [ONE] * min(2, room)
    return fallback if fallback else (None, None)


def greedy_deflate(A: Matrix, m: int, seed: int = DEFAULT_SEED, start: str = "lagrangian",
                   restarts: int = 16, tries: int = 32, prefer_squares: bool = True):
    """Exact ``(X0, d)`` with ``X0^T A X0 = diag(d)``, ``d_i != 0``, ``m`` columns.

    Columns are picked one at a time from an admissible subspace ``V`` and
    ``V`` is shrunk by the two linear conditions that keep the product
    diagonal.  ``start="full"`` begins from the whole space; ``"lagrangian"``
    begins from a random maximal isotropic subspace of the skew part of
    ``A``, on which the form is symmetric and the greedy step attains its
    rank.
    """
    if m < 0:
        raise InvalidRequest("m must be nonnegative")
    n = A.rows
    if m == 0:
        return Matrix.zeros(n, 0), []
    rng = random.Random(seed)
    for _ in range(restarts):
        try:
            V = random_lagrangian(A, rng) if start == "lagrangian" else Matrix.identity(n)
        except ConstructionBudgetExhausted:
            continue
        cols, d = [], []
        while len(cols) < m:
            if V.cols == 0:
                break
            cs, qs = _pick(V.T @ A @ V, rng, tries, prefer_squares, m - len(cols))
            if cs is None:
                break
            ws = [V @ c for c in cs]
            cols.extend(ws)
            d.extend(qs)
            cons = [(w.T @ A @ V).vstack((V.T @ A @ w).T) for w in ws]
            N = nullspace_matrix(cons[0].vstack(*cons[1:]))
            V = V @ N if N.cols else Matrix.zeros(n, 0)
        if len(cols) == m:
            X0 = cols[0].hstack(*cols[1:])
            if X0.T @ A @ X0 != Matrix.diag(d):
                raise AssertionError("deflation certificate failed to verify")
            return X0, d
    raise ConstructionBudgetExhausted(f"greedy deflation did not reach m = {m}")


# -- per-block certificates ------------------------------------------------------------

@lru_cache(maxsize=None)
def _block_certificate(b: Block, seed: int):
    M = materialize(b, True)
    m = tau_upsilon(b).tau
    if b.kind is Kind.J and b.size == 3:
        return lemma_j3().X, (ONE, ONE)
    if b.family == "G" and b.size == 1:
        return Matrix.identity(1), (ONE,)
    if b.kind is Kind.GAMMA_TILDE and b.size == 2:
        return gamma_tilde2_drop().X, (ONE,)
    bseed = seed ^ zlib.crc32(str(b).encode())
    best = None
    for attempt in range(8):
        X0, d = greedy_deflate(M, m, seed=bseed + attempt)
        score = sum(1 for x in d if x != 1)
        if best is None or score < best[0]:
            best = (score, X0, tuple(d))
        if score == 0:
            break
    return best[1], best[2]


def clear_caches() -> None:
    """Drop memoized block certificates and default-engine witnesses."""
    _block_certificate.cache_clear()
    default_engine().clear()


def block_certificate(b: Block, seed: int = DEFAULT_SEED):
    """``(X0, d)`` with ``X0^T b X0 = diag(d)`` and ``len(d) = tau(b)``."""
    if b.is_h2_minus() or b.is_h4_plus():
        raise InvalidRequest(f"{b} has no per-block certificate reaching tau")
    return _block_certificate(b, seed)


def _scale_columns(X0: Matrix, d):
    """``X0 diag(1/sqrt d)`` exactly when possible, else in floating point."""
    roots = [sqrt_exact(gq(x)) for x in d]
    if all(r is not None for r in roots):
        return X0 @ Matrix.diag([r.inverse() for r in roots])
    return X0.to_float() @ Matrix.diag([1 / complex(x) ** 0.5 for x in d])


def solve_block_to_identity(b: Block, seed: int = DEFAULT_SEED) -> Matrix:
    """``X`` with ``X^T b X = I_tau(b)`` (floating when a scaling is irrational)."""
    X0, d = block_certificate(b, seed)
    return _scale_columns(X0, d)


# -- verification ---------------------------------------------------------------------------

@dataclass
class VerifyReport:
    ok: bool
    residual: float
    mode: str

    def to_json(self) -> dict:
        return {"ok": self.ok, "residual": self.residual, "mode": self.mode}


def verify(A: Matrix, X: Matrix, B: Matrix, tolerance: float | None = None) -> VerifyReport:
    """Residual ``X^T A X - B``; exact mode when everything is exact and no tolerance given."""
    if not A.is_square() or X.rows != A.rows or B.shape != (X.cols, X.cols):
        raise DimensionError(f"shapes do not conform: A {A.shape}, X {X.shape}, B {B.shape}")
    R = X.T @ A @ X - B
    if tolerance is None and R.is_exact:
        return VerifyReport(R.is_zero(), 0.0 if R.is_zero() else R.max_abs(), "exact")
    t = DEFAULT_TOLERANCE if tolerance is None else tolerance
    res = R.max_abs()
    return VerifyReport(res <= t, res, "tolerance")


# -- solve ------------------------------------------------------------------------------------

def _finish_c0(chain: TransformationChain, seed: int):
    """Per-block certificates for an end state without H2(-1)."""
    parts, ds, steps = [], [], []
    for b in chain.target.flat():
        X0, d = block_certificate(b, seed)
        parts.append(X0)
        ds.extend(d)
    X0 = direct_sum(*parts)
    Xs = _scale_columns(X0, ds)
    target = BlockSum.from_blocks([G1] * len(ds))
    step = make_step(chain.target, target, Xs, Law.DEFLATION,
                     note="per-block diagonal certificates, Addition law")
    return step, X0, list(ds)


def _finish_c1(chain: TransformationChain):
    """Drop leftover H2(-1); J3 ~> G1^2, G2~ ~> G1, G1 kept."""
    state = chain.target.flat()
    keep = [t for t, b in enumerate(state) if not b.is_h2_minus()]
    chain.append(elimination(chain.target, keep))
    pieces = []
    for b in chain.target.flat():
        if b.kind is Kind.J and b.size == 3:
            pieces.append(lemma_j3())
        elif b.kind is Kind.GAMMA_TILDE and b.size == 2:
            pieces.append(gamma_tilde2_drop())
        elif b.family == "G" and b.size == 1:
            pieces.append(make_step(BlockSum.of(G1), BlockSum.of(G1), Matrix.identity(1),
                                    Law.ADDITION))
        else:
            raise AssertionError(f"unexpected addend {b} in case C1")
    if pieces:
        chain.append(addition(pieces))


def _pick_unit_columns(ds, m):
    order = sorted(range(len(ds)), key=lambda t: (ds[t] != 1, t))
    return sorted(order[:m])


def solve(A: BlockSum, B: Matrix | None = None, m: int | None = None, k: int = 0,
          seed: int = DEFAULT_SEED, tolerance: float = DEFAULT_TOLERANCE,
          engine=None, direct_search: bool = True) -> Decision:
    """Decide and, when consistent, construct and verify ``X``."""
    if (B is None) == (m is None):
        raise InvalidRequest("give exactly one of B or m")
    if B is not None:
        norm = normalize_symmetric(B)
    else:
        if m < 0 or k < 0:
            raise InvalidRequest("m and k must be nonnegative")
        B = direct_sum(Matrix.identity(m), Matrix.zeros(k))
        norm = SymmetricNormalization(Matrix.identity(m + k), m, k, [ONE] * m)
    m, k = norm.m, norm.k
    dec = decide(A, m)
    dec.seed = seed
    if dec.status == INCONSISTENT:
        return dec
    Am = materialize(A, True)
    n = Am.rows
    if dec.status == UNDECIDED:
        if direct_search and m > 0:
            try:
                X0, d = greedy_deflate(Am, m, seed=seed, restarts=8)
            except ConstructionBudgetExhausted:
                dec.notes.append("direct deflation search found no solution")
                return dec
            dec.status = CONSISTENT
            dec.notes.append("consistent by a verified direct construction")
            return _reassemble(dec, Am, B, norm, X0, d, None, tolerance)
        return dec
    if m == 0:
        X = Matrix.zeros(n, k)
        dec.X = X
        dec.certificate = (Matrix.zeros(n, 0), [])
        dec.residual = verify(Am, X, B).residual
        dec.mode = "exact"
        dec.notes.append("m = 0: trivial solution")
        return dec

    red = reduce(A, engine, pair_h4=True)
    chain = red.chain
    dec.case = red.case
    if red.case == "C0":
        dec.notes.append("case C0: every H2(-1) absorbed")
        try:
            step, X0_tail, ds = _finish_c0(chain, seed)
        except ConstructionBudgetExhausted as exc:
            dec.notes.append(f"constructive gap: {exc}")
            dec.chain = chain
            raise
        X_prefix = chain.composed_X()
        chain.append(step)
        X0_all = X_prefix @ X0_tail
    else:
        dec.notes.append("case C1: leftover H2(-1) eliminated")
        _finish_c1(chain)
        X0_all = chain.composed_X()
        ds = [ONE] * X0_all.cols
    if X0_all.cols < m:
        raise AssertionError(f"construction reached only {X0_all.cols} < m = {m} columns")
    keep = _pick_unit_columns(ds, m)
    if X0_all.cols > m:
        chain.append(elimination(chain.target, keep))
    X0 = X0_all.columns(keep)
    d = [ds[t] for t in keep]
    return _reassemble(dec, Am, B, norm, X0, d, chain, tolerance)


def _reassemble(dec, Am, B, norm, X0, d, chain, tolerance):
    """``X = [X0 diag(sqrt(dB/dA)) | 0] Q^{-1}`` so that ``X^T A X = B``."""
    n = Am.rows
    if X0.T @ Am @ X0 != Matrix.diag(d):
        raise AssertionError("diagonal certificate failed to verify")
    ratios = [gq(db) / gq(da) for db, da in zip(norm.d, d)]
    roots = [sqrt_exact(r) for r in ratios]
    Qinv = inverse(norm.Q)
    if all(r is not None for r in roots):
        Y = X0 @ Matrix.diag(roots) if roots else X0
        X = Y.hstack(Matrix.zeros(n, norm.k)) @ Qinv
        rep = verify(Am, X, B)
        mode = "exact"
    else:
        Y = X0.to_float() @ Matrix.diag([complex(r) ** 0.5 for r in ratios])
        X = Y.hstack(Matrix.zeros(n, norm.k).to_float()) @ Qinv.to_float()
        rep = verify(Am, X, B, tolerance)
        mode = "numeric"
    if not rep.ok:
        raise AssertionError(f"constructed X fails verification (residual {rep.residual:.3e})")
    dec.X = X
    dec.certificate = (X0, list(d))
    dec.residual = rep.residual
    dec.mode = mode
    dec.chain = chain
    return dec
