"""Constructive congruence of invertible matrices through their cosquares.

Two invertible matrices are congruent exactly when their cosquares
``A^{-T} A`` are similar.  Given a similarity ``S`` with
``cosquare(B) S = S cosquare(A)``, the matrix ``B' = S^T B S`` has the same
cosquare as ``A``; then ``M = A^{-1} B'`` satisfies ``A M = M^T A``, every
polynomial ``R`` in ``M`` inherits that identity, and a polynomial square
root ``R`` of ``M`` gives ``R^T A R = B'``.  Hence ``P = R S^{-1}`` solves
``P^T A P = B``.
"""
from __future__ import annotations

import logging
import random
import threading
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.linalg

from .errors import (CongruenceNotFound, DimensionError, NotCongruent, NotSimilar,
                     SimilaritySearchExhausted, SingularError, SqrtFailure)
from .kernel import (GQ, I, ONE, ZERO, Matrix, char_poly, direct_sum, gq, inverse,
                     nullspace, rank, sqrt_exact)
from .kernel.jordan import exact_eigenvalues, jordan_basis

_log = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_SEED = 20210611


@dataclass
class CongruenceWitness:
    """``P`` with ``P^T A P = B`` for the pair it was issued for."""

    P: Matrix
    residual_norm: float
    mode: str  # "exact" | "numeric"
    seed: int | None = None
    method: str = "cosquare"
    notes: list = field(default_factory=list)


def residual(A: Matrix, P: Matrix, B: Matrix) -> Matrix:
    return P.T @ A @ P - B


def cosquare(A: Matrix) -> Matrix:
    """``A^{-T} A``."""
    if not A.is_square():
        raise DimensionError("cosquare of a non-square matrix")
    return inverse(A).T @ A


# -- similarity --------------------------------------------------------------

def _sylvester_similarity(C1: Matrix, C2: Matrix, rng: random.Random, retries: int = 64):
    """Random invertible element of ``{S : C1 S = S C2}``."""
    n = C1.rows
    rows = []
    # unknown S[a][b] has index a*n + b
    for i in range(n):
        for j in range(n):
            row = [ZERO] * (n * n)
            for k in range(n):
                c = C1[i, k]
                if c:
                    row[k * n + j] = row[k * n + j] + c
                c = C2[k, j]
                if c:
                    row[i * n + k] = row[i * n + k] - c
            rows.append(row)
    basis = nullspace(Matrix(rows))
    if not basis:
        raise NotSimilar("only the zero matrix intertwines the two matrices")
    for span in (3, 9):
        for _ in range(retries):
            vec = [ZERO] * (n * n)
            for b in basis:
                c = rng.randint(-span, span)
                if c:
                    for t in range(n * n):
                        x = b[t, 0]
                        if x:
                            vec[t] = vec[t] + x * c
            S = Matrix([vec[a * n:(a + 1) * n] for a in range(n)])
            if rank(S) == n:
                return S
    raise SimilaritySearchExhausted(
        f"no invertible element found in a {len(basis)}-dimensional solution space")


def find_similarity(C1: Matrix, C2: Matrix, seed: int = DEFAULT_SEED,
                    sylvester_max: int = 10) -> Matrix:
    """Invertible ``S`` with ``C1 S = S C2`` (exact).

    Characteristic polynomials are compared first.  When every eigenvalue is
    a Gaussian rational, Jordan bases of both matrices are built and matched
    (differing Jordan structures prove non-similarity).  Otherwise small
    problems fall back to sampling the solution space of the Sylvester
    equation ``C1 S - S C2 = 0``.
    """
    if not (C1.is_square() and C2.is_square()) or C1.shape != C2.shape:
        raise DimensionError("similarity needs square matrices of equal size")
    if char_poly(C1) != char_poly(C2):
        raise NotSimilar("characteristic polynomials differ")
    n = C1.rows
    eigs = exact_eigenvalues(C1)
    if eigs is not None:
        T1, s1 = jordan_basis(C1, eigs)
        T2, s2 = jordan_basis(C2, eigs)
        if s1 != s2:
            raise NotSimilar("Jordan structures differ")
        S = T1 @ inverse(T2)
    elif n <= sylvester_max:
        S = _sylvester_similarity(C1, C2, random.Random(seed))
    else:
        raise SimilaritySearchExhausted("eigenvalues outside Q(i) and matrix too large")
    if C1 @ S != S @ C2:
        raise AssertionError("similarity failed to verify")
    return S


# -- square roots --------------------------------------------------------------

def _sqrt_derivative(root: GQ, lam: GQ, j: int) -> GQ:
    """``d^j/dx^j sqrt(x)`` at ``lam`` divided by ``j!`` given ``root = sqrt(lam)``."""
    coef = GQ(1)
    for t in range(j):
        coef = coef * (GQ(1, 0) / 2 - t)
    return coef * root * lam.inverse() ** j / factorial(j)


def hermite_sqrt_poly(eigs, roots):
    """Newton-form Hermite interpolant of ``sqrt`` on the spectrum.

    Returns ``(nodes, coeffs)`` so that ``p(x) = sum_k coeffs[k] prod_{l<k}(x - nodes[l])``.
    """
    nodes = []
    for lam, mult in eigs:
        nodes.extend([lam] * mult)
    deriv = {}
    for (lam, mult), r in zip(eigs, roots):
        for j in range(mult):
            deriv[(lam, j)] = _sqrt_derivative(r, lam, j)
    n = len(nodes)
    # table[k][i] = f[z_i, ..., z_{i+k}]
    table = [[deriv[(z, 0)] for z in nodes]]
    for k in range(1, n):
        prev = table[-1]
        cur = []
        for i in range(n - k):
            a, b = nodes[i], nodes[i + k]
            if a == b:
                cur.append(deriv[(a, k)])
            else:
                cur.append((prev[i + 1] - prev[i]) / (b - a))
        table.append(cur)
    return nodes, [table[k][0] for k in range(n)]


def _eval_newton(nodes, coeffs, M: Matrix) -> Matrix:
    n = M.rows
    ident = Matrix.identity(n)
    acc = Matrix.zeros(n)
    prod = ident
    for k, c in enumerate(coeffs):
        if c:
            acc = acc + prod.scale(c)
        if k + 1 < len(coeffs):
            prod = prod @ (M - ident.scale(nodes[k]))
    return acc


@dataclass
class SqrtResult:
    R: Matrix
    mode: str
    residual: float


def primary_sqrt(M: Matrix, tolerance: float = DEFAULT_TOLERANCE) -> SqrtResult:
    """Primary square root, principal branch (``sqrt(-r) = i sqrt(r)``).

    Exact Hermite interpolation when the spectrum and its square roots lie in
    Q(i); otherwise a floating Schur-based root, flagged numeric.
    """
    if not M.is_square():
        raise DimensionError("square root of a non-square matrix")
    n = M.rows
    if M.is_exact:
        if rank(M) < n:
            raise SingularError("square root of a singular matrix")
        eigs = exact_eigenvalues(M)
        if eigs is not None:
            roots = [sqrt_exact(lam) for lam, _ in eigs]
            if all(r is not None for r in roots):
                nodes, coeffs = hermite_sqrt_poly(eigs, roots)
                R = _eval_newton(nodes, coeffs, M)
                if R @ R != M or R @ M != M @ R:
                    raise AssertionError("Hermite square root failed to verify")
                return SqrtResult(R, "exact", 0.0)
    a = M.to_numpy()
    if abs(np.linalg.det(a)) == 0:
        raise SingularError("square root of a singular matrix")
    r = scipy.linalg.sqrtm(a)
    res = float(np.max(np.abs(r @ r - a))) if n else 0.0
    if not np.all(np.isfinite(r)) or res > tolerance * max(1.0, float(np.max(np.abs(a)))):
        raise SqrtFailure(f"numeric square root residual {res:.3e}")
    return SqrtResult(Matrix.from_numpy(r), "numeric", res)


# -- congruence ----------------------------------------------------------------

def _split_doubled(B: Matrix):
    """Return ``G`` if ``B = G (+) G``, else ``None``."""
    n = B.rows
    if n % 2:
        return None
    h = n // 2
    G = B.submatrix(range(h), range(h))
    if B.submatrix(range(h, n), range(h, n)) != G:
        return None
    if not B.submatrix(range(h), range(h, n)).is_zero():
        return None
    if not B.submatrix(range(h, n), range(h)).is_zero():
        return None
    return G


def doubled_scaling(c: GQ, h: int) -> Matrix:
    """``Q`` with ``Q^T (G (+) G) Q = c (G (+) G)`` for any ``h x h`` matrix G.

    Uses ``c = a^2 + b^2`` with ``a = (c+1)/2`` and ``b = i(c-1)/2``.
    """
    a = (c + 1) / 2
    b = I * (c - 1) / 2
    Ih = Matrix.identity(h)
    top = Ih.scale(a).hstack(Ih.scale(-b))
    bot = Ih.scale(b).hstack(Ih.scale(a))
    return top.vstack(bot)


def _scale_candidates(eigs):
    seen = []
    for lam, _ in eigs:
        for u in (ONE, -ONE, I, -I):
            c = lam * u
            if c not in seen:
                seen.append(c)
    return seen


def newton_congruence(A, B, P0=None, seed: int = DEFAULT_SEED, restarts: int = 16,
                      iterations: int = 100, tolerance: float = DEFAULT_TOLERANCE):
    """Damped Gauss-Newton on ``F(P) = P^T A P - B``; returns a float Matrix."""
    a = A.to_numpy()
    b = B.to_numpy()
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    eye = np.eye(n)

    def F(p):
        return p.T @ a @ p - b

    def jac(p):
        ap = a @ p
        atp = a.T @ p
        J = np.zeros((n * n, n * n), dtype=complex)
        for k in range(n):
            for l in range(n):
                # dF / dP[k, l]
                E = np.zeros((n, n), dtype=complex)
                E[l, :] += ap[k, :]
                E[:, l] += atp[k, :]
                J[:, k * n + l] = E.reshape(-1)
        return J

    starts = [P0] if P0 is not None else []
    for r in range(restarts):
        if r < len(starts):
            p = np.asarray(starts[r], dtype=complex)
        else:
            p = eye + 0.5 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        f = F(p)
        err = np.max(np.abs(f))
        for _ in range(iterations):
            if err <= tolerance:
                return Matrix.from_numpy(p), float(err)
            step = np.linalg.lstsq(jac(p), -f.reshape(-1), rcond=None)[0].reshape(n, n)
            t = 1.0
            while t > 1e-6:
                q = p + t * step
                fq = F(q)
                eq = np.max(np.abs(fq))
                if eq < err:
                    p, f, err = q, fq, eq
                    break
                t *= 0.5
            else:
                break
        if err <= tolerance:
            return Matrix.from_numpy(p), float(err)
    raise CongruenceNotFound("Newton iteration did not reach the tolerance")


def find_congruence(A: Matrix, B: Matrix, seed: int = DEFAULT_SEED,
                    tolerance: float = DEFAULT_TOLERANCE) -> CongruenceWitness:
    """Invertible ``P`` with ``P^T A P = B`` for invertible ``A`` and ``B``."""
    if not (A.is_square() and B.is_square()) or A.shape != B.shape:
        raise DimensionError("congruence needs square matrices of equal size")
    n = A.rows
    if not (A.is_exact and B.is_exact):
        P, res = newton_congruence(A, B, seed=seed, tolerance=tolerance)
        return CongruenceWitness(P, res, "numeric", seed, "newton")
    if rank(A) < n or rank(B) < n:
        raise SingularError("congruence engine needs invertible matrices")
    try:
        S = find_similarity(cosquare(B), cosquare(A), seed=seed)
    except NotSimilar as exc:
        raise NotCongruent(f"cosquares are not similar: {exc}") from exc
    except SimilaritySearchExhausted as exc:
        raise CongruenceNotFound(str(exc)) from exc
    Bp = S.T @ B @ S
    Ainv = inverse(A)
    M = Ainv @ Bp
    if A @ M != M.T @ A:
        raise AssertionError("intertwining identity A M = M^T A failed")
    Sinv = inverse(S)

    eigs = exact_eigenvalues(M)
    if eigs is not None:
        roots = [sqrt_exact(lam) for lam, _ in eigs]
        if all(r is not None for r in roots):
            R = primary_sqrt(M).R
            P = R @ Sinv
            return _exact_witness(A, P, B, seed, "cosquare")
        G = _split_doubled(B)
        for c in _scale_candidates(eigs):
            scaled = [sqrt_exact(lam / c) for lam, _ in eigs]
            if any(r is None for r in scaled):
                continue
            R = primary_sqrt(M.scale(c.inverse())).R
            P1 = R @ Sinv  # P1^T A P1 = B / c
            if G is not None:
                P = P1 @ doubled_scaling(c, G.rows)
                return _exact_witness(A, P, B, seed, "cosquare+doubled-scaling")
            root_c = complex(c) ** 0.5
            Pf = P1.to_float().scale(root_c)
            res = residual(A, Pf, B).max_abs()
            if res <= tolerance:
                w = CongruenceWitness(Pf, res, "numeric", seed, "cosquare+scalar-root")
                w.notes.append(f"exact P1 with P1^T A P1 = B/({c}) scaled by sqrt({c})")
                return w
    try:
        R = primary_sqrt(M, tolerance=tolerance).R
        P0 = (R @ Sinv.to_float()).to_numpy()
    except SqrtFailure:
        P0 = None
    Pf = Matrix.from_numpy(P0) if P0 is not None else None
    if Pf is not None:
        res = residual(A, Pf, B).max_abs()
        if res <= tolerance:
            return CongruenceWitness(Pf, res, "numeric", seed, "cosquare+numeric-sqrt")
    P, res = newton_congruence(A, B, P0=P0, seed=seed, tolerance=tolerance)
    return CongruenceWitness(P, res, "numeric", seed, "newton")


def _exact_witness(A, P, B, seed, method):
    if residual(A, P, B).is_zero():
        return CongruenceWitness(P, 0.0, "exact", seed, method)
    raise AssertionError("exact congruence failed to verify")


class CongruenceEngine:
    """Seeded congruence search with a memo keyed by the requested pair."""

    def __init__(self, seed: int = DEFAULT_SEED, tolerance: float = DEFAULT_TOLERANCE):
        self.seed = seed
        self.tolerance = tolerance
        self._cache: dict = {}
        self._lock = threading.Lock()

    def find(self, A: Matrix, B: Matrix) -> CongruenceWitness:
        return find_congruence(A, B, seed=self.seed, tolerance=self.tolerance)

    def cached(self, key, A: Matrix, B: Matrix) -> CongruenceWitness:
        with self._lock:
            w = self._cache.get(key)
        if w is None:
            w = self.find(A, B)
            with self._lock:
                w = self._cache.setdefault(key, w)
        return w

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()

    def block_congruence(self, src, dst) -> CongruenceWitness:
        """Congruence between two blocks or block sums (materialized)."""
        from .blocks import materialize
        key = (str(src), str(dst))
        return self.cached(key, materialize(src, True), materialize(dst, True))


_default = None
_default_lock = threading.Lock()


def default_engine() -> CongruenceEngine:
    global _default
    with _default_lock:
        if _default is None:
            _default = CongruenceEngine()
        return _default
