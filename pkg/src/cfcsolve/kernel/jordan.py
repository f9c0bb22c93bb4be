"""Exact Jordan chains for matrices whose eigenvalues lie in Q(i)."""
from __future__ import annotations

from .linalg import char_poly, inverse, nullspace, rank
from .matrix import Matrix
from .poly import exact_roots
from .scalar import GQ


def exact_eigenvalues(m: Matrix):
    """``[(lambda, algebraic multiplicity), ...]`` sorted, or ``None``."""
    roots = exact_roots(char_poly(m))
    if roots is None:
        return None
    return sorted(roots, key=lambda t: (t[0].re, t[0].im))


def _in_span(basis_cols: list[Matrix], v: Matrix, r0: int) -> bool:
    if not basis_cols:
        return v.is_zero()
    m = basis_cols[0].hstack(*basis_cols[1:], v)
    return rank(m) == r0


def jordan_chains(m: Matrix, lam: GQ, mult: int):
    """Chains ``(head, length)`` for eigenvalue ``lam``, longest first."""
    n = m.rows
    N = m - Matrix.identity(n).scale(lam)
    kernels = [[]]  # kernels[j] = basis of ker N^j
    power = Matrix.identity(n)
    while len(kernels[-1]) < mult:
        power = power @ N
        kernels.append(nullspace(power))
        if len(kernels) > n + 1:
            raise ArithmeticError("generalized eigenspace did not stabilise")
    p = len(kernels) - 1
    chains = []
    for j in range(p, 0, -1):
        used = list(kernels[j - 1])
        for head, length in chains:
            v = head
            for _ in range(length - j):
                v = N @ v
            used.append(v)
        r = rank(used[0].hstack(*used[1:])) if used else 0
        for u in kernels[j]:
            if not _in_span(used, u, r):
                used.append(u)
                r += 1
                chains.append((u, j))
    chains.sort(key=lambda t: -t[1])
    return N, chains


def jordan_basis(m: Matrix, eigs=None):
    """``(T, structure)`` with ``m T = T J``; ``structure`` lists (lambda, size).

    Returns ``None`` when the eigenvalues are not all Gaussian rationals.
    """
    if eigs is None:
        eigs = exact_eigenvalues(m)
        if eigs is None:
            return None
    cols = []
    structure = []
    for lam, mult in eigs:
        N, chains = jordan_chains(m, lam, mult)
        for head, length in chains:
            seq = [head]
            for _ in range(length - 1):
                seq.append(N @ seq[-1])
            cols.extend(reversed(seq))
            structure.append((lam, length))
    T = cols[0].hstack(*cols[1:])
    return T, structure


def jordan_matrix(structure) -> Matrix:
    from .matrix import direct_sum
    blocks = []
    for lam, size in structure:
        rows = [[lam if i == j else (1 if j == i + 1 else 0) for j in range(size)]
                for i in range(size)]
        blocks.append(Matrix(rows))
    return direct_sum(*blocks)


__all__ = ["exact_eigenvalues", "jordan_chains", "jordan_basis", "jordan_matrix", "inverse"]
