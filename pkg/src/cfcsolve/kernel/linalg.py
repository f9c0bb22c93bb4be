"""Exact Gauss-Jordan elimination and characteristic polynomials."""
from __future__ import annotations

from ..errors import DimensionError, SingularError
from .matrix import Matrix
from .scalar import GQ, ONE, ZERO


def _require_exact(m: Matrix):
    if not m.is_exact:
        raise ValueError("exact elimination needs an exact matrix")


def rref(m: Matrix, ncols: int | None = None):
    """Reduced row echelon form of ``m`` using first-nonzero pivots.

    Only the first ``ncols`` columns are used for pivoting (the rest ride
    along, as for an augmented system).  Returns ``(rows, pivots)`` where
    ``rows`` is a list of lists.
    """
    _require_exact(m)
    a = [list(r) for r in m._a]
    nrows, tot = m.rows, m.cols
    ncols = tot if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c]), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        prow = a[r]
        piv = prow[c]
        if piv != ONE:
            inv = piv.inverse()
            prow = [x * inv if x else x for x in prow]
            a[r] = prow
        nz = [j for j in range(c, tot) if prow[j]]
        for i in range(nrows):
            if i == r:
                continue
            row = a[i]
            f = row[c]
            if not f:
                continue
            for j in nz:
                row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Matrix) -> int:
    if not m.rows or not m.cols:
        return 0
    return len(rref(m)[1])


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise DimensionError("inverse of a non-square matrix")
    n = m.rows
    if n == 0:
        return m
    aug = m.hstack(Matrix.identity(n))
    a, piv = rref(aug, ncols=n)
    if len(piv) < n:
        raise SingularError("matrix is singular")
    return Matrix._wrap(tuple(tuple(r[n:]) for r in a), n, n)


def nullspace(m: Matrix) -> list[Matrix]:
    """Basis of ``{v : m v = 0}`` as a list of column matrices."""
    n = m.cols
    if m.rows == 0:
        return [Matrix.canonical_e(j + 1, n) for j in range(n)]
    a, piv = rref(m)
    free = [j for j in range(n) if j not in set(piv)]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for i, p in enumerate(piv):
            v[p] = -a[i][f]
        basis.append(Matrix._wrap(tuple((x,) for x in v), n, 1))
    return basis


def nullspace_matrix(m: Matrix) -> Matrix:
    """Nullspace basis stacked as the columns of one matrix."""
    basis = nullspace(m)
    if not basis:
        return Matrix.zeros(m.cols, 0)
    return basis[0].hstack(*basis[1:])


def solve(m: Matrix, rhs: Matrix) -> Matrix:
    """A particular solution of ``m X = rhs`` (free variables set to 0)."""
    if m.rows != rhs.rows:
        raise DimensionError("right-hand side has the wrong number of rows")
    n = m.cols
    a, piv = rref(m.hstack(rhs), ncols=n)
    for i in range(len(piv), m.rows):
        if any(a[i][n:]):
            raise SingularError("inconsistent linear system")
    x = [[ZERO] * rhs.cols for _ in range(n)]
    for i, p in enumerate(piv):
        x[p] = a[i][n:]
    return Matrix._wrap(tuple(tuple(r) for r in x), n, rhs.cols)


def gauss_elim(m: Matrix, mode: str, rhs: Matrix | None = None):
    """Single entry point: ``mode`` is rank | inverse | nullspace_basis | solve."""
    if mode == "rank":
        return rank(m)
    if mode == "inverse":
        return inverse(m)
    if mode == "nullspace_basis":
        return nullspace(m)
    if mode == "solve":
        if rhs is None:
            raise ValueError("solve mode needs a right-hand side")
        return solve(m, rhs)
    raise ValueError(f"unknown elimination mode {mode!r}")


def is_invertible(m: Matrix) -> bool:
    return m.is_square() and rank(m) == m.rows


def char_poly(m: Matrix) -> list[GQ]:
    """Monic characteristic polynomial, highest degree first.

    Faddeev-LeVerrier recursion; exact because the field has characteristic 0.
    """
    if not m.is_square():
        raise DimensionError("characteristic polynomial of a non-square matrix")
    _require_exact(m)
    n = m.rows
    coeffs = [ONE]
    mk = Matrix.zeros(n)
    ident = Matrix.identity(n)
    c = ONE
    for k in range(1, n + 1):
        mk = m @ mk + ident.scale(c)
        amk = m @ mk
        tr = ZERO
        for i in range(n):
            tr = tr + amk[i, i]
        c = -tr / k
        coeffs.append(c)
    return coeffs


def poly_eval_matrix(coeffs, m: Matrix) -> Matrix:
    """Horner evaluation of a highest-first coefficient list at a matrix."""
    n = m.rows
    acc = Matrix.zeros(n)
    ident = Matrix.identity(n)
    for c in coeffs:
        acc = acc @ m + ident.scale(c)
    return acc
