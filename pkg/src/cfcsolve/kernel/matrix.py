"""Immutable dense matrices over Gaussian rationals (or floating complex)."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import DimensionError
from .scalar import GQ, ONE, ZERO, format_scalar, gq


def _coerce(x):
    if isinstance(x, GQ):
        return x
    if isinstance(x, (float, complex)):
        return complex(x)
    return gq(x)


class Matrix:
    """A ``rows x cols`` matrix stored as a tuple of row tuples.

    Entries are :class:`GQ` (exact) or :class:`complex` (floating).  All
    operations return new matrices.
    """

    __slots__ = ("rows", "cols", "_a")

    def __init__(self, data: Iterable[Iterable] = (), rows: int | None = None,
                 cols: int | None = None):
        a = tuple(tuple(_coerce(x) for x in row) for row in data)
        if rows is None:
            rows = len(a)
        if cols is None:
            cols = len(a[0]) if a else 0
        if len(a) != rows or any(len(r) != cols for r in a):
            raise DimensionError("ragged or mis-sized matrix data")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_a", a)

    @classmethod
    def _wrap(cls, a, rows, cols):
        m = object.__new__(cls)
        object.__setattr__(m, "rows", rows)
        object.__setattr__(m, "cols", cols)
        object.__setattr__(m, "_a", a)
        return m

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Matrix":
        cols = rows if cols is None else cols
        row = (ZERO,) * cols
        return cls._wrap((row,) * rows, rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._wrap(tuple(tuple(ONE if i == j else ZERO for j in range(n))
                               for i in range(n)), n, n)

    @classmethod
    def unit_E(cls, alpha: int, beta: int) -> "Matrix":
        """``alpha x beta`` matrix whose only nonzero is a 1 at (alpha, 1)."""
        if alpha < 1 or beta < 1:
            raise DimensionError("unit_E needs positive dimensions")
        return cls._wrap(tuple(tuple(ONE if (i == alpha - 1 and j == 0) else ZERO
                                     for j in range(beta)) for i in range(alpha)),
                         alpha, beta)

    @classmethod
    def canonical_e(cls, j: int, n: int) -> "Matrix":
        """The j-th canonical column vector of length n (1-based j)."""
        if not 1 <= j <= n:
            raise DimensionError(f"e_{j} out of range for length {n}")
        return cls._wrap(tuple((ONE if i == j - 1 else ZERO,) for i in range(n)), n, 1)

    @classmethod
    def column(cls, values: Sequence) -> "Matrix":
        return cls([[v] for v in values])

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        vals = [_coerce(v) for v in values]
        n = len(vals)
        zero = ZERO if all(isinstance(v, GQ) for v in vals) else 0j
        return cls._wrap(tuple(tuple(vals[i] if i == j else zero for j in range(n))
                               for i in range(n)), n, n)

    @classmethod
    def from_numpy(cls, arr) -> "Matrix":
        arr = np.asarray(arr, dtype=complex)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-d array")
        r, c = arr.shape
        return cls._wrap(tuple(tuple(complex(x) for x in row) for row in arr), r, c)

    # -- access -------------------------------------------------------------
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self._a[i][j]

    def row(self, i: int):
        return self._a[i]

    def col(self, j: int):
        return tuple(r[j] for r in self._a)

    def tolist(self):
        return [list(r) for r in self._a]

    def entries(self):
        """Row-major entry sequence."""
        return [x for r in self._a for x in r]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, GQ) for r in self._a for x in r)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(x for r in self._a for x in r)

    def is_symmetric(self) -> bool:
        return self.is_square() and self == self.T

    # -- algebra ------------------------------------------------------------
    @property
    def T(self) -> "Matrix":
        if not self.rows or not self.cols:
            return Matrix._wrap(tuple(() for _ in range(self.cols)), self.cols, self.rows)
        return Matrix._wrap(tuple(zip(*self._a)), self.cols, self.rows)

    def transpose(self) -> "Matrix":
        return self.T

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Matrix._wrap(tuple(tuple(x + y for x, y in zip(r, s))
                                  for r, s in zip(self._a, other._a)), self.rows, self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        return Matrix._wrap(tuple(tuple(x - y for x, y in zip(r, s))
                                  for r, s in zip(self._a, other._a)), self.rows, self.cols)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(tuple(tuple(-x for x in r) for r in self._a), self.rows, self.cols)

    def scale(self, c) -> "Matrix":
        c = _coerce(c)
        return Matrix._wrap(tuple(tuple(c * x for x in r) for r in self._a), self.rows, self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        n, p = other.rows, other.cols
        zero = ZERO if (self.is_exact and other.is_exact) else 0j
        # sparse rows of the right factor
        bro = [[(j, x) for j, x in enumerate(r) if x] for r in other._a]
        out = []
        for r in self._a:
            acc = [zero] * p
            for k, a in enumerate(r):
                if not a:
                    continue
                for j, b in bro[k]:
                    acc[j] = acc[j] + a * b
            out.append(tuple(acc))
        return Matrix._wrap(tuple(out), self.rows, p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._a == other._a

    def __hash__(self):
        return hash((self.rows, self.cols, self._a))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._wrap(tuple(tuple(self._a[i][j] for j in cols) for i in rows),
                            len(rows), len(cols))

    def columns(self, cols: Sequence[int]) -> "Matrix":
        return self.submatrix(range(self.rows), cols)

    def hstack(self, *others: "Matrix") -> "Matrix":
        ms = (self,) + others
        if any(m.rows != self.rows for m in ms):
            raise DimensionError("hstack needs equal row counts")
        return Matrix._wrap(tuple(sum((m._a[i] for m in ms), ()) for i in range(self.rows)),
                            self.rows, sum(m.cols for m in ms))

    def vstack(self, *others: "Matrix") -> "Matrix":
        ms = (self,) + others
        if any(m.cols != self.cols for m in ms):
            raise DimensionError("vstack needs equal column counts")
        return Matrix._wrap(sum((m._a for m in ms), ()), sum(m.rows for m in ms), self.cols)

    # -- conversion ---------------------------------------------------------
    def to_numpy(self) -> np.ndarray:
        if not self.rows or not self.cols:
            return np.zeros((self.rows, self.cols), dtype=complex)
        return np.array([[complex(x) for x in r] for r in self._a], dtype=complex)

    def to_float(self) -> "Matrix":
        return Matrix._wrap(tuple(tuple(complex(x) for x in r) for r in self._a),
                            self.rows, self.cols)

    def max_abs(self) -> float:
        if not self.rows or not self.cols:
            return 0.0
        return max(abs(complex(x)) for r in self._a for x in r)

    def __repr__(self):
        body = "; ".join(", ".join(format_scalar(x) for x in r) for r in self._a)
        return f"Matrix({self.rows}x{self.cols}: [{body}])"


def direct_sum(*ms: Matrix) -> Matrix:
    """Block diagonal ``A (+) B (+) ...``; zeros elsewhere."""
    ms = [m for m in ms]
    n = sum(m.rows for m in ms)
    p = sum(m.cols for m in ms)
    exact = all(m.is_exact for m in ms)
    zero = ZERO if exact else 0j
    out = []
    off = 0
    for m in ms:
        left = (zero,) * off
        right = (zero,) * (p - off - m.cols)
        for r in m._a:
            out.append(left + r + right)
        off += m.cols
    return Matrix._wrap(tuple(out), n, p)


def matrix_algebra(op: str, *args):
    """Dispatch helper mirroring the operation names of the kernel surface."""
    if op == "mul":
        a, b = args
        return a @ b
    if op == "add":
        a, b = args
        return a + b
    if op == "transpose":
        (a,) = args
        return a.T
    if op == "direct_sum":
        return direct_sum(*args)
    if op == "identity":
        return Matrix.identity(*args)
    if op == "zero":
        return Matrix.zeros(*args)
    if op == "unit_E":
        return Matrix.unit_E(*args)
    if op == "canonical_e":
        return Matrix.canonical_e(*args)
    raise ValueError(f"unknown matrix operation {op!r}")
