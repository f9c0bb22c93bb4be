"""Univariate polynomials over Q(i), coefficient lists highest degree first."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .scalar import GQ, ONE, ZERO, gq


def trim(p):
    i = 0
    while i < len(p) - 1 and not p[i]:
        i += 1
    return list(p[i:]) if p else [ZERO]


def degree(p) -> int:
    p = trim(p)
    return -1 if (len(p) == 1 and not p[0]) else len(p) - 1


def derivative(p):
    p = trim(p)
    n = len(p) - 1
    if n <= 0:
        return [ZERO]
    return [c * (n - i) for i, c in enumerate(p[:-1])]


def evaluate(p, x):
    acc = ZERO
    for c in p:
        acc = acc * x + c
    return acc


def divmod_poly(a, b):
    a, b = trim(a), trim(b)
    if degree(b) < 0:
        raise ZeroDivisionError("polynomial division by zero")
    if degree(a) < degree(b):
        return [ZERO], a
    inv_lead = b[0].inverse()
    rem = list(a)
    q = []
    for i in range(len(a) - len(b) + 1):
        f = rem[i] * inv_lead
        q.append(f)
        if f:
            for j, bj in enumerate(b):
                rem[i + j] = rem[i + j] - f * bj
    return q, trim(rem[len(a) - len(b) + 1:] or [ZERO])


def monic(p):
    p = trim(p)
    inv = p[0].inverse()
    return [c * inv for c in p]


def gcd(a, b):
    a, b = trim(a), trim(b)
    while degree(b) >= 0:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return monic(a) if degree(a) >= 0 else [ZERO]


def _rationalize(x: float, max_den: int):
    return Fraction(x).limit_denominator(max_den)


def exact_roots(p, max_den: int = 10**6):
    """All roots of ``p`` with multiplicities, if every root lies in Q(i).

    The squarefree part is found exactly, its simple roots are located
    numerically, snapped to nearby Gaussian rationals and confirmed by exact
    evaluation.  Returns ``None`` when some root cannot be confirmed.
    """
    p = monic(p)
    if degree(p) == 0:
        return []
    g = gcd(p, derivative(p))
    sqfree, _ = divmod_poly(p, g)
    sqfree = monic(sqfree)
    d = degree(sqfree)
    if d == 1:
        cands = [-sqfree[1]]
    else:
        approx = np.roots([complex(c) for c in sqfree])
        cands = []
        for z in approx:
            for den in (max_den, 10**3, 10**9):
                c = GQ(_rationalize(z.real, den), _rationalize(z.imag, den))
                if not evaluate(sqfree, c):
                    cands.append(c)
                    break
            else:
                return None
    roots = []
    rem = p
    for c in dict.fromkeys(cands):
        lin = [ONE, -c]
        mult = 0
        while True:
            q, r = divmod_poly(rem, lin)
            if degree(r) >= 0:
                break
            rem, mult = q, mult + 1
        if mult == 0:
            return None
        roots.append((c, mult))
    if degree(rem) != 0:
        return None
    return roots


__all__ = ["trim", "degree", "derivative", "evaluate", "divmod_poly", "monic",
           "gcd", "exact_roots", "gq"]
