"""Consistency and explicit solutions of X^T A X = B for symmetric B.

``A`` is described by its canonical form for congruence as a direct sum of
blocks ``J_k(0)``, ``Gamma_k`` and ``H_2k(mu)`` (and their tridiagonal tilde
variants).
"""
__version__ = "0.1.0"
