import pytest
from hypothesis import given
import hypothesis.strategies as st

from cfcsolve.blocks import (BlockSum, Gamma, GammaT, H, HT, J, canonical_block, canonicalize_mu,
                             materialize, shuffle_permutation, tilde_congruence, validate)
from cfcsolve.congruence import cosquare, find_similarity
from cfcsolve.errors import InvalidBlock
from cfcsolve.kernel import GQ, I, Matrix, is_invertible
from cfcsolve.blocks import jordan

from conftest import gaussian_rationals


def _m(rows):
    return Matrix([[GQ(x) if not isinstance(x, GQ) else x for x in r] for r in rows])


def test_validate_examples():
    assert validate(H(2, -1)) is None
    assert validate(H(2, 1)) == "μ = (−1)^{k+1}"
    assert validate(H(4, 0)) == "μ = 0"
    assert validate(H(4, -1)) == "μ = (−1)^{k+1}"
    assert validate(H(4, 1)) is None
    assert validate(J(1)) is None and validate(Gamma(7)) is None


def test_canonicalize_mu_examples():
    assert canonicalize_mu(GQ(1, 0) / 2, 1) == GQ(2)
    assert canonicalize_mu(GQ(-1), 1) == GQ(-1)
    assert canonicalize_mu(I, 1) == I
    assert canonicalize_mu(-I, 1) == I
    with pytest.raises(InvalidBlock):
        canonicalize_mu(GQ(0))


@given(gaussian_rationals().filter(bool))
def test_canonicalize_mu_picks_one_of_pair(mu):
    c = canonicalize_mu(mu)
    assert c in (mu, mu.inverse())
    assert canonicalize_mu(mu.inverse()) == c


def test_materialize_examples():
    assert materialize(GammaT(3)) == _m([[1, 1, 0], [-1, 0, 1], [0, 1, 0]])
    mu = GQ(3)
    assert materialize(HT(4, mu)) == _m([[0, 1, 0, 0], [mu, 0, 1, 0], [0, 0, 0, 1], [0, 0, mu, 0]])
    assert materialize(Gamma(2)) == _m([[0, -1], [1, 1]])


def test_gamma_displays_small_k():
    assert materialize(Gamma(1)) == _m([[1]])
    assert materialize(Gamma(3)) == _m([[0, 0, 1], [0, -1, -1], [1, 1, 0]])
    assert materialize(Gamma(4)) == _m([[0, 0, 0, -1], [0, 0, 1, 1], [0, -1, -1, 0], [1, 1, 0, 0]])


def test_materialize_rejects_invalid():
    with pytest.raises(InvalidBlock):
        materialize(H(2, 1))
    assert materialize(HT(4, -1), allow_noncanonical=True).rows == 4


@pytest.mark.parametrize("k", range(1, 9))
def test_tilde_blocks_are_tridiagonal(k):
    for b in (GammaT(k), HT(2 * k, GQ(2))):
        M = materialize(b)
        n = M.rows
        assert all(not M[i, j] for i in range(n) for j in range(n) if abs(i - j) > 1)


@pytest.mark.parametrize("k", range(1, 9))
def test_gamma_cosquare_similar_to_jordan(k):
    C = cosquare(materialize(Gamma(k)))
    S = find_similarity(C, jordan(k, (-1) ** (k + 1)))
    assert is_invertible(S)
    assert C @ S == S @ jordan(k, (-1) ** (k + 1))


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("mu", [GQ(2), GQ(0, 2), GQ(1, 1)])
def test_h_tilde_congruence_is_shuffle(k, mu):
    P, target = tilde_congruence(H(2 * k, mu))
    assert P == shuffle_permutation(2 * k)
    assert P.T @ materialize(H(2 * k, mu)) @ P == materialize(target)


@pytest.mark.parametrize("k", range(1, 7))
def test_gamma_tilde_congruence_exact(k):
    P, target = tilde_congruence(Gamma(k))
    assert P.is_exact
    assert P.T @ materialize(Gamma(k)) @ P == materialize(GammaT(k))


def test_blocksum_order_and_multiset():
    a = BlockSum.of(J(2), (Gamma(1), 2))
    b = BlockSum.of(Gamma(1), J(2), Gamma(1))
    assert a.flat() != b.flat()
    assert a.congruence_equal(b)
    assert a.size == b.size == 4
    assert BlockSum.of(H(4, GQ(1, 0) / 2)).congruence_equal(BlockSum.of(H(4, 2)))


@given(st.lists(st.integers(1, 5), min_size=1, max_size=5))
def test_materialize_is_direct_sum(sizes):
    s = BlockSum.from_blocks([J(k) for k in sizes])
    M = materialize(s)
    assert M.rows == sum(sizes)
    off = 0
    for k in sizes:
        assert M.submatrix(range(off, off + k), range(off, off + k)) == jordan(k)
        off += k


def test_canonical_block_replaces_mu():
    assert canonical_block(H(6, GQ(1, 0) / 2)) == H(6, 2)
