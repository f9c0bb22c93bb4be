import random

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from cfcsolve.blocks import BlockSum, Gamma, GammaT, H, HT, J, materialize
from cfcsolve.errors import DimensionError, UnpairedH4Error, UnsupportedAbsorption
from cfcsolve.invariants import tau_upsilon
from cfcsolve.io_formats import parse_blocksum
from cfcsolve.kernel import GQ, Matrix
from cfcsolve.reduction import (ABSORPTIONS, G1, H2M, Law, TransformationChain, absorb_type0,
                                absorb_typeI, absorb_typeII, addition, elimination,
                                gamma_tilde2_drop, j1_law, law_combinators, lemma_j3,
                                make_step, permutation, reduce, step_residual, transitivity,
                                typeII_case)
from cfcsolve.sampling import random_blocksum

from conftest import block_sums

LEMMA_MUS = (GQ(2), GQ(1, 0) / 2, GQ(0, 2))


def _exact_zero(step):
    assert step.X.is_exact
    assert step_residual(step.source, step.X, step.target).is_zero()


def _invariant(step):
    assert tau_upsilon(step.source) == tau_upsilon(step.target)


@pytest.mark.parametrize("k", [2, 4, 5, 6, 7, 8])
def test_type0_absorption(k):
    step = absorb_type0(k)
    _exact_zero(step)
    _invariant(step)


def test_type0_rejects_j3():
    with pytest.raises(UnsupportedAbsorption):
        absorb_type0(3)


def test_lemma_j3_matrix():
    step = lemma_j3()
    _exact_zero(step)
    assert step.X == Matrix([[GQ(1), GQ(0)], [GQ(1), GQ(0, 1)], [GQ(0), GQ(0, -1)]])
    assert (tau_upsilon(step.source).tau, tau_upsilon(step.source).upsilon) == (2, 2)


@pytest.mark.parametrize("k", range(3, 9))
def test_typeI_absorption(k):
    step = absorb_typeI(k)
    _exact_zero(step)
    _invariant(step)


def test_typeI_rejects_small():
    with pytest.raises(UnsupportedAbsorption):
        absorb_typeI(2)


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("mu", LEMMA_MUS)
def test_typeII_case_i(k, mu):
    (step,) = absorb_typeII(HT(2 * k, mu))
    assert step.justification == Law.LEMMA_H_I
    _exact_zero(step)
    _invariant(step)


@pytest.mark.parametrize("k", range(1, 5))
def test_typeII_case_ii(k):
    first, second = absorb_typeII(HT(4 * k + 2, -1))
    assert first.justification == Law.LEMMA_H_II
    _exact_zero(first)
    _invariant(first)
    assert second.residual <= 1e-9
    chain = TransformationChain(first.source).extend([first, second])
    assert chain.verify() <= 1e-9


@pytest.mark.parametrize("k", range(2, 5))
def test_typeII_case_iii(k):
    first, second = absorb_typeII(HT(4 * k, 1))
    assert first.justification == Law.LEMMA_H_III
    _exact_zero(first)
    _invariant(first)
    assert second.residual <= 1e-9


def test_typeII_rejects_unit_mu_mismatch():
    with pytest.raises(UnsupportedAbsorption):
        typeII_case(HT(4, -1))
    with pytest.raises(UnsupportedAbsorption):
        typeII_case(HT(6, 1))


def test_gamma_tilde2_drop():
    step = gamma_tilde2_drop()
    _exact_zero(step)


def test_elimination_example():
    s = BlockSum.of(Gamma(1), H(2, -1))
    step = elimination(s, [0])
    assert step.X == Matrix([[GQ(1)], [GQ(0)], [GQ(0)]])
    assert str(step.target) == "G1"


def test_j1_law_example():
    step = j1_law(BlockSum.of(J(1), Gamma(1)))
    assert step.X == Matrix([[GQ(0)], [GQ(1)]])
    assert step.justification == Law.J1


def test_permutation_and_addition():
    s = BlockSum.of(J(2), H(2, -1), Gamma(3))
    p = permutation(s, [2, 0, 1])
    assert str(p.target) == "G3 + J2 + H2(-1)"
    a = addition([absorb_type0(2), lemma_j3()])
    assert str(a.source) == "J2 + H2(-1) + J3"
    assert a.target.congruence_equal(parse_blocksum("G1*4"))
    _exact_zero(a)
    t = transitivity([p, elimination(p.target, [0])])
    assert str(t.target) == "G3"
    assert law_combinators("Elimination", s, [2]).target == t.target


def test_make_step_checks_shapes():
    with pytest.raises(DimensionError):
        make_step(BlockSum.of(J(2)), BlockSum.of(G1), Matrix.identity(2), Law.ELIMINATION)


def test_step_json_keys():
    js = absorb_type0(2).to_json()
    assert set(js) == {"source", "target", "justification", "X", "residual", "mode"}
    assert js["justification"] == "LemmaJ"


@pytest.mark.parametrize("text,case,end,steps", [
    ("J2 + H2(-1)", "C0", "G1*2", 1),
    ("H2(-1)*2", "C1", "H2(-1)*2", 0),
    ("G3~ + H2(-1)*2", "C1", "G1*3 + H2(-1)", 1),
])
def test_reduce_examples(text, case, end, steps):
    res = reduce(parse_blocksum(text))
    assert res.case == case
    assert res.end_state.congruence_equal(parse_blocksum(end))
    n_abs = sum(res.chain.count(law) for law in ABSORPTIONS)
    assert n_abs == steps
    assert res.chain.verify() <= 1e-9


def test_reduce_h4_pairing():
    with pytest.raises(UnpairedH4Error):
        reduce(parse_blocksum("H4(1) + H2(-1)"))
    res = reduce(parse_blocksum("H4(1) + H2(-1)"), pair_h4=True)
    assert res.case == "C0"
    assert res.end_state.congruence_equal(parse_blocksum("G1*4"))


def test_reduce_j1_dropped():
    res = reduce(parse_blocksum("J1*3 + G2"))
    assert res.chain.count(Law.J1) == 1
    assert all(b.family != "J" for b in res.end_state.flat())


@settings(max_examples=60)
@given(block_sums(max_n=20, max_block=6))
def test_reduce_preserves_invariants(s):
    res = reduce(s)
    assert res.chain.verify() <= 1e-9
    inv0 = tau_upsilon(s)
    inv1 = tau_upsilon(res.end_state)
    assert inv1.min_bound == inv0.min_bound
    for step in res.chain.steps:
        if step.justification in ABSORPTIONS:
            assert tau_upsilon(step.source) == tau_upsilon(step.target)
    n_h2 = res.end_state.count(lambda b: b.is_h2_minus())
    assert res.case == ("C1" if n_h2 else "C0")


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_reduce_order_independent_end_invariants(seed):
    rng = random.Random(seed)
    s = random_blocksum(rng, max_n=18, max_block=6)
    blocks = s.flat()
    rng.shuffle(blocks)
    r1, r2 = reduce(s), reduce(BlockSum.from_blocks(blocks))
    assert r1.case == r2.case
    assert tau_upsilon(r1.end_state) == tau_upsilon(r2.end_state)
