import random

import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from cfcsolve.kernel import GQ, Matrix
from cfcsolve.sampling import random_blocksum

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def gaussian_rationals(draw, max_num=9, max_den=5):
    re = draw(st.fractions(min_value=-max_num, max_value=max_num, max_denominator=max_den))
    im = draw(st.fractions(min_value=-max_num, max_value=max_num, max_denominator=max_den))
    return GQ(re, im)


@st.composite
def exact_matrices(draw, rows=None, cols=None, max_dim=5, entries=None):
    r = rows if rows is not None else draw(st.integers(1, max_dim))
    c = cols if cols is not None else draw(st.integers(1, max_dim))
    ent = entries or gaussian_rationals(max_num=5, max_den=3)
    return Matrix([[draw(ent) for _ in range(c)] for _ in range(r)])


@st.composite
def block_sums(draw, max_n=24, max_block=6, allow_h4=False):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_blocksum(random.Random(seed), max_n, max_block, allow_h4)
