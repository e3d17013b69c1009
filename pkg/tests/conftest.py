import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from towers.complexes import concentrated
from towers.exactlin import Matrix
from towers.quiverrep import projective, simple
from towers.sampling import a2, a3, random_complex, random_map

settings.register_profile(
    "towers", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("towers")


def matrices(p=2, max_side=4, rows=None, cols=None):
    @st.composite
    def build(draw):
        r = rows if rows is not None else draw(st.integers(0, max_side))
        c = cols if cols is not None else draw(st.integers(0, max_side))
        vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
        return Matrix(np.array(vals, dtype=np.int64).reshape(r, c), p)
    return build()


seeds = st.integers(0, 2**32 - 1)


@st.composite
def complexes(draw, quivers=(a2, a3), max_total=4):
    rng = np.random.default_rng(draw(seeds))
    q = draw(st.sampled_from(quivers))()
    return random_complex(rng, q, max_total)


@st.composite
def chain_maps(draw, quivers=(a2, a3)):
    rng = np.random.default_rng(draw(seeds))
    q = draw(st.sampled_from(quivers))()
    return random_map(rng, q)


@pytest.fixture(scope="session")
def A2():
    """P1, P2, S1, S2 on 0 -> 1 as complexes in degree 0."""
    q = a2()
    return {
        "q": q,
        "P1": concentrated(projective(q, 0)),
        "P2": concentrated(projective(q, 1)),
        "S1": concentrated(simple(q, 0)),
        "S2": concentrated(simple(q, 1)),
    }
