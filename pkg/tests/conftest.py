import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from tardysched.core import Instance
from tardysched.generator import FAMILIES, DatasetSpec, generate

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("default")


def make(rows, **meta):
    """Instance from (w, p, d, dd) tuples."""
    w, p, d, dd = (list(c) for c in zip(*rows))
    return Instance(w, p, d, dd, meta=meta)


@st.composite
def integer_instances(draw, min_n=1, max_n=8):
    """Small integer-valued EDF-feasible instances; ties between parameters are common."""
    n = draw(st.integers(min_n, max_n))
    w = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    p = draw(st.lists(st.integers(1, 10), min_size=n, max_size=n))
    d = [pj + draw(st.integers(0, 25)) for pj in p]
    dd = np.array([dj + draw(st.integers(0, 25)) for dj in d], dtype=float)
    # raise deadlines to the EDF prefix sums; this keeps EDF order and makes it feasible
    order = np.lexsort((np.arange(n), dd))
    prefix = np.cumsum(np.asarray(p, dtype=float)[order])
    dd[order] = np.maximum(dd[order], prefix)
    return Instance(w, p, d, dd)


@st.composite
def generated_instances(draw, min_n=1, max_n=12, families=FAMILIES):
    family = draw(st.sampled_from(families))
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**31))
    return generate(DatasetSpec(family, n, seed))


def instances(min_n=1, max_n=10):
    return st.one_of(integer_instances(min_n, max_n), generated_instances(min_n, max_n))


def labels_for(n):
    return st.lists(st.booleans(), min_size=n, max_size=n).map(np.array)
