"""Hypothesis strategies for RPS instances."""
from hypothesis import strategies as st

from rpsgame import RpsInstance


@st.composite
def instances(draw, max_n=8, max_sets=6, max_weight=20, min_n=1, singleton=False):
    n = draw(st.integers(min_n, max_n))
    if singleton:
        members = st.integers(1, n).map(lambda i: [i])
    else:
        members = st.sets(st.integers(1, n), min_size=1).map(sorted)
    weighted = st.tuples(members, st.integers(1, max_weight))
    rewards = draw(st.lists(weighted, max_size=max_sets))
    penalties = draw(st.lists(weighted, max_size=max_sets))
    return RpsInstance(n, rewards, penalties)
