"""Shared table builders and hypothesis strategies."""

import itertools

import numpy as np
from hypothesis import strategies as st

from pi_forge.jpd import JointTable, VariableSpec, binary_vars

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def chain_table(p1=0.5, p_stay12=0.9, p_stay23=0.8) -> JointTable:
    """Binary chain X1 -> X2 -> X3 with strong dependence."""
    probs = []
    for a, b, c in itertools.product((0, 1), repeat=3):
        pa = p1 if a == 0 else 1 - p1
        pb = p_stay12 if b == a else 1 - p_stay12
        pc = p_stay23 if c == b else 1 - p_stay23
        probs.append(pa * pb * pc)
    return JointTable(binary_vars(3), probs)


def product_table(marginals) -> JointTable:
    """Independent binary variables with P(Xi=0) = marginals[i]."""
    arr = np.ones(())
    for p in marginals:
        arr = np.multiply.outer(arr, np.array([p, 1 - p]))
    return JointTable(binary_vars(len(marginals)), arr.reshape(-1))


@st.composite
def tables(draw, min_vars=1, max_vars=4, max_card=3, allow_zeros=True):
    n = draw(st.integers(min_vars, max_vars))
    cards = [draw(st.integers(2, max_card)) for _ in range(n)]
    size = int(np.prod(cards))
    lo = 0 if allow_zeros else 1
    weights = draw(st.lists(st.integers(lo, 20), min_size=size, max_size=size).filter(lambda w: sum(w) > 0))
    w = np.array(weights, dtype=float)
    variables = [VariableSpec(f"V{i}", c) for i, c in enumerate(cards)]
    return JointTable(variables, w / w.sum())
