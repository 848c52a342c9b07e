"""Shapley values: the linear-time closed form and exhaustive oracles."""
from __future__ import annotations

from fractions import Fraction
from math import factorial

import numpy as np

from .instance import GameTable, PaymentVector, RpsInstance, check_enumerable, values_array


def shapley_closed_form(inst: RpsInstance) -> PaymentVector:
    """Each member of a reward set gets an equal share of its reward, and
    each member of a penalty set bears an equal share of its penalty.

    Runs in time linear in the total size of all sets.
    """
    phi = [Fraction(0)] * inst.n
    for r in inst.rewards:
        share = Fraction(r.value, len(r.members))
        for k in r.members:
            phi[k - 1] += share
    for b in inst.penalties:
        share = Fraction(b.value, len(b.members))
        for k in b.members:
            phi[k - 1] -= share
    return PaymentVector(tuple(phi))


def _shapley_from_array(n: int, values: np.ndarray, scale: int = 1) -> PaymentVector:
    # Marginal contributions are summed per coalition size in numpy, then
    # weighted with exact integer factorials.
    if values.dtype != object and int(np.abs(values).max(initial=0)) << n >= 2**62:
        values = values.astype(object)
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        sizes += (masks >> i) & 1
    n_fact = factorial(n)
    weights = [factorial(s) * factorial(n - s - 1) for s in range(n)]
    phi = []
    for k in range(n):
        bit = 1 << k
        without = masks[(masks & bit) == 0]
        marginal = values[without | bit] - values[without]
        total = 0
        s_sizes = sizes[without]
        for s in range(n):
            sel = marginal[s_sizes == s]
            if len(sel):
                total += weights[s] * int(sel.sum())
        phi.append(Fraction(total, n_fact * scale))
    return PaymentVector(tuple(phi))


def shapley_oracle(inst: RpsInstance, max_n: int | None = None) -> PaymentVector:
    """Shapley value by exact enumeration of all coalitions (subset-weighted form)."""
    check_enumerable(inst.n, max_n)
    return _shapley_from_array(inst.n, values_array(inst, max_n))


def shapley_table_oracle(g: GameTable, max_n: int | None = None) -> PaymentVector:
    """Exact Shapley value of an arbitrary game table."""
    check_enumerable(g.n, max_n)
    values, scale = g.integer_array()
    return _shapley_from_array(g.n, values, scale)
