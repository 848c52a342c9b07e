"""Exhaustive game-theoretic checks and constructions on explicit tables."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    IntegralityRequired,
    NegativeResidual,
    NonZeroSingletons,
    NotConvex,
    NotThreePlayers,
    RpsError,
)
from .instance import (
    Coalition,
    GameTable,
    RpsInstance,
    char_value,
    check_enumerable,
    lex_smallest,
    values_array,
)

_BLOCK = 1 << 20


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of an exhaustive pairwise check; falsy when a pair violates it."""

    holds: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        if self.holds:
            return {"holds": True}
        S, T = self.witness
        return {"holds": False, "counterexample": [S.sorted(), T.sorted()]}


def _first_violation(g: GameTable, max_n, violated) -> PropertyCheck:
    # Scans pairs (S, T) row-major over bitmasks, in blocks of rows.
    check_enumerable(g.n, max_n)
    v, _ = g.integer_array()
    size = 1 << g.n
    masks = np.arange(size, dtype=np.int64)
    rows = max(1, _BLOCK // size)
    for start in range(0, size, rows):
        S = masks[start : start + rows, None]
        bad = np.asarray(violated(v, S, masks[None, :]), dtype=bool)
        if bad.any():
            flat = int(np.argmax(bad))
            s_mask = start + flat // size
            t_mask = flat % size
            return PropertyCheck(False, (Coalition.from_mask(s_mask), Coalition.from_mask(t_mask)))
    return PropertyCheck(True)


def is_convex(g: GameTable, max_n: int | None = None) -> PropertyCheck:
    """``v(S) + v(T) <= v(S | T) + v(S & T)`` for every ordered pair of coalitions."""
    return _first_violation(g, max_n, lambda v, S, T: v[S] + v[T] > v[S | T] + v[S & T])


def is_superadditive(g: GameTable, max_n: int | None = None) -> PropertyCheck:
    """``v(S | T) >= v(S) + v(T)`` for every ordered pair of disjoint coalitions."""
    return _first_violation(g, max_n, lambda v, S, T: ((S & T) == 0) & (v[S] + v[T] > v[S | T]))


def _integral(x: Fraction) -> int:
    if x.denominator != 1:
        raise IntegralityRequired(f"value {x} is not an integer")
    return x.numerator


def _embed_zero_singletons(g: GameTable) -> tuple[list, list]:
    v = g
    if any(v({k}) != 0 for k in (1, 2, 3)):
        raise NonZeroSingletons("singleton values must be zero")
    pair = {(1, 2): _integral(v({1, 2})), (2, 3): _integral(v({2, 3})), (1, 3): _integral(v({1, 3}))}
    d = min(pair.values())
    rewards = [([1], d), ([2], d), ([3], d)]
    rewards += [(list(members), val - d) for members, val in pair.items()]
    b = d
    # Residual on the grand coalition: v(N) = sum of all rewards - b.
    residual = _integral(v({1, 2, 3})) - sum(a for _, a in rewards) + b
    if residual < 0:
        raise NegativeResidual(f"grand-coalition reward would be {residual}")
    rewards.append(([1, 2, 3], residual))
    penalties = [([1, 2, 3], b)]
    return rewards, penalties


def embed_three_player(g: GameTable, max_n: int | None = None) -> RpsInstance:
    """RPS instance whose characteristic function equals the convex 3-player game ``g``.

    Non-zero singleton values are first moved into singleton reward or
    penalty sets; the zero-singleton remainder is built from a grand-coalition
    penalty, singleton and pair rewards, and one grand-coalition reward.
    Zero-weight sets are dropped.
    """
    if g.n != 3:
        raise NotThreePlayers(f"expected a 3-player game, got {g.n} players")
    if not g.is_integral():
        raise IntegralityRequired("all table values must be integers")
    check = is_convex(g, max_n)
    if not check:
        raise NotConvex(f"game is not convex: {check.witness}", check)

    single = {k: _integral(g({k})) for k in (1, 2, 3)}
    shifted = GameTable(3, tuple(g.values[m] - sum(single[k] for k in Coalition.from_mask(m)) for m in range(8)))
    rewards, penalties = _embed_zero_singletons(shifted)
    for k, val in single.items():
        if val > 0:
            rewards.append(([k], val))
        elif val < 0:
            penalties.append(([k], -val))

    inst = RpsInstance(
        3,
        [(m, a) for m, a in rewards if a != 0],
        [(m, b) for m, b in penalties if b != 0],
    )
    for mask in range(8):
        S = Coalition.from_mask(mask)
        if char_value(inst, S) != g(S):
            raise RpsError(f"embedding disagrees with the table on {S}")
    return inst


def rpsp_solve(inst: RpsInstance, max_n: int | None = None) -> tuple[Coalition, int]:
    """Brute-force maximizer of the profit function over all element subsets.

    Ties go to the lexicographically smallest coalition.
    """
    vals = values_array(inst, max_n)
    best = vals.max()
    mask = lex_smallest(int(m) for m in np.flatnonzero(vals == best))
    return Coalition.from_mask(mask), int(best)


def four_player_convex_fixture() -> GameTable:
    """Convex 4-player game worth 0 up to size 2, 1 at size 3 and 2 for all.

    It is convex but cannot be written as an RPS game.
    """
    return GameTable.from_function(4, lambda S: {0: 0, 1: 0, 2: 0, 3: 1, 4: 2}[len(S)])
