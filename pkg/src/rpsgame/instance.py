"""RPS instances, coalitions, payment vectors and the characteristic function.

Players are numbered 1..n everywhere in the public API. A coalition is also
representable as a bitmask where player ``i`` occupies bit ``i - 1``; the
exhaustive routines work on masks internally.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import (
    BadPlayerCount,
    DuplicateMember,
    EmptyCoalition,
    EmptySet,
    NonPositiveWeight,
    OutOfRange,
    Overflow,
    TooLarge,
    ValidationError,
)

INT64_MAX = 2**63 - 1
DEFAULT_MAX_N = 20


def enumeration_limit(max_n: int | None = None) -> int:
    """Largest n for which 2^n enumeration is allowed.

    An explicit ``max_n`` wins, then the ``RPS_MAX_N`` environment variable,
    then the default of 20.
    """
    if max_n is not None:
        return max_n
    env = os.environ.get("RPS_MAX_N")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"RPS_MAX_N must be an integer, got {env!r}") from None
    return DEFAULT_MAX_N


def check_enumerable(n: int, max_n: int | None = None) -> None:
    limit = enumeration_limit(max_n)
    if n > limit:
        raise TooLarge(f"{n} players exceeds the enumeration limit of {limit}")


class Coalition(frozenset):
    """A set of 1-based player indices."""

    @classmethod
    def from_mask(cls, mask: int) -> "Coalition":
        members = []
        i = 1
        while mask:
            if mask & 1:
                members.append(i)
            mask >>= 1
            i += 1
        return cls(members)

    @classmethod
    def parse(cls, text: str) -> "Coalition":
        """Parse a comma-separated list such as ``"1,3"``; ``""`` is the empty coalition."""
        text = text.strip()
        if not text:
            return cls()
        members = [int(tok) for tok in text.split(",")]
        if len(set(members)) != len(members):
            raise DuplicateMember(f"coalition {text!r} lists a player twice")
        return cls(members)

    @property
    def mask(self) -> int:
        m = 0
        for i in self:
            m |= 1 << (i - 1)
        return m

    def complement(self, n: int) -> "Coalition":
        return Coalition(i for i in range(1, n + 1) if i not in self)

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self))

    def __or__(self, other):
        return Coalition(frozenset.__or__(self, other))

    def __and__(self, other):
        return Coalition(frozenset.__and__(self, other))

    def __sub__(self, other):
        return Coalition(frozenset.__sub__(self, other))

    def __repr__(self):
        return "Coalition({" + ", ".join(map(str, self.sorted())) + "})"


def grand_coalition(n: int) -> Coalition:
    return Coalition(range(1, n + 1))


def iter_coalitions(n: int) -> Iterator[Coalition]:
    """All 2^n coalitions, in bitmask order."""
    for mask in range(1 << n):
        yield Coalition.from_mask(mask)


def mask_members(mask: int) -> tuple[int, ...]:
    return Coalition.from_mask(mask).sorted()


def lex_smallest(masks: Iterable[int]) -> int:
    """The mask whose sorted member tuple is lexicographically smallest."""
    return min(masks, key=mask_members)


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use int, Fraction or 'p/q'")
    return Fraction(x)


def format_fraction(x: Fraction) -> str:
    """``"3"`` for integers, ``"-1/2"`` otherwise."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class WeightedSet:
    members: frozenset
    value: int

    @cached_property
    def mask(self) -> int:
        return Coalition(self.members).mask

    def __len__(self):
        return len(self.members)


def _make_sets(n: int, raw, label: str) -> tuple[WeightedSet, ...]:
    out = []
    for idx, item in enumerate(raw, start=1):
        if isinstance(item, WeightedSet):
            members, value = item.members, item.value
        else:
            try:
                members, value = item
            except (TypeError, ValueError):
                raise ValidationError(f"{label} {idx}: expected a (set, value) pair") from None
        members_list = list(members)
        if not all(isinstance(m, (int, np.integer)) and not isinstance(m, bool) for m in members_list):
            raise ValidationError(f"{label} {idx}: members must be integers")
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
            raise ValidationError(f"{label} {idx}: value must be an integer")
        if len(set(members_list)) != len(members_list):
            raise DuplicateMember(f"{label} {idx} lists a player twice")
        if not members_list:
            raise EmptySet(f"{label} {idx} is empty")
        for m in members_list:
            if m < 1 or m > n:
                raise OutOfRange(f"{label} {idx}: player {m} is outside 1..{n}")
        if value < 1:
            raise NonPositiveWeight(f"{label} {idx}: value {value} is not positive")
        out.append(WeightedSet(frozenset(int(m) for m in members_list), int(value)))
    return tuple(out)


@dataclass(frozen=True)
class RpsInstance:
    """A reward-penalty-selection game.

    ``rewards`` and ``penalties`` accept ``(members, value)`` pairs and are
    normalized to tuples of :class:`WeightedSet`. Construction validates.
    """

    n: int
    rewards: tuple = ()
    penalties: tuple = ()

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool) or self.n < 1:
            raise BadPlayerCount(f"player count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "rewards", _make_sets(self.n, self.rewards, "reward set"))
        object.__setattr__(self, "penalties", _make_sets(self.n, self.penalties, "penalty set"))
        if self.total_reward + self.total_penalty > INT64_MAX:
            raise Overflow("total reward plus total penalty exceeds the signed 64-bit range")

    @cached_property
    def total_reward(self) -> int:
        return sum(r.value for r in self.rewards)

    @cached_property
    def total_penalty(self) -> int:
        return sum(b.value for b in self.penalties)

    @cached_property
    def reward_masks(self) -> tuple[int, ...]:
        return tuple(r.mask for r in self.rewards)

    @cached_property
    def penalty_masks(self) -> tuple[int, ...]:
        return tuple(b.mask for b in self.penalties)

    def value_of_mask(self, mask: int) -> int:
        total = 0
        for m, r in zip(self.reward_masks, self.rewards):
            if mask & m == m:
                total += r.value
        for m, b in zip(self.penalty_masks, self.penalties):
            if mask & m:
                total -= b.value
        return total

    def to_dict(self) -> dict:
        return {
            "players": self.n,
            "rewards": [{"set": sorted(r.members), "value": r.value} for r in self.rewards],
            "penalties": [{"set": sorted(b.members), "value": b.value} for b in self.penalties],
        }

    def is_singleton_instance(self) -> bool:
        return all(len(s) == 1 for s in self.rewards + self.penalties)


def validate(raw: Mapping) -> RpsInstance:
    """Build a checked :class:`RpsInstance` from the JSON instance format."""
    if not isinstance(raw, Mapping):
        raise ValidationError("instance must be a JSON object")
    unknown = set(raw) - {"players", "rewards", "penalties"}
    if unknown:
        raise ValidationError(f"unknown keys: {sorted(unknown)}")
    if "players" not in raw:
        raise ValidationError("missing key 'players'")
    n = raw["players"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise BadPlayerCount(f"'players' must be a positive integer, got {n!r}")

    def entries(key):
        items = raw.get(key, [])
        if not isinstance(items, list):
            raise ValidationError(f"'{key}' must be a list")
        out = []
        for item in items:
            if not isinstance(item, Mapping) or set(item) != {"set", "value"}:
                raise ValidationError(f"each entry of '{key}' needs exactly the keys 'set' and 'value'")
            if not isinstance(item["set"], list):
                raise ValidationError(f"'{key}' entry 'set' must be a list")
            out.append((item["set"], item["value"]))
        return out

    return RpsInstance(n, entries("rewards"), entries("penalties"))


def _coalition_mask(inst_n: int, S) -> int:
    if isinstance(S, (int, np.integer)) and not isinstance(S, bool):
        raise TypeError("pass a coalition as a set of players, not an integer")
    mask = 0
    for i in S:
        if i < 1 or i > inst_n:
            raise OutOfRange(f"player {i} is outside 1..{inst_n}")
        mask |= 1 << (i - 1)
    return mask


def char_value(inst: RpsInstance, S: Iterable[int]) -> int:
    """Rewards of the sets covered by ``S`` minus penalties of the sets it hits."""
    return inst.value_of_mask(_coalition_mask(inst.n, S))


def grand_value(inst: RpsInstance) -> int:
    return inst.total_reward - inst.total_penalty


def values_array(inst: RpsInstance, max_n: int | None = None) -> np.ndarray:
    """``v`` on every coalition as an int64 array indexed by bitmask."""
    check_enumerable(inst.n, max_n)
    masks = np.arange(1 << inst.n, dtype=np.int64)
    vals = np.zeros(1 << inst.n, dtype=np.int64)
    for m, r in zip(inst.reward_masks, inst.rewards):
        vals += r.value * ((masks & m) == m)
    for m, b in zip(inst.penalty_masks, inst.penalties):
        vals -= b.value * ((masks & m) != 0)
    return vals


def subgame(inst: RpsInstance, S: Iterable[int]) -> RpsInstance:
    """Restrict the game to the players of ``S``.

    Reward sets inside ``S`` survive unchanged, penalty sets are intersected
    with ``S`` and dropped when the intersection is empty. The result is
    relabelled: its player ``j`` is the ``j``-th smallest member of ``S``.
    """
    members = sorted(set(S))
    if not members:
        raise EmptyCoalition("subgame needs a non-empty coalition")
    _coalition_mask(inst.n, members)
    relabel = {old: new for new, old in enumerate(members, start=1)}
    keep = set(members)
    rewards = [
        ([relabel[i] for i in r.members], r.value) for r in inst.rewards if r.members <= keep
    ]
    penalties = [
        ([relabel[i] for i in b.members & keep], b.value) for b in inst.penalties if b.members & keep
    ]
    return RpsInstance(len(members), rewards, penalties)


def scale_instance(inst: RpsInstance, factor: int) -> RpsInstance:
    """Multiply every weight by a positive integer; the game value scales alike."""
    if factor < 1:
        raise ValidationError("scale factor must be a positive integer")
    return RpsInstance(
        inst.n,
        [(r.members, r.value * factor) for r in inst.rewards],
        [(b.members, b.value * factor) for b in inst.penalties],
    )


@dataclass(frozen=True)
class PaymentVector:
    """One exact rational payment per player (index 0 holds player 1)."""

    payments: tuple

    def __post_init__(self):
        object.__setattr__(self, "payments", tuple(_as_fraction(x) for x in self.payments))

    @classmethod
    def parse(cls, text: str) -> "PaymentVector":
        """Parse ``"1,-1/2,3"``."""
        text = text.strip()
        if not text:
            return cls(())
        try:
            return cls(tuple(Fraction(tok.strip()) for tok in text.split(",")))
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"cannot parse payment vector {text!r}") from None

    def __len__(self):
        return len(self.payments)

    def __iter__(self):
        return iter(self.payments)

    def __getitem__(self, k):
        return self.payments[k]

    def total(self) -> Fraction:
        return sum(self.payments, Fraction(0))

    def coalition_sum(self, S: Iterable[int]) -> Fraction:
        return sum((self.payments[i - 1] for i in S), Fraction(0))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.payments)

    def common_denominator(self) -> int:
        return math.lcm(1, *(x.denominator for x in self.payments))

    def scaled(self, factor) -> "PaymentVector":
        return PaymentVector(tuple(x * factor for x in self.payments))

    def to_strings(self) -> list[str]:
        return [format_fraction(x) for x in self.payments]

    def __repr__(self):
        return "PaymentVector(" + ", ".join(self.to_strings()) + ")"


@dataclass(frozen=True)
class GameTable:
    """Explicit characteristic function, ``values[mask]`` for every coalition."""

    n: int
    values: tuple = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise BadPlayerCount(f"player count must be a positive integer, got {self.n!r}")
        vals = tuple(_as_fraction(x) for x in self.values)
        if len(vals) != 1 << self.n:
            raise ValidationError(f"a {self.n}-player table needs {1 << self.n} entries, got {len(vals)}")
        if vals[0] != 0:
            raise ValidationError("the empty coalition must have value 0")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, n: int, fn, max_n: int | None = None) -> "GameTable":
        """Tabulate ``fn(coalition)`` over all coalitions."""
        check_enumerable(n, max_n)
        return cls(n, tuple(fn(c) for c in iter_coalitions(n)))

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping) -> "GameTable":
        vals = [None] * (1 << n)
        for key, value in mapping.items():
            vals[_coalition_mask(n, key)] = value
        missing = [mask_members(m) for m, v in enumerate(vals) if v is None]
        if missing:
            raise ValidationError(f"table is missing coalitions {missing[:5]}")
        return cls(n, tuple(vals))

    def __call__(self, S: Iterable[int]) -> Fraction:
        return self.values[_coalition_mask(self.n, S)]

    def value(self, S: Iterable[int]) -> Fraction:
        return self(S)

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.values)

    def integer_array(self) -> tuple[np.ndarray, int]:
        """Values scaled to integers, together with the scale factor."""
        scale = math.lcm(1, *(v.denominator for v in self.values))
        ints = [int(v * scale) for v in self.values]
        dtype = np.int64 if max(map(abs, ints)) < 2**61 else object
        return np.array(ints, dtype=dtype), scale

    def to_dict(self) -> dict:
        return {
            "players": self.n,
            "values": {
                ",".join(map(str, mask_members(m))): format_fraction(v) for m, v in enumerate(self.values)
            },
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "GameTable":
        if not isinstance(raw, Mapping) or set(raw) != {"players", "values"}:
            raise ValidationError("a game table needs exactly the keys 'players' and 'values'")
        n = raw["players"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise BadPlayerCount(f"'players' must be a positive integer, got {n!r}")
        if not isinstance(raw["values"], Mapping):
            raise ValidationError("'values' must be an object")
        mapping = {}
        for key, value in raw["values"].items():
            try:
                coalition = Coalition.parse(key)
                mapping[coalition] = Fraction(value) if isinstance(value, str) else value
            except (ValueError, ZeroDivisionError):
                raise ValidationError(f"bad table entry {key!r}: {value!r}") from None
            if isinstance(mapping[coalition], float):
                raise ValidationError(f"table value for {key!r} must be an integer or 'p/q' string")
        if len(mapping) != len(raw["values"]):
            raise ValidationError("table lists a coalition twice")
        return cls.from_mapping(n, mapping)


def game_table(inst: RpsInstance, max_n: int | None = None) -> GameTable:
    return GameTable(inst.n, tuple(int(v) for v in values_array(inst, max_n)))
