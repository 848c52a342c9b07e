import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from rpsgame import (
    GameTable,
    RpsInstance,
    four_player_convex_fixture,
    game_table,
    grand_value,
    is_core,
    shapley_closed_form,
    shapley_oracle,
    shapley_table_oracle,
)
from rpsgame.errors import TooLarge

from oracles import brute_value, permutation_shapley, plain
from strategies import instances

F = Fraction


@pytest.mark.parametrize(
    "inst, expected",
    [
        (RpsInstance(2, [([1, 2], 2)]), (1, 1)),
        (RpsInstance(1, [([1], 5)], [([1], 3)]), (2,)),
        # Frozen from the permutation oracle.
        (RpsInstance(3, [([1, 2], 3)], [([1, 2, 3], 3)]), (F(1, 2), F(1, 2), -1)),
        (RpsInstance(3), (0, 0, 0)),
    ],
)
def test_closed_form_and_oracle_examples(inst, expected):
    assert shapley_closed_form(inst).payments == expected
    assert shapley_oracle(inst).payments == expected


def test_table_oracle_additive():
    table = GameTable.from_function(3, len)
    assert shapley_table_oracle(table).payments == (1, 1, 1)


def test_table_oracle_symmetric_reward():
    table = game_table(RpsInstance(3, [([1, 2, 3], 3)]))
    assert shapley_table_oracle(table).payments == (1, 1, 1)


def test_table_oracle_fixture():
    assert shapley_table_oracle(four_player_convex_fixture()).payments == (F(1, 2),) * 4


def test_table_oracle_matches_permutation_form_on_random_tables():
    rng = random.Random(11)
    for _ in range(25):
        values = [0] + [F(rng.randint(-30, 30), rng.randint(1, 4)) for _ in range(15)]
        table = GameTable(4, tuple(values))
        expected = permutation_shapley(4, lambda S: table(S))
        assert list(shapley_table_oracle(table).payments) == expected


def test_oracle_guard():
    with pytest.raises(TooLarge):
        shapley_oracle(RpsInstance(21))
    with pytest.raises(TooLarge):
        shapley_oracle(RpsInstance(5), max_n=4)


def test_oracle_handles_huge_weights():
    inst = RpsInstance(3, [([1, 2], 2**62)], [([2, 3], 2**61)])
    expected = permutation_shapley(3, lambda S: brute_value(plain(inst), S))
    assert list(shapley_oracle(inst).payments) == expected
    assert shapley_closed_form(inst).payments == tuple(expected)


@settings(max_examples=200, deadline=None)
@given(instances(max_n=7))
def test_closed_form_equals_oracle(inst):
    assert shapley_closed_form(inst) == shapley_oracle(inst)


@settings(max_examples=60, deadline=None)
@given(instances(max_n=5))
def test_oracle_equals_permutation_form(inst):
    game = plain(inst)
    assert list(shapley_oracle(inst).payments) == permutation_shapley(inst.n, lambda S: brute_value(game, S))


@settings(max_examples=150, deadline=None)
@given(instances(max_n=8))
def test_efficiency(inst):
    assert shapley_closed_form(inst).total() == grand_value(inst)


@settings(max_examples=100, deadline=None)
@given(instances(max_n=8))
def test_symmetry_and_dummy(inst):
    phi = shapley_closed_form(inst)
    signature = {
        k: (
            sorted(i for i, r in enumerate(inst.rewards) if k in r.members),
            sorted(j for j, b in enumerate(inst.penalties) if k in b.members),
        )
        for k in range(1, inst.n + 1)
    }
    for k in range(1, inst.n + 1):
        if signature[k] == ([], []):
            assert phi[k - 1] == 0
    # Players in exactly the same sets are interchangeable.
    for k in range(1, inst.n + 1):
        for m in range(k + 1, inst.n + 1):
            if signature[k] == signature[m]:
                assert phi[k - 1] == phi[m - 1]


@settings(max_examples=100, deadline=None)
@given(instances(max_n=8))
def test_shapley_in_core(inst):
    assert is_core(inst, shapley_closed_form(inst))


def test_closed_form_is_linear_time():
    rng = random.Random(3)
    n = 10_000
    sets = [(rng.sample(range(1, n + 1), rng.randint(1, 10)), rng.randint(1, 20)) for _ in range(20_000)]
    inst = RpsInstance(n, sets[:10_000], sets[10_000:])
    assert shapley_closed_form(inst).total() == grand_value(inst)
