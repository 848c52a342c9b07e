import random

import pytest
from hypothesis import given, settings

from rpsgame import (
    Coalition,
    GameTable,
    RpsInstance,
    char_value,
    embed_three_player,
    four_player_convex_fixture,
    game_table,
    grand_value,
    is_convex,
    is_superadditive,
    rpsp_solve,
)
from rpsgame.analysis import _embed_zero_singletons
from rpsgame.errors import IntegralityRequired, NonZeroSingletons, NotConvex, NotThreePlayers, TooLarge
from rpsgame.instance import iter_coalitions

from oracles import all_subsets, brute_is_convex, brute_value, plain, random_convex_three_player
from strategies import instances


def table(n, mapping):
    return GameTable.from_mapping(n, {frozenset(k): v for k, v in mapping.items()})


def test_convex_counterexample():
    g = table(2, {(): 0, (1,): 1, (2,): 0, (1, 2): 0})
    check = is_convex(g)
    assert not check
    assert check.witness == (Coalition({1}), Coalition({2}))
    assert check.to_dict() == {"holds": False, "counterexample": [(1,), (2,)]}


def test_superadditive_counterexample():
    g = table(2, {(): 0, (1,): 1, (2,): 1, (1, 2): 1})
    check = is_superadditive(g)
    assert check.witness == (Coalition({1}), Coalition({2}))


def test_additive_table_is_superadditive_and_convex():
    g = GameTable.from_function(4, len)
    assert is_superadditive(g) and is_convex(g)


def test_fixture_values():
    g = four_player_convex_fixture()
    assert g({1, 2, 3}) == 1
    assert g({1, 2, 3, 4}) == 2
    assert g(set()) == 0
    assert all(g(S) == 0 for S in all_subsets(4) if len(S) <= 2)


def test_fixture_is_convex():
    assert is_convex(four_player_convex_fixture())
    assert brute_is_convex(4, four_player_convex_fixture())


def test_fractional_tables():
    g = GameTable(2, (0, "1/2", "1/3", "5/6"))
    assert is_convex(g)
    assert not is_convex(GameTable(2, (0, "1/2", "1/3", "5/7")))


def test_guard():
    with pytest.raises(TooLarge):
        is_convex(GameTable.from_function(5, len), max_n=4)


@settings(max_examples=120, deadline=None)
@given(instances(max_n=7))
def test_rps_games_convex_and_superadditive(inst):
    g = game_table(inst)
    assert is_convex(g)
    assert is_superadditive(g)


def test_checkers_agree_with_brute_force_on_random_tables():
    rng = random.Random(4)
    for _ in range(150):
        values = [0] + [rng.randint(-3, 6) for _ in range(7)]
        g = GameTable(3, tuple(values))
        v = lambda S: g(S)  # noqa: E731
        assert bool(is_convex(g)) == brute_is_convex(3, v)
        subsets = list(all_subsets(3))
        superadditive = all(v(S | T) >= v(S) + v(T) for S in subsets for T in subsets if not S & T)
        assert bool(is_superadditive(g)) == superadditive
        check = is_convex(g)
        if not check:
            S, T = check.witness
            assert v(S) + v(T) > v(S | T) + v(S & T)


def test_embed_equal_pairs():
    g = table(3, {(): 0, (1,): 0, (2,): 0, (3,): 0, (1, 2): 1, (1, 3): 1, (2, 3): 1, (1, 2, 3): 2})
    inst = embed_three_player(g)
    assert inst == RpsInstance(3, [([1], 1), ([2], 1), ([3], 1)], [([1, 2, 3], 1)])
    assert game_table(inst) == g


def test_embed_zero_game():
    assert embed_three_player(GameTable(3, (0,) * 8)) == RpsInstance(3)


def test_embed_grand_coalition_only():
    g = table(3, {(): 0, (1,): 0, (2,): 0, (3,): 0, (1, 2): 0, (1, 3): 0, (2, 3): 0, (1, 2, 3): 1})
    assert embed_three_player(g) == RpsInstance(3, [([1, 2, 3], 1)])


def test_embed_with_singletons():
    g = table(3, {(): 0, (1,): 2, (2,): -1, (3,): 0, (1, 2): 3, (1, 3): 2, (2, 3): -1, (1, 2, 3): 5})
    inst = embed_three_player(g)
    assert game_table(inst) == g


@pytest.mark.parametrize(
    "g, error",
    [
        (GameTable(3, (0, 1, 0, 0, 0, 0, 0, 0)), NotConvex),
        (GameTable.from_function(2, len), NotThreePlayers),
        (GameTable(3, (0, 0, 0, "1/2", 0, 0, 0, 1)), IntegralityRequired),
    ],
)
def test_embed_rejects(g, error):
    with pytest.raises(error):
        embed_three_player(g)


def test_embed_zero_singleton_helper_requires_zero_singletons():
    with pytest.raises(NonZeroSingletons):
        _embed_zero_singletons(GameTable.from_function(3, len))


def test_embed_random_convex_games():
    rng = random.Random(8)
    for _ in range(60):
        mapping = random_convex_three_player(rng)
        g = GameTable.from_mapping(3, mapping)
        inst = embed_three_player(g)
        for S in iter_coalitions(3):
            assert char_value(inst, S) == mapping[frozenset(S)]


@settings(max_examples=60, deadline=None)
@given(instances(max_n=3, min_n=3))
def test_embed_rps_tables(inst):
    g = game_table(inst)
    assert game_table(embed_three_player(g)) == g


def test_rpsp_no_penalties():
    coalition, value = rpsp_solve(RpsInstance(3, [([1], 3), ([1, 2], 2)]))
    assert value == 5
    assert coalition == {1, 2}


def test_rpsp_single_player():
    assert rpsp_solve(RpsInstance(1, [([1], 5)], [([1], 3)])) == (Coalition({1}), 2)


def test_rpsp_empty_selection():
    assert rpsp_solve(RpsInstance(2, [([1], 1)], [([1, 2], 5)])) == (Coalition(), 0)


def test_rpsp_tie_break():
    # {1} and {1, 2} both earn 3; (1,) is lexicographically first.
    assert rpsp_solve(RpsInstance(2, [([1], 3)]))[0] == {1}


@settings(max_examples=120, deadline=None)
@given(instances(max_n=7))
def test_rpsp_matches_brute_force(inst):
    game = plain(inst)
    best = max(brute_value(game, S) for S in all_subsets(inst.n))
    coalition, value = rpsp_solve(inst)
    assert value == best == char_value(inst, coalition)
    assert value >= max(0, grand_value(inst))
    ties = [tuple(sorted(S)) for S in all_subsets(inst.n) if brute_value(game, S) == best]
    assert coalition.sorted() == min(ties)
