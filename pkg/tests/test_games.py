import itertools
import random
from fractions import Fraction

import pytest

from qualtree.dist import Distribution
from qualtree.errors import ResourceLimit
from qualtree.games import (
    ELOISE,
    Mdp,
    PositionalStrategy,
    StochasticArena,
    almost_sure_buchi,
    almost_sure_cobuchi,
    almost_sure_reach,
    as_markov_chain,
    buchi_to_reachability,
    check_buchi_strategy,
    check_reach_strategy,
    controller_positive_buchi,
    eloise_positional_strategies,
    fix_strategy,
    max_end_components,
    total_strategy,
    with_initial,
)
from qualtree.game_oracles import oracle_almost_sure_buchi, oracle_almost_sure_reach
from qualtree.graphs import sccs
from qualtree.markov import as_verdict, bsccs
from qualtree.suite import random_arena, random_mdp_arena, random_target


def arena(owners, edges, dist=None, initial=None):
    groups = {"eloise": set(), "abelard": set(), "random": set()}
    for v, o in owners.items():
        groups[o].add(v)
    return StochasticArena(
        eloise=frozenset(groups["eloise"]),
        abelard=frozenset(groups["abelard"]),
        random=frozenset(groups["random"]),
        edges={v: tuple(ws) for v, ws in edges.items()},
        dist=dist or {},
        initial=initial or sorted(owners)[0],
    )


def test_arena_rejects_dead_ends_and_bad_support():
    with pytest.raises(ValueError, match="dead-end"):
        arena({"v": "eloise"}, {"v": ()})
    with pytest.raises(ValueError, match="support"):
        arena(
            {"v": "random", "w": "eloise"},
            {"v": ("v", "w"), "w": ("w",)},
            dist={"v": Distribution.point("v")},
        )


def test_fix_strategy_identity_when_no_owned_vertices():
    g = arena({"v": "abelard"}, {"v": ("v",)})
    m = fix_strategy(g, PositionalStrategy(ELOISE, {}))
    assert m.controller == {"v"}
    assert m.arena.edges == g.edges and m.arena.random == g.random


def test_fix_strategy_point_distribution():
    g = arena({"e": "eloise", "x": "abelard", "y": "abelard"},
              {"e": ("x", "y"), "x": ("x",), "y": ("y",)})
    m = fix_strategy(g, PositionalStrategy(ELOISE, {"e": "y"}))
    assert m.arena.dist["e"] == Distribution.point("y")
    assert m.arena.edges["e"] == ("y",)


def test_fix_strategy_names_uncovered_vertex():
    g = arena({"e": "eloise"}, {"e": ("e",)})
    with pytest.raises(ValueError, match="'e'"):
        fix_strategy(g, PositionalStrategy(ELOISE, {}))


def test_fixing_both_players_gives_a_simulatable_chain():
    rng = random.Random(31)
    for _ in range(10):
        g = random_arena(rng, 5)
        target = random_target(rng, g)
        s_e = next(eloise_positional_strategies(g))
        m1 = fix_strategy(g, s_e)
        s_a = PositionalStrategy("abelard", {v: m1.arena.edges[v][0] for v in m1.arena.eloise})
        m2 = fix_strategy(
            StochasticArena(frozenset(), m1.arena.eloise, m1.arena.random,
                            m1.arena.edges, m1.arena.dist, m1.arena.initial),
            s_a,
        )
        chain = as_markov_chain(m2, target)
        verdict = as_verdict(chain, "buchi")
        # play simulation frequency agrees with the exact verdict
        hits = 0
        plays, horizon, burn = 300, 120, 60
        for p in range(plays):
            prng = random.Random(p * 1009 + 17)
            cur = chain.initial
            seen = False
            for step in range(horizon):
                items = chain.trans[cur].items()
                roll = prng.random()
                acc = 0.0
                for x, pr in items:
                    acc += float(pr)
                    if roll < acc:
                        cur = x
                        break
                if step >= burn and cur in chain.marked:
                    seen = True
            hits += seen
        freq = hits / plays
        assert (freq > 0.95) if verdict else True
        if freq > 0.999 and not verdict:
            pytest.fail("simulation contradicts a negative verdict")


def test_mec_self_loop_controller():
    g = arena({"v": "eloise"}, {"v": ("v",)})
    mecs = max_end_components(Mdp(g))
    assert mecs == [(frozenset({"v"}), frozenset({("v", "v")}))]


def test_mecs_of_pure_chain_coincide_with_bsccs():
    rng = random.Random(4)
    for _ in range(20):
        g = random_mdp_arena(rng, 5)
        pure = StochasticArena(
            frozenset(), frozenset(),
            g.eloise | g.random,
            {v: g.edges[v] if v in g.random else (g.edges[v][0],) for v in g.vertices},
            {**g.dist, **{v: Distribution.point(g.edges[v][0]) for v in g.eloise}},
            g.initial,
        )
        chain = as_markov_chain(Mdp(pure), frozenset())
        chain_bottoms = set(bsccs(chain))
        reachable_mecs = {
            comp
            for comp, _ in max_end_components(Mdp(pure))
            if comp & set().union(*chain_bottoms) or _graph_reachable(pure, comp)
        }
        assert chain_bottoms <= {c for c, _ in max_end_components(Mdp(pure))}
        assert chain_bottoms == {c for c in reachable_mecs if _is_bottom(pure, c)}


def _graph_reachable(g, comp):
    seen = {g.initial}
    stack = [g.initial]
    while stack:
        v = stack.pop()
        if v in comp:
            return True
        for w in g.edges[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def _is_bottom(g, comp):
    return all(set(g.edges[v]) <= comp for v in comp)


def _brute_force_mecs(m: Mdp):
    g = m.arena
    vs = sorted(g.vertices)
    ecs = []
    for r in range(1, len(vs) + 1):
        for sub in itertools.combinations(vs, r):
            s = frozenset(sub)
            ok = True
            for v in s:
                if v in g.random:
                    if not set(g.edges[v]) <= s:
                        ok = False
                        break
                else:
                    if not any(w in s for w in g.edges[v]):
                        ok = False
                        break
            if not ok:
                continue

            def succ(v):
                if v in g.random:
                    return [w for w in g.edges[v]]
                return [w for w in g.edges[v] if w in s]

            comps = sccs(s, succ)
            if len(comps) == 1 and len(comps[0]) == len(s):
                ecs.append(s)
    return {e for e in ecs if not any(e < f for f in ecs)}


def test_mecs_match_subset_brute_force():
    # hand-built five-vertex controller MDP with a proper sub end component
    g = arena(
        {"a": "eloise", "b": "eloise", "c": "random", "d": "eloise", "e": "eloise"},
        {
            "a": ("b", "d"),
            "b": ("a",),
            "c": ("a", "e"),
            "d": ("c", "d"),
            "e": ("e",),
        },
        dist={"c": Distribution.half_half("a", "e")},
    )
    m = Mdp(g)
    assert {c for c, _ in max_end_components(m)} == _brute_force_mecs(m)
    rng = random.Random(8)
    for _ in range(40):
        m = Mdp(random_mdp_arena(rng, 5))
        assert {c for c, _ in max_end_components(m)} == _brute_force_mecs(m)


def test_controller_positive_buchi_trivial_cases():
    g = arena({"v": "eloise"}, {"v": ("v",)})
    assert not controller_positive_buchi(Mdp(g), frozenset())
    assert controller_positive_buchi(Mdp(g), frozenset({"v"}))


def _enumerate_controller_positive_buchi(m: Mdp, target) -> bool:
    g = m.arena
    for s in eloise_positional_strategies(g):
        chain = as_markov_chain(fix_strategy(g, s), target)
        if any(c & target for c in bsccs(chain)):
            return True
    return False


def test_controller_positive_buchi_matches_enumeration():
    rng = random.Random(21)
    for _ in range(200):
        m = Mdp(random_mdp_arena(rng, 6))
        target = random_target(rng, m.arena)
        assert controller_positive_buchi(m, target) == _enumerate_controller_positive_buchi(m, target)


def test_almost_sure_reach_contains_target_initial():
    g = arena({"v": "eloise", "w": "eloise"}, {"v": ("w",), "w": ("w",)})
    region, _ = almost_sure_reach(g, frozenset({"v"}))
    assert "v" in region


def test_almost_sure_reach_rejects_coin_to_wrong_sink():
    g = arena(
        {"s": "random", "yes": "eloise", "no": "eloise"},
        {"s": ("yes", "no"), "yes": ("yes",), "no": ("no",)},
        dist={"s": Distribution.half_half("yes", "no")},
        initial="s",
    )
    region, _ = almost_sure_reach(g, frozenset({"yes"}))
    assert "s" not in region and "yes" in region and "no" not in region


def test_almost_sure_buchi_trivial_cases():
    g = arena({"v": "eloise"}, {"v": ("v",)})
    region, _ = almost_sure_buchi(g, frozenset({"v"}))
    assert "v" in region
    region2, _ = almost_sure_buchi(g, frozenset())
    assert not region2


def test_solvers_and_strategies_match_oracles_on_random_suite():
    rng = random.Random(2)
    for _ in range(120):
        g = random_arena(rng, 7)
        target = random_target(rng, g)
        region_b, strat_b = almost_sure_buchi(g, target)
        assert region_b == oracle_almost_sure_buchi(g, target)
        region_r, strat_r = almost_sure_reach(g, target)
        assert region_r == oracle_almost_sure_reach(g, target)
        if g.initial in region_b:
            assert check_buchi_strategy(g, target, total_strategy(g, strat_b))
        if g.initial in region_r:
            assert check_reach_strategy(g, target, total_strategy(g, strat_r))


def test_check_buchi_strategy_reduces_to_chain_verdict_without_opponent():
    g = arena(
        {"s": "random", "x": "random"},
        {"s": ("x",), "x": ("s", "x")},
        dist={"s": Distribution.point("x"), "x": Distribution.half_half("s", "x")},
        initial="s",
    )
    s = PositionalStrategy(ELOISE, {})
    chain = as_markov_chain(fix_strategy(g, s), frozenset({"x"}))
    assert check_buchi_strategy(g, frozenset({"x"}), s) == as_verdict(chain, "buchi")


def test_check_buchi_strategy_rejects_target_free_cycle():
    g = arena(
        {"e": "eloise", "f": "eloise", "loop": "eloise"},
        {"e": ("f", "loop"), "f": ("e",), "loop": ("loop",)},
        initial="e",
    )
    bad = PositionalStrategy(ELOISE, {"e": "loop", "f": "e", "loop": "loop"})
    good = PositionalStrategy(ELOISE, {"e": "f", "f": "e", "loop": "loop"})
    assert not check_buchi_strategy(g, frozenset({"f"}), bad)
    assert check_buchi_strategy(g, frozenset({"f"}), good)


def test_almost_sure_cobuchi_trivial_cases():
    g = arena({"v": "eloise"}, {"v": ("v",)})
    assert almost_sure_cobuchi(g, frozenset())
    assert not almost_sure_cobuchi(g, frozenset({"v"}))


def test_almost_sure_cobuchi_collapses_on_controller_free_arenas():
    rng = random.Random(6)
    for _ in range(100):
        g = random_mdp_arena(rng, 5)
        flipped = StochasticArena(
            frozenset(), g.eloise, g.random, g.edges, g.dist, g.initial
        )
        target = random_target(rng, flipped)
        expected = not controller_positive_buchi(
            Mdp(StochasticArena(g.eloise, frozenset(), g.random, g.edges, g.dist, g.initial)),
            target,
        )
        assert almost_sure_cobuchi(flipped, target) == expected


def test_almost_sure_cobuchi_size_guard():
    owners = {f"v{i}": "eloise" for i in range(25)}
    edges = {f"v{i}": tuple(f"v{j}" for j in range(25)) for i in range(25)}
    g = arena(owners, edges, initial="v0")
    with pytest.raises(ResourceLimit):
        almost_sure_cobuchi(g, frozenset({"v0"}))


def test_gadget_structure_and_trivial_instance():
    g = arena({"f": "random"}, {"f": ("f",)}, dist={"f": Distribution.point("f")})
    g2, goal = buchi_to_reachability(g, frozenset({"f"}))
    (goal_vertex,) = goal
    gate = ("gate", "f")
    assert g2.dist[gate] == Distribution.half_half(goal_vertex, "f")
    assert g2.edges[gate] == (goal_vertex, "f")
    region, _ = almost_sure_reach(g2, goal)
    assert g2.initial in region


def test_gadget_preserves_verdicts_everywhere():
    rng = random.Random(14)
    for _ in range(60):
        g = random_arena(rng, 6)
        target = random_target(rng, g)
        region_b, _ = almost_sure_buchi(g, target)
        g2, goal = buchi_to_reachability(g, target)
        region_r, _ = almost_sure_reach(g2, goal)
        assert region_b == region_r & g.vertices


def test_verdicts_invariant_under_reweighting():
    rng = random.Random(15)
    for _ in range(40):
        g = random_arena(rng, 6)
        target = random_target(rng, g)
        dist2 = {}
        for v in g.random:
            support = g.edges[v]
            weights = [rng.randint(1, 9) for _ in support]
            total = sum(weights)
            dist2[v] = Distribution({w: Fraction(x, total) for w, x in zip(support, weights)})
        g2 = StochasticArena(g.eloise, g.abelard, g.random, g.edges, dist2, g.initial)
        assert almost_sure_buchi(g, target)[0] == almost_sure_buchi(g2, target)[0]
        assert almost_sure_reach(g, target)[0] == almost_sure_reach(g2, target)[0]


def test_with_initial_moves_the_start_vertex():
    g = arena({"v": "eloise", "w": "eloise"}, {"v": ("w",), "w": ("w",)})
    assert with_initial(g, "w").initial == "w"
