import random

import pytest

from qualtree.automata import buchi, cobuchi
from qualtree.errors import FormatError
from qualtree.fileformat import (
    digest,
    parse_arena,
    parse_automaton,
    parse_tree,
    parse_word,
    serialize_arena,
    serialize_automaton,
    serialize_strategy,
    serialize_tree,
    serialize_word,
)
from qualtree.gallery import contradictory_uniformity_automaton
from qualtree.reductions import sharps_automaton, lift_swap, to_nonzero, universalize
from qualtree.suite import (
    random_arena,
    random_regular_tree,
    random_simple_pwa,
    random_target,
)
from qualtree.automata import Alphabet
from qualtree.trees import lasso


AB = Alphabet(("a", "b"))


def test_word_roundtrip_and_empty_prefix():
    w = lasso(("a",), ("b", "a"))
    assert parse_word(serialize_word(w)) == w
    w2 = lasso((), ("a",))
    assert serialize_word(w2) == "word | a\n"
    assert parse_word("word | a") == w2


def test_word_parse_canonicalises():
    assert parse_word("word s | a s") == lasso((), ("s", "a"))


def test_tree_roundtrip_and_comments():
    rng = random.Random(1)
    for _ in range(20):
        t = random_regular_tree(rng, 4, AB)
        assert parse_tree(serialize_tree(t)) == t
    text = "tree  # a comment\nroot n0\nnode n0 a n0 n0  # loop\n"
    t = parse_tree(text)
    assert t.root == "n0" and t.label["n0"] == "a"


def test_automaton_roundtrips_all_kinds():
    rng = random.Random(3)
    alt, final = contradictory_uniformity_automaton()
    loaded = parse_automaton(serialize_automaton(alt, buchi(final)))
    assert loaded.kind == "alternating-tree"
    assert loaded.automaton == alt
    assert loaded.acceptance == buchi(final)

    pwa = random_simple_pwa(rng, 3, AB)
    loaded = parse_automaton(serialize_automaton(pwa, cobuchi({"q0"})))
    assert loaded.automaton == pwa and loaded.kind == "prob-word"

    pta = lift_swap(pwa)
    loaded = parse_automaton(serialize_automaton(pta, None))
    assert loaded.automaton == pta and loaded.kind == "prob-tree"
    assert loaded.acceptance is None

    au = universalize(pwa)
    loaded = parse_automaton(serialize_automaton(au, cobuchi({"q0"})))
    assert loaded.automaton == au and loaded.kind == "tree"

    nz = to_nonzero(au, frozenset({"q0"}))
    loaded = parse_automaton(serialize_automaton(nz, None))
    assert loaded.automaton == nz and loaded.kind == "nonzero"


def test_arena_roundtrip():
    rng = random.Random(5)
    for _ in range(20):
        g = random_arena(rng, 5)
        target = random_target(rng, g)
        g2, target2 = parse_arena(serialize_arena(g, target))
        assert g2 == g and target2 == target


def test_arena_probability_rules():
    bad = "arena\ninit v\nvertex v random\nedge v v\n"
    with pytest.raises(FormatError, match="probability iff"):
        parse_arena(bad)
    bad2 = "arena\ninit v\nvertex v eloise\nedge v v 1/2\n"
    with pytest.raises(FormatError, match="probability iff"):
        parse_arena(bad2)
    bad3 = "arena\ninit v\nvertex v random\nedge v v 2/3\n"
    with pytest.raises(FormatError, match="sums to"):
        parse_arena(bad3)


def test_rational_forms():
    g, _ = parse_arena("arena\ninit v\nvertex v random\nvertex w eloise\n"
                       "edge v v 1/2\nedge v w 1/2\nedge w w\n")
    assert serialize_arena(g).count("1/2") == 2
    g2, _ = parse_arena("arena\ninit v\nvertex v random\nedge v v 1\n")
    assert "edge v v 1\n" in serialize_arena(g2)


def test_malformed_inputs_raise_format_errors():
    with pytest.raises(FormatError):
        parse_automaton("states q\ninitial q\n")
    with pytest.raises(FormatError):
        parse_automaton("kind mystery\n")
    with pytest.raises(FormatError):
        parse_word("word a b\n")  # missing separator bar
    with pytest.raises(FormatError):
        parse_tree("tree\nroot n0\n")
    # a wrong total mass parses fine and is reported by validation instead
    from qualtree.automata import validate

    loaded = parse_automaton(
        "kind prob-word\nalphabet a\nstates q\ninitial q\nptrans q a 2/3 q\n"
    )
    assert any("sums to 2/3" in line for line in validate(loaded.automaton))


def test_serializer_refuses_comment_like_tokens():
    det, bad = sharps_automaton(AB, "#")
    with pytest.raises(FormatError, match="token"):
        serialize_automaton(det, cobuchi(bad))


def test_digests_are_stable_and_content_based():
    det, bad = sharps_automaton(AB, "s")
    text = serialize_automaton(det, cobuchi(bad))
    assert digest(text) == digest(text)
    reparsed = serialize_automaton(parse_automaton(text).automaton, cobuchi(bad))
    assert digest(reparsed) == digest(text)


def test_strategy_table_layout():
    from qualtree.gallery import one_state_acceptor
    from qualtree.emptiness import build_emptiness_game, solve_imperfect_buchi

    aut, final = one_state_acceptor()
    game, target = build_emptiness_game(aut, final)
    verdict, strat = solve_imperfect_buchi(game, target)
    assert verdict
    table = serialize_strategy(strat)
    lines = table.splitlines()
    assert lines[0] == "strategy"
    assert lines[1].startswith("memory ") and lines[2].startswith("init ")
    assert any(ln.startswith("act ") for ln in lines)
    assert any(ln.startswith("update ") for ln in lines)
