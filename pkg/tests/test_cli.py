import io
import re
from contextlib import redirect_stdout

import pytest

from qualtree.automata import buchi, cobuchi
from qualtree.cli import main
from qualtree.fileformat import (
    parse_automaton,
    parse_tree,
    serialize_arena,
    serialize_automaton,
    serialize_tree,
    serialize_word,
)
from qualtree.gallery import (
    constant_tree,
    contradictory_uniformity_automaton,
    one_state_acceptor,
)
from qualtree.reductions import sharps_automaton
from qualtree.automata import Alphabet
from qualtree.suite import random_arena, random_target
from qualtree.trees import lasso
import random


def run_cli(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def strip_time(report: str) -> str:
    return "\n".join(
        ln for ln in report.splitlines() if not ln.startswith("wall-time-ms:")
    )


@pytest.fixture
def files(tmp_path):
    aut, core = contradictory_uniformity_automaton()
    paths = {}
    paths["conflict"] = tmp_path / "conflict.aut"
    paths["conflict"].write_text(serialize_automaton(aut, buchi(core)))
    one, final = one_state_acceptor()
    paths["one"] = tmp_path / "one.aut"
    paths["one"].write_text(serialize_automaton(one, buchi(final)))
    paths["tree"] = tmp_path / "all_a.tree"
    paths["tree"].write_text(serialize_tree(constant_tree("a")))
    det, bad = sharps_automaton(Alphabet(("a",)), "s")
    paths["detector"] = tmp_path / "detector.aut"
    paths["detector"].write_text(serialize_automaton(det, cobuchi(bad)))
    paths["word"] = tmp_path / "w.word"
    paths["word"].write_text(serialize_word(lasso((), ("a", "s"))))
    paths["tmp"] = tmp_path
    return paths


def test_check_emptiness_exit_codes_and_witness(files):
    code, out = run_cli("check-emptiness", str(files["conflict"]), "--oracle")
    assert code == 0  # empty answers the question positively
    assert "verdict: empty" in out and "oracle-agreement: yes" in out

    witness = files["tmp"] / "w.tree"
    code, out = run_cli(
        "check-emptiness", str(files["one"]), "--witness", str(witness), "--oracle"
    )
    assert code == 1
    assert "verdict: nonempty" in out
    tree = parse_tree(witness.read_text())
    assert set(tree.label.values()) == {"a"}
    assert (files["tmp"] / "w.tree.strategy").read_text().startswith("strategy")


def test_check_emptiness_refuses_cobuchi(files, tmp_path):
    aut, core = contradictory_uniformity_automaton()
    p = tmp_path / "cb.aut"
    p.write_text(serialize_automaton(aut, cobuchi(core)))
    code, _ = run_cli("check-emptiness", str(p))
    assert code == 2


def test_membership_and_word_membership(files):
    code, out = run_cli("membership", str(files["conflict"]), str(files["tree"]))
    assert code == 1 and "verdict: nonmember" in out
    code, out = run_cli("word-membership", str(files["detector"]), str(files["word"]))
    assert code == 0 and "verdict: member" in out


def test_ptree_membership(files, tmp_path):
    from qualtree.fileformat import parse_automaton
    from qualtree.reductions import lift_diagonal
    from qualtree.trees import tree_from_word

    det = parse_automaton(files["detector"].read_text())
    lifted = tmp_path / "lifted.aut"
    lifted.write_text(serialize_automaton(lift_diagonal(det.automaton), det.acceptance))
    good = tmp_path / "good.tree"
    good.write_text(serialize_tree(tree_from_word(lasso((), ("a", "s")))))
    code, out = run_cli("ptree-membership", str(lifted), str(good))
    assert code == 0 and "verdict: member" in out
    code, out = run_cli("ptree-membership", str(lifted), str(files["tree"]))
    assert code == 1 and "verdict: nonmember" in out


def test_solve_game_with_oracle(tmp_path):
    rng = random.Random(71)
    g = random_arena(rng, 5)
    target = random_target(rng, g)
    p = tmp_path / "g.arena"
    p.write_text(serialize_arena(g, target))
    for objective in ("reach", "buchi", "cobuchi"):
        args = ["solve-game", str(p), "--objective", objective]
        if objective != "cobuchi":
            args.append("--oracle")
        code, out = run_cli(*args)
        assert code in (0, 1)
        assert re.search(r"verdict: (true|false)", out)
        if objective != "cobuchi":
            assert "oracle-agreement: yes" in out


def test_reduce_universalize_bound(files, tmp_path):
    out_path = tmp_path / "au.aut"
    code, _ = run_cli("reduce", "universalize", str(files["detector"]), str(out_path))
    assert code == 0
    loaded = parse_automaton(out_path.read_text())
    aut = loaded.automaton
    assert len(aut.transitions) <= 2 * len(aut.states) * len(aut.alphabet.symbols)


def test_reduce_chain_sharp_then_nonzero(files, tmp_path):
    mid = tmp_path / "gadget.aut"
    code, _ = run_cli("reduce", "sharp", str(files["detector"]), str(mid), "--sharp", "t")
    assert code == 0
    assert parse_automaton(mid.read_text()).acceptance.kind == "cobuchi"

    universal = tmp_path / "au.aut"
    run_cli("reduce", "universalize", str(files["detector"]), str(universal))
    nz = tmp_path / "nz.aut"
    code, _ = run_cli("reduce", "nonzero", str(universal), str(nz))
    assert code == 0
    loaded = parse_automaton(nz.read_text())
    assert loaded.kind == "nonzero"
    assert loaded.automaton.f_one == loaded.automaton.states - {"p1"}


def test_reduce_lifts(files, tmp_path):
    for name in ("lift1", "lift2"):
        out_path = tmp_path / f"{name}.aut"
        code, _ = run_cli("reduce", name, str(files["detector"]), str(out_path))
        assert code == 0
        assert parse_automaton(out_path.read_text()).kind == "prob-tree"


def test_malformed_input_exit_code(tmp_path):
    p = tmp_path / "bad.aut"
    p.write_text("kind prob-word\nalphabet a\nstates q\ninitial q\nptrans q a 2/3 q\n")
    code, _ = run_cli("check-emptiness", str(p))
    assert code == 2
    missing = tmp_path / "missing.aut"
    code, _ = run_cli("membership", str(missing), str(missing))
    assert code == 2


def test_simulate_word_and_tree(files):
    code, out = run_cli("simulate", str(files["tree"]), "--seed", "42", "--horizon", "4")
    assert code == 0 and "samples: a a a a a" in out
    code, out = run_cli("simulate", str(files["word"]), "--seed", "1", "--horizon", "3")
    assert code == 0 and "samples: a s a s" in out


def test_reports_are_reproducible(files):
    code1, out1 = run_cli("check-emptiness", str(files["conflict"]))
    code2, out2 = run_cli("check-emptiness", str(files["conflict"]))
    assert code1 == code2 == 0
    assert strip_time(out1) == strip_time(out2)


def test_suite_subcommand_smoke():
    code, out = run_cli("suite", "--seed", "9", "--count", "12", "--max-states", "3")
    assert code == 0
    assert "disagreements: 0" in out


def test_json_report(files):
    import json

    code, out = run_cli("membership", str(files["conflict"]), str(files["tree"]), "--json")
    body = json.loads(out)
    assert body["verdict"] == "nonmember" and code == 1
