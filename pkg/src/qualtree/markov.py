"""Exact qualitative analysis of finite Markov chains.

Verdicts for the repeated-visit conditions reduce to bottom strongly
connected components: a finite chain enters some BSCC with probability 1
and then visits every state of it infinitely often.  Finite-word
acceptance probabilities are computed by exact forward propagation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from qualtree.automata import (
    BUCHI,
    COBUCHI,
    ProbTreeAutomaton,
    ProbWordAutomaton,
)
from qualtree.dist import Distribution
from qualtree.graphs import reachable, sccs
from qualtree.ordering import ckey
from qualtree.trees import RegularTree, UltimatelyPeriodicWord


@dataclass(frozen=True)
class MarkovChain:
    states: tuple
    initial: object
    trans: dict  # state -> Distribution, total on reachable states
    marked: frozenset

    def successors(self, s):
        return self.trans[s].support()


def bsccs(m: MarkovChain) -> list[frozenset]:
    """Bottom SCCs reachable from the initial state, canonically ordered."""
    reach = reachable([m.initial], m.successors)
    out = []
    for comp in sccs(reach, m.successors):
        cset = frozenset(comp)
        if all(m.successors(s) <= cset for s in comp):
            out.append(cset)
    return sorted(out, key=ckey)


def as_verdict(m: MarkovChain, kind: str) -> bool:
    """Almost-sure verdict for the marked set under buchi or cobuchi reading."""
    bottoms = bsccs(m)
    if kind == BUCHI:
        return all(c & m.marked for c in bottoms)
    if kind == COBUCHI:
        return not any(c & m.marked for c in bottoms)
    raise ValueError(f"unknown condition kind {kind!r}")


def acceptance_probability(a: ProbWordAutomaton, final: frozenset, u: tuple) -> Fraction:
    """Exact probability that the run over finite word u ends in `final`."""
    vec = {a.initial: Fraction(1)}
    for symbol in u:
        nxt: dict = {}
        for q, p in vec.items():
            for q2, w in a.dist(q, symbol).items():
                nxt[q2] = nxt.get(q2, Fraction(0)) + p * w
        vec = nxt
    return sum((p for q, p in vec.items() if q in final), Fraction(0))


def _lasso_positions(w: UltimatelyPeriodicWord):
    k, n = len(w.prefix), len(w)

    def nxt(i: int) -> int:
        return i + 1 if i + 1 < n else k

    return n, nxt


def word_chain(a: ProbWordAutomaton, final: frozenset, w: UltimatelyPeriodicWord) -> MarkovChain:
    """The finite quotient of the run chain over w, indexed by lasso position."""
    n, nxt = _lasso_positions(w)
    states = tuple((q, i) for q in sorted(a.states) for i in range(n))
    trans = {
        (q, i): a.dist(q, w.at(i)).map(lambda q2, j=nxt(i): (q2, j))
        for q in a.states
        for i in range(n)
    }
    marked = frozenset((q, i) for q in final for i in range(n))
    return MarkovChain(states, (a.initial, 0), trans, marked)


def lasso_membership_word(
    a: ProbWordAutomaton, final: frozenset, w: UltimatelyPeriodicWord, kind: str
) -> bool:
    return as_verdict(word_chain(a, final, w), kind)


def tree_chain(a: ProbTreeAutomaton, final: frozenset, t: RegularTree) -> MarkovChain:
    """Run chain of a probabilistic tree automaton over a regular tree.

    States are (automaton state, tree node); each split target contributes
    half its weight to each child, with like terms merged.
    """
    states = tuple((q, n) for q in sorted(a.states) for n in t.nodes)
    trans = {}
    for q in a.states:
        for n in t.nodes:
            d = a.dist(q, t.label[n])
            acc: dict = {}
            for (q0, q1), w in d.items():
                half = w / 2
                for tgt in ((q0, t.succ0[n]), (q1, t.succ1[n])):
                    acc[tgt] = acc.get(tgt, Fraction(0)) + half
            trans[(q, n)] = Distribution(acc)
    marked = frozenset((q, n) for q in final for n in t.nodes)
    return MarkovChain(states, (a.initial, t.root), trans, marked)


def prob_tree_membership(
    a: ProbTreeAutomaton, final: frozenset, t: RegularTree, kind: str = COBUCHI
) -> bool:
    return as_verdict(tree_chain(a, final, t), kind)
