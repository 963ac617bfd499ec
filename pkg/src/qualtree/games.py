"""Finite turn-based stochastic games and their qualitative solvers.

Almost-sure reachability and repeated-visit winning sets are computed by a
greatest-fixed-point over two conditions: the candidate region must be
escape-proof (the opponent and the coin cannot leave it, the protagonist
can stay), and from every vertex the protagonist must be able to force the
target with positive probability inside the region.  Within a closed
finite region, uniformly positive single-shot progress bootstraps to
probability one, which is why this characterises the almost-sure set.

The normative definition of correctness is the positional-strategy
enumeration oracle in :mod:`qualtree.game_oracles`; the fixed point here
is the fast route and the random suite holds the two together.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from qualtree.dist import Distribution
from qualtree.errors import ResourceLimit
from qualtree.graphs import reachable, sccs
from qualtree.ordering import ckey, csorted

ELOISE = "eloise"
ABELARD = "abelard"

REACH = "reach"
BUCHI = "buchi"
COBUCHI = "cobuchi"


@dataclass(frozen=True)
class StochasticArena:
    """Turn-based arena; dead-ends are rejected at construction."""

    eloise: frozenset
    abelard: frozenset
    random: frozenset
    edges: dict  # vertex -> non-empty ordered tuple of successors
    dist: dict  # random vertex -> Distribution with support == its edges
    initial: object

    def __post_init__(self):
        v_all = self.eloise | self.abelard | self.random
        if (self.eloise & self.abelard) or (self.eloise & self.random) or (self.abelard & self.random):
            raise ValueError("vertex ownership sets overlap")
        if self.initial not in v_all:
            raise ValueError(f"initial vertex {self.initial!r} unknown")
        if set(self.edges) != v_all:
            raise ValueError("edges must be defined exactly on the vertex set")
        for v in v_all:
            succ = self.edges[v]
            if not succ:
                raise ValueError(f"dead-end vertex {v!r}")
            if len(set(succ)) != len(succ):
                raise ValueError(f"duplicate edges at {v!r}")
            for w in succ:
                if w not in v_all:
                    raise ValueError(f"edge {v!r} -> {w!r} leaves the vertex set")
        if set(self.dist) != set(self.random):
            raise ValueError("dist must be defined exactly on random vertices")
        for v in self.random:
            d = self.dist[v]
            d.require_probability(f"random vertex {v!r}")
            if d.support() != frozenset(self.edges[v]):
                raise ValueError(f"support of {v!r} does not match its edges")

    @property
    def vertices(self) -> frozenset:
        return self.eloise | self.abelard | self.random

    def owner(self, v) -> str:
        if v in self.eloise:
            return ELOISE
        if v in self.abelard:
            return ABELARD
        return "random"


@dataclass(frozen=True)
class GameObjective:
    kind: str  # REACH, BUCHI or COBUCHI
    target: frozenset

    def __post_init__(self):
        if self.kind not in (REACH, BUCHI, COBUCHI):
            raise ValueError(f"unknown objective kind {self.kind!r}")


@dataclass(frozen=True)
class PositionalStrategy:
    owner: str  # ELOISE or ABELARD
    choice: dict  # owner's vertex -> chosen successor


@dataclass(frozen=True)
class Mdp:
    """Arena with a single controlling player, stored in the eloise slot."""

    arena: StochasticArena

    def __post_init__(self):
        if self.arena.abelard:
            raise ValueError("an Mdp has no second player")

    @property
    def controller(self) -> frozenset:
        return self.arena.eloise

    @property
    def initial(self):
        return self.arena.initial


def fix_strategy(g: StochasticArena, s: PositionalStrategy) -> Mdp:
    """Commit one player to a positional strategy; the other becomes controller.

    The owner's vertices turn into random vertices carrying a point
    distribution on the chosen successor.
    """
    owned = g.eloise if s.owner == ELOISE else g.abelard
    other = g.abelard if s.owner == ELOISE else g.eloise
    missing = csorted(v for v in owned if v not in s.choice)
    if missing:
        raise ValueError(f"strategy does not cover vertex {missing[0]!r}")
    edges = dict(g.edges)
    dist = dict(g.dist)
    for v in owned:
        c = s.choice[v]
        if c not in g.edges[v]:
            raise ValueError(f"choice {c!r} at {v!r} is not an edge")
        edges[v] = (c,)
        dist[v] = Distribution.point(c)
    return Mdp(
        StochasticArena(
            eloise=other,
            abelard=frozenset(),
            random=g.random | owned,
            edges=edges,
            dist=dist,
            initial=g.initial,
        )
    )


# ---------------------------------------------------------------------------
# Generic MDP view: controller states with a finite set of moves, each move a
# distribution.  Products built elsewhere (strategy checks) reuse this layer.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MdpView:
    states: tuple
    initial: object
    moves: dict  # state -> tuple of Distributions (possibly empty after restriction)

    def succ(self, s):
        out = set()
        for d in self.moves.get(s, ()):
            out |= d.support()
        return out


def view_of_mdp(m: Mdp) -> MdpView:
    g = m.arena
    moves = {}
    for v in g.vertices:
        if v in g.random:
            moves[v] = (g.dist[v],)
        else:
            moves[v] = tuple(Distribution.point(w) for w in g.edges[v])
    return MdpView(tuple(csorted(g.vertices)), g.initial, moves)


def mec_decomposition(view: MdpView, within: frozenset | None = None) -> list[frozenset]:
    """Maximal end components: closed, strongly connected, one staying move per state.

    With ``within`` the decomposition is taken in the sub-MDP induced on
    that state set (moves whose whole support stays inside).
    """
    universe = frozenset(view.states) if within is None else frozenset(within)
    out: list[frozenset] = []
    work = [universe]
    while work:
        cand = work.pop()
        staying = {
            s: [d for d in view.moves.get(s, ()) if d.support() <= cand]
            for s in cand
        }
        dead = {s for s in cand if not staying[s]}
        if dead:
            rest = cand - dead
            if rest:
                work.append(rest)
            continue

        def succ(s):
            acc = set()
            for d in staying[s]:
                acc |= d.support()
            return acc

        comps = sccs(cand, succ)
        if len(comps) == 1 and len(comps[0]) == len(cand):
            out.append(cand)
        else:
            work.extend(frozenset(c) for c in comps)
    return sorted(out, key=ckey)


def max_end_components(m: Mdp) -> list[tuple[frozenset, frozenset]]:
    """MECs of an arena MDP, each with its retained edge set."""
    view = view_of_mdp(m)
    result = []
    for comp in mec_decomposition(view):
        kept = set()
        for v in comp:
            if v in m.arena.random:
                kept |= {(v, w) for w in m.arena.edges[v]}
            else:
                kept |= {(v, w) for w in m.arena.edges[v] if w in comp}
        result.append((comp, frozenset(kept)))
    return result


def _positive_buchi_view(view: MdpView, target: frozenset, start) -> bool:
    reach = reachable([start], view.succ)
    return any(c & target and c & reach for c in mec_decomposition(view))


def _positive_cobuchi_view(view: MdpView, target: frozenset, start) -> bool:
    """Can the controller make "eventually avoid target forever" positive?

    Yes iff an end component inside the complement of the target is
    reachable; the path there may still cross the target, so plain graph
    reachability is the right notion.
    """
    safe = frozenset(view.states) - target
    reach = reachable([start], view.succ)
    return any(c & reach for c in mec_decomposition(view, within=safe))


def _positive_avoid_view(view: MdpView, target: frozenset, start) -> bool:
    """Positive probability of never visiting the target at all.

    Unlike the co-Buchi case the approach path must itself avoid the
    target, so reachability is restricted to target-free states.
    """
    if start in target:
        return False
    safe = frozenset(view.states) - target

    def succ_safe(s):
        return {w for w in view.succ(s) if w in safe}

    reach = reachable([start], succ_safe)
    return any(c & reach for c in mec_decomposition(view, within=safe))


def controller_positive_buchi(m: Mdp, target: frozenset) -> bool:
    """True iff the controller can visit the target infinitely often with
    positive probability (some reachable MEC meets the target)."""
    return _positive_buchi_view(view_of_mdp(m), frozenset(target), m.initial)


def controller_positive_cobuchi(m: Mdp, target: frozenset) -> bool:
    """True iff the controller can, with positive probability, eventually
    avoid the target forever.

    This needs an end component inside the complement of the target; a MEC
    of the full MDP that merely meets the target is not enough evidence
    either way, hence the restricted decomposition.
    """
    return _positive_cobuchi_view(view_of_mdp(m), frozenset(target), m.initial)


def controller_positive_avoid(m: Mdp, target: frozenset) -> bool:
    """True iff the controller can avoid the target forever with positive
    probability (safety, not just co-Buchi)."""
    return _positive_avoid_view(view_of_mdp(m), frozenset(target), m.initial)


# ---------------------------------------------------------------------------
# Almost-sure solvers.
# ---------------------------------------------------------------------------


def _positive_attractor(g: StochasticArena, region: set, target: set):
    """Vertices of `region` from which the protagonist forces positive-probability
    reach of `target` inside the region; returns (set, witness successor map)."""
    rank = {v: 0 for v in region & target}
    witness: dict = {}
    changed = True
    while changed:
        changed = False
        for v in csorted(region - rank.keys()):
            succ = g.edges[v]
            if v in g.abelard:
                if all(w in rank for w in succ):
                    rank[v] = 1 + max(rank[w] for w in succ)
                    changed = True
            else:
                inside = [w for w in succ if w in rank]
                if inside:
                    best = min(inside, key=lambda w: (rank[w], ckey(w)))
                    rank[v] = rank[best] + 1
                    witness[v] = best
                    changed = True
    return set(rank), rank, witness


def _closure_prune(g: StochasticArena, region: set) -> set:
    region = set(region)
    changed = True
    while changed:
        changed = False
        for v in list(region):
            succ_in = [w for w in g.edges[v] if w in region]
            ok = bool(succ_in) if v in g.eloise else len(succ_in) == len(g.edges[v])
            if not ok:
                region.discard(v)
                changed = True
    return region


def _as_buchi_core(g: StochasticArena, target: frozenset):
    """Greatest region that is escape-proof and everywhere positively attracted
    to the target; returns (region, eloise choice map)."""
    region = set(g.vertices)
    while True:
        region = _closure_prune(g, region)
        if not region:
            return frozenset(), {}
        attracted, rank, witness = _positive_attractor(g, region, set(target))
        if attracted == region:
            choice = {}
            for v in csorted(region & g.eloise):
                if v in witness:
                    choice[v] = witness[v]
                else:
                    # target vertex at rank 0: restart by staying in the region
                    choice[v] = min(
                        (w for w in g.edges[v] if w in region), key=ckey
                    )
            return frozenset(region), choice
        region = attracted


def almost_sure_buchi(g: StochasticArena, target) -> tuple[frozenset, PositionalStrategy]:
    """Almost-sure repeated-reach winning set and a witnessing positional
    strategy (defined on the winning set's protagonist vertices)."""
    region, choice = _as_buchi_core(g, frozenset(target))
    return region, PositionalStrategy(ELOISE, choice)


def _absorb(g: StochasticArena, target: frozenset) -> StochasticArena:
    """Replace every target vertex by a random point self-loop."""
    edges = dict(g.edges)
    dist = dict(g.dist)
    for v in target & g.vertices:
        edges[v] = (v,)
        dist[v] = Distribution.point(v)
    return StochasticArena(
        eloise=g.eloise - target,
        abelard=g.abelard - target,
        random=g.random | (target & g.vertices),
        edges=edges,
        dist=dist,
        initial=g.initial,
    )


def almost_sure_reach(g: StochasticArena, target) -> tuple[frozenset, PositionalStrategy]:
    """Almost-sure reachability; reach-equivalent to repeated reach once the
    target is made absorbing."""
    target = frozenset(target)
    region, choice = _as_buchi_core(_absorb(g, target), target)
    full_choice = dict(choice)
    for v in region & g.eloise & target:
        full_choice[v] = g.edges[v][0]  # already won; any move is fine
    return region, PositionalStrategy(ELOISE, full_choice)


def check_buchi_strategy(g: StochasticArena, target, s: PositionalStrategy) -> bool:
    """Exact check that s visits the target infinitely often almost surely
    against every opponent behaviour."""
    m = fix_strategy(g, s)
    return not controller_positive_cobuchi(m, frozenset(target))


def check_reach_strategy(g: StochasticArena, target, s: PositionalStrategy) -> bool:
    m = fix_strategy(g, s)
    return not controller_positive_avoid(m, frozenset(target))


def eloise_choice_space(g: StochasticArena) -> int:
    n = 1
    for v in g.eloise:
        n *= len(g.edges[v])
    return n


def eloise_positional_strategies(g: StochasticArena):
    """All positional strategies for the protagonist, in canonical order."""
    vs = csorted(g.eloise)
    if not vs:
        yield PositionalStrategy(ELOISE, {})
        return
    for combo in itertools.product(*(g.edges[v] for v in vs)):
        yield PositionalStrategy(ELOISE, dict(zip(vs, combo)))


def abelard_positional_strategies(g: StochasticArena):
    """All positional strategies for the opponent, in canonical order."""
    vs = csorted(g.abelard)
    if not vs:
        yield PositionalStrategy(ABELARD, {})
        return
    for combo in itertools.product(*(g.edges[v] for v in vs)):
        yield PositionalStrategy(ABELARD, dict(zip(vs, combo)))


def as_markov_chain(m: Mdp, marked):
    """A choice-free MDP is a Markov chain."""
    from qualtree.markov import MarkovChain

    g = m.arena
    if g.eloise:
        raise ValueError("the controller still has choices to make")
    return MarkovChain(
        tuple(csorted(g.vertices)), g.initial, dict(g.dist), frozenset(marked)
    )


def total_strategy(g: StochasticArena, s: PositionalStrategy) -> PositionalStrategy:
    """Extend a partial strategy to every owned vertex (first edge elsewhere).

    Harmless for strategies produced by the solvers: from inside the
    winning region the play never visits the filled-in vertices.
    """
    owned = g.eloise if s.owner == ELOISE else g.abelard
    choice = dict(s.choice)
    for v in owned:
        choice.setdefault(v, g.edges[v][0])
    return PositionalStrategy(s.owner, choice)


def almost_sure_cobuchi(
    g: StochasticArena, target, choice_bound: int = 2**20
) -> bool:
    """Almost-sure finitely-many-visits verdict from the initial vertex.

    Solved by enumeration over the protagonist's positional strategies
    (positional strategies suffice on finite arenas); each candidate is
    refuted exactly by the opponent-as-controller analysis.
    """
    target = frozenset(target)
    if eloise_choice_space(g) > choice_bound:
        raise ResourceLimit("protagonist choice space", choice_bound)
    for s in eloise_positional_strategies(g):
        if not controller_positive_buchi(fix_strategy(g, s), target):
            return True
    return False


def buchi_to_reachability(g: StochasticArena, target) -> tuple[StochasticArena, frozenset]:
    """Gadget turning repeated reach into plain reach, almost-surely.

    Every target vertex s gets a fresh random gate with an even split
    between s and a single absorbing goal vertex, and every edge into s is
    rerouted through the gate.  Visiting targets infinitely often then
    reaches the goal almost surely, and conversely.
    """
    target = frozenset(target) & g.vertices
    goal = ("goal",)
    gate = {s: ("gate", s) for s in target}
    if goal in g.vertices or any(x in g.vertices for x in gate.values()):
        raise ValueError("gadget vertex names collide with the arena")

    def reroute(w):
        return gate[w] if w in target else w

    edges = {}
    dist = {}
    for v in g.vertices:
        edges[v] = tuple(reroute(w) for w in g.edges[v])
        if v in g.random:
            dist[v] = g.dist[v].map(reroute)
    for s in target:
        edges[gate[s]] = (goal, s)
        dist[gate[s]] = Distribution.half_half(goal, s)
    edges[goal] = (goal,)

    g2 = StochasticArena(
        eloise=g.eloise | {goal},
        abelard=g.abelard,
        random=g.random | frozenset(gate.values()),
        edges=edges,
        dist=dist,
        initial=g.initial,
    )
    return g2, frozenset({goal})


def with_initial(g: StochasticArena, v) -> StochasticArena:
    if v == g.initial:
        return g
    return StochasticArena(g.eloise, g.abelard, g.random, g.edges, g.dist, v)
