"""Emptiness of alternating repeated-reach tree automata.

The decision runs through a finite partial-observation game.  The
protagonist announces, step by step, a tree label together with a local
transition choice for each of her automaton states; the opponent resolves
his own states' transitions with full knowledge; a fair coin picks the
direction.  The protagonist observes only directions, never the current
automaton state, which prevents her from adapting the announced tree to
the opponent's choices.  She wins from the initial vertex iff the
automaton accepts some tree, and a winning finite-memory strategy unfolds
into a regular witness tree.

Strategy semantics here is the normative anchor: a pure strategy with
knowledge-set memory either passes or fails the exact product check
`check_observation_strategy`.  The solver searches that strategy space
directly, after two sound short-cuts (a full-information upper bound and a
sure-winning knowledge-game lower bound); the blunt enumeration in
`solve_by_enumeration` re-derives every verdict independently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from qualtree.acceptance import qualitative_membership
from qualtree.automata import (
    AlternatingTreeAutomaton,
    buchi,
)
from qualtree.dist import Distribution
from qualtree.errors import DisagreementError, ResourceLimit
from qualtree.games import (
    MdpView,
    StochasticArena,
    _positive_cobuchi_view,
    almost_sure_buchi,
)
from qualtree.ordering import ckey, csorted
from qualtree.trees import RegularTree

EPS_OBS = "e"
DIRECTIONS = ("0", "1")


@dataclass(frozen=True)
class LocalChoice:
    """One split-transition target pair per protagonist state."""

    assign: tuple[tuple[str, tuple[str, str]], ...]  # sorted by state

    @classmethod
    def of(cls, mapping: dict) -> "LocalChoice":
        return cls(tuple(sorted(mapping.items())))

    def get(self, q: str) -> tuple[str, str]:
        return dict(self.assign)[q]

    def as_dict(self) -> dict:
        return dict(self.assign)


@dataclass(frozen=True)
class EmptinessAction:
    symbol: str
    choice: LocalChoice


@dataclass(frozen=True)
class ImperfectInfoArena:
    """Finite arena where the protagonist sees only observation classes.

    For every vertex and action there is at least one transition
    distribution; the opponent picks among them with full information.
    """

    vertices: tuple
    initial: object
    actions: tuple
    trans: dict  # (vertex, action) -> tuple[Distribution, ...]
    obs: dict  # vertex -> observation id

    def __post_init__(self):
        vs = set(self.vertices)
        if self.initial not in vs:
            raise ValueError("initial vertex unknown")
        for v in self.vertices:
            if v not in self.obs:
                raise ValueError(f"observation undefined for {v!r}")
            for a in self.actions:
                ds = self.trans.get((v, a), ())
                if not ds:
                    raise ValueError(f"no transition for ({v!r}, {a!r})")
                for d in ds:
                    d.require_probability(f"transition at ({v!r}, {a!r})")
                    if not d.support() <= vs:
                        raise ValueError(f"transition at ({v!r}, {a!r}) leaves arena")

    def observation_classes(self) -> dict:
        classes: dict = {}
        for v in self.vertices:
            classes.setdefault(self.obs[v], set()).add(v)
        return classes


@dataclass(frozen=True)
class ObservationStrategy:
    """Finite-memory observation-based strategy.

    `act` maps (memory, current observation) to an action; after the next
    vertex is revealed, `update` maps (memory, new observation, action
    just played) to the next memory state.
    """

    memory: tuple
    init_memory: object
    act: dict
    update: dict


def build_emptiness_game(
    a: AlternatingTreeAutomaton, final: frozenset, action_cap: int = 2**18
) -> tuple[ImperfectInfoArena, frozenset]:
    """The observation game deciding emptiness; target is the final rows.

    Vertices are (state, last direction) plus a fresh root; all vertices
    with the same direction are indistinguishable.  Actions pair a tree
    symbol with a local choice for every protagonist state.
    """
    rows: dict = {}
    for q in a.states:
        for s in a.alphabet:
            rows[(q, s)] = a.rows(q, s)
            if not rows[(q, s)]:
                raise ValueError(f"no transition for state {q} on symbol {s}")

    e_states = csorted(a.eloise)
    n_actions = 0
    for s in a.alphabet:
        count = 1
        for q in e_states:
            count *= len(rows[(q, s)])
        n_actions += count
    if n_actions > action_cap:
        raise ResourceLimit("action set size", action_cap)

    actions = []
    for s in a.alphabet:
        for combo in itertools.product(*(rows[(q, s)] for q in e_states)):
            tau = LocalChoice.of({q: (t[2], t[3]) for q, t in zip(e_states, combo)})
            actions.append(EmptinessAction(s, tau))

    root = (a.initial, EPS_OBS)
    vertices = [root] + [(q, d) for q in csorted(a.states) for d in DIRECTIONS]
    obs = {v: v[1] for v in vertices}

    def flip(q0: str, q1: str) -> Distribution:
        return Distribution.half_half((q0, "0"), (q1, "1"))

    trans: dict = {}
    for v in vertices:
        q = v[0]
        for act in actions:
            if q in a.eloise:
                q0, q1 = act.choice.get(q)
                trans[(v, act)] = (flip(q0, q1),)
            else:
                trans[(v, act)] = tuple(
                    flip(q0, q1) for (_, _, q0, q1) in rows[(q, act.symbol)]
                )

    arena = ImperfectInfoArena(
        vertices=tuple(vertices),
        initial=root,
        actions=tuple(actions),
        trans=trans,
        obs=obs,
    )
    target = frozenset((q, d) for q in final for d in DIRECTIONS)
    return arena, target


def fully_observable(g: ImperfectInfoArena) -> ImperfectInfoArena:
    """Variant where every vertex is its own observation class.

    Deliberately *not* equivalent to the real game: it lets the
    protagonist adapt to the opponent's state, which the blind game
    exists to prevent.  Kept for regression tests of that separation.
    """
    return ImperfectInfoArena(
        vertices=g.vertices,
        initial=g.initial,
        actions=g.actions,
        trans=g.trans,
        obs={v: v for v in g.vertices},
    )


# ---------------------------------------------------------------------------
# Strategy checking (the semantic anchor).
# ---------------------------------------------------------------------------


def _product_view(g: ImperfectInfoArena, s: ObservationStrategy) -> tuple[MdpView, frozenset]:
    """Opponent-as-controller MDP over (vertex, memory) pairs."""
    start = (g.initial, s.init_memory)
    states: list = []
    moves: dict = {}
    seen = {start}
    queue = [start]
    while queue:
        v, m = queue.pop()
        states.append((v, m))
        o = g.obs[v]
        if (m, o) not in s.act:
            raise ValueError(f"strategy act undefined on memory {m!r}, observation {o!r}")
        act = s.act[(m, o)]
        mvs = []
        for d in g.trans[(v, act)]:
            def push(v2, _m=m, _a=act):
                o2 = g.obs[v2]
                key = (_m, o2, _a)
                if key not in s.update:
                    raise ValueError(
                        f"strategy update undefined on memory {_m!r}, "
                        f"observation {o2!r}, action {_a!r}"
                    )
                return (v2, s.update[key])

            d2 = d.map(push)
            mvs.append(d2)
            for st in d2.support():
                if st not in seen:
                    seen.add(st)
                    queue.append(st)
        moves[(v, m)] = tuple(mvs)
    return MdpView(tuple(csorted(states)), start, moves), frozenset(seen)


def check_observation_strategy(
    g: ImperfectInfoArena, target: frozenset, s: ObservationStrategy
) -> bool:
    """Exact verdict: does s visit the target infinitely often almost surely
    against every opponent resolution?

    The opponent, controlling the product MDP, refutes s exactly when some
    end component avoiding the target is reachable.
    """
    view, _ = _product_view(g, s)
    bad = frozenset(st for st in view.states if st[0] in target)
    return not _positive_cobuchi_view(view, bad, view.initial)


# ---------------------------------------------------------------------------
# Knowledge sets.
# ---------------------------------------------------------------------------


def initial_belief(g: ImperfectInfoArena) -> frozenset:
    return frozenset({g.initial})


def belief_post(g: ImperfectInfoArena, b: frozenset, action, o) -> frozenset:
    """All vertices compatible with one more step and the new observation."""
    out = set()
    for v in b:
        for d in g.trans[(v, action)]:
            for v2 in d.support():
                if g.obs[v2] == o:
                    out.add(v2)
    return frozenset(out)


def reachable_beliefs(g: ImperfectInfoArena, cap: int):
    """Breadth-first knowledge-set exploration.

    Returns the discovery-ordered belief list and the successor table
    {(belief, action): {observation: belief}}.
    """
    b0 = initial_belief(g)
    order = [b0]
    seen = {b0}
    post: dict = {}
    i = 0
    while i < len(order):
        b = order[i]
        i += 1
        for act in g.actions:
            branches: dict = {}
            for o in csorted({g.obs[v2] for v in b for d in g.trans[(v, act)] for v2 in d.support()}):
                b2 = belief_post(g, b, act, o)
                if b2:
                    branches[o] = b2
                    if b2 not in seen:
                        seen.add(b2)
                        order.append(b2)
                        if len(order) > cap:
                            raise ResourceLimit("reachable knowledge sets", cap)
            post[(b, act)] = branches
    return order, post


def _belief_obs(g: ImperfectInfoArena, b: frozenset):
    return g.obs[min(b, key=ckey)]


def _materialize(g: ImperfectInfoArena, assign: dict, post: dict) -> ObservationStrategy:
    """Package a per-belief action table as an ObservationStrategy,
    restricted to the beliefs it actually reaches."""
    b0 = initial_belief(g)
    reached = [b0]
    seen = {b0}
    act: dict = {}
    update: dict = {}
    i = 0
    while i < len(reached):
        b = reached[i]
        i += 1
        a = assign[b]
        act[(b, _belief_obs(g, b))] = a
        for o, b2 in sorted(post[(b, a)].items(), key=lambda kv: ckey(kv[0])):
            update[(b, o, a)] = b2
            if b2 not in seen:
                seen.add(b2)
                reached.append(b2)
    return ObservationStrategy(
        memory=tuple(reached), init_memory=b0, act=act, update=update
    )


def _first_unassigned(g, assign: dict, post: dict):
    """First belief reached under the partial table but not yet assigned,
    in breadth-first order; None when the table is closed."""
    b0 = initial_belief(g)
    queue = [b0]
    seen = {b0}
    i = 0
    while i < len(queue):
        b = queue[i]
        i += 1
        if b not in assign:
            return b
        for _, b2 in sorted(post[(b, assign[b])].items(), key=lambda kv: ckey(kv[0])):
            if b2 not in seen:
                seen.add(b2)
                queue.append(b2)
    return None


def _partial_product(g: ImperfectInfoArena, target: frozenset, assign: dict, post: dict):
    """Product restricted to assigned beliefs; unassigned pairs are left open
    (no moves), so they can never participate in an end component."""
    start = (g.initial, initial_belief(g))
    states: list = []
    moves: dict = {}
    seen = {start}
    queue = [start]
    while queue:
        v, b = queue.pop()
        if b not in assign:
            continue
        states.append((v, b))
        a = assign[b]
        mvs = []
        for d in g.trans[(v, a)]:
            d2 = d.map(lambda v2: (v2, post[(b, a)][g.obs[v2]]))
            mvs.append(d2)
            for st in d2.support():
                if st not in seen:
                    seen.add(st)
                    queue.append(st)
        moves[(v, b)] = tuple(mvs)
    view = MdpView(tuple(csorted(states)), start, moves)
    bad = frozenset(st for st in states if st[0] in target)
    return view, bad


def _partial_refuted(g, target, assign, post) -> bool:
    """Sound refutation of a partial table: a target-free end component made
    of already-assigned beliefs survives every completion."""
    view, bad_target = _partial_product(g, target, assign, post)
    safe = frozenset(view.states) - bad_target
    from qualtree.games import mec_decomposition

    return bool(mec_decomposition(view, within=safe))


def _closed_table_wins(g, target, assign, post) -> bool:
    view, bad_target = _partial_product(g, target, assign, post)
    return not _positive_cobuchi_view(view, bad_target, view.initial)


def _search_belief_table(g, target, post, actions, *, prune: bool):
    """Backtracking search for a winning per-belief action table.

    With `prune` the search discards partial tables refuted by a closed
    target-free end component; without it this is the blunt enumeration
    used as the oracle.
    """
    assign: dict = {}
    trail: list = []  # (belief, index into actions)

    def backtrack() -> bool:
        while trail:
            b, i = trail[-1]
            if i + 1 < len(actions):
                trail[-1] = (b, i + 1)
                assign[b] = actions[i + 1]
                return True
            trail.pop()
            del assign[b]
        return False

    while True:
        if prune and trail and _partial_refuted(g, target, assign, post):
            if not backtrack():
                return None
            continue
        b = _first_unassigned(g, assign, post)
        if b is None:
            if _closed_table_wins(g, target, assign, post):
                return dict(assign)
            if not backtrack():
                return None
            continue
        trail.append((b, 0))
        assign[b] = actions[0]


# ---------------------------------------------------------------------------
# Sound short-cuts.
# ---------------------------------------------------------------------------


def _full_information_arena(g: ImperfectInfoArena, target: frozenset):
    """Perfect-information relaxation; winning here is necessary for the
    blind protagonist to win."""
    ve, va, vr = set(), set(), set()
    edges: dict = {}
    dist: dict = {}
    for v in g.vertices:
        pv = ("p", v)
        ve.add(pv)
        edges[pv] = tuple(("c", v, a) for a in g.actions)
        for a in g.actions:
            cv = ("c", v, a)
            va.add(cv)
            ds = g.trans[(v, a)]
            edges[cv] = tuple(("z", v, a, i) for i in range(len(ds)))
            for i, d in enumerate(ds):
                zv = ("z", v, a, i)
                vr.add(zv)
                d2 = d.map(lambda v2: ("p", v2))
                dist[zv] = d2
                edges[zv] = tuple(csorted(d2.support()))
    arena = StochasticArena(
        eloise=frozenset(ve),
        abelard=frozenset(va),
        random=frozenset(vr),
        edges=edges,
        dist=dist,
        initial=("p", g.initial),
    )
    return arena, frozenset(("p", v) for v in target)


def _wins_full_information(g, target) -> bool:
    arena, tgt = _full_information_arena(g, target)
    region, _ = almost_sure_buchi(arena, tgt)
    return arena.initial in region


def _det_attractor(region, owner_is_e, succ, base, for_eloise: bool):
    attr = set(base) & region
    witness: dict = {}
    changed = True
    while changed:
        changed = False
        for v in csorted(region - attr):
            inside = [w for w in succ(v) if w in region]
            if owner_is_e(v) == for_eloise:
                hit = [w for w in inside if w in attr]
                if hit:
                    attr.add(v)
                    witness[v] = min(hit, key=ckey)
                    changed = True
            else:
                if all(w in attr for w in inside):
                    attr.add(v)
                    changed = True
    return attr, witness


def _sure_belief_strategy(g, target, beliefs, post):
    """Sure-winning play on knowledge sets alone: if every knowledge set on
    every play can be driven through all-target sets infinitely often, the
    underlying blind strategy wins outright.  Sound, not complete."""
    nodes = set()
    succ: dict = {}
    for b in beliefs:
        nodes.add(b)
        succ[b] = [(b, a) for a in g.actions]
        for a in g.actions:
            nodes.add((b, a))
            succ[(b, a)] = [b2 for _, b2 in sorted(post[(b, a)].items())]

    def owner_is_e(v):
        return isinstance(v, frozenset)

    goal = {b for b in beliefs if b <= target}
    region = set(nodes)
    witness_keep: dict = {}
    while True:
        attr, witness = _det_attractor(region, owner_is_e, lambda v: succ[v], goal & region, True)
        witness_keep = witness
        lost = region - attr
        if not lost:
            break
        trap, _ = _det_attractor(region, owner_is_e, lambda v: succ[v], lost, False)
        region -= trap
        if initial_belief(g) not in region:
            return None
    if initial_belief(g) not in region:
        return None

    assign: dict = {}
    for b in beliefs:
        if b not in region:
            continue
        if b in witness_keep:
            assign[b] = witness_keep[b][1]  # the chosen (belief, action) node
        else:
            stay = [a for a in g.actions if (b, a) in region]
            if not stay:
                return None
            assign[b] = stay[0]
    if any(b not in assign for b in _table_closure(g, assign, post)):
        return None
    return assign


def _table_closure(g, assign, post):
    b0 = initial_belief(g)
    out = [b0]
    seen = {b0}
    i = 0
    while i < len(out):
        b = out[i]
        i += 1
        if b not in assign:
            return out  # caller treats an open reachable belief as failure
        for _, b2 in sorted(post[(b, assign[b])].items(), key=lambda kv: ckey(kv[0])):
            if b2 not in seen:
                seen.add(b2)
                out.append(b2)
    return out


# ---------------------------------------------------------------------------
# Solver and oracle.
# ---------------------------------------------------------------------------


def solve_imperfect_buchi(
    g: ImperfectInfoArena, target, *, belief_cap: int = 2**18
) -> tuple[bool, ObservationStrategy | None]:
    """Decide almost-sure repeated reach for the blind protagonist.

    Verdict true iff some pure knowledge-set strategy passes the exact
    product check; the returned witness always does.
    """
    target = frozenset(target)
    if not target:
        return False, None
    beliefs, post = reachable_beliefs(g, belief_cap)
    if not _wins_full_information(g, target):
        return False, None
    assign = _sure_belief_strategy(g, target, beliefs, post)
    if assign is None:
        assign = _search_belief_table(g, target, post, list(g.actions), prune=True)
    if assign is None:
        return False, None
    strat = _materialize(g, assign, post)
    if not check_observation_strategy(g, target, strat):
        raise DisagreementError("synthesised strategy failed its own check")
    return True, strat


def solve_by_enumeration(
    g: ImperfectInfoArena, target, *, belief_cap: int = 2**18
) -> tuple[bool, ObservationStrategy | None]:
    """Blunt oracle: try every per-belief action table, judging each complete
    table with the public strategy check."""
    target = frozenset(target)
    if not target:
        return False, None
    beliefs, post = reachable_beliefs(g, belief_cap)
    assign: dict = {}
    trail: list = []
    actions = list(g.actions)

    def backtrack() -> bool:
        while trail:
            b, i = trail[-1]
            if i + 1 < len(actions):
                trail[-1] = (b, i + 1)
                assign[b] = actions[i + 1]
                return True
            trail.pop()
            del assign[b]
        return False

    while True:
        b = _first_unassigned(g, assign, post)
        if b is None:
            strat = _materialize(g, assign, post)
            if check_observation_strategy(g, target, strat):
                return True, strat
            if not backtrack():
                return False, None
            continue
        trail.append((b, 0))
        assign[b] = actions[0]


def enumerate_bit_enriched(
    g: ImperfectInfoArena, target, *, belief_cap: int = 2**14
) -> tuple[bool, ObservationStrategy | None]:
    """Enumeration over (knowledge set, extra bit) memories.

    Investigation knob: on any instance where this wins but the plain
    knowledge-set enumeration loses, the flip must be surfaced, never
    silently absorbed.
    """
    target = frozenset(target)
    if not target:
        return False, None
    _, post = reachable_beliefs(g, belief_cap)
    actions = list(g.actions)
    m0 = (initial_belief(g), 0)

    def choices(m):
        b, _ = m
        out = []
        for a in actions:
            branches = sorted(post[(b, a)].items(), key=lambda kv: ckey(kv[0]))
            for bits in itertools.product((0, 1), repeat=len(branches)):
                out.append((a, tuple((o, (b2, bit)) for (o, b2), bit in zip(branches, bits))))
        return out

    def closure(assign):
        reached = [m0]
        seen = {m0}
        i = 0
        while i < len(reached):
            m = reached[i]
            i += 1
            if m not in assign:
                return reached, m
            for _, m2 in assign[m][1]:
                if m2 not in seen:
                    seen.add(m2)
                    reached.append(m2)
        return reached, None

    assign: dict = {}
    trail: list = []

    def backtrack() -> bool:
        while trail:
            m, i, opts = trail[-1]
            if i + 1 < len(opts):
                trail[-1] = (m, i + 1, opts)
                assign[m] = opts[i + 1]
                return True
            trail.pop()
            del assign[m]
        return False

    while True:
        reached, open_m = closure(assign)
        if open_m is None:
            act = {(m, _belief_obs(g, m[0])): assign[m][0] for m in reached}
            update = {
                (m, o, assign[m][0]): m2 for m in reached for (o, m2) in assign[m][1]
            }
            strat = ObservationStrategy(tuple(reached), m0, act, update)
            if check_observation_strategy(g, target, strat):
                return True, strat
            if not backtrack():
                return False, None
            continue
        opts = choices(open_m)
        trail.append((open_m, 0, opts))
        assign[open_m] = opts[0]


# ---------------------------------------------------------------------------
# Witness extraction and the end-to-end decision.
# ---------------------------------------------------------------------------


def extract_witness(
    a: AlternatingTreeAutomaton, final: frozenset, s: ObservationStrategy
) -> tuple[RegularTree, dict]:
    """Unfold a winning strategy into the regular tree it announces.

    Observations in the emptiness game are directions, so reachable
    (memory, observation) pairs form a finite binary node graph; each node
    is labelled with the announced symbol and carries the local choice for
    the protagonist's states.
    """
    start = (s.init_memory, EPS_OBS)
    keys = [start]
    index = {start: 0}
    i = 0
    while i < len(keys):
        m, o = keys[i]
        i += 1
        if (m, o) not in s.act:
            raise ValueError(f"strategy act undefined on reachable pair ({m!r}, {o!r})")
        action = s.act[(m, o)]
        for d in DIRECTIONS:
            if (m, d, action) not in s.update:
                raise ValueError(
                    f"strategy update undefined on reachable ({m!r}, {d!r}, {action!r})"
                )
            child = (s.update[(m, d, action)], d)
            if child not in index:
                index[child] = len(keys)
                keys.append(child)

    width = len(str(len(keys) - 1))
    ids = {k: f"t{index[k]:0{width}d}" for k in keys}
    label: dict = {}
    succ0: dict = {}
    succ1: dict = {}
    choices: dict = {}
    for k in keys:
        m, o = k
        action = s.act[(m, o)]
        label[ids[k]] = action.symbol
        choices[ids[k]] = action.choice
        succ0[ids[k]] = ids[(s.update[(m, "0", action)], "0")]
        succ1[ids[k]] = ids[(s.update[(m, "1", action)], "1")]
    tree = RegularTree(
        nodes=tuple(ids[k] for k in keys),
        root=ids[start],
        label=label,
        succ0=succ0,
        succ1=succ1,
    )
    return tree, choices


@dataclass(frozen=True)
class EmptinessResult:
    kind: str  # "empty" | "nonempty" | "resource-exceeded"
    witness: RegularTree | None = None
    strategy: ObservationStrategy | None = None
    local_choices: dict | None = field(default=None, compare=False)

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"


def check_emptiness(
    a: AlternatingTreeAutomaton,
    final,
    *,
    belief_cap: int = 2**18,
    action_cap: int = 2**18,
) -> EmptinessResult:
    """Full decision: empty, or non-empty with an independently verified
    regular witness tree; resource exhaustion is a distinct third outcome."""
    final = frozenset(final)
    try:
        game, target = build_emptiness_game(a, final, action_cap=action_cap)
        verdict, strat = solve_imperfect_buchi(game, target, belief_cap=belief_cap)
    except ResourceLimit:
        return EmptinessResult("resource-exceeded")
    if not verdict:
        return EmptinessResult("empty")
    tree, choices = extract_witness(a, final, strat)
    if not qualitative_membership(a, buchi(final), tree):
        raise DisagreementError("extracted witness failed the membership check")
    return EmptinessResult("nonempty", witness=tree, strategy=strat, local_choices=choices)
