"""Iterative graph algorithms shared by the Markov and game analyses."""

from __future__ import annotations

from typing import Callable, Iterable

from qualtree.ordering import csorted


def reachable(starts: Iterable, succ: Callable) -> set:
    seen = set(starts)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in succ(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def sccs(nodes: Iterable, succ: Callable) -> list[list]:
    """Tarjan's algorithm, iterative to survive deep products.

    Components come out in reverse topological order; node exploration is
    canonically sorted so the decomposition is deterministic.
    """
    nodes = csorted(nodes)
    nodeset = set(nodes)
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(csorted(w for w in succ(root) if w in nodeset)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(csorted(x for x in succ(w) if x in nodeset))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out
