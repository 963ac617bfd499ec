"""Canonical ordering of heterogeneous state/vertex values.

States are interned strings, but constructed game vertices are nested
tuples and beliefs are frozensets.  ``ckey`` gives one total order over
all of them so every iteration in the toolkit can be made deterministic.
"""

from fractions import Fraction


def ckey(x):
    if isinstance(x, str):
        return (0, x)
    if isinstance(x, bool):
        return (1, int(x))
    if isinstance(x, int):
        return (1, x)
    if isinstance(x, Fraction):
        return (2, x)
    if isinstance(x, tuple):
        return (3, tuple(ckey(y) for y in x))
    if isinstance(x, frozenset):
        return (4, tuple(sorted(ckey(y) for y in x)))
    return (5, repr(x))


def csorted(xs):
    return sorted(xs, key=ckey)
