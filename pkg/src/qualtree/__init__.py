"""Toolkit for tree automata under almost-sure branch semantics.

Everything that influences a verdict is computed with exact rational
arithmetic; floating point only ever appears in statistical test oracles.
"""

from qualtree.dist import Distribution
from qualtree.errors import DisagreementError, FormatError, ResourceLimit

__all__ = ["Distribution", "DisagreementError", "FormatError", "ResourceLimit"]
