class ResourceLimit(Exception):
    """An instance exceeded a configured size bound.

    Distinct from a verdict: callers either surface it as a third outcome
    or re-raise.
    """

    def __init__(self, what: str, bound):
        super().__init__(f"{what} exceeds configured bound {bound}")
        self.what = what
        self.bound = bound


class DisagreementError(Exception):
    """Two routes that must agree (solver vs. oracle, witness vs. check) did not."""


class FormatError(ValueError):
    """Malformed input file or value."""
