"""Error types shared across the package.

Two failure families are kept apart on purpose: bad input data
(InputError, CLI exit code 1) and violated internal invariants
(DefectError, CLI exit code 2).  A DefectError always names the
invariant that broke.
"""


class InputError(ValueError):
    """Raised when supplied data fails validation."""


class DefectError(RuntimeError):
    """Raised when an internal invariant is violated.

    Carries the invariant's name so reports and exit paths can surface
    which guarantee broke rather than a bare stack trace.
    """

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        self.detail = detail
        msg = f"invariant violated: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
