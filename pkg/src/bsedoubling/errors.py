"""Exception hierarchy for the BSE doubling solver.

All solver errors derive from :class:`BseError` so callers can catch the
whole family at once.  Errors that signal "retry with different data"
(shift, kappa, random Z) are distinct classes so drivers can react
mechanically.
"""


class BseError(Exception):
    """Base class for all solver errors."""


class NonFinite(BseError):
    """Input contains NaN or Inf entries."""


class DimensionMismatch(BseError):
    """Operands have incompatible shapes."""


class SingularMatrix(BseError):
    """A factorization pivot underflowed the relative threshold.

    Carries ``rcond``, a cheap reciprocal condition estimate of the
    offending matrix.
    """

    def __init__(self, msg, rcond=0.0):
        super().__init__(msg)
        self.rcond = rcond


class NoConvergence(BseError):
    """The iterative dense eigensolver backend failed to converge."""


class StructureViolation(BseError):
    """A matrix violates its required symmetry beyond tolerance.

    Carries ``defect``, the relative deviation that was measured.
    """

    def __init__(self, msg, defect=None):
        super().__init__(msg)
        self.defect = defect


class UnknownKind(BseError):
    """Unrecognized generator kind."""


class ParseError(BseError):
    """Matrix Market file could not be parsed.  Carries ``line``."""

    def __init__(self, msg, line):
        super().__init__(f"{msg} (line {line})")
        self.line = line


class NonPositive(BseError):
    """A user-supplied shift or parameter must be positive."""


class ShiftHitsSpectrum(BseError):
    """The Cayley shift makes alpha*I - A (or alpha itself) singular;
    pick a different alpha."""


class RSingular(BseError):
    """The Cayley auxiliary matrix R is singular; pick a different alpha."""


class BreakdownDetected(BseError):
    """I - conj(F) F is singular or too ill-conditioned for a doubling
    step; a remedy is required."""


class ZSingular(BseError):
    """The double-Cayley pivot matrix Z is numerically singular, meaning
    the theta precondition was violated in floating point."""


class GammaHitsSpectrum(BseError):
    """The rebuild shift gamma hits the compressed spectrum; retry with a
    different kappa."""


class DctFailed(BseError):
    """No usable theta, or all kappa retries failed; fall back to the
    three-recursion remedy."""


class ZIllConditioned(BseError):
    """I + F Z (or I + G Z) is too ill-conditioned; redraw Z."""


class TriBreakdown(BseError):
    """I - G H is too ill-conditioned for a three-recursion step; a Z
    rebase is required."""


class NotConvergedTri(BseError):
    """fold_back called before the three-recursion state converged."""


class NotConverged(BseError):
    """The solve hit max_iter or stagnated.  Carries the partial report."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class MatchFailure(BseError):
    """Eigenvalue multisets of different sizes cannot be matched."""


class MissingDipoles(BseError):
    """Absorption spectra require dipole vectors."""
