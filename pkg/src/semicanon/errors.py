"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: parse problems give 1, contract
violations give 2 and numeric failures give 3.
"""


class SemicanonError(Exception):
    """Base class for all library errors."""


class MalformedInput(SemicanonError, ValueError):
    """Input could not be parsed or has inconsistent dimensions."""


class ContractViolation(SemicanonError):
    """A documented precondition of an operation does not hold."""


class HypothesisViolation(ContractViolation):
    """A required hypothesis (e.g. 0 < m < n) is not met."""


class NumericFailure(SemicanonError):
    """Arithmetic could not produce a certified answer."""


class UnsupportedSpectrum(NumericFailure):
    """Exact backend met eigenvalues that are not Gaussian rationals."""


class NotRepresentable(UnsupportedSpectrum):
    """Exact backend needs a square root that does not exist in Q(i).

    Raised when an orthonormal (or +-1 normalized) basis of a subspace
    cannot be found over the Gaussian rationals.
    """


class IndeterminateSpectrum(NumericFailure):
    """Float backend cannot separate eigenvalue clusters under the policy."""


class NoUniqueSolution(NumericFailure):
    """A Sylvester equation has intersecting spectra."""


class NonConvergence(NumericFailure):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class InternalInconsistency(NumericFailure):
    """Two routes to the same answer disagree (tolerance alarm)."""
