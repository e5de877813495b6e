"""Exception types."""


class CertError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(CertError, ValueError):
    """An operation was called on input outside its domain."""


class DegenerateFormError(CertError, ValueError):
    """A bilinear form is numerically degenerate."""


class FormViolationError(CertError, ValueError):
    """A matrix fails to preserve the ambient form."""


class NotProximalError(CertError, ValueError):
    """An element has no unique attracting fixed point."""


class DomainError(CertError, ValueError):
    """A convex domain is empty, unbounded, or a point lies outside it."""


class HypothesisError(CertError):
    """Coxeter pipeline hypotheses failed; ``failed`` names the predicates."""

    def __init__(self, failed, report=None):
        self.failed = tuple(failed)
        self.report = report
        super().__init__("hypotheses failed: " + ", ".join(self.failed))


class NumericalFailure(CertError, RuntimeError):
    """An iterative or sampling routine did not reach its goal."""
