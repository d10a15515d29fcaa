"""Exception types shared across the package."""


class ShockStabError(Exception):
    """Base class for package errors."""


class UsageError(ShockStabError, ValueError):
    """Bad arguments or configuration (dimension mismatch, invalid family, ...)."""


class DegenerateBaseError(UsageError):
    """Base state lies on the degenerate manifold; no Lax shock family structure."""


class InvariantViolation(ShockStabError, RuntimeError):
    """A cross-checked identity or model invariant failed beyond tolerance."""


class CertificationFailure(ShockStabError, RuntimeError):
    """No contraction weight could be certified down to the search floor."""


class NumericalAbort(ShockStabError, RuntimeError):
    """A computation left its valid domain (state outside box, NaN, blow-up)."""
