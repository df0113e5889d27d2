"""Domain-specific error types raised across the simulation pipeline."""


class SingularGeometryError(ValueError):
    """A field point coincides with an array element, so the response diverges."""


class DegenerateChannelError(ValueError):
    """A channel vector is identically zero (empty effective visibility region)."""


class UnidentifiableReflectionError(ValueError):
    """The probe is orthogonal to the hypothesized channel, so b drops out of the model."""


class InfeasibleWindowError(ValueError):
    """No index window satisfies the visibility-region size constraints."""


class SingularFimError(ValueError):
    """The Fisher information matrix is singular or too ill-conditioned to invert."""


class InfeasibleBlockError(ValueError):
    """Sensing would consume the whole transmission block, leaving no charging time."""
