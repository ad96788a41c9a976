class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class InvalidSpecError(ValueError):
    """An operator, surface or experiment specification is malformed."""


class AlignmentError(ValueError):
    """A box-counting level does not tile the sampled grid."""
