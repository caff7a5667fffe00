"""Custom exceptions for isolab."""


class IsolabError(Exception):
    """Base exception for isolab."""
    pass


class InvalidStateError(IsolabError):
    """Density matrix is not Hermitian, not unit trace, or not PSD."""
    pass


class NotAStateError(InvalidStateError):
    """A Pauli triple (a, b, T) lies outside the two-qubit state set."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class InvalidQuadratureError(IsolabError):
    """Quadrature size too small, or rule used with the wrong subgroup."""
    pass


class AmbiguousToleranceError(IsolabError):
    """A decision residual falls inside the ambiguity band around the threshold."""

    def __init__(self, quantity: str, value: float, threshold: float):
        super().__init__(
            f"{quantity} residual {value:.3e} is within a decade of the "
            f"threshold {threshold:.3e}; adjust tol or use smoothed classification"
        )
        self.quantity = quantity
        self.value = value
        self.threshold = threshold

    def to_json_dict(self) -> dict:
        """Structured diagnostic for the command line."""
        return {
            'error': 'ambiguous-at-tolerance',
            'quantity': self.quantity,
            'value': self.value,
            'threshold': self.threshold,
        }


class NotTracePreservingError(IsolabError):
    """Kraus operators do not sum to the identity."""
    pass


class InvalidChannelError(IsolabError):
    """Pauli transfer matrix is not completely positive."""
    pass


class InvalidResolutionError(IsolabError):
    """Scan resolution or smoothing scale out of range."""
    pass


class MalformedInputError(IsolabError):
    """JSON input does not match any accepted schema."""
    pass
