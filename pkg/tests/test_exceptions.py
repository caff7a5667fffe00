"""Tests for custom exceptions."""

import pytest
from isolab.exceptions import (
    IsolabError,
    InvalidStateError,
    NotAStateError,
    InvalidQuadratureError,
    AmbiguousToleranceError,
    NotTracePreservingError,
    InvalidChannelError,
    InvalidResolutionError,
    MalformedInputError,
)


def test_isolab_error_is_base_exception():
    """Test that IsolabError is the base exception."""
    error = IsolabError("Test error")
    assert isinstance(error, Exception)
    assert str(error) == "Test error"


@pytest.mark.parametrize("error_class", [
    InvalidStateError,
    InvalidQuadratureError,
    NotTracePreservingError,
    InvalidChannelError,
    InvalidResolutionError,
    MalformedInputError,
])
def test_domain_errors_inherit_from_base(error_class):
    """Test that every domain error inherits from IsolabError."""
    error = error_class("Something went wrong")
    assert isinstance(error, IsolabError)
    assert str(error) == "Something went wrong"


def test_not_a_state_error_carries_min_eigenvalue():
    """Test that NotAStateError is an InvalidStateError with the offending eigenvalue."""
    error = NotAStateError("Outside the state set", min_eigenvalue=-0.25)
    assert isinstance(error, InvalidStateError)
    assert error.min_eigenvalue == -0.25


def test_ambiguous_tolerance_error_attributes():
    """Test that AmbiguousToleranceError keeps quantity, value and threshold."""
    error = AmbiguousToleranceError("kernel", 3e-9, 1e-8)
    assert isinstance(error, IsolabError)
    assert error.quantity == "kernel"
    assert error.value == 3e-9
    assert error.threshold == 1e-8
    assert "kernel" in str(error)


def test_ambiguous_tolerance_error_json_diagnostic():
    """Test that to_json_dict() gives the structured diagnostic."""
    error = AmbiguousToleranceError("pi_axis", 2e-9, 1e-8)
    assert error.to_json_dict() == {
        'error': 'ambiguous-at-tolerance',
        'quantity': 'pi_axis',
        'value': 2e-9,
        'threshold': 1e-8,
    }


def test_exceptions_can_be_raised_and_caught():
    """Test that exceptions can be raised and caught by the base class."""
    with pytest.raises(IsolabError):
        raise MalformedInputError("bad json")

    with pytest.raises(InvalidStateError):
        raise NotAStateError("negative", min_eigenvalue=-1.0)
