"""
Custom exceptions for Dephasing Tomography.

This module defines custom exceptions used throughout the application to provide
more specific error information. The CLI maps each family to a stable exit code:
validation errors to 2, I/O errors to 3 and numerical failures to 4.
"""
from typing import Optional, Dict, Any, List


class TomographyError(Exception):
    """Base exception for all Dephasing Tomography errors."""
    pass


class ValidationError(TomographyError):
    """Exception raised for parameter validation errors."""

    def __init__(self, message: str, errors: Optional[List[Dict[str, str]]] = None):
        """
        Initialize a ValidationError.

        Args:
            message: Error message
            errors: Optional list of validation errors
        """
        self.errors = errors or []
        super().__init__(message)

    def __str__(self) -> str:
        """Return a string representation of the error."""
        if not self.errors:
            return super().__str__()

        error_str = super().__str__() + "\n"
        for error in self.errors:
            for key, value in error.items():
                error_str += f"- {key}: {value}\n"
        return error_str


class DomainError(ValidationError, ValueError):
    """Exception raised when an argument lies outside an operation's domain (e.g. t < 0)."""
    pass


class IllPosedError(ValidationError):
    """Exception raised when the data cannot identify every parameter of a family."""
    pass


class UnsupportedOperationError(ValidationError):
    """Exception raised when an operation is undefined for a model family."""

    def __init__(self, operation: str, kind: str):
        """
        Initialize an UnsupportedOperationError.

        Args:
            operation: Name of the rejected operation
            kind: Model family that rejects it
        """
        self.operation = operation
        self.kind = kind
        super().__init__(f"{operation} is not supported for {kind} models")


class ConfigurationError(TomographyError):
    """Exception raised for configuration errors."""

    def __init__(self, message: str, config_key: Optional[str] = None):
        """
        Initialize a ConfigurationError.

        Args:
            message: Error message
            config_key: Optional configuration key
        """
        self.config_key = config_key

        if config_key:
            message = f"Configuration error for '{config_key}': {message}"
        else:
            message = f"Configuration error: {message}"

        super().__init__(message)


class ResourceNotFoundError(TomographyError):
    """Exception raised when a required resource is not found."""

    def __init__(self, resource_type: str, identifier: Any):
        """
        Initialize a ResourceNotFoundError.

        Args:
            resource_type: Type of resource (e.g., 'dataset', 'config')
            identifier: Identifier of the resource (e.g., path)
        """
        self.resource_type = resource_type
        self.identifier = identifier
        super().__init__(f"{resource_type.capitalize()} not found: {identifier}")


class DataFormatError(TomographyError):
    """Exception raised when an input file cannot be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        """
        Initialize a DataFormatError.

        Args:
            message: Error message
            path: Optional path of the offending file
            line: Optional line number of the offending row
        """
        self.path = path
        self.line = line

        context = []
        if path:
            context.append(f"file={path}")
        if line is not None:
            context.append(f"line={line}")

        if context:
            message = f"{message} ({', '.join(context)})"

        super().__init__(message)


class NumericalError(TomographyError):
    """Exception raised when a numerical routine fails to deliver a trustworthy result."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None,
                 best_point: Optional[Any] = None):
        """
        Initialize a NumericalError.

        Args:
            message: Error message
            diagnostics: Optional solver diagnostics
            best_point: Optional best point found before the failure
        """
        self.diagnostics = diagnostics or {}
        self.best_point = best_point
        super().__init__(message)


class SingularMatrixError(NumericalError):
    """Exception raised when a Fisher sum or sensitivity matrix cannot be inverted."""

    def __init__(self, message: str = "infinite covariance: singular matrix",
                 diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message, diagnostics)


class SingularInformationError(NumericalError):
    """Exception raised when a measurement carries no Fisher information."""
    pass


class NoSignalError(NumericalError):
    """Exception raised when a Ramsey frequency carries no decay signal (f0 <= 1/2)."""
    pass


class DegenerateUpdateError(NumericalError):
    """Exception raised when a Bayes update leaves no particle with usable weight."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None,
                 trace: Optional[Any] = None):
        """
        Initialize a DegenerateUpdateError.

        Args:
            message: Error message
            diagnostics: Optional update diagnostics
            trace: Protocol trace recorded before the failure, if any
        """
        self.trace = trace
        super().__init__(message, diagnostics)


class ReliabilityError(NumericalError):
    """Exception raised when too many Monte-Carlo fits fail to converge."""

    def __init__(self, message: str, partial: Optional[Any] = None,
                 diagnostics: Optional[Dict[str, Any]] = None):
        """
        Initialize a ReliabilityError.

        Args:
            message: Error message
            partial: Partial report computed from the converged runs
            diagnostics: Optional run diagnostics
        """
        self.partial = partial
        super().__init__(message, diagnostics)


class UnreliableStatisticsWarning(UserWarning):
    """Warning attached to posterior statistics computed from too few effective particles."""
    pass
