"""Service-level error types shared across the storage, task, and API layers."""

from __future__ import annotations


class ServiceError(Exception):
    """Base class for errors that map to structured API responses."""


class NotFoundError(ServiceError):
    """Entity id does not exist (or is soft-deleted)."""


class ValidationError(ServiceError):
    """Input violates a documented precondition."""


class TooFewInstancesError(ServiceError):
    """Dataset has too few rows for the requested procedure."""


class AuthError(ServiceError):
    """Missing or invalid API key."""


class FetchError(ServiceError):
    """A remote dataset URL could not be retrieved."""


class DeleteConflictError(ServiceError):
    """Entity is referenced by others and cannot be deleted."""
