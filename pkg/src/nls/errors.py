"""Shared exception base for the nls package.

Every module defines its own exception types; they all derive from
NlsError so the CLI can map "operational failure" to a single exit code.
"""


class NlsError(Exception):
    """Base class for all errors raised by nls operations."""
