"""Shared exception base for the deeplocus package."""


class DeepLocusError(Exception):
    """Base class for all errors raised by this package."""
