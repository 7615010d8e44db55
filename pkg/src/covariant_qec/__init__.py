"""Covariant quantum error-correcting codes: constructions and numerical checks."""

from . import channels, codes, groups, hilbert, verify

__version__ = "0.1.0"

__all__ = ["channels", "codes", "groups", "hilbert", "verify", "__version__"]
