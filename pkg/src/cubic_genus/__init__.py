"""Cubic fields by discriminant: enumeration, genus numbers and the
constants of the two-term asymptotics for genus-number statistics."""

from __future__ import annotations

__version__ = "0.1.0"
