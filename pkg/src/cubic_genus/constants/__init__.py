"""High-precision constants for the two-term asymptotics."""

from __future__ import annotations

from mpmath import mp

from .precision import working_dps

# every evaluation in this subpackage runs at (at least) the working precision
mp.dps = max(mp.dps, working_dps())
