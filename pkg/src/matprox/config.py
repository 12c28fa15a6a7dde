"""Central numerical tolerances.

Every module reads its default tolerances from one record so that the whole
suite can be tightened or relaxed with a single knob.  ``algebraic`` covers
identities that hold up to floating-point rounding (adjoints, traces, exact
cancellations); ``spectral`` covers quantities that pass through an SVD,
an eigensolver or an LP.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    algebraic: float = 1e-12
    spectral: float = 1e-9


DEFAULT_TOLERANCES = Tolerances()
