"""Numerical tolerances.

All tolerances are relative and scale together.  The environment variable
``KREIN_RANGE_TOL`` sets the global scale; the default is 1e-8 and every
tolerance below is multiplied by ``KREIN_RANGE_TOL / 1e-8``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

DEFAULT_SCALE = 1e-8


@dataclass(frozen=True)
class Tolerances:
    real: float = 1e-9        # |Im lambda| <= real * ||H||  => real eigenvalue
    neutral: float = 1e-9     # |[x,x]_J| <= neutral * ||x||^2  => neutral vector
    herm: float = 1e-10       # J-Hermiticity, normality, commutation, scalar blocks
    cluster: float = 1e-8     # eigenvalues closer than this (relative) are grouped
    condition: float = 1e-9   # slack on the hyperbolicity inequalities

    def scaled(self, factor: float) -> "Tolerances":
        return replace(
            self,
            real=self.real * factor,
            neutral=self.neutral * factor,
            herm=self.herm * factor,
            cluster=self.cluster * factor,
            condition=self.condition * factor,
        )


_BASE = Tolerances()


def get_tolerances() -> Tolerances:
    raw = os.environ.get("KREIN_RANGE_TOL")
    if not raw:
        return _BASE
    try:
        value = float(raw)
    except ValueError:
        return _BASE
    if not value > 0:
        return _BASE
    return _BASE.scaled(value / DEFAULT_SCALE)
