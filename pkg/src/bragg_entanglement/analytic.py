"""Closed-form reference results for the two-condensate system.

All short-time expressions assume ``eta_A t, eta_B t << 1`` and neglect the
free terms (``omega``, ``delta``) relative to the couplings. The functions
are total; the regime is the caller's responsibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ClosedFormInputs:
    eta_A: float
    eta_B: float
    t: float
    n_p: float = 0.0

    def __post_init__(self):
        for name in ("eta_A", "eta_B", "t", "n_p"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def eta(self) -> float:
        return math.hypot(self.eta_A, self.eta_B)


def xi_p_short_time_resonant_offres(inp: ClosedFormInputs) -> float:
    """Pair (q of A, -q of B): ``1 - eta_A eta_B t^2 (1 - eta_A/eta_B)``."""
    a, b, t = inp.eta_A, inp.eta_B, inp.t
    # eta_A eta_B (1 - eta_A/eta_B) = eta_A (eta_B - eta_A); no division needed
    return 1.0 - a * (b - a) * t**2


def xi_p_short_time_offres_resonant(inp: ClosedFormInputs) -> float:
    """Pair (-q of A, q of B): ``1 + (eta_B t)^2 (1 - eta_A/eta_B)``."""
    a, b, t = inp.eta_A, inp.eta_B, inp.t
    return 1.0 + b * (b - a) * t**2


def r_number(inp: ClosedFormInputs) -> float:
    """``R = 8 eta_A^2 t^4 [eta_B^2 - 2 eta_A^2 + 4 n_p (eta_B^2 - eta_A^2)]``.

    ``xi_n = 1 - R / (<n1> + <n2>)`` for the pair (q of A, -q of B).
    """
    a2, b2 = inp.eta_A**2, inp.eta_B**2
    return 8.0 * a2 * inp.t**4 * (b2 - 2.0 * a2 + 4.0 * inp.n_p * (b2 - a2))


def xi_n_short_time(inp: ClosedFormInputs, occupation_sum: float, r_scale: float = 1.0) -> float:
    """``1 - r_scale * R / (<n1> + <n2>)``.

    ``r_scale`` multiplies ``R`` as defined in :func:`r_number`; the simulated
    short-time value corresponds to ``r_scale = 1/16`` (see the analytic tests).
    """
    return 1.0 - r_scale * r_number(inp) / occupation_sum


def xi_n_threshold_ratio_squared(n_p: float) -> float:
    """``(eta_B/eta_A)^2`` at which ``R`` changes sign: ``1 + 1/(1 + 4 n_p)``."""
    return 1.0 + 1.0 / (1.0 + 4.0 * n_p)


def xi_p_resonant_pair_sinh(inp: ClosedFormInputs) -> float:
    """Resonant-only reduction, pair (q, q): ``1 + sinh^2(eta t)``."""
    return 1.0 + math.sinh(inp.eta * inp.t) ** 2


def xi_n_resonant_pair_sinh(inp: ClosedFormInputs) -> float:
    """Resonant-only reduction, pair (q, q):
    ``1 + (1 + n_p/(n_p+1)) ((eta_A^2 - eta_B^2)/(eta_A^2 + eta_B^2))^2 sinh^2(eta t)``."""
    eta2 = inp.eta_A**2 + inp.eta_B**2
    if eta2 == 0:
        return 1.0
    asym = ((inp.eta_A**2 - inp.eta_B**2) / eta2) ** 2
    return 1.0 + (1.0 + inp.n_p / (inp.n_p + 1.0)) * asym * math.sinh(inp.eta * inp.t) ** 2


def xi_p_same_resonant_fullsystem_shorttime(inp: ClosedFormInputs) -> float:
    """Pair (q of A, q of B), reference form: ``1 + eta_B t^2/2 + (eta_A^2 + eta_B^2)^2 t^4/4``.

    The ``eta_B t^2/2`` term is not dimensionless and the simulated
    second-order coefficient is ``eta_A^2 + eta_B^2``; only the qualitative
    ``> 1`` claim relies on this form.
    """
    a, b, t = inp.eta_A, inp.eta_B, inp.t
    return 1.0 + b * t**2 / 2.0 + (a**2 + b**2) ** 2 * t**4 / 4.0


def xi_p_same_resonant_alternate(inp: ClosedFormInputs) -> float:
    """Alternate of the reference (q, q) form with ``eta_B^2 t^2/2`` as the second-order term."""
    a, b, t = inp.eta_A, inp.eta_B, inp.t
    return 1.0 + b**2 * t**2 / 2.0 + (a**2 + b**2) ** 2 * t**4 / 4.0
