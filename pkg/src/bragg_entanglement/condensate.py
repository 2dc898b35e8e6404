"""Bogoliubov dispersion and effective atom-field couplings of a homogeneous condensate."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .units import HBAR, RAD_PER_S_TO_RAD_PER_US

DILUTENESS_WARN = 1e-3


class InvalidParameterError(ValueError):
    pass


class PhononLimitError(ValueError):
    """Raised for q = 0, where v_q diverges."""


@dataclass(frozen=True)
class CondensateParams:
    """Microscopic parameters of one condensate (SI units).

    ``rabi_frequency`` is the two-photon Rabi frequency in rad/s.
    """

    atom_mass: float
    scattering_length: float
    density: float
    atom_count: float
    rabi_frequency: float

    def __post_init__(self):
        for name in ("atom_mass", "scattering_length", "density", "atom_count", "rabi_frequency"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
        gas_parameter = self.density * self.scattering_length**3
        if gas_parameter > DILUTENESS_WARN:
            warnings.warn(
                f"n0*a_s^3 = {gas_parameter:.3g} exceeds {DILUTENESS_WARN:g}; "
                "the Bogoliubov description is unreliable",
                stacklevel=3,
            )

    @property
    def mu_over_hbar(self) -> float:
        """Chemical potential over hbar in rad/us."""
        xi = healing_length(self)
        return HBAR / (2.0 * self.atom_mass * xi**2) * RAD_PER_S_TO_RAD_PER_US


@dataclass(frozen=True)
class DispersionPoint:
    q: float  # q * healing length
    omega_q: float
    mu_over_hbar: float
    omega_B: float
    u_q: float
    v_q: float

    @property
    def f_q(self) -> float:
        return self.u_q - self.v_q


def healing_length(params: CondensateParams) -> float:
    """Healing length ``(8 pi n0 a_s)**-1/2`` in metres."""
    if params.density <= 0 or params.scattering_length <= 0:
        raise InvalidParameterError("density and scattering length must be positive")
    return (8.0 * math.pi * params.density * params.scattering_length) ** -0.5


def dispersion(q_over_xi_inv: float, mu_over_hbar: float) -> DispersionPoint:
    """Bogoliubov frequency and transformation coefficients at wavenumber ``q``.

    Parameters
    ----------
    q_over_xi_inv : float
        Wavenumber in units of the inverse healing length, ``q * xi``.
    mu_over_hbar : float
        Chemical potential over hbar. The returned frequencies share its unit.

    Returns
    -------
    DispersionPoint
        With ``omega_q = mu/hbar * (q xi)**2``,
        ``omega_B = sqrt((omega_q + mu/hbar)**2 - (mu/hbar)**2)`` and
        ``v_q = sqrt((omega_q + mu/hbar)/omega_B - 1) / sqrt(2)``.
    """
    if not mu_over_hbar > 0:
        raise InvalidParameterError(f"mu_over_hbar must be positive, got {mu_over_hbar!r}")
    if q_over_xi_inv < 0:
        raise InvalidParameterError(f"q must be non-negative, got {q_over_xi_inv!r}")
    if q_over_xi_inv == 0:
        raise PhononLimitError("q = 0: v_q diverges; use q > 0")
    mu = mu_over_hbar
    omega_q = mu * q_over_xi_inv**2
    # (w + mu)^2 - mu^2 = w (w + 2 mu), written without cancellation
    omega_B = math.sqrt(omega_q * (omega_q + 2.0 * mu))
    # (w + mu)/omega_B - 1 = mu^2 / (omega_B (w + mu + omega_B)), cancellation-free
    excess = mu**2 / (omega_B * (omega_q + mu + omega_B))
    v_q = math.sqrt(0.5 * excess)
    u_q = math.sqrt(1.0 + v_q**2)
    return DispersionPoint(
        q=q_over_xi_inv, omega_q=omega_q, mu_over_hbar=mu, omega_B=omega_B, u_q=u_q, v_q=v_q
    )


def dispersion_from_params(params: CondensateParams, q_si: float) -> DispersionPoint:
    """Same as :func:`dispersion`, taking the wavenumber in 1/m."""
    return dispersion(q_si * healing_length(params), params.mu_over_hbar)


def effective_coupling(params: CondensateParams, f_q: float) -> float:
    """Effective coupling ``sqrt(N) * Omega * f_q`` (unit of ``rabi_frequency``)."""
    if not 0 < f_q <= 1:
        raise InvalidParameterError(f"f_q must lie in (0, 1], got {f_q!r}")
    return math.sqrt(params.atom_count) * params.rabi_frequency * f_q
