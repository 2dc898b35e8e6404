"""Mode basis, dynamical matrix and quadratic Hamiltonian of the two-condensate system.

The closed Heisenberg system is written for the state vector

    v = (alpha_q, alpha_-q^dag, beta_q, beta_-q^dag, c^dag)

with ``dv/dt = M v``. Commutators of the entries are ``[v_i, v_j^dag] = G_ij``
with ``G = diag(+1, -1, +1, -1, -1)``; every physical ``M`` satisfies
``M G + G M^dag = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .units import mhz


class ModeId(enum.IntEnum):
    ALPHA_Q = 0
    ALPHA_MINUS_Q = 1
    BETA_Q = 2
    BETA_MINUS_Q = 3
    PROBE = 4

    @property
    def label(self) -> str:
        return _MODE_LABELS[self]


_MODE_LABELS = {
    ModeId.ALPHA_Q: "alpha_q",
    ModeId.ALPHA_MINUS_Q: "alpha_mq",
    ModeId.BETA_Q: "beta_q",
    ModeId.BETA_MINUS_Q: "beta_mq",
    ModeId.PROBE: "probe",
}

# whether each mode enters the state vector as its creation operator
BASIS_DAGGER = {
    ModeId.ALPHA_Q: False,
    ModeId.ALPHA_MINUS_Q: True,
    ModeId.BETA_Q: False,
    ModeId.BETA_MINUS_Q: True,
    ModeId.PROBE: True,
}


class Variant(str, enum.Enum):
    FULL5 = "full5"
    RESONANT_ONLY3 = "resonant3"
    SINGLE_CONDENSATE3 = "single3"

    @property
    def modes(self) -> tuple[ModeId, ...]:
        return _VARIANT_MODES[self]


_VARIANT_MODES = {
    Variant.FULL5: tuple(ModeId),
    Variant.RESONANT_ONLY3: (ModeId.ALPHA_Q, ModeId.BETA_Q, ModeId.PROBE),
    Variant.SINGLE_CONDENSATE3: (ModeId.ALPHA_Q, ModeId.ALPHA_MINUS_Q, ModeId.PROBE),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SystemConfig:
    """Frequencies (rad/us), couplings and initial probe of one simulation.

    ``omega_B`` defaults to ``omega_A``: the condensates are identical unless
    asked otherwise.
    """

    omega_A: float
    delta: float
    eta_A: float
    eta_B: float
    n_probe: float = 0.0
    probe_phase: float = 0.0
    variant: Variant = Variant.FULL5
    omega_B: float | None = field(default=None)

    def __post_init__(self):
        if self.omega_B is None:
            object.__setattr__(self, "omega_B", self.omega_A)
        object.__setattr__(self, "variant", Variant(self.variant))
        for name in ("omega_A", "omega_B", "delta", "eta_A", "eta_B", "n_probe", "probe_phase"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
        if self.omega_A < 0 or self.omega_B < 0:
            raise ConfigError("Bogoliubov frequencies must be non-negative")
        if self.eta_A < 0 or self.eta_B < 0:
            raise ConfigError("couplings must be non-negative")
        if self.n_probe < 0:
            raise ConfigError("n_probe must be non-negative")

    @classmethod
    def working_point(cls, **overrides) -> "SystemConfig":
        """Reference working point: omega_B = 0.21, delta = 0.17,
        eta_A = 1.62, eta_B = 1.25 eta_A (MHz, see :mod:`units`), ten probe photons."""
        eta_A = mhz(1.62)
        params = dict(
            omega_A=mhz(0.21), delta=mhz(0.17), eta_A=eta_A, eta_B=1.25 * eta_A, n_probe=10.0
        )
        params.update(overrides)
        return cls(**params)

    def with_ratio(self, ratio: float) -> "SystemConfig":
        """Copy with ``eta_B = ratio * eta_A``."""
        return replace(self, eta_B=ratio * self.eta_A)

    @property
    def probe_amplitude(self) -> complex:
        return math.sqrt(self.n_probe) * complex(math.cos(self.probe_phase), math.sin(self.probe_phase))

    def as_dict(self) -> dict:
        return {
            "omega_A": self.omega_A,
            "omega_B": self.omega_B,
            "delta": self.delta,
            "eta_A": self.eta_A,
            "eta_B": self.eta_B,
            "n_probe": self.n_probe,
            "probe_phase": self.probe_phase,
            "variant": self.variant.value,
        }


@dataclass(frozen=True, eq=False)
class DynamicalMatrix:
    basis: tuple[tuple[ModeId, bool], ...]
    entries: np.ndarray
    config: SystemConfig | None = None

    @property
    def metric(self) -> np.ndarray:
        return metric_of(self.basis)

    @property
    def modes(self) -> tuple[ModeId, ...]:
        return tuple(mode for mode, _ in self.basis)

    def index(self, mode) -> int:
        for k, (m, _) in enumerate(self.basis):
            if m == mode:
                return k
        raise ModeNotInVariantError(f"{mode!r} is not part of this basis")


class ModeNotInVariantError(KeyError):
    pass


def metric_of(basis) -> np.ndarray:
    return np.diag([-1.0 if dag else 1.0 for _, dag in basis])


def _frequency(config: SystemConfig, mode: ModeId) -> float:
    if mode in (ModeId.ALPHA_Q, ModeId.ALPHA_MINUS_Q):
        return config.omega_A
    if mode in (ModeId.BETA_Q, ModeId.BETA_MINUS_Q):
        return config.omega_B
    return -config.delta


def _coupling(config: SystemConfig, mode: ModeId) -> float:
    if mode in (ModeId.ALPHA_Q, ModeId.ALPHA_MINUS_Q):
        return config.eta_A
    return config.eta_B


def build_dynamical_matrix(config: SystemConfig) -> DynamicalMatrix:
    """Generator ``M`` of the Heisenberg equations, written out row by row.

    alpha_q'        = -i w_A alpha_q        - i eta_A c^dag
    alpha_-q^dag'   = +i w_A alpha_-q^dag   + i eta_A c^dag
    (beta rows likewise with w_B, eta_B)
    c^dag'          = -i delta c^dag + i eta_A (alpha_q + alpha_-q^dag)
                                     + i eta_B (beta_q + beta_-q^dag)

    Reduced variants keep only their modes' rows and columns.
    """
    modes = config.variant.modes
    basis = tuple((m, BASIS_DAGGER[m]) for m in modes)
    n = len(modes)
    probe = modes.index(ModeId.PROBE)
    M = np.zeros((n, n), dtype=complex)
    for k, mode in enumerate(modes):
        if mode is ModeId.PROBE:
            M[k, k] = -1j * config.delta
            continue
        # annihilation rows rotate as -i w, creation rows as +i w
        sign = 1.0 if BASIS_DAGGER[mode] else -1.0
        eta = _coupling(config, mode)
        M[k, k] = sign * 1j * _frequency(config, mode)
        M[k, probe] = sign * 1j * eta
        M[probe, k] = 1j * eta
    return DynamicalMatrix(basis=basis, entries=M, config=config)


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """``H/hbar = sum_ij A_ij a_i^dag a_j + 1/2 sum_ij (B_ij a_i^dag a_j^dag + h.c.)``.

    ``modes`` lists the physical annihilation operators ``a_i``; ``number`` is
    Hermitian and ``pairing`` symmetric.
    """

    modes: tuple[ModeId, ...]
    number: np.ndarray
    pairing: np.ndarray

    def terms(self) -> dict[tuple[str, str], complex]:
        """Nonzero coefficients keyed by operator labels, e.g. ``("probe^dag", "alpha_q^dag")``.

        Pairing terms are reported once per unordered pair, matching how they
        are written in a Hamiltonian.
        """
        out: dict[tuple[str, str], complex] = {}
        n = len(self.modes)
        for i in range(n):
            for j in range(n):
                if self.number[i, j] != 0:
                    out[(f"{self.modes[i].label}^dag", self.modes[j].label)] = self.number[i, j]
            for j in range(i, n):
                coeff = 0.5 * self.pairing[i, i] if i == j else 0.5 * (self.pairing[i, j] + self.pairing[j, i])
                if coeff != 0:
                    key = tuple(sorted((f"{self.modes[i].label}^dag", f"{self.modes[j].label}^dag"), key=_probe_first))
                    out[key] = coeff
        return out


def _probe_first(label: str):
    return (not label.startswith("probe"), label)


def hamiltonian_quadratic_form(config: SystemConfig) -> QuadraticHamiltonian:
    """Coefficient table of ``H_A + H_B + H_F + H_AF + H_BF`` (divided by hbar).

    Interaction: ``eta_X c^dag (x_q^dag + x_-q) + h.c.`` for each condensate X.
    """
    modes = config.variant.modes
    n = len(modes)
    probe = modes.index(ModeId.PROBE)
    A = np.zeros((n, n), dtype=complex)
    B = np.zeros((n, n), dtype=complex)
    for k, mode in enumerate(modes):
        A[k, k] = _frequency(config, mode)
        if mode is ModeId.PROBE:
            continue
        eta = _coupling(config, mode)
        if mode in (ModeId.ALPHA_Q, ModeId.BETA_Q):
            # c^dag x_q^dag + x_q c, split symmetrically over B_pk and B_kp
            B[probe, k] = B[k, probe] = eta
        else:
            # c^dag x_-q + x_-q^dag c
            A[probe, k] = A[k, probe] = eta
    return QuadraticHamiltonian(modes=modes, number=A, pairing=B)


class NotClosedError(ValueError):
    pass


def heisenberg_matrix(ham: QuadraticHamiltonian, basis) -> np.ndarray:
    """Derive ``M`` from ``ham`` via ``d a/dt = -i [a, H]``.

    With canonical commutators, ``-i[a_m, H] = -i (sum_j A_mj a_j + B_mj a_j^dag)``
    and the adjoint for ``a_m^dag``. Each term is then located in ``basis``
    (with its dagger flag); a term whose operator is absent raises
    :class:`NotClosedError`.
    """
    pos = {(mode, dag): k for k, (mode, dag) in enumerate(basis)}
    mode_index = {m: i for i, m in enumerate(ham.modes)}
    n = len(basis)
    M = np.zeros((n, n), dtype=complex)
    for row, (mode, dag) in enumerate(basis):
        m = mode_index[mode]
        for j, other in enumerate(ham.modes):
            if dag:
                # d a_m^dag/dt = +i (sum_j A*_mj a_j^dag + B*_mj a_j)
                contributions = (((other, True), 1j * np.conj(ham.number[m, j])),
                                 ((other, False), 1j * np.conj(ham.pairing[m, j])))
            else:
                contributions = (((other, False), -1j * ham.number[m, j]),
                                 ((other, True), -1j * ham.pairing[m, j]))
            for key, coeff in contributions:
                if coeff == 0:
                    continue
                if key not in pos:
                    raise NotClosedError(f"{key} is generated but not in the basis")
                M[row, pos[key]] += coeff
    return M
