"""Moments of Heisenberg-evolved linear forms in the initial Gaussian state.

The initial state is a product of coherent states (vacuum = zero amplitude).
Fluctuations ``dx = x - <x>`` then have a single nonvanishing elementary
contraction per mode, ``<dx dx^dag> = 1``. Products of up to four forms are
evaluated by the displaced Wick expansion: every factor is either replaced
by its mean or contracted, order-preserving, with a later factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .model import ModeId, SystemConfig
from .propagator import LinearOperatorForm

SYMPLECTIC_TOL = 1e-10


@dataclass(frozen=True)
class InitialState:
    """Coherent amplitudes keyed by mode label; absent modes are in vacuum."""

    amplitudes: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for label, amp in self.amplitudes.items():
            if not np.isfinite(amp):
                raise ValueError(f"coherent amplitude of {label!r} is not finite")

    @classmethod
    def vacuum(cls) -> "InitialState":
        return cls({})

    @classmethod
    def from_config(cls, config: SystemConfig) -> "InitialState":
        """Quasiparticle vacua and a coherent probe ``sqrt(n_p) exp(i phi)``."""
        return cls({ModeId.PROBE: config.probe_amplitude})

    def amplitude(self, label) -> complex:
        return complex(self.amplitudes.get(label, 0.0))

    def displaced(self, label, shift: complex) -> "InitialState":
        amps = dict(self.amplitudes)
        amps[label] = self.amplitude(label) + shift
        return InitialState(amps)


def mean_vector(basis, state: InitialState) -> np.ndarray:
    """``<w>`` for the doubled basis ``w = (v, v^dag)``."""
    n = len(basis)
    m = np.zeros(2 * n, complex)
    for k, (label, dag) in enumerate(basis):
        amp = state.amplitude(label)
        m[k] = np.conj(amp) if dag else amp
        m[n + k] = np.conj(m[k])
    return m


def contraction_matrix(basis) -> np.ndarray:
    """``C_ij = <dw_i dw_j>`` for the doubled basis, coherent/vacuum modes."""
    labels = [label for label, _ in basis]
    if len(set(labels)) != len(labels):
        raise ValueError("basis lists a mode twice")
    n = len(basis)
    C = np.zeros((2 * n, 2 * n))
    for k, (_, dag) in enumerate(basis):
        if dag:
            C[n + k, k] = 1.0  # v_k^dag v_k = x x^dag
        else:
            C[k, n + k] = 1.0
    return C


def mean(f: LinearOperatorForm, state: InitialState) -> complex:
    return complex(f.doubled @ mean_vector(f.basis, state) + f.constant)


def contract_pair(f: LinearOperatorForm, g: LinearOperatorForm, state: InitialState | None = None) -> complex:
    """Fluctuation contraction ``<df dg>``.

    Independent of the coherent amplitudes; ``state`` is accepted so the
    signature stays uniform with the other moment functions.
    """
    f._check(g)
    return complex(f.doubled @ contraction_matrix(f.basis) @ g.doubled)


def moment(forms: Sequence[LinearOperatorForm], state: InitialState) -> complex:
    """``<f_1 f_2 ... f_k>`` (operator order kept) by displaced Wick expansion."""
    if not forms:
        return 1.0 + 0j
    basis = forms[0].basis
    for f in forms[1:]:
        forms[0]._check(f)
    m = mean_vector(basis, state)
    C = contraction_matrix(basis)
    vecs = [f.doubled for f in forms]
    means = [complex(v @ m + f.constant) for v, f in zip(vecs, forms)]

    def pair(i, j):
        return complex(vecs[i] @ C @ vecs[j])

    def expand(idx: tuple[int, ...]) -> complex:
        if not idx:
            return 1.0 + 0j
        head, rest = idx[0], idx[1:]
        total = means[head] * expand(rest)
        for pos, j in enumerate(rest):
            total += pair(head, j) * expand(rest[:pos] + rest[pos + 1:])
        return total

    return expand(tuple(range(len(forms))))


def occupation(f: LinearOperatorForm, state: InitialState) -> float:
    """``<f^dag f> = |<f>|^2 + <df^dag df>``."""
    mu = mean(f, state)
    return float(abs(mu) ** 2 + contract_pair(f.conjugate(), f).real)


def number_covariance(f: LinearOperatorForm, g: LinearOperatorForm, state: InitialState) -> float:
    """Symmetrized ``Cov(f^dag f, g^dag g)`` from the full fourth-order Wick expansion."""
    fd, gd = f.conjugate(), g.conjugate()
    cross = 0.5 * (moment([fd, f, gd, g], state) + moment([gd, g, fd, f], state))
    return float(cross.real - occupation(f, state) * occupation(g, state))


def number_difference_variance(f: LinearOperatorForm, g: LinearOperatorForm, state: InitialState) -> float:
    """``<[Delta(n_f - n_g)]^2>``."""
    return (
        number_covariance(f, f, state)
        + number_covariance(g, g, state)
        - 2.0 * number_covariance(f, g, state)
    )


def single_mode_number_variance(mu: complex, N: float, M: complex) -> float:
    """Closed-form ``Var(n)`` of one Gaussian mode.

    ``mu = <f>``, ``N = <df^dag df>``, ``M = <df df>``:
    ``N^2 + N + |M|^2 + |mu|^2 (2N + 1) + 2 Re(conj(mu)^2 M)``.
    """
    return float(
        N**2 + N + abs(M) ** 2 + abs(mu) ** 2 * (2 * N + 1) + 2 * (np.conj(mu) ** 2 * M).real
    )


def quadrature_forms(f: LinearOperatorForm) -> tuple[LinearOperatorForm, LinearOperatorForm]:
    """``X = (f + f^dag)/sqrt2``, ``P = -i (f - f^dag)/sqrt2``."""
    fd = f.conjugate()
    s = 1.0 / math.sqrt(2.0)
    return (f + fd) * s, (f - fd) * (-1j * s)


def variance(h: LinearOperatorForm, state: InitialState | None = None) -> float:
    """Variance of a Hermitian form."""
    if not h.is_hermitian(atol=1e-9 * max(1.0, float(np.max(np.abs(h.doubled))))):
        raise ValueError("variance() needs a Hermitian form")
    return float(contract_pair(h, h).real)


def _check_symplectic(u: float, v: float):
    if abs(u * u - v * v - 1.0) > SYMPLECTIC_TOL:
        raise ValueError(f"(u, v) = ({u}, {v}) violates u^2 - v^2 = 1")


def particle_mode_form(
    alpha_q: LinearOperatorForm, alpha_minus_q_dag: LinearOperatorForm, u: float, v: float
) -> LinearOperatorForm:
    """Atomic side-mode ``a_q = u alpha_q - v alpha_-q^dag``."""
    _check_symplectic(u, v)
    return u * alpha_q - v * alpha_minus_q_dag


def quasiparticle_mode_form(
    a_q: LinearOperatorForm, a_minus_q_dag: LinearOperatorForm, u: float, v: float
) -> LinearOperatorForm:
    """Inverse of :func:`particle_mode_form`: ``alpha_q = u a_q + v a_-q^dag``."""
    _check_symplectic(u, v)
    return u * a_q + v * a_minus_q_dag


@dataclass(frozen=True, eq=False)
class GaussianMomentSet:
    """Means, normal ``N_ij = <df_i^dag df_j>`` and anomalous ``M_ij = <df_i df_j>`` moments."""

    means: np.ndarray
    normal: np.ndarray
    anomalous: np.ndarray

    def is_physical(self, atol: float = 1e-9) -> bool:
        N, M = self.normal, self.anomalous
        if not np.allclose(N, N.conj().T, atol=atol):
            return False
        if np.min(np.linalg.eigvalsh(0.5 * (N + N.conj().T))) < -atol:
            return False
        diag_N = np.real(np.diag(N))
        diag_M = np.abs(np.diag(M))
        scale = np.maximum(1.0, diag_N * (diag_N + 1))
        return bool(np.all(diag_N * (diag_N + 1) - diag_M**2 >= -atol * scale))


def moment_set(forms: Sequence[LinearOperatorForm], state: InitialState) -> GaussianMomentSet:
    """Moment bookkeeping for a list of annihilation-type forms of distinct modes."""
    k = len(forms)
    means = np.array([mean(f, state) for f in forms])
    N = np.empty((k, k), complex)
    M = np.empty((k, k), complex)
    for i, fi in enumerate(forms):
        fid = fi.conjugate()
        for j, fj in enumerate(forms):
            N[i, j] = contract_pair(fid, fj)
            M[i, j] = contract_pair(fi, fj)
    return GaussianMomentSet(means=means, normal=N, anomalous=M)
