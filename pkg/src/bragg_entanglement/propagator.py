"""Heisenberg-picture evolution map ``E(t) = exp(M t)`` and linear operator forms."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from numbers import Number

import numpy as np
from scipy.linalg import expm

from .model import DynamicalMatrix, metric_of

log = logging.getLogger(__name__)

STEP_DOUBLING_TOL = 1e-10


class BasisMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LinearOperatorForm:
    """Operator ``sum_k c_k v_k + d_k v_k^dag + constant`` over initial-time basis entries.

    ``basis`` is a tuple of ``(label, daggered)`` entries; ``v_k`` is the
    entry's operator as it appears in the basis (so for a daggered entry,
    ``v_k`` is itself a creation operator).
    """

    basis: tuple
    coefficients: np.ndarray
    dagger_coefficients: np.ndarray
    constant: complex = 0.0

    @classmethod
    def unit(cls, basis, index: int, daggered: bool = False) -> "LinearOperatorForm":
        n = len(basis)
        c, d = np.zeros(n, complex), np.zeros(n, complex)
        (d if daggered else c)[index] = 1.0
        return cls(tuple(basis), c, d)

    @classmethod
    def zero(cls, basis) -> "LinearOperatorForm":
        n = len(basis)
        return cls(tuple(basis), np.zeros(n, complex), np.zeros(n, complex))

    @property
    def doubled(self) -> np.ndarray:
        """Coefficients over ``(v_1..v_n, v_1^dag..v_n^dag)``."""
        return np.concatenate([self.coefficients, self.dagger_coefficients])

    def conjugate(self) -> "LinearOperatorForm":
        return LinearOperatorForm(
            self.basis, self.dagger_coefficients.conj(), self.coefficients.conj(), np.conj(self.constant)
        )

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.coefficients, self.dagger_coefficients.conj(), atol=atol)
            and abs(np.imag(self.constant)) <= atol
        )

    def embed(self, basis) -> "LinearOperatorForm":
        """Re-express over a larger basis that contains every entry of this one."""
        basis = tuple(basis)
        c, d = np.zeros(len(basis), complex), np.zeros(len(basis), complex)
        for k, entry in enumerate(self.basis):
            try:
                j = basis.index(entry)
            except ValueError:
                raise BasisMismatchError(f"{entry!r} missing from target basis") from None
            c[j] = self.coefficients[k]
            d[j] = self.dagger_coefficients[k]
        return LinearOperatorForm(basis, c, d, self.constant)

    def _check(self, other: "LinearOperatorForm"):
        if self.basis != other.basis:
            raise BasisMismatchError("forms are over different bases")

    def __add__(self, other):
        if isinstance(other, LinearOperatorForm):
            self._check(other)
            return LinearOperatorForm(
                self.basis,
                self.coefficients + other.coefficients,
                self.dagger_coefficients + other.dagger_coefficients,
                self.constant + other.constant,
            )
        return NotImplemented

    def __neg__(self):
        return LinearOperatorForm(self.basis, -self.coefficients, -self.dagger_coefficients, -self.constant)

    def __sub__(self, other):
        if isinstance(other, LinearOperatorForm):
            return self + (-other)
        return NotImplemented

    def __mul__(self, scalar):
        if isinstance(scalar, Number):
            return LinearOperatorForm(
                self.basis, scalar * self.coefficients, scalar * self.dagger_coefficients, scalar * self.constant
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def allclose(self, other: "LinearOperatorForm", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.doubled, other.doubled, atol=atol, rtol=0)
                    and abs(self.constant - other.constant) <= atol)


@dataclass(frozen=True, eq=False)
class EvolutionMap:
    time: float
    matrix: np.ndarray
    source: DynamicalMatrix

    @property
    def basis(self):
        return self.source.basis

    @property
    def metric(self) -> np.ndarray:
        return metric_of(self.basis)

    def metric_defect(self) -> float:
        """``max |E G E^dag - G|``; zero for a canonical (commutator-preserving) map."""
        G = self.metric
        return float(np.max(np.abs(self.matrix @ G @ self.matrix.conj().T - G)))


def evolve(M: DynamicalMatrix, t: float, check: bool = True) -> EvolutionMap:
    """Evolution map at absolute time ``t`` (us).

    ``scipy.linalg.expm`` (scaling and squaring with a Pade approximant) does
    the work. With ``check`` the result is compared with ``E(t/2)**2``; a
    disagreement beyond ``STEP_DOUBLING_TOL`` (relative to ``max |E|``)
    triggers a recomputation from a finer split, so callers never see it.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    A = M.entries * t
    E = expm(A)
    if check and t > 0:
        half = expm(A / 2)
        scale = np.max(np.abs(E))
        if np.max(np.abs(E - half @ half)) > STEP_DOUBLING_TOL * scale:
            log.warning("step-doubling check failed at t=%g; recomputing from 64 substeps", t)
            E = np.linalg.matrix_power(expm(A / 64), 64)
    return EvolutionMap(time=float(t), matrix=E, source=M)


def operator_at(emap: EvolutionMap, mode, daggered: bool = False) -> LinearOperatorForm:
    """Form of ``mode(t)`` (or its adjoint) over the initial basis operators."""
    k = emap.source.index(mode)  # ModeNotInVariantError for reduced variants
    basis = emap.basis
    n = len(basis)
    form = LinearOperatorForm(basis, emap.matrix[k].astype(complex), np.zeros(n, complex))
    if daggered != basis[k][1]:
        form = form.conjugate()
    return form
