"""Gaussian engine against the Fock oracle, quantity by quantity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import gaussian
from .diagnostics import ENTANGLED_PAIR, ModePair, pair_forms, xi_number, xi_quadrature
from .fock_oracle import FockSpace, Observables, TruncationSpec, evolve_state
from .model import SystemConfig, build_dynamical_matrix, hamiltonian_quadratic_form
from .propagator import evolve, operator_at

MOMENT_ATOL = 1e-4
VARIANCE_RTOL = 1e-3
CONSERVATION_TOL = 1e-8


@dataclass(frozen=True)
class ComparisonRow:
    t: float
    quantity: str
    gaussian: float
    fock: float
    tolerance: float
    relative: bool
    leakage: float
    trusted: bool

    @property
    def abs_error(self) -> float:
        return abs(self.gaussian - self.fock)

    @property
    def rel_error(self) -> float:
        return self.abs_error / max(abs(self.gaussian), 1e-300)

    @property
    def ok(self) -> bool:
        err = self.rel_error if self.relative else self.abs_error
        return bool(err <= self.tolerance)


def default_caps(config: SystemConfig, quasiparticle_cap: int = 6, probe_cap: int = 12) -> tuple[int, ...]:
    return tuple(probe_cap if m.name == "PROBE" else quasiparticle_cap for m in config.variant.modes)


def compare(
    config: SystemConfig,
    times: Iterable[float],
    spec: TruncationSpec | None = None,
    pairs: Sequence[ModePair] = (ENTANGLED_PAIR,),
    uv=None,
) -> list[ComparisonRow]:
    """Moments, number variances and xi parameters from both engines at each time.

    Also emits ``norm_drift`` and ``energy_drift`` rows, where the "gaussian"
    column holds the expected value (zero drift).
    """
    spec = spec or TruncationSpec(default_caps(config))
    ham = hamiltonian_quadratic_form(config)
    modes = ham.modes
    space = FockSpace(modes, spec)
    H = space.hamiltonian(ham)
    obs = Observables(space)
    psi0 = space.coherent_state({m: a for m, a in gaussian.InitialState.from_config(config).amplitudes.items()})
    e0 = obs.energy(psi0, H)
    M = build_dynamical_matrix(config)
    state = gaussian.InitialState.from_config(config)
    ladders = [space.annihilator(m) for m in modes]

    rows: list[ComparisonRow] = []
    for t in times:
        t = float(t)
        psi = evolve_state(H, psi0, t)
        emap = evolve(M, t)
        forms = [operator_at(emap, m) for m in modes]
        leak, trusted = psi.leakage, psi.trusted

        def row(name, g, f, tol=MOMENT_ATOL, relative=False):
            rows.append(ComparisonRow(t, name, float(g), float(f), tol, relative, leak, trusted))

        for m, f, a in zip(modes, forms, ladders):
            row(f"occupation_{m.label}", gaussian.occupation(f, state), obs.occupation(psi, a))
            mu_g, mu_f = gaussian.mean(f, state), obs.mean(psi, a)
            row(f"re_mean_{m.label}", mu_g.real, mu_f.real)
            row(f"im_mean_{m.label}", mu_g.imag, mu_f.imag)
        for i in range(len(modes)):
            for j in range(i, len(modes)):
                tag = f"{modes[i].label}_{modes[j].label}"
                fi, fj = forms[i], forms[j]
                nrm_g = gaussian.moment([fi.conjugate(), fj], state)
                anm_g = gaussian.moment([fi, fj], state)
                nrm_f = obs.normal(psi, ladders[i], ladders[j])
                anm_f = obs.anomalous(psi, ladders[i], ladders[j])
                row(f"re_normal_{tag}", nrm_g.real, nrm_f.real)
                row(f"im_normal_{tag}", nrm_g.imag, nrm_f.imag)
                row(f"re_anomalous_{tag}", anm_g.real, anm_f.real)
                row(f"im_anomalous_{tag}", anm_g.imag, anm_f.imag)
        for pair in pairs:
            g1, g2 = pair_forms(pair, emap, uv)
            a1 = obs.annihilator(pair.first, pair.picture, uv)
            a2 = obs.annihilator(pair.second, pair.picture, uv)
            tag = f"{pair.label}_{pair.picture.value}"
            row(
                f"var_ndiff_{tag}",
                gaussian.number_difference_variance(g1, g2, state),
                obs.number_difference_variance(psi, a1, a2),
                VARIANCE_RTOL,
                True,
            )
            row(f"xi_p_{tag}", xi_quadrature(pair, state, emap, uv), obs.xi_p(psi, a1, a2))
            xn = xi_number(pair, state, emap, uv)
            if xn is not None:
                row(f"xi_n_{tag}", xn, obs.xi_n(psi, a1, a2), VARIANCE_RTOL, True)
        row("norm_drift", 0.0, psi.norm**2 - psi0.norm**2, CONSERVATION_TOL)
        row("energy_drift", 0.0, (obs.energy(psi, H) - e0) / max(1.0, abs(e0)), CONSERVATION_TOL)
    return rows


def truncation_bump(
    config: SystemConfig,
    times: Iterable[float],
    spec: TruncationSpec | None = None,
    by: int = 2,
    pairs: Sequence[ModePair] = (ENTANGLED_PAIR,),
    uv=None,
) -> list[ComparisonRow]:
    """Oracle at ``spec`` against the oracle with every cap raised by ``by``.

    The "gaussian" column holds the bumped-cap oracle value; tolerances are
    the same as in :func:`compare`, which is the truncation error the oracle
    claims.
    """
    spec = spec or TruncationSpec(default_caps(config))
    times = list(times)
    low = compare(config, times, spec, pairs, uv)
    high = compare(config, times, spec.bumped(by), pairs, uv)
    out = []
    for a, b in zip(low, high):
        if a.quantity.endswith("_drift"):
            continue
        out.append(ComparisonRow(a.t, a.quantity, b.fock, a.fock, a.tolerance, a.relative, a.leakage, a.trusted))
    return out


def summarize(rows: Sequence[ComparisonRow]) -> dict:
    worst_abs = max((r.abs_error for r in rows if not r.relative), default=0.0)
    worst_rel = max((r.rel_error for r in rows if r.relative), default=0.0)
    return {
        "rows": len(rows),
        "failures": sum(not r.ok for r in rows),
        "worst_abs_error": worst_abs,
        "worst_rel_error": worst_rel,
        "max_leakage": max((r.leakage for r in rows), default=0.0),
        "all_trusted": all(r.trusted for r in rows),
    }

