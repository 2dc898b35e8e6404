"""Number (xi_n) and quadrature (xi_p) entanglement parameters for cross-condensate mode pairs."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gaussian
from .condensate import dispersion
from .model import ModeId, SystemConfig, build_dynamical_matrix
from .propagator import EvolutionMap, LinearOperatorForm, evolve, operator_at

XI_N_EPS = 1e-12


class Picture(str, enum.Enum):
    QUASIPARTICLE = "quasi"
    PARTICLE = "particle"


@dataclass(frozen=True)
class ModeRef:
    condensate: str  # "A" or "B"
    momentum: int  # +1 for q, -1 for -q

    def __post_init__(self):
        if self.condensate not in ("A", "B") or self.momentum not in (1, -1):
            raise ValueError(f"bad mode reference {self!r}")

    @property
    def mode(self) -> ModeId:
        return _QP_MODES[(self.condensate, self.momentum)]

    @property
    def partner(self) -> "ModeRef":
        return ModeRef(self.condensate, -self.momentum)

    @property
    def label(self) -> str:
        return ("q" if self.momentum == 1 else "mq") + self.condensate


_QP_MODES = {
    ("A", 1): ModeId.ALPHA_Q,
    ("A", -1): ModeId.ALPHA_MINUS_Q,
    ("B", 1): ModeId.BETA_Q,
    ("B", -1): ModeId.BETA_MINUS_Q,
}


@dataclass(frozen=True)
class ModePair:
    first: ModeRef
    second: ModeRef
    picture: Picture = Picture.QUASIPARTICLE

    def __post_init__(self):
        object.__setattr__(self, "picture", Picture(self.picture))
        if self.first.condensate == self.second.condensate:
            raise ValueError("a mode pair must straddle the two condensates")

    @classmethod
    def parse(cls, label: str, picture=Picture.QUASIPARTICLE) -> "ModePair":
        """``"qA_mqB"`` -> (q of A, -q of B)."""
        try:
            a, b = label.split("_")
            refs = [ModeRef(s[-1], -1 if s.startswith("mq") else 1) for s in (a, b)]
            if not all(s in ("q" + s[-1], "mq" + s[-1]) for s in (a, b)):
                raise ValueError
        except ValueError:
            raise ValueError(f"cannot parse mode pair {label!r}") from None
        return cls(refs[0], refs[1], picture)

    @property
    def label(self) -> str:
        return f"{self.first.label}_{self.second.label}"

    def with_picture(self, picture) -> "ModePair":
        return ModePair(self.first, self.second, Picture(picture))


ENTANGLED_PAIR = ModePair(ModeRef("A", 1), ModeRef("B", -1))
ALL_PAIRS = (
    ENTANGLED_PAIR,
    ModePair(ModeRef("A", 1), ModeRef("B", 1)),
    ModePair(ModeRef("A", -1), ModeRef("B", -1)),
    ModePair(ModeRef("A", -1), ModeRef("B", 1)),
)


def bogoliubov_uv(q_xi: float = 2.0) -> tuple[float, float]:
    """``(u_q, v_q)`` at ``q = q_xi / healing length`` (independent of mu)."""
    point = dispersion(q_xi, 1.0)
    return point.u_q, point.v_q


def mode_form(emap: EvolutionMap, ref: ModeRef, picture=Picture.QUASIPARTICLE, uv=None) -> LinearOperatorForm:
    """Annihilation-type form of a quasiparticle or atomic side-mode at ``emap.time``."""
    qp = operator_at(emap, ref.mode)
    if Picture(picture) is Picture.QUASIPARTICLE:
        return qp
    if uv is None:
        raise ValueError("the particle picture needs Bogoliubov coefficients (u, v)")
    partner_dag = operator_at(emap, ref.partner.mode, daggered=True)
    return gaussian.particle_mode_form(qp, partner_dag, *uv)


def pair_forms(pair: ModePair, emap: EvolutionMap, uv=None):
    return mode_form(emap, pair.first, pair.picture, uv), mode_form(emap, pair.second, pair.picture, uv)


def xi_number(pair: ModePair, state: gaussian.InitialState, emap: EvolutionMap, uv=None) -> float | None:
    """``Var(n1 - n2) / (<n1> + <n2>)``; ``None`` when the denominator is below ``XI_N_EPS``."""
    f1, f2 = pair_forms(pair, emap, uv)
    denom = gaussian.occupation(f1, state) + gaussian.occupation(f2, state)
    if denom < XI_N_EPS:
        return None
    return gaussian.number_difference_variance(f1, f2, state) / denom


def quadrature_combinations(f1: LinearOperatorForm, f2: LinearOperatorForm):
    """Hermitian forms ``X1 + X2`` and ``P1 - P2``."""
    x1, p1 = gaussian.quadrature_forms(f1)
    x2, p2 = gaussian.quadrature_forms(f2)
    return x1 + x2, p1 - p2


def xi_quadrature(pair: ModePair, state: gaussian.InitialState, emap: EvolutionMap, uv=None) -> float:
    """``(Var(X1 + X2) + Var(P1 - P2)) / 2``."""
    x, p = quadrature_combinations(*pair_forms(pair, emap, uv))
    return 0.5 * (gaussian.variance(x) + gaussian.variance(p))


@dataclass(eq=False)
class EntanglementReport:
    """One pair's xi_n / xi_p over a list of times (a single time for sweep points).

    Undefined xi_n entries are NaN with ``undefined`` set.
    """

    times: np.ndarray
    xi_n: np.ndarray
    xi_p: np.ndarray
    pair: ModePair
    config: SystemConfig
    undefined: np.ndarray
    occupations: np.ndarray = field(default=None)  # shape (len(times), 2)

    @property
    def min_xi_n(self) -> float:
        return float(np.nanmin(self.xi_n))

    @property
    def min_xi_p(self) -> float:
        return float(np.min(self.xi_p))


def _point(config: SystemConfig, t: float, pairs, uv, state):
    emap = evolve(build_dynamical_matrix(config), t)
    out = []
    for pair in pairs:
        f1, f2 = pair_forms(pair, emap, uv)
        n1, n2 = gaussian.occupation(f1, state), gaussian.occupation(f2, state)
        xn = xi_number(pair, state, emap, uv)
        xp = xi_quadrature(pair, state, emap, uv)
        out.append((xn, xp, n1, n2))
    return out


def _reports(rows, times, pairs, config):
    reports = []
    for k, pair in enumerate(pairs):
        xn = np.array([math.nan if r[k][0] is None else r[k][0] for r in rows])
        reports.append(
            EntanglementReport(
                times=np.asarray(times, float),
                xi_n=xn,
                xi_p=np.array([r[k][1] for r in rows]),
                pair=pair,
                config=config,
                undefined=np.array([r[k][0] is None for r in rows]),
                occupations=np.array([[r[k][2], r[k][3]] for r in rows]),
            )
        )
    return reports


def time_series(
    config: SystemConfig,
    times: Iterable[float],
    pairs: Sequence[ModePair] = ALL_PAIRS,
    uv=None,
    state: gaussian.InitialState | None = None,
    workers: int | None = None,
) -> list[EntanglementReport]:
    """Reports for each pair, every time evaluated from t = 0 (never chained)."""
    times = [float(t) for t in times]
    state = state or gaussian.InitialState.from_config(config)
    pairs = tuple(pairs)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda t: _point(config, t, pairs, uv, state), times))
    return _reports(rows, times, pairs, config)


def sweep_coupling_ratio(
    base: SystemConfig,
    ratios: Iterable[float],
    t: float,
    pair: ModePair = ENTANGLED_PAIR,
    uv=None,
    workers: int | None = None,
) -> list[EntanglementReport]:
    """One single-time report per ratio, with ``eta_B = ratio * eta_A``."""
    ratios = [float(r) for r in ratios]
    if any(r <= 0 for r in ratios):
        raise ValueError("coupling ratios must be positive")
    configs = [base.with_ratio(r) for r in ratios]

    def one(cfg):
        state = gaussian.InitialState.from_config(cfg)
        return _reports([_point(cfg, t, (pair,), uv, state)], [t], (pair,), cfg)[0]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, configs))
