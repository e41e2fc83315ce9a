"""Trajectories, max-norm error tables, order estimates and audits.

The default benchmark is ``m = 1``, ``omega = 2*pi`` (period 1) started from
``(p, q) = (m*omega, 0)``, i.e. ``q(t) = sin(omega t)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, StabilityWindowError
from .oscillator import (
    SINGULAR_TOL,
    OscillatorConfig,
    PhaseState,
    discrete_stiffness_factor,
    exact_flow,
    newmark_propagator,
    simpson_propagator,
)
from .variational import discrete_el_residual_threepoint

#: Errors at or below this are treated as round-off ("exact" verdict).
ROUNDOFF_THRESHOLD = 1e-11

QUANTITIES = ("momentum", "state", "energy_H", "energy_Hd")


class Scheme(str, enum.Enum):
    NEWMARK = "newmark"
    SIMPSON = "simpson"
    EXACT = "exact"


@dataclass(frozen=True)
class ExperimentSpec:
    """One convergence experiment: oscillator, horizon, meshes and scheme."""

    m: float = 1.0
    omega: float = 2.0 * math.pi
    period_count: float = 1.0
    mesh_counts: tuple[int, ...] = (10, 20, 40)
    scheme: Scheme = Scheme.SIMPSON
    initial_state: Optional[PhaseState] = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "mesh_counts", tuple(int(n) for n in self.mesh_counts))
        if not (self.m > 0 and math.isfinite(self.m)):
            raise ConfigurationError(f"mass must be > 0, got {self.m}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ConfigurationError(f"omega must be > 0 to define a period, got {self.omega}")
        if not (self.period_count > 0 and math.isfinite(self.period_count)):
            raise ConfigurationError(f"period_count must be > 0, got {self.period_count}")
        n = self.mesh_counts
        if not n:
            raise ConfigurationError("mesh_counts is empty")
        if any(k < 2 for k in n) or any(b <= a for a, b in zip(n, n[1:])):
            raise ConfigurationError(
                f"mesh_counts must be strictly increasing with N >= 2, got {n}"
            )
        if self.initial_state is None:
            object.__setattr__(self, "initial_state", PhaseState(self.m * self.omega, 0.0))

    @property
    def final_time(self) -> float:
        return self.period_count * 2.0 * math.pi / self.omega

    def config(self, n: int) -> OscillatorConfig:
        return OscillatorConfig(self.m, self.omega, self.final_time / n)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Nodal values of one run; every array has length ``N + 1``.

    ``energies_discrete`` is NaN throughout when ``(omega*h)**2 == 8``, where
    the discrete energy is undefined.
    """

    cfg: OscillatorConfig
    scheme: Scheme
    times: np.ndarray
    p: np.ndarray
    q: np.ndarray
    energies_exact: np.ndarray
    energies_discrete: np.ndarray

    @property
    def states(self) -> list[PhaseState]:
        return [PhaseState(float(a), float(b)) for a, b in zip(self.p, self.q)]

    def __len__(self):
        return len(self.times)


def run_trajectory(spec: ExperimentSpec, n: int) -> TrajectoryRecord:
    """Integrate ``spec`` on ``n`` uniform steps over ``period_count`` periods.

    Raises:
        StabilityWindowError: for a Simpson run with ``omega*h >= 2*sqrt(2)``.
    """
    cfg = spec.config(n)
    y0 = spec.initial_state
    times = np.arange(n + 1) * cfg.h
    p = np.empty(n + 1)
    q = np.empty(n + 1)

    if spec.scheme is Scheme.EXACT:
        for j, t in enumerate(times):
            y = exact_flow(cfg, y0, float(t))
            p[j], q[j] = y.p, y.q
    else:
        if spec.scheme is Scheme.SIMPSON:
            if not cfg.in_simpson_window:
                raise StabilityWindowError(
                    f"omega*h = {cfg.s:.6g} violates the stability window "
                    "0 < ωh < 2√2"
                )
            prop = simpson_propagator(cfg)
        else:
            prop = newmark_propagator(cfg)
        a11, a12, a21, a22 = prop.a11, prop.a12, prop.a21, prop.a22
        p[0], q[0] = y0.p, y0.q
        for j in range(n):
            p[j + 1] = a11 * p[j] + a12 * q[j]
            q[j + 1] = a21 * p[j] + a22 * q[j]

    kinetic = p * p / (2.0 * cfg.m)
    stiffness = 0.5 * cfg.m * cfg.omega**2
    energies = kinetic + stiffness * q * q
    if abs(1.0 - cfg.s2 / 8.0) <= SINGULAR_TOL:
        energies_d = np.full(n + 1, np.nan)
    else:
        energies_d = kinetic + stiffness * discrete_stiffness_factor(cfg) * q * q
    return TrajectoryRecord(cfg, spec.scheme, times, p, q, energies, energies_d)


class ErrorNorms(NamedTuple):
    momentum: float
    state: float
    energy_H: float
    energy_Hd: float


def max_norm_errors(record: TrajectoryRecord, spec: ExperimentSpec) -> ErrorNorms:
    """Max over nodes of the deviation from the exact solution.

    Energy errors are measured against the initial value of each energy,
    ``max_j |E(y_j) - E(y_0)|``.
    """
    y0 = spec.initial_state
    w, m = record.cfg.omega, record.cfg.m
    c, s = np.cos(w * record.times), np.sin(w * record.times)
    p_exact = y0.p * c - m * w * y0.q * s
    q_exact = y0.q * c + y0.p / (m * w) * s
    return ErrorNorms(
        float(np.max(np.abs(record.p - p_exact))),
        float(np.max(np.abs(record.q - q_exact))),
        float(np.max(np.abs(record.energies_exact - record.energies_exact[0]))),
        float(np.max(np.abs(record.energies_discrete - record.energies_discrete[0]))),
    )


class OrderEstimate(NamedTuple):
    """Pairwise orders ``log(e_i/e_{i+1}) / log(N_{i+1}/N_i)`` and a verdict.

    ``verdict`` is ``"exact"`` when every error is at round-off level,
    ``"order-k"`` when all pairwise orders round to the same positive ``k``,
    and ``"indeterminate"`` otherwise. Pairs touching a round-off error get
    a NaN order.
    """

    orders: tuple[float, ...]
    verdict: str


def estimate_orders(
    errors: Sequence[float],
    mesh_counts: Optional[Sequence[int]] = None,
    threshold: float = ROUNDOFF_THRESHOLD,
) -> OrderEstimate:
    e = [float(x) for x in errors]
    if mesh_counts is None:
        mesh_counts = [2**k for k in range(len(e))]
    if len(mesh_counts) != len(e):
        raise ValueError("errors and mesh_counts differ in length")

    small = [x <= threshold for x in e]
    orders = []
    for i in range(len(e) - 1):
        if small[i] or small[i + 1]:
            orders.append(math.nan)
        else:
            orders.append(math.log(e[i] / e[i + 1]) / math.log(mesh_counts[i + 1] / mesh_counts[i]))
    orders = tuple(orders)

    if e and all(small):
        return OrderEstimate(orders, "exact")
    if len(e) < 2 or any(small) or any(not math.isfinite(x) for x in e):
        return OrderEstimate(orders, "indeterminate")
    rounded = {round(o) for o in orders}
    if len(rounded) == 1 and min(orders) > 0:
        k = rounded.pop()
        if k > 0:
            return OrderEstimate(orders, f"order-{k}")
    return OrderEstimate(orders, "indeterminate")


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-mesh max-norm errors and order estimates for the four quantities."""

    spec: ExperimentSpec
    mesh_counts: tuple[int, ...]
    errors: dict[str, tuple[float, ...]]
    orders: dict[str, tuple[float, ...]]
    verdicts: dict[str, str]

    def rows(self):
        """``(quantity, N, error, order_or_nan, verdict)`` in table order."""
        for name in QUANTITIES:
            for i, n in enumerate(self.mesh_counts):
                order = self.orders[name][i - 1] if i > 0 else math.nan
                yield name, n, self.errors[name][i], order, self.verdicts[name]


def convergence_study(spec: ExperimentSpec) -> ConvergenceReport:
    """Run every mesh of ``spec`` and tabulate errors and orders."""
    norms = [max_norm_errors(run_trajectory(spec, n), spec) for n in spec.mesh_counts]
    errors, orders, verdicts = {}, {}, {}
    for i, name in enumerate(QUANTITIES):
        column = tuple(nm[i] for nm in norms)
        est = estimate_orders(column, spec.mesh_counts)
        errors[name], orders[name], verdicts[name] = column, est.orders, est.verdict
    return ConvergenceReport(spec, spec.mesh_counts, errors, orders, verdicts)


@dataclass(frozen=True)
class TruncationFit:
    """Least-squares fit ``|residual| ~ prefactor * h**exponent``."""

    exponent: float
    prefactor: float
    expected_prefactor: float
    steps: tuple[float, ...]
    residuals: tuple[float, ...]

    @property
    def prefactor_ratio(self) -> float:
        return self.prefactor / self.expected_prefactor


def truncation_error_probe(
    omega: float = 2.0 * math.pi,
    t: float = 0.3,
    steps: Sequence[float] = (1e-1, 5e-2, 2.5e-2, 1.25e-2),
    amplitude: float = 1.0,
) -> TruncationFit:
    """Residual of the three-point Simpson scheme on ``q(t) = A sin(omega t)``.

    The expected leading term is ``omega**6 h**4 q(t) / 1440``. Steps whose
    residual is within ``1e3`` unit round-offs of the operand scale are
    dropped from the fit.

    Raises:
        ValueError: if fewer than two steps survive the round-off filter.
    """
    def q(x):
        return amplitude * math.sin(omega * x)

    q_j = q(t)
    eps = np.finfo(float).eps
    kept_h, kept_r = [], []
    for h in steps:
        cfg = OscillatorConfig(1.0, omega, h)
        r = discrete_el_residual_threepoint(cfg, q(t - h), q_j, q(t + h))
        scale = abs(amplitude) * (4.0 / h**2 + omega**2 + omega**4 * h**2)
        if abs(r) > 1e3 * eps * scale:
            kept_h.append(h)
            kept_r.append(abs(r))
    if len(kept_h) < 2:
        raise ValueError("fewer than two residuals above round-off; cannot fit")
    slope, intercept = np.polyfit(np.log(kept_h), np.log(kept_r), 1)
    return TruncationFit(
        float(slope),
        float(math.exp(intercept)),
        omega**6 * abs(q_j) / 1440.0,
        tuple(kept_h),
        tuple(kept_r),
    )


@dataclass(frozen=True)
class SymplecticityReport:
    scheme: Scheme
    s_values: np.ndarray
    deviations: np.ndarray = field(repr=False)

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviations)) if len(self.deviations) else 0.0


def symplecticity_audit(
    scheme: Scheme | str, s_values: Sequence[float], m: float = 1.0
) -> SymplecticityReport:
    """``|det - 1|`` of the scheme's propagator at each ``s = omega*h``.

    Evaluated with ``h = 1`` and ``omega = s``.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.EXACT:
        raise ValueError("the exact flow has no propagator to audit")
    build = simpson_propagator if scheme is Scheme.SIMPSON else newmark_propagator
    s_arr = np.asarray(s_values, dtype=float)
    dev = np.array([abs(build(OscillatorConfig(m, float(s), 1.0)).determinant() - 1.0) for s in s_arr])
    return SymplecticityReport(scheme, s_arr, dev)
