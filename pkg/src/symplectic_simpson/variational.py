r"""Discrete Lagrangians built on quadratic elements and Simpson's rule.

On one step :math:`[t_j, t_j + h]` the trajectory is the quadratic
interpolant through ``(q_l, q_m, q_r)`` at :math:`\theta = 0, 1/2, 1`. Its
velocity is linear in :math:`\theta`, with one-sided (Gear) values ``g_l``,
``g_r`` at the ends and ``g_m = (q_r - q_l)/h`` in the middle. Integrating the
Lagrangian :math:`\tfrac m2 \dot q^2 - V(q)` with Simpson's rule gives

.. math::

    L_h(q_l, q_m, q_r) = \frac{mh}{12}(g_l^2 + 4 g_m^2 + g_r^2)
        - \frac h6 \bigl(V(q_l) + 4V(q_m) + V(q_r)\bigr).

Stationarity in ``q_m`` fixes the internal node. For the harmonic potential
this is a closed form and yields the reduced Lagrangian ``L_h^r(q_l, q_r)``;
for any other potential the internal node is found by Newton iteration.

Everything here takes an :class:`~symplectic_simpson.oscillator.OscillatorConfig`
for ``m`` and ``h``; ``omega`` is only read by the harmonic closed forms.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy import optimize

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    SingularJacobianError,
)
from .oscillator import OscillatorConfig, PhaseState, elimination_denominator

_EPS = np.finfo(float).eps


# -- potentials ---------------------------------------------------------------


class Potential(ABC):
    """Scalar potential energy ``V(q)``.

    Subclasses provide ``value`` and ``derivative``. ``second_derivative``
    defaults to a central difference of ``derivative`` with step
    ``eps**(1/3) * max(1, |q|)``; override it when the exact form is known.
    """

    @abstractmethod
    def value(self, q: float) -> float: ...

    @abstractmethod
    def derivative(self, q: float) -> float: ...

    def second_derivative(self, q: float) -> float:
        step = _EPS ** (1.0 / 3.0) * max(1.0, abs(q))
        return (self.derivative(q + step) - self.derivative(q - step)) / (2.0 * step)


class ZeroPotential(Potential):
    """Free particle."""

    def value(self, q):
        return 0.0 * q

    def derivative(self, q):
        return 0.0 * q

    def second_derivative(self, q):
        return 0.0 * q


@dataclass(frozen=True)
class HarmonicPotential(Potential):
    m: float
    omega: float

    @classmethod
    def from_config(cls, cfg: OscillatorConfig) -> "HarmonicPotential":
        return cls(cfg.m, cfg.omega)

    def value(self, q):
        return 0.5 * self.m * self.omega**2 * q * q

    def derivative(self, q):
        return self.m * self.omega**2 * q

    def second_derivative(self, q):
        return self.m * self.omega**2 + 0.0 * q


@dataclass(frozen=True)
class QuarticPotential(Potential):
    """``V(q) = k q^4 / 4``."""

    k: float = 1.0

    def value(self, q):
        return 0.25 * self.k * q**4

    def derivative(self, q):
        return self.k * q**3

    def second_derivative(self, q):
        return 3.0 * self.k * q * q


class FunctionPotential(Potential):
    """Potential assembled from plain callables; ``d2v`` is optional."""

    def __init__(
        self,
        v: Callable[[float], float],
        dv: Callable[[float], float],
        d2v: Optional[Callable[[float], float]] = None,
    ):
        self._v, self._dv, self._d2v = v, dv, d2v

    def value(self, q):
        return self._v(q)

    def derivative(self, q):
        return self._dv(q)

    def second_derivative(self, q):
        if self._d2v is None:
            return super().second_derivative(q)
        return self._d2v(q)


# -- quadratic element and quadrature ------------------------------------------


def basis_eval(theta):
    """Quadratic Lagrange basis ``(phi0, phi_half, phi1)`` on ``[0, 1]``.

    Accepts a scalar or an array of ``theta`` values.

    Raises:
        DomainError: if any ``theta`` lies outside ``[0, 1]``.
    """
    t = np.asarray(theta, dtype=float)
    if np.any((t < 0.0) | (t > 1.0)) or np.any(np.isnan(t)):
        raise DomainError(f"theta must lie in [0, 1], got {theta!r}")
    phi0 = (1.0 - t) * (1.0 - 2.0 * t)
    phi_half = 4.0 * t * (1.0 - t)
    phi1 = t * (2.0 * t - 1.0)
    if t.ndim == 0:
        return float(phi0), float(phi_half), float(phi1)
    return phi0, phi_half, phi1


class GearDerivatives(NamedTuple):
    """Velocities of the quadratic interpolant at ``theta = 0, 1/2, 1``."""

    g_l: float
    g_m: float
    g_r: float


def _gear(q_l, q_m, q_r, h):
    return GearDerivatives(
        (-3.0 * q_l + 4.0 * q_m - q_r) / h,
        (q_r - q_l) / h,
        (q_l - 4.0 * q_m + 3.0 * q_r) / h,
    )


@dataclass(frozen=True)
class QuadraticElement:
    """Nodal values of a quadratic interpolant over one step of length ``h``."""

    q_l: float
    q_m: float
    q_r: float
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ConfigurationError(f"step length must be > 0, got {self.h}")

    def __call__(self, theta):
        return interpolate(self, theta)

    def derivatives(self) -> GearDerivatives:
        return _gear(self.q_l, self.q_m, self.q_r, self.h)


def interpolate(elem: QuadraticElement, theta):
    phi0, phi_half, phi1 = basis_eval(theta)
    return elem.q_l * phi0 + elem.q_m * phi_half + elem.q_r * phi1


def gear_derivatives(elem: QuadraticElement) -> GearDerivatives:
    return elem.derivatives()


def simpson_quadrature(f: Callable[[float], float]) -> float:
    """Simpson's rule for ``f`` on ``[0, 1]``; exact through cubics."""
    return (f(0.0) + 4.0 * f(0.5) + f(1.0)) / 6.0


# -- discrete Lagrangians -----------------------------------------------------


def discrete_lagrangian_midpoint(cfg: OscillatorConfig, V: Potential, q_l, q_r):
    """Linear interpolation with the midpoint rule for the potential."""
    h = cfg.h
    v = (q_r - q_l) / h
    return 0.5 * cfg.m * h * v * v - h * V.value(0.5 * (q_l + q_r))


def discrete_lagrangian_simpson(cfg: OscillatorConfig, V: Potential, q_l, q_m, q_r):
    g_l, g_m, g_r = _gear(q_l, q_m, q_r, cfg.h)
    kinetic = cfg.m * cfg.h / 12.0 * (g_l * g_l + 4.0 * g_m * g_m + g_r * g_r)
    potential = cfg.h / 6.0 * (V.value(q_l) + 4.0 * V.value(q_m) + V.value(q_r))
    return kinetic - potential


def simpson_endpoint_partials(cfg: OscillatorConfig, V: Potential, q_l, q_m, q_r):
    """``(dL_h/dq_l, dL_h/dq_r)`` at fixed ``q_m``.

    At a stationary ``q_m`` these are also the partials of the eliminated
    Lagrangian.
    """
    m, h = cfg.m, cfg.h
    g_l, g_m, g_r = _gear(q_l, q_m, q_r, h)
    d_left = m / 6.0 * (-3.0 * g_l - 4.0 * g_m + g_r) - h / 6.0 * V.derivative(q_l)
    d_right = m / 6.0 * (-g_l + 4.0 * g_m + 3.0 * g_r) - h / 6.0 * V.derivative(q_r)
    return d_left, d_right


# -- internal node ------------------------------------------------------------


def internal_node_harmonic(cfg: OscillatorConfig, q_l, q_r):
    """Stationary midpoint value for the harmonic potential."""
    return 0.5 * (q_l + q_r) / elimination_denominator(cfg)


def internal_node_residual(cfg: OscillatorConfig, V: Potential, q_l, q_m, q_r):
    """Midpoint equation ``4m(q_l - 2q_m + q_r)/h^2 + V'(q_m)``.

    Equal to ``dL_h/dq_m`` divided by ``-2h/3``.
    """
    return cfg.m * (4.0 / cfg.h**2) * (q_l - 2.0 * q_m + q_r) + V.derivative(q_m)


def internal_node_newton(
    cfg: OscillatorConfig,
    V: Potential,
    q_l: float,
    q_r: float,
    guess: Optional[float] = None,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> float:
    """Solve the midpoint equation for ``q_m`` by Newton's method.

    Converged when ``|residual| <= tol * (1 + 4m/h^2 * max(|q_l|, |q_r|))``.

    Args:
        cfg: Supplies ``m`` and ``h``.
        V: Potential; its ``second_derivative`` forms the Jacobian.
        q_l: Left node value.
        q_r: Right node value.
        guess: Starting iterate, default the linear midpoint.
        tol: Relative residual tolerance.
        max_iter: Newton updates allowed.

    Raises:
        SingularJacobianError: if the Jacobian vanishes or is not finite.
        ConvergenceError: if the tolerance is not reached within ``max_iter``.
    """
    m, h = cfg.m, cfg.h
    stiffness = 4.0 * m / h**2
    bound = tol * (1.0 + stiffness * max(abs(q_l), abs(q_r)))
    q_m = 0.5 * (q_l + q_r) if guess is None else float(guess)
    res = internal_node_residual(cfg, V, q_l, q_m, q_r)
    for _ in range(max_iter):
        if abs(res) <= bound:
            return q_m
        jac = -2.0 * stiffness + V.second_derivative(q_m)
        if jac == 0.0 or not np.isfinite(jac):
            raise SingularJacobianError(f"Jacobian {jac!r} at q_m = {q_m!r}")
        q_m = q_m - res / jac
        res = internal_node_residual(cfg, V, q_l, q_m, q_r)
    if abs(res) <= bound:
        return q_m
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations (residual {res:.3e})",
        iterate=q_m,
        residual=res,
    )


# -- harmonic reduced Lagrangian and its scheme -------------------------------


def reduced_lagrangian(cfg: OscillatorConfig, q_l, q_r):
    """Simpson Lagrangian with the harmonic internal node eliminated."""
    m, h, w, s2 = cfg.m, cfg.h, cfg.omega, cfg.s2
    d = elimination_denominator(cfg)
    v = (q_r - q_l) / h
    pot = (22.0 - s2) / 48.0 * (q_l * q_l + q_r * q_r) + q_l * q_r / 12.0
    return (0.5 * m * h * v * v - 0.5 * h * m * w * w * pot) / d


def discrete_el_residual_threepoint(cfg: OscillatorConfig, q_prev, q_cur, q_next):
    """Residual of the explicit three-point Simpson recurrence.

    Equals the discrete Euler-Lagrange sum
    ``dL^r/dq_r(q_prev, q_cur) + dL^r/dq_l(q_cur, q_next)`` divided by
    ``-m h / (1 - (omega h)^2 / 8)``.
    """
    h, w2 = cfg.h, cfg.omega**2
    return (
        (q_next - 2.0 * q_cur + q_prev) / h**2
        + w2 / 24.0 * (q_next + 22.0 * q_cur + q_prev)
        - w2 * w2 * h**2 / 24.0 * q_cur
    )


def momentum_simpson(cfg: OscillatorConfig, q_l, q_r):
    """Right-end momentum ``dL^r/dq_r``, grouped term by term as derived."""
    m, h, w = cfg.m, cfg.h, cfg.omega
    d = elimination_denominator(cfg)
    return (
        m * (q_r - q_l) / h
        - h * (m * w**2 / 6.0) * (q_l + 2.0 * q_r) / d
        + h**3 * (m * w**4 / 48.0) * q_r / d
    )


# -- generic potential stepper (experimental) ---------------------------------


def eliminated_lagrangian(cfg: OscillatorConfig, V: Potential, q_l, q_r, **newton):
    """``L_h`` with ``q_m`` eliminated numerically; any potential."""
    q_m = internal_node_newton(cfg, V, q_l, q_r, **newton)
    return discrete_lagrangian_simpson(cfg, V, q_l, q_m, q_r)


def _eliminated_partials(cfg, V, q_l, q_r):
    q_m = internal_node_newton(cfg, V, q_l, q_r)
    return simpson_endpoint_partials(cfg, V, q_l, q_m, q_r)


def generic_momentum(cfg: OscillatorConfig, V: Potential, q_l, q_r) -> float:
    return _eliminated_partials(cfg, V, q_l, q_r)[1]


def generic_step(cfg: OscillatorConfig, V: Potential, q_prev: float, q_cur: float) -> float:
    """Next position from the discrete Euler-Lagrange equation, any potential.

    Experimental: a secant solve on ``q_next`` with the internal nodes of
    both adjacent steps re-eliminated by Newton at every trial point. No
    symplecticity or order claim is attached beyond the harmonic case.
    """
    p_cur = _eliminated_partials(cfg, V, q_prev, q_cur)[1]
    return _solve_left_momentum(cfg, V, q_cur, p_cur, 2.0 * q_cur - q_prev)


def _solve_left_momentum(cfg, V, q_cur, p_cur, guess):
    # p_cur + dL/dq_l(q_cur, q_next) = 0
    def f(q_next):
        return p_cur + _eliminated_partials(cfg, V, q_cur, q_next)[0]

    scale = max(1.0, abs(q_cur), abs(guess))
    return float(
        optimize.newton(f, guess, x1=guess + 1e-4 * scale * cfg.h, tol=1e-14 * scale, maxiter=100)
    )


def generic_trajectory(
    cfg: OscillatorConfig, V: Potential, state: PhaseState, n_steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """``(p, q)`` arrays of length ``n_steps + 1`` from the generic stepper."""
    p = np.empty(n_steps + 1)
    q = np.empty(n_steps + 1)
    p[0], q[0] = state.p, state.q
    for j in range(n_steps):
        q[j + 1] = _solve_left_momentum(cfg, V, q[j], p[j], q[j] + cfg.h * p[j] / cfg.m)
        p[j + 1] = generic_momentum(cfg, V, q[j], q[j + 1])
    return p, q
