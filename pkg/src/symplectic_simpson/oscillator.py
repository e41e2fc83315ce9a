r"""Closed-form objects for the harmonic oscillator :math:`V(q) = \tfrac12 m\omega^2 q^2`.

Both integrators in this module are linear one-step maps on the phase state
``(p, q)`` and are therefore represented by constant 2x2 matrices:

* the midpoint (Newmark) scheme, second order, which conserves the exact energy
  :math:`H = p^2/2m + m\omega^2 q^2/2`;
* the Simpson scheme, fourth order, explicit, stable for
  :math:`0 < \omega h < 2\sqrt{2}`, which conserves a modified energy
  :math:`H_d`, an :math:`O(h^4)` perturbation of :math:`H`.

All values are immutable and every function is pure.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    ConfigurationError,
    NotSymplecticError,
    SingularEliminationError,
    StabilityWarning,
    UnsupportedFormError,
)

#: Upper edge of the Simpson stability window, as a bound on ``(omega*h)**2``.
SIMPSON_S2_LIMIT = 8.0
SIMPSON_S_LIMIT = 2.0 * math.sqrt(2.0)
SINGULAR_TOL = 8.0 * np.finfo(float).eps


@dataclass(frozen=True)
class PhaseState:
    """Momentum/position pair."""

    p: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise ValueError(f"non-finite phase state (p={self.p}, q={self.q})")

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.q])


@dataclass(frozen=True)
class OscillatorConfig:
    """Mass, angular frequency and time step of one harmonic-oscillator run.

    The dimensionless product ``s = omega * h`` and its square are evaluated
    once here so that every formula downstream sees bit-identical values.
    """

    m: float
    omega: float
    h: float
    s: float = field(init=False, repr=False)
    s2: float = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("m", "omega", "h"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigurationError(f"{name} must be finite, got {value}")
        if self.m <= 0:
            raise ConfigurationError(f"mass must be > 0, got {self.m}")
        if self.omega < 0:
            raise ConfigurationError(f"omega must be >= 0, got {self.omega}")
        if self.h <= 0:
            raise ConfigurationError(f"time step must be > 0, got {self.h}")
        s = self.omega * self.h
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "s2", s * s)

    @property
    def in_simpson_window(self) -> bool:
        return 0.0 < self.s2 < SIMPSON_S2_LIMIT


@dataclass(frozen=True)
class Propagator:
    """2x2 matrix ``[[a11, a12], [a21, a22]]`` acting on ``(p, q)``.

    ``stable`` is False when the matrix was built outside the scheme's
    stability window; the entries are still the formula values.
    """

    a11: float
    a12: float
    a21: float
    a22: float
    stable: bool = True

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def determinant(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def apply(self, state: PhaseState) -> PhaseState:
        return PhaseState(
            self.a11 * state.p + self.a12 * state.q,
            self.a21 * state.p + self.a22 * state.q,
        )


class StabilityVerdict(NamedTuple):
    """Outcome of the characteristic-root analysis of the three-point scheme.

    Attributes:
        s: The dimensionless step ``omega * h``.
        stable: True iff ``0 < s < 2*sqrt(2)`` and the roots lie on the unit
            circle.
        discriminant: ``b**2 - 4*a*c`` from its factorized form.
        root_modulus: Largest modulus of the two characteristic roots.
        roots: The two roots (complex).
        roots_bounded: Root criterion alone (``discriminant < 0`` and moduli
            at most 1); true again in the band ``12 < s**2 < 24``, where the
            internal node has already left its admissible range.
    """

    s: float
    stable: bool
    discriminant: float
    root_modulus: float
    roots: tuple[complex, complex]
    roots_bounded: bool


class QuadraticForm(NamedTuple):
    """Coefficients of ``Q(p, q) = xi*p**2/2 + eta*p*q + zeta*q**2/2``."""

    xi: float
    eta: float
    zeta: float

    @property
    def degenerate(self) -> bool:
        return self.xi == 0.0 and self.eta == 0.0 and self.zeta == 0.0

    def __call__(self, p, q):
        return 0.5 * self.xi * p * p + self.eta * p * q + 0.5 * self.zeta * q * q


def elimination_denominator(cfg: OscillatorConfig) -> float:
    """``1 - (omega h)^2 / 8``, the divisor of the internal-node elimination.

    No double squares to exactly 8, so values within a few ulp of zero are
    treated as the singular point.
    """
    d = 1.0 - cfg.s2 / 8.0
    if abs(d) <= SINGULAR_TOL:
        raise SingularEliminationError(
            f"omega*h = {cfg.s!r} is 2*sqrt(2) to rounding: the internal-node "
            "elimination is singular"
        )
    return d


def newmark_propagator(cfg: OscillatorConfig) -> Propagator:
    """One step of the midpoint (Newmark) scheme; unconditionally stable."""
    x = cfg.s2 / 4.0
    d = 1.0 + x
    diag = (1.0 - x) / d
    return Propagator(
        diag,
        -cfg.m * cfg.omega * cfg.s / d,
        cfg.h / cfg.m / d,
        diag,
    )


def simpson_propagator(cfg: OscillatorConfig) -> Propagator:
    """One step of the Simpson scheme.

    Outside ``0 < omega*h < 2*sqrt(2)`` (``omega = 0`` excepted) a
    :class:`StabilityWarning` is issued and the returned propagator carries
    ``stable=False``.

    Raises:
        SingularEliminationError: if ``(omega*h)**2 == 8`` to rounding.
    """
    s2 = cfg.s2
    s4 = s2 * s2
    elimination_denominator(cfg)
    d = 1.0 + s2 / 24.0
    diag = (1.0 - (11.0 / 24.0) * s2 + s4 / 48.0) / d
    a12 = -cfg.m * cfg.omega * cfg.s * (1.0 - s2 / 12.0) * (1.0 - s2 / 24.0) / d
    a21 = (cfg.h / cfg.m) * (1.0 - s2 / 8.0) / d
    stable = s2 < SIMPSON_S2_LIMIT
    if not stable:
        warnings.warn(
            f"omega*h = {cfg.s:.17g} is outside the stability window "
            "0 < omega*h < 2*sqrt(2)",
            StabilityWarning,
            stacklevel=2,
        )
    return Propagator(diag, a12, a21, diag, stable=stable)


def exact_flow(cfg: OscillatorConfig, state: PhaseState, t: float) -> PhaseState:
    """Exact solution of ``dp/dt = -m omega^2 q``, ``dq/dt = p/m`` at time ``t``."""
    m, w = cfg.m, cfg.omega
    if w == 0.0:
        return PhaseState(state.p, state.q + state.p * t / m)
    c, s = math.cos(w * t), math.sin(w * t)
    return PhaseState(
        state.p * c - m * w * state.q * s,
        state.q * c + state.p / (m * w) * s,
    )


def energy_exact(cfg: OscillatorConfig, state: PhaseState) -> float:
    return state.p**2 / (2.0 * cfg.m) + 0.5 * cfg.m * cfg.omega**2 * state.q**2


def discrete_stiffness_factor(cfg: OscillatorConfig) -> float:
    """Factor multiplying ``m omega^2 q^2 / 2`` in the Simpson discrete energy."""
    s2 = cfg.s2
    d = elimination_denominator(cfg)
    return (1.0 - s2 / 12.0) * (1.0 - s2 / 24.0) / d


def energy_discrete_simpson(cfg: OscillatorConfig, state: PhaseState) -> float:
    """Quadratic energy conserved exactly by :func:`simpson_propagator`.

    Raises:
        SingularEliminationError: if ``(omega*h)**2 == 8``.
    """
    k = discrete_stiffness_factor(cfg)
    return state.p**2 / (2.0 * cfg.m) + 0.5 * cfg.m * cfg.omega**2 * k * state.q**2


def characteristic_coefficients(s2: float) -> tuple[float, float, float]:
    """``(a, b, c)`` of ``a r^2 + b r + c`` for ``q_j = r**j`` in the three-point scheme.

    The scheme is symmetric under ``q_{j+1} <-> q_{j-1}``, hence ``c == a``.
    """
    a = 1.0 + s2 / 24.0
    b = -(48.0 - 22.0 * s2 + s2 * s2) / 24.0
    return a, b, a


def discriminant_factorized(s2: float) -> float:
    return s2 / 576.0 * (s2 - 24.0) * (s2 - 12.0) * (s2 - 8.0)


def stability_analysis(cfg: OscillatorConfig, root_tol: float = 1e-12) -> StabilityVerdict:
    """Characteristic-root stability of the Simpson three-point scheme."""
    s2 = cfg.s2
    a, b, c = characteristic_coefficients(s2)
    delta = discriminant_factorized(s2)
    sq = cmath.sqrt(complex(delta))
    roots = ((-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a))
    modulus = max(abs(r) for r in roots)
    roots_bounded = delta < 0.0 and modulus <= 1.0 + root_tol
    stable = roots_bounded and 0.0 < s2 < SIMPSON_S2_LIMIT
    return StabilityVerdict(cfg.s, stable, delta, modulus, roots, roots_bounded)


def conserved_quadratic_form(prop: Propagator, det_tol: float = 1e-12) -> QuadraticForm:
    """Quadratic form in ``(p, q)`` left invariant by ``prop``.

    For a unit-determinant matrix ``[[alpha, beta], [gamma, delta]]`` with
    ``alpha == delta`` the invariant form is ``gamma p^2/2 - beta q^2/2``
    up to scale; the scale is fixed here by ``xi = gamma``. The identity
    matrix yields the all-zero (degenerate) form.

    Raises:
        NotSymplecticError: if ``|det(prop) - 1| > det_tol``.
        UnsupportedFormError: if the diagonal entries differ.
    """
    det = prop.determinant()
    if abs(det - 1.0) > det_tol:
        raise NotSymplecticError(f"det = {det!r} differs from 1")
    scale = max(abs(prop.a11), abs(prop.a22), 1.0)
    if abs(prop.a11 - prop.a22) > 4 * np.finfo(float).eps * scale:
        raise UnsupportedFormError(
            f"unequal diagonal entries {prop.a11!r} and {prop.a22!r}"
        )
    return QuadraticForm(prop.a21, 0.0, -prop.a12)
