"""Interaction parameters, regime classification, and unitary reductions.

A point interaction is described by four real strengths (eta, tau, lam,
omega) plus the mass m. The discriminant

    d = eta^2 - tau^2 - lam^2

controls everything: d = -4 (with omega = 0) decouples the half-lines,
d = 4 gives a single linear energy band, and (d/4 - 1)^2 = lam^2 marks the
critical strengths. Two exact reductions are provided:

* ``reduce_omega``: a gauge transform scaling (eta, tau, lam) by X and
  removing omega, where X solves d X^2 + (4 - d + omega^2) X - 4 = 0;
* ``minus_four_over_d_partner``: the equivalent coupling (-4/d)(eta, tau,
  lam), valid for d not in {-4, 0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidRegime

_REGIME_TOL = 1e-12


@dataclass(frozen=True)
class Coupling:
    eta: float = 0.0
    tau: float = 0.0
    lam: float = 0.0
    omega: float = 0.0
    mass: float = 0.0

    @property
    def d(self) -> float:
        return self.eta**2 - self.tau**2 - self.lam**2

    def strengths(self):
        return (self.eta, self.tau, self.lam)


@dataclass(frozen=True)
class RegimeClassification:
    d: float
    is_confining: bool
    is_critical: bool
    is_case_d4: bool
    det_condition: bool


@dataclass(frozen=True)
class GaugeReduction:
    x_factor: float
    phase: complex
    reduced: Coupling


def classify(c: Coupling, tol: float = _REGIME_TOL) -> RegimeClassification:
    d = c.d
    confining = abs(d + 4.0) <= tol and abs(c.omega) <= tol
    critical = abs((d / 4.0 - 1.0) ** 2 - c.lam**2) <= tol
    return RegimeClassification(
        d=d,
        is_confining=confining,
        is_critical=critical,
        is_case_d4=abs(d - 4.0) <= tol,
        det_condition=not confining,
    )


def _x_roots(d: float, omega: float):
    """Both real solutions of d X^2 + (4 - d + omega^2) X - 4 = 0."""
    if d == 0.0:
        return (4.0 / (4.0 + omega**2),)
    b = d - 4.0 - omega**2
    disc = math.sqrt(b * b + 16.0 * d)  # equals (d+4-w^2)^2 + 16 w^2 >= 0
    return ((b + disc) / (2.0 * d), (b - disc) / (2.0 * d))


def _phase_from_x(c: Coupling, x: float) -> complex:
    d, w = c.d, c.omega
    return (4.0 + d * x + 2j * w) / (4.0 + d * x - 2j * w)


def _phase_from_x_alt(c: Coupling, x: float) -> complex:
    w = c.omega
    return (w * x + 2j * (1.0 - x)) / (w * x - 2j * (1.0 - x))


def reduce_omega(c: Coupling, root: int = 0) -> GaugeReduction:
    """Gauge away omega; for omega = 0 returns the identity reduction.

    ``root`` selects between the two real solutions for X (0 = '+' root,
    the default and deterministic choice; 1 = '-' root).
    """
    if c.omega == 0.0:
        return GaugeReduction(x_factor=1.0, phase=1.0 + 0j, reduced=c)
    roots = _x_roots(c.d, c.omega)
    x = roots[min(root, len(roots) - 1)]
    phase = _phase_from_x(c, x)
    reduced = Coupling(eta=x * c.eta, tau=x * c.tau, lam=x * c.lam, omega=0.0, mass=c.mass)
    return GaugeReduction(x_factor=x, phase=phase, reduced=reduced)


def omega_reduction_pair(c: Coupling):
    """Both valid gauge reductions (one element for d = 0)."""
    if c.omega == 0.0:
        return (reduce_omega(c),)
    return tuple(reduce_omega(c, root=i) for i in range(len(_x_roots(c.d, c.omega))))


def minus_four_over_d_partner(c: Coupling, tol: float = _REGIME_TOL) -> Coupling:
    """The unitarily equivalent coupling (-4/d)(eta, tau, lam), omega = 0 only."""
    if c.omega != 0.0:
        raise InvalidRegime("the -4/d map is defined for omega = 0 only")
    d = c.d
    if abs(d) <= tol or abs(d + 4.0) <= tol:
        raise InvalidRegime(f"the -4/d map is undefined for d = {d}")
    s = -4.0 / d
    return replace(c, eta=s * c.eta, tau=s * c.tau, lam=s * c.lam)
