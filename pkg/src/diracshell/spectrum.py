"""Spectrum of the full two-dimensional operator, assembled from fiber bands.

The full operator is the direct integral over k of the fiber operators, so
its spectrum is the free part (-inf, -|m|] u [|m|, +inf) together with the
closures of the ranges of the energy bands. Constant bands collapse to
eigenvalues of infinite multiplicity; non-constant analytic bands fill in
absolutely continuous spectrum; the singular continuous part is always
empty. Band ranges are computed exactly from component endpoints, interior
critical points, and large-k asymptotics of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coupling import Coupling, classify
from .errors import ConfiningRegime, DomainError, NotLinear
from . import fiber
from .fiber import Band, INF, _quad_coeffs, _real_quadratic_roots

_ENDPOINT_TOL = 1e-12
_FLAT_RTOL = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def contains(self, x: float) -> bool:
        if self.lo < x < self.hi:
            return True
        if x == self.lo and self.lo_closed:
            return True
        if x == self.hi and self.hi_closed:
            return True
        return False

    def to_json(self):
        def enc(v):
            if v == INF:
                return "inf"
            if v == -INF:
                return "-inf"
            return v

        return [enc(self.lo), enc(self.hi), self.lo_closed, self.hi_closed]


class IntervalSet:
    """Sorted, disjoint union of intervals over the extended reals."""

    def __init__(self, intervals=()):
        self.intervals: list[Interval] = []
        for iv in intervals:
            self.intervals.append(iv if isinstance(iv, Interval) else Interval(*iv))
        self._normalize()

    def _normalize(self):
        ivs = [iv for iv in self.intervals if iv.lo < iv.hi or (iv.lo == iv.hi and iv.lo_closed and iv.hi_closed)]
        ivs.sort(key=lambda iv: (iv.lo, not iv.lo_closed))
        out: list[Interval] = []
        for iv in ivs:
            if out:
                last = out[-1]
                touches = iv.lo < last.hi or (
                    iv.lo == last.hi and (iv.lo_closed or last.hi_closed)
                )
                if touches:
                    if (iv.hi, iv.hi_closed) > (last.hi, last.hi_closed):
                        out[-1] = Interval(last.lo, iv.hi, last.lo_closed, iv.hi_closed)
                    continue
            out.append(iv)
        self.intervals = out

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def contains(self, x: float) -> bool:
        return any(iv.contains(x) for iv in self.intervals)

    def contains_in_closure(self, x: float, tol: float = _ENDPOINT_TOL) -> bool:
        return any(iv.lo - tol <= x <= iv.hi + tol for iv in self.intervals)

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __repr__(self):
        return f"IntervalSet({self.intervals!r})"

    def almost_equal(self, other: "IntervalSet", tol: float = _ENDPOINT_TOL) -> bool:
        if len(self.intervals) != len(other.intervals):
            return False
        for a, b in zip(self.intervals, other.intervals):
            for u, v in ((a.lo, b.lo), (a.hi, b.hi)):
                if u == v:
                    continue
                if math.isinf(u) or math.isinf(v) or abs(u - v) > tol:
                    return False
            if (a.lo_closed, a.hi_closed) != (b.lo_closed, b.hi_closed):
                return False
        return True

    def to_json(self):
        return [iv.to_json() for iv in self.intervals]


def free_spectrum(mass: float) -> IntervalSet:
    m = abs(mass)
    return IntervalSet([Interval(-INF, -m, False, True), Interval(m, INF, True, False)])


@dataclass(frozen=True)
class PointSpectrumEntry:
    value: float
    embedded: bool

    def to_json(self):
        return {"value": self.value, "embedded": self.embedded, "multiplicity": "infinite"}


@dataclass(frozen=True)
class SpectrumDescription:
    ac: IntervalSet
    pp: tuple
    case_tag: str  # thm_i | thm_ii | thm_iii

    def to_json(self):
        return {
            "ac": self.ac.to_json(),
            "pp": [p.to_json() for p in self.pp],
            "sc": [],
            "case": self.case_tag,
        }


# ---------------------------------------------------------------------------
# Band ranges


def _asymptotic_slope_and_level(band: Band, direction: float):
    """Leading slope and, when flat, the finite limit of z(k) as k -> dir*inf."""
    c = band.coupling
    if band.branch_id == "single_d4":
        return -c.lam / c.eta, -c.tau * c.mass / c.eta
    cpm, denom, qa, qb, qc = _quad_coeffs(c)
    sq = math.sqrt(qa)
    if sq == 0.0:
        # qa = 0 forces tau = 0 and hence qb = 0, so the radicand is the
        # constant qc and the square-root term contributes only a level shift
        slope = -c.eta * c.lam / denom
        level = (-c.eta * c.tau * c.mass + band._sign * cpm * math.sqrt(qc)) / denom
    else:
        slope = (-c.eta * c.lam + band._sign * cpm * sq * direction) / denom
        level = (
            -c.eta * c.tau * c.mass + band._sign * direction * cpm * qb / (2.0 * sq)
        ) / denom
    scale = (abs(c.eta * c.lam) + cpm * sq) / denom
    if abs(slope) <= _FLAT_RTOL * max(scale, 1.0):
        slope = 0.0
    return slope, level


def _critical_points(band: Band, lo: float, hi: float):
    """Interior zeros of z'(k) on (lo, hi) for the quadratic branches."""
    c = band.coupling
    if band.branch_id == "single_d4":
        return []
    cpm, denom, qa, qb, qc = _quad_coeffs(c)
    a = 4.0 * qa * (qa * cpm**2 - c.eta**2 * c.lam**2)
    b = 4.0 * qb * (qa * cpm**2 - c.eta**2 * c.lam**2)
    cc = cpm**2 * qb**2 - 4.0 * c.eta**2 * c.lam**2 * qc
    pts = []
    for r in _real_quadratic_roots(a, b, cc):
        if lo < r < hi:
            # squaring introduces spurious roots; confirm with the derivative
            with np.errstate(invalid="ignore", divide="ignore"):
                dz = float(band.evaluate_derivative(np.array(r)))
            if math.isfinite(dz) and abs(dz) <= 1e-8 * max(1.0, abs(r)):
                pts.append(r)
    # zeros of the radicand are kinks of sqrt(Q), hence extremum candidates
    for r in _real_quadratic_roots(qa, qb, qc):
        if lo < r < hi:
            pts.append(r)
    return pts


def band_range_closure(band: Band) -> IntervalSet:
    """Closure of the range of a band, one closed interval per domain component."""
    out = []
    for lo, hi in band.domain:
        values = []
        reach_pos = reach_neg = False
        for end, direction in ((lo, -1.0), (hi, 1.0)):
            if math.isinf(end):
                slope, level = _asymptotic_slope_and_level(band, direction)
                if slope == 0.0:
                    values.append(level)
                elif slope * direction > 0:
                    reach_pos = True
                else:
                    reach_neg = True
            else:
                values.append(float(band.evaluate(np.array(end))))
        for r in _critical_points(band, lo, hi):
            values.append(float(band.evaluate(np.array(r))))
        vlo = -INF if reach_neg else min(values)
        vhi = INF if reach_pos else max(values)
        out.append(Interval(vlo, vhi, not math.isinf(vlo), not math.isinf(vhi)))
    return IntervalSet(out)


# ---------------------------------------------------------------------------
# Assembly


def assemble_spectrum(c: Coupling) -> SpectrumDescription:
    """Full-operator spectrum for an omega = 0 coupling with d != -4."""
    if c.omega != 0.0:
        raise DomainError("assemble_spectrum expects omega = 0; reduce omega first")
    cls = classify(c)
    if cls.is_confining:
        raise ConfiningRegime("d = -4 decouples the half-planes")
    m = c.mass
    ac = free_spectrum(m)
    pp = []
    if cls.is_case_d4:
        case = "thm_i" if c.lam != 0.0 else "thm_ii"
    else:
        case = "thm_iii"

    for band in fiber.bands(c):
        if band.is_constant:
            continue
        ac = ac.union(band_range_closure(band))

    if cls.is_case_d4 and c.lam == 0.0:
        pp.append(-c.tau * m / c.eta + 0.0)  # + 0.0 normalizes -0.0
    elif m == 0.0 and c.lam != 0.0:
        d = c.d
        if abs(d - 4.0 - 4.0 * c.lam) <= _ENDPOINT_TOL or abs(d - 4.0 + 4.0 * c.lam) <= _ENDPOINT_TOL:
            pp.append(0.0)

    entries = tuple(
        PointSpectrumEntry(value=v, embedded=ac.contains_in_closure(v)) for v in pp
    )
    return SpectrumDescription(ac=ac, pp=entries, case_tag=case)


def special_case_table(case: str, mass: float, strength: float) -> SpectrumDescription:
    """Closed-form spectra of the three one-parameter families."""
    m = abs(mass)
    if case == "electrostatic":
        eta = strength
        if eta == 0.0:
            return SpectrumDescription(free_spectrum(m), (), "thm_iii")
        # same tolerance as the regime classifier, so the two descriptions agree
        if abs(eta * eta - 4.0) <= _ENDPOINT_TOL:
            pp = (PointSpectrumEntry(0.0, embedded=(m == 0.0)),)
            return SpectrumDescription(free_spectrum(m), pp, "thm_ii")
        r = (eta * eta - 4.0) / (eta * eta + 4.0) * m
        if eta < -2.0:
            ac = IntervalSet([Interval(-INF, -r, False, True), Interval(m, INF, True, False)])
        elif -2.0 < eta < 0.0:
            ac = IntervalSet([Interval(-INF, -m, False, True), Interval(-r, INF, True, False)])
        elif 0.0 < eta < 2.0:
            ac = IntervalSet([Interval(-INF, r, False, True), Interval(m, INF, True, False)])
        else:
            ac = IntervalSet([Interval(-INF, -m, False, True), Interval(r, INF, True, False)])
        return SpectrumDescription(ac, (), "thm_iii")

    if case == "lorentz":
        tau = strength
        if tau * mass >= 0.0:
            return SpectrumDescription(free_spectrum(m), (), "thm_iii")
        r = abs(4.0 - tau * tau) / (4.0 + tau * tau) * m
        ac = IntervalSet([Interval(-INF, -r, False, True), Interval(r, INF, True, False)])
        return SpectrumDescription(ac, (), "thm_iii")

    if case == "magnetic":
        # the magnetic interaction never narrows the gap
        return SpectrumDescription(free_spectrum(m), (), "thm_iii")

    raise DomainError(f"unknown special case {case!r}")


def group_velocity(band: Band) -> float:
    if not band.is_linear:
        raise NotLinear("group velocity is defined for linear bands only")
    return band.slope


# ---------------------------------------------------------------------------
# Wave packets


@dataclass(frozen=True)
class WavePacket:
    """Gaussian superposition of bound states along one band."""

    band: Band
    k0: float
    sigma_k: float
    amplitude: float = 1.0
    nodes: int = 512
    support_sigmas: float = 6.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.nodes < 256:
            raise DomainError("packet quadrature needs at least 256 nodes")
        lo = self.k0 - self.support_sigmas * self.sigma_k
        hi = self.k0 + self.support_sigmas * self.sigma_k
        if not any(dlo < lo and hi < dhi for dlo, dhi in self.band.domain):
            raise DomainError("envelope support leaks outside the band domain")

    @property
    def support(self):
        return (
            self.k0 - self.support_sigmas * self.sigma_k,
            self.k0 + self.support_sigmas * self.sigma_k,
        )

    def _quadrature(self):
        if "nodes" not in self._cache:
            c = self.band.coupling
            lo, hi = self.support
            xg, wg = np.polynomial.legendre.leggauss(self.nodes)
            ks = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
            ws = 0.5 * (hi - lo) * wg
            zs = np.asarray(self.band.evaluate(ks))
            envelope = self.amplitude * np.exp(-((ks - self.k0) ** 2) / (2.0 * self.sigma_k**2))
            lam_arr = fiber.transmission_matrix(c).lambda_matrix.array
            states = [fiber._bound_state(c, float(k), float(z), lam_arr) for k, z in zip(ks, zs)]
            self._cache["nodes"] = (ks, ws, zs, envelope, states)
        return self._cache["nodes"]


def propagate_packet(p: WavePacket, x: float, y: float, t: float) -> np.ndarray:
    """psi(x, y, t) = int g(k) psi_k(x) exp(i (k y - z(k) t)) dk."""
    ks, ws, zs, envelope, states = p._quadrature()
    phases = np.exp(1j * (ks * y - zs * t))
    psi = np.zeros(2, dtype=complex)
    for w, g, st, ph in zip(ws, envelope, states, phases):
        psi += w * g * ph * st.evaluate(x)
    return psi


def propagate_packet_grid(p: WavePacket, xs, ys, t: float) -> np.ndarray:
    """Vectorized packet evaluation; returns array of shape (len(xs), len(ys), 2)."""
    ks, ws, zs, envelope, states = p._quadrature()
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    # (q, x, 2) weighted bound-state profiles
    prof = np.stack([st.evaluate(xs) for st in states])
    prof *= (ws * envelope)[:, None, None]
    phases = np.exp(1j * (np.outer(ks, ys) - (zs * t)[:, None]))  # (q, y)
    return np.einsum("qxc,qy->xyc", prof, phases)
