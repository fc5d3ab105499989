"""Spectral solver for the one-dimensional fiber operators.

For fixed transverse momentum k, the fiber operator is the 1D Dirac
operator -i s1 d/dx + s2 k + s3 m with a point interaction at x = 0
encoded by the transmission condition psi(0+) = Lambda psi(0-),

    Lambda = (2i s1 - M)^{-1} (2i s1 + M),
    M      = eta s0 + tau s3 + lam s2 + omega s1.

The module provides the closed-form energy bands inside the spectral gap
(-g, g), g = sqrt(m^2 + k^2), the corresponding normalized bound states,
the free Green kernel, the rank-<=2 resolvent correction, and an
independent matching-determinant oracle that locates eigenvalues by
bracketing bisection without using any of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from . import mat2
from .coupling import Coupling, classify, reduce_omega
from .errors import (
    ConfiningRegime,
    DegenerateContext,
    DomainError,
    SingularMatrix,
    SpectralPoint,
)
from .mat2 import SIGMA0, SIGMA1, Mat2

_D4_TOL = 1e-12
_ORACLE_GRID = 4096
_ORACLE_GUARD = 1e-9
_EV_NEAR_MASS_RTOL = 1e-10

INF = math.inf


@dataclass(frozen=True)
class FiberContext:
    coupling: Coupling
    k: float

    @property
    def mass(self) -> float:
        return self.coupling.mass

    @property
    def gap_edge(self) -> float:
        return math.hypot(self.mass, self.k)


@dataclass(frozen=True)
class TransmissionMatrix:
    lambda_matrix: Mat2
    m_matrix: Mat2


def interaction_matrix(c: Coupling) -> Mat2:
    """M = eta s0 + tau s3 + lam s2 + omega s1."""
    return Mat2(
        c.eta + c.tau,
        -1j * c.lam + c.omega,
        1j * c.lam + c.omega,
        c.eta - c.tau,
    )


def transmission_matrix(c: Coupling) -> TransmissionMatrix:
    """Lambda linking the boundary traces; fails in the confining regime."""
    if classify(c).is_confining:
        raise ConfiningRegime(
            "d = -4 with omega = 0 decouples the half-lines; no transmission matrix exists"
        )
    m = interaction_matrix(c)
    two_i_s1 = 2j * SIGMA1
    lam = mat2.inverse(two_i_s1 - m) @ (two_i_s1 + m)
    return TransmissionMatrix(lambda_matrix=lam, m_matrix=m)


def _lambda_numerator(c: Coupling):
    """Entries of the matrix N with Lambda = N / (d - (2i - omega)^2).

    N has a real diagonal and purely imaginary off-diagonal entries for
    every (eta, tau, lam, omega), which makes the matching determinant a
    real function of z up to a constant phase.
    """
    d, w = c.d, c.omega
    return (
        4 + 4 * c.lam + w * w - d,
        4j * (c.tau - c.eta),
        -4j * (c.tau + c.eta),
        4 - 4 * c.lam + w * w - d,
    )


def char_eq_residual(ctx: FiberContext, z: float) -> float:
    """sqrt(m^2+k^2-z^2) (d-4) - 4 (eta z + lam k + tau m); zero at eigenvalues."""
    c = ctx.coupling
    if c.omega != 0.0:
        raise DomainError("the characteristic equation applies to omega = 0 couplings")
    g = ctx.gap_edge
    if abs(z) > g:
        raise DomainError(f"|z| = {abs(z)} exceeds the gap edge {g}")
    mu = math.sqrt(max(g * g - z * z, 0.0))
    return mu * (c.d - 4.0) - 4.0 * (c.eta * z + c.lam * ctx.k + c.tau * c.mass)


# ---------------------------------------------------------------------------
# Energy bands


@dataclass(frozen=True)
class Band:
    """One closed-form dispersion branch k -> z(k) with its admissible domain."""

    branch_id: str  # "single_d4", "plus", "minus"
    coupling: Coupling  # omega = 0
    domain: tuple  # open intervals (lo, hi), lo < hi, possibly infinite
    is_constant: bool
    is_linear: bool
    slope: Optional[float]
    _sign: float = field(default=0.0, repr=False)  # +1/-1 for quadratic branches

    def contains(self, k: float) -> bool:
        return any(lo < k < hi for lo, hi in self.domain)

    def evaluate(self, k):
        """Band value(s); defined by the closed form, meaningful on the domain."""
        c = self.coupling
        if self.branch_id == "single_d4":
            return -(c.lam * np.asarray(k, dtype=float) + c.tau * c.mass) / c.eta
        return _quadratic_branch(c, np.asarray(k, dtype=float), self._sign)

    def evaluate_derivative(self, k):
        c = self.coupling
        if self.branch_id == "single_d4":
            return np.full_like(np.asarray(k, dtype=float), -c.lam / c.eta)
        return _quadratic_branch_derivative(c, np.asarray(k, dtype=float), self._sign)


def _quad_coeffs(c: Coupling):
    d = c.d
    cpm = abs(d / 4.0 - 1.0)
    denom = c.eta**2 + (d / 4.0 - 1.0) ** 2
    qa = c.tau**2 + (d / 4.0 + 1.0) ** 2
    qb = -2.0 * c.lam * c.tau * c.mass
    qc = (c.lam**2 + (d / 4.0 + 1.0) ** 2) * c.mass**2
    return cpm, denom, qa, qb, qc


def _quadratic_branch(c: Coupling, k, sign: float):
    cpm, denom, qa, qb, qc = _quad_coeffs(c)
    q = qa * k * k + qb * k + qc
    return (-c.eta * (c.lam * k + c.tau * c.mass) + sign * cpm * np.sqrt(np.maximum(q, 0.0))) / denom


def _quadratic_branch_derivative(c: Coupling, k, sign: float):
    cpm, denom, qa, qb, qc = _quad_coeffs(c)
    q = np.maximum(qa * k * k + qb * k + qc, 0.0)
    return (-c.eta * c.lam + sign * cpm * (2.0 * qa * k + qb) / (2.0 * np.sqrt(q))) / denom


def _admissibility_sign(c: Coupling, k: float, sign: float) -> float:
    """(d-4)(eta z_sign(k) + lam k + tau m), up to a positive factor."""
    cpm, denom, qa, qb, qc = _quad_coeffs(c)
    q = max(qa * k * k + qb * k + qc, 0.0)
    lin = c.lam * k + c.tau * c.mass
    # eta z + lam k + tau m = (cpm^2 lin + sign eta cpm sqrt(q)) / denom
    return (c.d - 4.0) * cpm * (cpm * lin + sign * c.eta * math.sqrt(q))


def _real_quadratic_roots(a: float, b: float, cc: float):
    if a == 0.0:
        if b == 0.0:
            return []
        return [-cc / b]
    disc = b * b - 4.0 * a * cc
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    # numerically stable pairing
    q = -(b + math.copysign(sq, b)) / 2.0
    roots = []
    if q != 0.0:
        roots = [q / a, cc / q]
    else:
        roots = [0.0, 0.0] if cc == 0.0 else [-b / (2.0 * a)]
    return sorted(set(roots))


def _sign_regions(c: Coupling, sign: float):
    """Open intervals where the admissibility condition holds for one branch."""
    cpm, denom, qa, qb, qc = _quad_coeffs(c)
    # boundary candidates: cpm^2 (lam k + tau m)^2 = eta^2 Q(k)
    ra = cpm**2 * c.lam**2 - c.eta**2 * qa
    rb = 2.0 * c.lam * c.tau * c.mass * (cpm**2 + c.eta**2)
    rc = cpm**2 * c.tau**2 * c.mass**2 - c.eta**2 * qc
    bps = _real_quadratic_roots(ra, rb, rc)
    if c.mass == 0.0:
        bps.append(0.0)
    bps = sorted(set(bps))

    edges = [-INF] + bps + [INF]
    kept = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0:
            continue
        if lo == -INF and hi == INF:
            mid = 0.0 if c.mass != 0.0 else 1.0
        elif lo == -INF:
            mid = hi - max(1.0, abs(hi))
        elif hi == INF:
            mid = lo + max(1.0, abs(lo))
        else:
            mid = 0.5 * (lo + hi)
        if _admissibility_sign(c, mid, sign) > 0.0:
            kept.append((lo, hi))
    # merge across boundary points where the condition still holds strictly
    merged = []
    for iv in kept:
        if (
            merged
            and merged[-1][1] == iv[0]
            and not (c.mass == 0.0 and iv[0] == 0.0)
            and _admissibility_sign(c, iv[0], sign) > 0.0
        ):
            merged[-1][1] = iv[1]
        else:
            merged.append(list(iv))
    return [tuple(iv) for iv in merged]


def bands(c: Coupling) -> list[Band]:
    """All admissible energy bands of the fiber family for an omega = 0 coupling."""
    if c.omega != 0.0:
        raise DomainError("bands are defined for omega = 0 couplings; reduce omega first")
    # the closed-form branches stay valid in the decoupled case d = -4
    # (only the transmission matrix degenerates), so no regime check here
    d = c.d
    m = c.mass
    if abs(d - 4.0) <= _D4_TOL:
        domain = ((-INF, INF),) if m != 0.0 else ((-INF, 0.0), (0.0, INF))
        return [
            Band(
                branch_id="single_d4",
                coupling=c,
                domain=domain,
                is_constant=(c.lam == 0.0),
                is_linear=True,
                slope=-c.lam / c.eta,
            )
        ]

    out = []
    for sign, name in ((1.0, "plus"), (-1.0, "minus")):
        regions = _sign_regions(c, sign)
        if not regions:
            continue
        if m != 0.0:
            out.append(
                Band(
                    branch_id=name,
                    coupling=c,
                    domain=tuple(regions),
                    is_constant=False,
                    is_linear=False,
                    slope=None,
                    _sign=sign,
                )
            )
        else:
            # massless bands are linear on each half-line with its own slope
            for lo, hi in regions:
                mid = hi - 1.0 if lo == -INF else lo + 1.0
                slope = float(_quadratic_branch_derivative(c, np.array(mid), sign))
                out.append(
                    Band(
                        branch_id=name,
                        coupling=c,
                        domain=((lo, hi),),
                        is_constant=abs(slope) <= _D4_TOL,
                        is_linear=True,
                        slope=slope,
                        _sign=sign,
                    )
                )
    return out


# ---------------------------------------------------------------------------
# Bound states


@dataclass(frozen=True)
class BoundState:
    energy: float
    mu: float
    left_spinor: np.ndarray  # coefficient of e^{+mu x} on x < 0
    right_spinor: np.ndarray  # coefficient of e^{-mu x} on x > 0
    normalization: float

    def evaluate(self, x):
        """Normalized eigenfunction, vectorized over x; shape (..., 2)."""
        x = np.asarray(x, dtype=float)
        envelope = np.exp(-self.mu * np.abs(x)) / self.normalization
        out = np.where(
            x[..., None] < 0.0,
            self.left_spinor[None, :] if x.ndim else self.left_spinor,
            self.right_spinor[None, :] if x.ndim else self.right_spinor,
        )
        return out * envelope[..., None]

    def transmission_residual(self, lambda_matrix: Mat2) -> float:
        return float(
            np.linalg.norm(self.right_spinor - lambda_matrix.array @ self.left_spinor)
        )


def _bound_state(c: Coupling, k: float, z: float, lam_arr: np.ndarray) -> BoundState:
    m = c.mass
    mu = math.sqrt(max(m * m + k * k - z * z, 0.0))
    if abs(z + m) < _EV_NEAR_MASS_RTOL * max(1.0, abs(m)):
        # z = -m spinors (analytic continuation of the generic formula)
        if k < 0:
            left = np.array([0.0, 1.0], dtype=complex)
        else:
            left = np.array([1.0, -1j * m / k], dtype=complex)
    else:
        left = np.array([1.0, 1j * (k - mu) / (z + m)], dtype=complex)
    right = lam_arr @ left
    norm_sq = (np.vdot(left, left).real + np.vdot(right, right).real) / (2.0 * mu)
    return BoundState(
        energy=z,
        mu=mu,
        left_spinor=left,
        right_spinor=right,
        normalization=math.sqrt(norm_sq),
    )


def fiber_eigenvalues(ctx: FiberContext) -> list[tuple[float, BoundState]]:
    """Closed-form eigenvalues in the gap with their normalized eigenfunctions.

    Couplings with omega != 0 are gauge-reduced first; the returned bound
    states are eigenfunctions of the reduced (omega = 0) model, which has
    the same eigenvalues.
    """
    if ctx.mass == 0.0 and ctx.k == 0.0:
        raise DegenerateContext("m = k = 0 leaves no spectral gap")
    c = reduce_omega(ctx.coupling).reduced
    lam_arr = transmission_matrix(c).lambda_matrix.array
    out = []
    for band in bands(c):
        if band.contains(ctx.k):
            z = float(band.evaluate(ctx.k))
            out.append((z, _bound_state(c, ctx.k, z, lam_arr)))
    out.sort(key=lambda t: t[0])
    return out


# ---------------------------------------------------------------------------
# Matching-determinant oracle


def _decaying_spinors(m: float, k: float, z, mu):
    """Left- and right-decaying solution spinors, nonvanishing on the open gap.

    The formula per spinor is fixed by the sign of k so each component is
    either purely real or purely imaginary, keeping the matching
    determinant a real function up to a constant factor of i.
    """
    z = np.asarray(z)
    if k <= 0:
        v_l = np.stack([1j * (z + m), mu - k + 0j], axis=-1)
    else:
        v_l = np.stack([k + mu + 0j, 1j * (z - m)], axis=-1)
    if k >= 0:
        v_r = np.stack([1j * (z + m), -(k + mu) + 0j], axis=-1)
    else:
        v_r = np.stack([k - mu + 0j, 1j * (z - m)], axis=-1)
    return v_l, v_r


def _matching_function(ctx: FiberContext) -> Callable[[np.ndarray], np.ndarray]:
    """Real root function whose zeros in the open gap are the eigenvalues."""
    c = ctx.coupling
    n11, n12, n21, n22 = _lambda_numerator(c)
    m, k = ctx.mass, ctx.k
    g2 = m * m + k * k

    def f(z):
        z = np.asarray(z, dtype=float)
        mu = np.sqrt(np.maximum(g2 - z * z, 0.0))
        v_l, v_r = _decaying_spinors(m, k, z, mu)
        w0 = n11 * v_l[..., 0] + n12 * v_l[..., 1]
        w1 = n21 * v_l[..., 0] + n22 * v_l[..., 1]
        detm = w0 * v_r[..., 1] - w1 * v_r[..., 0]
        # detm is purely real or purely imaginary with a z-independent pattern
        return detm.real + detm.imag

    return f


def _bisect_root(f, lo: float, hi: float, xtol: float) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) != (fm < 0):
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def scan_gap_roots(f, gap_edge: float, grid: int = _ORACLE_GRID) -> list[float]:
    """Roots of a real vectorized function on the open gap (-g, g).

    Scans a uniform grid (with a small guard away from the edges) for sign
    changes and refines each bracket by bisection to 1e-12 * g.
    """
    g = gap_edge
    guard = _ORACLE_GUARD * g
    zs = np.linspace(-g + guard, g - guard, grid)
    vals = f(zs)
    roots = []
    xtol = 1e-12 * g
    signs = np.sign(vals)
    for i in range(grid - 1):
        if signs[i] == 0.0:
            roots.append(float(zs[i]))
        elif signs[i] * signs[i + 1] < 0.0:
            roots.append(_bisect_root(lambda z: float(f(z)), zs[i], zs[i + 1], xtol))
    if signs[-1] == 0.0:
        roots.append(float(zs[-1]))
    return sorted(roots)


def matching_oracle(ctx: FiberContext, grid: int = _ORACLE_GRID) -> list[float]:
    """Eigenvalues located by sign changes of the matching determinant.

    Independent of the closed-form bands; supports omega != 0 directly
    through the general transmission matrix.
    """
    g = ctx.gap_edge
    if g == 0.0:
        raise DegenerateContext("m = k = 0 leaves no spectral gap")
    if classify(ctx.coupling).is_confining:
        raise ConfiningRegime("confining coupling: the matching problem decouples")
    return scan_gap_roots(_matching_function(ctx), g, grid)


# ---------------------------------------------------------------------------
# Green kernel and Krein resolvent


def branch_sqrt(w: complex) -> complex:
    """sqrt with Im > 0 for w outside [0, +inf)."""
    s = complex(np.lib.scimath.sqrt(w))
    if s.imag < 0.0:
        s = -s
    return s


@dataclass(frozen=True)
class GreenKernel:
    z: complex
    xi: complex
    c_matrix: Mat2
    mass: float
    k: float

    def __call__(self, x: float) -> Mat2:
        """G_z(x) for the displacement x; sgn(0) is taken as 0."""
        s = 0.0 if x == 0.0 else math.copysign(1.0, x)
        return self.evaluate_signed(abs(x), s)

    def evaluate(self, x: float, y: float) -> Mat2:
        return self(x - y)

    def evaluate_side(self, side: int) -> Mat2:
        """One-sided boundary value G_z(0+) (side=+1) or G_z(0-) (side=-1)."""
        return self.evaluate_signed(0.0, float(side))

    def evaluate_signed(self, absx: float, s: float) -> Mat2:
        z, xi, m, k = self.z, self.xi, self.mass, self.k
        pref = 1j / (2.0 * xi) * np.exp(1j * xi * absx)
        return Mat2(
            pref * (z + m),
            pref * (xi * s - 1j * k),
            pref * (xi * s + 1j * k),
            pref * (z - m),
        )


def green_kernel(ctx: FiberContext, z: complex) -> GreenKernel:
    """Free-fiber Green kernel at spectral parameter z outside the spectrum."""
    m, k = ctx.mass, ctx.k
    g = ctx.gap_edge
    zc = complex(z)
    if zc.imag == 0.0:
        zr = zc.real
        if abs(zr) >= g:
            raise SpectralPoint(f"z = {zr} lies in the essential spectrum")
        if g > 0.0:
            for e, _ in fiber_eigenvalues(ctx):
                if abs(zr - e) <= 1e-12 * max(1.0, g):
                    raise SpectralPoint(f"z = {zr} is a fiber eigenvalue")
    xi = branch_sqrt(zc * zc - k * k - m * m)
    c_z = Mat2(
        1j / (2 * xi) * (zc + m),
        1j / (2 * xi) * (-1j * k),
        1j / (2 * xi) * (1j * k),
        1j / (2 * xi) * (zc - m),
    )
    return GreenKernel(z=zc, xi=xi, c_matrix=c_z, mass=m, k=k)


def simpson_weights(n: int, h: float) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise DomainError("composite Simpson quadrature needs an odd number of nodes >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


@dataclass(frozen=True)
class KreinResult:
    x: np.ndarray
    values: np.ndarray  # (n, 2), sgn(0) = 0 convention at the origin
    u0_plus: np.ndarray
    u0_minus: np.ndarray
    correction_vector: np.ndarray


def krein_resolvent_apply(ctx: FiberContext, z: complex, x: np.ndarray, f: np.ndarray) -> KreinResult:
    """(H_delta - z)^{-1} f on a uniform grid via the rank-<=2 resolvent formula.

    The free resolvent is a convolution with the Green kernel (evaluated as
    two one-sided cumulative Simpson integrals) and the correction is
    -G_z(.) (s0 + M C_z)^{-1} M \\int G_z(-y) f(y) dy.
    """
    zc = complex(z)
    if zc.imag == 0.0:
        raise DomainError("the Krein resolvent is evaluated off the real axis")
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=complex)
    n = x.size
    if f.shape != (n, 2):
        raise DomainError("f must be sampled as an (n, 2) array on the grid")
    h = x[1] - x[0]
    w = simpson_weights(n, h)

    gk = green_kernel(ctx, zc)
    xi = gk.xi
    m_arr = interaction_matrix(ctx.coupling).array
    c_arr = gk.c_matrix.array

    # free resolvent: G(t) = e^{i xi |t|} (C_z + sgn(t) (i/2) s1).  Splitting
    # the |x - y| kernel at y = x gives two one-sided integrals with smooth
    # integrands, so cumulative Simpson keeps its full order (a weighted
    # convolution across the kink at y = x would fall back to O(h^2))
    def _cumulative(values):
        # cumulative_simpson casts a real `initial` over complex input, so
        # integrate the real and imaginary parts separately
        out = np.empty_like(values)
        for part, view in ((np.real, out.real), (np.imag, out.imag)):
            view[...] = cumulative_simpson(part(values), dx=h, axis=0, initial=0.0)
        return out

    left = _cumulative(np.exp(-1j * xi * x)[:, None] * f)
    right = _cumulative((np.exp(1j * xi * x)[:, None] * f)[::-1])[::-1]
    phase = np.exp(1j * xi * x)[:, None]
    conv_a = phase * left + right / phase
    conv_b = phase * left - right / phase
    q_half_s1 = 0.5j * SIGMA1.array
    u_free = conv_a @ c_arr.T + conv_b @ q_half_s1.T

    # boundary integral \int G_z(-y) f(y) dy
    env = np.exp(1j * xi * np.abs(x))
    sgn_neg = np.sign(-x)
    ivec = (w[:, None] * env[:, None] * (f @ c_arr.T + sgn_neg[:, None] * (f @ q_half_s1.T))).sum(axis=0)

    kmat = np.eye(2) + m_arr @ c_arr
    detk = kmat[0, 0] * kmat[1, 1] - kmat[0, 1] * kmat[1, 0]
    scale = max(1.0, float(np.max(np.abs(kmat))))
    if abs(detk) <= 1e-14 * scale * scale:
        raise SingularMatrix("s0 + M C_z is numerically singular")
    qvec = np.linalg.solve(kmat, m_arr @ ivec)

    sgn_x = np.sign(x)
    correction = env[:, None] * (
        (c_arr @ qvec)[None, :] + sgn_x[:, None] * (q_half_s1 @ qvec)[None, :]
    )
    values = u_free - correction

    # exact one-sided boundary values (free part is continuous at 0)
    i0 = int(np.argmin(np.abs(x)))
    free0 = u_free[i0] if abs(x[i0]) < 0.5 * h else np.zeros(2, dtype=complex)
    u0_plus = free0 - (gk.evaluate_side(+1).array @ qvec)
    u0_minus = free0 - (gk.evaluate_side(-1).array @ qvec)
    return KreinResult(
        x=x, values=values, u0_plus=u0_plus, u0_minus=u0_minus, correction_vector=qvec
    )
