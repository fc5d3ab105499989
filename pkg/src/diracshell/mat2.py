"""Complex 2x2 matrix algebra over the Pauli basis.

Everything downstream (transmission matrices, transfer matrices, Green
kernels) is built from 2x2 complex matrices, so this module keeps the
algebra exact and closed-form: products, inverses, the Pauli-coefficient
decomposition, and the closed-form matrix exponential

    exp(B) = e^{tr B / 2} ( cos(nu) I + sinc(nu) (B - (tr B / 2) I) ),
    nu    = sqrt(det B - (tr B / 2)^2).

Both cos(nu) and sin(nu)/nu are even in nu, so the square-root branch is
irrelevant; we use the principal branch and switch to a short Taylor
series below |nu| = 1e-4.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrix

_DET_RTOL = 1e-14
_NU_SMALL = 1e-4


class Mat2:
    """Immutable complex 2x2 matrix."""

    __slots__ = ("_m",)

    def __init__(self, a11, a12, a21, a22):
        m = np.array([[a11, a12], [a21, a22]], dtype=complex)
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("matrix entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "_m", m)

    @classmethod
    def from_array(cls, arr) -> "Mat2":
        a = np.asarray(arr, dtype=complex)
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    @property
    def array(self) -> np.ndarray:
        return self._m

    @property
    def entries(self):
        m = self._m
        return (m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def __repr__(self):
        a, b, c, d = self.entries
        return f"Mat2({a!r}, {b!r}, {c!r}, {d!r})"

    def __eq__(self, other):
        return isinstance(other, Mat2) and bool(np.array_equal(self._m, other._m))

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2.from_array(self._m + other._m)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2.from_array(self._m - other._m)

    def __mul__(self, scalar) -> "Mat2":
        return Mat2.from_array(self._m * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Mat2":
        return Mat2.from_array(-self._m)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2.from_array(self._m @ other._m)

    def conj_transpose(self) -> "Mat2":
        return Mat2.from_array(self._m.conj().T)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._m)))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return float(np.max(np.abs(self._m - self._m.conj().T))) <= tol * max(1.0, self.max_abs())


SIGMA0 = Mat2(1, 0, 0, 1)
SIGMA1 = Mat2(0, 1, 1, 0)
SIGMA2 = Mat2(0, -1j, 1j, 0)
SIGMA3 = Mat2(1, 0, 0, -1)

PAULI = (SIGMA0, SIGMA1, SIGMA2, SIGMA3)


@dataclass(frozen=True)
class PauliDecomposition:
    """Coefficients c0..c3 with  M = c0*s0 + c1*s1 + c2*s2 + c3*s3."""

    c0: complex
    c1: complex
    c2: complex
    c3: complex

    def recompose(self) -> Mat2:
        return Mat2(
            self.c0 + self.c3,
            self.c1 - 1j * self.c2,
            self.c1 + 1j * self.c2,
            self.c0 - self.c3,
        )

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        # hermitian <=> all four Pauli coefficients are real
        scale = max(1.0, max(abs(c) for c in (self.c0, self.c1, self.c2, self.c3)))
        return all(abs(c.imag) <= tol * scale for c in (self.c0, self.c1, self.c2, self.c3))


def decompose(a: Mat2) -> PauliDecomposition:
    a11, a12, a21, a22 = a.entries
    return PauliDecomposition(
        c0=(a11 + a22) / 2,
        c1=(a12 + a21) / 2,
        c2=(a21 - a12) / (2j),
        c3=(a11 - a22) / 2,
    )


def pauli_matrix(c0, c1, c2, c3) -> Mat2:
    return PauliDecomposition(c0, c1, c2, c3).recompose()


def multiply(a: Mat2, b: Mat2) -> Mat2:
    return a @ b


def det(a: Mat2) -> complex:
    a11, a12, a21, a22 = a.entries
    return a11 * a22 - a12 * a21


def trace(a: Mat2) -> complex:
    a11, _, _, a22 = a.entries
    return a11 + a22


def inverse(a: Mat2) -> Mat2:
    d = det(a)
    scale = max(a.max_abs(), 1.0)
    if abs(d) <= _DET_RTOL * scale * scale:
        raise SingularMatrix(f"determinant {d} below tolerance for inversion")
    a11, a12, a21, a22 = a.entries
    return Mat2(a22 / d, -a12 / d, -a21 / d, a11 / d)


def _cos_sinc(nu: complex):
    """cos(nu) and sin(nu)/nu, series-stabilized near nu = 0."""
    if abs(nu) < _NU_SMALL:
        n2 = nu * nu
        cos_nu = 1 - n2 / 2 + n2 * n2 / 24 - n2 * n2 * n2 / 720
        sinc_nu = 1 - n2 / 6 + n2 * n2 / 120 - n2 * n2 * n2 / 5040
        return cos_nu, sinc_nu
    return cmath.cos(nu), cmath.sin(nu) / nu


def exp_closed(b: Mat2) -> Mat2:
    """Matrix exponential of an arbitrary complex 2x2 matrix, in closed form."""
    half_tr = trace(b) / 2
    nu = cmath.sqrt(det(b) - half_tr * half_tr)
    cos_nu, sinc_nu = _cos_sinc(nu)
    pref = cmath.exp(half_tr)
    a11, a12, a21, a22 = b.entries
    return Mat2(
        pref * (cos_nu + sinc_nu * (a11 - half_tr)),
        pref * sinc_nu * a12,
        pref * sinc_nu * a21,
        pref * (cos_nu + sinc_nu * (a22 - half_tr)),
    )


def exp_closed_grid(a11, a12, a21, a22):
    """Vectorized exp_closed on arrays of matrix entries.

    Accepts broadcastable complex arrays; returns the four entry arrays of
    the exponentials. Used by scan-based root finders where a transfer
    matrix must be evaluated on thousands of spectral points at once.
    """
    a11, a12, a21, a22 = np.broadcast_arrays(
        np.asarray(a11, dtype=complex),
        np.asarray(a12, dtype=complex),
        np.asarray(a21, dtype=complex),
        np.asarray(a22, dtype=complex),
    )
    half_tr = (a11 + a22) / 2
    detb = a11 * a22 - a12 * a21
    nu = np.sqrt((detb - half_tr * half_tr).astype(complex))
    small = np.abs(nu) < _NU_SMALL
    nu_safe = np.where(small, 1.0, nu)
    cos_nu = np.cos(nu)
    sinc_nu = np.sin(nu_safe) / nu_safe
    n2 = nu * nu
    cos_series = 1 - n2 / 2 + n2 * n2 / 24 - n2 * n2 * n2 / 720
    sinc_series = 1 - n2 / 6 + n2 * n2 / 120 - n2 * n2 * n2 / 5040
    cos_nu = np.where(small, cos_series, cos_nu)
    sinc_nu = np.where(small, sinc_series, sinc_nu)
    pref = np.exp(half_tr)
    return (
        pref * (cos_nu + sinc_nu * (a11 - half_tr)),
        pref * sinc_nu * a12,
        pref * sinc_nu * a21,
        pref * (cos_nu + sinc_nu * (a22 - half_tr)),
    )
