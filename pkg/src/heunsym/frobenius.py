"""Frobenius series at a finite regular singular point.

At z_j write x = z - z_j and the equation as
x^2 F'' + x a(x) F' + b(x) F = 0 with a, b analytic at x = 0.  For an
exponent e of the indicial polynomial I(s) = s(s-1) + a_0 s + b_0 the
coefficients of F = x^e sum_m g_m x^m obey

    g_m I(e+m) = -sum_{k=1}^{m} ((e+m-k) a_k + b_k) g_{m-k},   g_0 = 1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NotConverged, OutsideDisk, ResonantExponents

RESONANCE_TOL = 1e-8


def _inverse_linear(d: complex, m: int) -> np.ndarray:
    """Taylor coefficients of 1/(x + d) up to x^m."""
    k = np.arange(m + 1)
    return (-1.0) ** k / complex(d) ** (k + 1)


def _mul(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    return np.convolve(a, b)[: m + 1]


def _shifted_poly(coeffs, z0: complex, m: int) -> np.ndarray:
    """Coefficients in x of sum_l c_l (z0 + x)^l, truncated to x^m."""
    out = np.zeros(m + 1, dtype=complex)
    for l, c in enumerate(coeffs):
        for i in range(min(l, m) + 1):
            out[i] += c * math.comb(l, i) * z0 ** (l - i)
    return out


def local_equation_series(config, j: int, m: int):
    """Taylor coefficients (a_0..a_m, b_0..b_m) at the j-th point (0-based).

    Works for any config exposing ``points``, ``indices``, ``q`` and
    ``accessory`` (symmetric or general Fuchsian).
    """
    pts = config.points
    zj = pts[j]
    idx = config.indices
    q = config.q
    a = np.zeros(m + 1, dtype=complex)
    a[0] = 1 - sum(idx[j])
    inner = np.zeros(m + 1, dtype=complex)
    inv_prod = np.zeros(m + 1, dtype=complex)
    inv_prod[0] = 1.0
    for k, zk in enumerate(pts):
        if k == j:
            continue
        inv = _inverse_linear(zj - zk, m)
        a[1:] += (1 - sum(idx[k])) * inv[:m]
        inner += q[k] * inv
        inv_prod = _mul(inv_prod, inv, m)
    inner += _shifted_poly(config.accessory, zj, m)
    num = np.zeros(m + 1, dtype=complex)
    num[0] = q[j]
    num[1:] = inner[:m]
    return a, _mul(num, inv_prod, m)


def frobenius_coeffs(a: np.ndarray, b: np.ndarray, e: complex, m: int) -> np.ndarray:
    def indicial(s):
        return s * (s - 1) + a[0] * s + b[0]

    g = np.zeros(m + 1, dtype=complex)
    g[0] = 1.0
    for n in range(1, m + 1):
        k = np.arange(1, n + 1)
        s = np.dot((e + n - k) * a[1:n + 1] + b[1:n + 1], g[n - 1::-1][:n])
        g[n] = -s / indicial(e + n)
    return g


def local_power(x, e: complex, ref: complex):
    """x^e with the cut along the ray -ref, i.e. arg x taken near arg ref.

    ``ref`` is a direction in which the branch is the principal-looking one;
    the cut points the opposite way.
    """
    x = np.asarray(x, dtype=complex)
    theta0 = cmath.phase(ref)
    arg = theta0 + np.angle(x / ref)
    logx = np.log(np.abs(x)) + 1j * arg
    out = np.exp(e * logx)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class LocalFrobenius:
    """x^e sum_m g_m x^m about the singular point with 0-based index ``j``.

    ``ref`` fixes the branch of x^e (see :func:`local_power`); by default it
    points from z_j towards the origin.
    """

    point_index: int
    point: complex
    exponent: complex
    coeffs: np.ndarray
    disk_radius: float
    ref: complex

    @cached_property
    def _d1(self):
        return np.polynomial.polynomial.polyder(self.coeffs)

    @cached_property
    def _d2(self):
        return np.polynomial.polynomial.polyder(self.coeffs, 2)

    def tail(self, x) -> float:
        r = float(np.max(np.abs(x)))
        n = np.arange(len(self.coeffs))[-4:]
        with np.errstate(under="ignore"):
            return float(np.max(np.abs(self.coeffs[-4:]) * np.maximum(n, 1) * r ** np.maximum(n - 1, 0)))

    def evaluate(self, z, order: int = 1, tol: float = 1e-13):
        """(F, F') at z, with F'' appended when ``order == 2``."""
        x = np.asarray(z, dtype=complex) - self.point
        if np.max(np.abs(x)) >= self.disk_radius:
            raise OutsideDisk(f"|z - z_j| must stay below {self.disk_radius:.6g}")
        pv = np.polynomial.polynomial.polyval
        A, dA = pv(x, self.coeffs), pv(x, self._d1)
        if self.tail(x) > tol * max(1.0, float(np.max(np.abs(A)))):
            raise NotConverged("Frobenius series truncated too early for this point")
        e = self.exponent
        xe = local_power(x, e, self.ref)
        F = xe * A
        dF = xe * (e * A / x + dA) if e != 0 else dA
        out = [F, dF]
        if order >= 2:
            d2A = pv(x, self._d2)
            out.append(xe * (e * (e - 1) * A / x ** 2 + 2 * e * dA / x + d2A))
        if np.ndim(z) == 0:
            return tuple(complex(v) for v in out)
        return tuple(out)

    def __call__(self, z):
        return self.evaluate(z)[0]


def terms_for(ratio: float, tol: float = 1e-16) -> int:
    """Number of terms so that ratio^m falls well below ``tol`` (ratio < 1)."""
    ratio = min(max(ratio, 1e-3), 0.995)
    return int(math.ceil(math.log(tol) / math.log(ratio))) + 30


def local_solution(config, j: int, exponent: complex, m_max: int = 200,
                   ref: complex | None = None, check_resonance: bool = True) -> LocalFrobenius:
    """Frobenius solution at the j-th point (0-based) for the given exponent."""
    a_j, b_j = config.indices[j]
    if check_resonance:
        diff = a_j - b_j
        if abs(diff - round(diff.real)) < RESONANCE_TOL:
            raise ResonantExponents(f"exponent difference {diff} is an integer")
    zj = config.points[j]
    a, b = local_equation_series(config, j, m_max)
    g = frobenius_coeffs(a, b, complex(exponent), m_max)
    radius = min(abs(zj - zk) for k, zk in enumerate(config.points) if k != j)
    if ref is None:
        ref = -zj if zj != 0 else 1.0
    return LocalFrobenius(j, zj, complex(exponent), g, radius, complex(ref))
