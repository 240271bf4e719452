"""Classical general Heun function at z = 0 and the frame change to it.

HeunG solves

    H'' + (gamma/z + delta/(z-1) + eps/(z-a)) H' + (alpha beta z - lam)/(z(z-1)(z-a)) H = 0

with eps = alpha + beta + 1 - gamma - delta.  Substituting H = sum h_n z^n
gives

    a n (n-1+gamma) h_n = [(n-1)((n-2+gamma)(1+a) + a delta + eps) + lam] h_{n-1}
                          - (n-2+alpha)(n-2+beta) h_{n-2}.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateFrame, LogarithmicCase, NoConvergence,
                     OutsideDisk, ResonantGamma, SingularPointHit, ZeroModulus)
from .frobenius import local_equation_series, local_power
from .mobius import MobiusMap

SAFETY = 0.95
MAX_TERMS = 100_000
INTEGER_TOL = 1e-12


def _near_integer(x: complex, tol: float = INTEGER_TOL) -> bool:
    return abs(x.imag) <= tol and abs(x.real - round(x.real)) <= tol


@dataclass(frozen=True)
class HeunGParams:
    a: complex
    lam: complex
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        for name in ("a", "lam", "alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.a == 0:
            raise ZeroModulus("the third singular point a must be nonzero")
        if self.a == 1:
            raise DegenerateFrame("a = 1 merges two singular points")

    @property
    def epsilon(self) -> complex:
        return self.alpha + self.beta + 1 - self.gamma - self.delta

    @property
    def singular_points(self):
        return (0j, 1 + 0j, self.a)

    @property
    def points(self):
        return self.singular_points

    @property
    def exponents(self):
        """Exponent pairs at 0, 1, a and infinity."""
        g, d = self.gamma, self.delta
        return ((0j, 1 - g), (0j, 1 - d), (0j, g + d - self.alpha - self.beta),
                (self.alpha, self.beta))

    def coefficients_at(self, z, exclusion: float = 0.0):
        if exclusion > 0:
            for zj in self.singular_points:
                if np.any(np.abs(np.asarray(z) - zj) < exclusion):
                    raise SingularPointHit(f"z within {exclusion:g} of {zj}")
        a = self.a
        p1 = self.gamma / z + self.delta / (z - 1) + self.epsilon / (z - a)
        p0 = (self.alpha * self.beta * z - self.lam) / (z * (z - 1) * (z - a))
        return p1, p0

    def radius(self) -> float:
        return min(1.0, abs(self.a))


def _check_gamma(p: HeunGParams):
    g = p.gamma
    if _near_integer(g) and g.real <= 0.5:
        raise ResonantGamma(f"gamma = {g} is a non-positive integer")


def _step(p: HeunGParams, n: int, h1: complex, h2: complex) -> complex:
    a, g = p.a, p.gamma
    mid = (n - 1) * ((n - 2 + g) * (1 + a) + a * p.delta + p.epsilon) + p.lam
    return (mid * h1 - (n - 2 + p.alpha) * (n - 2 + p.beta) * h2) / (a * n * (n - 1 + g))


def heun_g_coeffs(p: HeunGParams, n_max: int) -> np.ndarray:
    """h_0..h_{n_max} of the local solution normalized by h_0 = 1."""
    _check_gamma(p)
    h = np.zeros(n_max + 1, dtype=complex)
    h[0] = 1.0
    if n_max >= 1:
        h[1] = p.lam / (p.a * p.gamma)
    for n in range(2, n_max + 1):
        h[n] = _step(p, n, h[n - 1], h[n - 2])
    return h


def heun_g_eval(p: HeunGParams, z: complex, tol: float = 1e-15,
                safety: float = SAFETY, max_terms: int = MAX_TERMS):
    """(HeunG(z), HeunG'(z)) by direct summation inside the disk of convergence."""
    _check_gamma(p)
    z = complex(z)
    if abs(z) >= safety * p.radius():
        raise OutsideDisk(f"|z| = {abs(z):.6g} exceeds {safety} x {p.radius():.6g}")
    h_prev2, h_prev = 1 + 0j, p.lam / (p.a * p.gamma)
    value = h_prev2 + h_prev * z
    deriv = h_prev
    zpow = z  # z^(n-1)
    quiet = 0
    for n in range(2, max_terms + 1):
        h = _step(p, n, h_prev, h_prev2)
        term_d = n * h * zpow
        zpow *= z
        term = h * zpow
        value += term
        deriv += term_d
        small = abs(term) <= tol * abs(value) and abs(term_d) <= tol * max(abs(deriv), 1e-300)
        quiet = quiet + 1 if small or (term == 0 and term_d == 0) else 0
        if quiet >= 3 or z == 0:
            return value, deriv
        h_prev2, h_prev = h_prev, h
    raise NoConvergence(f"HeunG series not converged after {max_terms} terms")


def second_parameters(p: HeunGParams) -> HeunGParams:
    """Parameters of the analytic factor of the z^(1-gamma) solution."""
    g = p.gamma
    return HeunGParams(p.a, p.lam + (1 - g) * (p.a * p.delta + p.epsilon),
                       p.alpha + 1 - g, p.beta + 1 - g, 2 - g, p.delta)


def second_local_solution(p: HeunGParams, z: complex, tol: float = 1e-15):
    """z^(1-gamma) HeunG(second parameters, z) and its derivative (principal branch)."""
    if _near_integer(1 - p.gamma, 1e-10):
        raise LogarithmicCase("1 - gamma is an integer; the second solution has a logarithm")
    z = complex(z)
    s = 1 - p.gamma
    h, dh = heun_g_eval(second_parameters(p), z, tol)
    if z == 0:
        return (0j, 0j) if s.real > 0 else (complex("nan"), complex("nan"))
    zs = z ** s
    return zs * h, zs * (s * h / z + dh)


# -- cross-check against the typeset coefficients -------------------------------

def derived_R(p: HeunGParams, n: int) -> tuple[complex, complex]:
    """(R_{n-1}, R_{n-2}) in h_n + R_{n-1} h_{n-1} + R_{n-2} h_{n-2} = 0."""
    a, g = p.a, p.gamma
    den = a * n * (n - 1 + g)
    mid = (n - 1) * ((n - 2 + g) * (1 + a) + a * p.delta + p.epsilon) + p.lam
    return -mid / den, (n - 2 + p.alpha) * (n - 2 + p.beta) / den


def printed_R(p: HeunGParams, n: int) -> tuple[complex, complex]:
    """The three-term coefficients exactly as typeset."""
    a, lam, al, be, g, d = p.a, p.lam, p.alpha, p.beta, p.gamma, p.delta
    den = a * (g + n - 1) * (g - 1)
    r1 = -1 - 1 / a + (lam - g * (a * d - a + al + be - d - g)) / den
    r2 = 1 / a + (-al * be + al * g + be * g - g * g + al + be - 2 * g - 1) / den
    return r1, r2


def compare_printed_recurrence(n_draws: int = 100, seed: int = 42, n_values=range(2, 12),
                               rtol: float = 1e-8):
    """Random parameter draws where the typeset coefficients differ from the derived ones.

    Returns a dict with the number of draws, the number of mismatching
    draws and the first few mismatches as (params, n, derived, printed).
    """
    rng = np.random.default_rng(seed)
    bad, examples = 0, []
    for _ in range(n_draws):
        v = rng.normal(size=12)
        z = v[:6] + 1j * v[6:]
        p = HeunGParams(z[0] + 2.5, z[1], z[2], z[3], z[4] + 2.0, z[5])
        mismatch = False
        for n in n_values:
            d, pr = derived_R(p, n), printed_R(p, n)
            if any(abs(x - y) > rtol * max(1.0, abs(x)) for x, y in zip(d, pr)):
                mismatch = True
                if len(examples) < 5:
                    examples.append((p, n, d, pr))
                break
        bad += mismatch
    return {"draws": n_draws, "mismatched": bad, "examples": examples}


# -- frame change from the symmetric form -----------------------------------------

@dataclass(frozen=True)
class LocalFrame:
    """Classical form of a symmetric equation around one of its singular points.

    ``frame`` sends (z_j, z_a, z_b, z_c) to (0, 1, a_G, infinity) and
    F(z) = u^e0 (u-1)^e1 (u-a_G)^e2 H(u) with u = frame(z); ``nu`` holds
    (e0, e1, e2, -(e0+e1+e2)).  :meth:`evaluate` returns the solution
    normalized as (z - z_j)^e0 (1 + O(z - z_j)).
    """

    params: HeunGParams
    frame: MobiusMap
    nu: tuple[complex, complex, complex, complex]
    j: int
    ordering: tuple[int, int, int]
    point: complex
    ref: complex

    def __iter__(self):
        return iter((self.params, self.frame, self.nu))

    def evaluate(self, z, tol: float = 1e-15):
        """(L, L') of the pulled-back local regular solution at z."""
        z = complex(z)
        m = self.frame
        u = m(z)
        du = m.derivative(z)
        a = self.params.a
        e0, e1, e2 = self.nu[:3]
        H, dH = heun_g_eval(self.params, u, tol)
        zj = self.point
        x = z - zj
        c, d = m.c, m.d
        ratio = (c * zj + d) / (c * z + d)
        k = ratio ** e0 * (1 - u) ** e1 * (1 - u / a) ** e2
        dlogk = -e0 * c / (c * z + d) - (e1 / (1 - u) + e2 / (a - u)) * du
        xe = local_power(x, e0, self.ref)
        pref = xe * k
        dpref = pref * (e0 / x + dlogk)
        return pref * H, dpref * H + pref * dH * du

    def __call__(self, z):
        return self.evaluate(z)[0]


def _first_frobenius_coeff(config, j0: int, e0: complex) -> complex:
    a, b = local_equation_series(config, j0, 1)
    return -(a[1] * e0 + b[1]) / (2 * e0 + a[0])


def symmetric_to_local_frame(config, j: int, ordering=None, exponent: str = "alpha",
                             ref: complex | None = None) -> LocalFrame:
    """Classical parameters for the local solution at z_j (j = 1..4).

    ``ordering`` lists the indices (1..4) of the points sent to 1, a_G and
    infinity; by default the remaining points in natural order.  The
    remaining points always take their alpha exponents.
    """
    pts = config.points
    others = [k for k in range(1, 5) if k != j]
    ordering = tuple(others if ordering is None else ordering)
    if sorted(ordering) != others:
        raise ValueError(f"ordering must be a permutation of {others}")
    j0 = j - 1
    ka, kb, kc = (k - 1 for k in ordering)
    zj = pts[j0]
    frame = MobiusMap.from_points((zj, pts[ka], pts[kc]), (0, 1, math.inf))
    a_g = frame(pts[kb])
    if abs(a_g) < 1e-12 or abs(a_g - 1) < 1e-12 or cmath.isinf(a_g):
        raise DegenerateFrame(f"a_G = {a_g} collides with another frame point")
    idx = config.indices
    pick = 0 if exponent == "alpha" else 1
    e0 = idx[j0][pick]
    other0 = idx[j0][1 - pick]
    e1, e2 = idx[ka][0], idx[kb][0]
    gamma = 1 - (other0 - e0)
    delta = 1 - (idx[ka][1] - e1)
    eps = 1 - (idx[kb][1] - e2)
    shift = e0 + e1 + e2
    alpha_g, beta_g = idx[kc][0] + shift, idx[kc][1] + shift
    # h_1 of H from the first Frobenius coefficient of F at z_j
    m1 = frame.derivative(zj)
    curv = frame.second_derivative(zj) / (2 * m1 * m1)
    g1 = _first_frobenius_coeff(config, j0, e0)
    h1 = -e0 * curv + g1 / m1 + e1 + e2 / a_g
    params = HeunGParams(a_g, a_g * gamma * h1, alpha_g, beta_g, gamma, delta)
    if abs(params.epsilon - eps) > 1e-9 * (1 + abs(eps)):
        raise DegenerateFrame("exponent bookkeeping violates the Fuchs relation")
    if ref is None:
        ref = -zj if zj != 0 else 1.0
    return LocalFrame(params, frame, (e0, e1, e2, -shift), j, ordering, zj, complex(ref))


def best_ordering(config, j: int, sample_points) -> tuple[int, int, int]:
    """Ordering that keeps the sample points deepest inside the HeunG disk."""
    best, best_score = None, math.inf
    others = [k for k in range(1, 5) if k != j]
    for perm in itertools.permutations(others):
        try:
            lf = symmetric_to_local_frame(config, j, perm)
        except DegenerateFrame:
            continue
        r = lf.params.radius()
        score = max(abs(lf.frame(z)) for z in sample_points) / r
        if score < best_score:
            best, best_score = perm, score
    return best
