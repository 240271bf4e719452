"""Taylor and Laurent solutions of the symmetric Heun equation.

Multiplying the equation by P(z)^2 gives polynomial coefficients of degree
8, 7 and 4, so the Taylor coefficients obey a nine-term recurrence

    f_n + sum_{s=1}^{8} r_{n-s} f_{n-s} = 0,

    r_{n-s} = (A_s (n-s)(n-s-1) + B_{s-1} (n-s)/2 + C_{s-2}) / (A_0 n (n-1)),

where A, B, C are the coefficient vectors of P^2, P P' and lambda P + S
with S(z) = sum_j q_j P(z)/(z - z_j).  Three coefficient families are
available: ``general`` (any configuration with no point at 0), ``circular``
(closed forms in phi, rho and lambda for the canonical arrangement) and
``simplest`` (canonical with sigma_2 = 0 and all rho vanishing).
"""
from __future__ import annotations

import cmath
import enum
import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (BadFamilyForConfig, InsufficientTerms, NotCanonical,
                     NotConverged, OutsideDomain, SeriesOverflow,
                     SingularAtOrigin)
from .fuchsian import SymmetricHeunConfig, poly_coeffs, reduced_symmetric

OVERFLOW_LIMIT = 1e300
DEFAULT_MAX_TERMS = 200_000
DOMAIN_SAFETY = 0.98
CANONICAL_TOL = 1e-10


class Family(str, enum.Enum):
    GENERAL = "general"
    CIRCULAR = "circular"
    SIMPLEST = "simplest"


def _max_terms_cap() -> int:
    return int(os.environ.get("HEUNSYM_MAX_TERMS", DEFAULT_MAX_TERMS))


def is_simplest(config: SymmetricHeunConfig, tol: float = CANONICAL_TOL) -> bool:
    if not config.is_canonical(tol):
        return False
    return abs(config.sigma[1]) <= tol and all(abs(r) <= tol for r in config.rho)


def family_for(config: SymmetricHeunConfig) -> Family:
    """Cheapest family whose preconditions the configuration meets."""
    if is_simplest(config):
        return Family.SIMPLEST
    if config.is_canonical(CANONICAL_TOL):
        return Family.CIRCULAR
    return Family.GENERAL


def _check_family(family: Family, config: SymmetricHeunConfig) -> Family:
    family = Family(family)
    if family is Family.CIRCULAR and not config.is_canonical(CANONICAL_TOL):
        raise BadFamilyForConfig("circular coefficients need a canonical configuration")
    if family is Family.SIMPLEST and not is_simplest(config):
        raise BadFamilyForConfig(
            "simplest coefficients need sigma_2 = 0 and rho_2..rho_5 = 0")
    if family is Family.GENERAL and any(abs(z) == 0 for z in config.points):
        raise SingularAtOrigin("a singular point at z=0 has no Taylor expansion")
    return family


def _general_polys(config: SymmetricHeunConfig):
    p = poly_coeffs(config.points)                      # P, low degree first
    dp = np.polynomial.polynomial.polyder(p)
    A = np.polynomial.polynomial.polymul(p, p)          # P^2, degree 8
    B = np.polynomial.polynomial.polymul(p, dp)         # P P', degree 7
    S = np.zeros(4, dtype=complex)
    for j, qj in enumerate(config.q):
        others = [z for k, z in enumerate(config.points) if k != j]
        S += qj * poly_coeffs(others)
    C = config.lam * p
    C[:4] += S                                          # lambda P + S, degree 4
    return A, B, C


def recurrence_table(family, config: SymmetricHeunConfig, n_max: int) -> np.ndarray:
    """Array ``r[n, s-1] = r_{n-s}`` for n = 0..n_max (rows 0 and 1 are zero)."""
    family = _check_family(family, config)
    n = np.arange(n_max + 1, dtype=float)
    table = np.zeros((n_max + 1, 8), dtype=complex)
    if n_max < 2:
        return table
    n = n[2:]
    denom = n * (n - 1)
    if family is Family.GENERAL:
        A, B, C = _general_polys(config)
        for s in range(1, 9):
            num = A[s] * (n - s) * (n - s - 1) + 0.5 * B[s - 1] * (n - s)
            if 0 <= s - 2 < len(C):
                num = num + C[s - 2]
            table[2:, s - 1] = num / (A[0] * denom)
        return table
    lam = config.lam
    if family is Family.SIMPLEST:
        table[2:, 1] = lam / denom
        table[2:, 3] = 2 * (1 - 16 / n + 9 / (n - 1))
        table[2:, 5] = lam / denom
        table[2:, 7] = 1 - 56 / n + 42 / (n - 1)
        return table
    phi = config.phi
    c = cmath.cos(2 * phi)
    k = 0.25j * cmath.sin(2 * phi)
    rho2, rho3, rho4, rho5 = config.rho
    table[2:, 1] = (lam - k * rho2) / denom - 4 * c * (1 - 5 / n + 1.5 / (n - 1))
    table[2:, 2] = -k * rho3 / denom
    table[2:, 3] = (-2 * c * lam + k * rho4) / denom + 2 * (2 * c * c + 1) * (1 - 16 / n + 9 / (n - 1))
    table[2:, 4] = k * rho5 / denom
    table[2:, 5] = lam / denom - 4 * c * (1 - 33 / n + 22.5 / (n - 1))
    table[2:, 7] = 1 - 56 / n + 42 / (n - 1)
    return table


def recurrence_coeffs(family, config: SymmetricHeunConfig, n: int) -> np.ndarray:
    """The eight multipliers (r_{n-1}, ..., r_{n-8}) for a single n >= 2."""
    if n < 2:
        raise ValueError("the recurrence starts at n = 2")
    return recurrence_table(family, config, n)[n].copy()


# -- printed coefficient tables, kept for cross-checking -----------------------

def printed_general_coeffs(config: SymmetricHeunConfig, n: int) -> np.ndarray:
    """The general-family table exactly as typeset, reading q_j sigma_2^i as sigma_2^j."""
    s1, s2, s3, s4 = config.sigma
    lam = config.lam
    q = config.q
    red = [reduced_symmetric(config.points, j + 1) for j in range(4)]
    sq_z = sum(qj / z for qj, z in zip(q, config.points))
    sq_s2 = sum(qj * r[1] for qj, r in zip(q, red))
    sq_s1 = sum(qj * r[0] for qj, r in zip(q, red))
    sq = sum(q)
    d = n * (n - 1)
    r = [
        -(2 - 3.5 / n) * s3 * s4,
        s4 / d * (lam - sq_z) - (1 - 5 / n + 1.5 / (n - 1)) * (s3 ** 2 + 2 * s2 * s4),
        -(lam * s3 - sq_s2) / d - (2 - 19.5 / n + 9 / (n - 1)) * (s2 * s3 + s1 * s4),
        (lam * s2 - sq_s1) / d + (1 - 16 / n + 9 / (n - 1)) * (s2 ** 2 + 2 * s1 * s3 + 2 * s4),
        -(lam * s1 - sq) / d - (2 - 47.5 / n + 30 / (n - 1)) * (s1 * s2 + s3),
        lam / d + (1 - 33 / n + 22.5 / (n - 1)) * (s1 ** 2 + 2 * s2),
        -(2 - 87.5 / n + 63 / (n - 1)) * s1,
        1 - 56 / n + 42 / (n - 1),
    ]
    return np.asarray(r, dtype=complex) / s4 ** 2


def printed_circular_coeffs(config: SymmetricHeunConfig, n: int) -> np.ndarray:
    """The canonical-arrangement table exactly as typeset."""
    if not config.is_canonical(CANONICAL_TOL):
        raise BadFamilyForConfig("needs a canonical configuration")
    phi, lam = config.phi, config.lam
    c = cmath.cos(2 * phi)
    k = 0.25j * cmath.sin(2 * phi)
    rho2, rho3, rho4, rho5 = config.rho
    d = n * (n - 1)
    return np.asarray([
        0,
        (lam - k * rho2) / d + 4 * (1 - 5 / n + 1.5 / (n - 1)) * c,
        -k * rho3 / d,
        (-2 * lam * c + k * rho4) / d + 2 * (1 - 16 / n + 9 / (n - 1)) * (c * c + 1),
        k * rho5 / d,
        lam / d - 4 * (1 - 33 / n + 22.5 / (n - 1)) * c,
        0,
        1 - 56 / n + 42 / (n - 1),
    ], dtype=complex)


def printed_discrepancies(config: SymmetricHeunConfig, n_values, rtol: float = 1e-10):
    """Entries where a printed table departs from the derived recurrence.

    Returns a list of ``(table, n, position, derived, printed)`` tuples, with
    position s meaning the multiplier of f_{n-s}.
    """
    out = []
    tables = [("general", printed_general_coeffs)]
    if config.is_canonical(CANONICAL_TOL):
        tables.append(("circular", printed_circular_coeffs))
    for n in n_values:
        derived = recurrence_coeffs(Family.GENERAL, config, n)
        for name, fn in tables:
            printed = fn(config, n)
            for s in range(8):
                if abs(derived[s] - printed[s]) > rtol * max(1.0, abs(derived[s])):
                    out.append((name, n, s + 1, derived[s], printed[s]))
    return out


# -- solutions ----------------------------------------------------------------

_INIT = {"F1": (1 + 0j, 0j), "F2": (0j, 1 + 0j)}


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    """Truncated power series f_0..f_N of one fundamental solution.

    For ``kind == "laurent"`` the coefficients expand G(w), w = 1/z, where G
    solves ``config`` (the inverted configuration) and the solution of the
    original equation is F(z) = G(1/z).
    """

    kind: str
    init: str
    coeffs: np.ndarray
    config: SymmetricHeunConfig
    family: Family

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @cached_property
    def _d1(self):
        return np.polynomial.polynomial.polyder(self.coeffs)

    @cached_property
    def _d2(self):
        return np.polynomial.polynomial.polyder(self.coeffs, 2)

    @property
    def domain_radius(self) -> float:
        """Distance from the expansion centre to the nearest singular point."""
        return min(abs(z) for z in self.config.points)

    def local(self, w, order: int = 1):
        """Value and derivatives with respect to the expansion variable."""
        pv = np.polynomial.polynomial.polyval
        out = [pv(w, self.coeffs), pv(w, self._d1)]
        if order >= 2:
            out.append(pv(w, self._d2))
        return tuple(out)

    def tail(self, w) -> float:
        """Size of the last few retained terms of the value and derivative series."""
        n = np.arange(len(self.coeffs))[-8:]
        c = np.abs(self.coeffs[-8:])
        r = float(np.max(np.abs(w)))
        with np.errstate(under="ignore"):
            mags = c * r ** n
            dmags = c * n * r ** np.maximum(n - 1, 0)
        return float(max(mags.max(), dmags.max()))


def series_coeffs(config: SymmetricHeunConfig, family=None, init: str = "F1",
                  n_max: int = 256, kind: str = "taylor") -> SeriesSolution:
    """Run the nine-term recurrence from the F1 or F2 starting values."""
    if n_max < 8:
        raise ValueError("n_max must be at least 8")
    if any(z == 0 for z in config.points):
        raise SingularAtOrigin("a singular point at z=0 has no Taylor expansion")
    family = _check_family(family_for(config) if family is None else family, config)
    table = recurrence_table(family, config, n_max).tolist()
    f = [0j] * (n_max + 1)
    f[0], f[1] = _INIT[init]
    for n in range(2, n_max + 1):
        row = table[n]
        acc = 0j
        for s in range(1, min(8, n) + 1):
            acc += row[s - 1] * f[n - s]
        f[n] = -acc
        if abs(f[n]) > OVERFLOW_LIMIT or acc != acc:
            raise SeriesOverflow(f"|f_{n}| exceeded {OVERFLOW_LIMIT:g}")
    return SeriesSolution(kind, init, np.asarray(f, dtype=complex), config, family)


def _local_variable(sol: SeriesSolution, z):
    z = np.asarray(z, dtype=complex)
    if sol.kind == "taylor":
        w = z
    else:
        if np.any(z == 0):
            raise OutsideDomain("Laurent solutions are not defined at z = 0")
        w = 1 / z
    if np.max(np.abs(w)) >= DOMAIN_SAFETY * sol.domain_radius:
        raise OutsideDomain(
            f"|{'z' if sol.kind == 'taylor' else '1/z'}| exceeds "
            f"{DOMAIN_SAFETY} x radius {sol.domain_radius:.6g}")
    return z, w


def eval_series(sol: SeriesSolution, z, tol: float = 1e-10, order: int = 1):
    """(F, F') at z (with F'' appended when ``order == 2``), derivatives in z.

    Raises NotConverged when the retained tail is not below
    ``tol * max(1, |F|)``.
    """
    z, w = _local_variable(sol, z)
    vals = sol.local(w, order)
    tail = sol.tail(w)
    scale = max(1.0, float(np.max(np.abs(vals[0]))))
    if tail > tol * scale:
        raise NotConverged(f"series tail {tail:.3g} above tolerance at N={sol.truncation}")
    if sol.kind == "taylor":
        out = vals
    else:
        g, dg = vals[0], vals[1]
        out = [g, -w * w * dg]
        if order >= 2:
            out.append(w ** 4 * vals[2] + 2 * w ** 3 * dg)
    if np.ndim(z) == 0:
        return tuple(complex(v) for v in out)
    return tuple(out)


def fundamental_pair(config: SymmetricHeunConfig, family=None, radius: float = 0.8,
                     tol: float = 1e-15, n_terms: int | None = None,
                     max_terms: int | None = None, kind: str = "taylor"):
    """F1, F2 with enough terms for |z| <= radius (|1/z| for Laurent kind).

    With ``n_terms`` the truncation is fixed; otherwise it starts at 64 and
    doubles until the tail at ``radius`` falls below ``tol``.
    """
    if n_terms is not None:
        return tuple(series_coeffs(config, family, init, n_terms, kind) for init in ("F1", "F2"))
    cap = _max_terms_cap() if max_terms is None else max_terms
    n = 64
    while True:
        pair = tuple(series_coeffs(config, family, init, n, kind) for init in ("F1", "F2"))
        worst = max(s.tail(radius) for s in pair)
        if worst < tol:
            return pair
        if n >= cap:
            raise NotConverged(f"tail {worst:.3g} still above {tol:g} at cap {cap}")
        n = min(2 * n, cap)


def wronskian_exact(config: SymmetricHeunConfig, z):
    """(P(0)/P(z))^(1/2), continued along the segment [0, z] from the value 1."""
    out = 1.0
    for zj in config.points:
        out = out / np.sqrt(1 - np.asarray(z, dtype=complex) / zj)
    return out


def wronskian_residual(f1: SeriesSolution, f2: SeriesSolution, z) -> float:
    """|F1 F2' - F2 F1' - (P(0)/P(z))^(1/2)| in the expansion variable.

    For Laurent pairs the law is checked for the inverted-variable series
    at w = 1/z, where it takes the same form.
    """
    if f1.config is not f2.config and f1.config != f2.config:
        raise ValueError("solutions belong to different configurations")
    z, w = _local_variable(f1, z)
    a, da = f1.local(w)
    b, db = f2.local(w)
    res = np.abs(a * db - b * da - wronskian_exact(f1.config, w))
    return float(np.max(res))


def invert_config(config: SymmetricHeunConfig) -> SymmetricHeunConfig:
    """Equation obeyed by G(w) = F(1/w) for a canonical configuration.

    The canonical point set is mapped onto itself with z_j -> z_{5-j}, so the
    result is again canonical with the chi reversed and lambda shifted by
    -(i/4) sin(2 phi) rho_2.
    """
    if not config.is_canonical(CANONICAL_TOL):
        raise NotCanonical("inversion in this form needs a canonical configuration")
    phi = config.phi
    shift = 0.25j * cmath.sin(2 * phi) * config.rho[0]
    return SymmetricHeunConfig.canonical(phi, tuple(reversed(config.chis)), config.lam - shift)


def laurent_pair(config: SymmetricHeunConfig, family=None, radius: float = 1 / 1.2,
                 tol: float = 1e-15, n_terms: int | None = None):
    """Exterior solutions F(z) = G(1/z) built from the inverted configuration."""
    return fundamental_pair(invert_config(config), family, radius, tol, n_terms, kind="laurent")


def radius_estimate(sol: SeriesSolution, block: int = 8) -> float:
    """Cauchy-Hadamard radius from a log-linear fit over the last half of the coefficients.

    Block maxima of |f_n| (blocks of eight, matching the recurrence span)
    are regressed against n; the radius is exp(-slope).  A series whose
    tail is identically zero reports ``math.inf``.
    """
    c = np.abs(sol.coeffs)
    if len(c) < 50:
        raise InsufficientTerms("need at least 50 coefficients")
    half = c[len(c) // 2:]
    idx = np.arange(len(c) // 2, len(c))
    if not np.any(half > 0):
        return math.inf
    xs, ys = [], []
    for start in range(0, len(half) - block + 1, block):
        seg = half[start:start + block]
        k = int(np.argmax(seg))
        if seg[k] > 0:
            xs.append(idx[start + k])
            ys.append(math.log(seg[k]))
    if len(xs) < 3:
        return math.inf
    slope = np.polyfit(xs, ys, 1)[0]
    return float(math.exp(-slope))


def ode_residual(config: SymmetricHeunConfig, sol: SeriesSolution, z, exclusion: float = 1e-6) -> float:
    """|F'' + p1 F' + p0 F| of ``config``'s equation at z."""
    F, dF, d2F = eval_series(sol, z, tol=math.inf, order=2)
    p1, p0 = config.coefficients_at(z, exclusion)
    return float(np.max(np.abs(d2F + p1 * dF + p0 * F)))


def covariance_residual(config: SymmetricHeunConfig, sol: SeriesSolution, m, z) -> float:
    """Residual of the transformed equation for G(u) = F(m^-1(u)) at u = m(z).

    ``config`` is the transformed configuration (for example from
    ``transform_config``) and ``sol`` a solution of the original equation.
    """
    F, dF, d2F = eval_series(sol, z, tol=math.inf, order=2)
    inv = m.inverse()
    u = m(z)
    dz, d2z = inv.derivative(u), inv.second_derivative(u)
    dG = dF * dz
    d2G = d2F * dz * dz + dF * d2z
    p1, p0 = config.coefficients_at(u)
    return float(abs(d2G + p1 * dG + p0 * F))
