"""Parameter algebra for Fuchsian equations in Klein's symmetric form.

The general equation with N finite regular singular points reads

    W'' + sum_j (1 - a_j - b_j)/(z - z_j) W'
        + (Lambda(z) + sum_j q_j/(z - z_j)) / P(z) W = 0,

with ``P(z) = prod_j (z - z_j)``, ``Lambda`` a polynomial of degree N-4 and
``q_j = a_j b_j P'(z_j)``.  The N=4 case with every index pair summing to
1/2 is the symmetric Heun equation handled by :class:`SymmetricHeunConfig`.
"""
from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateConfig, FuchsRelationViolated, SingularPointHit

STRUCTURAL_TOL = 1e-12
IDENTITY_RTOL = 1e-11
# two singular points closer than this (relative to the configuration scale)
# are treated as coincident
COINCIDENCE_RTOL = 1e-10


def elementary_symmetric(points: Sequence[complex]) -> tuple[complex, ...]:
    """Return (sigma_1, ..., sigma_N) of the given points.

    ``prod_j (z - z_j) = sum_k (-1)^k sigma_k z^(N-k)``.
    """
    sig = [1.0 + 0j]
    for z in points:
        z = complex(z)
        sig = [sig[0]] + [sig[k] + z * sig[k - 1] for k in range(1, len(sig))] + [z * sig[-1]]
    return tuple(sig[1:])


def reduced_symmetric(points: Sequence[complex], j: int) -> tuple[complex, complex, complex]:
    """sigma_1..sigma_3 of four points with the j-th one (1-based) set to zero."""
    if not 1 <= j <= len(points):
        raise IndexError(f"point index {j} out of range 1..{len(points)}")
    pts = [complex(z) for z in points]
    pts[j - 1] = 0j
    return elementary_symmetric(pts)[:3]


def indices_from_chi(chi: complex, n_points: int = 4) -> tuple[complex, complex]:
    """Index pair (alpha, beta) parameterized by the uniformization angle chi."""
    if n_points < 4:
        raise ValueError("need at least four singular points")
    scale = 1.0 - 2.0 / n_points
    return scale * cmath.cos(chi) ** 2, scale * cmath.sin(chi) ** 2


def poly_coeffs(points: Sequence[complex]) -> np.ndarray:
    """Coefficients of P(z) = prod (z - z_j), lowest degree first."""
    return np.poly(np.asarray(points, dtype=complex))[::-1].astype(complex)


def _check_distinct(points: Sequence[complex]) -> None:
    scale = max(1.0, max(abs(z) for z in points))
    for a, b in itertools.combinations(points, 2):
        if abs(a - b) < COINCIDENCE_RTOL * scale:
            raise DegenerateConfig(f"singular points {a} and {b} coincide")


def _check_exclusion(z, points, exclusion: float) -> None:
    if exclusion <= 0:
        return
    d = min(np.min(np.abs(np.asarray(z) - zj)) for zj in points)
    if d < exclusion:
        raise SingularPointHit(f"evaluation point within {d:.3g} of a singular point")


def derivative_at_roots(points: Sequence[complex]) -> tuple[complex, ...]:
    """P'(z_j) = prod_{k != j} (z_j - z_k) for every root."""
    out = []
    for j, zj in enumerate(points):
        prod = 1.0 + 0j
        for k, zk in enumerate(points):
            if k != j:
                prod *= zj - zk
        out.append(prod)
    return tuple(out)


@dataclass(frozen=True)
class FuchsianConfig:
    """General-N Fuchsian equation in Klein's form.

    ``accessory`` holds lambda_0..lambda_{N-4}, the coefficients of Lambda(z)
    in increasing degree.
    """

    points: tuple[complex, ...]
    indices: tuple[tuple[complex, complex], ...]
    accessory: tuple[complex, ...]
    atol: float = STRUCTURAL_TOL

    def __post_init__(self):
        pts = tuple(complex(z) for z in self.points)
        idx = tuple((complex(a), complex(b)) for a, b in self.indices)
        acc = tuple(complex(x) for x in self.accessory)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "accessory", acc)
        n = len(pts)
        if n < 4:
            raise DegenerateConfig("need at least four singular points")
        if len(idx) != n:
            raise ValueError("one index pair per singular point")
        if len(acc) != n - 3:
            raise ValueError(f"Lambda has degree N-4, expected {n - 3} coefficients")
        _check_distinct(pts)
        total = sum(a + b for a, b in idx)
        if abs(total - (n - 2)) > self.atol:
            raise FuchsRelationViolated(
                f"sum of indices is {total}, expected {n - 2}")

    @classmethod
    def symmetric(cls, points, chis, accessory) -> "FuchsianConfig":
        """Config with every index pair built from a uniformization angle."""
        n = len(points)
        return cls(tuple(points), tuple(indices_from_chi(c, n) for c in chis),
                   tuple(accessory))

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def singular_points(self) -> tuple[complex, ...]:
        return self.points

    @property
    def sigma(self) -> tuple[complex, ...]:
        return elementary_symmetric(self.points)

    @property
    def q(self) -> tuple[complex, ...]:
        dp = derivative_at_roots(self.points)
        return tuple(a * b * d for (a, b), d in zip(self.indices, dp))

    def is_symmetric(self, tol: float = STRUCTURAL_TOL) -> bool:
        target = 1.0 - 2.0 / self.n_points
        return all(abs(a + b - target) <= tol for a, b in self.indices)

    def with_accessory(self, accessory) -> "FuchsianConfig":
        if np.ndim(accessory) == 0:
            accessory = (accessory,)
        return FuchsianConfig(self.points, self.indices, tuple(accessory), self.atol)

    def accessory_poly(self, z):
        return sum(c * z ** l for l, c in enumerate(self.accessory))

    def P(self, z):
        out = 1.0
        for zj in self.points:
            out = out * (z - zj)
        return out

    def coefficients_at(self, z, exclusion: float = 0.0):
        """(p1, p0) with the equation written as F'' + p1 F' + p0 F = 0."""
        _check_exclusion(z, self.points, exclusion)
        p1 = 0
        qsum = 0
        for zj, (a, b), qj in zip(self.points, self.indices, self.q):
            p1 = p1 + (1 - a - b) / (z - zj)
            qsum = qsum + qj / (z - zj)
        return p1, (self.accessory_poly(z) + qsum) / self.P(z)


def symmetrize_indices(config: FuchsianConfig) -> tuple[complex, ...]:
    """Exponent shifts nu_j that make every index pair sum to 1 - 2/N.

    With ``F(z) = W(z) prod_j (z - z_j)^nu_j`` the new equation for F has
    indices (a_j + nu_j, b_j + nu_j).  The shifts add up to zero.
    """
    n = config.n_points
    total = sum(a + b for a, b in config.indices)
    if abs(total - (n - 2)) > config.atol:
        raise FuchsRelationViolated(f"sum of indices is {total}, expected {n - 2}")
    target = 1.0 - 2.0 / n
    return tuple((target - a - b) / 2 for a, b in config.indices)


def symmetrized(config: FuchsianConfig) -> FuchsianConfig:
    """Equation satisfied by ``W * prod (z - z_j)^nu_j`` (see symmetrize_indices).

    The new Lambda is the polynomial part of P times the transformed
    zeroth-order coefficient; it is recovered by sampling, which is exact
    up to rounding because the remainder is a polynomial of degree N-4.
    """
    nu = symmetrize_indices(config)
    new_idx = tuple((a + v, b + v) for (a, b), v in zip(config.indices, nu))
    pts = config.points
    # W = F g with g = prod (z - z_j)^(-nu_j);  h = g'/g
    mu = [-v for v in nu]

    def p0_new(z):
        p1, p0 = config.coefficients_at(z)
        h = sum(m / (z - zj) for m, zj in zip(mu, pts))
        dh = sum(-m / (z - zj) ** 2 for m, zj in zip(mu, pts))
        return p0 + dh + h * h + p1 * h

    qn = tuple(a * b * d for (a, b), d in zip(new_idx, derivative_at_roots(pts)))
    deg = config.n_points - 4
    scale = max(abs(z) for z in pts)
    samples = [2.5 * scale * cmath.exp(2j * cmath.pi * (k + 0.3) / (deg + 1))
               for k in range(deg + 1)]
    rhs = []
    for s in samples:
        val = config.P(s) * p0_new(s) - sum(qj / (s - zj) for qj, zj in zip(qn, pts))
        rhs.append(val)
    vander = np.vander(np.asarray(samples), deg + 1, increasing=True)
    lam = np.linalg.solve(vander, np.asarray(rhs))
    return FuchsianConfig(pts, new_idx, tuple(lam), config.atol)


def canonical_points(phi: complex) -> tuple[complex, complex, complex, complex]:
    """Roots of z^4 - 2 cos(2 phi) z^2 + 1 in the fixed order used throughout."""
    e = cmath.exp(1j * phi)
    return (e, -1 / e, -e, 1 / e)


def rho_functions(phi: complex, chis: Sequence[complex]) -> tuple[complex, complex, complex, complex]:
    """The four combinations rho_2..rho_5 of sin^2(2 chi_j) and phases of phi.

    Array arguments broadcast; scalar arguments give plain complex numbers.
    """
    s1, s2, s3, s4 = (np.sin(2 * np.asarray(c, dtype=complex)) ** 2 for c in chis)
    e1 = np.exp(1j * np.asarray(phi, dtype=complex))
    e2 = e1 * e1
    rho2 = (s1 + s3) - (s2 + s4)
    rho3 = (s1 - s3) / e1 + e1 * (s2 - s4)
    rho4 = e2 * (s1 + s3) - (s2 + s4) / e2
    rho5 = e1 * (s1 - s3) + (s2 - s4) / e1
    out = (rho2, rho3, rho4, rho5)
    if all(np.ndim(r) == 0 for r in out):
        return tuple(complex(r) for r in out)
    return out


@dataclass(frozen=True)
class SymmetricHeunConfig:
    """Symmetric form of the general Heun equation (four finite singular points).

    The index pair at z_j is ((1/2)cos^2 chi_j, (1/2)sin^2 chi_j), so the
    residues q_j are always derived from chi and never stored.
    """

    points: tuple[complex, complex, complex, complex]
    chis: tuple[complex, complex, complex, complex]
    lam: complex
    phi_hint: complex | None = field(default=None, compare=False)
    chi_branch: str | None = field(default=None, compare=False)
    atol: float = field(default=STRUCTURAL_TOL, compare=False)

    def __post_init__(self):
        pts = tuple(complex(z) for z in self.points)
        chis = tuple(complex(c) for c in self.chis)
        if len(pts) != 4 or len(chis) != 4:
            raise ValueError("symmetric Heun configs have exactly four points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "chis", chis)
        object.__setattr__(self, "lam", complex(self.lam))
        _check_distinct(pts)

    # -- constructors -------------------------------------------------------
    @classmethod
    def canonical(cls, phi: complex, chis, lam: complex) -> "SymmetricHeunConfig":
        return cls(canonical_points(phi), tuple(chis), lam, phi_hint=complex(phi))

    @classmethod
    def from_q(cls, points, q, lam) -> "SymmetricHeunConfig":
        """Build from raw residues, resolving chi by the principal arcsine.

        sin(2 chi_j) = sqrt(16 q_j / P'(z_j)); the other root of the index
        quadratic corresponds to chi -> pi/2 - chi and is not explored.
        """
        dp = derivative_at_roots(points)
        chis = tuple(0.5 * cmath.asin(cmath.sqrt(16 * qj / d)) for qj, d in zip(q, dp))
        return cls(tuple(points), chis, lam, chi_branch="principal-arcsine")

    def with_lambda(self, lam) -> "SymmetricHeunConfig":
        return SymmetricHeunConfig(self.points, self.chis, lam, self.phi_hint,
                                   self.chi_branch, self.atol)

    with_accessory = with_lambda

    # -- derived data -------------------------------------------------------
    @property
    def n_points(self) -> int:
        return 4

    @property
    def singular_points(self):
        return self.points

    @property
    def accessory(self):
        return (self.lam,)

    @property
    def indices(self):
        return tuple(indices_from_chi(c, 4) for c in self.chis)

    @property
    def alpha(self):
        return tuple(a for a, _ in self.indices)

    @property
    def beta(self):
        return tuple(b for _, b in self.indices)

    @property
    def q(self) -> tuple[complex, ...]:
        dp = derivative_at_roots(self.points)
        return tuple((0.25 * cmath.sin(2 * c)) ** 2 * d for c, d in zip(self.chis, dp))

    @property
    def sigma(self) -> tuple[complex, complex, complex, complex]:
        return elementary_symmetric(self.points)

    def is_canonical(self, tol: float | None = None) -> bool:
        """Points in the biquadratic arrangement e^{i phi}, -e^{-i phi}, -e^{i phi}, e^{-i phi}."""
        tol = self.atol * 100 if tol is None else tol
        s1, _, s3, s4 = self.sigma
        if abs(s1) > tol or abs(s3) > tol or abs(s4 - 1) > tol:
            return False
        z1, z2, z3, z4 = self.points
        return abs(z3 + z1) <= tol and abs(z4 - 1 / z1) <= tol and abs(z2 + 1 / z1) <= tol

    def is_circular(self) -> bool:
        """Canonical with real phi: all four points on the unit circle."""
        return self.is_canonical() and abs(self.phi.imag) <= 1e-12

    @property
    def phi(self) -> complex:
        if not self.is_canonical():
            raise AttributeError("phi is defined only for canonical configurations")
        if self.phi_hint is not None:
            return self.phi_hint
        return -1j * cmath.log(self.points[0])

    @property
    def rho(self):
        return rho_functions(self.phi, self.chis)

    def P(self, z):
        out = 1.0
        for zj in self.points:
            out = out * (z - zj)
        return out

    def coefficients_at(self, z, exclusion: float = 0.0):
        """(p1, p0): p1 = P'/(2P), p0 = (lambda + sum q_j/(z - z_j)) / P."""
        _check_exclusion(z, self.points, exclusion)
        p1 = 0
        qsum = 0
        for zj, qj in zip(self.points, self.q):
            p1 = p1 + 0.5 / (z - zj)
            qsum = qsum + qj / (z - zj)
        return p1, (self.lam + qsum) / self.P(z)

    def to_fuchsian(self) -> FuchsianConfig:
        return FuchsianConfig(self.points, self.indices, (self.lam,), self.atol)


def equation_coefficients_at(config, z, exclusion: float = 0.0):
    return config.coefficients_at(z, exclusion)
