"""Independent numerical ground truth: path integration and contour quadrature.

Nothing here touches the series code.  Solutions are obtained by
integrating the first-order system (F, F')' = (F', -p1 F' - p0 F) along
straight segments with an embedded 8(5,3) Runge-Kutta pair, and integrals
along polylines are done by adaptive Gauss-Kronrod quadrature.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec, solve_ivp

from .errors import (NoConvergence, NonIntegrableEndpoint, SingularApproach,
                     StepUnderflow)

MEASURES = ("none", "inverse-sqrt-P", "general-N")


@dataclass(frozen=True)
class ContourPath:
    """Polyline z(t), t in [0, len(vertices) - 1], vertex k at t = k.

    ``singular_ends`` marks endpoints that sit on singular points; only the
    quadrature routines accept those.
    """

    vertices: tuple[complex, ...]
    exclusion_radius: float = 1e-3
    measure: str = "none"
    singular_ends: tuple[bool, bool] = (False, False)

    def __post_init__(self):
        v = tuple(complex(z) for z in self.vertices)
        object.__setattr__(self, "vertices", v)
        if len(v) < 2:
            raise ValueError("a path needs at least two vertices")
        if any(a == b for a, b in zip(v, v[1:])):
            raise ValueError("consecutive vertices must differ")
        if self.measure not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}")

    @classmethod
    def segment(cls, a, b, **kw) -> "ContourPath":
        return cls((a, b), **kw)

    @classmethod
    def circle(cls, center, radius, n_sides: int = 64, start_angle: float = 0.0,
               turns: int = 1, **kw) -> "ContourPath":
        ang = start_angle + 2 * np.pi * turns * np.arange(n_sides * turns + 1) / (n_sides * turns)
        return cls(tuple(center + radius * np.exp(1j * ang)), **kw)

    @property
    def n_segments(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> complex:
        return self.vertices[0]

    @property
    def end(self) -> complex:
        return self.vertices[-1]

    def segment_of(self, t: float) -> int:
        return min(max(int(math.floor(t)), 0), self.n_segments - 1)

    def z(self, t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.floor(t).astype(int), 0, self.n_segments - 1)
        v = np.asarray(self.vertices)
        out = v[k] + (t - k) * (v[k + 1] - v[k])
        return complex(out) if out.ndim == 0 else out

    def dz(self, t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.floor(t).astype(int), 0, self.n_segments - 1)
        v = np.asarray(self.vertices)
        out = v[k + 1] - v[k]
        return complex(out) if out.ndim == 0 else out

    def distance_to(self, p: complex) -> float:
        """Smallest distance from p to the path."""
        best = math.inf
        v = self.vertices
        for k in range(self.n_segments):
            a, b = v[k], v[k + 1]
            d = b - a
            s = ((p - a) * d.conjugate()).real / abs(d) ** 2
            s = min(max(s, 0.0), 1.0)
            best = min(best, abs(a + s * d - p))
        return best

    def is_declared_end(self, p: complex) -> bool:
        return ((p == self.start and self.singular_ends[0])
                or (p == self.end and self.singular_ends[1]))

    def check_clearance(self, points: Sequence[complex], allow_ends: bool = False) -> None:
        for p in points:
            if allow_ends and self.is_declared_end(p):
                continue
            if self.distance_to(p) < self.exclusion_radius:
                raise SingularApproach(
                    f"path passes within {self.exclusion_radius:g} of singular point {p}")


class PathRoot:
    """prod_k (z - z_k)^p continued along a path.

    Each factor uses a cut pointing away from the current segment, and the
    per-segment branches are glued so the product is continuous at every
    vertex.  At the path start each factor takes the branch whose argument
    lies within pi of the direction from z_k to the first segment.
    """

    def __init__(self, points: Sequence[complex], path: ContourPath, p: complex):
        self.points = tuple(complex(z) for z in points)
        self.path = path
        self.p = complex(p)
        v = path.vertices
        # refs[k][i]: direction used for factor i on segment k
        self.refs = []
        self.offsets = []
        for k in range(path.n_segments):
            mid = 0.5 * (v[k] + v[k + 1])
            refs = []
            for zi in self.points:
                r = mid - zi
                refs.append(r / abs(r) if r != 0 else v[k + 1] - v[k])
            self.refs.append(refs)
        prev = None
        for k in range(path.n_segments):
            offs = []
            for i, zi in enumerate(self.points):
                if k == 0:
                    offs.append(0.0)
                    continue
                a_new = self._arg(v[k] - zi, self.refs[k][i])
                a_old = self._arg(v[k] - zi, self.refs[k - 1][i]) + prev[i]
                offs.append(2 * math.pi * round((a_old - a_new) / (2 * math.pi)))
            self.offsets.append(offs)
            prev = offs

    @staticmethod
    def _arg(x, ref):
        return cmath.phase(ref) + np.angle(x / ref)

    def log_factors(self, z, t: float, near=None):
        """Sum of log(z - z_i); ``near = (i, x)`` supplies z - z_i exactly for one factor."""
        k = self.path.segment_of(t)
        out = 0j
        for i, zi in enumerate(self.points):
            x = near[1] if near is not None and near[0] == i else z - zi
            out = out + np.log(np.abs(x)) + 1j * (self._arg(x, self.refs[k][i]) + self.offsets[k][i])
        return out

    def __call__(self, z, t: float, near=None):
        with np.errstate(divide="ignore"):
            return np.exp(self.p * self.log_factors(z, t, near))


@dataclass
class PathSolution:
    """Dense (F, F') along a path from the integrator."""

    path: ContourPath
    pieces: list = field(default_factory=list)

    def __call__(self, t: float):
        k = self.path.segment_of(t)
        y = self.pieces[k].sol(t - k)
        return complex(y[0], y[1]), complex(y[2], y[3])

    @property
    def end(self):
        return self(float(self.path.n_segments))


def _integrate_segment(config, a: complex, b: complex, y0, tol: float, dense: bool):
    d = b - a

    def rhs(s, y):
        z = a + s * d
        F = complex(y[0], y[1])
        dF = complex(y[2], y[3])
        p1, p0 = config.coefficients_at(z)
        d2F = -p1 * dF - p0 * F
        u, w = d * dF, d * d2F
        return [u.real, u.imag, w.real, w.imag]

    y = [y0[0].real, y0[0].imag, y0[1].real, y0[1].imag]
    res = solve_ivp(rhs, (0.0, 1.0), y, method="DOP853", rtol=tol, atol=tol,
                    dense_output=dense)
    if not res.success:
        raise StepUnderflow(f"integrator stopped: {res.message}")
    return res


def solve_path(config, path: ContourPath, y0, tol: float = 1e-12) -> PathSolution:
    """Integrate (F, F') from path.start with data y0 along the whole path."""
    y0 = (complex(y0[0]), complex(y0[1]))
    if not all(cmath.isfinite(v) for v in y0):
        raise ValueError("initial data must be finite")
    path.check_clearance(config.singular_points)
    out = PathSolution(path)
    v = path.vertices
    y = y0
    for k in range(path.n_segments):
        res = _integrate_segment(config, v[k], v[k + 1], y, tol, dense=True)
        out.pieces.append(res)
        e = res.y[:, -1]
        y = (complex(e[0], e[1]), complex(e[2], e[3]))
    return out


def integrate_path(config, path: ContourPath, y0, tol: float = 1e-12):
    """(F, F') at the end of ``path``, starting from y0 = (F, F') at its start."""
    y0 = (complex(y0[0]), complex(y0[1]))
    if not all(cmath.isfinite(v) for v in y0):
        raise ValueError("initial data must be finite")
    path.check_clearance(config.singular_points)
    y = y0
    v = path.vertices
    for k in range(path.n_segments):
        res = _integrate_segment(config, v[k], v[k + 1], y, tol, dense=False)
        e = res.y[:, -1]
        y = (complex(e[0], e[1]), complex(e[2], e[3]))
    return y


def monodromy_loop(config, k: int, y0, radius: float | None = None,
                   n_sides: int = 96, tol: float = 1e-12):
    """(F, F') after one positive loop around the k-th singular point.

    The loop starts on the side of z_k facing the origin; returns the
    starting point together with the end values.
    """
    zk = config.singular_points[k]
    others = [abs(z - zk) for i, z in enumerate(config.singular_points) if i != k]
    r = 0.5 * min(others) if radius is None else radius
    start_angle = cmath.phase(-zk) if zk != 0 else 0.0
    path = ContourPath.circle(zk, r, n_sides, start_angle)
    return path.start, integrate_path(config, path, y0, tol)


# -- quadrature ----------------------------------------------------------------

def measure_exponent(config) -> float:
    """Power of P in the measure: -1/2 for four points, 2/N - 1 in general."""
    return 2.0 / len(config.singular_points) - 1.0


def _measure_factor(config, path: ContourPath):
    if path.measure == "none":
        return None
    root = PathRoot(config.singular_points, path, measure_exponent(config))
    n = len(config.singular_points)
    if path.measure == "inverse-sqrt-P" or n == 4:
        return root

    def general(z, t, near=None):
        return root(z, t, near) * sum(z ** l for l in range(n - 3))

    return general


def _graded(n_segments: int, kappa0: float, kappa1: float):
    """Map tau in [0, 2] to t in [0, T] with algebraic grading at both ends.

    Besides t and dt/dtau, returns which end is nearer (0 or 1) and the
    exact parameter distance to it, free of the rounding in T - t.
    """
    half = 0.5 * n_segments

    def t_of(tau):
        if tau <= 1:
            d = half * tau ** kappa0
            return d, half * kappa0 * tau ** (kappa0 - 1), 0, d
        s = 2 - tau
        d = half * s ** kappa1
        return n_segments - d, half * kappa1 * s ** (kappa1 - 1), 1, d

    breaks = []
    for k in range(1, n_segments):
        if k < half:
            breaks.append((k / half) ** (1 / kappa0))
        elif k > half:
            breaks.append(2 - ((n_segments - k) / half) ** (1 / kappa1))
        else:
            breaks.append(1.0)
    return t_of, sorted(set(breaks))


def quadrature(config, integrand, path: ContourPath, tol: float = 1e-12,
               endpoint_exponents=(None, None), limit: int = 4000):
    """Integral of integrand(z, t) times the path measure along ``path``.

    ``integrand`` may be a callable of (z, t) or one of the selectors
    ``"zero"`` and ``"one"``.  ``endpoint_exponents`` gives the power of
    (z - endpoint) with which the full integrand (measure included) behaves
    at a singular end; values <= -1 are rejected, and the others set an
    algebraic substitution that removes the endpoint singularity.
    """
    if isinstance(integrand, str):
        if integrand == "zero":
            return 0j
        if integrand != "one":
            raise ValueError(f"unknown integrand selector {integrand!r}")
        integrand = lambda z, t: 1.0  # noqa: E731
    path.check_clearance(config.singular_points, allow_ends=True)
    kappas = []
    for e in endpoint_exponents:
        if e is None:
            kappas.append(1.0)
            continue
        if e.real <= -1:
            raise NonIntegrableEndpoint(f"endpoint exponent {e} gives a divergent integral")
        kappas.append(max(1.0, 2.0 / (e.real + 1)))
    weight = _measure_factor(config, path)
    t_of, breaks = _graded(path.n_segments, *kappas)

    v = path.vertices
    end_steps = (v[1] - v[0], v[-2] - v[-1])
    end_index = []
    for side, zend in enumerate((path.start, path.end)):
        hits = [i for i, p in enumerate(config.singular_points) if p == zend]
        end_index.append(hits[0] if hits and path.singular_ends[side] else None)

    def f(tau):
        t, dt, side, dist = t_of(tau)
        if dt == 0:
            return np.zeros(2)
        near = None
        if dist <= 1:
            # offset from the nearer end taken exactly; z - z_end would cancel
            offset = dist * end_steps[side]
            z = (path.start, path.end)[side] + offset
            if end_index[side] is not None:
                if offset == 0:
                    return np.zeros(2)
                near = (end_index[side], offset)
        else:
            z = path.z(t)
        val = integrand(z, t) * path.dz(t) * dt
        if weight is not None:
            val = val * weight(z, t, near)
        val = complex(val)
        return np.array([val.real, val.imag])

    res, err, info = quad_vec(f, 0.0, 2.0, epsabs=tol, epsrel=tol, points=breaks or None,
                              limit=limit, full_output=True)
    if info.status != 0 and err > 100 * tol * max(1.0, float(np.abs(res).max())):
        raise NoConvergence(f"quadrature error estimate {err:.3g} above tolerance")
    return complex(res[0], res[1])


def verify_lagrange_identity(config, lam1, lam2, path: ContourPath, y0=(1.0, 0.5),
                             tol: float = 1e-12):
    """Both sides of the integrated Lagrange identity along an interior path.

    lhs = int (Lambda2 - Lambda1) F1 F2 P^(2/N - 1) dz,
    rhs = [P^(2/N) (F2 F1' - F1 F2')] between the path ends,
    with F1, F2 integrated from the same data y0 for the two accessory
    values (scalars for four points, coefficient tuples for general N).
    Returns (lhs, rhs, relative gap).
    """
    c1 = config.with_accessory(lam1)
    c2 = config.with_accessory(lam2)
    s1 = solve_path(c1, path, y0, tol)
    s2 = solve_path(c2, path, y0, tol)
    n = len(config.singular_points)
    acc1 = np.atleast_1d(np.asarray(lam1, dtype=complex))
    acc2 = np.atleast_1d(np.asarray(lam2, dtype=complex))
    diff = acc2 - acc1
    p = 2.0 / n
    root = PathRoot(config.singular_points, path, p)

    def integrand(z, t):
        F1 = s1(t)[0]
        F2 = s2(t)[0]
        dlam = sum(c * z ** l for l, c in enumerate(diff))
        return dlam * F1 * F2 * root(z, t) / config.P(z)

    bare = ContourPath(path.vertices, path.exclusion_radius, "none")
    lhs = quadrature(config, integrand, bare, tol)

    def bracket(t):
        F1, d1 = s1(t)
        F2, d2 = s2(t)
        z = path.z(t)
        return root(z, t) * (F2 * d1 - F1 * d2)

    rhs = bracket(float(path.n_segments)) - bracket(0.0)
    scale = max(abs(lhs), abs(rhs))
    gap = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return lhs, rhs, gap


def orthogonality_integral(config, sol1: Callable, sol2: Callable, path: ContourPath,
                           tol: float = 1e-10, endpoint_exponents=None):
    """int sol1 sol2 P^(-1/2) dz between two singular points.

    ``sol1``/``sol2`` are callables z -> value.  The integrand exponents at
    the ends default to the sum of the solutions' ``endpoint_exponents``
    attributes (pairs for start and end) plus the measure exponent; without
    those the smaller real index at each end point is assumed.
    """
    m = measure_exponent(config)
    if endpoint_exponents is None:
        ends = []
        for side, zend in enumerate((path.start, path.end)):
            if not path.singular_ends[side]:
                ends.append(None)
                continue
            total = m
            for s in (sol1, sol2):
                ex = getattr(s, "endpoint_exponents", None)
                if ex is not None:
                    total += ex[side]
                else:
                    k = int(np.argmin([abs(zend - z) for z in config.singular_points]))
                    total += min(config.indices[k], key=lambda v: v.real)
            ends.append(total)
        endpoint_exponents = tuple(ends)
    measured = ContourPath(path.vertices, path.exclusion_radius, "inverse-sqrt-P"
                           if len(config.singular_points) == 4 else "general-N", path.singular_ends)
    return quadrature(config, lambda z, t: sol1(z) * sol2(z), measured, tol, endpoint_exponents)
