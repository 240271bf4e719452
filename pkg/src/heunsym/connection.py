"""Local Frobenius bases, connection coefficients and the two-point spectral problem.

Singular points are addressed by their 1-based index j = 1..4.  A
"solution handle" is anything that yields (F, F') at a point: a series
solution, a Frobenius solution, a pulled-back classical solution, or a
plain callable returning the pair.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .classical import best_ordering, symmetric_to_local_frame
from .errors import IllConditioned, NoRootInWindow, OutsideDomain, ResonantExponents
from .frobenius import LocalFrobenius, local_solution, terms_for
from .oracle import ContourPath, orthogonality_integral, solve_path
from .series import SeriesSolution, eval_series, fundamental_pair

COND_LIMIT = 1e8
MATCH_RADIUS = 0.7


def frobenius_local(config, j: int, exponent: str = "alpha", m_max: int | None = None,
                    reach: float = 0.9) -> LocalFrobenius:
    """Frobenius solution (z - z_j)^e (1 + ...) at z_j with e = alpha_j or beta_j.

    Without ``m_max`` enough terms are kept for evaluation out to
    ``reach`` times the distance to the nearest other singular point.
    """
    a_j, b_j = config.indices[j - 1]
    e = a_j if exponent == "alpha" else b_j
    if m_max is None:
        m_max = terms_for(reach)
    return local_solution(config, j - 1, e, m_max)


def solution_values(handle, z):
    """(F, F') of a solution handle at z."""
    if isinstance(handle, SeriesSolution):
        return eval_series(handle, z)
    if hasattr(handle, "evaluate"):
        out = handle.evaluate(z)
        return out[0], out[1]
    return handle(z)


@dataclass(frozen=True)
class LocalDecomposition:
    c_alpha: complex
    c_beta: complex
    cond: float


def _solve2(basis_vals, target, what: str):
    (a, da), (b, db) = basis_vals
    m = np.array([[a, b], [da, db]], dtype=complex)
    cond = float(np.linalg.cond(m))
    if not math.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditioned(f"{what}: condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    c = np.linalg.solve(m, np.asarray(target, dtype=complex))
    return complex(c[0]), complex(c[1]), cond


def decompose_local(config, solution, j: int, matching_point: complex,
                    basis: tuple[LocalFrobenius, LocalFrobenius] | None = None) -> LocalDecomposition:
    """F = C_alpha F_alpha + C_beta F_beta at z_j, matched in value and slope."""
    if basis is None:
        basis = (frobenius_local(config, j, "alpha"), frobenius_local(config, j, "beta"))
    vals = [b.evaluate(matching_point) for b in basis]
    ca, cb, cond = _solve2(vals, solution_values(solution, matching_point),
                           f"local decomposition at z_{j}")
    return LocalDecomposition(ca, cb, cond)


def bracket_limit(config, j: int, d1: LocalDecomposition, d2: LocalDecomposition) -> complex:
    """Limit at z_j of P^(1/2) (F2 F1' - F1 F2'), principal root of P'(z_j)."""
    a, b = config.indices[j - 1]
    zj = config.points[j - 1]
    dp = 1
    for k, zk in enumerate(config.points):
        if k != j - 1:
            dp *= zj - zk
    return (a - b) * cmath.sqrt(dp) * (d1.c_alpha * d2.c_beta - d2.c_alpha * d1.c_beta)


# -- connection coefficients ----------------------------------------------------

@dataclass(frozen=True)
class ConnectionPair:
    """Local solution at z_j written as gamma1 F1 + gamma2 F2."""

    gamma1: complex
    gamma2: complex
    match_point: complex
    check_point: complex
    gap: float
    cond: float


def default_points(config, j: int, radius: float = MATCH_RADIUS):
    """Matching point on the ray towards z_j and a second, off-ray check point."""
    zj = config.points[j - 1]
    u = zj / abs(zj)
    return radius * u, 0.55 * u * cmath.exp(0.35j)


def connection_gamma(config, j: int, basis=None, local=None, match_point=None,
                     check_point=None) -> ConnectionPair:
    """Gamma coefficients of the local regular solution at z_j in the (F1, F2) basis.

    The local solution defaults to the classical HeunG pulled back through
    the frame that keeps both points deepest inside its disk; it is
    normalized as (z - z_j)^alpha_j (1 + ...).  The basis defaults to the
    fundamental pair at 0.  The result is verified at ``check_point``.
    """
    if not config.is_circular():
        raise OutsideDomain("connection coefficients need a canonical circular configuration")
    zm, zc = default_points(config, j)
    zm = zm if match_point is None else match_point
    zc = zc if check_point is None else check_point
    if local is None:
        local = symmetric_to_local_frame(config, j, best_ordering(config, j, (zm, zc)))
    if basis is None:
        basis = fundamental_pair(config, radius=max(abs(zm), abs(zc)))
    vals = [solution_values(b, zm) for b in basis]
    target = solution_values(local, zm)
    g1, g2, cond = _solve2(vals, target, f"connection at z_{j}")
    lhs = solution_values(local, zc)[0]
    f1, f2 = (solution_values(b, zc)[0] for b in basis)
    rhs = g1 * f1 + g2 * f2
    gap = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return ConnectionPair(g1, g2, zm, zc, gap, cond)


# -- two-point boundary problem ---------------------------------------------------

@dataclass(frozen=True)
class Shot:
    """One shooting run: pure alpha solution at z_i decomposed at z_j."""

    lam: complex
    c_alpha: complex
    c_beta: complex
    config: object
    i: int
    j: int
    start: LocalFrobenius
    finish: tuple[LocalFrobenius, LocalFrobenius]
    middle: object
    launch: complex
    arrive: complex

    @property
    def D(self) -> complex:
        return self.c_beta

    @property
    def endpoint_exponents(self):
        a_j, b_j = self.config.indices[self.j - 1]
        end = self.finish[0].exponent if self.c_beta == 0 else min((a_j, b_j), key=lambda v: v.real)
        return (self.start.exponent, end)

    def __call__(self, z):
        """Eigenfunction value at z on the segment z_i -> z_j."""
        zi, zj = self.start.point, self.finish[0].point
        if abs(z - zi) <= abs(self.launch - zi):
            return self.start(z)
        if abs(z - zj) <= abs(self.arrive - zj):
            return self.c_alpha * self.finish[0](z) + self.c_beta * self.finish[1](z)
        seg = self.arrive - self.launch
        t = ((z - self.launch) * seg.conjugate()).real / abs(seg) ** 2
        return self.middle(min(max(t, 0.0), 1.0))[0]


def shoot(config, i: int, j: int, lam: complex, launch_fraction: float = 0.5,
          tol: float = 1e-12) -> Shot:
    """Launch F_alpha at z_i, continue along the chord to z_j, decompose there.

    The launch and arrival points sit at ``launch_fraction`` of the
    distance to the nearest other singular point, on the chord z_i z_j.
    """
    if i == j:
        raise ValueError("the two boundary points must differ")
    cfg = config.with_lambda(lam)
    for k in (i, j):
        a, b = cfg.indices[k - 1]
        d = a - b
        if abs(d - round(d.real)) < 1e-8:
            raise ResonantExponents(f"exponent difference at z_{k} is an integer")
    zi, zj = cfg.points[i - 1], cfg.points[j - 1]
    chord = (zj - zi) / abs(zj - zi)
    start = local_solution(cfg, i - 1, cfg.indices[i - 1][0], terms_for(launch_fraction), ref=chord)
    fin_a = local_solution(cfg, j - 1, cfg.indices[j - 1][0], terms_for(launch_fraction), ref=-chord)
    fin_b = local_solution(cfg, j - 1, cfg.indices[j - 1][1], terms_for(launch_fraction), ref=-chord)
    launch = zi + chord * launch_fraction * start.disk_radius
    arrive = zj - chord * launch_fraction * fin_a.disk_radius
    mid = solve_path(cfg, ContourPath.segment(launch, arrive), start.evaluate(launch), tol)
    ca, cb, _ = _solve2([fin_a.evaluate(arrive), fin_b.evaluate(arrive)], mid.end,
                        f"decomposition at z_{j}")
    return Shot(complex(lam), ca, cb, cfg, i, j, start, (fin_a, fin_b), mid, launch, arrive)


def boundary_function(config, i: int, j: int, lam: complex, **kw) -> complex:
    """D(lambda): beta-coefficient at z_j of the pure alpha solution from z_i."""
    return shoot(config, i, j, lam, **kw).D


def _window_samples(window, n: int):
    """Sample points of a segment (a, b) or a rectangle ((re0, re1), (im0, im1))."""
    a, b = window
    if isinstance(a, tuple):
        (x0, x1), (y0, y1) = a, b
        m = max(2, int(round(math.sqrt(n))))
        xs, ys = np.linspace(x0, x1, m), np.linspace(y0, y1, m)
        return [complex(x, y) for y in ys for x in xs], (m, m)
    return list(np.linspace(complex(a), complex(b), n)), (n,)


def _newton(f, lam0: complex, tol: float, max_iter: int = 40):
    lam = lam0
    val = f(lam)
    for _ in range(max_iter):
        if abs(val) < tol:
            return lam, val
        h = 1e-6 * max(1.0, abs(lam))
        deriv = (f(lam + h) - f(lam - h)) / (2 * h)
        if deriv == 0:
            break
        step = val / deriv
        lam_new = lam - step
        val_new = f(lam_new)
        damp = 1.0
        while abs(val_new) > abs(val) and damp > 1e-4:
            damp *= 0.5
            lam_new = lam - damp * step
            val_new = f(lam_new)
        lam, val = lam_new, val_new
    return lam, val


def eigenvalue_search(config, i: int, j: int, window, tol: float = 1e-10, n_scan: int = 81,
                      **shot_kw) -> list[complex]:
    """Roots of D(lambda) inside ``window``.

    ``window`` is either a segment (lam_a, lam_b) in the complex plane or a
    rectangle ((re0, re1), (im0, im1)).  |D| is scanned, each local minimum
    is polished by damped Newton steps with a central-difference
    derivative, and roots with |D| < tol are returned once each.
    """
    samples, shape = _window_samples(window, n_scan)
    vals = np.array([abs(boundary_function(config, i, j, s, **shot_kw)) for s in samples])
    grid = vals.reshape(shape)
    seeds = []
    if len(shape) == 1:
        for k in range(len(samples)):
            left = grid[k - 1] if k > 0 else math.inf
            right = grid[k + 1] if k + 1 < len(samples) else math.inf
            if grid[k] <= left and grid[k] <= right:
                seeds.append(samples[k])
    else:
        ny, nx = shape
        for r in range(ny):
            for c in range(nx):
                nb = grid[max(r - 1, 0):r + 2, max(c - 1, 0):c + 2]
                if grid[r, c] <= nb.min():
                    seeds.append(samples[r * nx + c])
    step = abs(samples[1] - samples[0])
    roots = []
    for s in seeds:
        lam, val = _newton(lambda x: boundary_function(config, i, j, x, **shot_kw), s, tol)
        if abs(val) >= tol or not _inside(window, lam, step):
            continue
        if all(abs(lam - r) > 1e-6 * max(1.0, abs(r)) for r in roots):
            roots.append(complex(lam))
    if not roots:
        raise NoRootInWindow("no zero of the boundary function in the window")
    origin = samples[0]
    return sorted(roots, key=lambda z: abs(z - origin))


def _inside(window, lam: complex, slack: float) -> bool:
    a, b = window
    if isinstance(a, tuple):
        (x0, x1), (y0, y1) = a, b
        return x0 - slack <= lam.real <= x1 + slack and y0 - slack <= lam.imag <= y1 + slack
    a, b = complex(a), complex(b)
    d = b - a
    t = ((lam - a) * d.conjugate()).real / abs(d) ** 2
    dist = abs(a + min(max(t, 0), 1) * d - lam)
    return dist <= slack and -slack / abs(d) <= t <= 1 + slack / abs(d)


def eigen_orthogonality(config, i: int, j: int, lam1: complex, lam2: complex,
                        tol: float = 1e-10, **shot_kw) -> complex:
    """Orthogonality integral between the shooting solutions for lam1 and lam2."""
    s1 = shoot(config, i, j, lam1, **shot_kw)
    s2 = shoot(config, i, j, lam2, **shot_kw)
    zi, zj = config.points[i - 1], config.points[j - 1]
    path = ContourPath.segment(zi, zj, singular_ends=(True, True))
    return orthogonality_integral(s1.config, s1, s2, path, tol)
