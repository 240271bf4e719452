"""Moebius maps of the Riemann sphere and their action on equation parameters.

Points are plain complex numbers; the point at infinity is ``INF`` (any
value for which :func:`cmath.isinf` is true is accepted on input).
Internally every point is handled as a homogeneous pair so that infinity
needs no special branches.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import comb
from typing import Sequence

from .errors import (DegenerateCrossRatio, DegenerateMap, DuplicatePoints,
                     SingularAtOrigin)
from .fuchsian import (FuchsianConfig, SymmetricHeunConfig, canonical_points,
                       elementary_symmetric)

INF = complex(math.inf, 0.0)


def is_inf(z) -> bool:
    return cmath.isinf(complex(z))


def _homogeneous(z) -> tuple[complex, complex]:
    return (1 + 0j, 0j) if is_inf(z) else (complex(z), 1 + 0j)


def _from_homogeneous(x: complex, y: complex) -> complex:
    if y == 0 or abs(y) <= 1e-300 * abs(x):
        return INF
    return x / y


@dataclass(frozen=True)
class MobiusMap:
    """u = (a z + b) / (c z + d) with ad - bc != 0."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if scale == 0 or abs(self.det) <= 1e-14 * scale * scale:
            raise DegenerateMap(f"determinant {self.det} vanishes")

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, zeta) -> "MobiusMap":
        return cls(1, zeta, 0, 1)

    @classmethod
    def scaling(cls, t) -> "MobiusMap":
        return cls(t, 0, 0, 1)

    @classmethod
    def inversion(cls) -> "MobiusMap":
        return cls(0, 1, 1, 0)

    @classmethod
    def to_zero_one_inf(cls, z1, z2, z3) -> "MobiusMap":
        """The map sending z1, z2, z3 to 0, 1, infinity."""
        (x1, y1), (x2, y2), (x3, y3) = map(_homogeneous, (z1, z2, z3))
        # u = [z, z1][z2, z3] / ([z, z3][z2, z1]) with [p, q] = xp yq - xq yp
        k1 = x2 * y3 - x3 * y2
        k3 = x2 * y1 - x1 * y2
        if k1 == 0 or k3 == 0 or x1 * y3 - x3 * y1 == 0:
            raise DuplicatePoints("three distinct points are required")
        return cls(k1 * y1, -k1 * x1, k3 * y3, -k3 * x3)

    @classmethod
    def from_points(cls, src: Sequence, dst: Sequence) -> "MobiusMap":
        """The unique map with src[k] -> dst[k] for k = 0, 1, 2."""
        s = cls.to_zero_one_inf(*src)
        t = cls.to_zero_one_inf(*dst)
        return t.inverse().compose(s)

    def __call__(self, z):
        x, y = _homogeneous(z)
        return _from_homogeneous(self.a * x + self.b * y, self.c * x + self.d * y)

    def derivative(self, z) -> complex:
        return self.det / (self.c * z + self.d) ** 2

    def second_derivative(self, z) -> complex:
        return -2 * self.c * self.det / (self.c * z + self.d) ** 3

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self o other, i.e. z -> self(other(z))."""
        return MobiusMap(self.a * other.a + self.b * other.c,
                         self.a * other.b + self.b * other.d,
                         self.c * other.a + self.d * other.c,
                         self.c * other.b + self.d * other.d)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def normalized(self) -> "MobiusMap":
        """Same map rescaled to unit determinant."""
        s = cmath.sqrt(self.det)
        return MobiusMap(self.a / s, self.b / s, self.c / s, self.d / s)

    def equivalent(self, other: "MobiusMap", tol: float = 1e-12) -> bool:
        """Equal as maps (the coefficient matrices are proportional)."""
        m, n = self.normalized(), other.normalized()
        diff_p = max(abs(m.a - n.a), abs(m.b - n.b), abs(m.c - n.c), abs(m.d - n.d))
        diff_m = max(abs(m.a + n.a), abs(m.b + n.b), abs(m.c + n.c), abs(m.d + n.d))
        return min(diff_p, diff_m) <= tol


def apply(m: MobiusMap, z):
    return m(z)


def algebra(op: str, m1: MobiusMap, m2: MobiusMap | None = None) -> MobiusMap:
    """Group operations: ``compose`` gives m1 o m2, ``invert`` gives m1^-1."""
    if op == "compose":
        if m2 is None:
            raise TypeError("compose needs two maps")
        return m1.compose(m2)
    if op == "invert":
        return m1.inverse()
    raise ValueError(f"unknown operation {op!r}")


@dataclass(frozen=True)
class Primitive:
    """One generator of the Moebius group: translate, scale or invert."""

    kind: str
    param: complex = 0j

    def as_map(self) -> MobiusMap:
        if self.kind == "translate":
            return MobiusMap.translation(self.param)
        if self.kind == "scale":
            return MobiusMap.scaling(self.param)
        if self.kind == "invert":
            return MobiusMap.inversion()
        raise ValueError(self.kind)


def decompose(m: MobiusMap) -> list[Primitive]:
    """Generators whose successive application reproduces ``m``.

    For c != 0: translate by d/c, invert, scale by (bc - ad)/c^2, translate
    by a/c.  For c == 0 the map is affine: scale by a/d, translate by b/d.
    """
    a, b, c, d = m.a, m.b, m.c, m.d
    if c == 0:
        return [Primitive("scale", a / d), Primitive("translate", b / d)]
    return [Primitive("translate", d / c), Primitive("invert"),
            Primitive("scale", (b * c - a * d) / (c * c)), Primitive("translate", a / c)]


def compose_primitives(prims: Sequence[Primitive]) -> MobiusMap:
    out = MobiusMap.identity()
    for p in prims:
        out = p.as_map().compose(out)
    return out


def cross_ratio(z1, z2, z3, z4) -> complex:
    """((z1 - z3)(z2 - z4)) / ((z2 - z3)(z1 - z4)), infinity allowed."""
    h = [_homogeneous(z) for z in (z1, z2, z3, z4)]

    def br(i, k):
        return h[i][0] * h[k][1] - h[k][0] * h[i][1]

    for i in range(4):
        for k in range(i + 1, 4):
            if abs(br(i, k)) <= 1e-14 * (1 + abs(h[i][0]) * abs(h[k][0])):
                raise DuplicatePoints("cross-ratio needs four distinct points")
    return (br(0, 2) * br(1, 3)) / (br(1, 2) * br(0, 3))


def is_circular(points: Sequence[complex]) -> bool:
    """True when the four points lie on a common circle or line."""
    a = cross_ratio(*points)
    return abs(a.imag) <= 1e-10 * (1 + abs(a))


def canonicalize(points: Sequence[complex]) -> tuple[MobiusMap, complex]:
    """Map the four points, in the given order, onto the biquadratic roots.

    The target points are e^{i phi}, -e^{-i phi}, -e^{i phi}, e^{-i phi}
    with sin^2 phi = 1/a, a being the cross-ratio.  phi is the principal
    arcsine of the principal square root of 1/a, so concyclic inputs with
    a >= 1 give real phi in (0, pi/2].  No reordering is attempted.
    """
    a = cross_ratio(*points)
    if abs(a) < 1e-12 or abs(a - 1) < 1e-12 or not cmath.isfinite(a):
        raise DegenerateCrossRatio(f"cross-ratio {a} is degenerate")
    phi = cmath.asin(cmath.sqrt(1 / a))
    if phi.real < 0:
        phi = -phi
    target = canonical_points(phi)
    m = MobiusMap.from_points(points[:3], target[:3])
    return m, phi


# -- action on parameter space --------------------------------------------------

def _translate_accessory(acc, zeta):
    # Lambda_new(w) = Lambda(w - zeta)
    n = len(acc)
    return tuple(sum(comb(m, l) * (-zeta) ** (m - l) * acc[m] for m in range(l, n))
                 for l in range(n))


def _apply_fuchsian(cfg: FuchsianConfig, p: Primitive) -> FuchsianConfig:
    n = cfg.n_points
    if p.kind == "translate":
        pts = tuple(z + p.param for z in cfg.points)
        acc = _translate_accessory(cfg.accessory, p.param)
    elif p.kind == "scale":
        t = p.param
        pts = tuple(t * z for z in cfg.points)
        acc = tuple(t ** (n - l - 2) * lam for l, lam in enumerate(cfg.accessory))
    else:
        if any(z == 0 for z in cfg.points):
            raise SingularAtOrigin("inversion sends a singular point to infinity")
        sig_n = elementary_symmetric(cfg.points)[-1]
        q = cfg.q
        pref = (-1) ** (n - 1) / sig_n
        acc = tuple(pref * (sum(z ** (l + 3 - n) * qj for z, qj in zip(cfg.points, q))
                            - cfg.accessory[n - 4 - l]) for l in range(n - 3))
        pts = tuple(1 / z for z in cfg.points)
    return FuchsianConfig(pts, cfg.indices, acc, cfg.atol)


def _apply_symmetric(cfg: SymmetricHeunConfig, p: Primitive) -> SymmetricHeunConfig:
    if p.kind == "translate":
        pts = tuple(z + p.param for z in cfg.points)
        lam = cfg.lam
    elif p.kind == "scale":
        pts = tuple(p.param * z for z in cfg.points)
        lam = p.param ** 2 * cfg.lam
    else:
        if any(z == 0 for z in cfg.points):
            raise SingularAtOrigin("inversion sends a singular point to infinity")
        sig4 = cfg.sigma[3]
        lam = (cfg.lam - sum(qj / z for qj, z in zip(cfg.q, cfg.points))) / sig4
        pts = tuple(1 / z for z in cfg.points)
    # the chi are invariant: q_j transforms exactly like sin^2(2 chi) P'(z_j)/16
    return SymmetricHeunConfig(pts, cfg.chis, lam, atol=cfg.atol)


def transform_config(config, m: MobiusMap):
    """Image of an equation under the extended Moebius action.

    The map is decomposed into generators and the parameter rule of each
    generator is applied in turn.  Point order is preserved: the j-th
    singular point of the result is m(z_j).
    """
    step = _apply_symmetric if isinstance(config, SymmetricHeunConfig) else _apply_fuchsian
    for z in config.points:
        if is_inf(m(z)):
            raise SingularAtOrigin(f"singular point {z} is sent to infinity")
    out = config
    for p in decompose(m):
        out = step(out, p)
    return out


def transform_q(config, p: Primitive) -> tuple[complex, ...]:
    """Residues after one generator, from the explicit generator rules."""
    n = config.n_points
    q = config.q
    if p.kind == "translate":
        return tuple(q)
    if p.kind == "scale":
        return tuple(p.param ** (n - 1) * qj for qj in q)
    sig_n = elementary_symmetric(config.points)[-1]
    return tuple((-1) ** (n - 1) * z ** (2 - n) * qj / sig_n for z, qj in zip(config.points, q))
