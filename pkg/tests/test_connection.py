import cmath
import math

import numpy as np
import pytest

from heunsym.connection import (bracket_limit, connection_gamma, decompose_local,
                                default_points, eigen_orthogonality, eigenvalue_search,
                                frobenius_local, shoot)
from heunsym.errors import (IllConditioned, NoRootInWindow, OutsideDisk, OutsideDomain,
                            ResonantExponents)
from heunsym.frobenius import local_power, local_solution
from heunsym.fuchsian import SymmetricHeunConfig
from heunsym.oracle import ContourPath, solve_path
from heunsym.series import eval_series, fundamental_pair

EIGEN_CONFIG = SymmetricHeunConfig.canonical(math.pi / 4, (0.3, 0.6, 0.2, 0.6), 0)
# regression values from this implementation (lambda = -i mu on the imaginary axis)
EIGEN_ROOTS = (-1.5948238862180273j, -5.661321510335384j, -12.663913780705693j,
               -22.530462875972333j)


def test_local_power_branch():
    assert abs(local_power(-1, 0.5, 1j) - 1j) < 1e-15
    assert abs(local_power(-1, 0.5, -1j) + 1j) < 1e-15
    assert abs(local_power(4, 0.5, 1) - 2) < 1e-15


@pytest.mark.parametrize("j", [1, 2, 3, 4])
@pytest.mark.parametrize("exponent", ["alpha", "beta"])
def test_frobenius_solution_solves_equation(sample_config, j, exponent):
    sol = frobenius_local(sample_config, j, exponent)
    zj = sol.point
    for z in (zj * 0.7, zj + 0.3 * cmath.exp(2j)):
        F, dF, d2F = sol.evaluate(z, order=2)
        p1, p0 = sample_config.coefficients_at(z)
        assert abs(d2F + p1 * dF + p0 * F) < 1e-10 * max(1, abs(F), abs(d2F))
    x = 1e-4 * (-zj / abs(zj))
    a, b = sample_config.indices[j - 1]
    e = a if exponent == "alpha" else b
    assert abs(sol(zj + x) / local_power(x, e, -zj) - 1) < 1e-3


def test_frobenius_matches_oracle(sample_config):
    sol = frobenius_local(sample_config, 1)
    zj = sol.point
    a, b = zj * 0.6, zj * 0.6 * cmath.exp(0.4j)
    ref = solve_path(sample_config, ContourPath.segment(a, b), sol.evaluate(a), tol=1e-13).end
    got = sol.evaluate(b)
    assert abs(got[0] - ref[0]) < 1e-10 and abs(got[1] - ref[1]) < 1e-10


def test_frobenius_outside_disk(sample_config):
    sol = frobenius_local(sample_config, 1)
    with pytest.raises(OutsideDisk):
        sol.evaluate(sol.point + 1.5 * sol.disk_radius)


def test_resonant_exponents_rejected():
    cfg = SymmetricHeunConfig.canonical(0.7, (math.pi / 4, 0.3, 0.4, 0.5), 0.1)
    with pytest.raises(ResonantExponents):
        local_solution(cfg, 0, cfg.indices[0][0])


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_connection_coefficients(sample_config, j):
    pair = connection_gamma(sample_config, j)
    assert pair.gap < 1e-10
    # second route: the Frobenius series at z_j gives the same coefficients
    frob = connection_gamma(sample_config, j, local=frobenius_local(sample_config, j))
    assert abs(pair.gamma1 - frob.gamma1) < 1e-9 * max(1, abs(pair.gamma1))
    assert abs(pair.gamma2 - frob.gamma2) < 1e-9 * max(1, abs(pair.gamma2))


def test_connection_reconstructs_local_solution_at_interior_points(sample_config):
    j = 2
    pair = connection_gamma(sample_config, j)
    f1, f2 = fundamental_pair(sample_config, radius=0.8)
    local = frobenius_local(sample_config, j)
    zj = sample_config.points[j - 1]
    for r, ang in ((0.6, 0.0), (0.75, 0.2), (0.8, -0.3), (0.65, 0.45)):
        z = r * zj * cmath.exp(1j * ang)
        lhs = local(z)
        rhs = pair.gamma1 * eval_series(f1, z)[0] + pair.gamma2 * eval_series(f2, z)[0]
        assert abs(lhs - rhs) < 1e-9 * abs(lhs)


def test_connection_needs_circular_config():
    cfg = SymmetricHeunConfig.canonical(0.6 + 0.1j, (0.3, 0.5, 0.7, 0.9), 0.2)
    with pytest.raises(OutsideDomain):
        connection_gamma(cfg, 1)


def test_default_points(sample_config):
    zm, zc = default_points(sample_config, 3)
    assert abs(zm - 0.7 * sample_config.points[2]) < 1e-15
    assert abs(abs(zc) - 0.55) < 1e-15


def test_bracket_limit_matches_wronskian(sample_config):
    # P^(1/2) (F2 F1' - F1 F2') is constant with modulus |P(0)|^(1/2) for the pair at 0
    j = 1
    f1, f2 = fundamental_pair(sample_config, radius=0.8)
    zm = 0.7 * sample_config.points[0]
    d1 = decompose_local(sample_config, f1, j, zm)
    d2 = decompose_local(sample_config, f2, j, zm)
    limit = bracket_limit(sample_config, j, d1, d2)
    assert abs(abs(limit) - abs(cmath.sqrt(sample_config.P(0)))) < 1e-9


def test_ill_conditioned_decomposition(sample_config):
    sol = frobenius_local(sample_config, 1)
    with pytest.raises(IllConditioned):
        decompose_local(sample_config, sol, 1, sample_config.points[0] * 0.7, basis=(sol, sol))


def test_eigenvalues_regression():
    roots = eigenvalue_search(EIGEN_CONFIG, 1, 3, (0, -30j), tol=1e-10)
    assert len(roots) == len(EIGEN_ROOTS)
    for got, want in zip(roots, EIGEN_ROOTS):
        assert abs(got - want) < 1e-8


def test_eigenvalue_window_without_roots():
    with pytest.raises(NoRootInWindow):
        eigenvalue_search(EIGEN_CONFIG, 1, 3, (-0.2j, -1.2j), n_scan=11)


def test_eigenfunctions_are_orthogonal():
    lam1, lam2 = EIGEN_ROOTS[0], EIGEN_ROOTS[1]
    assert abs(eigen_orthogonality(EIGEN_CONFIG, 1, 3, lam1, lam2)) < 1e-6
    control = eigen_orthogonality(EIGEN_CONFIG, 1, 3, lam1, lam1 - 2.5j)
    assert abs(control) > 1e-3


def test_shot_is_continuous():
    shot = shoot(EIGEN_CONFIG, 1, 3, EIGEN_ROOTS[0])
    zi, zj = EIGEN_CONFIG.points[0], EIGEN_CONFIG.points[2]
    for z in (shot.launch, shot.arrive):
        for eps in (1e-9, -1e-9):
            a = shot(z + eps * (zj - zi))
            b = shot(z - eps * (zj - zi))
            assert abs(a - b) < 1e-7 * max(1, abs(a))
    assert np.isfinite(shot(0))
