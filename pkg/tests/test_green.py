import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

import hypmetric as hm
from hypmetric.errors import DomainError, GridMismatchError, ParameterError
from hypmetric.green import BoundaryData, cell_log_integral, green_operator, solve_on_operator


def test_green_function_examples():
    assert hm.green_function(0, 0.5) == pytest.approx(math.log(2))
    # |1 - 0.5*0.999| / |0.999 - 0.5| = 0.5005 / 0.499
    assert hm.green_function(0.999, 0.5) == pytest.approx(math.log(0.5005 / 0.499), rel=1e-12)
    assert hm.green_function(0.999999, 0.5) < 1e-5
    with pytest.raises(DomainError):
        hm.green_function(0.3, 0.3)


@given(st.complex_numbers(max_magnitude=0.9), st.complex_numbers(max_magnitude=0.9))
def test_green_function_symmetric_and_positive(z, w):
    if abs(z - w) < 1e-6:
        return
    g = hm.green_function(z, w)
    assert g > 0
    assert g == pytest.approx(hm.green_function(w, z), rel=1e-12)


def test_harmonic_extension_examples():
    z = np.array([0.0, 0.3 + 0.4j, -0.7j])
    assert hm.harmonic_extension(BoundaryData.constant(1.0), z) == pytest.approx(1.0)
    cos = BoundaryData.from_rule(np.cos)
    assert hm.harmonic_extension(cos, z) == pytest.approx(z.real, abs=1e-12)
    c = math.log(2 * 2 / (2**2 - 1))
    assert hm.harmonic_extension(BoundaryData.constant(c), z) == pytest.approx(c)


def test_harmonic_extension_poisson_integral():
    psi = BoundaryData.from_rule(lambda t: np.exp(np.cos(t)) * np.sin(2 * t) + 0.3)
    z = 0.6 * np.exp(0.7j)
    r, th = abs(z), np.angle(z)
    poisson = lambda t: (1 - r**2) / (1 - 2 * r * np.cos(t - th) + r**2) / (2 * np.pi)  # noqa: E731
    ref, _ = integrate.quad(lambda t: poisson(t) * psi(t), 0, 2 * np.pi, epsabs=1e-13, limit=200)
    assert hm.harmonic_extension(psi, z) == pytest.approx(ref, abs=1e-11)


def test_cell_log_integral_matches_quadrature():
    cx, cy, s = 0.013, -0.004, 0.01
    ref, _ = integrate.dblquad(
        lambda y, x: 0.5 * math.log(x * x + y * y),
        cx - s / 2, cx + s / 2, cy - s / 2, cy + s / 2, epsabs=1e-14,
    )
    assert cell_log_integral(cx, cy, s) == pytest.approx(ref, rel=1e-9)


def test_potential_of_constant_source():
    # P[1](z) = (1 - |z|^2)/4 solves Laplace P = -1 with zero boundary values
    op = green_operator(1 / 64)
    p = op.potential(np.ones(op.n))
    exact = (1 - np.abs(op.nodes) ** 2) / 4
    assert np.max(np.abs(p - exact)) < 2e-3


def test_apply_T_zero_source_limit():
    op = green_operator(1 / 32)
    g = op.grid(np.zeros(op.n))
    with pytest.raises(GridMismatchError):
        hm.apply_T(g, green_operator(1 / 16).grid(np.zeros(green_operator(1 / 16).n)))
    out = hm.apply_T(g, g)
    # T[0] with h = 0 is -P[1]
    assert np.allclose(op.values_of(out), -op.potential(np.ones(op.n)))


def test_solve_constant_boundary_golden_ratio():
    grid, rep = hm.solve_liouville_disk(BoundaryData.constant(math.log(2)), spacing=1 / 32)
    assert rep.converged
    assert rep.final_residual < 1e-8
    u0 = float(grid.interpolate(0j))
    assert u0 == pytest.approx(math.log(2 / ((1 + math.sqrt(5)) / 2)), abs=2e-3)


def test_solve_matches_scaled_disk_metric():
    # u = log lambda of the disk of radius R restricted to the unit disk
    R = 1.5
    exact = hm.hyperbolic_disk(R)
    psi = BoundaryData.constant(math.log(2 * R / (R**2 - 1)))
    grid, rep = hm.solve_liouville_disk(psi, spacing=1 / 64)
    z = grid.nodes()[grid.active()]
    err = np.max(np.abs(grid.values[grid.active()] - np.log(exact(z))))
    assert err < 1e-3


def test_solve_reports_non_convergence():
    _, rep = hm.solve_liouville_disk(BoundaryData.constant(0.5), spacing=1 / 16, max_iter=2)
    assert not rep.converged
    assert rep.iterations == 2
    with pytest.raises(ParameterError):
        hm.solve_liouville_disk(BoundaryData.constant(0.5), spacing=1 / 16, tol=0)


@given(st.floats(-0.5, 1.5))
def test_sandwich_and_monotone_in_data(c):
    op = green_operator(1 / 16)
    h = op.harmonic(BoundaryData.constant(c))
    u, rep = solve_on_operator(op, h, 1e-10, 500, "auto", False)
    assert np.all(u <= h + 1e-12)
    assert np.all(op.apply(h, h) <= u + 1e-12)
    h2 = op.harmonic(BoundaryData.constant(c + 0.1))
    u2, _ = solve_on_operator(op, h2, 1e-10, 500, "auto", False)
    assert np.all(u2 >= u - 1e-10)


def test_solver_deterministic():
    psi = BoundaryData.from_rule(lambda t: 0.4 + 0.2 * np.cos(3 * t))
    a, _ = hm.solve_liouville_disk(psi, spacing=1 / 32)
    b, _ = hm.solve_liouville_disk(psi, spacing=1 / 32)
    assert np.array_equal(a.values, b.values)


def test_zero_source_gives_harmonic_part():
    op = green_operator(1 / 32)
    h = op.harmonic(BoundaryData.from_rule(np.cos))
    assert np.array_equal(op.apply(np.full(op.n, -np.inf), h), h)


def test_T_is_antitone():
    op = green_operator(1 / 16)
    h = op.harmonic(BoundaryData.constant(0.3))
    rng = np.random.default_rng(20)
    for _ in range(20):
        u1 = rng.uniform(-1, 1, op.n)
        u2 = u1 + rng.uniform(0, 0.5, op.n)
        assert np.all(op.apply(u1, h) >= op.apply(u2, h))


def test_radius_two_example():
    grid, _ = hm.solve_liouville_disk(BoundaryData.constant(math.log(4 / 3)), spacing=1 / 64)
    assert float(grid.interpolate(0j)) == pytest.approx(0.0, abs=1e-3)


def test_automorphism_pullback_data_give_the_pullback():
    # boundary data of log(T*lambda_D_R) for a point-shifted disk of radius 1.3
    a, R = 0.3 + 0.2j, 1.3
    lam = hm.pullback(hm.hyperbolic_disk(R), hm.disk_automorphism(a / R * 0.5), hm.Disk(0j, 1.2))
    psi = BoundaryData.from_rule(lambda t: np.log(lam(np.exp(1j * t))))
    grid, _ = hm.solve_liouville_disk(psi, spacing=1 / 64)
    act = grid.active()
    err = np.abs(grid.values[act] - np.log(lam(grid.nodes()[act])))
    assert err.max() < 2e-3


def test_five_point_residual():
    R = 2.0
    h = 1 / 64
    grid, _ = hm.solve_liouville_disk(BoundaryData.constant(math.log(2 * R / (R**2 - 1))), spacing=h)
    u = grid.values
    lap = (u[1:-1, 2:] + u[1:-1, :-2] + u[2:, 1:-1] + u[:-2, 1:-1] - 4 * u[1:-1, 1:-1]) / h**2
    z = grid.nodes()[1:-1, 1:-1]
    deep = np.abs(z) <= 1 - 5 * h
    res = np.abs(lap - np.exp(2 * u[1:-1, 1:-1]))[deep]
    assert res.max() <= 10 * h**2
