import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import hypmetric as hm
from hypmetric.closed_forms import RADIAL_VARIANTS, RadialMetricFamily, radial_density
from hypmetric.errors import DomainError, ParameterError, ReconstructionError
from hypmetric.schwarzian import FINITE_DIFFERENCE, density_dz


def test_disk_metric_has_zero_schwarzian():
    z = np.array([0.0, 0.3 + 0.2j, -0.6j])
    assert np.max(np.abs(hm.metric_schwarzian_fd(hm.hyperbolic_disk(), z, 1e-3))) < 1e-6


def test_punctured_disk_schwarzian():
    z = np.array([0.3 + 0.2j, -0.4j, 0.5])
    assert hm.metric_schwarzian_fd(hm.hyperbolic_punctured_disk(), z) == pytest.approx(1 / (2 * z**2), rel=1e-6)


def test_agard_schwarzian_at_minus_one():
    assert hm.metric_schwarzian_fd(hm.agard_metric(), -1.0) == pytest.approx(0.375, abs=1e-7)
    assert hm.cpp_schwarzian_closed_form(-1.0) == pytest.approx(0.375)
    with pytest.raises(DomainError):
        hm.cpp_schwarzian_closed_form(1.0)


def test_closed_form_pole_structure():
    for z0 in (0.0, 1.0):
        for r in (1e-2, 1e-3, 1e-4, 1e-5):
            z = z0 + r * np.exp(0.7j)
            assert (z - z0) ** 2 * hm.cpp_schwarzian_closed_form(z) == pytest.approx(0.5, abs=2 * r)
    big = 1e6 * np.exp(0.3j)
    assert big**2 * hm.cpp_schwarzian_closed_form(big) == pytest.approx(0.5, abs=1e-5)


def test_map_schwarzian():
    z = np.array([0.2 + 0.1j, -1.5 + 2j])
    assert np.max(np.abs(hm.map_schwarzian(hm.mobius(1, 2, 3, 4), z))) < 1e-12
    # S(z^n) = (1 - n^2) / (2 z^2)
    assert hm.map_schwarzian(hm.power_map(3), z) == pytest.approx((1 - 9) / (2 * z**2))
    with pytest.raises(DomainError):
        hm.map_schwarzian(hm.power_map(2), 0.0)


def test_transformation_law_for_powers():
    d = hm.agard_metric()
    w = np.array([0.6 + 0.7j, -0.8 + 0.5j])
    for n in (2, 3):
        assert np.max(hm.check_transformation_law(d, hm.power_map(n), w)) < 1e-4


@given(st.sampled_from(RADIAL_VARIANTS), st.floats(0.2, 0.8), st.floats(0, 2 * math.pi))
def test_schwarzian_of_closed_forms_is_holomorphic(variant, s, t):
    fam = RadialMetricFamily(variant, R=1.0, r=0.1 if variant == "annulus" else 0.0, alpha=0.6)
    lo, hi = (0.1, 1.0) if variant == "annulus" else ((1.0, 4.0) if variant.startswith("exterior") else (0.0, 1.0))
    z = (lo + s * (hi - lo)) * np.exp(1j * t)
    field = hm.SchwarzianField.from_density(radial_density(fam))
    assert field.provenance == FINITE_DIFFERENCE
    assert field.cr_residual(z, h=1e-3 * abs(z)) < 1e-4 * max(1.0, abs(field(z)))


def test_reconstruct_identity():
    S = hm.SchwarzianField.constant(0.0)
    path = hm.PathPolyline(np.linspace(0, 0.9, 10) + 0j)
    out = hm.reconstruct_developing_map(S, 0j, 2.0, 0j, path)
    assert np.max(np.abs(out.f - path.vertices)) < 1e-8


def test_reconstruct_punctured_disk_density():
    S = hm.SchwarzianField(lambda z: 1 / (2 * z**2), domain=hm.PuncturedDisk())
    d = hm.hyperbolic_punctured_disk()
    z0 = 0.5 + 0j
    path = hm.PathPolyline(z0 + 0.3 * (np.exp(1j * np.linspace(0, 1.2, 13)) - 1))
    out = hm.reconstruct_developing_map(S, z0, float(d(z0)), density_dz(d, z0), path)
    assert out.density() == pytest.approx(d(path.vertices), rel=1e-6)


def test_reconstruct_agard_branch():
    S = hm.SchwarzianField.twice_punctured_plane()
    d = hm.agard_metric()
    z0 = 0.5 + 0j
    path = hm.PathPolyline(np.linspace(0.5, 0.1, 9) + 0j)
    out = hm.reconstruct_developing_map(S, z0, float(d(z0)), density_dz(d, z0), path, rotation=-1.0)
    assert np.max(np.abs(out.f - hm.developing_map(path.vertices))) < 1e-6


def test_reconstruct_errors():
    S = hm.SchwarzianField.constant(0.0)
    path = hm.PathPolyline(np.array([0.1, 0.5]) + 0j)
    with pytest.raises(ParameterError):
        hm.reconstruct_developing_map(S, 0j, 2.0, 0j, path)
    with pytest.raises(ParameterError):
        hm.reconstruct_developing_map(S, 0.1, -1.0, 0j, path)
    # w2 = 1 - z vanishes at z = 1 on this path
    with pytest.raises(ReconstructionError):
        hm.reconstruct_developing_map(S, 0j, 2.0, 2.0, hm.PathPolyline(np.array([0, 1.0]) + 0j))


def test_samples_to_dict():
    S = hm.SchwarzianField.constant(0.0)
    out = hm.reconstruct_developing_map(S, 0j, 2.0, 0j, hm.PathPolyline(np.array([0, 0.5]) + 0j))
    data = out.to_dict()
    assert data["density"][1] == pytest.approx(hm.hyperbolic_disk()(0.5))
