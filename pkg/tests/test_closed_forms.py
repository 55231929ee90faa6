import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import hypmetric as hm
from hypmetric.closed_forms import RADIAL_VARIANTS, RadialMetricFamily, radial_density
from hypmetric.errors import ParameterError


def test_radial_examples():
    assert radial_density(RadialMetricFamily("disk"))(0) == pytest.approx(2)
    ann = hm.hyperbolic_annulus(math.exp(-2), 1.0)
    assert ann(math.exp(-1)) == pytest.approx(math.pi * math.e / 2)
    assert hm.hyperbolic_exterior(1.0)(math.e) == pytest.approx(1 / math.e)


@pytest.mark.parametrize("kw", [dict(variant="annulus", r=1.0, R=1.0), dict(variant="disk", R=-1.0),
                                dict(variant="punctured-disk-alpha", alpha=1.0), dict(variant="nope")])
def test_radial_invalid(kw):
    with pytest.raises(ParameterError):
        RadialMetricFamily(**kw)


@given(st.sampled_from(RADIAL_VARIANTS), st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
def test_radial_curvature_is_minus_one(variant, s, t):
    fam = RadialMetricFamily(variant, R=1.0, r=0.1 if variant == "annulus" else 0.0, alpha=0.6)
    lo, hi = (0.1, 1.0) if variant == "annulus" else ((1.0, 4.0) if variant.startswith("exterior") else (0.0, 1.0))
    z = (lo + s * (hi - lo)) * np.exp(1j * t)
    assert hm.curvature_estimate(radial_density(fam), z) == pytest.approx(-1, abs=1e-4)


def test_annulus_degenerates_to_punctured_disk():
    z = 0.3 + 0.2j
    target = hm.hyperbolic_punctured_disk()(z)
    errs = [abs(hm.hyperbolic_annulus(r, 1.0)(z) - target) for r in (1e-3, 1e-6)]
    assert errs[1] < errs[0]


def test_alpha_family_bracket():
    z = 0.4 + 0.1j
    a = [radial_density(RadialMetricFamily("punctured-disk-alpha", alpha=x))(z) for x in (1 - 1e-4, 1 + 1e-4)]
    r = abs(z)
    limit = 2 / (1 - r**2)
    assert a == pytest.approx([limit, limit], rel=1e-3)


def test_minda_schober_curvature_limit():
    eps = 1 / 6
    k = hm.minda_schober_curvature(1e-12, eps)
    assert k == pytest.approx(-1 / (36 * eps**2), rel=1e-3)
    z = 0.3 + 0.7j
    fd = hm.curvature_estimate(hm.minda_schober_density(eps), z, 1e-4)
    assert fd == pytest.approx(float(hm.minda_schober_curvature(z, eps)), rel=1e-5)
    assert hm.curvature_bound_ok(0.05)


def test_conical_reductions():
    from hypmetric.closed_forms import _conical_finite

    z = np.array([0.2, 0.5j, -0.7 + 0.1j])
    assert _conical_finite(0j, 0.0, 1.0)(z) == pytest.approx(hm.hyperbolic_disk()(z))
    assert _conical_finite(0j, 1.0, 1.0)(z) == pytest.approx(hm.hyperbolic_punctured_disk()(z))


def test_conical_params_validation():
    with pytest.raises(ParameterError):
        hm.ConicalParams((0j, 0.5), (0.0, 1.0, 1.0), delta=0.4)
    with pytest.raises(ParameterError):
        hm.ConicalParams((0j, 0.3), (1.0, 1.0, 1.0), delta=0.4)


def test_conical_alpha_half():
    p = hm.ConicalParams((0j, 0.6j), (0.5, 1.0, 1.0), delta=0.5)
    d = hm.conical_densities(p)[0]
    z = 0.25
    b = 0.5
    expected = 2 * b * 0.5**b * z**-0.5 / (0.5 ** (2 * b) - z ** (2 * b))
    assert d(z) == pytest.approx(expected)


def test_robinson_local_behaviour():
    pts, orders = [0j, 1 + 0j], [0.8, 0.8, 0.8]
    d = hm.robinson_density(pts, orders, eps=0.1, delta=0.5)
    from hypmetric.closed_forms import robinson_local_factors

    f = robinson_local_factors(d, pts, orders, [1e-4, 1e-6, 1e-8])
    assert np.all(np.abs(np.diff(f, axis=1)) < 1e-2 * f[:, 1:])
