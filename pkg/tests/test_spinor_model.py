from __future__ import annotations

import math

import numpy as np
import pytest

from radial_dirac.errors import ConfigurationError, DomainError
from radial_dirac.radial_grid import make_grid
from radial_dirac.spinor_model import (
    Honeycomb,
    ModelSpec,
    PurePower,
    Soler,
    SpinorField,
    Zero,
    eval_nonlinearity,
    gauge_residual,
    local_l2,
    norms,
    parity_of,
    power_bound_ratio,
    reconstruct_cartesian,
    strauss_ratio,
)

GRID = make_grid(40.0, 4096)
SMALL = make_grid(10.0, 256)
ALL_MODELS = [Zero(), Honeycomb(2.0, 1.0, 1.0), Soler(1.0), PurePower(1.0, 3), PurePower(0.5, 5), PurePower(1.0, 4.5)]


def gaussian_demo(grid=GRID):
    z = np.zeros(grid.n)
    return SpinorField(grid, 0.1 * grid.nodes * np.exp(-grid.nodes**2), z, z, z)


def random_field(rng, grid=SMALL, S=1):
    r = grid.nodes
    comps = []
    for k in (S, S, S + 1, S + 1):
        c = rng.normal()
        b = rng.uniform(0.3, 2.0)
        r0 = rng.uniform(0.0, 3.0)
        comps.append(c * r ** abs(k) * np.exp(-b * (r - r0) ** 2))
    return SpinorField(grid, *comps)


@pytest.mark.parametrize("S", [0, -1])
def test_excluded_vorticity(S):
    with pytest.raises(ConfigurationError):
        ModelSpec(0.0, S, Zero())


def test_purepower_exponent():
    with pytest.raises(ConfigurationError):
        PurePower(1.0, 1.5)


def test_parity():
    assert parity_of("p11", 1) == -1 and parity_of("p21", 1) == 1
    assert parity_of("p12", 2) == 1 and parity_of("p22", 2) == -1
    assert parity_of("p11", -2) == 1


def test_field_shape_checked():
    with pytest.raises(ValueError):
        SpinorField(SMALL, np.zeros(3), np.zeros(256), np.zeros(256), np.zeros(256))


def test_zero_nonlinearity():
    f = random_field(np.random.default_rng(1))
    w = eval_nonlinearity(ModelSpec(0.0, 1, Zero()), f)
    assert not np.any(w.as_array())


def test_honeycomb_single_term():
    g = make_grid(1.0, 16)
    f = SpinorField.zeros(g)
    f.p11[3] = 1.0
    w = eval_nonlinearity(ModelSpec(0.0, 1, Honeycomb(1.0, 0.0, 1.0)), f)
    assert w.w11[3] == 1.0
    assert w.w21[3] == 0.0 and w.w22[3] == 0.0 and w.w12[3] == 0.0


def test_soler_balanced():
    g = make_grid(1.0, 16)
    f = SpinorField.zeros(g)
    f.p11[0] = 1.0
    f.p22[0] = 1.0
    w = eval_nonlinearity(ModelSpec(0.0, 1, Soler(1.0)), f)
    assert np.all(w.as_array() == 0)


def test_honeycomb_formula():
    f = random_field(np.random.default_rng(2))
    b1, b2, g = 2.0, 0.7, -1.3
    w = eval_nonlinearity(ModelSpec(0.0, 1, Honeycomb(b1, b2, g)), f)
    a1 = f.p11**2 + f.p12**2
    a2 = f.p21**2 + f.p22**2
    assert np.allclose(w.w12, g * (b1 * a1 + b2 * a2) * f.p12, rtol=1e-14, atol=0)
    assert np.allclose(w.w21, g * (b2 * a1 + b1 * a2) * f.p21, rtol=1e-14, atol=0)


@pytest.mark.parametrize("nl", ALL_MODELS, ids=lambda m: m.describe())
def test_gauge_random(nl):
    rng = np.random.default_rng(3)
    model = ModelSpec(0.0, 1, nl)
    worst = 0.0
    for _ in range(1000):
        sample = rng.uniform(-1, 1, 4)
        theta = rng.uniform(0, 2 * np.pi)
        S = int(rng.choice([1, 2, 3, -2, -3, 5]))
        worst = max(worst, gauge_residual(model, sample, theta, S))
    assert worst < 1e-12


def test_gauge_examples():
    assert gauge_residual(ModelSpec(0.0, 1, Honeycomb()), (0.3, -0.4, 0.9, 0.1), 0.7, 1) < 1e-14
    assert gauge_residual(ModelSpec(0.0, 1, PurePower(1.0, 3)), (1, 0.5, -0.2, 0.3), 2.1, 2) < 1e-14
    assert gauge_residual(ModelSpec(0.0, 1, Zero()), (1, 2, 3, 4), 1.0, 1) == 0.0


@pytest.mark.parametrize("nl", [Honeycomb(2.0, 1.0, 1.0), Soler(1.0), PurePower(1.0, 3), PurePower(1.0, 5)])
def test_odd_under_negation(nl):
    f = random_field(np.random.default_rng(4))
    model = ModelSpec(0.0, 1, nl)
    a = eval_nonlinearity(model, f).as_array()
    b = eval_nonlinearity(model, f.scaled(-1.0)).as_array()
    assert np.allclose(a, -b, rtol=0, atol=1e-15)


def test_power_bound_examples():
    f = random_field(np.random.default_rng(5))
    f = f.scaled(0.1 / math.sqrt(f.modulus_sq().max()))
    assert power_bound_ratio(ModelSpec(0.0, 1, Honeycomb(1.0, 1.0, 1.0)), f) <= 2.0
    assert power_bound_ratio(ModelSpec(0.0, 1, Zero()), f) == 0.0
    assert power_bound_ratio(ModelSpec(0.0, 1, PurePower(1.0, 5)), f) <= math.sqrt(2) * (1 + 1e-12)


def test_power_bound_domain():
    f = random_field(np.random.default_rng(6))
    f = f.scaled(2.0 / math.sqrt(f.modulus_sq().max()))
    with pytest.raises(DomainError):
        power_bound_ratio(ModelSpec(0.0, 1, Honeycomb()), f)


def test_power_bound_scale_stable():
    f = random_field(np.random.default_rng(7))
    f = f.scaled(0.5 / math.sqrt(f.modulus_sq().max()))
    model = ModelSpec(0.0, 1, PurePower(1.0, 5))
    ref = power_bound_ratio(model, f)
    for a in (1.0, 0.5, 0.1, 0.01):
        assert power_bound_ratio(model, f.scaled(a)) == pytest.approx(ref, rel=1e-12)


def test_norms_zero_field():
    n = norms(SpinorField.zeros(SMALL))
    assert (n.l2_rdr, n.h1_rdr, n.e_delta, n.l_inf) == (0.0, 0.0, 0.0, 0.0)


def test_norms_gaussian_mass():
    assert norms(gaussian_demo()).l2_rdr ** 2 == pytest.approx(0.00125, abs=1e-9)


def test_norms_delta_zero():
    f = gaussian_demo()
    n = norms(f, 0.0)
    grad = math.sqrt(n.h1_rdr**2 - n.l2_rdr**2)
    assert n.e_delta == pytest.approx(n.l2_rdr + grad, rel=1e-12)
    with pytest.raises(ValueError):
        norms(f, -0.1)


def test_norms_triangle_and_homogeneity():
    rng = np.random.default_rng(8)
    for _ in range(20):
        u, v = random_field(rng), random_field(rng)
        s = SpinorField.from_array(SMALL, u.as_array() + v.as_array())
        nu, nv, ns = norms(u), norms(v), norms(s)
        for k in ("l2_rdr", "h1_rdr", "e_delta", "l_inf"):
            assert getattr(ns, k) <= getattr(nu, k) + getattr(nv, k) + 1e-12
        a = rng.uniform(-3, 3)
        na = norms(u.scaled(a))
        for k in ("l2_rdr", "h1_rdr", "e_delta", "l_inf"):
            assert getattr(na, k) == pytest.approx(abs(a) * getattr(nu, k), rel=1e-12, abs=1e-12)


def test_local_l2():
    f = gaussian_demo()
    assert local_l2(SpinorField.zeros(GRID), 5.0) == 0.0
    assert local_l2(f, 40.0) == pytest.approx(norms(f).l2_rdr, abs=1e-12)
    with pytest.raises(ValueError):
        local_l2(f, 41.0)
    with pytest.raises(ValueError):
        local_l2(f, 0.0)


def test_local_l2_constant():
    g = make_grid(10.0, 1000)
    c = 0.3
    f = SpinorField(g, np.full(1000, math.sqrt(c)), np.zeros(1000), np.zeros(1000), np.zeros(1000))
    assert local_l2(f, 5.0) == pytest.approx(math.sqrt(c * 25 / 2), rel=1e-12)


def test_strauss_gaussian():
    z = np.zeros(GRID.n)
    f = SpinorField(GRID, np.exp(-GRID.nodes**2), z, z, z)
    expected = math.sqrt(0.5) * math.exp(-0.25) / math.sqrt(1.5 * math.pi)
    assert expected == pytest.approx(0.2537, abs=1e-4)
    assert strauss_ratio(f) == pytest.approx(expected, rel=1e-3)
    assert strauss_ratio(f.scaled(2.0)) == pytest.approx(strauss_ratio(f), rel=1e-14)


def test_strauss_zero_field():
    with pytest.raises(DomainError):
        strauss_ratio(SpinorField.zeros(SMALL))


def test_strauss_bound_random():
    rng = np.random.default_rng(9)
    grid = make_grid(20.0, 2048)
    ratios = [strauss_ratio(random_field(rng, grid)) for _ in range(100)]
    assert max(ratios) <= 1 / math.sqrt(2 * math.pi)


def test_reconstruct_cartesian():
    f = random_field(np.random.default_rng(10))
    theta, psi = reconstruct_cartesian(f, 1, 8)
    phi1 = f.p11 + 1j * f.p12
    phi2 = f.p21 + 1j * f.p22
    assert np.allclose(psi[:, 0, 0], phi1) and np.allclose(psi[:, 0, 1], 1j * phi2)
    assert np.allclose(np.abs(psi[..., 0]), np.abs(phi1)[:, None])
    k = int(np.argmin(np.abs(theta - np.pi)))
    assert np.allclose(psi[:, k, 0], -phi1)
    with pytest.raises(ValueError):
        reconstruct_cartesian(f, 1, 3)
