from __future__ import annotations

import math

import numpy as np
import pytest

from radial_dirac.errors import ConfigurationError, DomainError
from radial_dirac.radial_grid import make_grid
from radial_dirac.weights import (
    Delta,
    HWeight,
    Strong,
    combo_gradient,
    combo_quadratic,
    eval_weight,
    m1_coefficient,
    verify_weight_identities,
    weight_from_name,
)

GRID = make_grid(40.0, 4096)


def test_strong_at_one():
    w = eval_weight(Strong(), 1.0)
    assert w.phi == pytest.approx(0.25, abs=1e-15)
    assert w.d1 == pytest.approx(0.5, abs=1e-15)
    assert w.d2 == pytest.approx(0.375, abs=1e-15)
    assert w.d3 == pytest.approx(-0.375, abs=1e-15)


def test_strong_hand_derivatives():
    r = np.linspace(0.1, 30, 200)
    w = eval_weight(Strong(), r)
    assert np.max(np.abs(w.d2 - 6 * r / (1 + r) ** 4)) < 1e-14
    assert np.max(np.abs(w.d3 - (6 - 18 * r) / (1 + r) ** 5)) < 1e-14


def test_delta_one_at_one():
    w = eval_weight(Delta(1.0), 1.0)
    assert w.phi == pytest.approx(0.25)
    assert w.d1 == pytest.approx(0.75)
    assert w.d1 - w.phi == pytest.approx(0.5)
    assert w.d1 - w.phi == pytest.approx(1 * (3 + 1) / 8)


def test_hweight_at_one():
    w = eval_weight(HWeight(), 1.0)
    assert w.phi == pytest.approx(0.125)
    assert w.d1 - w.phi == pytest.approx(-0.1875)
    assert combo_gradient(HWeight(), 1.0) == pytest.approx(-3 / 16)


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_eval_weight_rejects_nonpositive(r):
    with pytest.raises(DomainError):
        eval_weight(Strong(), r)


def test_weight_family_validation():
    with pytest.raises(ConfigurationError):
        weight_from_name("Cubic")
    with pytest.raises(ConfigurationError):
        Delta(-0.1)
    assert weight_from_name("delta", 0.3) == Delta(0.3)
    assert str(Delta(0.1)) == "Delta(0.1)"


def test_combo_gradient_values():
    assert combo_gradient(Strong(), 1.0) == pytest.approx(0.25)
    assert combo_gradient(Strong(), 1e-8) == pytest.approx(2e-16, rel=1e-6)


@pytest.mark.parametrize("K,expected", [(1, 1.25), (0, 0.25), (2, 4.25)])
def test_combo_quadratic_values(K, expected):
    assert combo_quadratic(Strong(), K, 1.0) == pytest.approx(expected, abs=1e-12)


def test_combo_quadratic_quotient():
    # (4K^2 (r+1)^3 - r^3 - 5r^2 + 17r - 3)/(1+r)^5 at r=1, K=1
    assert combo_quadratic(Strong(), 1, 1.0) == pytest.approx(40 / 32, abs=1e-12)


def test_m1_coefficient():
    assert m1_coefficient(1, 1.0, 0.0, 1.0) == 40
    assert m1_coefficient(1, 1.0, 0.1, 1.0) == pytest.approx(39.9984, abs=1e-12)
    assert m1_coefficient(0, 1.0, 0.0, 1.0) == pytest.approx(8.0)
    assert m1_coefficient(1, 1.0, 0.1, 2.0) == pytest.approx(40 - 8 * 1e-4 * 4)


@pytest.mark.parametrize("family", [Strong(), Delta(0.1), Delta(1.0)])
def test_weight_identities(family):
    rep = verify_weight_identities(family, GRID)
    assert rep.max_residual < 1e-10, rep.per_identity


def test_strong_fd_cross_check():
    assert verify_weight_identities(Strong(), GRID, fd_step=1e-3).fd_residual < 1e-6


@pytest.mark.parametrize("delta", [0.1, 1.0])
def test_delta_fd_cross_check_away_from_origin(delta):
    # r^(3+delta) has a singular fourth derivative at 0, so the FD oracle is used for r >= 0.5
    grid = make_grid(40.0, 80)
    rep = verify_weight_identities(Delta(delta), grid, fd_step=1e-3)
    assert rep.fd_residual < 1e-6


def test_delta_zero_reproduces_strong():
    a = eval_weight(Delta(0.0), GRID.nodes)
    b = eval_weight(Strong(), GRID.nodes)
    for k in ("phi", "d1", "d2", "d3"):
        assert np.max(np.abs(getattr(a, k) - getattr(b, k))) < 1e-10
    assert verify_weight_identities(Delta(0.0), GRID).max_residual < 1e-10


def test_hweight_has_no_quotient_identities():
    with pytest.raises(ConfigurationError):
        verify_weight_identities(HWeight(), GRID)


def test_fd_order_four_in_step():
    # Richardson-extrapolated central differences converge at order 4 in the step
    r = 2.0
    exact = eval_weight(Strong(), r).d3
    errs = []
    for h in (0.08, 0.04, 0.02):
        c = lambda hh: (eval_weight(Strong(), r + hh).d2 - eval_weight(Strong(), r - hh).d2) / (2 * hh)  # noqa: E731
        errs.append(abs((4 * c(h / 2) - c(h)) / 3 - exact))
    assert math.log2(errs[0] / errs[1]) > 3.8
    assert math.log2(errs[1] / errs[2]) > 3.8


def test_positivity_of_coefficients():
    r = np.concatenate([np.geomspace(1e-6, 1e4, 20000), [1.0, 3.0]])
    for K in (1, -1, 2, -2, 3, 5):
        assert np.all(combo_quadratic(Strong(), K, r) > 0)
    assert np.all(combo_gradient(Strong(), r) > 0)
    assert np.all(combo_gradient(Delta(0.1), r) > 0)
    assert np.all(combo_gradient(Delta(1.0), r) > 0)
    assert np.all(combo_gradient(HWeight(), r) < 0)


def test_m1_positive_on_grid():
    for S in (1, 2, -2, 3, -3):
        for eps in (0.0, 0.05, 0.1):
            assert np.all(m1_coefficient(S, GRID.nodes, eps, 1.0) > 0)


def test_scalar_and_array_agree():
    r = np.array([0.3, 1.7, 12.0])
    arr = eval_weight(Delta(0.4), r)
    for i, x in enumerate(r):
        s = eval_weight(Delta(0.4), float(x))
        assert s.d3 == pytest.approx(arr.d3[i], rel=1e-14)
