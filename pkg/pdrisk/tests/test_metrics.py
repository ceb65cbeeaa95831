from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from pdrisk.densities import (
    DimensionMismatchError,
    GammaLaw,
    PointMass,
    SmnDensity,
    SumLaw,
    normal,
    student_t,
    student_t_pdf,
)
from pdrisk.metrics import (
    L1Dual,
    L2Integrated,
    ReflectedNormal,
    ReflectedSmn,
    l1_distance,
    l1_dual_loss,
    l2_dual_constants,
    l2_general_distance,
    l2_normal_distance,
    l2_plugin_loss_normal,
    loss_from_spec,
    normal_product_integral,
    point_loss,
    reflected_normal_loss,
    reflected_smn_loss,
)
from pdrisk.sim.oracles import quadrature_loss_oracle, shifted


def test_normal_product_integral_examples() -> None:
    assert normal_product_integral(0.0, 1.0, 0.0, 1.0, 1) == pytest.approx(0.2820948, abs=1e-7)
    assert normal_product_integral([0.0, 0.0], 1.0, [1.0, 0.0], 1.0, 2) == pytest.approx(0.0619704, abs=1e-7)
    assert normal_product_integral(0.0, 1.0, 60.0, 1.0, 1) == pytest.approx(0.0, abs=1e-300)


def test_normal_product_integral_matches_quadrature() -> None:
    from scipy import integrate

    # phi((y - mu)/s) is the unnormalized kernel, so no 1/s factors appear
    value, _ = integrate.quad(
        lambda y: stats.norm.pdf(y / math.sqrt(2.0)) * stats.norm.pdf((y - 0.7) / math.sqrt(0.5)), -30, 30
    )
    assert normal_product_integral(0.0, 2.0, 0.7, 0.5, 1) == pytest.approx(value, rel=1e-10)


def test_l2_normal_distance_examples() -> None:
    assert l2_normal_distance([1.0, 2.0], 1.5, [1.0, 2.0], 1.5, 2) == pytest.approx(0.0, abs=1e-15)
    assert l2_normal_distance(0.0, 1.0, 1.0, 1.0, 1) == pytest.approx(0.1248, abs=1e-4)
    assert l2_normal_distance([0.0, 0.0], 1.0, [0.0, 0.0], 2.0, 2) == pytest.approx(0.013263, abs=1e-6)


def test_l2_normal_distance_is_symmetric() -> None:
    a = l2_normal_distance([0.2, -1.0, 0.5], 0.8, [1.0, 0.0, 0.0], 2.5, 3)
    b = l2_normal_distance([1.0, 0.0, 0.0], 2.5, [0.2, -1.0, 0.5], 0.8, 3)
    assert a == pytest.approx(b, rel=1e-14)


def test_l2_normal_distance_rejects_nonpositive_variance() -> None:
    with pytest.raises(ValueError, match="positive"):
        l2_normal_distance(0.0, 0.0, 0.0, 1.0, 1)


def test_l2_general_distance_agrees_with_normal_formula() -> None:
    f = normal(3, 2.0)
    q = normal(3, 1.0)
    s = np.array([0.4, -1.2, 0.3])
    expected = l2_normal_distance(np.zeros(3), 1.0, s, 2.0, 3)
    assert l2_general_distance(f, q, s) == pytest.approx(expected, abs=1e-10)


def test_l2_general_distance_zero_for_identical_densities() -> None:
    q = student_t(2, 5.0)
    assert l2_general_distance(q, q, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


def test_l2_general_distance_student_matches_grid_quadrature() -> None:
    q = student_t(2, 5.0, 1.0)
    step = 0.02
    axis = np.arange(-15.0, 15.0 + step / 2, step)
    xs, ys = np.meshgrid(axis, axis, indexing="ij")
    points = np.column_stack([xs.ravel(), ys.ravel()])
    shifted = points - np.array([1.0, 0.0])
    diff = student_t_pdf(2, 5.0, 1.0, points) - student_t_pdf(2, 5.0, 1.0, shifted)
    oracle = float(np.sum(diff * diff) * step * step)
    assert l2_general_distance(q, q, [1.0, 0.0]) == pytest.approx(oracle, abs=1e-4)


def test_l2_general_distance_distinct_gamma_mixings() -> None:
    # exponential variance mixing in one dimension is the Laplace law with b = sqrt(scale / 2)
    f = SmnDensity(dim=1, mixing=GammaLaw(shape=1.0, scale=1.0))
    q = SmnDensity(dim=1, mixing=GammaLaw(shape=1.0, scale=2.0))
    b1, b2 = math.sqrt(0.5), 1.0
    exact = 1 / (4 * b1) + 1 / (4 * b2) - 1 / (b1 + b2)
    assert l2_general_distance(f, q, [0.0]) == pytest.approx(exact, abs=1e-9)
    for s in (0.0, 0.5, 1.5):
        oracle = quadrature_loss_oracle(shifted(f, [s]), shifted(q), 2, 1, step=0.005, radius=40.0)
        assert l2_general_distance(f, q, [s]) == pytest.approx(oracle, abs=1e-6)


def test_l2_general_distance_rejects_dimension_mismatch() -> None:
    with pytest.raises(DimensionMismatchError):
        l2_general_distance(normal(1), normal(2), [0.0])


def test_l2_general_distance_symmetries() -> None:
    f = student_t(2, 3.0, 1.5)
    q = normal(2, 0.5)
    s = np.array([0.9, 0.4])
    base = l2_general_distance(f, q, s)
    assert l2_general_distance(q, f, s) == pytest.approx(base, rel=1e-12)
    assert l2_general_distance(f, q, -s) == pytest.approx(base, rel=1e-12)


def test_l1_distance_examples() -> None:
    assert l1_distance(normal(1), 0.0) == pytest.approx(0.0, abs=1e-15)
    for p in (1, 3, 6):
        assert l1_distance(normal(p), 2.0) == pytest.approx(1.3653789, abs=1e-7)
    assert l1_distance(normal(2), 80.0) == pytest.approx(2.0, abs=1e-12)


def test_l1_distance_matches_direct_quadrature() -> None:
    from scipy import integrate

    value, _ = integrate.quad(lambda y: abs(stats.norm.pdf(y) - stats.norm.pdf(y - 2.0)), -20, 20, points=[1.0])
    assert l1_distance(normal(1), 2.0) == pytest.approx(value, abs=1e-9)


def test_l1_distance_is_concave_in_squared_separation() -> None:
    squared = np.geomspace(1e-3, 50.0, 40)
    for density in (normal(2), student_t(2, 3.0)):
        values = np.asarray(l1_distance(density, np.sqrt(squared)))
        slopes = np.diff(values) / np.diff(squared)
        assert np.all(np.diff(slopes) <= 1e-10)
        assert np.all(np.diff(values) >= 0)


def test_reflected_normal_loss_examples() -> None:
    assert reflected_normal_loss(2.0, [1.0, 1.0], [1.0, 1.0]) == 0.0
    assert reflected_normal_loss(2.0, [2.0, 0.0], [0.0, 0.0]) == pytest.approx(1 - math.exp(-1), abs=1e-12)
    assert reflected_normal_loss(2.0, [1e3, 0.0], [0.0, 0.0]) == pytest.approx(1.0)


def test_l2_plugin_loss_examples() -> None:
    assert l2_plugin_loss_normal([0.5], [0.5], 1.0, 1.0, 1) == pytest.approx(0.0, abs=1e-15)
    assert l2_plugin_loss_normal(1.0, 0.0, 1.0, 1.0, 1) == pytest.approx(0.1248, abs=1e-4)
    assert l2_plugin_loss_normal(1.0, 0.0, 1e12, 2.0, 3) == pytest.approx(
        2.0**-1.5 * (4 * math.pi) ** -1.5, rel=1e-6
    )


def test_l2_loss_is_affine_in_reflected_normal_loss() -> None:
    rng = np.random.default_rng(4)
    mu = np.array([1.0, -0.5, 2.0])
    draws = mu + rng.standard_normal((500, 3)) * math.sqrt(0.7)
    c2, var_y = 1.6, 0.8
    a, b, gamma = l2_dual_constants(c2, var_y, 3)
    density_loss = l2_plugin_loss_normal(draws, mu, c2, var_y, 3)
    dual = a + b * reflected_normal_loss(gamma, draws, mu)
    np.testing.assert_allclose(density_loss, dual, rtol=1e-12, atol=1e-15)


def test_reflected_smn_loss_reduces_to_reflected_normal() -> None:
    d, mu = [0.3, 1.0], [0.0, 0.0]
    expected = (2 * math.pi * 1.5) ** -1 * reflected_normal_loss(1.5, d, mu)
    assert reflected_smn_loss(PointMass(value=1.5), 2, d, mu) == pytest.approx(expected, rel=1e-12)


def test_reflected_smn_loss_vanishes_at_truth() -> None:
    law = SumLaw(terms=(PointMass(value=1.0), PointMass(value=1.0), PointMass(value=1.0)))
    assert reflected_smn_loss(law, 3, [1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(0.0, abs=1e-15)


def test_reflected_smn_loss_matches_monte_carlo() -> None:
    rng = np.random.default_rng(21)
    t = rng.gamma(4.0, 1.0, 400_000)
    draws = (2 * math.pi * t) ** -1.5 * -np.expm1(-1.0 / (2 * t))
    se = draws.std(ddof=1) / math.sqrt(draws.size)
    value = reflected_smn_loss(GammaLaw(shape=4.0), 3, [1.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    assert abs(value - draws.mean()) < 3 * se


def test_reflected_smn_loss_is_concave_in_squared_separation() -> None:
    squared = np.geomspace(1e-3, 40.0, 30)
    points = np.column_stack([np.sqrt(squared), np.zeros_like(squared)])
    values = np.asarray(reflected_smn_loss(GammaLaw(shape=3.0), 2, points, [0.0, 0.0]))
    slopes = np.diff(values) / np.diff(squared)
    assert np.all(np.diff(slopes) <= 1e-10)


def test_l1_dual_loss_examples() -> None:
    law = PointMass(value=1.0)
    assert l1_dual_loss(law, [0.0], [0.0]) == 0.0
    assert l1_dual_loss(law, [2.0], [0.0]) == pytest.approx(0.6826895, abs=1e-7)
    assert l1_dual_loss(law, [2.0], [0.0]) == pytest.approx(l1_distance(normal(1), 2.0) / 2)
    assert l1_dual_loss(law, [500.0], [0.0]) == pytest.approx(1.0)


def test_point_loss_dispatch() -> None:
    d = np.array([[1.0, 0.0], [0.0, 2.0]])
    np.testing.assert_allclose(
        point_loss(ReflectedNormal(gamma=1.0), d, [0.0, 0.0]), reflected_normal_loss(1.0, d, [0.0, 0.0])
    )
    with pytest.raises(ValueError, match="compares densities"):
        point_loss(L2Integrated(), d, [0.0, 0.0])


def test_loss_specs_round_trip() -> None:
    specs = [
        {"kind": "l2"},
        {"kind": "reflected_normal", "gamma": 2.0},
        {"kind": "reflected_smn", "dim": 3, "mixing": {"kind": "gamma", "shape": 3.0, "scale": 1.0}},
        {"kind": "l1_dual", "mixing": {"kind": "point", "value": 1.0}},
    ]
    for spec in specs:
        loss = loss_from_spec(spec)
        assert loss_from_spec(loss.to_spec()) == loss
    assert isinstance(loss_from_spec(specs[-1]), L1Dual)


def test_reflected_normal_rejects_nonpositive_gamma() -> None:
    with pytest.raises(ValidationError):
        ReflectedNormal(gamma=0.0)


def test_reflected_smn_normalization_matches_inverse_moment() -> None:
    loss = ReflectedSmn(mixing=GammaLaw(shape=4.0), dim=3)
    expected = (2 * math.pi) ** -1.5 * GammaLaw(shape=4.0).negative_moment(1.5)
    assert loss.normalization == pytest.approx(expected, rel=1e-6)
