from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError
from scipy import integrate, optimize, stats

from pdrisk.densities import InverseGammaLaw, PointMass, normal, student_t
from pdrisk.estimators import (
    Baranchik,
    Identity,
    ImpossibleDataError,
    JamesStein,
    LinearShrink,
    PointEstimator,
    PositivePartJS,
    RestrictedBayesTable,
    RestrictedBayesUniform,
    RestrictedMle,
    eval_predictive,
    exp_location_mre,
    mre_estimator,
    normal_prior_bayes,
    plugin,
    point_estimate,
    register_shrinkage_function,
    restricted_bayes_point,
    uniform_mre,
    uniform_mre_kernel,
)
from pdrisk.metrics import L1Dual, L2Integrated, ReflectedNormal


def test_identity_and_linear_rules() -> None:
    np.testing.assert_allclose(point_estimate(Identity(), [1.0, -2.0]), [1.0, -2.0])
    np.testing.assert_allclose(point_estimate(LinearShrink(a=0.5), [2.0, 2.0]), [1.0, 1.0])
    np.testing.assert_allclose(point_estimate(LinearShrink(a=0.5, offset=(1.0, -1.0)), [2.0, 2.0]), [2.0, 0.0])


def test_james_stein_example() -> None:
    np.testing.assert_allclose(point_estimate(JamesStein(sigma2=1.0), [3.0, 0.0, 0.0]), [8.0 / 3.0, 0.0, 0.0])


def test_james_stein_is_baranchik_with_unit_shrinkage() -> None:
    rng = np.random.default_rng(1)
    x = rng.standard_normal((50, 5)) * 2.0
    np.testing.assert_allclose(
        JamesStein(sigma2=1.5).estimate(x), Baranchik(a=4.5, r="one").estimate(x), rtol=1e-14
    )


def test_james_stein_needs_three_dimensions() -> None:
    with pytest.raises(ValueError, match="at least 3"):
        point_estimate(JamesStein(sigma2=1.0), [1.0, 2.0])


def test_baranchik_at_origin_returns_origin() -> None:
    np.testing.assert_allclose(point_estimate(Baranchik(a=2.0, r="t_over_1pt"), [0.0, 0.0, 0.0]), 0.0)
    np.testing.assert_allclose(point_estimate(Baranchik(a=2.0), [0.0, 0.0, 0.0]), 0.0)


def test_baranchik_smooth_shrinkage_values() -> None:
    x = np.array([1.0, 1.0, 0.0, 0.0])
    expected = (1.0 - 1.5 * (2.0 / 3.0) / 2.0) * x
    np.testing.assert_allclose(point_estimate(Baranchik(a=1.5, r="t_over_1pt"), x), expected)


def test_positive_part_js_never_flips_sign() -> None:
    x = np.array([[0.1, 0.2, 0.1], [5.0, 0.0, 0.0]])
    out = PositivePartJS(sigma2=1.0).estimate(x)
    np.testing.assert_allclose(out[0], 0.0)
    np.testing.assert_allclose(out[1], [4.8, 0.0, 0.0])


def test_shrinkage_registry_validation() -> None:
    with pytest.raises(ValueError, match="nondecreasing"):
        register_shrinkage_function("decreasing", lambda t: 1.0 / (1.0 + t))
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        register_shrinkage_function("too_big", lambda t: np.full_like(t, 1.5))
    with pytest.raises(ValueError, match="nonincreasing"):
        register_shrinkage_function("convex", lambda t: np.minimum(t * t, 1.0))
    register_shrinkage_function("capped", lambda t: np.minimum(t, 1.0))
    assert Baranchik(a=1.0, r="capped").r == "capped"


def test_baranchik_rejects_unknown_shrinkage_name() -> None:
    with pytest.raises(ValidationError, match="unknown shrinkage"):
        Baranchik(a=1.0, r="missing")


def test_point_estimator_specs_round_trip() -> None:
    adapter = TypeAdapter(PointEstimator)
    rules = [
        Identity(),
        LinearShrink(a=0.25, offset=(0.5, 1.0)),
        Baranchik(a=1.5, r="t_over_1pt"),
        JamesStein(sigma2=2.0),
        PositivePartJS(sigma2=1.0),
        RestrictedMle(lo=0.0),
        RestrictedBayesUniform(lo=-1.0, hi=1.0, loss=ReflectedNormal(gamma=2.0), sigma2_x=1.0),
    ]
    for rule in rules:
        assert adapter.validate_python(rule.to_spec()) == rule
    assert adapter.validate_python({"kind": "baranchik", "a": 1.5, "r": "one"}) == Baranchik(a=1.5)


def test_restricted_mle_projects() -> None:
    out = RestrictedMle(lo=0.0, hi=2.0).estimate(np.array([[-1.0], [1.0], [3.0]]))
    np.testing.assert_allclose(out[:, 0], [0.0, 1.0, 2.0])


def test_interval_rules_reject_empty_interval() -> None:
    with pytest.raises(ValidationError):
        RestrictedMle(lo=1.0, hi=1.0)


def test_restricted_bayes_unbounded_returns_x() -> None:
    x = np.array([-3.0, 0.0, 2.5])
    np.testing.assert_allclose(
        restricted_bayes_point(x, -math.inf, math.inf, ReflectedNormal(gamma=1.0), 1.0), x
    )


def test_restricted_bayes_half_line_at_zero_is_positive() -> None:
    assert restricted_bayes_point(0.0, 0.0, math.inf, ReflectedNormal(gamma=2.0), 1.0) > 0.0


def _brute_force_bayes(x: float, lo: float, hi: float, gamma: float) -> float:
    # root of the derivative of the posterior expected loss
    def slope(d: float) -> float:
        value, _ = integrate.quad(
            lambda mu: (d - mu) * math.exp(-((d - mu) ** 2) / (2 * gamma)) * stats.norm.pdf(x - mu),
            lo, hi, epsabs=1e-15, epsrel=1e-12, limit=200,
        )
        return value

    return optimize.brentq(slope, lo, hi, xtol=1e-12)


@pytest.mark.parametrize("x", [-1.5, 0.3, 2.0])
def test_restricted_bayes_matches_brute_force(x: float) -> None:
    value = restricted_bayes_point(x, 0.0, 20.0, ReflectedNormal(gamma=2.0), 1.0)
    assert value == pytest.approx(_brute_force_bayes(x, 0.0, 20.0, 2.0), abs=1e-6)


def test_restricted_bayes_boundary_attraction() -> None:
    value = restricted_bayes_point(30.0, -1.0, 1.0, ReflectedNormal(gamma=2.0), 1.0)
    assert 0.95 < value <= 1.0


@pytest.mark.parametrize("loss", [ReflectedNormal(gamma=1.5), L1Dual(mixing=PointMass(value=2.0))])
def test_restricted_bayes_is_monotone_and_stays_in_interval(loss) -> None:
    grid = np.linspace(-6.0, 6.0, 61)
    values = np.asarray(restricted_bayes_point(grid, -1.0, 1.0, loss, 1.0))
    assert np.all(np.diff(values) >= -1e-7)
    assert values.min() >= -1.0 and values.max() <= 1.0


def test_restricted_bayes_rejects_density_loss() -> None:
    with pytest.raises(ValueError, match="point loss"):
        restricted_bayes_point(0.0, 0.0, 1.0, L2Integrated(), 1.0)


def test_restricted_bayes_table_matches_exact_solution() -> None:
    table = RestrictedBayesTable(0.0, math.inf, ReflectedNormal(gamma=2.0), 1.0)
    x = np.array([-9.0, -2.0, -0.0025, 0.7, 3.3, 25.0])
    np.testing.assert_allclose(
        table(x), restricted_bayes_point(x, 0.0, math.inf, ReflectedNormal(gamma=2.0), 1.0), atol=1e-5
    )


def test_restricted_bayes_rule_needs_one_dimension() -> None:
    rule = RestrictedBayesUniform(lo=0.0, loss=ReflectedNormal(gamma=1.0), sigma2_x=1.0)
    with pytest.raises(ValueError, match="one dimension"):
        rule.estimate(np.zeros((2, 2)))


def test_mre_normal_is_normal_with_summed_variance() -> None:
    d = mre_estimator(normal(3, 1.0), normal(3, 1.0))
    assert d.base.mixing == PointMass(value=2.0)
    x = np.array([0.5, -1.0, 2.0])
    assert eval_predictive(d, x, x) == pytest.approx((4 * math.pi) ** -1.5, rel=1e-12)


def test_mre_cauchy_closure() -> None:
    d = mre_estimator(student_t(1, 1.0, 1.0), student_t(1, 1.0, 1.0))
    assert isinstance(d.base.mixing, InverseGammaLaw)
    assert d.base.mixing.shape == pytest.approx(0.5)
    assert d.base.mixing.scale == pytest.approx(2.0)


def test_normal_prior_bayes_example() -> None:
    d = normal_prior_bayes(1.0, 1.0, theta=0.0, tau2=1.0)
    assert d.base.mixing.value == pytest.approx(1.5)
    np.testing.assert_allclose(d.locate([3.0]), [[1.5]])


def test_normal_prior_bayes_limits() -> None:
    flat = normal_prior_bayes(1.0, 2.0, theta=[1.0, 1.0], tau2=math.inf)
    assert flat.base.mixing == PointMass(value=3.0)
    assert isinstance(flat.location, Identity)
    vague = normal_prior_bayes(1.0, 2.0, theta=[1.0, 1.0], tau2=1e12)
    np.testing.assert_allclose(vague.locate([4.0, -3.0]), [[4.0, -3.0]], atol=1e-9)
    assert vague.base.mixing.value == pytest.approx(3.0, rel=1e-9)
    dogmatic = normal_prior_bayes(1.0, 2.0, theta=[1.0, -1.0], tau2=1e-12)
    np.testing.assert_allclose(dogmatic.locate([4.0, -3.0]), [[1.0, -1.0]], atol=1e-9)
    assert dogmatic.base.mixing.value == pytest.approx(2.0, rel=1e-9)


def test_eval_predictive_location_equivariance() -> None:
    d = plugin(student_t(2, 4.0), scale=1.3)
    y, x, shift = np.array([0.4, 1.0]), np.array([-0.5, 2.0]), np.array([3.0, -7.0])
    assert eval_predictive(d, y + shift, x + shift) == pytest.approx(eval_predictive(d, y, x), rel=1e-12)


def test_eval_predictive_scale_doubling() -> None:
    one = plugin(normal(3), scale=1.0)
    two = plugin(normal(3), scale=2.0)
    x = np.zeros(3)
    assert eval_predictive(two, x, x) == pytest.approx(eval_predictive(one, x, x) / 8.0, rel=1e-12)


def test_eval_predictive_rows() -> None:
    d = plugin(normal(1))
    ys = np.array([[0.0], [1.0]])
    xs = np.array([[0.0], [0.0]])
    np.testing.assert_allclose(eval_predictive(d, ys, xs), stats.norm.pdf([0.0, 1.0]))


def test_predictive_density_integrates_to_one_in_two_dimensions() -> None:
    d = plugin(student_t(2, 5.0), location=Baranchik(a=0.5, r="t_over_1pt"), scale=1.4)
    x = np.array([1.0, -0.5])
    centre = d.locate(x)[0]
    step = 0.1
    axis = np.arange(-40.0, 40.0 + step / 2, step)
    gx, gy = np.meshgrid(axis + centre[0], axis + centre[1], indexing="ij")
    ys = np.column_stack([gx.ravel(), gy.ravel()])
    values = eval_predictive(d, ys, np.broadcast_to(x, ys.shape))
    assert float(values.sum() * step * step) == pytest.approx(1.0, abs=1e-3)


def test_exp_location_mre_examples() -> None:
    d = exp_location_mre(1, 1.0, 1.0)
    u = np.array([-2.0, -0.5, 0.0, 0.5, 3.0])
    np.testing.assert_allclose(d.pdf(u), 0.5 * np.exp(-np.abs(u)))
    other = exp_location_mre(4, 0.5, 2.0)
    assert other.pdf(0.0) == pytest.approx(1.0 / (4 * 0.5 + 2.0))
    mass, _ = integrate.quad(lambda t: other.pdf(t), -math.inf, 0.0)
    tail, _ = integrate.quad(lambda t: other.pdf(t), 0.0, math.inf)
    assert mass + tail == pytest.approx(1.0, rel=1e-10)
    assert other.cdf(0.0) == pytest.approx(mass, rel=1e-10)


def test_exp_location_mre_uses_sample_minimum() -> None:
    d = exp_location_mre(3, 1.0, 2.0)
    assert d.evaluate(1.5, [2.0, 0.5, 1.0]) == pytest.approx(d.pdf(1.0))
    with pytest.raises(ValueError, match="expected 3"):
        d.evaluate(0.0, [1.0])


def test_exp_location_mre_sampling_matches_cdf() -> None:
    d = exp_location_mre(2, 0.5, 1.5)
    draws = d.sample(np.random.default_rng(5), 200_000)
    assert np.mean(draws < 0.0) == pytest.approx(d.cdf(0.0), abs=0.005)
    assert np.mean(draws < 1.0) == pytest.approx(d.cdf(1.0), abs=0.005)


def test_uniform_mre_triangle_and_plateau() -> None:
    tri = uniform_mre(0.0, 0.0)
    assert tri.pdf(0.0) == pytest.approx(1.0)
    assert tri.pdf(-1.0) == 0.0 and tri.pdf(1.0) == 0.0
    assert tri.support == (-1.0, 1.0)
    assert uniform_mre_kernel(0.2, 0.5, 0.3) == pytest.approx(0.2 - 0.5 + 1.0)


def test_uniform_mre_normalizes() -> None:
    d = uniform_mre(0.2, 0.5)
    lo, hi = d.support
    mass, _ = integrate.quad(lambda y: d.pdf(y), lo, hi, points=[0.2, 0.5])
    assert mass == pytest.approx(1.0, rel=1e-10)
    assert d.cdf(hi) == pytest.approx(1.0)
    assert d.cdf(0.35) == pytest.approx(integrate.quad(lambda y: d.pdf(y), lo, 0.35, points=[0.2])[0], rel=1e-10)


def test_uniform_mre_rejects_impossible_range() -> None:
    with pytest.raises(ImpossibleDataError):
        uniform_mre(0.0, 1.2)
