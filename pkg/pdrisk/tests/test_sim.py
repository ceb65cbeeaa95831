from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate, stats

from pdrisk.densities import GammaLaw, InverseGammaLaw, PointMass, normal, student_t
from pdrisk.densities.radial import RadialDensity
from pdrisk.estimators import (
    Baranchik,
    Identity,
    JamesStein,
    RestrictedBayesUniform,
    RestrictedMle,
    mre_estimator,
    normal_prior_bayes,
    plugin,
)
from pdrisk.estimators.predictive import PredictiveDensity
from pdrisk.metrics import (
    L1Dual,
    L1Integrated,
    L2Integrated,
    ReflectedNormal,
    l1_distance,
    l2_general_distance,
    l2_normal_distance,
)
from pdrisk.risk import NormalModel, bayes_risk_normal_prior, risk_mre_normal, risk_qc_derivative_normal
from pdrisk.sim import (
    CHUNK_SIZE,
    BoundaryDecayError,
    SimModel,
    UnreliableEstimateError,
    UnsupportedCombinationError,
    dominance_scan,
    importance_sample_dual,
    map_chunks,
    mc_bayes_risk,
    mc_risk,
    mc_risk_derivative_at_one,
    mc_risk_difference,
    normal_sim_model,
    overall_verdict,
    point_verdict,
    quadrature_loss_oracle,
    resolve_seed,
    shifted,
    standard_mu_grid,
    unbiasedness_check,
    universal_dominance_holds,
)
from pdrisk.sim.engine import per_draw_loss
from pdrisk.types import DominancePoint


def test_map_chunks_is_independent_of_thread_count() -> None:
    n = 2 * CHUNK_SIZE + 17

    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.standard_normal(size)

    serial = np.concatenate(map_chunks(draw, n, 5, threads=1))
    threaded = np.concatenate(map_chunks(draw, n, 5, threads=3))
    assert serial.shape == (n,)
    np.testing.assert_array_equal(serial, threaded)


def test_resolve_seed_keeps_explicit_seed() -> None:
    assert resolve_seed(42) == 42
    assert 0 <= resolve_seed(None) < 2**63


def test_oracle_identical_densities() -> None:
    q = shifted(normal(1))
    assert quadrature_loss_oracle(q, q, 2, 1) == pytest.approx(0.0, abs=1e-10)


def test_oracle_matches_normal_l2_distance() -> None:
    value = quadrature_loss_oracle(shifted(normal(1)), shifted(normal(1), 1.0), 2, 1, centre=0.5)
    assert value == pytest.approx(l2_normal_distance(0.0, 1.0, 1.0, 1.0, 1), abs=1e-6)


def test_oracle_l1_normal_pair() -> None:
    value = quadrature_loss_oracle(shifted(normal(1)), shifted(normal(1), 2.0), 1, 1, centre=1.0)
    assert value == pytest.approx(1.3653789, abs=1e-6)
    assert value == pytest.approx(l1_distance(normal(1), 2.0), abs=1e-6)


def test_oracle_two_dimensional_l2() -> None:
    value = quadrature_loss_oracle(
        shifted(normal(2, 1.0)), shifted(normal(2, 1.5), [0.7, -0.4]), 2, 2, centre=[0.35, -0.2], step=0.02
    )
    expected = l2_normal_distance([0.0, 0.0], 1.0, [0.7, -0.4], 1.5, 2)
    assert value == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_oracle_agrees_with_identities_on_random_cases(seed: int) -> None:
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, 3))
    offset = rng.uniform(-1.5, 1.5, size=p)
    if seed % 2:
        q = normal(p, float(rng.uniform(0.5, 2.0)))
        f = normal(p, float(rng.uniform(0.5, 2.0)))
        radius, tol = 18.0, 1e-14
    else:
        q = student_t(p, 5.0)
        f = student_t(p, 5.0, float(rng.uniform(0.8, 1.3)))
        radius, tol = (80.0 if p == 1 else 40.0), 1e-8
    step = 0.01 if p == 1 else 0.05
    grid = dict(step=step, radius=radius, boundary_tol=tol)
    l2 = quadrature_loss_oracle(shifted(q), shifted(f, offset), 2, p, centre=offset / 2, **grid)
    assert l2 == pytest.approx(l2_general_distance(f, q, offset), abs=1e-4)
    # along the first axis the kink of |q - q(. - s)| falls on grid nodes
    axis = np.zeros(p)
    axis[0] = float(np.linalg.norm(offset))
    l1 = quadrature_loss_oracle(shifted(q), shifted(q, axis), 1, p, centre=axis / 2, **grid)
    assert l1 == pytest.approx(l1_distance(q, axis[0]), abs=1e-4)


def test_oracle_rejects_slow_decay_and_high_dimension() -> None:
    wide = shifted(normal(1, 100.0))
    with pytest.raises(BoundaryDecayError) as info:
        quadrature_loss_oracle(wide, wide, 2, 1)
    assert info.value.radius == pytest.approx(12.0)
    with pytest.raises(ValueError, match="p <= 2"):
        quadrature_loss_oracle(wide, wide, 2, 3)


def test_mc_risk_of_mre_matches_minimax_risk() -> None:
    model = normal_sim_model(1, 1.0, 1.0)
    expected = risk_mre_normal(NormalModel(p=1, var_x=1.0, var_y=1.0))
    for mu in (0.0, 2.0, 5.0):
        estimate = mc_risk(model, mre_estimator(model.px, model.qy), L2Integrated(), mu, 100_000, 1)
        assert estimate.loss_id == "l2"
        assert estimate.estimator_id == "mre"
        assert estimate.within(expected, sigmas=4.0)


def test_mc_risk_l1_plugin_matches_quadrature() -> None:
    model = normal_sim_model(1, 1.0, 1.0)
    expected, _ = integrate.quad(
        lambda x: (4.0 * stats.norm.cdf(abs(x) / 2.0) - 2.0) * stats.norm.pdf(x), -12.0, 12.0, points=[0.0]
    )
    estimate = mc_risk(model, plugin(model.qy), L1Integrated(), 0.0, 100_000, 2)
    assert estimate.within(expected, sigmas=4.0)


def test_mc_risk_is_deterministic_across_threads() -> None:
    model = normal_sim_model(2, 1.0, 1.0)
    est = plugin(model.qy, scale=math.sqrt(2.0))
    n = 2 * CHUNK_SIZE + 3
    assert mc_risk(model, est, L2Integrated(), [1.0, 0.0], n, 9) == mc_risk(
        model, est, L2Integrated(), [1.0, 0.0], n, 9, threads=4
    )


def test_difference_of_estimator_with_itself_is_zero() -> None:
    model = normal_sim_model(2, 1.0, 1.0)
    est = plugin(model.qy)
    paired = mc_risk_difference(model, est, est, L2Integrated(), [0.5, 0.5], 5_000, 3)
    assert paired.diff == 0.0
    assert paired.se == 0.0
    assert paired.risk1 == paired.risk2


def test_paired_difference_has_smaller_variance() -> None:
    model = normal_sim_model(3, 1.0, 1.0)
    js = plugin(normal(3, 2.0), JamesStein(sigma2=1.0), label="js")
    mre = mre_estimator(model.px, model.qy)
    paired = mc_risk_difference(model, js, mre, L2Integrated(), [1.0, 0.0, 0.0], 20_000, 4)
    assert paired.se**2 <= paired.risk1.se**2 + paired.risk2.se**2


def test_unsupported_combinations_are_reported() -> None:
    model = normal_sim_model(3, 1.0, 1.0)
    with pytest.raises(UnsupportedCombinationError, match="predictive density") as info:
        mc_risk(model, Identity(), L2Integrated(), 0.0, 100, 0)
    assert info.value.loss == "l2"
    with pytest.raises(UnsupportedCombinationError, match="p <= 2"):
        mc_risk(model, plugin(model.qy, scale=1.5), L1Integrated(), 0.0, 100, 0)


def test_l1_risk_for_radial_target_with_cdf() -> None:
    smn = normal_sim_model(2, 1.0, 1.0)
    target = RadialDensity.from_smn(smn.qy, label="normal")
    model = SimModel(px=smn.px, qy=target)
    radial = mc_risk(model, PredictiveDensity(base=target, label="x_plugin"), L1Integrated(), [0.5, 0.0], 5_000, 3)
    expected = mc_risk(smn, plugin(smn.qy), L1Integrated(), [0.5, 0.0], 5_000, 3)
    assert radial.mean == pytest.approx(expected.mean, rel=1e-9)
    assert radial.se == pytest.approx(expected.se, rel=1e-6)


def test_l1_risk_for_radial_target_needs_cdf() -> None:
    px = normal(2)
    target = RadialDensity(dim=2, radial=RadialDensity.from_smn(px).radial, label="bare")
    model = SimModel(px=px, qy=target)
    with pytest.raises(UnsupportedCombinationError, match="no marginal cdf"):
        mc_risk(model, PredictiveDensity(base=target), L1Integrated(), 0.0, 100, 0)
    with pytest.raises(UnsupportedCombinationError, match="scale mixtures of normals"):
        mc_risk(model, PredictiveDensity(base=target), L2Integrated(), 0.0, 100, 0)



def test_point_loss_risk_for_plain_rule() -> None:
    model = normal_sim_model(1, 1.0, 1.0)
    estimate = mc_risk(model, Identity(), ReflectedNormal(gamma=2.0), 0.0, 50_000, 6)
    # E[1 - exp(-X^2 / 4)] for X ~ N(0, 1)
    assert estimate.within(1.0 - (1.5) ** -0.5, sigmas=4.0)


def test_grid_l1_loss_matches_direct_quadrature() -> None:
    model = normal_sim_model(1, 1.0, 1.0)
    est = PredictiveDensity(base=normal(1, 2.0), label="mre")
    x = np.array([[0.0], [0.8], [-2.5]])
    losses = per_draw_loss(model, est, L1Integrated(), x, np.zeros(1))
    for value, row in zip(losses, x[:, 0]):
        expected, _ = integrate.quad(
            lambda y, s=row: abs(stats.norm.pdf(y) - stats.norm.pdf(y, loc=s, scale=math.sqrt(2.0))),
            -30.0,
            30.0,
            limit=200,
            epsabs=1e-12,
        )
        assert value == pytest.approx(expected, abs=1e-4)


def test_derivative_at_one_matches_closed_form() -> None:
    model = normal_sim_model(2, 1.0, 1.0)
    mean, se = mc_risk_derivative_at_one(model, Identity(), 0.0, 100_000, 7)
    expected = risk_qc_derivative_normal(NormalModel(p=2, var_x=1.0, var_y=1.0), 1.0, 1.0, 0.0)
    assert expected < 0
    assert abs(mean - expected) <= 4.0 * se


def test_universal_dominance_holds_from_p4() -> None:
    grid = [np.zeros(4), np.array([2.0, 0.0, 0.0, 0.0])]
    holds, worst, _ = universal_dominance_holds(Identity(), normal_sim_model(4, 1.0, 1.0), grid, 20_000, 8)
    assert holds
    assert worst == pytest.approx(1.5**-2, abs=0.01)
    holds, worst, _ = universal_dominance_holds(Identity(), normal_sim_model(3, 1.0, 1.0), [np.zeros(3)], 20_000, 8)
    assert not holds


def test_unbiasedness_check_targets_convolution() -> None:
    ys = [[-1.5], [-0.5], [0.0], [0.7], [2.0]]
    report = unbiasedness_check(1, 0.5, 1.0, 0.5, ys, 200_000, 10)
    assert report.estimate.shape == (5,)
    assert np.all(np.abs(report.estimate - report.expected) <= 4.0 * report.se)
    np.testing.assert_allclose(report.expected, stats.norm.pdf(np.array(ys)[:, 0]), rtol=1e-12)
    biased = unbiasedness_check(1, 0.5, 1.0, 1.0, [[0.0]], 1_000, 10)
    assert biased.expected[0] < stats.norm.pdf(0.0)


def test_mc_bayes_risk_matches_closed_form() -> None:
    model = normal_sim_model(2, 1.0, 1.0)
    est = normal_prior_bayes(1.0, 1.0, tau2=2.0, dim=2)
    estimate = mc_bayes_risk(model, est, L2Integrated(), 2.0, 100_000, 12)
    expected = bayes_risk_normal_prior(NormalModel(p=2, var_x=1.0, var_y=1.0), 2.0)
    assert estimate.within(expected, sigmas=4.0)


def test_normal_prior_bayes_beats_mre_on_average_but_not_everywhere() -> None:
    model = normal_sim_model(3, 1.0, 1.0)
    bayes = normal_prior_bayes(1.0, 1.0, tau2=1.0, dim=3)
    minimax = risk_mre_normal(NormalModel(p=3, var_x=1.0, var_y=1.0))
    average = mc_bayes_risk(model, bayes, L2Integrated(), 1.0, 100_000, 14)
    assert average.mean + 4.0 * average.se < minimax
    far = mc_risk(model, bayes, L2Integrated(), [8.0, 0.0, 0.0], 20_000, 15)
    assert far.mean - 4.0 * far.se > minimax



def test_mc_risk_over_scales_is_minimized_at_optimal_scale() -> None:
    model = normal_sim_model(1, 1.0, 1.0)
    grid = [1.0, 1.5, 2.0, 2.5, 3.0]
    risks = [
        mc_risk(model, plugin(model.qy, scale=math.sqrt(c2)), L2Integrated(), 0.0, 20_000, 13).mean for c2 in grid
    ]
    assert int(np.argmin(risks)) == 2


def test_standard_mu_grid() -> None:
    grid = standard_mu_grid(3)
    assert len(grid) == 7
    assert [float(np.linalg.norm(point)) for point in grid[:6]] == pytest.approx([0.0, 0.5, 1.0, 2.0, 4.0, 8.0])
    assert np.linalg.norm(grid[-1]) == pytest.approx(2.0)
    assert len(standard_mu_grid(1)) == 6


def _point(diff: float, se: float) -> DominancePoint:
    return DominancePoint(mu=(0.0,), risk1=1.0, risk2=1.0 - diff, diff=diff, se=se, verdict=point_verdict(diff, se))


def test_verdict_rules() -> None:
    assert point_verdict(-1.0, 0.1) == "dominates"
    assert point_verdict(1.0, 0.1) == "dominated"
    assert point_verdict(-0.2, 0.1) == "inconclusive"
    points = [_point(-1.0, 0.1), _point(-0.01, 0.1)]
    assert overall_verdict(points) == "inconclusive"
    assert overall_verdict(points, equal_at={1}) == "dominates"
    assert overall_verdict([*points, _point(1.0, 0.1)], equal_at={1}) == "dominated"
    assert overall_verdict([_point(0.0, 0.0)]) == "inconclusive"


def test_scan_of_estimator_against_itself_is_inconclusive() -> None:
    model = normal_sim_model(2, 1.0, 1.0)
    est = mre_estimator(model.px, model.qy)
    report = dominance_scan(est, est, L2Integrated(), model, n=1_000, seed=0)
    assert report.verdict == "inconclusive"
    assert all(point.diff == 0.0 for point in report.points)


def test_james_stein_plugin_dominates_mre() -> None:
    model = normal_sim_model(3, 1.0, 1.0)
    js = plugin(normal(3, 2.0), JamesStein(sigma2=1.0), label="js")
    report = dominance_scan(js, mre_estimator(model.px, model.qy), L2Integrated(), model, n=100_000, seed=42)
    assert report.verdict == "dominates"
    assert report.estimator1 == "js"
    assert len(report.points) == 7


def _axis_grid(dim: int, norms) -> list[np.ndarray]:
    return [np.eye(dim)[0] * r for r in norms]


def test_dominance_verdict_is_stable_across_seeds() -> None:
    model = normal_sim_model(3, 1.0, 1.0)
    js = plugin(normal(3, 2.0), JamesStein(sigma2=1.0), label="js")
    mre = mre_estimator(model.px, model.qy)
    grid = _axis_grid(3, (0.0, 1.0, 2.0, 4.0))
    verdicts = {
        seed: dominance_scan(js, mre, L2Integrated(), model, grid, n=50_000, seed=seed).verdict for seed in (42, 43)
    }
    assert verdicts == {42: "dominates", 43: "dominates"}


def test_baranchik_plugin_dominates_x_plugin_under_l1() -> None:
    model = normal_sim_model(4, 1.0, 1.0)
    baranchik = plugin(model.qy, Baranchik(a=1.0), label="baranchik")
    grid = _axis_grid(4, (0.0, 1.0, 2.0, 4.0))
    report = dominance_scan(baranchik, plugin(model.qy), L1Integrated(), model, grid, n=20_000, seed=42)
    assert report.verdict == "dominates"
    assert all(point.diff < 0 for point in report.points)


@pytest.mark.parametrize(
    "rule,loss",
    [
        (RestrictedBayesUniform(lo=0.0, loss=ReflectedNormal(gamma=2.0), sigma2_x=1.0), L2Integrated()),
        (RestrictedBayesUniform(lo=0.0, loss=L1Dual(mixing=PointMass(value=1.0)), sigma2_x=1.0), L1Integrated()),
    ],
)
def test_restricted_bayes_plugin_dominates_x_plugin(rule, loss) -> None:
    model = normal_sim_model(1, 1.0, 1.0)
    grid = [np.array([mu]) for mu in (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)]
    report = dominance_scan(plugin(model.qy, rule), plugin(model.qy), loss, model, grid, n=20_000, seed=42)
    assert report.verdict == "dominates"


def test_restricted_mle_plugin_dominates_x_plugin() -> None:
    model = normal_sim_model(1, 1.0, 1.0)
    grid = [np.array([mu]) for mu in (0.0, 0.25, 0.5, 1.0, 2.0)]
    mle = plugin(model.qy, RestrictedMle(lo=0.0), label="restricted_mle")
    report = dominance_scan(mle, plugin(model.qy), L2Integrated(), model, grid, n=20_000, seed=42)
    assert report.verdict == "dominates"



def test_importance_sample_degenerate_laws() -> None:
    sample = importance_sample_dual(PointMass(value=1.0), PointMass(value=1.0), 3, "l2", 1_000, 0)
    np.testing.assert_allclose(sample.z, 0.75)
    np.testing.assert_allclose(sample.weights, 1.0 / 1_000)
    assert sample.inverse_mean().value == pytest.approx(4.0 / 3.0)
    l1 = importance_sample_dual(PointMass(value=1.0), PointMass(value=1.0), 4, "l1", 1_000, 0)
    assert l1.moment(-0.5).value == pytest.approx(0.8**-0.5)
    assert l1.ess == pytest.approx(1_000)


def test_importance_sample_gamma_closed_form() -> None:
    sample = importance_sample_dual(GammaLaw(shape=3.0), GammaLaw(shape=3.0), 3, "l2", 200_000, 21, threads=2)
    estimate = sample.inverse_mean()
    assert sample.reliable
    assert abs(estimate.value - 45.0 / 59.5) <= 4.0 * estimate.se


def test_importance_sample_strict_mode_flags_low_ess() -> None:
    heavy = InverseGammaLaw(shape=0.6)
    with pytest.raises(UnreliableEstimateError) as info:
        importance_sample_dual(heavy, heavy, 40, "l2", 10_000, 1, strict=True)
    assert info.value.ess < 100


def test_sim_model_rejects_dimension_mismatch() -> None:
    with pytest.raises(ValueError, match="dimension"):
        SimModel(px=normal(2), qy=normal(3))
