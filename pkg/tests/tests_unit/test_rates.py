import math

import numpy as np
import pytest
from scipy import special

from _levybsde.bsde_solver import BSDEProblem, IdentityTerminal, ZeroGenerator
from _levybsde.levy_measures import CGMY, DomainError
from _levybsde.rates import (
    ExperimentPreconditionError,
    appendix_random_walk_gap,
    check_bg_boundary_examples,
    check_optimality_divergence,
    check_reference,
    default_beta,
    first_jump_probability_root,
    fit_loglog_slope,
    poisson_walk_sup,
    reference_bias_bound,
    removed_second_moment,
    required_eps_ref,
    rms_with_se,
    run_bsde_rate,
    run_process_rate,
    slope_check,
    wasserstein_bounds,
)

GEOMETRIC_LEVELS = [2**k for k in range(1, 11)]


def test_fit_recovers_power_law():
    levels = [2, 4, 8, 16]
    fit = fit_loglog_slope(levels, [1.0 / n for n in levels])
    assert fit.slope == pytest.approx(-1.0)
    assert fit.intercept == pytest.approx(0.0, abs=1e-12)
    # no SEs and no per-path squares: nothing to resample
    assert fit.ci_low == fit.ci_high == fit.slope


def test_fit_constant_errors():
    fit = fit_loglog_slope([2, 4, 8], [0.3, 0.3, 0.3])
    assert fit.slope == pytest.approx(0.0, abs=1e-12)


def test_fit_bootstrap_interval_covers_slope():
    levels = np.array([2, 4, 8, 16])
    errors = levels ** -0.5
    fit = fit_loglog_slope(levels, errors, ses=0.01 * errors, seed=1)
    assert fit.ci_low < -0.5 < fit.ci_high
    assert fit.ci_high - fit.ci_low < 0.1


@pytest.mark.parametrize(
    "levels, errors",
    [
        ([2, 4], [0.5, 0.25]),
        ([2, 4, 8], [0.5, 0.25]),
        ([2, 8, 4], [0.5, 0.25, 0.1]),
        ([2, 4, 8], [0.5, 0.0, 0.1]),
        ([2, 4, 8], [0.5, math.nan, 0.1]),
    ],
)
def test_fit_rejects_invalid_input(levels, errors):
    with pytest.raises(DomainError):
        fit_loglog_slope(levels, errors)


def test_rms_with_se():
    squares = np.array([[1.0, 0.0], [9.0, 0.0]])
    errors, ses = rms_with_se(squares)
    np.testing.assert_allclose(errors, [math.sqrt(5.0), 0.0])
    # SE of the mean is sqrt(32) / sqrt(2) = 4, halved and divided by the error
    assert ses[0] == pytest.approx(4.0 / (2.0 * math.sqrt(5.0)))
    assert ses[1] == 0.0


def test_removed_second_moment_excludes_the_radius(harmonic):
    # atoms 1/5, 1/6, ... lie strictly below 1/4
    assert removed_second_moment(harmonic, 0.25) == pytest.approx(
        special.zeta(2.0, 5.0), rel=1e-12
    )
    assert removed_second_moment(harmonic, 0.0) == 0.0


def test_reference_bias_bound(merton, harmonic):
    assert reference_bias_bound(merton, 0.0, 1.0) == 0.0
    assert reference_bias_bound(harmonic, 0.25, 4.0) == pytest.approx(
        4.0 * math.sqrt(special.zeta(2.0, 4.0))
    )


def test_required_eps_ref(merton, cgmy):
    assert required_eps_ref(merton, 0.125, 1.0) == 0.0
    required = required_eps_ref(cgmy, 0.125, 1.0)
    assert 0.0 < required < 0.125
    check_reference(cgmy, [2, 4, 8], 0.5 * required, 1.0)


def test_check_reference_reports_required_eps_ref(cgmy):
    with pytest.raises(ExperimentPreconditionError) as excinfo:
        check_reference(cgmy, [2, 4, 8], 0.1, 1.0)
    assert excinfo.value.required_eps_ref == pytest.approx(
        required_eps_ref(cgmy, 0.125, 1.0)
    )

    with pytest.raises(ExperimentPreconditionError) as excinfo:
        check_reference(cgmy, [2, 4, 8], 0.125, 1.0)
    assert excinfo.value.required_eps_ref is None


def test_process_rate_finite_activity(merton):
    report = run_process_rate(
        merton, [2, 4, 8, 16], 0.0, 2_000, 1.0, 1.0, seed=0, workers=2, sandwich=True
    )
    checks = {check.name: check for check in report.checks}
    assert checks["bound domination"].passed
    assert "process slope" in checks
    assert "n^-1/2 sandwich" in checks
    assert report.errors[-1] < report.errors[0]

    frame = report.to_frame()
    assert list(frame.columns) == ["n", "error", "se", "bound", "theory_slope", "predicted"]
    assert frame["n"].tolist() == [2, 4, 8, 16]
    assert report.summary()["eps_ref"] == 0.0


def test_bsde_rate_of_the_identity_is_the_process_rate(merton, small_solver):
    # zero generator, g(x) = x: Y is the process itself
    process = run_process_rate(merton, [2, 4, 8], 0.0, 2_000, 1.0, 1.0, seed=0)
    problem = BSDEProblem(merton, 0.0, ZeroGenerator(), IdentityTerminal())
    bsde = run_bsde_rate(problem, [2, 4, 8], 0.0, small_solver, paths=2_000, beta=1.0, seed=0)
    np.testing.assert_array_less(np.abs(bsde.y.errors - process.errors), 3.0 * process.ses + 1e-3)


def test_process_rate_enforces_reference_bias(harmonic):
    with pytest.raises(ExperimentPreconditionError):
        run_process_rate(harmonic, [2, 4, 8], 1.0 / 64, 100, 1.0, 1.25)


def test_process_rate_without_bias_needs_reference_below_levels(harmonic):
    with pytest.raises(ExperimentPreconditionError):
        run_process_rate(harmonic, [2, 4, 8], 0.125, 100, 1.0, 1.25, enforce_bias=False)


def test_process_rate_rejects_beta_outside_domain(cgmy):
    with pytest.raises(DomainError):
        run_process_rate(cgmy, [2, 4, 8], 1e-6, 100, 1.0, 0.25)


def test_first_jump_probability_root(cgmy, merton):
    assert first_jump_probability_root(cgmy, 1.0) == 1.0
    assert first_jump_probability_root(merton, 2.0) == pytest.approx(
        math.sqrt(1.0 - math.exp(-2.0))
    )


def test_wasserstein_harmonic_bracket(harmonic):
    report = wasserstein_bounds(harmonic, 2, 1.0 / 64, 2_000, 1.0, seed=0)
    assert report.lower == pytest.approx(math.sqrt(special.zeta(2.0, 4.0)))
    assert report.bracket == pytest.approx((0.5, 1.0 / math.sqrt(3.0)))
    assert [check.passed for check in report.checks] == [True, True]
    assert report.row()["upper"] == report.coupled_upper


def test_wasserstein_needs_reference_below_level(harmonic):
    with pytest.raises(ExperimentPreconditionError):
        wasserstein_bounds(harmonic, 2, 0.5, 10, 1.0)


@pytest.mark.parametrize("model, beta_below", [(CGMY(Y=0.5), 0.25), (CGMY(Y=1.5), 1.0)])
def test_divergence_below_blumenthal_getoor_index(model, beta_below):
    report = check_optimality_divergence(model, beta_below, GEOMETRIC_LEVELS)
    assert report.check.passed
    assert len(report.to_frame()) == len(GEOMETRIC_LEVELS)


def test_divergence_harmonic(harmonic):
    report = check_optimality_divergence(harmonic, 0.5, GEOMETRIC_LEVELS)
    assert report.check.passed
    assert np.all(np.diff(report.running_max) >= 0)


def test_divergence_errors(cgmy):
    with pytest.raises(DomainError):
        check_optimality_divergence(cgmy, 0.5, GEOMETRIC_LEVELS)
    with pytest.raises(DomainError):
        check_optimality_divergence(cgmy, 0.25, [2, 4, 8])


def test_boundary_examples():
    report = check_bg_boundary_examples(2_000)
    assert report.passed
    assert len(report.table) == 2 * 1_999
    assert [check.name for check in report.checks] == [
        "harmonic m2 bracket",
        "logharmonic m2 bracket",
    ]
    assert all(check.passed for check in report.checks)

    with pytest.raises(DomainError):
        check_bg_boundary_examples(1)


@pytest.mark.parametrize(
    "times, k_n, T, expected",
    [
        ([], 4, 1.0, 0.0),
        ([0.25], 1, 1.0, 1.0),
        ([0.1, 0.2], 1, 1.0, 2.0),
        # the jump and the walk step coincide at the cell end
        ([0.5], 2, 1.0, 0.0),
        # the cell end 1.0 lies beyond the horizon
        ([0.95], 1, 0.97, 1.0),
    ],
)
def test_poisson_walk_sup(times, k_n, T, expected):
    assert poisson_walk_sup(np.array(times), k_n, T) == expected


def test_appendix_random_walk_gap():
    report = appendix_random_walk_gap(1.0, 4, 10_000, seed=0, workers=2)
    assert report.bound == pytest.approx((1.0 - math.exp(-1.0)) / 2.0)
    assert report.check.passed
    assert report.row()["k_n"] == 4


@pytest.mark.parametrize(
    "kwargs",
    [
        {"T": 1.0, "k_n": 4, "paths": 9_999},
        {"T": 0.0, "k_n": 4, "paths": 10_000},
        {"T": 1.0, "k_n": 0, "paths": 10_000},
    ],
)
def test_appendix_preconditions(kwargs):
    with pytest.raises(DomainError):
        appendix_random_walk_gap(**kwargs)


@pytest.mark.parametrize(
    "model, expected",
    [
        (CGMY(Y=0.5), 0.75),
        (CGMY(Y=1.8), 1.9),
    ],
)
def test_default_beta(model, expected):
    assert default_beta(model) == pytest.approx(expected)


def test_default_beta_presets(merton, harmonic):
    assert default_beta(merton) == 0.25
    assert default_beta(harmonic) == 1.25


@pytest.mark.parametrize(
    "fitted, asymptotic, passed",
    [
        # finest levels on the theory slope, full range off the profile
        (0.2, 0.49, True),
        # finest levels off, full range on the analytic profile
        (0.31, 0.8, True),
        (0.1, 0.8, False),
    ],
)
def test_slope_check_branches(fitted, asymptotic, passed):
    check = slope_check("slope", fitted, asymptotic, theory=0.5, predicted=0.3, tolerance=0.05)
    assert check.name == "slope"
    assert check.passed is passed
    assert "tolerance 0.05" in check.detail
