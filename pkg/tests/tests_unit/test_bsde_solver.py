import math

import numpy as np
import pydantic
import pytest
from scipy import special

from _levybsde.bsde_solver import (
    AffinePhi,
    BSDEProblem,
    CappedAbsTerminal,
    ConstantTerminal,
    CustomTerminal,
    HolderGenerator,
    IdentityTerminal,
    IntegralGenerator,
    LinearGenerator,
    LSMCSettings,
    SolverConfigurationError,
    TimeDiscretizedGenerator,
    ZeroGenerator,
    closed_form_linear_generator,
    closed_form_zero_generator,
    generator_gap_cn,
    solve_lsmc,
    solve_markovian_grid,
    source_gap,
    undiscretized,
    with_steps,
)
from _levybsde.bsde_solver.generators import weierstrass, weierstrass_antiderivative
from _levybsde.levy_measures import DomainError


def test_identity_terminal_is_a_martingale(merton, small_solver):
    problem = BSDEProblem(merton, 0.0, ZeroGenerator(), IdentityTerminal())
    solution = solve_markovian_grid(problem, small_solver, seed=0)
    np.testing.assert_allclose(solution.u(0, [0.3, -1.0]), [0.3, -1.0], atol=1e-8)
    assert solution.diagnostics.picard_iterations == (0,) * 16


def test_zero_generator_matches_monte_carlo(merton, small_solver):
    problem = BSDEProblem(merton, 0.0, ZeroGenerator(), CappedAbsTerminal())
    solution = solve_markovian_grid(problem, small_solver, seed=0)
    mean, se = closed_form_zero_generator(problem, samples=50_000, seed=1)
    assert abs(float(solution.u(0, 0.0)) - mean) <= 4.0 * se + 0.01


def test_linear_generator_matches_closed_form(merton, small_solver):
    problem = BSDEProblem(merton, 0.0, LinearGenerator(a=0.5, b=1.0), CappedAbsTerminal())
    settings = small_solver.model_copy(update={"steps": 64})
    solution = solve_markovian_grid(problem, settings, seed=0)
    value, se = closed_form_linear_generator(problem, samples=50_000, seed=1)
    assert abs(float(solution.u(0, 0.0)) - value) <= 0.01 * abs(value) + 4.0 * se


@pytest.mark.parametrize("generator", [ZeroGenerator(), LinearGenerator(a=0.5, b=1.0)])
def test_lipschitz_constant_propagates_backwards(merton, small_solver, generator):
    problem = BSDEProblem(merton, 0.0, generator, CappedAbsTerminal())
    solution = solve_markovian_grid(problem, small_solver, seed=0)
    for i in range(solution.steps + 1):
        x = solution.nodes(i)
        slopes = np.abs(np.diff(solution.u(i, x)) / np.diff(x))
        bound = problem.terminal.lipschitz * math.exp(
            problem.lipschitz * (problem.T - solution.times[i])
        )
        assert slopes.max() <= bound * (1.0 + 1e-2), f"step {i}"


def test_constant_jump_integral(merton, small_solver):
    # Phi = 1: the generator is the constant int 1 ^ |x|^beta_bar nu(dx)
    generator = IntegralGenerator(phi=AffinePhi(a=1.0, b=0.0, c=0.0))
    problem = BSDEProblem(merton, 0.0, generator, IdentityTerminal())
    solution = solve_markovian_grid(problem, small_solver, seed=0)
    first, _ = generator.delta_moments(merton)
    assert float(solution.u(0, 0.0)) == pytest.approx(first, rel=1e-2)


def test_contraction_precondition(merton, small_solver):
    problem = BSDEProblem(merton, 0.0, LinearGenerator(a=40.0), IdentityTerminal())
    settings = small_solver.model_copy(update={"steps": 4})
    with pytest.raises(SolverConfigurationError, match="increase the number of time steps"):
        solve_markovian_grid(problem, settings)


def test_solution_frame(merton, small_solver):
    problem = BSDEProblem(merton, 0.0, ZeroGenerator(), ConstantTerminal(value=2.0))
    solution = solve_markovian_grid(problem, small_solver, seed=0)
    frame = solution.to_frame()
    assert list(frame.columns) == ["t", "x", "u"]
    assert len(frame) == 17 * 257
    np.testing.assert_allclose(frame["u"], 2.0)


def test_integral_generator_needs_beta_bar_above_index(cgmy):
    with pytest.raises(SolverConfigurationError, match="beta_bar"):
        BSDEProblem(cgmy, 0.1, IntegralGenerator(beta_bar=0.4), IdentityTerminal())


def test_full_measure_needs_finite_activity(cgmy):
    with pytest.raises(DomainError):
        BSDEProblem(cgmy, 0.0, ZeroGenerator(), IdentityTerminal())


def test_horizon_must_be_positive(merton):
    with pytest.raises(DomainError):
        BSDEProblem(merton, 0.0, ZeroGenerator(), IdentityTerminal(), T=0.0)


def test_terminal_lipschitz_is_checked(merton):
    steep = CustomTerminal(func=lambda x: 3.0 * x, lipschitz=1.0)
    with pytest.raises(SolverConfigurationError, match="violates"):
        BSDEProblem(merton, 0.0, ZeroGenerator(), steep)

    smooth = CustomTerminal(func=np.tanh, lipschitz=1.0)
    problem = BSDEProblem(merton, 0.0, ZeroGenerator(), smooth)
    assert problem.terminal(np.array([0.0]))[0] == 0.0


def test_capped_abs_cap_must_be_positive():
    with pytest.raises(pydantic.ValidationError):
        CappedAbsTerminal(cap=0.0)


def test_closed_forms_check_generator(merton):
    linear = BSDEProblem(merton, 0.0, LinearGenerator(a=1.0), IdentityTerminal())
    with pytest.raises(SolverConfigurationError):
        closed_form_zero_generator(linear, samples=10)

    zero = BSDEProblem(merton, 0.0, ZeroGenerator(), IdentityTerminal())
    with pytest.raises(SolverConfigurationError):
        closed_form_linear_generator(zero, samples=10)


def test_closed_form_linear_without_growth(merton):
    problem = BSDEProblem(merton, 0.0, LinearGenerator(a=0.0, b=2.0), ConstantTerminal(value=1.0))
    value, se = closed_form_linear_generator(problem, samples=10)
    assert value == pytest.approx(3.0)
    assert se == 0.0


def test_time_discretized_generator_steps():
    generator = TimeDiscretizedGenerator()
    with pytest.raises(SolverConfigurationError, match="no steps"):
        generator.source_integral(0.0, 1.0, 1.0)

    assert with_steps(generator, 8).steps == 8
    assert with_steps(TimeDiscretizedGenerator(steps=4), 8).steps == 4
    linear = LinearGenerator(a=1.0)
    assert with_steps(linear, 8) is linear

    nested = TimeDiscretizedGenerator(inner=TimeDiscretizedGenerator(inner=HolderGenerator(alpha=0.3)))
    assert undiscretized(nested) == HolderGenerator(alpha=0.3)


def test_frozen_source_gap():
    # W = cos(pi t): frozen at 0 and 1/2 it integrates to 1/2, exactly to 0
    generator = TimeDiscretizedGenerator(inner=HolderGenerator(alpha=1.0, terms=1))
    assert source_gap(generator, 2, 1.0) == pytest.approx(0.5)
    assert source_gap(LinearGenerator(), 2, 1.0) == 0.0


@pytest.mark.parametrize("alpha, terms", [(0.5, 30), (0.1, 10)])
def test_weierstrass_at_origin(alpha, terms):
    expected = (1.0 - 2.0 ** (-alpha * terms)) / (1.0 - 2.0 ** (-alpha))
    assert float(weierstrass(0.0, 1.0, alpha, terms)) == pytest.approx(expected)
    assert float(weierstrass_antiderivative(0.0, 1.0, alpha, terms)) == 0.0


def test_holder_source_integrates_to_zero_over_the_horizon():
    generator = HolderGenerator(alpha=0.5)
    assert generator.source_integral(0.0, 2.0, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_generator_gap_time_discretized():
    holder = TimeDiscretizedGenerator(inner=HolderGenerator(alpha=0.5))
    assert generator_gap_cn(None, holder, 16) == pytest.approx(0.25)
    fixed = TimeDiscretizedGenerator(inner=HolderGenerator(alpha=0.5), steps=4)
    assert generator_gap_cn(None, fixed, 16) == pytest.approx(0.5)
    assert generator_gap_cn(None, TimeDiscretizedGenerator(inner=LinearGenerator()), 16) == 0.0


def test_generator_gap_integral(harmonic):
    value = generator_gap_cn(harmonic, IntegralGenerator(beta_bar=1.5), 4)
    expected = max(special.zeta(1.5, 4.0), math.sqrt(special.zeta(3.0, 4.0)))
    assert value == pytest.approx(expected, rel=1e-10)


def test_generator_gap_errors(harmonic):
    with pytest.raises(DomainError):
        generator_gap_cn(harmonic, LinearGenerator(), 4)
    with pytest.raises(SolverConfigurationError):
        generator_gap_cn(harmonic, IntegralGenerator(), 0)


def test_lsmc_agrees_with_grid(merton, small_solver):
    problem = BSDEProblem(merton, 0.0, LinearGenerator(a=0.5, b=1.0), CappedAbsTerminal())
    grid = solve_markovian_grid(problem, small_solver, seed=0)
    settings = LSMCSettings(steps=16, paths=4_000, degree=3, bootstrap=8)
    result = solve_lsmc(problem, settings, seed=0, workers=2)
    assert result.y0 == pytest.approx(float(grid.u(0, 0.0)), abs=0.08)
    assert np.isfinite(result.se)
    assert len(result.degrees) == 16


def test_lsmc_settings_need_enough_paths():
    with pytest.raises(pydantic.ValidationError):
        LSMCSettings(paths=100)


def test_generator_gap_integral_needs_beta_bar_above_index(cgmy):
    with pytest.raises(SolverConfigurationError, match="beta_bar"):
        generator_gap_cn(cgmy, IntegralGenerator(beta_bar=0.4), 4)
