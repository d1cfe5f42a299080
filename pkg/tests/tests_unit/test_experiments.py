import pytest

from _levybsde.levy_measures import DomainError, is_divergent
from _levybsde.run import load_experiment_config
from levybsde.plugins import levybsde_plugin_manager

SMALL_SOLVER = [
    "solver.steps=8",
    "solver.quadrature_nodes=64",
    "solver.space.nodes=129",
    "solver.space.samples=500",
]


def run(name, overrides=(), model=None):
    experiment = levybsde_plugin_manager.get_experiment(name)
    config = load_experiment_config(experiment, model=model, overrides=overrides)
    return experiment(config, workers=2).run()


def check_names(outcome):
    return [check.name for check in outcome.checks]


def test_experiments_are_ordered_by_priority():
    names = [e.name for e in levybsde_plugin_manager.ordered_experiments]
    assert names == [
        "analyze",
        "rate-process",
        "rate-bsde",
        "rate-gap",
        "wasserstein",
        "boundary",
        "appendix",
        "independence",
        "solver-check",
    ]


def test_unknown_experiment():
    with pytest.raises(KeyError, match="unknown experiment"):
        levybsde_plugin_manager.get_experiment("nope")


def test_analyze_cgmy():
    outcome = run("analyze", overrides=["exponents=[0.25, 2.0]"])
    assert set(outcome.tables) == {"analyze", "analyze-c-beta", "analyze-summary"}
    frame = outcome.tables["analyze"]
    assert frame["n"].tolist() == list(range(2, 11))
    assert all(is_divergent(v) for v in frame["m0.25"])
    assert outcome.passed


def test_analyze_c_beta_table():
    outcome = run("analyze", model="atomic-harmonic", overrides=["betas=[1.25, 1.5]"])
    assert outcome.tables["analyze-c-beta"]["beta"].tolist() == [1.25, 1.5]
    assert check_names(outcome) == ["monotone in the radius"]


def test_rate_process():
    outcome = run(
        "rate-process",
        model="merton",
        overrides=["eps_ref=0", "levels=[2, 4, 8]", "paths=500"],
    )
    assert set(outcome.tables) == {"rate-process", "rate-process-summary"}
    assert check_names(outcome) == ["bound domination", "process slope"]
    assert [plot.filename for plot in outcome.plots] == ["rate-process.svg"]


@pytest.mark.parametrize(
    "name, generator",
    [
        ("rate-bsde", []),
        ("rate-bsde", ["generator={kind: linear, a: 0.5, b: 0.1}"]),
        ("rate-gap", []),
    ],
)
def test_bsde_rates(name, generator):
    outcome = run(
        name,
        model="merton",
        overrides=["eps_ref=0", "levels=[2, 4, 8]", "paths=500"] + SMALL_SOLVER + generator,
    )
    assert set(outcome.tables) == {f"{name}-y", f"{name}-u", f"{name}-apriori", f"{name}-summary"}
    assert check_names(outcome) == ["bsde-y slope", "bsde-u slope", "a-priori bound"]
    assert outcome.tables[f"{name}-apriori"]["n"].tolist() == ["2", "4", "8", "reference"]
    assert len(outcome.plots) == 2


def test_rate_gap_reports_both_terms():
    outcome = run(
        "rate-gap",
        model="merton",
        overrides=["eps_ref=0", "levels=[2, 4, 8]", "paths=500"] + SMALL_SOLVER,
    )
    frame = outcome.tables["rate-gap-y"]
    assert {"process_term", "c_n", "dominant"} <= set(frame.columns)
    # Hölder source with alpha = 0.1 on n steps
    assert frame["c_n"].tolist() == pytest.approx([n**-0.1 for n in (2, 4, 8)])


def test_rate_gap_needs_an_approximated_generator():
    with pytest.raises(DomainError):
        run(
            "rate-gap",
            model="merton",
            overrides=["eps_ref=0", "levels=[2, 4, 8]", "paths=500", "generator={kind: zero}"]
            + SMALL_SOLVER,
        )


def test_wasserstein_harmonic():
    outcome = run(
        "wasserstein",
        model="atomic-harmonic",
        overrides=["levels=[2, 4]", "eps_ref=0.015625", "paths=500"],
    )
    frame = outcome.tables["wasserstein"]
    assert {"lower", "upper", "bracket_low", "bracket_high"} <= set(frame.columns)
    assert len(outcome.checks) == 4
    assert outcome.passed


def test_boundary_without_sandwich():
    outcome = run(
        "boundary",
        overrides=["n_max=200", "divergence_max=1000", "divergence_points=8", "sandwich.paths=0"],
    )
    assert set(outcome.tables) == {"boundary", "boundary-divergence"}
    assert check_names(outcome) == [
        "harmonic m2 bracket",
        "logharmonic m2 bracket",
        "n^(2-beta) m2(1/(2n)) unbounded, beta=0.5",
    ]
    assert outcome.passed


def test_boundary_with_sandwich():
    outcome = run(
        "boundary",
        overrides=[
            "n_max=50",
            "divergence_max=1000",
            "divergence_points=8",
            "sandwich.paths=500",
            "sandwich.levels=[2, 4, 8]",
            "sandwich.eps_ref=0.015625",
        ],
    )
    assert "boundary-sandwich" in outcome.tables
    assert "n^-1/2 sandwich" in check_names(outcome)
    assert outcome.passed


def test_appendix():
    outcome = run("appendix", overrides=["k_n=[1, 4]", "paths=10000"])
    assert outcome.tables["appendix"]["k_n"].tolist() == [1, 4]
    assert outcome.passed


def test_independence_dumps():
    outcome = run(
        "independence", model="merton", overrides=["eps=0.5", "paths=10000", "dump_paths=1"]
    )
    assert check_names(outcome) == ["first jump time independent of its size"]
    assert list(outcome.files) == ["paths/path-00000.bin"]
    assert outcome.files["paths/path-00000.bin"][:4] == b"LBSP"


def test_solver_check():
    outcome = run(
        "solver-check",
        model="merton",
        overrides=[
            "eps=0",
            "solver.steps=16",
            "solver.quadrature_nodes=128",
            "solver.space.nodes=257",
            "solver.space.samples=2000",
            "lsmc.steps=16",
            "lsmc.paths=2000",
            "lsmc.degree=3",
            "lsmc.bootstrap=4",
            "oracle_samples=20000",
            "grid_tolerance=0.02",
            "linear_tolerance=0.02",
            "lsmc_tolerance=0.05",
        ],
    )
    assert outcome.tables["solver-check"]["check"].tolist() == [
        "zero generator vs Monte Carlo",
        "linear generator vs closed form",
        "least-squares Monte Carlo vs grid",
        "stability in the terminal condition",
    ]
    assert outcome.passed
