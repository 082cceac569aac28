import math

import pytest

import oracles
from careercutoff.gaussian import PublicEvent
from careercutoff.model import Primitives
from careercutoff.simulate import (
    SimConfig,
    analytic_cell,
    binomial_se,
    outcome_csv,
    outcome_json,
    prediction_report,
    run_sim,
)
from careercutoff.statics import check_rd


@pytest.fixture(scope="module")
def outcome():
    return run_sim(SimConfig(50_000, (0.3, 0.6), seed=11, primitives=Primitives(b=0.5)))


def test_tallies_add_up(outcome):
    for c in outcome.cells:
        assert c.n_risky + c.n_safe == c.n
        assert c.n_success + c.n_failure == c.n_implemented
        assert 0 <= c.emp_eps <= 1 and 0 <= c.emp_hit_rate <= 1


def test_deterministic(outcome):
    again = run_sim(outcome.config)
    assert again == outcome
    assert outcome_csv(again) == outcome_csv(outcome)
    other = run_sim(SimConfig(50_000, (0.3, 0.6), seed=12, primitives=Primitives(b=0.5)))
    assert other != outcome


def test_prefix_independent_of_other_cells():
    # each rho has its own substream keyed by position
    a = run_sim(SimConfig(2_000, (0.3, 0.6), seed=5, primitives=Primitives(b=0.5)))
    b = run_sim(SimConfig(2_000, (0.3,), seed=5, primitives=Primitives(b=0.5)))
    assert a.cells[0] == b.cells[0]


def test_frequencies_within_four_se(outcome):
    p = outcome.config.primitives
    for c in outcome.cells:
        a = analytic_cell(c.rho, c.cutoff, p)
        for ev in PublicEvent:
            q = a["events"][ev]
            assert abs(c.event_count(ev) / c.n - q) <= 4 * binomial_se(q, c.n)
        assert abs(c.emp_hit_rate - a["hit_rate"]) <= 4 * binomial_se(a["hit_rate"], c.n_implemented)
        assert abs(c.mean_posterior - c.rho) <= 4 * c.posterior_sd / math.sqrt(c.n)


def test_hit_rate_against_quadrature(ref_b):
    for rho in (0.3, 0.6):
        from careercutoff.equilibrium import solve_equilibrium

        c = solve_equilibrium(rho, ref_b).cutoff
        assert analytic_cell(rho, c, ref_b)["hit_rate"] == pytest.approx(oracles.hit_rate_quad(c, rho, ref_b), abs=1e-9)


def test_huge_bonus_everyone_risky():
    out = run_sim(SimConfig(1_000, (0.5,), primitives=Primitives(b=1e6)))
    assert out.cells[0].emp_eps == 1.0


def test_report_single_rho():
    out = run_sim(SimConfig(100, (0.5,), primitives=Primitives(b=0.5)))
    rep = prediction_report(out)
    assert rep.comparisons == [] and "not applicable" in rep.note


def test_report_flags_only_on_rd_grid(outcome):
    rd = check_rd([0.3, 0.6], outcome.config.primitives)
    rep = prediction_report(outcome, rd)
    for cmp_ in rep.comparisons:
        if not cmp_.applicable:
            assert cmp_.eps_nonincreasing is None and cmp_.consistent is None


def test_flat_model_has_flat_eps():
    # extended payoff, equal noise, constant lambda: nothing depends on rho
    from careercutoff.equilibrium import PayoffMode

    p = Primitives(sigma_h=1.0, lambda_min=0.5, lambda_max=0.5, b=0.5)
    out = run_sim(SimConfig(20_000, (0.2, 0.8), seed=2, primitives=p, mode=PayoffMode.EXTENDED))
    a, b = out.cells
    assert abs(a.emp_eps - b.emp_eps) <= 4 * math.hypot(binomial_se(a.emp_eps, a.n), binomial_se(b.emp_eps, b.n)) + 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(0, (0.5,))
    with pytest.raises(ValueError):
        SimConfig(10, ())
    with pytest.raises(ValueError):
        SimConfig(10, (1.0,))


def test_serializers(outcome):
    import json

    doc = json.loads(outcome_json(outcome))
    assert len(doc["cells"]) == 2 and doc["seed"] == 11
    assert outcome_csv(outcome).splitlines()[0].startswith("rho,cutoff,n,n_risky")
