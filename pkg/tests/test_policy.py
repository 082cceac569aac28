import math

import numpy as np
import pytest

from careercutoff.equilibrium import solve_equilibrium
from careercutoff.gaussian import signal_cdf
from careercutoff.model import Primitives, lambda_of
from careercutoff.policy import (
    GATE_HEADER,
    TargetAtUnity,
    TargetBelowFloor,
    bonus_for_cutoff,
    bonus_for_target,
    eps_of_bonus,
    floor_eps,
    gate_rows_csv,
    gatekeeping_sweep,
    quantile_fx,
)


def test_quantile_median_is_midpoint(ref):
    assert quantile_fx(0.5, 0.3, ref) == pytest.approx(ref.midpoint, abs=1e-11)


def test_quantile_roundtrip_and_monotone(ref):
    qs = np.round(np.arange(0.01, 1.0, 0.01), 2)
    xs = [quantile_fx(q, 0.6, ref) for q in qs]
    for q, x in zip(qs, xs):
        assert signal_cdf(x, 0.6, ref) == pytest.approx(q, abs=1e-10)
    assert all(b > a for a, b in zip(xs, xs[1:]))
    assert quantile_fx(0.999, 0.6, ref) > xs[-1]


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1])
def test_quantile_domain(ref, q):
    with pytest.raises(ValueError):
        quantile_fx(q, 0.5, ref)


def test_high_target_roundtrip(ref):
    res = bonus_for_target(0.99, 0.6, ref)
    assert res.bonus > 10
    assert res.roundtrip_gap <= 1e-6


def test_bonus_increasing_in_target(ref):
    bs = [bonus_for_target(t, 0.6, ref).bonus for t in (0.3, 0.5, 0.7)]
    assert bs[0] < bs[1] < bs[2]


def test_continuity_at_floor():
    # a rho where the b = 0 floor is interior
    p = Primitives()
    fl = floor_eps(0.3, p)
    assert 0 < fl < 1e-3
    res = bonus_for_target(fl + 1e-9, 0.3, p)
    assert 0 <= res.bonus < 1e-3


def test_below_floor_and_unity(ref):
    fl = floor_eps(0.3, ref)
    with pytest.raises(TargetBelowFloor):
        bonus_for_target(fl / 2, 0.3, ref)
    with pytest.raises(TargetAtUnity):
        bonus_for_target(1.0, 0.3, ref)


def test_bonus_for_cutoff_inverts_the_solver(ref):
    # bonus -> equilibrium cutoff -> bonus
    for b in (0.3, 1.0, 4.0):
        eq = solve_equilibrium(0.6, ref.replace(b=b))
        assert bonus_for_cutoff(eq.cutoff, 0.6, ref.replace(b=b)) == pytest.approx(b, rel=1e-8)


def test_eps_increasing_in_bonus(ref):
    bs = np.linspace(0.3, 5, 12)
    eps = eps_of_bonus(bs, 0.6, ref)
    assert all(b > a for a, b in zip(eps, eps[1:]))


def test_gatekeeping_sweep(ref):
    p = ref.replace(b=0.5)
    rows = gatekeeping_sweep([0.0, 0.5, 1.0], 0.4, p)
    assert [r.t for r in rows] == [0.0, 0.5, 1.0]
    for r in rows:
        assert r.lam == lambda_of(0.4, p.replace(t_gate=r.t))
    assert all(b.cutoff >= a.cutoff - 1e-8 for a, b in zip(rows, rows[1:]))
    assert all(b.eps <= a.eps + 1e-8 for a, b in zip(rows, rows[1:]))
    base = solve_equilibrium(0.4, p)
    single = gatekeeping_sweep([0.0], 0.4, p)
    assert len(single) == 1 and single[0].cutoff == base.cutoff
    text = gate_rows_csv(rows)
    assert text.splitlines()[0] == ",".join(GATE_HEADER) == "t,lambda,c,eps,b"


def test_gatekeeping_needs_bonus(ref):
    with pytest.raises(ValueError):
        gatekeeping_sweep([0.0, 1.0], 0.4, ref)
    with pytest.raises(ValueError):
        gatekeeping_sweep([1.0, 0.5], 0.4, ref.replace(b=0.5))
