import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from careercutoff.model import REFERENCE, Primitives, PrimitivesError, check_rho, lambda_of, w_of


def test_reference_defaults():
    p = REFERENCE
    assert (p.pi, p.mu0, p.mu1, p.sigma_h, p.sigma_l) == (0.5, 0.0, 1.0, 0.5, 1.0)
    assert (p.theta, p.kappa, p.b, p.t_gate, p.lambda_min, p.lambda_max) == (1.0, 1.0, 0.0, 0.0, 0.2, 0.8)


@pytest.mark.parametrize(
    "field,value,msg",
    [
        ("pi", 1.5, "pi"),
        ("pi", 0.0, "pi"),
        ("mu1", -1.0, "mu1 must exceed mu0"),
        ("sigma_h", 2.0, "sigma_l"),
        ("theta", 0.0, "theta"),
        ("b", -0.1, "b"),
        ("t_gate", -1.0, "t_gate"),
        ("lambda_max", 1.2, "lambda_max"),
        ("kappa", math.nan, "kappa"),
    ],
)
def test_validation_names_field(field, value, msg):
    with pytest.raises(PrimitivesError) as exc:
        REFERENCE.replace(**{field: value})
    assert msg in str(exc.value)


def test_lambda_min_above_max_rejected():
    with pytest.raises(PrimitivesError) as exc:
        REFERENCE.replace(lambda_min=0.9)
    assert exc.value.field == "lambda_max"


def test_json_roundtrip_and_unknown_keys():
    p = Primitives(b=0.25, theta=1.3)
    assert Primitives.from_json(p.to_json()) == p
    assert Primitives.from_dict({"b": 2}) == Primitives(b=2.0)
    with pytest.raises(PrimitivesError):
        Primitives.from_dict({"beta": 1.0})
    with pytest.raises(PrimitivesError):
        Primitives.from_dict({"pi": "half"})
    with pytest.raises(PrimitivesError):
        Primitives.from_dict({"pi": True})
    assert json.loads(p.to_json())["theta"] == 1.3


def test_theta_scaling_keeps_midpoint():
    p = Primitives(mu0=-1.0, mu1=3.0, theta=2.5)
    lo, hi = p.means
    assert 0.5 * (lo + hi) == pytest.approx(p.midpoint)
    assert hi - lo == pytest.approx(10.0)


def test_lambda_and_w():
    assert lambda_of(0.0, REFERENCE) == pytest.approx(0.2)
    assert lambda_of(1.0, REFERENCE) == pytest.approx(0.8)
    assert lambda_of(0.5, REFERENCE.replace(t_gate=1.0)) == pytest.approx(0.5 * math.exp(-1))
    assert w_of(0.3, REFERENCE.replace(kappa=2.0)) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        w_of(1.2, REFERENCE)
    with pytest.raises(ValueError):
        lambda_of(-0.1, REFERENCE)
    for bad in (0.0, 1.0, -2, 1.5):
        with pytest.raises(ValueError):
            check_rho(bad)


@given(
    rho=st.floats(0, 1),
    lmin=st.floats(0, 1),
    spread=st.floats(0, 1),
    t=st.floats(0, 5),
)
def test_lambda_monotone_in_rho_and_gate(rho, lmin, spread, t):
    lmax = min(1.0, lmin + spread)
    p = Primitives(lambda_min=lmin, lambda_max=lmax, t_gate=t)
    lam = lambda_of(rho, p)
    assert 0.0 <= lam <= 1.0
    assert lam <= lambda_of(min(1.0, rho + 0.1), p) + 1e-15
    assert lambda_of(rho, p.replace(t_gate=t + 0.5)) <= lam + 1e-15


@given(st.dictionaries(st.sampled_from(["pi", "b", "theta", "kappa"]), st.floats(0.01, 0.99), max_size=4))
def test_dict_roundtrip(d):
    p = Primitives.from_dict(d)
    assert Primitives.from_dict(p.to_dict()) == p
