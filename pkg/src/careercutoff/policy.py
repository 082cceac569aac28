"""Design levers: calibrating a success bonus to a target experimentation rate,
and sweeping gatekeeping stringency."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

from .equilibrium import Equilibrium, PayoffMode, solve_equilibrium
from .gaussian import posteriors_of_cutoff, signal_quantile_upper, success_prob
from .model import Primitives, check_rho, lambda_of, w_of

ROUNDTRIP_TOL = 1e-6


class CalibrationError(ValueError):
    pass


class TargetBelowFloor(CalibrationError):
    def __init__(self, target: float, floor: float):
        super().__init__(f"target experimentation {target:.6g} is not above the b=0 floor {floor:.6g}")
        self.target, self.floor = target, floor


class TargetAtUnity(CalibrationError):
    pass


class RoundtripFailure(RuntimeError):
    def __init__(self, message: str, result: "CalibrationResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class CalibrationResult:
    target_eps: float
    cutoff: float
    bonus: float
    achieved_eps: float
    roundtrip_gap: float
    floor_eps: float
    rho: float


def quantile_fx(q: float, rho: float, p: Primitives) -> float:
    """Inverse of the signal CDF F_X; bisection to 1e-12."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie strictly inside (0,1), got {q!r}")
    return signal_quantile_upper(1.0 - q, rho, p)


def floor_eps(rho: float, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL) -> float:
    """Experimentation rate with no bonus, from an actual b=0 solve."""
    return solve_equilibrium(rho, p.replace(b=0.0), mode).eps


def bonus_for_cutoff(c: float, rho: float, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL) -> float:
    """Bonus making ``c`` an equilibrium cutoff, with cutoff-consistent posteriors.

    May be negative: that means ``c`` is lower than any cutoff a nonnegative
    bonus can support.
    """
    post = posteriors_of_cutoff(c, rho, p)
    lam = lambda_of(rho, p)
    q = success_prob(c, rho, p)
    gap = w_of(post.r_safe, p) - lam * (q * w_of(post.r_success, p) + (1.0 - q) * w_of(post.r_failure, p))
    if mode is PayoffMode.EXTENDED:
        gap -= (1.0 - lam) * w_of(post.r_unimplemented, p)
    return gap / (lam * q)


def bonus_for_target(target_eps: float, rho: float, p: Primitives,
                     mode: PayoffMode = PayoffMode.FAITHFUL, check: bool = True) -> CalibrationResult:
    check_rho(rho)
    if target_eps >= 1.0:
        raise TargetAtUnity(f"target experimentation {target_eps!r} must be below 1")
    floor = floor_eps(rho, p, mode)
    if target_eps <= floor:
        raise TargetBelowFloor(target_eps, floor)
    c = quantile_fx(1.0 - target_eps, rho, p)
    bonus = bonus_for_cutoff(c, rho, p, mode)
    if bonus < 0.0:
        raise TargetBelowFloor(target_eps, floor)
    # warm start at c: with several equilibria at the new bonus we want the
    # one the calibration targeted, not whichever a cold start lands on
    eq = solve_equilibrium(rho, p.replace(b=bonus), mode, c0=c)
    res = CalibrationResult(target_eps, c, bonus, eq.eps, abs(eq.eps - target_eps), floor, rho)
    if check and res.roundtrip_gap > ROUNDTRIP_TOL:
        raise RoundtripFailure(
            f"re-solve at b={bonus:.6g} gives eps={eq.eps:.9g}, target {target_eps:.9g} (cutoff {eq.cutoff:.6g} vs {c:.6g})",
            res,
        )
    return res


def eps_of_bonus(b_grid, rho: float, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL) -> list[float]:
    return [solve_equilibrium(rho, p.replace(b=float(b)), mode).eps for b in b_grid]


@dataclass(frozen=True)
class GateRow:
    t: float
    lam: float
    cutoff: float
    eps: float
    b: float


def gatekeeping_sweep(t_grid, rho: float, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL) -> list[GateRow]:
    ts = [float(t) for t in t_grid]
    if not ts or any(t < 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t grid must be nonempty, ascending and nonnegative")
    if p.b <= 0.0:
        raise ValueError("gatekeeping sweep needs a positive bonus b")
    rows = []
    for t in ts:
        q = p.replace(t_gate=t)
        eq: Equilibrium = solve_equilibrium(rho, q, mode)
        rows.append(GateRow(t, lambda_of(rho, q), eq.cutoff, eq.eps, q.b))
    return rows


GATE_HEADER = ("t", "lambda", "c", "eps", "b")


def gate_rows_csv(rows: list[GateRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GATE_HEADER)
    for r in rows:
        w.writerow([repr(r.t), repr(r.lam), repr(r.cutoff), repr(r.eps), repr(r.b)])
    return buf.getvalue()


def calibration_dict(res: CalibrationResult) -> dict:
    d = asdict(res)
    return {k: (v if math.isfinite(v) else str(v)) for k, v in d.items()}
