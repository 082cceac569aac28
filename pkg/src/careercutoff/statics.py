"""Comparative statics of the equilibrium cutoff and the relative-diagnosticity
(RD) check.

Two routes to each derivative: ``analytic_derivative`` applies the implicit
function theorem to ``Delta(c) = 0`` with the posteriors frozen at their
equilibrium values; ``numeric_derivative`` re-solves the whole equilibrium
(posteriors included) at perturbed parameters and takes a central
difference. The two differ by the belief-feedback wedge, which is reported
rather than hidden.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import (
    Equilibrium,
    PayoffMode,
    SolverError,
    delta,
    delta_slope,
    experimentation_rate,
    refine_equilibrium,
    solve_equilibrium,
)
from .gaussian import Posteriors, posteriors_of_cutoff, success_prob, success_prob_partial, success_prob_slope
from .model import Primitives, PrimitivesError, lambda_of, w_of

PARAMS = ("rho", "theta", "pi", "kappa", "b", "lambda", "t_gate")
SIGN_SLACK = 1e-8


class DegenerateError(ArithmeticError):
    pass


class BoundaryHit(SolverError):
    pass


@dataclass(frozen=True)
class StaticsReport:
    param: str
    rho: float
    cutoff: float
    analytic: float
    numeric: float

    @property
    def agree(self) -> bool:
        return abs(self.analytic - self.numeric) <= max(1e-3, 0.05 * abs(self.numeric))


@dataclass(frozen=True)
class RdReport:
    grid: tuple[float, ...]
    drift: tuple[float, ...]
    rho_bar: float | None
    anchor: float
    cutoff: float
    returns: tuple[float, ...] = ()
    drift_lambda: tuple[float, ...] = ()
    drift_beliefs: tuple[float, ...] = ()

    @property
    def verified(self) -> tuple[bool, ...]:
        """Grid points on the RD sub-grid [rho_bar, end]."""
        if self.rho_bar is None:
            return tuple(False for _ in self.grid)
        return tuple(r >= self.rho_bar for r in self.grid)


def _reputational_payoffs(post: Posteriors, p: Primitives) -> tuple[float, float, float, float]:
    return (w_of(post.r_success, p), w_of(post.r_failure, p), w_of(post.r_safe, p), w_of(post.r_unimplemented, p))


def delta_partial(param: str, x: float, rho: float, post: Posteriors, p: Primitives,
                  mode: PayoffMode = PayoffMode.FAITHFUL) -> float:
    """Partial derivative of Delta in a parameter at fixed signal and posteriors."""
    lam = lambda_of(rho, p)
    q = success_prob(x, rho, p)
    w1, w0, ws, wu = _reputational_payoffs(post, p)
    spread = w1 - w0 + p.b
    # d Delta / d lambda
    d_lam = q * w1 + (1.0 - q) * w0 + p.b * q
    if mode is PayoffMode.EXTENDED:
        d_lam -= wu
    if param == "b":
        return lam * q
    if param == "kappa":
        # W = kappa * rho, so the reputational part of Delta is linear in kappa
        out = lam * (q * post.r_success + (1.0 - q) * post.r_failure) - post.r_safe
        if mode is PayoffMode.EXTENDED:
            out += (1.0 - lam) * post.r_unimplemented
        return out
    if param == "lambda":
        return d_lam
    if param == "t_gate":
        return -lam * d_lam
    if param in ("pi", "theta"):
        return lam * spread * success_prob_partial(x, rho, p, param)
    if param == "rho":
        d_lam_d_rho = (p.lambda_max - p.lambda_min) * math.exp(-p.t_gate)
        return d_lam_d_rho * d_lam + lam * spread * success_prob_partial(x, rho, p, "rho")
    raise ValueError(f"unknown parameter {param!r}; expected one of {PARAMS}")


def analytic_derivative(param: str, rho: float, eq: Equilibrium, p: Primitives,
                        mode: PayoffMode = PayoffMode.FAITHFUL) -> float:
    """Implicit-function derivative of the cutoff, posteriors held at ``eq``."""
    if not eq.interior:
        raise DegenerateError("analytic statics need an interior cutoff")
    slope = delta_slope(eq.cutoff, rho, eq.posteriors, p, mode)
    if slope <= 1e-14:
        raise DegenerateError(f"d Delta / dx = {slope:.3g} at the cutoff")
    return -delta_partial(param, eq.cutoff, rho, eq.posteriors, p, mode) / slope


def dc_dlambda_closed_form(rho: float, eq: Equilibrium, p: Primitives) -> float:
    """dc/dlambda written out term by term as the closed-form quotient."""
    c = eq.cutoff
    q = success_prob(c, rho, p)
    w1, w0 = w_of(eq.posteriors.r_success, p), w_of(eq.posteriors.r_failure, p)
    numerator = (q * w1 + (1.0 - q) * w0) + p.b * q
    denominator = lambda_of(rho, p) * success_prob_slope(c, rho, p) * (w1 - w0 + p.b)
    return -numerator / denominator


def _perturb(param: str, rho: float, p: Primitives, value: float) -> tuple[float, Primitives]:
    if param == "rho":
        return value, p
    return rho, p.replace(**{param: value})


def _base_value(param: str, rho: float, p: Primitives) -> float:
    return rho if param == "rho" else getattr(p, param)


def numeric_derivative(param: str, rho: float, p: Primitives, h: float = 1e-4,
                       mode: PayoffMode = PayoffMode.FAITHFUL, base: Equilibrium | None = None) -> float:
    """Central difference of the re-solved cutoff.

    Perturbed problems are solved on the branch of the base equilibrium. The
    step is ``h * max(|value|, 1)``; at a parameter bound (``b = 0`` say) the
    difference falls back to one-sided. ``lambda`` is handled through
    ``t_gate`` by the chain rule ``dc/dlambda = (dc/dT) / (dlambda/dT)``.
    """
    if param == "lambda":
        return numeric_derivative("t_gate", rho, p, h, mode, base) / (-lambda_of(rho, p))
    if param not in PARAMS:
        raise ValueError(f"unknown parameter {param!r}; expected one of {PARAMS}")
    if base is None:
        base = solve_equilibrium(rho, p, mode)
    if not base.interior:
        raise BoundaryHit(f"base equilibrium at rho={rho} is a sentinel ({base.cutoff})")
    x0 = _base_value(param, rho, p)
    step = h * max(abs(x0), 1.0)

    def cutoff_at(value: float) -> float | None:
        try:
            r, q = _perturb(param, rho, p, value)
            if param == "rho" and not 0.0 < r < 1.0:
                return None
        except PrimitivesError:
            return None
        eq = refine_equilibrium(r, q, base.cutoff, mode)
        if not eq.interior:
            raise BoundaryHit(f"perturbed equilibrium at {param}={value} is a sentinel")
        return eq.cutoff

    up, down = cutoff_at(x0 + step), cutoff_at(x0 - step)
    if up is not None and down is not None:
        return (up - down) / (2.0 * step)
    if up is not None:
        return (up - base.cutoff) / step
    if down is not None:
        return (base.cutoff - down) / step
    raise ValueError(f"no admissible perturbation of {param} around {x0}")


def statics_report(param: str, rho: float, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL,
                   base: Equilibrium | None = None) -> StaticsReport:
    if base is None:
        base = solve_equilibrium(rho, p, mode)
    return StaticsReport(
        param=param,
        rho=rho,
        cutoff=base.cutoff,
        analytic=analytic_derivative(param, rho, base, p, mode),
        numeric=numeric_derivative(param, rho, p, mode=mode, base=base),
    )


def reputational_return(rho: float, c: float, p: Primitives, lam: float | None = None,
                        beliefs_at: float | None = None, mode: PayoffMode = PayoffMode.FAITHFUL) -> float:
    """Delta at cutoff ``c``, with posteriors consistent with ``c``.

    ``lam`` overrides the implementation probability and ``beliefs_at``
    evaluates posteriors and the success probability at another reputation;
    both exist to split the reputation drift into its two channels.
    """
    r_b = rho if beliefs_at is None else beliefs_at
    post = posteriors_of_cutoff(c, r_b, p)
    if lam is None:
        lam = lambda_of(rho, p)
    q = success_prob(c, r_b, p) if math.isfinite(c) else float(c > 0)
    w1, w0, ws, wu = _reputational_payoffs(post, p)
    out = lam * (q * w1 + (1.0 - q) * w0) + p.b * lam * q - ws
    if mode is PayoffMode.EXTENDED:
        out += (1.0 - lam) * wu
    return out


def check_rd(rho_grid, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL, h: float = 1e-5,
             anchor: float | None = None) -> RdReport:
    """Relative-diagnosticity check on a reputation grid.

    The cutoff is pinned at the equilibrium cutoff of an anchor reputation
    (grid midpoint by default) so only the reputation dependence of the
    returns moves. ``drift`` is the central-difference derivative of the
    return in ``rho``; ``drift_lambda`` moves only the implementation
    probability and ``drift_beliefs`` only posteriors and the success
    probability. ``rho_bar`` is the first grid point from which the drift stays
    <= 0 to the end of the grid.
    """
    grid = tuple(float(r) for r in rho_grid)
    if not grid or any(not 0.0 < r < 1.0 for r in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("rho grid must be nonempty, strictly ascending and inside (0,1)")
    if anchor is None:
        anchor = grid[len(grid) // 2] if len(grid) % 2 else 0.5 * (grid[len(grid) // 2 - 1] + grid[len(grid) // 2])
    c = solve_equilibrium(anchor, p, mode).cutoff
    returns, drift, d_lam, d_bel = [], [], [], []
    for r in grid:
        lo, hi = max(r - h, h), min(r + h, 1.0 - h)
        width = hi - lo
        returns.append(reputational_return(r, c, p, mode=mode))
        drift.append((reputational_return(hi, c, p, mode=mode) - reputational_return(lo, c, p, mode=mode)) / width)
        d_lam.append(
            (reputational_return(r, c, p, lam=lambda_of(hi, p), beliefs_at=r, mode=mode)
             - reputational_return(r, c, p, lam=lambda_of(lo, p), beliefs_at=r, mode=mode)) / width
        )
        d_bel.append(
            (reputational_return(r, c, p, lam=lambda_of(r, p), beliefs_at=hi, mode=mode)
             - reputational_return(r, c, p, lam=lambda_of(r, p), beliefs_at=lo, mode=mode)) / width
        )
    rho_bar = None
    for i in range(len(grid) - 1, -1, -1):
        if drift[i] > 0.0:
            break
        rho_bar = grid[i]
    return RdReport(grid, tuple(drift), rho_bar, anchor, c, tuple(returns), tuple(d_lam), tuple(d_bel))


@dataclass(frozen=True)
class ScanRow:
    rho: float
    cutoff: float
    eps: float


@dataclass
class ConservatismScan:
    rows: list[ScanRow]
    rd: RdReport
    verdict: str = field(default="")

    @property
    def monotone_on_rd(self) -> bool | None:
        """Cutoffs nondecreasing on the RD sub-grid; None when it is empty."""
        sub = [row.cutoff for row, ok in zip(self.rows, self.rd.verified) if ok]
        if not sub:
            return None
        return all(b >= a - SIGN_SLACK for a, b in zip(sub, sub[1:]))


def conservatism_scan(rho_grid, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL) -> ConservatismScan:
    rows = []
    for r in rho_grid:
        eq = solve_equilibrium(float(r), p, mode)
        rows.append(ScanRow(float(r), eq.cutoff, eq.eps))
    scan = ConservatismScan(rows, check_rd(rho_grid, p, mode))
    ok = scan.monotone_on_rd
    scan.verdict = "vacuous" if ok is None else ("pass" if ok else "fail")
    return scan


def eps_of(c: float, rho: float, p: Primitives) -> float:
    return experimentation_rate(c, rho, p)


def grid_delta(xs, rho: float, post: Posteriors, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL):
    return np.asarray(delta(np.asarray(xs, dtype=float), rho, post, p, mode))
