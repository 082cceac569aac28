"""Payoff difference, best-response cutoff and the stationary cutoff equilibrium."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .gaussian import (
    Posteriors,
    posteriors_of_cutoff,
    signal_quantile_upper,
    signal_survival,
    log_odds_success,
    success_prob,
    success_prob_slope,
)
from .model import Primitives, check_rho, lambda_of, w_of

BRACKET = 60.0
SCAN_POINTS = 241
ROOT_TOL = 1e-12
FIXED_POINT_TOL = 1e-10
DAMPING = 0.5
MAX_ITER = 10_000
DAMPED_BUDGET = 200
STALL_TOL = 1e-8
MAX_WIDEN = 12


class PayoffMode(enum.Enum):
    # FAITHFUL pays nothing reputational when a risky call goes unimplemented.
    FAITHFUL = "faithful"
    EXTENDED = "extended"


class SolverError(RuntimeError):
    pass


class NonMonotoneError(SolverError):
    pass


class NoConvergenceError(SolverError):
    def __init__(self, message: str, residual: float, iterates: tuple[float, float]):
        super().__init__(message)
        self.residual = residual
        self.iterates = iterates


class CycleDetectedError(SolverError):
    def __init__(self, message: str, iterates: tuple[float, float]):
        super().__init__(message)
        self.iterates = iterates


@dataclass(frozen=True)
class Equilibrium:
    rho: float
    cutoff: float
    posteriors: Posteriors
    eps: float
    iterations: int
    residual: float

    @property
    def interior(self) -> bool:
        return math.isfinite(self.cutoff)


def scan_bounds(p: Primitives) -> tuple[float, float]:
    """Search interval for cutoffs: BRACKET noise units either side of the midpoint."""
    half = BRACKET * p.sigma_l
    return p.midpoint - half, p.midpoint + half


def payoff_terms(rho: float, post: Posteriors, p: Primitives, mode: PayoffMode) -> tuple[float, float]:
    """Return (const, slope) with Delta(x) = const + slope * p(x).

    The constant is assembled from posterior differences so that it is exactly
    zero when every event leaves the reputation where it was.
    """
    lam = lambda_of(rho, p)
    ws = w_of(post.r_safe, p)
    const = lam * p.kappa * (post.r_failure - post.r_safe)
    if mode is PayoffMode.EXTENDED:
        const += (1.0 - lam) * p.kappa * (post.r_unimplemented - post.r_safe)
    else:
        const -= (1.0 - lam) * ws
    slope = lam * (p.kappa * (post.r_success - post.r_failure) + p.b)
    return const, slope


def _top(rho: float, post: Posteriors, p: Primitives, mode: PayoffMode) -> float:
    # Delta at p(x) = 1, grouped the same way as the constant
    lam = lambda_of(rho, p)
    top = lam * (p.kappa * (post.r_success - post.r_safe) + p.b)
    if mode is PayoffMode.EXTENDED:
        return top + (1.0 - lam) * p.kappa * (post.r_unimplemented - post.r_safe)
    return top - (1.0 - lam) * w_of(post.r_safe, p)


def _delta_split(x, rho, post, p, mode):
    """Delta on either side of p(x) = 1/2 from the smaller of p and 1 - p.

    Far in the upper tail p(x) rounds to 1 while 1 - p(x) is still resolvable
    from the log-odds, and the best response there is decided by that
    remainder.
    """
    const, slope = payoff_terms(rho, post, p, mode)
    z = log_odds_success(x, rho, p)
    return np.where(z > 0.0, _top(rho, post, p, mode) - slope * expit(-z), const + slope * expit(z))


def delta(x, rho: float, post: Posteriors, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL):
    """Payoff of recommending risk minus payoff of recommending safe at signal ``x``."""
    if np.ndim(x) == 0:
        x = float(x)
        if math.isinf(x):
            const, slope = payoff_terms(rho, post, p, mode)
            return const if x < 0 else _top(rho, post, p, mode)
        return float(_delta_split(x, rho, post, p, mode))
    return _delta_split(np.asarray(x, dtype=float), rho, post, p, mode)


def delta_slope(x, rho: float, post: Posteriors, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL):
    """d Delta / dx = lambda * p'(x) * (W(r_success) - W(r_failure) + b)."""
    _, slope = payoff_terms(rho, post, p, mode)
    return slope * success_prob_slope(x, rho, p)


def best_response_cutoff(rho: float, post: Posteriors, p: Primitives, mode: PayoffMode = PayoffMode.FAITHFUL) -> float:
    """Unique root of Delta in x, or +inf (always safe) / -inf (always risky)."""
    const, slope = payoff_terms(rho, post, p, mode)
    if slope < 0.0:
        raise NonMonotoneError("W(r_success) - W(r_failure) + b < 0: payoff difference decreases in the signal")
    lo, hi = scan_bounds(p)
    grid = np.linspace(lo, hi, SCAN_POINTS)
    values = _delta_split(grid, rho, post, p, mode)
    positive = values > 0.0
    if np.count_nonzero(positive[1:] != positive[:-1]) > 1:
        raise NonMonotoneError("payoff difference changes sign more than once on the scan grid")
    if not positive.any():
        return math.inf
    if positive.all():
        return -math.inf
    i = int(np.argmax(positive))

    def f(x: float) -> float:
        return float(_delta_split(x, rho, post, p, mode))

    return brentq(f, float(grid[i - 1]), float(grid[i]), xtol=ROOT_TOL, rtol=4 * np.finfo(float).eps)


def experimentation_rate(c: float, rho: float, p: Primitives) -> float:
    """Ex-ante probability that the signal clears the cutoff."""
    return signal_survival(c, rho, p)


def solve_equilibrium(
    rho: float,
    p: Primitives,
    mode: PayoffMode = PayoffMode.FAITHFUL,
    c0: float | None = None,
    damping: float = DAMPING,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = MAX_ITER,
    fallback: bool = True,
) -> Equilibrium:
    """Stationary cutoff equilibrium at reputation ``rho``.

    Damped best-response iteration first. Damping acts on the experimentation
    rate ``1 - F_X(c)`` rather than on the cutoff, so the always-safe and
    always-risky sentinels (rates 0 and 1) are ordinary points of a compact
    interval; each step also probes the undamped best response and jumps to
    it when it is already a fixed point.

    Damped iteration only finds fixed points where the best-response map is
    not too steep. With ``fallback`` on, a stalled or cycling iteration (after
    ``DAMPED_BUDGET`` steps) hands over to bisection on ``c - BR(c)`` across
    the scan bracket, which always brackets a fixed point. With ``fallback``
    off the damped iteration runs to ``max_iter`` and failures are raised.
    """
    check_rho(rho)
    c = p.midpoint if c0 is None else c0
    budget = min(max_iter, DAMPED_BUDGET) if fallback else max_iter
    try:
        return _damped(rho, p, mode, c, damping, tol, budget)
    except (NoConvergenceError, CycleDetectedError):
        if not fallback:
            raise
    return _bisect_fixed_point(rho, p, mode, budget)


def _br_of(c: float, rho: float, p: Primitives, mode: PayoffMode) -> float:
    return best_response_cutoff(rho, posteriors_of_cutoff(c, rho, p), p, mode)


def _damped(rho, p, mode, c, damping, tol, max_iter) -> Equilibrium:
    history: list[float] = [c]
    step = math.nan
    for k in range(1, max_iter + 1):
        br = _br_of(c, rho, p, mode)
        if br != c and _same(_br_of(br, rho, p, mode), br, tol):
            c_next = br
        else:
            e = (1.0 - damping) * experimentation_rate(c, rho, p) + damping * experimentation_rate(br, rho, p)
            c_next = signal_quantile_upper(e, rho, p)
        if _same(c_next, c, tol):
            br_next = br if c_next == br else _br_of(c_next, rho, p, mode)
            if _same(br_next, c_next, STALL_TOL):
                residual = abs(br_next - c_next) if math.isfinite(c_next) else 0.0
                return _finish(rho, c_next, p, k, residual)
            # the rate saturated in floating point short of the best response
            raise NoConvergenceError(
                f"damped step stalled at {c_next!r} while the best response is {br_next!r}",
                abs(br_next - c_next), (c_next, br_next),
            )
        step = abs(c_next - c) if math.isfinite(c_next) and math.isfinite(c) else math.inf
        history.append(c_next)
        if len(history) >= 5 and _is_two_cycle(history[-5:], tol):
            raise CycleDetectedError(
                f"best-response iteration alternates between {history[-1]!r} and {history[-2]!r}",
                (history[-2], history[-1]),
            )
        c = c_next
    raise NoConvergenceError(
        f"no convergence after {max_iter} iterations (last step {step:.3g})",
        step,
        (history[-2], history[-1]),
    )


def _bisect_fixed_point(rho, p, mode, spent: int) -> Equilibrium:
    lo, hi = scan_bounds(p)
    iterations = spent
    for sentinel in (-math.inf, math.inf):
        iterations += 1
        if _br_of(sentinel, rho, p, mode) == sentinel:
            return _finish(rho, sentinel, p, iterations, 0.0)
    # gap(c) = c - BR(c) is negative at lo and positive at hi unless a
    # sentinel is itself a fixed point, which was ruled out above.
    # With nearly equal noise scales the posteriors approach their sentinel
    # limits only hundreds of noise units out, so the fixed point can sit
    # beyond the scan bracket; widen geometrically before giving up.
    mid = p.midpoint
    for _ in range(MAX_WIDEN):
        if _br_of(lo, rho, p, mode) > lo:
            break
        lo = mid - 2.0 * (mid - lo)
        iterations += 1
    for _ in range(MAX_WIDEN):
        if _br_of(hi, rho, p, mode) < hi:
            break
        hi = mid + 2.0 * (hi - mid)
        iterations += 1
    if _br_of(lo, rho, p, mode) <= lo or _br_of(hi, rho, p, mode) >= hi:
        raise NoConvergenceError("fixed point lies outside the widened bracket", math.inf, (lo, hi))
    c, residual, spent = _bisect_gap(lo, hi, rho, p, mode)
    return _finish(rho, c, p, iterations + spent, residual)


def _bisect_gap(lo: float, hi: float, rho, p, mode) -> tuple[float, float, int]:
    # Bisect c - BR(c) down to adjacent doubles; where BR is steep the two
    # ends can have quite different residuals, so keep the better one.
    n = 0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        n += 1
        if _br_of(mid, rho, p, mode) < mid:
            hi = mid
        else:
            lo = mid
    best = (math.inf, lo)
    for c in (lo, hi):
        br = _br_of(c, rho, p, mode)
        best = min(best, (abs(br - c) if math.isfinite(br) else math.inf, c))
    return best[1], best[0], n + 2


def refine_equilibrium(
    rho: float, p: Primitives, near: float, mode: PayoffMode = PayoffMode.FAITHFUL, start: float = 1e-3
) -> Equilibrium:
    """Fixed point on the branch through ``near``.

    Brackets a sign change of ``c - BR(c)`` by widening an interval around
    ``near`` and bisects it, so perturbed problems stay on the same
    equilibrium branch instead of whichever one the damped iteration finds.
    Raises NoConvergenceError if the branch runs out of the scan bracket.
    """
    check_rho(rho)
    if not math.isfinite(near):
        if _br_of(near, rho, p, mode) == near:
            return _finish(rho, near, p, 1, 0.0)
        raise NoConvergenceError(f"the {near} sentinel is no longer a fixed point", math.inf, (near, near))
    lo_bound, hi_bound = scan_bounds(p)
    width = start
    iterations = 0
    while True:
        lo, hi = max(near - width, lo_bound), min(near + width, hi_bound)
        iterations += 2
        if _br_of(lo, rho, p, mode) > lo and _br_of(hi, rho, p, mode) < hi:
            break
        if lo == lo_bound and hi == hi_bound:
            raise NoConvergenceError("no fixed point bracketed near the starting cutoff", math.inf, (lo, hi))
        width *= 2.0
    c, residual, spent = _bisect_gap(lo, hi, rho, p, mode)
    return _finish(rho, c, p, iterations + spent, residual)


def _same(a: float, b: float, tol: float) -> bool:
    if math.isfinite(a) and math.isfinite(b):
        return abs(a - b) <= tol
    return a == b


def _is_two_cycle(tail: list[float], tol: float) -> bool:
    # a, b, a, b, a with a != b
    return (
        not _same(tail[-1], tail[-2], tol)
        and _same(tail[-1], tail[-3], tol)
        and _same(tail[-1], tail[-5], tol)
        and _same(tail[-2], tail[-4], tol)
    )


def _finish(rho: float, c: float, p: Primitives, iterations: int, residual: float) -> Equilibrium:
    post = posteriors_of_cutoff(c, rho, p)
    return Equilibrium(rho, c, post, experimentation_rate(c, rho, p), iterations, residual)
