"""Gaussian signal model: success probability, public-event likelihoods under a
cutoff strategy and the resulting Bayes posteriors.

Ability ``a`` in {H, L} is unknown to everyone, the expert included; the
public reputation ``rho`` is the probability of ``a = H``. Ability sets the
signal-to-noise ratio ``theta * (mu1 - mu0) / sigma_a``. Both types observe
noise of scale ``sigma_l``; the high type's state means sit further apart::

    x | s, a ~ N(mid +- 0.5 * theta * (mu1 - mu0) * sigma_l / sigma_a, sigma_l)

so the low type sees exactly ``N(mu_s, sigma_l)`` (after the informativeness
scaling) and the high type has the same discriminability as a
``N(mu_s, sigma_h)`` signal. With a common noise scale the likelihood ratio of
the ability mixtures is monotone for every ``rho``, which a pure variance
channel cannot guarantee.

Likelihoods are computed in log space so that cutoffs far in the tails (and
the +-inf sentinels) never produce 0/0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_ndtr, ndtr

from .model import Primitives, lambda_of

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class PublicEvent(enum.Enum):
    RISKY_SUCCESS = "RiskySuccess"
    RISKY_FAILURE = "RiskyFailure"
    RISKY_UNIMPLEMENTED = "RiskyUnimplemented"
    SAFE = "Safe"


EVENTS = tuple(PublicEvent)


class Ability(enum.Enum):
    H = "H"
    L = "L"


@dataclass(frozen=True)
class Posteriors:
    r_success: float
    r_failure: float
    r_safe: float
    r_unimplemented: float

    @classmethod
    def flat(cls, rho: float) -> "Posteriors":
        return cls(rho, rho, rho, rho)

    def of(self, event: PublicEvent) -> float:
        return {
            PublicEvent.RISKY_SUCCESS: self.r_success,
            PublicEvent.RISKY_FAILURE: self.r_failure,
            PublicEvent.RISKY_UNIMPLEMENTED: self.r_unimplemented,
            PublicEvent.SAFE: self.r_safe,
        }[event]


def norm_cdf(z: float) -> float:
    return float(ndtr(z))


def noise(p: Primitives) -> float:
    return p.sigma_l


def state_means(ability: Ability, p: Primitives) -> tuple[float, float]:
    """(mean | s=0, mean | s=1) of the signal for one ability type."""
    sigma_a = p.sigma_h if ability is Ability.H else p.sigma_l
    half = 0.5 * p.theta * (p.mu1 - p.mu0) * p.sigma_l / sigma_a
    return p.midpoint - half, p.midpoint + half


def _components(rho: float, p: Primitives):
    # (log ability weight, mean | s=0, mean | s=1)
    for ability, w in ((Ability.H, rho), (Ability.L, 1.0 - rho)):
        yield (math.log(w) if w > 0.0 else -math.inf, *state_means(ability, p))


def _log_normal_pdf(x, mu, sigma):
    z = (x - mu) / sigma
    return -0.5 * z * z - math.log(sigma) - LOG_SQRT_2PI


def _log_mixture_density(x, state: int, rho: float, p: Primitives):
    """log of the ability-mixed signal density given the state."""
    sigma = noise(p)
    terms = [lw + _log_normal_pdf(x, means[state], sigma) for lw, *means in _components(rho, p)]
    return np.logaddexp(terms[0], terms[1])


def log_odds_success(x, rho: float, p: Primitives):
    """Posterior log-odds of the good state given signal ``x``."""
    return (
        math.log(p.pi) - math.log1p(-p.pi)
        + _log_mixture_density(x, 1, rho, p)
        - _log_mixture_density(x, 0, rho, p)
    )


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def success_prob(x, rho: float, p: Primitives):
    """Pr[s=1 | x] under the ability mixture; vectorised over ``x``."""
    return _scalar(expit(log_odds_success(x, rho, p)))


def _score(x, state: int, rho: float, p: Primitives):
    # d/dx log of the state-conditional mixture density
    sigma = noise(p)
    (lw_h, *m_h), (lw_l, *m_l) = _components(rho, p)
    lh = lw_h + _log_normal_pdf(x, m_h[state], sigma)
    ll = lw_l + _log_normal_pdf(x, m_l[state], sigma)
    r_h = 1.0 / (1.0 + np.exp(ll - lh))
    mean = r_h * m_h[state] + (1.0 - r_h) * m_l[state]
    return (mean - x) / sigma**2


def success_prob_slope(x, rho: float, p: Primitives):
    """Analytic derivative of :func:`success_prob` in ``x``."""
    q = success_prob(x, rho, p)
    return _scalar(q * (1.0 - q) * (_score(x, 1, rho, p) - _score(x, 0, rho, p)))


def _responsibility_h(x, state: int, rho: float, p: Primitives):
    # Pr[a = H | x, s]
    sigma = noise(p)
    (lw_h, *m_h), (lw_l, *m_l) = _components(rho, p)
    lh = lw_h + _log_normal_pdf(x, m_h[state], sigma)
    ll = lw_l + _log_normal_pdf(x, m_l[state], sigma)
    return 1.0 / (1.0 + np.exp(ll - lh))


def success_prob_partial(x, rho: float, p: Primitives, wrt: str):
    """Analytic partial of Pr[s=1 | x] in ``pi``, ``theta`` or ``rho`` at fixed ``x``."""
    q = success_prob(x, rho, p)
    if wrt == "pi":
        return _scalar(q * (1.0 - q) / (p.pi * (1.0 - p.pi)))
    dl = 0.0
    for state, sign in ((1, 1.0), (0, -1.0)):
        r_h = _responsibility_h(x, state, rho, p)
        if wrt == "rho":
            d = r_h / rho - (1.0 - r_h) / (1.0 - rho)
        elif wrt == "theta":
            sigma = noise(p)
            d = 0.0
            for ability, r in ((Ability.H, r_h), (Ability.L, 1.0 - r_h)):
                mu = state_means(ability, p)[state]
                d = d + r * (x - mu) / sigma**2 * (mu - p.midpoint) / p.theta
        else:
            raise ValueError(f"no analytic partial of the success probability in {wrt!r}")
        dl = dl + sign * d
    return _scalar(q * (1.0 - q) * dl)


def signal_density(x, rho: float, p: Primitives):
    """Unconditional density f_X of the signal (ability and state mixed out)."""
    out = p.pi * np.exp(_log_mixture_density(x, 1, rho, p)) + (1.0 - p.pi) * np.exp(
        _log_mixture_density(x, 0, rho, p)
    )
    return _scalar(out)


def _log_tail(c: float, mu: float, sigma: float) -> float:
    """log Pr[x >= c] for x ~ N(mu, sigma)."""
    return float(log_ndtr((mu - c) / sigma))


def _log_head(c: float, mu: float, sigma: float) -> float:
    """log Pr[x < c] for x ~ N(mu, sigma)."""
    return float(log_ndtr((c - mu) / sigma))


def _log(v: float) -> float:
    return math.log(v) if v > 0.0 else -math.inf


def _log_evidence(event: PublicEvent, c: float, ability: Ability, p: Primitives) -> float:
    # event likelihood without the ability-free factors lambda and 1 - lambda
    sigma = noise(p)
    mu0, mu1 = state_means(ability, p)
    log_pi, log_1mpi = math.log(p.pi), math.log1p(-p.pi)
    if event is PublicEvent.RISKY_SUCCESS:
        return log_pi + _log_tail(c, mu1, sigma)
    if event is PublicEvent.RISKY_FAILURE:
        return log_1mpi + _log_tail(c, mu0, sigma)
    if event is PublicEvent.RISKY_UNIMPLEMENTED:
        return float(np.logaddexp(log_pi + _log_tail(c, mu1, sigma), log_1mpi + _log_tail(c, mu0, sigma)))
    return float(np.logaddexp(log_pi + _log_head(c, mu1, sigma), log_1mpi + _log_head(c, mu0, sigma)))


def log_event_likelihood(event: PublicEvent, c: float, rho: float, ability: Ability, p: Primitives) -> float:
    lam = lambda_of(rho, p)
    base = _log_evidence(event, c, ability, p)
    if event in (PublicEvent.RISKY_SUCCESS, PublicEvent.RISKY_FAILURE):
        return _log(lam) + base
    if event is PublicEvent.RISKY_UNIMPLEMENTED:
        return _log(1.0 - lam) + base
    return base


def event_likelihood(event: PublicEvent, c: float, rho: float, ability: Ability, p: Primitives) -> float:
    """Probability of a public event for an expert of the given ability who
    recommends the risky action iff ``x >= c``. The four events sum to one."""
    return math.exp(log_event_likelihood(event, c, rho, ability, p))


def event_probability(event: PublicEvent, c: float, rho: float, p: Primitives) -> float:
    """Public (ability-mixed) probability of an event."""
    return rho * event_likelihood(event, c, rho, Ability.H, p) + (1.0 - rho) * event_likelihood(
        event, c, rho, Ability.L, p
    )


def _limit_posterior(event: PublicEvent, rho: float, p: Primitives) -> float:
    # Posterior of an event that a +-inf cutoff rules out, taken as the limit
    # along the cutoff. Tail ratios of equal-variance normals go to 0 or inf,
    # so the type whose relevant mean lies further out wins outright.
    h0, h1 = state_means(Ability.H, p)
    l0, l1 = state_means(Ability.L, p)
    if event is PublicEvent.SAFE:
        gap = l0 - h0  # c -> -inf: the lowest mean dominates
    elif event is PublicEvent.RISKY_FAILURE:
        gap = h0 - l0
    else:
        gap = h1 - l1
    if gap > 0.0:
        return 1.0
    if gap < 0.0:
        return 0.0
    return rho


def posterior_after(event: PublicEvent, c: float, rho: float, p: Primitives) -> float:
    """Bayes posterior that the expert is high ability after ``event``.

    ``lambda`` multiplies both types' likelihoods and cancels, so events that
    are impossible only because ``lambda`` is 0 or 1 still get a posterior.
    Events ruled out by a sentinel cutoff get the limiting posterior as the
    cutoff runs off to that sentinel.
    """
    lh = _log_evidence(event, c, Ability.H, p)
    ll = _log_evidence(event, c, Ability.L, p)
    if lh == -math.inf and ll == -math.inf:
        return _limit_posterior(event, rho, p)
    d = ll - lh
    # written so a tie (d = 0) returns rho exactly
    if d > 0.0:
        w = rho * math.exp(-d)
        return w / (w + (1.0 - rho))
    return rho / (rho + (1.0 - rho) * math.exp(d))


def posteriors_of_cutoff(c: float, rho: float, p: Primitives) -> Posteriors:
    return Posteriors(
        r_success=posterior_after(PublicEvent.RISKY_SUCCESS, c, rho, p),
        r_failure=posterior_after(PublicEvent.RISKY_FAILURE, c, rho, p),
        r_safe=posterior_after(PublicEvent.SAFE, c, rho, p),
        r_unimplemented=posterior_after(PublicEvent.RISKY_UNIMPLEMENTED, c, rho, p),
    )


def _mixture_cdf(c: float, rho: float, p: Primitives, upper: bool) -> float:
    sigma = noise(p)
    sign = -1.0 if upper else 1.0
    total = 0.0
    for ability, w_a in ((Ability.H, rho), (Ability.L, 1.0 - rho)):
        mu0, mu1 = state_means(ability, p)
        for w_s, mu in ((p.pi, mu1), (1.0 - p.pi, mu0)):
            total += w_a * w_s * float(ndtr(sign * (c - mu) / sigma))
    return total


def signal_cdf(c: float, rho: float, p: Primitives) -> float:
    """F_X(c): unconditional CDF of the signal."""
    return _mixture_cdf(c, rho, p, upper=False)


def signal_survival(c: float, rho: float, p: Primitives) -> float:
    """1 - F_X(c), summed from the upper tails to keep precision for large ``c``."""
    return _mixture_cdf(c, rho, p, upper=True)


def signal_quantile_upper(e: float, rho: float, p: Primitives, tol: float = 1e-12) -> float:
    """The cutoff ``c`` with ``1 - F_X(c) = e``, by bisection; sentinels at 0 and 1."""
    if e <= 0.0:
        return math.inf
    if e >= 1.0:
        return -math.inf
    step = 4.0 * noise(p)
    lo = hi = p.midpoint
    while signal_survival(lo, rho, p) < e:
        lo -= step
        step *= 2.0
    step = 4.0 * noise(p)
    while signal_survival(hi, rho, p) > e:
        hi += step
        step *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if signal_survival(mid, rho, p) > e:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
