"""Seeded Monte Carlo of one-episode experts under the solved cutoff rule.

Each reputation gets its own PCG64 stream spawned from ``SeedSequence(seed)``
with spawn key ``(i,)``, and draws are made in fixed blocks, so the output is
a pure function of (seed, config) regardless of how the rho list is batched.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .equilibrium import PayoffMode, solve_equilibrium
from .gaussian import Ability, PublicEvent, event_probability, noise, posterior_after, state_means
from .model import Primitives, check_rho, lambda_of
from .statics import RdReport

BLOCK = 65_536


@dataclass(frozen=True)
class SimConfig:
    n_experts: int
    rho_values: tuple[float, ...]
    seed: int = 0
    primitives: Primitives = field(default_factory=Primitives)
    mode: PayoffMode = PayoffMode.FAITHFUL

    def __post_init__(self):
        if int(self.n_experts) < 1:
            raise ValueError("n_experts must be at least 1")
        if not self.rho_values:
            raise ValueError("need at least one reputation")
        for r in self.rho_values:
            check_rho(r)
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class CellOutcome:
    rho: float
    cutoff: float
    n: int
    n_risky: int
    n_implemented: int
    n_success: int
    n_failure: int
    n_safe: int
    mean_posterior: float
    posterior_sd: float

    @property
    def n_unimplemented(self) -> int:
        return self.n_risky - self.n_implemented

    @property
    def emp_eps(self) -> float:
        return self.n_risky / self.n

    @property
    def emp_hit_rate(self) -> float:
        return self.n_success / max(self.n_implemented, 1)

    def event_count(self, event: PublicEvent) -> int:
        return {
            PublicEvent.RISKY_SUCCESS: self.n_success,
            PublicEvent.RISKY_FAILURE: self.n_failure,
            PublicEvent.RISKY_UNIMPLEMENTED: self.n_unimplemented,
            PublicEvent.SAFE: self.n_safe,
        }[event]


@dataclass(frozen=True)
class SimOutcome:
    config: SimConfig
    cells: tuple[CellOutcome, ...]

    def to_rows(self) -> list[dict]:
        rows = []
        for c in self.cells:
            d = asdict(c)
            d.update(emp_eps=c.emp_eps, emp_hit_rate=c.emp_hit_rate, n_unimplemented=c.n_unimplemented)
            rows.append(d)
        return rows


CSV_HEADER = (
    "rho", "cutoff", "n", "n_risky", "n_implemented", "n_success", "n_failure", "n_unimplemented", "n_safe",
    "emp_eps", "emp_hit_rate", "mean_posterior", "posterior_sd",
)


def outcome_csv(out: SimOutcome) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in out.to_rows():
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def outcome_json(out: SimOutcome) -> str:
    cfg = out.config
    doc = {
        "n_experts": cfg.n_experts,
        "seed": cfg.seed,
        "mode": cfg.mode.value,
        "primitives": cfg.primitives.to_dict(),
        "cells": [{k: (v if not isinstance(v, float) or math.isfinite(v) else str(v)) for k, v in r.items()}
                  for r in out.to_rows()],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def _simulate_cell(rng: np.random.Generator, n: int, rho: float, c: float, p: Primitives) -> CellOutcome:
    lam = lambda_of(rho, p)
    sigma = noise(p)
    h0, h1 = state_means(Ability.H, p)
    l0, l1 = state_means(Ability.L, p)
    post = {e: posterior_after(e, c, rho, p) for e in PublicEvent}
    counts = dict.fromkeys(("risky", "impl", "succ", "fail", "safe"), 0)
    post_sum = post_sq = 0.0
    left = n
    while left:
        m = min(BLOCK, left)
        left -= m
        high = rng.random(m) < rho
        good = rng.random(m) < p.pi
        mean = np.where(high, np.where(good, h1, h0), np.where(good, l1, l0))
        x = mean + sigma * rng.standard_normal(m)
        impl_draw = rng.random(m) < lam
        risky = x >= c
        impl = risky & impl_draw
        succ = impl & good
        fail = impl & ~good
        unimpl = risky & ~impl_draw
        safe = ~risky
        k = {
            "risky": int(risky.sum()), "impl": int(impl.sum()), "succ": int(succ.sum()),
            "fail": int(fail.sum()), "safe": int(safe.sum()),
        }
        for key in counts:
            counts[key] += k[key]
        n_unimpl = int(unimpl.sum())
        for ev, cnt in ((PublicEvent.RISKY_SUCCESS, k["succ"]), (PublicEvent.RISKY_FAILURE, k["fail"]),
                        (PublicEvent.RISKY_UNIMPLEMENTED, n_unimpl), (PublicEvent.SAFE, k["safe"])):
            post_sum += cnt * post[ev]
            post_sq += cnt * post[ev] ** 2
    mean_post = post_sum / n
    var = max(post_sq / n - mean_post**2, 0.0)
    return CellOutcome(rho, c, n, counts["risky"], counts["impl"], counts["succ"], counts["fail"], counts["safe"],
                       mean_post, math.sqrt(var))


def run_sim(cfg: SimConfig) -> SimOutcome:
    cells = []
    root = np.random.SeedSequence(int(cfg.seed))
    for i, rho in enumerate(cfg.rho_values):
        eq = solve_equilibrium(float(rho), cfg.primitives, cfg.mode)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(root.entropy, spawn_key=(i,))))
        cells.append(_simulate_cell(rng, int(cfg.n_experts), float(rho), eq.cutoff, cfg.primitives))
    return SimOutcome(cfg, tuple(cells))


# analytic counterparts ----------------------------------------------------

def analytic_cell(rho: float, c: float, p: Primitives) -> dict:
    probs = {e: event_probability(e, c, rho, p) for e in PublicEvent}
    impl = probs[PublicEvent.RISKY_SUCCESS] + probs[PublicEvent.RISKY_FAILURE]
    return {
        "eps": 1.0 - probs[PublicEvent.SAFE],
        "hit_rate": probs[PublicEvent.RISKY_SUCCESS] / impl if impl > 0 else math.nan,
        "events": probs,
        "implemented": impl,
    }


def binomial_se(q: float, n: int) -> float:
    return math.sqrt(max(q * (1.0 - q), 0.0) / max(n, 1))


@dataclass
class Comparison:
    rho_lo: float
    rho_hi: float
    applicable: bool
    eps_nonincreasing: bool | None = None
    hit_nondecreasing: bool | None = None
    analytic_eps_nonincreasing: bool | None = None
    analytic_hit_nondecreasing: bool | None = None
    consistent: bool | None = None
    eps_diff_se: float = math.nan
    hit_diff_se: float = math.nan


@dataclass
class PredictionReport:
    rows: list[dict]
    comparisons: list[Comparison]
    note: str = ""

    @property
    def consistent(self) -> bool | None:
        flags = [c.consistent for c in self.comparisons if c.applicable]
        return None if not flags else all(flags)


def _direction_ok(emp_diff: float, se: float, analytic_ok: bool, k: float) -> bool:
    # an empirical difference inside k standard errors agrees with either sign
    if abs(emp_diff) <= k * se:
        return True
    return (emp_diff <= 0) == analytic_ok


def prediction_report(out: SimOutcome, rd: RdReport | None = None, k: float = 3.0) -> PredictionReport:
    """Selection-on-risk comparisons between adjacent reputations.

    Only pairs with both ends on the RD-verified sub-grid are flagged. The
    empirical flags are compared against the ordering of the analytic
    experimentation and hit rates at the solved cutoffs, not against an
    assumed ordering.
    """
    p = out.config.primitives
    verified = set()
    if rd is not None:
        verified = {r for r, ok in zip(rd.grid, rd.verified) if ok}
    rows = []
    for c in out.cells:
        a = analytic_cell(c.rho, c.cutoff, p)
        rows.append({
            "rho": c.rho, "cutoff": c.cutoff, "on_rd": c.rho in verified,
            "emp_eps": c.emp_eps, "se_eps": binomial_se(c.emp_eps, c.n), "analytic_eps": a["eps"],
            "emp_hit_rate": c.emp_hit_rate, "se_hit": binomial_se(c.emp_hit_rate, c.n_implemented),
            "analytic_hit_rate": a["hit_rate"],
        })
    if len(rows) < 2:
        return PredictionReport(rows, [], note="not applicable: fewer than two reputations")
    comps = []
    for lo, hi in zip(rows, rows[1:]):
        cmp_ = Comparison(lo["rho"], hi["rho"], applicable=lo["on_rd"] and hi["on_rd"])
        if cmp_.applicable:
            d_eps = hi["emp_eps"] - lo["emp_eps"]
            d_hit = hi["emp_hit_rate"] - lo["emp_hit_rate"]
            cmp_.eps_diff_se = math.hypot(lo["se_eps"], hi["se_eps"])
            cmp_.hit_diff_se = math.hypot(lo["se_hit"], hi["se_hit"])
            cmp_.eps_nonincreasing = d_eps <= 0
            cmp_.hit_nondecreasing = d_hit >= 0
            cmp_.analytic_eps_nonincreasing = hi["analytic_eps"] <= lo["analytic_eps"]
            cmp_.analytic_hit_nondecreasing = hi["analytic_hit_rate"] >= lo["analytic_hit_rate"]
            cmp_.consistent = _direction_ok(d_eps, cmp_.eps_diff_se, cmp_.analytic_eps_nonincreasing, k) and \
                _direction_ok(-d_hit, cmp_.hit_diff_se, cmp_.analytic_hit_nondecreasing, k)
        comps.append(cmp_)
    note = "" if any(c.applicable for c in comps) else "no adjacent pair on the RD-verified sub-grid"
    return PredictionReport(rows, comps, note)
