"""Model primitives and the parametric forms of implementation intensity and
reputational payoff.

Everything downstream takes a validated :class:`Primitives` instance. The
dataclass is frozen, so an instance can be shared freely between workers.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, fields


class PrimitivesError(ValueError):
    """Raised when a primitive violates its admissible range."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class Primitives:
    pi: float = 0.5
    mu0: float = 0.0
    mu1: float = 1.0
    sigma_h: float = 0.5
    sigma_l: float = 1.0
    theta: float = 1.0
    kappa: float = 1.0
    b: float = 0.0
    t_gate: float = 0.0
    lambda_min: float = 0.2
    lambda_max: float = 0.8

    def replace(self, **changes) -> "Primitives":
        return validate(dataclasses.replace(self, **changes))

    @property
    def means(self) -> tuple[float, float]:
        """Signal means (bad state, good state) after informativeness scaling.

        The separation ``mu1 - mu0`` is multiplied by ``theta`` symmetrically
        about the unscaled midpoint, so the midpoint itself never moves.
        """
        mid = 0.5 * (self.mu0 + self.mu1)
        half = 0.5 * self.theta * (self.mu1 - self.mu0)
        return mid - half, mid + half

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.mu0 + self.mu1)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Primitives":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise PrimitivesError(unknown[0], f"unknown primitive field(s): {', '.join(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise PrimitivesError(key, f"{key} must be a number, got {value!r}")
            kwargs[key] = float(value)
        return validate(cls(**kwargs))

    @classmethod
    def from_json(cls, text: str) -> "Primitives":
        return cls.from_dict(json.loads(text))


REFERENCE = Primitives()


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise PrimitivesError(field, message)


def validate(p: Primitives) -> Primitives:
    """Return ``p`` unchanged if every range constraint holds, else raise."""
    for f in fields(p):
        v = getattr(p, f.name)
        _require(isinstance(v, (int, float)) and math.isfinite(v), f.name, f"{f.name} must be a finite number")
    _require(0.0 < p.pi < 1.0, "pi", "pi must lie strictly inside (0,1)")
    _require(p.mu1 > p.mu0, "mu1", "mu1 must exceed mu0")
    _require(p.sigma_h > 0.0, "sigma_h", "sigma_h must be positive")
    _require(p.sigma_l >= p.sigma_h, "sigma_l", "sigma_l must be at least sigma_h")
    _require(p.theta > 0.0, "theta", "theta must be positive")
    _require(p.kappa >= 0.0, "kappa", "kappa must be nonnegative")
    _require(p.b >= 0.0, "b", "b must be nonnegative")
    _require(p.t_gate >= 0.0, "t_gate", "t_gate must be nonnegative")
    _require(0.0 <= p.lambda_min, "lambda_min", "lambda_min must be nonnegative")
    _require(p.lambda_min <= p.lambda_max, "lambda_max", "lambda_max must be at least lambda_min")
    _require(p.lambda_max <= 1.0, "lambda_max", "lambda_max must not exceed 1")
    return p


def check_rho(rho: float) -> float:
    """Reputations live in the open unit interval."""
    if not (isinstance(rho, (int, float)) and 0.0 < rho < 1.0):
        raise ValueError(f"reputation must lie strictly inside (0,1), got {rho!r}")
    return float(rho)


def lambda_of(rho: float, p: Primitives) -> float:
    """Implementation probability: affine in reputation, damped by gatekeeping."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0,1], got {rho!r}")
    return (p.lambda_min + (p.lambda_max - p.lambda_min) * rho) * math.exp(-p.t_gate)


def w_of(rho_post: float, p: Primitives) -> float:
    """Reputational payoff ``kappa * rho_post``."""
    if not 0.0 <= rho_post <= 1.0:
        raise ValueError(f"posterior reputation must lie in [0,1], got {rho_post!r}")
    return p.kappa * rho_post
