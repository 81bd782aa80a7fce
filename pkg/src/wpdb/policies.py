"""Energy-harvesting policies and the relay transmit power they induce.

Under time switching the relay harvests for a fraction ``alpha`` of the block
and spends the energy over the remaining half-duplex forwarding slot; under
power splitting it diverts a fraction ``rho`` of the received power for half
a block.  With ``g ~ CN(0, 1)`` the resulting power is exponential with rate
``lambda_p`` and its square root is Rayleigh with scale ``sigma_rayleigh``.

Power splitting admits ``rho = 1``: it leaves no signal power for decoding on
the first hop, but first-hop decoding is assumed error-free here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .core import ComplexGain
from .errors import DegeneratePolicyError, InvalidParameterError

__all__ = [
    "TimeSwitching",
    "PowerSplitting",
    "EhPolicy",
    "DerivedDist",
    "make_policy",
    "power_scale",
    "relay_power",
    "derived_dist",
]


@dataclass(frozen=True)
class TimeSwitching:
    alpha: float
    kind = "ts"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise DegeneratePolicyError(
                f"time switching needs 0 < alpha < 1, got alpha={self.alpha!r}"
            )

    @property
    def fraction(self) -> float:
        return self.alpha


@dataclass(frozen=True)
class PowerSplitting:
    rho: float
    kind = "ps"

    def __post_init__(self) -> None:
        if not 0.0 < self.rho <= 1.0:
            raise DegeneratePolicyError(
                f"power splitting needs 0 < rho <= 1, got rho={self.rho!r}"
            )

    @property
    def fraction(self) -> float:
        return self.rho


EhPolicy = Union[TimeSwitching, PowerSplitting]


def make_policy(kind: str, fraction: float) -> EhPolicy:
    """Build a policy from its short name ("ts" or "ps") and harvesting fraction."""
    kind = kind.lower()
    if kind == "ts":
        return TimeSwitching(fraction)
    if kind == "ps":
        return PowerSplitting(fraction)
    raise InvalidParameterError(f"unknown policy kind {kind!r}; expected 'ts' or 'ps'")


@dataclass(frozen=True)
class DerivedDist:
    """Rate of the exponential relay power and scale of its Rayleigh amplitude."""

    lambda_p: float
    sigma_rayleigh: float

    @property
    def mean_power(self) -> float:
        return 1.0 / self.lambda_p


def _check_eta_ps(eta: float, source_power: float) -> None:
    if not 0.0 <= eta <= 1.0:
        raise InvalidParameterError(f"eta must lie in [0, 1], got {eta!r}")
    if not (source_power > 0 and math.isfinite(source_power)):
        raise InvalidParameterError(f"source_power must be > 0, got {source_power!r}")


def power_scale(policy: EhPolicy, eta: float, source_power: float) -> float:
    """Factor k such that the relay power is ``k * |g|^2``."""
    _check_eta_ps(eta, source_power)
    if isinstance(policy, TimeSwitching):
        return 2.0 * eta * policy.alpha * source_power / (1.0 - policy.alpha)
    if isinstance(policy, PowerSplitting):
        return 2.0 * eta * policy.rho * source_power
    raise InvalidParameterError(f"not an energy-harvesting policy: {policy!r}")


def relay_power(policy: EhPolicy, eta: float, source_power: float, g: ComplexGain) -> float:
    """Transmit power (watts) of a relay whose source channel is ``g``."""
    return power_scale(policy, eta, source_power) * (g.re * g.re + g.im * g.im)


def derived_dist(policy: EhPolicy, eta: float, source_power: float) -> DerivedDist:
    """Distribution parameters of the relay power for a unit-variance source channel.

    Raises:
        DegeneratePolicyError: if ``eta == 0`` (the power is identically zero).
    """
    scale = power_scale(policy, eta, source_power)
    if eta == 0.0:
        raise DegeneratePolicyError("eta = 0 collapses relay power to a point mass at 0")
    # P = scale * |g|^2 with |g|^2 ~ Exp(1): mean scale, Rayleigh sigma^2 = scale / 2
    sigma_sq = 0.5 * scale
    return DerivedDist(lambda_p=1.0 / (2.0 * sigma_sq), sigma_rayleigh=math.sqrt(sigma_sq))
