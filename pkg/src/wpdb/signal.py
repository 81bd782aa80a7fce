"""Second-hop signal model: precoding, received sum signal and instantaneous SNR."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ComplexGain
from .errors import InvalidParameterError, SingularChannelError

__all__ = [
    "SINGULAR_CHANNEL_TOL",
    "RelayRealization",
    "TrialRealization",
    "precoding_weight",
    "received_signal",
    "received_signal_reduced",
    "instantaneous_snr",
]

SINGULAR_CHANNEL_TOL = 1e-12


@dataclass(frozen=True)
class RelayRealization:
    g: ComplexGain
    h: ComplexGain
    theta: float
    power: float


@dataclass(frozen=True)
class TrialRealization:
    relays: tuple[RelayRealization, ...]
    noise: ComplexGain
    gamma_d: float
    redraws: int = 0


def precoding_weight(h: ComplexGain, theta: float) -> ComplexGain:
    """Beamforming weight ``exp(-j(phase(h) - theta)) / |h|``.

    The weight inverts the channel up to the residual phase error ``theta``.
    """
    mag = h.magnitude()
    if mag <= SINGULAR_CHANNEL_TOL:
        raise SingularChannelError(f"|h| = {mag:g} is too small to invert")
    return ComplexGain.from_polar(1.0 / mag, -(h.phase() - theta))


def _check_symbol(symbol: ComplexGain) -> complex:
    x = complex(symbol)
    if not math.isclose(abs(x), 1.0, rel_tol=0.0, abs_tol=1e-9):
        raise InvalidParameterError(f"symbol must have unit magnitude, got |x| = {abs(x)!r}")
    return x


def received_signal(
    relays: Sequence[RelayRealization], symbol: ComplexGain, noise: ComplexGain
) -> ComplexGain:
    """Sum signal at the destination, built relay by relay through the channel."""
    x = _check_symbol(symbol)
    z = complex(noise)
    for relay in relays:
        a = complex(precoding_weight(relay.h, relay.theta))
        z += math.sqrt(relay.power) * complex(relay.h) * (a * x)
    return ComplexGain.from_complex(z)


def received_signal_reduced(
    relays: Sequence[RelayRealization], symbol: ComplexGain, noise: ComplexGain
) -> ComplexGain:
    """Sum signal after the channel has been cancelled by precoding."""
    x = _check_symbol(symbol)
    z = complex(noise)
    for relay in relays:
        z += math.sqrt(relay.power) * cmath.exp(1j * relay.theta) * x
    return ComplexGain.from_complex(z)


def instantaneous_snr(
    powers: Sequence[float] | np.ndarray,
    thetas: Sequence[float] | np.ndarray,
    noise_var: float = 1.0,
) -> float:
    """Linear SNR ``|sum_n sqrt(P_n) exp(j theta_n)|^2 / noise_var``."""
    powers = np.asarray(powers, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    if powers.ndim != 1 or powers.shape != thetas.shape or powers.size == 0:
        raise InvalidParameterError(
            f"powers and thetas must be equal-length non-empty 1-D sequences, "
            f"got shapes {powers.shape} and {thetas.shape}"
        )
    if np.any(powers < 0):
        raise InvalidParameterError("relay powers must be non-negative")
    if not noise_var > 0:
        raise InvalidParameterError(f"noise_var must be > 0, got {noise_var!r}")
    amp = np.sqrt(powers)
    i = math.fsum(amp * np.cos(thetas))
    q = math.fsum(amp * np.sin(thetas))
    return (i * i + q * q) / noise_var
