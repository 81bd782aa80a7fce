"""Closed-form mean SNR of distributed beamforming with harvesting relays.

Write ``X_n = sqrt(P_n) cos(theta_n)`` and ``Y_n = sqrt(P_n) sin(theta_n)``
so that ``gamma_D = (sum X_n)^2 + (sum Y_n)^2``.  The mean SNR is
``Var[I] + E[I]^2 + Var[Q] + E[Q]^2`` with ``I = sum X_n``, ``Q = sum Y_n``.
That identity is exact for every N; only the per-relay moments matter.

Two variants of ``Var[X_n]`` are provided.  ``LITERAL`` keeps the
``exp(-s/2)`` factor (``s`` = phase-error variance) printed in the published
corollaries.  ``CORRECTED`` uses ``exp(-s)``, which is what
``E[P] * E[cos^2 theta] = (1 + exp(-2 s)) / (2 lambda_p)`` requires.
The two coincide at ``s = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import SystemParams
from .errors import InvalidParameterError
from .policies import EhPolicy, derived_dist

__all__ = [
    "FormulaVariant",
    "MeanSnrPrediction",
    "mean_x",
    "var_x",
    "var_y",
    "predict_mean_snr",
    "exact_mean_snr",
    "snr_to_db",
]

_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


class FormulaVariant(enum.Enum):
    CORRECTED = "corrected"
    LITERAL = "literal"

    @classmethod
    def parse(cls, value: "str | FormulaVariant") -> "FormulaVariant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameterError(
                f"unknown formula variant {value!r}; expected 'corrected' or 'literal'"
            ) from None


@dataclass(frozen=True)
class MeanSnrPrediction:
    m_i: float
    m_q: float
    var_i: float
    var_q: float
    mean_snr: float
    variant: FormulaVariant


def mean_x(sigma_rayleigh: float, sigma_theta_sq: float) -> float:
    """E[sqrt(P) cos(theta)] for Rayleigh(sigma) amplitude and N(0, s) phase."""
    return sigma_rayleigh * _SQRT_HALF_PI * math.exp(-0.5 * sigma_theta_sq)


def var_x(
    lambda_p: float,
    sigma_theta_sq: float,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> float:
    """Var[sqrt(P) cos(theta)] with P ~ Exp(lambda_p)."""
    s = sigma_theta_sq
    e = math.exp(-s)
    middle = e if FormulaVariant.parse(variant) is FormulaVariant.CORRECTED else math.exp(-0.5 * s)
    # (1/2λ)(1 - e^-s)^2 + (1/λ)·middle - (π/4λ)e^-s ; -expm1 keeps precision near s = 0
    return (0.5 * math.expm1(-s) ** 2 + middle - 0.25 * math.pi * e) / lambda_p


def var_y(lambda_p: float, sigma_theta_sq: float) -> float:
    """Var[sqrt(P) sin(theta)] with P ~ Exp(lambda_p)."""
    return -math.expm1(-2.0 * sigma_theta_sq) / (2.0 * lambda_p)


def predict_mean_snr(
    params: SystemParams,
    policy: EhPolicy,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> MeanSnrPrediction:
    """Mean SNR from in-phase/quadrature moments, normalised by the noise variance."""
    variant = FormulaVariant.parse(variant)
    dist = derived_dist(policy, params.eta, params.source_power)
    n = params.n_relays
    s = params.sigma_theta_sq
    nv = params.noise_var
    # amplitudes scale by 1/sqrt(noise_var), second moments by 1/noise_var
    m_i = n * mean_x(dist.sigma_rayleigh, s) / math.sqrt(nv)
    var_i = n * var_x(dist.lambda_p, s, variant) / nv
    var_q = n * var_y(dist.lambda_p, s) / nv
    m_q = 0.0
    return MeanSnrPrediction(
        m_i=m_i,
        m_q=m_q,
        var_i=var_i,
        var_q=var_q,
        mean_snr=var_i + m_i * m_i + var_q + m_q * m_q,
        variant=variant,
    )


def exact_mean_snr(params: SystemParams, policy: EhPolicy) -> float:
    """E[gamma_D] in closed form; exact for every number of relays."""
    return predict_mean_snr(params, policy, FormulaVariant.CORRECTED).mean_snr


def snr_to_db(linear: float) -> float:
    if not linear > 0:
        raise InvalidParameterError(f"dB conversion needs a positive value, got {linear!r}")
    return 10.0 * math.log10(linear)
