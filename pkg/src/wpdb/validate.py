"""Property battery behind ``wpdb validate``.

Each check returns a :class:`Check` carrying the measured and expected values.
Informational checks report a number without affecting the exit status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .analytic import FormulaVariant, exact_mean_snr, mean_x, predict_mean_snr, snr_to_db, var_x, var_y
from .core import ComplexGain, RngStream, SystemParams, draw_cn01
from .montecarlo import estimate_mean_snr
from .policies import PowerSplitting, TimeSwitching
from .signal import RelayRealization, received_signal, received_signal_reduced

DEFAULT_TRIALS = 100_000
DEFAULT_SEED = 20170601


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: str
    expected: str
    informational: bool = False

    def line(self) -> str:
        status = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        return f"{status} {self.name}: measured={self.measured} expected={self.expected}"


def relay_components(lambda_p: float, sigma_theta_sq: float, size: int, master_seed: int):
    """Samples of ``sqrt(P) cos(theta)`` and ``sqrt(P) sin(theta)`` with P ~ Exp(lambda_p)."""
    rng = RngStream(master_seed, 0)
    re, im = rng.cn01(size)
    amp = np.sqrt((re * re + im * im) / lambda_p)
    theta = math.sqrt(sigma_theta_sq) * rng.normal(size)
    return amp * np.cos(theta), amp * np.sin(theta)


def _variance_se(x: np.ndarray) -> tuple[float, float]:
    d = x - x.mean()
    d2 = d * d
    return float(d2.sum() / (x.size - 1)), float(d2.std(ddof=1) / math.sqrt(x.size))


def check_mc_agreement(trials: int, seed: int) -> Iterator[Check]:
    for policy in (TimeSwitching(0.5), PowerSplitting(0.5)):
        for n in (1, 2, 5, 15):
            for s in (0.0, 0.5, 1.0):
                params = SystemParams(n, 1.0, 1.0, s)
                exact = exact_mean_snr(params, policy)
                mc = estimate_mean_snr(params, policy, trials, seed)
                z = (mc.mean - exact) / mc.std_error
                yield Check(
                    f"corrected-vs-mc {policy.kind} f=0.5 N={n} s={s:g}",
                    abs(z) <= 3.0,
                    f"{mc.mean:.6g} (z={z:+.2f})",
                    f"{exact:.6g} within 3 SE",
                )


def check_ratio() -> Iterator[Check]:
    for f in (0.5, 0.6, 0.8):
        params = SystemParams(15, 1.0, 1.0, 0.5)
        ratio = exact_mean_snr(params, TimeSwitching(f)) / exact_mean_snr(params, PowerSplitting(f))
        want = 1.0 / (1.0 - f)
        yield Check(
            f"ts/ps ratio f={f:g}",
            math.isclose(ratio, want, rel_tol=1e-12),
            f"{ratio:.12g} ({snr_to_db(ratio):.4f} dB)",
            f"{want:.12g} ({snr_to_db(want):.4f} dB)",
        )


def check_n_squared() -> Iterator[Check]:
    ts = TimeSwitching(0.5)
    ratio = exact_mean_snr(SystemParams(128, 1, 1, 0), ts) / exact_mean_snr(SystemParams(64, 1, 1, 0), ts)
    yield Check("n-squared scaling 128/64", 3.95 <= ratio <= 4.0, f"{ratio:.6f}", "[3.95, 4.00]")


def check_closed_form_identities() -> Iterator[Check]:
    worst_coincide = 0.0
    worst_closure = 0.0
    for lam in (0.125, 0.5, 2.0):
        sigma = math.sqrt(1.0 / (2.0 * lam))
        for s in (0.0, 0.1, 0.5, 1.0, 2.0):
            second = var_x(lam, s) + mean_x(sigma, s) ** 2
            want = (1.0 + math.exp(-2.0 * s)) / (2.0 * lam)
            worst_closure = max(worst_closure, abs(second - want) / want)
        for n in (1, 15):
            p = SystemParams(n, 1.0, 1.0, 0.0)
            a = predict_mean_snr(p, TimeSwitching(0.5), FormulaVariant.CORRECTED).mean_snr
            b = predict_mean_snr(p, TimeSwitching(0.5), FormulaVariant.LITERAL).mean_snr
            worst_coincide = max(worst_coincide, abs(a - b) / a)
    yield Check("second-moment closure", worst_closure <= 1e-12, f"{worst_closure:.2e}", "<= 1e-12 relative")
    yield Check("variants coincide at s=0", worst_coincide <= 1e-12, f"{worst_coincide:.2e}", "<= 1e-12 relative")


def check_moments(draws: int, seed: int) -> Iterator[Check]:
    for lam in (0.5, 2.0):
        sigma = math.sqrt(1.0 / (2.0 * lam))
        for s in (0.1, 0.5, 1.0):
            x, y = relay_components(lam, s, draws, seed)
            for name, got, want in (
                ("E[X]", float(x.mean()), mean_x(sigma, s)),
                ("Var[X]", _variance_se(x)[0], var_x(lam, s)),
                ("Var[Y]", _variance_se(y)[0], var_y(lam, s)),
            ):
                rel = abs(got - want) / want
                yield Check(
                    f"moment {name} lambda={lam:g} s={s:g}",
                    rel <= 0.01,
                    f"{got:.6g} (rel {rel:.2%})",
                    f"{want:.6g} within 1%",
                )


def check_literal_discrepancy(draws: int, seed: int) -> Iterator[Check]:
    x, _ = relay_components(0.5, 0.5, draws, seed)
    got, se = _variance_se(x)
    literal = var_x(0.5, 0.5, FormulaVariant.LITERAL)
    corrected = var_x(0.5, 0.5, FormulaVariant.CORRECTED)
    yield Check(
        "literal Var[X] vs mc at lambda=0.5 s=0.5",
        True,
        f"mc={got:.6g} literal={literal:.6g} ({(literal - got) / se:+.1f} SE)",
        f"corrected={corrected:.6g}",
        informational=True,
    )
    p = SystemParams(15, 1.0, 1.0, 0.5)
    lit = predict_mean_snr(p, TimeSwitching(0.5), FormulaVariant.LITERAL).mean_snr
    cor = exact_mean_snr(p, TimeSwitching(0.5))
    yield Check(
        "literal mean SNR at N=15 ts f=0.5 s=0.5",
        True,
        f"literal={lit:.6g} ({snr_to_db(lit) - snr_to_db(cor):+.3f} dB)",
        f"corrected={cor:.6g}",
        informational=True,
    )


def check_signal_path(realizations: int, seed: int) -> Iterator[Check]:
    worst = 0.0
    rng = RngStream(seed, 1)
    x = ComplexGain(1.0, 0.0)
    for k in range(realizations):
        n = (1, 5, 20)[k % 3]
        relays = []
        for _ in range(n):
            g = draw_cn01(rng)
            h = draw_cn01(rng)
            theta = float(rng.normal(1)[0])
            relays.append(RelayRealization(g, h, theta, 2.0 * (g.re ** 2 + g.im ** 2)))
        w = draw_cn01(rng)
        a = received_signal(relays, x, w)
        b = received_signal_reduced(relays, x, w)
        worst = max(worst, abs(a.re - b.re), abs(a.im - b.im))
    yield Check("signal-path reduction", worst < 1e-12, f"{worst:.2e}", "< 1e-12 per component")


def run_battery(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> list[Check]:
    groups: list[Callable[[], Iterator[Check]]] = [
        lambda: check_mc_agreement(trials, seed),
        check_ratio,
        check_n_squared,
        check_closed_form_identities,
        lambda: check_moments(10 * trials, seed),
        lambda: check_literal_discrepancy(10 * trials, seed),
        lambda: check_signal_path(1000, seed),
    ]
    return [c for group in groups for c in group()]
