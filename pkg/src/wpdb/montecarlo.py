"""Monte-Carlo trial engine, mean-SNR estimator and parameter sweeps.

Trial ``i`` of a run draws everything from ``substream(master_seed, i)`` with
a fixed block layout: relay ``n`` (0-based) uses block ``3n`` for ``g_n``,
``3n + 1`` for ``h_n`` and ``3n + 2`` for ``theta_n``; block ``3N`` holds the
destination noise.  A trial whose channel draw is singular is redrawn from the
same substream at block offset ``attempt * 2**32``, so redraws never overlap
another trial's stream.

The batch estimator evaluates trials in fixed chunks with a compiled kernel
and reduces them with exactly-rounded summation, so any worker count gives
bit-identical estimates.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numba
import numpy as np

from .analytic import FormulaVariant, predict_mean_snr, snr_to_db
from .core import (
    ComplexGain,
    RngStream,
    SystemParams,
    _block_normal,
    _block_uniforms,
    _split64,
    draw_cn01,
    draw_phase_error,
)
from .errors import InvalidParameterError, WpdbError
from .policies import EhPolicy, make_policy, power_scale, relay_power
from .signal import SINGULAR_CHANNEL_TOL, RelayRealization, TrialRealization, instantaneous_snr

__all__ = [
    "BLOCKS_PER_RELAY",
    "CHUNK_TRIALS",
    "McEstimate",
    "SweepSpec",
    "SweepRow",
    "run_trial",
    "simulate_gammas",
    "estimate_mean_snr",
    "run_sweep",
]

BLOCKS_PER_RELAY = 3
CHUNK_TRIALS = 1 << 15
Z95 = 1.96
_ATTEMPT_STRIDE = 1 << 32
_MAX_ATTEMPTS = 64

_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_BPR = np.uint64(BLOCKS_PER_RELAY)


@numba.njit(cache=True, nogil=True)
def _gamma_kernel(k0, k1, first_trial, n_relays, scale, sd_theta, inv_noise, out, redraws):
    tol_sq = SINGULAR_CHANNEL_TOL * SINGULAR_CHANNEL_TOL
    for t in range(out.shape[0]):
        trial = np.uint64(first_trial + t)
        s0 = trial & _MASK32
        s1 = trial >> _SHIFT32
        attempt = 0
        while True:
            base = np.uint64(attempt) << _SHIFT32
            ic = 0.0
            qc = 0.0
            singular = False
            for n in range(n_relays):
                b = base + _BPR * np.uint64(n)
                # Box-Muller radius: |g|^2 = |h|^2 = -log(u1) for CN(0,1) draws
                ug, _ = _block_uniforms(k0, k1, s0, s1, b)
                uh, _ = _block_uniforms(k0, k1, s0, s1, b + np.uint64(1))
                if -math.log(uh) <= tol_sq:
                    singular = True
                    break
                theta = sd_theta * _block_normal(k0, k1, s0, s1, b + np.uint64(2))
                amp = math.sqrt(-scale * math.log(ug))
                ic += amp * math.cos(theta)
                qc += amp * math.sin(theta)
            if not singular or attempt >= _MAX_ATTEMPTS:
                break
            attempt += 1
        out[t] = (ic * ic + qc * qc) * inv_noise
        redraws[t] = attempt


@dataclass(frozen=True)
class McEstimate:
    """Sample mean of the instantaneous SNR with a normal-theory 95% interval."""

    mean: float
    sample_var: float
    std_error: float
    trials: int
    ci95_lo: float
    ci95_hi: float
    redraws: int = 0

    @classmethod
    def from_samples(cls, samples: np.ndarray, redraws: int = 0) -> "McEstimate":
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n < 2:
            raise InvalidParameterError(f"need at least 2 samples, got {n}")
        mean = math.fsum(samples) / n
        dev = samples - mean
        sample_var = math.fsum(dev * dev) / (n - 1)
        se = math.sqrt(sample_var / n)
        return cls(mean, sample_var, se, n, mean - Z95 * se, mean + Z95 * se, int(redraws))

    def contains(self, value: float) -> bool:
        return self.ci95_lo <= value <= self.ci95_hi


def run_trial(params: SystemParams, policy: EhPolicy, rng: RngStream) -> TrialRealization:
    """Draw one full system realization from ``rng`` and evaluate its SNR."""
    start = rng.block
    for attempt in range(_MAX_ATTEMPTS + 1):
        stream = RngStream(rng.master_seed, rng.stream_index, start + attempt * _ATTEMPT_STRIDE)
        relays = []
        singular = False
        for _ in range(params.n_relays):
            g = draw_cn01(stream)
            h = draw_cn01(stream)
            if h.magnitude() <= SINGULAR_CHANNEL_TOL:
                singular = True
                break
            theta = draw_phase_error(stream, params.sigma_theta_sq)
            relays.append(RelayRealization(g, h, theta, relay_power(policy, params.eta, params.source_power, g)))
        if not singular:
            break
    else:  # pragma: no cover - needs 65 consecutive probability-zero events
        raise WpdbError("singular channel persisted across all redraw attempts")
    w = draw_cn01(stream)
    noise = ComplexGain(w.re * math.sqrt(params.noise_var), w.im * math.sqrt(params.noise_var))
    rng.block = stream.block
    gamma = instantaneous_snr(
        [r.power for r in relays], [r.theta for r in relays], params.noise_var
    )
    return TrialRealization(tuple(relays), noise, gamma, attempt)


def _chunks(first: int, count: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(size, first + count - s)) for s in range(first, first + count, size)]


def simulate_gammas(
    params: SystemParams,
    policy: EhPolicy,
    trials: int,
    master_seed: int,
    *,
    first_trial: int = 0,
    workers: int = 1,
) -> tuple[np.ndarray, int]:
    """Instantaneous SNR of trials ``first_trial .. first_trial + trials - 1``.

    Returns the per-trial SNR array (in trial order) and the total number of
    singular-channel redraws.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")
    RngStream(master_seed, first_trial + trials - 1)  # range check on seed and indices
    k0, k1 = _split64(int(master_seed))
    scale = power_scale(policy, params.eta, params.source_power)
    sd = math.sqrt(params.sigma_theta_sq)
    inv_noise = 1.0 / params.noise_var
    out = np.empty(trials)
    redraws = np.zeros(trials, dtype=np.int64)

    def work(chunk: tuple[int, int]) -> None:
        start, count = chunk
        lo = start - first_trial
        _gamma_kernel(
            k0, k1, start, params.n_relays, scale, sd, inv_noise,
            out[lo:lo + count], redraws[lo:lo + count],
        )

    chunks = _chunks(first_trial, trials, CHUNK_TRIALS)
    if workers == 1 or len(chunks) == 1:
        for c in chunks:
            work(c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, chunks))
    return out, int(redraws.sum())


def estimate_mean_snr(
    params: SystemParams,
    policy: EhPolicy,
    trials: int,
    master_seed: int,
    *,
    workers: int = 1,
) -> McEstimate:
    """Monte-Carlo estimate of E[gamma_D] over substreams ``0 .. trials - 1``."""
    if trials < 2:
        raise InvalidParameterError(f"trials must be >= 2, got {trials}")
    gammas, redraws = simulate_gammas(params, policy, trials, master_seed, workers=workers)
    return McEstimate.from_samples(gammas, redraws)


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian grid of simulation points for one harvesting policy.

    Rows are produced with fractions outermost, then phase-error variance, then
    relay count.  Every point reuses ``master_seed``, so curves along the grid
    share random numbers.
    """

    policy_kind: str
    fractions: Sequence[float]
    sigma_theta_sq_grid: Sequence[float]
    n_relays_grid: Sequence[int]
    eta: float = 1.0
    source_power: float = 1.0
    trials: int = 100_000
    master_seed: int = 0
    variants: Sequence[FormulaVariant] = (FormulaVariant.CORRECTED, FormulaVariant.LITERAL)
    noise_var: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "policy_kind", str(self.policy_kind).lower())
        for name in ("fractions", "sigma_theta_sq_grid", "n_relays_grid", "variants"):
            values = tuple(getattr(self, name))
            if not values:
                raise InvalidParameterError(f"{name} must not be empty")
            object.__setattr__(self, name, values)
        object.__setattr__(self, "variants", tuple(FormulaVariant.parse(v) for v in self.variants))
        try:
            object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))
            object.__setattr__(self, "sigma_theta_sq_grid", tuple(float(s) for s in self.sigma_theta_sq_grid))
        except (TypeError, ValueError) as exc:
            raise InvalidParameterError(f"grid values must be numbers: {exc}") from None
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 2:
            raise InvalidParameterError(f"trials must be an integer >= 2, got {self.trials!r}")
        RngStream(self.master_seed, 0)

    def points(self) -> Iterable[tuple[float, float, int]]:
        return itertools.product(self.fractions, self.sigma_theta_sq_grid, self.n_relays_grid)

    def validate(self) -> list[tuple[EhPolicy, SystemParams]]:
        """Build every grid point, raising on the first invalid one before any work runs."""
        built = []
        for fraction, s, n in self.points():
            try:
                policy = make_policy(self.policy_kind, fraction)
                params = SystemParams(n, self.source_power, self.eta, s, self.noise_var)
                predict_mean_snr(params, policy)
            except WpdbError as exc:
                raise type(exc)(
                    f"invalid grid point (policy={self.policy_kind}, fraction={fraction!r}, "
                    f"sigma_theta_sq={s!r}, n_relays={n!r}): {exc}"
                ) from exc
            built.append((policy, params))
        return built


@dataclass(frozen=True)
class SweepRow:
    policy_kind: str
    fraction: float
    sigma_theta_sq: float
    n_relays: int
    mc: McEstimate
    predicted: dict[FormulaVariant, float] = field(default_factory=dict)
    mc_db: float = math.nan
    predicted_db: dict[FormulaVariant, float] = field(default_factory=dict)


def _db_or_nan(x: float) -> float:
    return snr_to_db(x) if x > 0 else math.nan


def run_sweep(
    spec: SweepSpec,
    *,
    workers: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> list[SweepRow]:
    points = spec.validate()
    rows = []
    for i, (policy, params) in enumerate(points):
        mc = estimate_mean_snr(params, policy, spec.trials, spec.master_seed, workers=workers)
        predicted = {v: predict_mean_snr(params, policy, v).mean_snr for v in spec.variants}
        rows.append(
            SweepRow(
                policy_kind=spec.policy_kind,
                fraction=policy.fraction,
                sigma_theta_sq=params.sigma_theta_sq,
                n_relays=params.n_relays,
                mc=mc,
                predicted=predicted,
                mc_db=_db_or_nan(mc.mean),
                predicted_db={v: _db_or_nan(p) for v, p in predicted.items()},
            )
        )
        if progress is not None:
            progress(i + 1, len(points))
    return rows
