"""Acceptance criteria for the simulator and closed forms.

Each test records a one-line verdict; ``conftest.py`` prints them at the end
of the session.  Running this file directly prints the same lines.
"""

import json
import math

import numpy as np
import pytest

from wpdb.analytic import FormulaVariant, exact_mean_snr, mean_x, snr_to_db, var_x, var_y
from wpdb.cli import main
from wpdb.core import ComplexGain, RngStream, SystemParams, draw_cn01
from wpdb.montecarlo import SweepSpec, estimate_mean_snr, run_sweep
from wpdb.policies import PowerSplitting, TimeSwitching
from wpdb.signal import RelayRealization, instantaneous_snr, received_signal, received_signal_reduced

RESULTS: dict[str, str] = {}
SEED = 20170601


def record(key: str, passed: bool, detail: str) -> None:
    RESULTS[key] = f"{'PASS' if passed else 'FAIL'} {key}: {detail}"
    assert passed, RESULTS[key]


def test_c1_corrected_closed_form_is_exact():
    worst = (0.0, None)
    failures = []
    for k, policy in enumerate((TimeSwitching(0.5), PowerSplitting(0.5))):
        for n in (1, 2, 5, 15, 50):
            for s in (0.0, 0.1, 0.5, 1.0):
                params = SystemParams(n, 1.0, 1.0, s)
                mc = estimate_mean_snr(params, policy, 1_000_000, SEED + k)
                z = (mc.mean - exact_mean_snr(params, policy)) / mc.std_error
                if abs(z) > abs(worst[0]):
                    worst = (z, (policy.kind, n, s))
                if abs(z) > 3.0:
                    failures.append((policy.kind, n, s, round(z, 2)))
    record(
        "C1 exactness (40 points, 1e6 trials, |z| <= 3)",
        not failures,
        f"worst z={worst[0]:+.2f} at {worst[1]}; failures={failures}",
    )


def test_c2_accuracy_at_fifteen_relays():
    grid = [round(0.1 * i, 1) for i in range(11)]
    spec = SweepSpec("ts", [0.5], grid, [15], trials=100_000, master_seed=SEED)
    rows = run_sweep(spec)
    gaps = [abs(r.mc.mean - r.predicted[FormulaVariant.CORRECTED]) / r.mc.mean for r in rows]
    means = [r.mc.mean for r in rows]
    decreasing = all(b < a for a, b in zip(means, means[1:]))
    more_harvest = estimate_mean_snr(SystemParams(15, 1.0, 1.0, 0.5), TimeSwitching(0.7), 100_000, SEED)
    increasing = more_harvest.mean > rows[5].mc.mean
    record(
        "C2 N=15 relative gap < 2% (1e5 trials)",
        max(gaps) < 0.02 and decreasing and increasing,
        f"max gap={max(gaps):.3%}; decreasing in variance={decreasing}; increasing in alpha={increasing}",
    )


def test_c3_ts_over_ps_gap():
    params = SystemParams(15, 1.0, 1.0, 0.5)
    ratio = exact_mean_snr(params, TimeSwitching(0.5)) / exact_mean_snr(params, PowerSplitting(0.5))
    ts = estimate_mean_snr(params, TimeSwitching(0.5), 1_000_000, SEED + 10)
    ps = estimate_mean_snr(params, PowerSplitting(0.5), 1_000_000, SEED + 11)
    mc_db = snr_to_db(ts.mean / ps.mean)
    gaps = {f: snr_to_db(exact_mean_snr(params, TimeSwitching(f)) / exact_mean_snr(params, PowerSplitting(f)))
            for f in (0.6, 0.8)}
    ok = (
        math.isclose(ratio, 2.0, rel_tol=1e-14)
        and abs(mc_db - 3.0103) <= 0.1
        and all(g > 3.0 for g in gaps.values())
        and math.isclose(gaps[0.6], 3.98, abs_tol=0.005)
        and math.isclose(gaps[0.8], 6.99, abs_tol=0.005)
    )
    record(
        "C3 TS-over-PS gap",
        ok,
        f"predicted ratio={ratio!r} ({snr_to_db(ratio):.4f} dB); mc={mc_db:.4f} dB; "
        f"f=0.6 -> {gaps[0.6]:.4f} dB; f=0.8 -> {gaps[0.8]:.4f} dB",
    )


def test_c4_coherent_gain():
    ts = TimeSwitching(0.5)
    ratio = exact_mean_snr(SystemParams(128, 1, 1, 0.0), ts) / exact_mean_snr(SystemParams(64, 1, 1, 0.0), ts)
    exact_n2 = all(instantaneous_snr(np.ones(n), np.zeros(n)) == float(n * n) for n in range(1, 101))
    record(
        "C4 N^2 coherent gain",
        3.95 <= ratio <= 4.0 and exact_n2,
        f"mean_snr(128)/mean_snr(64)={ratio:.6f}; unit-power gamma == N^2 for N=1..100: {exact_n2}",
    )


def test_c5_signal_path_reduction():
    rng = RngStream(SEED, 5)
    x = ComplexGain(1.0, 0.0)
    worst = 0.0
    for k in range(10_000):
        n = (1, 5, 20)[k % 3]
        relays = []
        for _ in range(n):
            g, h = draw_cn01(rng), draw_cn01(rng)
            theta = float(rng.normal(1)[0])
            relays.append(RelayRealization(g, h, theta, 2.0 * (g.re * g.re + g.im * g.im)))
        w = draw_cn01(rng)
        a, b = received_signal(relays, x, w), received_signal_reduced(relays, x, w)
        worst = max(worst, abs(a.re - b.re), abs(a.im - b.im))
    record("C5 signal-path reduction (1e4 realizations)", worst < 1e-12, f"max component diff={worst:.3e}")


def _relay_components(lam, s, size, stream):
    rng = RngStream(SEED, stream)
    re, im = rng.cn01(size)
    amp = np.sqrt((re * re + im * im) / lam)
    theta = math.sqrt(s) * rng.normal(size)
    return amp * np.cos(theta), amp * np.sin(theta)


def test_c6_moment_identities():
    worst = 0.0
    detail = []
    for i, lam in enumerate((0.5, 2.0)):
        sigma = math.sqrt(1.0 / (2.0 * lam))
        for j, s in enumerate((0.1, 0.5, 1.0)):
            x, y = _relay_components(lam, s, 10_000_000, 100 + 3 * i + j)
            rel = [
                abs(x.mean() - mean_x(sigma, s)) / mean_x(sigma, s),
                abs(x.var(ddof=1) - var_x(lam, s)) / var_x(lam, s),
                abs(y.var(ddof=1) - var_y(lam, s)) / var_y(lam, s),
            ]
            worst = max(worst, *rel)
            detail.append(f"({lam:g},{s:g}):{max(rel):.3%}")
    record("C6 moment identities (1e7 draws, 1%)", worst < 0.01, f"worst rel err={worst:.3%} " + " ".join(detail))


def test_c7_variant_arbitration():
    x, _ = _relay_components(0.5, 0.5, 10_000_000, 200)
    d2 = (x - x.mean()) ** 2
    mc_var = float(d2.sum() / (x.size - 1))
    se = float(d2.std(ddof=1) / math.sqrt(x.size))
    corrected = var_x(0.5, 0.5, FormulaVariant.CORRECTED)
    literal = var_x(0.5, 0.5, FormulaVariant.LITERAL)
    rel = abs(mc_var - corrected) / corrected
    sep = abs(literal - mc_var) / se
    record(
        "C7 variant arbitration",
        rel < 0.01 and sep > 10.0,
        f"mc Var={mc_var:.5f} (SE {se:.1e}); corrected={corrected:.5f} rel {rel:.3%}; "
        f"literal={literal:.5f} at {sep:.0f} SE",
    )


def test_c8_sweep_determinism(tmp_path):
    cfg = tmp_path / "figure_ts.json"
    cfg.write_text(json.dumps({
        "policy_kind": "ts",
        "fractions": [0.5],
        "sigma_theta_sq_grid": [round(0.1 * i, 1) for i in range(11)],
        "n_relays_grid": [2, 15],
        "trials": 100_000,
        "master_seed": SEED,
    }))
    outputs = {}
    for fmt in ("csv", "json"):
        for tag, workers in (("run1", 1), ("run2", 1), ("w4", 4), ("w8", 8)):
            out = tmp_path / f"{tag}.{fmt}"
            assert main(["sweep", str(cfg), "-o", str(out), "--format", fmt, "--workers", str(workers)]) == 0
            outputs[(fmt, tag)] = out.read_bytes()
    same = all(
        len({outputs[(fmt, t)] for t in ("run1", "run2", "w4", "w8")}) == 1 for fmt in ("csv", "json")
    )
    record("C8 sweep determinism (runs x workers 1/4/8, csv+json)", same, f"byte-identical={same}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
