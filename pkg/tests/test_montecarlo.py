import math

import numpy as np
import pytest

from wpdb.analytic import FormulaVariant, exact_mean_snr
from wpdb.core import RngStream, SystemParams, substream
from wpdb.errors import DegeneratePolicyError, InvalidParameterError
from wpdb.montecarlo import (
    CHUNK_TRIALS,
    McEstimate,
    SweepSpec,
    estimate_mean_snr,
    run_sweep,
    run_trial,
    simulate_gammas,
)
from wpdb.policies import PowerSplitting, TimeSwitching, relay_power
from wpdb.signal import instantaneous_snr

TS = TimeSwitching(0.5)


def test_single_relay_gamma_is_power():
    params = SystemParams(1, 1.0, 1.0, 0.0)
    trial = run_trial(params, TS, substream(3, 0))
    assert trial.gamma_d == pytest.approx(trial.relays[0].power, rel=1e-15)
    assert trial.redraws == 0


def test_run_trial_deterministic():
    params = SystemParams(2, 1.0, 1.0, 0.3)
    assert run_trial(params, TS, substream(42, 0)) == run_trial(params, TS, substream(42, 0))


def test_run_trial_draw_order():
    params = SystemParams(2, 2.0, 0.8, 0.4)
    trial = run_trial(params, TS, substream(42, 5))
    rng = RngStream(42, 5)
    re, im = rng.cn01(7)
    theta = math.sqrt(0.4) * RngStream(42, 5).normal(7)
    for n, relay in enumerate(trial.relays):
        assert (relay.g.re, relay.g.im) == (re[3 * n], im[3 * n])
        assert (relay.h.re, relay.h.im) == (re[3 * n + 1], im[3 * n + 1])
        assert relay.theta == theta[3 * n + 2]
        assert relay.power == relay_power(TS, 0.8, 2.0, relay.g)
    assert (trial.noise.re, trial.noise.im) == (re[6], im[6])
    assert trial.gamma_d == instantaneous_snr([r.power for r in trial.relays], [r.theta for r in trial.relays])


@pytest.mark.parametrize("n,s,noise", [(1, 0.0, 1.0), (3, 0.5, 1.0), (20, 1.2, 2.5)])
def test_kernel_matches_scalar_trials(n, s, noise):
    params = SystemParams(n, 1.5, 0.7, s, noise)
    policy = PowerSplitting(0.4)
    gammas, redraws = simulate_gammas(params, policy, 50, 9, first_trial=100)
    scalar = [run_trial(params, policy, substream(9, 100 + i)).gamma_d for i in range(50)]
    np.testing.assert_allclose(gammas, scalar, rtol=1e-12)
    assert redraws == 0


def test_mc_estimate_fields():
    est = McEstimate.from_samples(np.array([1.0, 2.0, 3.0, 4.0]))
    assert est.mean == 2.5
    assert est.sample_var == pytest.approx(5 / 3)
    assert est.std_error == pytest.approx(math.sqrt(5 / 12))
    assert est.ci95_lo == pytest.approx(2.5 - 1.96 * est.std_error)
    assert est.ci95_lo <= est.mean <= est.ci95_hi
    with pytest.raises(InvalidParameterError):
        McEstimate.from_samples(np.array([1.0]))


def test_estimate_single_relay():
    est = estimate_mean_snr(SystemParams(1, 1.0, 1.0, 0.0), TS, 1_000_000, 12)
    assert abs(est.mean - 2.0) <= 3 * est.std_error


def test_estimate_n2_exact_oracle():
    params = SystemParams(2, 1.0, 1.0, 0.0)
    est = estimate_mean_snr(params, TS, 10_000_000, 13)
    assert abs(est.mean - 7.141592653589799) <= 3 * est.std_error


def test_estimate_n15_oracle():
    params = SystemParams(15, 1.0, 1.0, 0.5)
    est = estimate_mean_snr(params, TS, 1_000_000, 14)
    assert abs(est.mean - exact_mean_snr(params, TS)) <= 3 * est.std_error
    assert est.mean == pytest.approx(230.1, abs=3 * est.std_error + 0.05)


@pytest.mark.parametrize("workers", [1, 2, 8])
def test_worker_count_does_not_change_result(workers):
    params = SystemParams(5, 1.0, 1.0, 0.5)
    trials = 3 * CHUNK_TRIALS + 17
    ref = estimate_mean_snr(params, TS, trials, 77)
    got = estimate_mean_snr(params, TS, trials, 77, workers=workers)
    assert got == ref


def test_gammas_addressable_by_trial():
    params = SystemParams(4, 1.0, 1.0, 0.2)
    whole, _ = simulate_gammas(params, TS, 1000, 5)
    part, _ = simulate_gammas(params, TS, 100, 5, first_trial=450)
    assert np.array_equal(whole[450:550], part)


def test_std_error_scaling():
    params = SystemParams(5, 1.0, 1.0, 0.5)
    a = estimate_mean_snr(params, TS, 50_000, 3)
    b = estimate_mean_snr(params, TS, 200_000, 4)
    assert b.std_error / a.std_error == pytest.approx(0.5, rel=0.2)


def test_trial_independence():
    gammas, _ = simulate_gammas(SystemParams(5, 1.0, 1.0, 0.5), TS, 100_000, 8)
    d = gammas - gammas.mean()
    lag1 = float(np.dot(d[:-1], d[1:]) / np.dot(d, d))
    assert abs(lag1) < 0.01


def test_estimate_needs_two_trials():
    with pytest.raises(InvalidParameterError):
        estimate_mean_snr(SystemParams(1, 1.0, 1.0, 0.0), TS, 1, 0)


class TestSweep:
    def test_single_point(self):
        spec = SweepSpec("ts", [0.5], [0.0], [1], trials=100_000, master_seed=1)
        (row,) = run_sweep(spec)
        assert abs(row.mc.mean - 2.0) <= 3 * row.mc.std_error
        assert row.predicted[FormulaVariant.CORRECTED] == pytest.approx(2.0, rel=1e-15)
        assert row.mc_db == pytest.approx(10 * math.log10(row.mc.mean))

    def test_order_and_cardinality(self):
        spec = SweepSpec("ps", [0.3, 0.6], [0.0, 0.5, 1.0], [2, 4], trials=100, master_seed=1)
        rows = run_sweep(spec)
        assert len(rows) == 12
        keys = [(r.fraction, r.sigma_theta_sq, r.n_relays) for r in rows]
        assert keys == [(f, s, n) for f in (0.3, 0.6) for s in (0.0, 0.5, 1.0) for n in (2, 4)]

    def test_invalid_point_named_before_work(self):
        calls = []
        spec = SweepSpec("ts", [0.5, 1.0], [0.0], [2], trials=100)
        with pytest.raises(DegeneratePolicyError, match="fraction=1.0"):
            run_sweep(spec, progress=lambda i, n: calls.append(i))
        assert calls == []

    @pytest.mark.parametrize(
        "kwargs",
        [dict(fractions=[]), dict(trials=1), dict(n_relays_grid=[0]), dict(sigma_theta_sq_grid=[-0.1])],
    )
    def test_invalid_specs(self, kwargs):
        base = dict(policy_kind="ts", fractions=[0.5], sigma_theta_sq_grid=[0.0], n_relays_grid=[2], trials=10)
        base.update(kwargs)
        with pytest.raises(InvalidParameterError):
            SweepSpec(**base).validate()

    def test_seed_determinism(self):
        spec = SweepSpec("ts", [0.5], [0.0, 0.5], [2, 5], trials=5000, master_seed=99)
        assert run_sweep(spec) == run_sweep(spec, workers=4)


def test_figure_grid_separates_variants():
    grid = [round(0.1 * i, 1) for i in range(11)]
    rows = run_sweep(SweepSpec("ts", [0.5], grid, [2, 15], trials=100_000, master_seed=20170601))
    for r in rows:
        corrected = r.predicted[FormulaVariant.CORRECTED]
        literal = r.predicted[FormulaVariant.LITERAL]
        # every point shares one seed, so a 1.96 SE band is too tight to demand jointly
        assert abs(r.mc.mean - corrected) <= 3 * r.mc.std_error
        if r.sigma_theta_sq >= 0.5:
            assert not r.mc.contains(literal)
            assert literal - r.mc.mean > 20 * r.mc.std_error
