import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cobaycpd.datagen import generate_piecewise, synthetic_preset
from cobaycpd.detector import (DetectionState, DetectorConfig, decide, nearest_rank_quantile,
                               predict_next, run, step)
from cobaycpd.gibbs import GibbsConfig
from cobaycpd.hawkes import ModelParams

FAST = DetectorConfig(gibbs=GibbsConfig(iterations=20, burn_in=10))


def test_decide_nearest_rank_example():
    draws = np.arange(1.0, 101.0)
    (lo, hi), change = decide(draws, 50.0, 0.9)
    assert (lo, hi) == (5.0, 95.0)
    assert not change


def test_decide_closed_interval():
    draws = np.arange(1.0, 101.0)
    assert decide(draws, 5.0, 0.9)[1] is False
    assert decide(draws, 95.0, 0.9)[1] is False
    assert decide(draws, 4.999, 0.9)[1] is True
    assert decide(draws, 1e9, 0.9)[1] is True


def test_decide_needs_two_draws():
    with pytest.raises(ValueError):
        decide([1.0], 1.0, 0.9)
    with pytest.raises(ValueError):
        decide([1.0, 2.0], 1.0, 1.0)


def test_nearest_rank_small_k():
    draws = np.arange(1.0, 51.0)
    assert nearest_rank_quantile(draws, 0.05) == 3.0
    assert nearest_rank_quantile(draws, 0.95) == 48.0
    assert nearest_rank_quantile(draws, 0.0) == 1.0


@settings(max_examples=60)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=80), st.floats(-150, 150),
       st.floats(0.5, 0.85))
def test_wider_interval_never_adds_changes(draws, obs, level):
    (lo_n, hi_n), narrow = decide(draws, obs, level)
    (lo_w, hi_w), wide = decide(draws, obs, min(level + 0.1, 0.99))
    assert lo_w <= lo_n <= hi_n <= hi_w
    assert wide <= narrow


@given(st.permutations(list(range(20))))
def test_decide_order_free(perm):
    draws = np.array(perm, dtype=float)
    assert decide(draws, 3.3, 0.8) == decide(np.sort(draws), 3.3, 0.8)


def test_predict_next_is_after_last_and_seeded(basis):
    ts = np.linspace(0, 5, 30)
    p = ModelParams([0.0, 1.0, 0.5, 0.5, 0.5], 5.0)
    a = predict_next(ts, basis, p, np.random.default_rng(1))
    b = predict_next(ts, basis, p, np.random.default_rng(1))
    assert a == b
    assert a[0] > ts[-1]


def test_predict_next_saturated_gap_is_exponential(basis):
    ts = np.array([0.0, 1.0])
    p = ModelParams([60.0, 0, 0, 0, 0], 4.0)
    rng = np.random.default_rng(0)
    gaps = [predict_next(ts, basis, p, rng)[0] - 1.0 for _ in range(10_000)]
    assert np.mean(gaps) == pytest.approx(0.25, rel=0.05)


def test_predict_next_censors(basis):
    p = ModelParams([-60.0, 0, 0, 0, 0], 4.0)
    value, censored = predict_next(np.array([0.0, 1.0]), basis, p, 0)
    assert censored and value == pytest.approx(11.0)


def test_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(min_window=1)
    with pytest.raises(ValueError):
        DetectorConfig(min_window=20, max_window=10)
    with pytest.raises(ValueError):
        DetectorConfig(n_predictive=51)
    with pytest.raises(ValueError):
        DetectorConfig(n_jobs=0)
    assert DetectorConfig().n_draws == 50
    with pytest.raises(ValueError):
        DetectionState(tau=3, step=2)


def _stream(seed=0):
    return generate_piecewise(synthetic_preset(sizes=(20, 20, 15)), seed=seed)


def test_warmup_records_untested():
    ts = _stream().timestamps
    state = DetectionState()
    for _ in range(FAST.min_window - 1):
        state, rec = step(state, FAST, ts, seed=0)
        assert not rec.tested and not rec.is_change
        assert rec.interval == (rec.observed, rec.observed)
        assert rec.pred_mean is None
    state, rec = step(state, FAST, ts, seed=0)
    assert rec.tested and rec.index == FAST.min_window + 1
    assert rec.predictive_draws.shape == (10,)


def test_step_reset_and_window_cap(basis):
    ts = np.arange(1.0, 40.0)
    cfg = DetectorConfig(gibbs=GibbsConfig(iterations=20, burn_in=10), min_window=5, max_window=8)
    state = DetectionState(tau=1, step=20)
    state2, rec = step(state, cfg, ts, seed=0)
    assert rec.window_start == 13
    if rec.is_change:
        assert state2.tau == 21 and state2.last_draw is None
    else:
        assert state2.tau == 1 and state2.last_draw is not None
    # a far-off observation always resets the regime
    ts2 = ts.copy()
    ts2[20:] += 1e4
    state3, rec3 = step(state, cfg, ts2, seed=0)
    assert rec3.is_change and state3.tau == 21 and state3.last_draw is None
    _, after = step(state3, cfg, ts2, seed=0)
    assert after.window_start == 21 and not after.tested


def test_step_needs_next_event():
    with pytest.raises(ValueError):
        step(DetectionState(step=3), FAST, np.arange(3.0))


def test_run_contract_and_determinism():
    ts = _stream(1).timestamps
    a = run(ts, FAST, seed=3)
    b = run(ts, FAST, seed=3)
    assert len(a.records) == ts.size - 1
    assert a.change_points == b.change_points
    assert all(np.array_equal(x.predictive_draws, y.predictive_draws)
               for x, y in zip(a.records, b.records))
    assert all(r.index > FAST.min_window for r in a.records if r.is_change)
    assert a.runtime == pytest.approx(sum(r.elapsed for r in a.records))


def test_parallel_matches_serial():
    ts = _stream(2).timestamps
    serial = run(ts, FAST, seed=9)
    par = run(ts, DetectorConfig(gibbs=FAST.gibbs, n_jobs=3), seed=9)
    for x, y in zip(serial.records, par.records):
        assert np.array_equal(x.predictive_draws, y.predictive_draws)
        assert x.interval == y.interval and x.is_change == y.is_change


def test_run_rejects_short_or_unsorted():
    with pytest.raises(ValueError):
        run(np.arange(5.0), FAST)
    with pytest.raises(ValueError):
        run(np.r_[np.arange(20.0), 3.0], FAST)
