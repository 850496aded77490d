import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cobaycpd.metrics import RunReport, aggregate, compute_mse, match_changepoints

indices = st.lists(st.integers(1, 300), max_size=12, unique=True)


def test_match_examples():
    m = match_changepoints([43, 136], [44, 136], tol=3)
    assert (m.tp, m.fp, m.fn, m.fnr) == (2, 0, 0, 0.0)
    m = match_changepoints([43, 136], [96, 136], tol=3)
    assert (m.tp, m.fp, m.fn) == (1, 1, 1)


def test_match_one_to_one_and_tn():
    m = match_changepoints([10], [9, 11], tol=3, tested_steps=50)
    assert (m.tp, m.fp, m.fn, m.tn) == (1, 1, 0, 48)
    assert m.fpr == pytest.approx(1 / 49)
    with pytest.raises(ValueError):
        match_changepoints([1], [1], tol=-1)


@given(indices, st.integers(0, 5))
def test_perfect_detection(truth, tol):
    m = match_changepoints(truth, truth, tol, tested_steps=400)
    assert m.fp == m.fn == 0 and m.fnr == 0 and m.fpr == 0


@given(indices, indices)
def test_tol_zero_is_intersection(truth, det):
    m = match_changepoints(truth, det, 0)
    assert m.tp == len(set(truth) & set(det))


@given(indices, indices, st.integers(-50, 50), st.integers(0, 4))
def test_shift_invariance(truth, det, shift, tol):
    a = match_changepoints(truth, det, tol)
    b = match_changepoints([g + 500 + shift for g in truth], [d + 500 + shift for d in det], tol)
    assert (a.tp, a.fp, a.fn) == (b.tp, b.fp, b.fn)


@given(indices, indices, st.integers(0, 4), st.integers(0, 400))
def test_rates_in_unit_interval(truth, det, tol, tested):
    m = match_changepoints(truth, det, tol, tested_steps=tested)
    assert 0 <= m.fnr <= 1 and 0 <= m.fpr <= 1


def test_mse_examples():
    assert compute_mse([(1.0, 1.0), (2.0, 2.0)]) == 0.0
    assert compute_mse([(1.0, 1.1), (2.0, 2.3)]) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        compute_mse([])


@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=20),
       st.randoms())
def test_mse_order_free(pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    assert compute_mse(pairs) == pytest.approx(compute_mse(shuffled))


def test_aggregate_examples():
    one = aggregate([RunReport(0.2, 0.01, 0.05, 10.0)])
    assert one["fnr"]["std"] == 0.0 and one["n_runs"] == 1
    two = aggregate([RunReport(0.0, 0, 0, 1), RunReport(0.25, 0, 0, 1)])
    assert (two["fnr"]["mean"], two["fnr"]["std"]) == (0.125, 0.125)
    assert aggregate([{"fnr": 0.25, "fpr": 0, "mse": 0, "runtime": 1},
                      {"fnr": 0.0, "fpr": 0, "mse": 0, "runtime": 1}]) == two
    with pytest.raises(ValueError):
        aggregate([])


def test_report_dict():
    r = RunReport(0.1, 0.2, 0.3, 120.0)
    assert r.rt_minutes == 2.0
    assert r.to_dict()["runtime_seconds"] == 120.0
