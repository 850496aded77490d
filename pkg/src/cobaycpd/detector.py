"""Online two-step change-point detection.

Each round takes the events since the last declared change point, samples the
parameter posterior with :func:`~cobaycpd.gibbs.run_chain`, simulates one next
timestamp per posterior draw, and flags the observed next event as a change
point when it falls outside the central predictive interval.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_probability, check_timestamps
from .gibbs import GibbsConfig, run_chain
from .hawkes import BasisSet, EventSequence, ModelParams, default_basis, simulate_thinning

__all__ = [
    "DetectorConfig",
    "DetectionState",
    "StepRecord",
    "DetectionResult",
    "predict_next",
    "decide",
    "nearest_rank_quantile",
    "step",
    "run",
]

logger = logging.getLogger(__name__)

# predictive draws are cut off this many window spans after the last event
CENSOR_SPANS = 10.0


@dataclass(frozen=True)
class DetectorConfig:
    confidence_level: float = 0.90
    n_predictive: int = None
    min_window: int = 10
    max_window: int = 200
    gibbs: GibbsConfig = field(default_factory=GibbsConfig)
    basis: BasisSet = field(default_factory=default_basis)
    n_jobs: int = 1

    def __post_init__(self):
        check_probability(self.confidence_level, "confidence_level")
        if int(self.min_window) < 2:
            raise ValueError("min_window must be at least 2")
        if int(self.max_window) < int(self.min_window):
            raise ValueError("max_window must be >= min_window")
        if self.n_predictive is not None and not 1 <= int(self.n_predictive) <= self.gibbs.n_retained:
            raise ValueError("n_predictive must be between 1 and the number of retained draws")
        if int(self.n_jobs) < 1:
            raise ValueError("n_jobs must be positive")

    @property
    def n_draws(self):
        return self.gibbs.n_retained if self.n_predictive is None else int(self.n_predictive)


@dataclass(frozen=True)
class DetectionState:
    """``tau``: 1-based index where the current regime starts; ``step``: index ``m`` of
    the last observed event."""

    tau: int = 1
    step: int = 1
    last_draw: ModelParams = None

    def __post_init__(self):
        if not 1 <= self.tau <= self.step:
            raise ValueError("need 1 <= tau <= step")


@dataclass(frozen=True)
class StepRecord:
    index: int
    predictive_draws: np.ndarray
    interval: tuple
    observed: float
    is_change: bool
    tested: bool
    elapsed: float
    window_start: int
    n_censored: int = 0

    @property
    def pred_mean(self):
        if self.predictive_draws.size == 0:
            return None
        return float(self.predictive_draws.mean())


@dataclass(frozen=True)
class DetectionResult:
    records: list
    change_points: list
    runtime: float

    @property
    def tested_records(self):
        return [r for r in self.records if r.tested]


def nearest_rank_quantile(sorted_draws, q):
    """Order statistic of rank ``ceil(q * K)`` (clamped to ``[1, K]``)."""
    k = sorted_draws.shape[0]
    # round away float noise so that e.g. 0.05 * 100 ranks as 5, not 6
    rank = min(max(math.ceil(round(q * k, 9)), 1), k)
    return float(sorted_draws[rank - 1])


def decide(predictive_draws, observed, confidence_level):
    """Central nearest-rank interval and whether ``observed`` lies outside it.

    The interval is closed: an observation equal to either end is not a change.
    """
    draws = np.sort(np.asarray(predictive_draws, dtype=float))
    if draws.shape[0] < 2:
        raise ValueError("decide needs at least two predictive draws")
    tail = 0.5 * (1.0 - check_probability(confidence_level, "confidence_level"))
    lo = nearest_rank_quantile(draws, tail)
    hi = nearest_rank_quantile(draws, 1.0 - tail)
    return (lo, hi), bool(observed < lo or observed > hi)


def predict_next(window, basis, draw, rng=None, horizon=None):
    """First simulated event after the window's last event.

    Returns
    -------
    value : float
    censored : bool
        True when nothing was accepted before ``t_last + horizon``; ``value``
        is then that cut-off. ``horizon`` defaults to ten window spans.
    """
    ts = window.timestamps if isinstance(window, EventSequence) else np.asarray(window, float)
    if ts.size == 0:
        raise ValueError("predict_next needs a non-empty window")
    t_last = float(ts[-1])
    if horizon is None:
        span = float(ts[-1] - ts[0])
        horizon = CENSOR_SPANS * span if span > 0 else CENSOR_SPANS / draw.lambda_bar
    sim = simulate_thinning(draw, basis, (t_last, t_last + horizon), history=ts, rng=rng,
                            max_events=1)
    if len(sim):
        return float(sim.timestamps[0]), False
    return t_last + horizon, True


def _predictive_seed(seed, index, k):
    return np.random.SeedSequence(seed, spawn_key=(index, 1, k))


def _chain_seed(seed, index):
    return np.random.SeedSequence(seed, spawn_key=(index, 0))


def step(state, config, events, seed=0):
    """One detection round: test event ``m + 1`` against the window ``[tau, m]``.

    Parameters
    ----------
    state : DetectionState
    config : DetectorConfig
    events : ndarray
        Full stream; only ``events[:m + 1]`` is read.
    seed : int
        Root seed; every round and predictive draw derives its own stream
        from ``(seed, m + 1, k)``.

    Returns
    -------
    (DetectionState, StepRecord)
    """
    started = time.perf_counter()
    m = state.step
    if m + 1 > len(events):
        raise ValueError("no event left to test")
    observed = float(events[m])
    start = max(state.tau, m - int(config.max_window) + 1)
    window = np.asarray(events[start - 1:m], dtype=float)

    if window.size < int(config.min_window):
        record = StepRecord(m + 1, np.empty(0), (observed, observed), observed, False, False,
                            time.perf_counter() - started, start)
        return replace(state, step=m + 1), record

    samples = run_chain(window, config.basis, config.gibbs, init=state.last_draw,
                        rng=np.random.default_rng(_chain_seed(seed, m + 1)))
    draws = samples.draws[-config.n_draws:]

    def one(k):
        rng = np.random.default_rng(_predictive_seed(seed, m + 1, k))
        return predict_next(window, config.basis, draws[k], rng)

    if int(config.n_jobs) > 1:
        with ThreadPoolExecutor(max_workers=int(config.n_jobs)) as pool:
            results = list(pool.map(one, range(len(draws))))
    else:
        results = [one(k) for k in range(len(draws))]
    predictive = np.array([r[0] for r in results])
    n_censored = sum(r[1] for r in results)
    interval, is_change = decide(predictive, observed, config.confidence_level)

    if is_change:
        new_state = DetectionState(tau=m + 1, step=m + 1, last_draw=None)
        logger.info("change point declared at index %d (t=%.6g)", m + 1, observed)
    else:
        new_state = DetectionState(tau=state.tau, step=m + 1, last_draw=draws[-1])
    record = StepRecord(m + 1, predictive, interval, observed, is_change, True,
                        time.perf_counter() - started, start, n_censored)
    return new_state, record


def run(events, config=None, seed=0):
    """Run every round ``m + 1 = 2 .. N`` over an event stream.

    Returns
    -------
    DetectionResult
        Per-round records, declared change indices (1-based) and total runtime
        in seconds.
    """
    config = DetectorConfig() if config is None else config
    events = check_timestamps(events, min_events=int(config.min_window) + 1, name="events")
    state = DetectionState()
    records = []
    for _ in range(len(events) - 1):
        state, record = step(state, config, events, seed)
        records.append(record)
    changes = [r.index for r in records if r.is_change]
    return DetectionResult(records, changes, float(sum(r.elapsed for r in records)))
