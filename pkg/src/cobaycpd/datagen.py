"""Piecewise Hawkes streams with known change points.

Segments are simulated independently (empty history each), shifted to start
where the previous segment ended, and concatenated.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive
from .hawkes import EventSequence, ModelParams, default_basis, simulate_thinning

__all__ = [
    "SegmentSpec",
    "LabeledDataset",
    "DEFAULT_WEIGHTS",
    "generate_piecewise",
    "synthetic_preset",
    "stress_configs",
    "STRESS_LEVELS",
]

# mu = 0 with self-excitation from every basis, strongest at lag 1; shared by all
# segments so that only lambda_bar changes at a boundary
DEFAULT_WEIGHTS = (0.0, 1.0, 0.5, 0.5, 0.5)


@dataclass(frozen=True)
class SegmentSpec:
    """One regime, sized either by event count or by duration."""

    lambda_bar: float
    weights: tuple = DEFAULT_WEIGHTS
    n_events: int = None
    duration: float = None

    def __post_init__(self):
        check_positive(self.lambda_bar, "lambda_bar")
        if (self.n_events is None) == (self.duration is None):
            raise ValueError("set exactly one of n_events and duration")
        if self.n_events is not None and int(self.n_events) < 1:
            raise ValueError("n_events must be positive")
        if self.duration is not None:
            check_positive(self.duration, "duration")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @property
    def params(self):
        return ModelParams(np.array(self.weights), self.lambda_bar)


@dataclass(frozen=True)
class LabeledDataset:
    """Events plus the 1-based indices of the first event of every later segment."""

    events: EventSequence
    change_indices: tuple
    boundaries: tuple = ()

    @property
    def timestamps(self):
        return self.events.timestamps


def generate_piecewise(segments, basis=None, seed=None):
    """Simulate and stitch ``segments``.

    A segment sized by ``duration`` spans exactly that long; one sized by
    ``n_events`` ends at its last event. Each segment draws from its own
    child of ``SeedSequence(seed)``.

    Returns
    -------
    LabeledDataset
    """
    segments = list(segments)
    if not segments:
        raise ValueError("need at least one segment")
    basis = default_basis() if basis is None else basis
    children = np.random.SeedSequence(seed).spawn(len(segments))
    pieces, change_indices, boundaries = [], [], []
    start, count = 0.0, 0
    for k, (spec, child) in enumerate(zip(segments, children)):
        rng = np.random.default_rng(child)
        if spec.duration is not None:
            sim = simulate_thinning(spec.params, basis, (0.0, float(spec.duration)), rng=rng)
            length = float(spec.duration)
        else:
            sim = simulate_thinning(spec.params, basis, (0.0, np.inf), rng=rng,
                                    max_events=int(spec.n_events))
            length = float(sim.timestamps[-1])
        if k > 0:
            if len(sim) == 0:
                raise ValueError(f"segment {k} produced no events; lengthen it")
            change_indices.append(count + 1)
            boundaries.append(start)
        pieces.append(sim.timestamps + start)
        count += len(sim)
        start += length
    events = np.concatenate(pieces)
    return LabeledDataset(EventSequence(events, origin=0.0), tuple(change_indices),
                          tuple(boundaries))


def synthetic_preset(weights=DEFAULT_WEIGHTS, sizes=(42, 93, 45)):
    """Three regimes with ``lambda_bar`` 5, 10, 3; change points at indices 43 and 136."""
    return [SegmentSpec(lam, weights, n_events=n) for lam, n in zip((5.0, 10.0, 3.0), sizes)]


STRESS_LEVELS = {
    "n_changes": (1, 2, 3),
    "delta_lambda": (0.1, 1.0, 5.0),
    "delta_t": (5.0, 10.0, 15.0),
}

_N_CHANGES = {1: (5.0, 10.0), 2: (5.0, 10.0, 3.0), 3: (5.0, 10.0, 3.0, 8.0)}
_DELTA_LAMBDA = {0.1: 10.1, 1.0: 9.0, 5.0: 5.0}


def stress_configs(kind, level, weights=DEFAULT_WEIGHTS, segment_events=60):
    """Segment lists for the robustness scenarios.

    ``n_changes``: 1-3 change points over ``lambda_bar`` 5, 10, 3, 8.
    ``delta_lambda``: ``lambda_bar`` 10 followed by 10.1, 9 or 5.
    ``delta_t``: ``lambda_bar`` 10, 5, 15 with the middle regime lasting 5, 10
    or 15 time units. Segments not pinned by the scenario hold
    ``segment_events`` events each.
    """
    if kind not in STRESS_LEVELS:
        raise ValueError(f"unknown stress kind {kind!r}; choose from {sorted(STRESS_LEVELS)}")
    level = float(level)
    if not any(np.isclose(level, v) for v in STRESS_LEVELS[kind]):
        raise ValueError(f"unknown level {level:g} for {kind}; choose from {STRESS_LEVELS[kind]}")
    if kind == "n_changes":
        if int(level) == 2:
            return synthetic_preset(weights)
        return [SegmentSpec(lam, weights, n_events=segment_events)
                for lam in _N_CHANGES[int(level)]]
    if kind == "delta_lambda":
        key = min(_DELTA_LAMBDA, key=lambda v: abs(v - level))
        return [SegmentSpec(10.0, weights, n_events=segment_events),
                SegmentSpec(_DELTA_LAMBDA[key], weights, n_events=segment_events)]
    return [SegmentSpec(10.0, weights, n_events=segment_events),
            SegmentSpec(5.0, weights, duration=level),
            SegmentSpec(15.0, weights, n_events=segment_events)]
