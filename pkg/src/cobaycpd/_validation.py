"""Input validation helpers shared by the estimators and the CLI."""

import numbers

import numpy as np


class DataError(ValueError):
    """Raised when an event stream is malformed (unsorted, ties, non-finite)."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


def check_random_state(seed):
    """Turn ``seed`` into a :class:`numpy.random.Generator`.

    ``None`` gives fresh OS entropy, an int or :class:`~numpy.random.SeedSequence`
    seeds a new generator, and an existing generator is passed through.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise ValueError(f"{seed!r} cannot be used to seed a numpy Generator")


def check_timestamps(X, *, min_events=0, name="X"):
    """Validate an event stream and return it as a 1-D float array.

    Accepts a sequence, a 1-D array or an ``(n, 1)`` column (so that the
    estimators can be fed the same shape sklearn transformers use).

    Raises
    ------
    DataError
        If values are non-finite or not strictly increasing. ``row`` holds the
        zero-based offending position.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise DataError(f"{name} must be 1-D or a single column, got shape {arr.shape}")
    if arr.size < min_events:
        raise DataError(f"{name} needs at least {min_events} events, got {arr.size}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise DataError(f"{name} contains a non-finite timestamp", row=int(bad[0]))
    steps = np.flatnonzero(np.diff(arr) <= 0)
    if steps.size:
        row = int(steps[0]) + 1
        raise DataError(
            f"{name} must be strictly increasing: {float(arr[row])!r} follows "
            f"{float(arr[row - 1])!r} at position {row}",
            row=row,
        )
    return arr


def check_probability(value, name, *, open_interval=True):
    value = float(value)
    ok = 0.0 < value < 1.0 if open_interval else 0.0 <= value <= 1.0
    if not ok:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")
    return value


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value
