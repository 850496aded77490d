"""Sigmoid-link nonlinear Hawkes process with beta-density influence bases.

The conditional intensity is ``lambda_bar * sigmoid(h(t))`` where the
activation ``h(t) = w . Phi(t)`` combines a baseline ``mu = w[0]`` with the
cumulative basis responses ``Phi_b(t) = sum_{t_i < t} phi_b(t - t_i)``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln, expit

from ._validation import DataError, check_positive, check_random_state

__all__ = [
    "Basis",
    "BasisSet",
    "ModelParams",
    "EventSequence",
    "sigmoid",
    "basis_eval",
    "features",
    "features_at",
    "activation",
    "intensity",
    "log_likelihood",
    "simulate_thinning",
    "default_basis",
]


def sigmoid(z):
    """Logistic function, overflow-free for any finite input."""
    return expit(z)


@dataclass(frozen=True)
class Basis:
    """A beta density on ``[shift, shift + scale]``."""

    alpha: float
    beta: float
    scale: float
    shift: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "scale"):
            check_positive(getattr(self, name), name)
        if not np.isfinite(self.shift):
            raise ValueError(f"shift must be finite, got {self.shift}")


@dataclass(frozen=True)
class BasisSet:
    """Influence bases sharing a common support bound ``[0, support_bound]``.

    Bases whose beta support pokes outside ``[0, support_bound]`` are cut off
    there and not renormalised; the mixing weights absorb the lost mass.
    An empty set is allowed and gives the homogeneous model ``Phi = [1]``.
    """

    bases: tuple
    support_bound: float

    def __post_init__(self):
        bases = tuple(b if isinstance(b, Basis) else Basis(**dict(b)) for b in self.bases)
        object.__setattr__(self, "bases", bases)
        check_positive(self.support_bound, "support_bound")
        object.__setattr__(self, "_alpha", np.array([b.alpha for b in bases]))
        object.__setattr__(self, "_beta", np.array([b.beta for b in bases]))
        object.__setattr__(self, "_scale", np.array([b.scale for b in bases]))
        object.__setattr__(self, "_shift", np.array([b.shift for b in bases]))
        object.__setattr__(
            self, "_log_norm", betaln(self._alpha, self._beta) + np.log(self._scale)
        )

    def __len__(self):
        return len(self.bases)

    @property
    def n_features(self):
        return len(self.bases) + 1

    def evaluate(self, lags):
        """Evaluate every basis at ``lags``; returns shape ``(B,) + lags.shape``."""
        x = np.asarray(lags, dtype=float)
        flat = x.ravel()
        out = np.zeros((len(self.bases), flat.size))
        sel = np.flatnonzero((flat > 0.0) & (flat < self.support_bound))
        if sel.size:
            z = (flat[sel][None, :] - self._shift[:, None]) / self._scale[:, None]
            ok = (z > 0.0) & (z < 1.0)
            z = np.where(ok, z, 0.5)
            log_pdf = (
                (self._alpha[:, None] - 1.0) * np.log(z)
                + (self._beta[:, None] - 1.0) * np.log1p(-z)
                - self._log_norm[:, None]
            )
            out[:, sel] = np.where(ok, np.exp(log_pdf), 0.0)
        return out.reshape((len(self.bases),) + x.shape)


def default_basis(shifts=(-2.0, -1.0, 0.0, 1.0), alpha=50.0, beta=50.0, scale=6.0,
                  support_bound=6.0):
    """Beta(50, 50) bases of width 6 at the given shifts, cut to ``[0, 6]``."""
    return BasisSet(
        tuple(Basis(alpha, beta, scale, float(s)) for s in shifts), support_bound
    )


@dataclass(frozen=True)
class ModelParams:
    """``weights = [mu, w_1, ..., w_B]`` and the intensity upper bound."""

    weights: np.ndarray
    lambda_bar: float

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, ndmin=1)
        if w.ndim != 1 or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a finite 1-D vector")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "lambda_bar", check_positive(self.lambda_bar, "lambda_bar"))

    @property
    def mu(self):
        return float(self.weights[0])

    def check_basis(self, basis):
        if self.weights.shape[0] != basis.n_features:
            raise ValueError(
                f"weights have length {self.weights.shape[0]}, basis set needs {basis.n_features}"
            )


@dataclass(frozen=True)
class EventSequence:
    """Strictly increasing timestamps observed from ``origin`` onwards."""

    timestamps: np.ndarray
    origin: float = field(default=None)

    def __post_init__(self):
        ts = np.array(self.timestamps, dtype=float, ndmin=1)
        if ts.ndim != 1:
            raise DataError("timestamps must be 1-D")
        if ts.size:
            bad = np.flatnonzero(np.diff(ts) <= 0)
            if bad.size:
                raise DataError("timestamps must be strictly increasing", row=int(bad[0]) + 1)
        origin = self.origin
        if origin is None:
            origin = 0.0 if ts.size == 0 else min(0.0, float(ts[0]))
        origin = float(origin)
        if ts.size and ts[0] < origin:
            raise DataError("timestamps must not precede the origin", row=0)
        ts.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "origin", origin)

    def __len__(self):
        return self.timestamps.shape[0]

    @classmethod
    def window(cls, timestamps, start, stop):
        """Contiguous slice ``timestamps[start:stop]`` anchored at its first event."""
        ts = np.asarray(timestamps, dtype=float)[start:stop]
        return cls(ts, origin=float(ts[0]) if ts.size else 0.0)

    @property
    def span(self):
        """``t_last - t_first`` (0 for fewer than two events)."""
        if len(self) < 2:
            return 0.0
        return float(self.timestamps[-1] - self.timestamps[0])


def basis_eval(basis, x, support_bound):
    """Value of a single :class:`Basis` at lag ``x``, zero outside ``(0, support_bound)``."""
    val = BasisSet((basis,), support_bound).evaluate(np.asarray(x, dtype=float))[0]
    return float(val) if np.ndim(val) == 0 else val


def features_at(times, history, basis):
    """Feature rows ``Phi(t)`` for many query times.

    Only events inside ``(t - support_bound, t)`` are visited, which is exact
    because every basis vanishes outside its support.

    Parameters
    ----------
    times : array_like of shape (n_times,)
    history : array_like of shape (n_events,)
        Sorted past event times.
    basis : BasisSet

    Returns
    -------
    ndarray of shape (n_times, B + 1)
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    history = np.asarray(history, dtype=float)
    out = np.zeros((times.shape[0], basis.n_features))
    out[:, 0] = 1.0
    if history.size == 0 or times.size == 0:
        return out
    lo = np.searchsorted(history, times - basis.support_bound, side="right")
    hi = np.searchsorted(history, times, side="left")
    width = int((hi - lo).max())
    if width <= 0:
        return out
    idx = lo[:, None] + np.arange(width)[None, :]
    valid = idx < hi[:, None]
    lags = times[:, None] - history[np.minimum(idx, history.size - 1)]
    lags = np.where(valid, lags, -1.0)
    out[:, 1:] = basis.evaluate(lags).sum(axis=2).T
    return out


def features(seq, basis, t):
    """``Phi(t) = [1, Phi_1(t), ..., Phi_B(t)]`` using events strictly before ``t``."""
    ts = seq.timestamps if isinstance(seq, EventSequence) else np.asarray(seq, dtype=float)
    return features_at([t], ts, basis)[0]


def activation(params, phi):
    """``h = w . Phi``."""
    w = params.weights if isinstance(params, ModelParams) else np.asarray(params, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if phi.shape[-1] != w.shape[0]:
        raise ValueError(f"dimension mismatch: {w.shape[0]} weights vs {phi.shape[-1]} features")
    return phi @ w


def intensity(params, seq, basis, t):
    """Conditional intensity ``lambda_bar * sigmoid(h(t))``."""
    return params.lambda_bar * float(sigmoid(activation(params, features(seq, basis, t))))


def log_likelihood(params, seq, basis, quadrature_points=1000, t_end=None):
    """Log-likelihood of ``seq`` on ``[seq.origin, t_end]``.

    The compensator integral is approximated with the composite trapezoid rule
    on ``quadrature_points`` evenly spaced nodes. ``t_end`` defaults to the
    last event, which matches the window likelihood used by the detector.
    """
    if len(seq) == 0:
        raise ValueError("log_likelihood needs at least one event")
    if quadrature_points < 2:
        raise ValueError("quadrature_points must be >= 2")
    params.check_basis(basis)
    ts = seq.timestamps
    t_end = float(ts[-1]) if t_end is None else float(t_end)
    h_events = features_at(ts, ts, basis) @ params.weights
    # log(lambda_bar * sigmoid(h)) = log(lambda_bar) - log(1 + exp(-h))
    point_term = np.sum(np.log(params.lambda_bar) - np.logaddexp(0.0, -h_events))
    if t_end <= seq.origin:
        return float(point_term)
    grid = np.linspace(seq.origin, t_end, int(quadrature_points))
    lam = params.lambda_bar * sigmoid(features_at(grid, ts, basis) @ params.weights)
    compensator = np.sum(0.5 * (lam[1:] + lam[:-1]) * np.diff(grid))
    return float(point_term - compensator)


def simulate_thinning(params, basis, horizon, history=None, rng=None, max_events=None):
    """Ogata thinning on ``(t_start, t_end)``.

    Candidates arrive at rate ``lambda_bar``; a candidate at ``s`` is kept with
    probability ``sigmoid(h(s))``, where ``h`` sees ``history`` plus the events
    already accepted in this call.

    Parameters
    ----------
    params : ModelParams
    basis : BasisSet
    horizon : tuple of float
        ``(t_start, t_end)``; ``t_end`` may be ``inf`` when ``max_events`` is set.
    history : EventSequence or array_like, optional
        Events at or before ``t_start`` that excite the simulated stretch.
    rng : int, Generator or None
    max_events : int, optional
        Stop after this many accepted events.

    Returns
    -------
    EventSequence
        Simulated events only, with ``origin = t_start``.
    """
    t_start, t_end = map(float, horizon)
    if not t_start < t_end:
        raise ValueError("horizon must satisfy t_start < t_end")
    if max_events is None and not np.isfinite(t_end):
        raise ValueError("an infinite horizon needs max_events")
    params.check_basis(basis)
    rng = check_random_state(rng)
    if history is None:
        past = np.empty(0)
    elif isinstance(history, EventSequence):
        past = history.timestamps
    else:
        past = np.asarray(history, dtype=float)
    if past.size and past[-1] > t_start:
        raise ValueError("history must end at or before t_start")

    w = params.weights
    rate = params.lambda_bar
    support = basis.support_bound
    recent = past[past > t_start - support]
    accepted = []
    t = t_start
    while max_events is None or len(accepted) < max_events:
        t += rng.exponential(1.0 / rate)
        if t >= t_end:
            break
        if recent.size and recent[0] <= t - support:
            recent = recent[recent > t - support]
        h = features_at([t], recent, basis)[0] @ w
        if rng.uniform() < sigmoid(h):
            accepted.append(t)
            recent = np.append(recent, t)
    return EventSequence(np.array(accepted), origin=t_start)
