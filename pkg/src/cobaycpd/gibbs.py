"""Augmented Gibbs sampler for the window posterior of ``(w, lambda_bar)``.

Polya-Gamma marks on the observed events and a latent marked Poisson process
on the window make every conditional closed-form. One sweep visits, in order,

1. event marks ``omega_i ~ PG(1, h(t_i))``,
2. the latent process: Poisson(lambda_bar * T) uniform candidates thinned with
   probability ``sigmoid(-h(t))``, each survivor marked with ``PG(1, h(t))``,
3. ``lambda_bar ~ Gamma(N + R, rate=T)``,
4. ``w ~ N(m, S)`` with ``S^-1 = Phi D Phi^T + I / sigma2`` and ``m = S Phi v``.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from ._validation import check_positive, check_random_state
from .hawkes import EventSequence, ModelParams, features_at, sigmoid
from .polyagamma import pg_sample

__all__ = [
    "AugmentationState",
    "GibbsConfig",
    "PosteriorSamples",
    "NumericalError",
    "sample_event_marks",
    "sample_latent_pp",
    "sample_lambda_bar",
    "lambda_bar_conditional",
    "weights_conditional",
    "augmented_design",
    "sample_weights",
    "default_init",
    "run_chain",
]

logger = logging.getLogger(__name__)


class NumericalError(ArithmeticError):
    """The posterior precision could not be factorised even with jitter."""


@dataclass(frozen=True)
class GibbsConfig:
    iterations: int = 100
    burn_in: int = 50
    prior_variance: float = 0.5
    jitter: float = 1e-10

    def __post_init__(self):
        if int(self.iterations) < 1:
            raise ValueError("iterations must be positive")
        if not 0 <= int(self.burn_in) < int(self.iterations):
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        check_positive(self.prior_variance, "prior_variance")
        check_positive(self.jitter, "jitter")

    @property
    def n_retained(self):
        return int(self.iterations) - int(self.burn_in)


@dataclass
class AugmentationState:
    """PG marks on window events plus the latent marked points ``(t_r, omega_r)``."""

    event_marks: np.ndarray
    latent_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    latent_marks: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def latent_points(self):
        return list(zip(self.latent_times.tolist(), self.latent_marks.tolist()))

    def __len__(self):
        return self.latent_times.shape[0]


@dataclass(frozen=True)
class PosteriorSamples:
    """Retained draws, stacked: ``weights`` is ``(K, B+1)``, ``lambda_bar`` is ``(K,)``."""

    weights: np.ndarray
    lambda_bar: np.ndarray
    n_latent: np.ndarray = None

    def __len__(self):
        return self.lambda_bar.shape[0]

    def __getitem__(self, k):
        return ModelParams(self.weights[k], float(self.lambda_bar[k]))

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    @property
    def draws(self):
        return list(self)

    def mean(self):
        return ModelParams(self.weights.mean(axis=0), float(self.lambda_bar.mean()))


def _as_times(window):
    return window.timestamps if isinstance(window, EventSequence) else np.asarray(window, float)


def sample_event_marks(window, basis, weights, rng=None, event_features=None):
    """``omega_i ~ PG(1, h(t_i))`` for every event of the window."""
    ts = _as_times(window)
    if ts.size == 0:
        raise ValueError("window must contain at least one event")
    if event_features is None:
        event_features = features_at(ts, ts, basis)
    return np.atleast_1d(pg_sample(event_features @ np.asarray(weights, float), rng))


def sample_latent_pp(window, basis, weights, lambda_bar, rng=None):
    """Latent marked Poisson points on ``[t_first, t_last]``.

    Returns
    -------
    times, marks, features : ndarray
        Accepted candidate times (sorted), their PG marks and feature rows.
    """
    rng = check_random_state(rng)
    ts = _as_times(window)
    empty = np.empty(0)
    if ts.size < 2 or ts[-1] <= ts[0]:
        return empty, empty, np.empty((0, basis.n_features))
    t0, t1 = float(ts[0]), float(ts[-1])
    n_cand = rng.poisson(lambda_bar * (t1 - t0))
    cand = np.sort(rng.uniform(t0, t1, size=n_cand))
    phi = features_at(cand, ts, basis)
    h = phi @ np.asarray(weights, float)
    keep = rng.uniform(size=n_cand) < sigmoid(-h)
    times, phi, h = cand[keep], phi[keep], h[keep]
    marks = np.atleast_1d(pg_sample(h, rng)) if times.size else empty
    return times, marks, phi


def lambda_bar_conditional(n_events, n_latent, span):
    """Shape and rate of the Gamma conditional of ``lambda_bar``."""
    shape = int(n_events) + int(n_latent)
    if shape < 1:
        raise ValueError("need at least one event or latent point for a proper posterior")
    if not span > 0:
        raise ValueError("window span must be positive")
    return float(shape), float(span)


def sample_lambda_bar(n_events, n_latent, span, rng=None):
    """``lambda_bar ~ Gamma(shape=N + R, rate=T)``."""
    shape, rate = lambda_bar_conditional(n_events, n_latent, span)
    return float(check_random_state(rng).gamma(shape, 1.0 / rate))


def _factorize(precision, jitter):
    """Lower Cholesky factor, escalating diagonal jitter on failure."""
    dim = precision.shape[0]
    base = jitter * np.trace(precision) / dim
    for attempt in range(5):
        eps = 0.0 if attempt == 0 else base * 10.0 ** (attempt - 1)
        try:
            return cholesky(precision + eps * np.eye(dim), lower=True)
        except LinAlgError:
            logger.debug("cholesky failed with jitter %g", eps)
    raise NumericalError(
        f"posterior precision not positive definite after jitter up to {eps:g} "
        f"(dim={dim}, trace={np.trace(precision):g}, "
        f"min diag={np.min(np.diag(precision)):g})"
    )


def weights_conditional(design, marks, signs, prior_variance, jitter=1e-10):
    """Gaussian conditional of the weights.

    Parameters
    ----------
    design : ndarray of shape (N + R, B + 1)
        Feature rows of window events followed by latent points.
    marks : ndarray of shape (N + R,)
        PG marks, the diagonal of ``D``.
    signs : ndarray of shape (N + R,)
        ``+1/2`` for observed events, ``-1/2`` for latent points (``v``).
    prior_variance : float

    Returns
    -------
    mean : ndarray of shape (B + 1,)
    chol : ndarray of shape (B + 1, B + 1)
        Lower Cholesky factor of the precision ``Phi D Phi^T + I / sigma2``.
    """
    dim = design.shape[1]
    precision = (design.T * marks) @ design + np.eye(dim) / prior_variance
    chol = _factorize(precision, jitter)
    mean = cho_solve((chol, True), design.T @ signs)
    return mean, chol


def augmented_design(window, basis, event_marks, latent_times=(), latent_marks=()):
    """Stack ``Phi``, ``D`` and ``v`` for the weight conditional.

    Returns ``(design, marks, signs)`` with observed events first, then latent
    points.
    """
    ts = _as_times(window)
    latent_times = np.asarray(latent_times, dtype=float)
    design = np.vstack([features_at(ts, ts, basis), features_at(latent_times, ts, basis)])
    marks = np.concatenate([np.asarray(event_marks, float), np.asarray(latent_marks, float)])
    signs = np.concatenate([np.full(ts.size, 0.5), np.full(latent_times.size, -0.5)])
    if marks.shape[0] != design.shape[0]:
        raise ValueError("need one mark per window event and per latent point")
    return design, marks, signs


def _draw_weights(design, marks, signs, prior_variance, rng, jitter):
    mean, chol = weights_conditional(design, marks, signs, prior_variance, jitter)
    z = rng.standard_normal(mean.shape[0])
    # P = L L^T  =>  L^-T z ~ N(0, P^-1)
    return mean + solve_triangular(chol, z, lower=True, trans="T")


def sample_weights(window, latent_times, latent_marks, event_marks, basis, prior_variance,
                   rng=None, jitter=1e-10):
    """Draw ``w ~ N(m, P^-1)`` given the augmentation; see :func:`weights_conditional`.

    With an empty window and no latent points this is a draw from the prior.
    """
    design, marks, signs = augmented_design(window, basis, event_marks, latent_times, latent_marks)
    return _draw_weights(design, marks, signs, prior_variance, check_random_state(rng), jitter)


def default_init(window, basis):
    """Prior-mean weights and the empirical rate ``N / T``."""
    ts = _as_times(window)
    span = float(ts[-1] - ts[0])
    return ModelParams(np.zeros(basis.n_features), ts.size / span)


def run_chain(window, basis, config=None, init=None, rng=None, return_state=False):
    """Run ``config.iterations`` sweeps and keep the draws after burn-in.

    Parameters
    ----------
    window : EventSequence or array_like
        At least two events with positive span.
    basis : BasisSet
    config : GibbsConfig, optional
    init : ModelParams, optional
        Starting point; defaults to :func:`default_init`.
    rng : int, Generator or None
    return_state : bool
        Also return the final :class:`AugmentationState`.

    Returns
    -------
    PosteriorSamples or (PosteriorSamples, AugmentationState)
    """
    config = GibbsConfig() if config is None else config
    rng = check_random_state(rng)
    ts = _as_times(window)
    if ts.size < 2 or not ts[-1] > ts[0]:
        raise ValueError("run_chain needs a window of at least two events with positive span")
    init = default_init(ts, basis) if init is None else init
    init.check_basis(basis)

    n_events = ts.size
    span = float(ts[-1] - ts[0])
    event_phi = features_at(ts, ts, basis)
    event_signs = np.full(n_events, 0.5)
    w = np.array(init.weights, dtype=float)
    lam = float(init.lambda_bar)

    n_keep = config.n_retained
    kept_w = np.empty((n_keep, basis.n_features))
    kept_lam = np.empty(n_keep)
    kept_r = np.empty(n_keep, dtype=int)
    state = None
    for it in range(int(config.iterations)):
        omega = sample_event_marks(ts, basis, w, rng, event_features=event_phi)
        lat_t, lat_omega, lat_phi = sample_latent_pp(ts, basis, w, lam, rng)
        lam = sample_lambda_bar(n_events, lat_t.size, span, rng)
        design = np.vstack([event_phi, lat_phi])
        marks = np.concatenate([omega, lat_omega])
        signs = np.concatenate([event_signs, np.full(lat_t.size, -0.5)])
        w = _draw_weights(design, marks, signs, config.prior_variance, rng, config.jitter)
        k = it - int(config.burn_in)
        if k >= 0:
            kept_w[k] = w
            kept_lam[k] = lam
            kept_r[k] = lat_t.size
        if return_state and it == int(config.iterations) - 1:
            state = AugmentationState(omega, lat_t, lat_omega)
    samples = PosteriorSamples(kept_w, kept_lam, kept_r)
    return (samples, state) if return_state else samples
