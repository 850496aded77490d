"""scikit-learn style wrappers around the sampler and the detector.

Both estimators take a single event stream as ``X``: a 1-D array of strictly
increasing timestamps, or an ``(n, 1)`` column.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_timestamps
from .detector import DetectorConfig, run
from .gibbs import GibbsConfig, run_chain
from .hawkes import EventSequence, default_basis, log_likelihood, simulate_thinning
from .metrics import evaluate

__all__ = ["HawkesPosterior", "CoBayCPD"]


class _BasisParamsMixin:
    def _basis(self):
        return default_basis(tuple(self.shifts), self.alpha, self.beta, self.scale,
                             self.support_bound)

    def _gibbs(self):
        return GibbsConfig(self.iterations, self.burn_in, self.prior_variance)


def _seed_int(random_state):
    if random_state is None:
        return int(np.random.SeedSequence().generate_state(1)[0])
    if isinstance(random_state, (int, np.integer)):
        return int(random_state)
    raise TypeError("random_state must be None or an int")


class HawkesPosterior(_BasisParamsMixin, BaseEstimator):
    """Posterior of ``(w, lambda_bar)`` for one window of events.

    Parameters
    ----------
    shifts : tuple of float
        One beta basis per shift.
    alpha, beta, scale : float
        Beta density shape and width shared by all bases.
    support_bound : float
        Influence horizon; bases are cut off beyond it.
    prior_variance : float
        Isotropic Gaussian prior variance on the weights.
    iterations, burn_in : int
        Gibbs sweeps and the number discarded.
    random_state : int or None

    Attributes
    ----------
    posterior_ : PosteriorSamples
    coef_ : ndarray of shape (B + 1,)
        Posterior mean weights, ``coef_[0]`` being the baseline.
    lambda_bar_ : float
        Posterior mean intensity bound.
    basis_ : BasisSet
    """

    def __init__(self, shifts=(-2.0, -1.0, 0.0, 1.0), alpha=50.0, beta=50.0, scale=6.0,
                 support_bound=6.0, prior_variance=0.5, iterations=100, burn_in=50,
                 random_state=None):
        self.shifts = shifts
        self.alpha = alpha
        self.beta = beta
        self.scale = scale
        self.support_bound = support_bound
        self.prior_variance = prior_variance
        self.iterations = iterations
        self.burn_in = burn_in
        self.random_state = random_state

    def fit(self, X, y=None):
        ts = check_timestamps(X, min_events=2, name="X")
        self.basis_ = self._basis()
        rng = np.random.default_rng(self.random_state)
        self.posterior_ = run_chain(ts, self.basis_, self._gibbs(), rng=rng)
        mean = self.posterior_.mean()
        self.coef_ = np.array(mean.weights)
        self.lambda_bar_ = mean.lambda_bar
        self.n_events_ = ts.size
        self.span_ = float(ts[-1] - ts[0])
        return self

    @property
    def params_(self):
        check_is_fitted(self, "posterior_")
        return self.posterior_.mean()

    def score(self, X, y=None):
        """Log-likelihood of ``X`` under the posterior-mean parameters."""
        ts = check_timestamps(X, min_events=1, name="X")
        return float(log_likelihood(self.params_, EventSequence(ts, origin=ts[0]), self.basis_))

    def sample(self, horizon, history=None, random_state=None):
        """Simulate from the posterior mean over ``(start, end)``."""
        check_is_fitted(self, "posterior_")
        return simulate_thinning(self.params_, self.basis_, horizon, history=history,
                                 rng=random_state).timestamps


class CoBayCPD(_BasisParamsMixin, BaseEstimator):
    """Online Bayesian change-point detector for a sigmoid Hawkes stream.

    Every event after the warm-up is tested against a predictive interval
    built from posterior draws fitted on the events since the last change.

    Parameters
    ----------
    confidence_level : float
        Central predictive interval mass; lower values flag more changes.
    min_window, max_window : int
        Events needed before testing starts, and the cap on the window.
    n_jobs : int
        Threads for predictive sampling; results do not depend on it.
    random_state : int or None
        Root seed. Runs with the same int are reproducible.
    Remaining parameters are as in :class:`HawkesPosterior`.

    Attributes
    ----------
    change_points_ : list of int
        1-based indices of events flagged as the start of a new regime.
    records_ : list of StepRecord
    result_ : DetectionResult
    runtime_ : float
        Seconds spent in detection.
    """

    def __init__(self, shifts=(-2.0, -1.0, 0.0, 1.0), alpha=50.0, beta=50.0, scale=6.0,
                 support_bound=6.0, prior_variance=0.5, iterations=100, burn_in=50,
                 confidence_level=0.9, min_window=10, max_window=200, n_jobs=1,
                 random_state=None):
        self.shifts = shifts
        self.alpha = alpha
        self.beta = beta
        self.scale = scale
        self.support_bound = support_bound
        self.prior_variance = prior_variance
        self.iterations = iterations
        self.burn_in = burn_in
        self.confidence_level = confidence_level
        self.min_window = min_window
        self.max_window = max_window
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _config(self):
        return DetectorConfig(confidence_level=self.confidence_level, min_window=self.min_window,
                              max_window=self.max_window, gibbs=self._gibbs(),
                              basis=self._basis(), n_jobs=self.n_jobs)

    def fit(self, X, y=None):
        config = self._config()
        ts = check_timestamps(X, min_events=int(config.min_window) + 1, name="X")
        self.seed_ = _seed_int(self.random_state)
        self.result_ = run(ts, config, seed=self.seed_)
        self.records_ = self.result_.records
        self.change_points_ = list(self.result_.change_points)
        self.runtime_ = self.result_.runtime
        self.n_events_ = ts.size
        return self

    def _labels(self):
        labels = np.zeros(self.n_events_, dtype=int)
        if self.change_points_:
            labels[np.asarray(self.change_points_) - 1] = 1
        return labels

    def fit_predict(self, X, y=None):
        """Fit and return a 0/1 flag per event (1 marks a declared change)."""
        return self.fit(X)._labels()

    def predict(self, X):
        """Change flags for ``X``; detection is online so this refits on ``X``."""
        return self.fit_predict(X)

    def score(self, X, y):
        """Negative FNR + FPR of the fit on ``X`` against true change indices ``y`` (tol 3)."""
        check_is_fitted(self, "result_")
        report = evaluate(self.result_, y, tol=3)
        return -(report.fnr + report.fpr)
