"""Slow but transparent reference implementations used to check the package."""

import math

import numpy as np
from scipy import stats


def pg_truncated_sum(c, size, rng, n_terms=200):
    """PG(1, c) via its infinite gamma-sum representation, cut at ``n_terms``."""
    k = np.arange(1, n_terms + 1)
    denom = (k - 0.5) ** 2 + (c / (2 * np.pi)) ** 2
    g = rng.gamma(1.0, 1.0, size=(size, n_terms))
    return (g / denom).sum(axis=1) / (2 * np.pi ** 2)


def basis_value(alpha, beta, scale, shift, x, support_bound):
    if not 0.0 < x < support_bound:
        return 0.0
    z = (x - shift) / scale
    if not 0.0 < z < 1.0:
        return 0.0
    return float(stats.beta.pdf(z, alpha, beta) / scale)


def basis_value_loggamma(alpha, beta, scale, z):
    """Beta pdf at ``z`` over ``scale`` from log-gamma only."""
    log_b = math.lgamma(alpha) + math.lgamma(beta) - math.lgamma(alpha + beta)
    return math.exp((alpha - 1) * math.log(z) + (beta - 1) * math.log1p(-z) - log_b) / scale


def features_loop(t, history, basis):
    row = [1.0]
    for b in basis.bases:
        row.append(sum(basis_value(b.alpha, b.beta, b.scale, b.shift, t - ti, basis.support_bound)
                       for ti in history if ti < t))
    return np.array(row)


def dense_weights_posterior(design, marks, signs, prior_variance):
    """Mean and covariance with a plain matrix inverse."""
    precision = design.T @ np.diag(marks) @ design + np.eye(design.shape[1]) / prior_variance
    cov = np.linalg.inv(precision)
    return cov @ (design.T @ signs), cov


def augmented_log_joint_w(w, design, marks, signs, prior_variance):
    """Terms of the augmented joint that depend on ``w``.

    Observed events contribute ``h/2 - h^2 omega/2``, latent points
    ``-h/2 - h^2 omega/2`` (sigmoid(-h) tilted), plus the Gaussian prior.
    """
    h = design @ w
    return float(np.sum(signs * h - 0.5 * marks * h ** 2) - 0.5 * w @ w / prior_variance)


def gamma_log_kernel(lam, n, r, span):
    """``lambda^(N+R-1) exp(-lambda T)`` on the log scale (flat prior on lambda)."""
    return (n + r - 1) * np.log(lam) - lam * span
