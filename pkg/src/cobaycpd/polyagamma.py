"""Exact sampling from the Polya-Gamma distribution PG(1, c).

The sampler is Devroye's alternating-series rejection method as laid out by
Polson, Scott & Windle (2013): a draw of ``J*(1, |c|/2)`` from a mixture of a
truncated exponential (right tail) and a truncated inverse Gaussian (left
tail), accepted by evaluating the series for the density, then scaled by 1/4.
Everything is vectorised over the tilts so a Gibbs sweep costs one call.
"""

import numpy as np
from scipy.special import expit, log_ndtr

from ._validation import check_random_state

__all__ = ["pg_sample", "pg_mean", "pg_log_tilt"]

_TRUNC = 0.64
_LOG_HALF_PI = np.log(0.5 * np.pi)


def pg_mean(c):
    """Mean of PG(1, c), ``tanh(c/2) / (2c)``; 1/4 at ``c = 0``."""
    c = np.abs(np.asarray(c, dtype=float))
    x = 0.5 * c
    small = c < 1e-4
    safe = np.where(small, 1.0, c)
    # tanh(x)/x = 1 - x^2/3 + 2x^4/15 - ...
    series = 0.25 * (1.0 - x * x / 3.0 + 2.0 * x**4 / 15.0)
    out = np.where(small, series, np.tanh(0.5 * safe) / (2.0 * safe))
    return float(out) if out.ndim == 0 else out


def pg_log_tilt(omega, z):
    """``z/2 - z^2 omega / 2 - log 2``, the log-integrand of the sigmoid mixture."""
    omega = np.asarray(omega, dtype=float)
    z = np.asarray(z, dtype=float)
    return 0.5 * z - 0.5 * z * z * omega - np.log(2.0)


def _series_coef(n, x):
    """n-th term of the piecewise alternating series for the J*(1, 0) density."""
    k = (n + 0.5) * np.pi
    out = np.zeros_like(x)
    right = x > _TRUNC
    out[right] = k * np.exp(-0.5 * k * k * x[right])
    left = ~right & (x > 0.0)
    xl = x[left]
    out[left] = np.exp(
        -1.5 * (_LOG_HALF_PI + np.log(xl)) + np.log(k) - 2.0 * (n + 0.5) ** 2 / xl
    )
    return out


def _exp_proposal_mass(z):
    """Probability of proposing from the truncated-exponential (right) piece."""
    t = _TRUNC
    fz = 0.125 * np.pi**2 + 0.5 * z * z
    b = np.sqrt(1.0 / t) * (t * z - 1.0)
    a = -np.sqrt(1.0 / t) * (t * z + 1.0)
    x0 = np.log(fz) + fz * t
    xb = x0 - z + log_ndtr(b)
    xa = x0 + z + log_ndtr(a)
    log_q_over_p = np.log(4.0 / np.pi) + np.logaddexp(xb, xa)
    return expit(-log_q_over_p)


def _truncated_inv_gauss(z, rng):
    """Draws from IG(1/z, 1) restricted to ``(0, 0.64]``, one per entry of ``z``."""
    t = _TRUNC
    out = np.empty_like(z)
    # mean above truncation: propose from the z = 0 tail and thin
    low = np.flatnonzero(z < 1.0 / t)
    pending = low
    while pending.size:
        n = pending.size
        e1 = rng.exponential(size=n)
        e2 = rng.exponential(size=n)
        bad = e1 * e1 > 2.0 * e2 / t
        while bad.any():
            nb = int(bad.sum())
            e1[bad] = rng.exponential(size=nb)
            e2[bad] = rng.exponential(size=nb)
            bad = e1 * e1 > 2.0 * e2 / t
        x = t / (1.0 + e1 * t) ** 2
        keep = rng.uniform(size=n) <= np.exp(-0.5 * z[pending] ** 2 * x)
        out[pending[keep]] = x[keep]
        pending = pending[~keep]
    # mean below truncation: inverse-Gaussian draws, rejected until below t
    pending = np.flatnonzero(z >= 1.0 / t)
    while pending.size:
        n = pending.size
        mu = 1.0 / z[pending]
        y = rng.standard_normal(n) ** 2
        mu_y = mu * y
        x = mu + 0.5 * mu * mu_y - 0.5 * mu * np.sqrt(4.0 * mu_y + mu_y * mu_y)
        flip = rng.uniform(size=n) > mu / (mu + x)
        x[flip] = mu[flip] ** 2 / x[flip]
        keep = x <= t
        out[pending[keep]] = x[keep]
        pending = pending[~keep]
    return out


def pg_sample(c, rng=None):
    """Draw from PG(1, c) for each tilt in ``c``.

    Parameters
    ----------
    c : float or array_like
        Tilt(s); only ``|c|`` matters.
    rng : int, Generator or None

    Returns
    -------
    float or ndarray
        Positive draws with the shape of ``c``.
    """
    c_arr = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c_arr)):
        raise ValueError("Polya-Gamma tilt must be finite")
    rng = check_random_state(rng)
    z = 0.5 * np.abs(c_arr).ravel()
    out = np.empty_like(z)
    fz = 0.125 * np.pi**2 + 0.5 * z * z
    p_exp = _exp_proposal_mass(z)
    pending = np.arange(z.size)
    while pending.size:
        n = pending.size
        zp = z[pending]
        x = np.empty(n)
        use_exp = rng.uniform(size=n) < p_exp[pending]
        n_exp = int(use_exp.sum())
        x[use_exp] = _TRUNC + rng.exponential(size=n_exp) / fz[pending][use_exp]
        x[~use_exp] = _truncated_inv_gauss(zp[~use_exp], rng)

        s = _series_coef(0, x)
        y = rng.uniform(size=n) * s
        accepted = np.zeros(n, dtype=bool)
        active = np.ones(n, dtype=bool)
        k = 0
        while active.any():
            k += 1
            idx = np.flatnonzero(active)
            if k % 2 == 1:
                s[idx] -= _series_coef(k, x[idx])
                hit = idx[y[idx] <= s[idx]]
                accepted[hit] = True
                active[hit] = False
            else:
                s[idx] += _series_coef(k, x[idx])
                active[idx[y[idx] > s[idx]]] = False
        out[pending[accepted]] = 0.25 * x[accepted]
        pending = pending[~accepted]
    out = out.reshape(c_arr.shape)
    return float(out) if out.ndim == 0 else out
