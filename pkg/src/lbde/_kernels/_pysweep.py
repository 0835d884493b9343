"""NumPy implementation of the Gibbs-sweep kernels.

This is the reference backend.  The compiled twin in ``_csweep.pyx`` must
reproduce it bit for bit, so every stochastic step below documents its draw
order and every floating-point reduction is written in a fixed sequential
order (``cumsum``/``cumprod``/``bincount`` accumulate left to right, matching
the loops on the compiled side).  Change one side only in lockstep with the
other.

Sweep order: sticks -> atoms -> precision -> slices/allocations.  The slice
step runs last so that every state invariant (stick identity, slice
admissibility, weight coverage) holds exactly at sweep boundaries.  Stick
draws use the allocation-count conditionals with the slice levels integrated
out, which is valid because the levels are redrawn later in the same sweep
and nothing in between depends on them.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateConditionalError, NumericalError, TruncationError

NAME = "python"


def _recompute_weights(v, w, n_active):
    """Stick-breaking identity w_j = v_j * prod_{l<j}(1 - v_l), sequentially."""
    one_minus = 1.0 - v[:n_active]
    prefix = np.empty(n_active)
    prefix[0] = 1.0
    if n_active > 1:
        np.cumprod(one_minus[:-1], out=prefix[1:])
    w[:n_active] = v[:n_active] * prefix


def _uniforms_no_zero(rng, n):
    """n uniforms on (0, 1): exact zeros are redrawn in ascending rounds."""
    r = rng.random(n)
    while True:
        zeros = np.flatnonzero(r == 0.0)
        if zeros.size == 0:
            return r
        for i in zeros:
            r[i] = rng.random()


def update_sticks(d, v, w, n_active, c, rng):
    """v_j ~ Beta(1 + n_j, c + sum_{l>j} n_l) for all active j; weights recomputed.

    Draws: n_active beta variates, ascending j.
    """
    counts = np.bincount(d, minlength=n_active)[:n_active]
    tail = counts[::-1].cumsum()[::-1] - counts
    v[:n_active] = rng.beta(1.0 + counts, c + tail)
    _recompute_weights(v, w, n_active)


def update_atoms(log_y, d, mu, n_active, lam, s, rng):
    """mu_j ~ N(lam * S_j / (s + lam n_j), 1 / (s + lam n_j)); base draw when n_j = 0.

    Draws: n_active normal variates, ascending j.
    """
    counts = np.bincount(d, minlength=n_active)[:n_active]
    sums = np.bincount(d, weights=log_y, minlength=n_active)[:n_active]
    prec = s + lam * counts
    mean = lam * sums / prec
    sd = np.sqrt(1.0 / prec)
    mu[:n_active] = rng.normal(mean, sd)


def update_lambda(log_y, mu, d, a, b, rng):
    """lam ~ Ga(a + n/2, b + rss/2) with rss = sum_i (log y_i - mu_{d_i})^2.

    Draws: one gamma variate.  Raises when the conditional is improper.
    """
    resid = log_y - mu[d]
    rss = float(np.cumsum(resid * resid)[-1])
    shape = a + 0.5 * log_y.size
    rate = b + 0.5 * rss
    if rate <= 0.0:
        raise DegenerateConditionalError(
            "precision conditional Ga(%g, 0) is improper: zero prior rate and zero residuals"
            % shape
        )
    return rng.gamma(shape, 1.0 / rate)


def ensure_coverage(v, w, mu, n_active, u_min, s, c, n_max, rng):
    """Resize the instantiated prefix so sum(w[:N]) > 1 - u_min, minimally.

    Either truncates to the shortest covering prefix (components beyond it
    have weight below every slice level, so they cannot be allocated) or
    extends with prior draws: per new component one Beta(1, c) then one
    N(0, 1/s) variate.  Raises ``TruncationError`` at the hard cap.
    """
    threshold = 1.0 - u_min
    cumw = np.cumsum(w[:n_active])
    pos = int(np.searchsorted(cumw, threshold, side="right"))
    if pos < n_active:
        return pos + 1
    w_sum = float(cumw[-1]) if n_active else 0.0
    rem = float(np.cumprod(1.0 - v[:n_active])[-1]) if n_active else 1.0
    sd0 = math.sqrt(1.0 / s)
    while w_sum <= threshold:
        if n_active >= n_max:
            raise TruncationError(
                f"slice coverage needs more than n_max={n_max} components "
                f"(covered mass {w_sum:.17g}, threshold {threshold:.17g})"
            )
        vn = rng.beta(1.0, c)
        mun = rng.normal(0.0, sd0)
        v[n_active] = vn
        mu[n_active] = mun
        wn = vn * rem
        w[n_active] = wn
        w_sum += wn
        rem *= 1.0 - vn
        n_active += 1
    return n_active


def update_slices_allocations(log_y, v, w, mu, u, d, lam, n_active, s, c, n_max, rng):
    """Slice levels, coverage resize, then component allocations.

    Draws: n uniforms (levels), the coverage extension's prior pairs, then n
    uniforms (allocations), in that order.  Returns the new active count.
    """
    n = log_y.size
    r = _uniforms_no_zero(rng, n)
    u[:] = w[d] * r
    u_min = float(u.min())
    n_active = ensure_coverage(v, w, mu, n_active, u_min, s, c, n_max, rng)

    act_w = w[:n_active]
    act_mu = mu[:n_active]
    diff = log_y[:, None] - act_mu[None, :]
    score = (-0.5 * lam) * (diff * diff)
    elig = act_w[None, :] > u[:, None]
    if not elig.any(axis=1).all():
        raise NumericalError("empty slice set; state is numerically degenerate")
    score = np.where(elig, score, -np.inf)
    peak = score.max(axis=1)
    prob = np.exp(score - peak[:, None])
    cum = np.cumsum(prob, axis=1)
    total = cum[:, -1]

    r2 = rng.random(n)
    target = r2 * total
    count = (cum <= target[:, None]).sum(axis=1)
    last_elig = n_active - 1 - np.argmax(elig[:, ::-1], axis=1)
    d[:] = np.where(count >= n_active, last_elig, count)
    return n_active


def sweep(log_y, v, w, mu, u, d, lam, n_active, a, b, s, c, n_max, rng):
    """One full Gibbs sweep; mutates the state arrays, returns (n_active, lam)."""
    update_sticks(d, v, w, n_active, c, rng)
    update_atoms(log_y, d, mu, n_active, lam, s, rng)
    lam = update_lambda(log_y, mu, d, a, b, rng)
    n_active = update_slices_allocations(log_y, v, w, mu, u, d, lam, n_active, s, c, n_max, rng)
    return n_active, lam
