"""Dirichlet-process mixture of log-normals, fitted to the biased sample by a
slice-augmented Gibbs sampler.

The model: observations are i.i.d. from the random density
``g(y) = sum_j w_j LN(y | mu_j, 1/lam)`` with stick-breaking weights
``w_j = v_j prod_{l<j}(1 - v_l)``, ``v_j ~ Beta(1, c)``, atoms
``mu_j ~ N(0, 1/s)`` and a shared precision ``lam ~ Ga(a, b)`` (``a = b = 0``
encodes the improper ``1/lam`` prior).  Per-datum slice levels ``u_i`` keep
the instantiated component count ``N`` finite: only components with
``w_j > u_i`` can be allocated, and ``N`` is resized every sweep so the
covered mass exceeds ``1 - min_i u_i``.

A sweep applies the full conditionals in the fixed order sticks -> atoms ->
precision -> slices/allocations; running the slice step last re-establishes
every state invariant at sweep boundaries.  The heavy lifting lives in
``lbde._kernels`` (compiled extension with a NumPy fallback).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import _pysweep, get_backend
from .errors import ConfigurationError, DataError, TruncationError
from .kde import DensityEstimate
from .rng import make_rng

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Hyperparams:
    """Priors and run lengths for the Gibbs sampler.

    ``a``/``b`` are the gamma prior on the kernel precision; both zero selects
    the improper ``1/lam`` prior.  ``s`` is the base-measure precision
    (atoms are ``N(0, 1/s)``); ``c`` the Dirichlet concentration.  ``n_max``
    caps the instantiated components (default ``10 n + 100``).
    """

    a: float = 0.0
    b: float = 0.0
    s: float = 0.5
    c: float = 1.0
    n_iter: int = 60_000
    burn_in: int = 10_000
    thin: int = 10
    n_max: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.a < 0.0 or self.b < 0.0 or (self.a == 0.0) != (self.b == 0.0):
            raise ConfigurationError(
                "a and b must be jointly zero (improper prior) or jointly positive"
            )
        if self.s <= 0.0 or self.c <= 0.0:
            raise ConfigurationError("s and c must be positive")
        if self.n_iter < 1 or self.burn_in < 0 or self.burn_in >= self.n_iter:
            raise ConfigurationError("need 0 <= burn_in < n_iter")
        if self.thin < 1:
            raise ConfigurationError("thin must be >= 1")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigurationError("n_max must be >= 1")

    def resolve_n_max(self, n: int) -> int:
        return self.n_max if self.n_max is not None else 10 * n + 100


class Dataset:
    """Positive observations with cached logs."""

    __slots__ = ("y", "log_y")

    def __init__(self, y):
        arr = np.ascontiguousarray(y, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DataError("need a nonempty 1-D sample")
        if not np.isfinite(arr).all() or np.any(arr <= 0.0):
            raise DataError("all observations must be positive and finite")
        self.y = arr
        self.log_y = np.log(arr)

    def __len__(self):
        return self.y.size


class ChainState:
    """Full Gibbs state.

    The stick, weight and atom arrays are capacity buffers of length
    ``capacity``; the first ``n_active`` entries are live and exposed through
    the ``v``/``w``/``mu`` views.  ``u`` and ``d`` hold per-datum slice levels
    and (0-based) allocations.  ``s`` is carried along so density evaluations
    can price the un-instantiated remainder mass.
    """

    __slots__ = ("_v", "_w", "_mu", "lam", "u", "d", "n_active", "iteration", "s", "capacity")

    def __init__(self, v, w, mu, lam, u, d, n_active, s, iteration=0):
        self._v = np.ascontiguousarray(v, dtype=float)
        self._w = np.ascontiguousarray(w, dtype=float)
        self._mu = np.ascontiguousarray(mu, dtype=float)
        self.u = np.ascontiguousarray(u, dtype=float)
        self.d = np.ascontiguousarray(d, dtype=np.int64)
        self.lam = float(lam)
        self.n_active = int(n_active)
        self.s = float(s)
        self.iteration = int(iteration)
        self.capacity = self._v.size
        if not (self._w.size == self._mu.size == self.capacity):
            raise ConfigurationError("stick, weight and atom buffers must share a capacity")
        if not 1 <= self.n_active <= self.capacity:
            raise ConfigurationError("need 1 <= n_active <= capacity")

    @property
    def v(self):
        return self._v[: self.n_active]

    @property
    def w(self):
        return self._w[: self.n_active]

    @property
    def mu(self):
        return self._mu[: self.n_active]

    def copy(self) -> "ChainState":
        return ChainState(
            self._v.copy(), self._w.copy(), self._mu.copy(), self.lam,
            self.u.copy(), self.d.copy(), self.n_active, self.s, self.iteration,
        )

    def check_invariants(self):
        """Raise ``NumericalError`` unless every state invariant holds exactly."""
        from .errors import NumericalError

        n_active = self.n_active
        v, w = self.v, self.w
        if not (np.isfinite(self.lam) and self.lam > 0.0):
            raise NumericalError(f"lam must be positive, got {self.lam!r}")
        if np.any(v <= 0.0) or np.any(v >= 1.0):
            raise NumericalError("stick fractions must lie strictly inside (0, 1)")
        expected = np.empty(n_active)
        _pysweep._recompute_weights(v, expected, n_active)
        if not np.array_equal(expected, w):
            raise NumericalError("stick identity w_j = v_j prod(1 - v_l) violated")
        cumw = np.cumsum(w)
        if not np.all(cumw < 1.0):
            raise NumericalError("partial weight sums must stay below 1")
        if self.d.min() < 0 or self.d.max() >= n_active:
            raise NumericalError("allocation outside the active components")
        if np.any(self.u <= 0.0) or np.any(self.u >= 1.0):
            raise NumericalError("slice levels must lie strictly inside (0, 1)")
        if not np.all(self.u < w[self.d]):
            raise NumericalError("slice admissibility u_i < w_{d_i} violated")
        if not float(cumw[-1]) > 1.0 - float(self.u.min()):
            raise NumericalError("covered weight mass does not exceed 1 - min u_i")


def state_from_weights(weights, mu, lam, s, u=None, d=None, capacity=None) -> ChainState:
    """Build a state realizing the given active weights (weights must sum < 1
    componentwise-consistently, i.e. each partial sum stays below 1).

    Sticks are derived from the weights and the weights recomputed from the
    sticks, so the stick identity holds exactly as computed.  Useful for
    fixtures and frozen states.
    """
    weights = np.asarray(weights, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if weights.shape != mu.shape or weights.ndim != 1 or weights.size == 0:
        raise ConfigurationError("weights and mu must be matching nonempty 1-D arrays")
    n_active = weights.size
    capacity = capacity or max(4 * n_active, 16)
    v = np.zeros(capacity)
    w = np.zeros(capacity)
    mu_buf = np.zeros(capacity)
    mu_buf[:n_active] = mu
    rem = 1.0
    for j in range(n_active):
        if not 0.0 < weights[j] < rem:
            raise ConfigurationError("weights must be positive with partial sums below 1")
        v[j] = weights[j] / rem
        rem -= weights[j]
    _pysweep._recompute_weights(v, w, n_active)
    if u is None:
        u = np.full(1, 0.5 * float(w[:n_active].min()))
    if d is None:
        d = np.zeros(len(u), dtype=np.int64)
    return ChainState(v, w, mu_buf, lam, u, d, n_active, s)


def init_chain(data: Dataset, hp: Hyperparams, rng) -> ChainState:
    """Over-dispersed start: quantile-split of the log-data into min(n, 5)
    clusters, atoms at the cluster means, precision from the log-data variance,
    sticks from the prior, slice levels admissible by construction.
    """
    n = len(data)
    capacity = hp.resolve_n_max(n)
    k = min(n, 5)
    if capacity < k:
        raise ConfigurationError(f"n_max={capacity} cannot hold {k} initial clusters")
    order = np.argsort(data.log_y, kind="stable")
    d = np.empty(n, dtype=np.int64)
    d[order] = np.arange(n, dtype=np.int64) * k // n

    mu_buf = np.zeros(capacity)
    for j in range(k):
        mu_buf[j] = float(data.log_y[d == j].mean())
    var = float(np.var(data.log_y))
    lam = 1.0 / var if (n > 1 and var > 0.0) else 1.0

    v = np.zeros(capacity)
    w = np.zeros(capacity)
    v[:k] = rng.beta(1.0, hp.c, size=k)
    _pysweep._recompute_weights(v, w, k)

    u = w[d] * _pysweep._uniforms_no_zero(rng, n)
    n_active = _pysweep.ensure_coverage(
        v, w, mu_buf, k, float(u.min()), hp.s, hp.c, capacity, rng
    )
    return ChainState(v, w, mu_buf, lam, u, d, n_active, hp.s)


def update_sticks(state: ChainState, hp: Hyperparams, rng) -> ChainState:
    """Redraw every stick from Beta(1 + n_j, c + sum_{l>j} n_l); recompute weights."""
    _pysweep.update_sticks(state.d, state._v, state._w, state.n_active, hp.c, rng)
    return state


def update_atoms(state: ChainState, data: Dataset, hp: Hyperparams, rng) -> ChainState:
    """Redraw every active atom from its normal conditional (base draw if empty)."""
    _pysweep.update_atoms(
        data.log_y, state.d, state._mu, state.n_active, state.lam, hp.s, rng
    )
    return state


def update_lambda(state: ChainState, data: Dataset, hp: Hyperparams, rng) -> ChainState:
    """Redraw the shared precision from its gamma conditional."""
    state.lam = _pysweep.update_lambda(data.log_y, state._mu, state.d, hp.a, hp.b, rng)
    return state


def update_slices_allocations(state: ChainState, data: Dataset, hp: Hyperparams, rng) -> ChainState:
    """Fresh slice levels, minimal covering truncation, fresh allocations."""
    state.n_active = _pysweep.update_slices_allocations(
        data.log_y, state._v, state._w, state._mu, state.u, state.d,
        state.lam, state.n_active, hp.s, hp.c, state.capacity, rng,
    )
    return state


def gibbs_sweep(state: ChainState, data: Dataset, hp: Hyperparams, rng, backend="auto") -> ChainState:
    """One sweep over all full conditionals; every invariant holds afterwards."""
    kern = get_backend(backend)
    state.n_active, state.lam = kern.sweep(
        data.log_y, state._v, state._w, state._mu, state.u, state.d,
        state.lam, state.n_active, hp.a, hp.b, hp.s, hp.c, state.capacity, rng,
    )
    state.iteration += 1
    return state


def sample_predictive(state: ChainState, hp: Hyperparams, rng, size=None):
    """Draw from the mixture the state represents.

    A uniform selects the component by cumulative weight; if it lands beyond
    the instantiated mass, a fresh atom is drawn from the base measure.  With
    ``size`` set, draws are vectorized (the stream is consumed in a different
    but equally reproducible order than repeated scalar calls).
    """
    cumw = np.cumsum(state.w)
    sd_kernel = math.sqrt(1.0 / state.lam)
    sd_base = math.sqrt(1.0 / hp.s)
    if size is None:
        r = rng.random()
        k = int(np.searchsorted(cumw, r, side="left"))
        mu_k = float(state.mu[k]) if k < state.n_active else rng.normal(0.0, sd_base)
        return float(rng.lognormal(mu_k, sd_kernel))
    r = rng.random(size)
    ks = np.searchsorted(cumw, r, side="left")
    fresh = ks >= state.n_active
    mu_sel = np.empty(r.size)
    mu_sel[~fresh] = state.mu[ks[~fresh]]
    n_fresh = int(fresh.sum())
    if n_fresh:
        mu_sel[fresh] = rng.normal(0.0, sd_base, size=n_fresh)
    return rng.lognormal(mu_sel, sd_kernel)


def _remainder_mass(state: ChainState) -> float:
    return max(0.0, 1.0 - float(np.sum(state.w)))


def mixture_density(state: ChainState, y: float) -> float:
    """Density of the state's mixture at ``y > 0``.

    Instantiated components contribute ``w_j LN(y | mu_j, 1/lam)``; the
    remainder mass contributes the base-measure predictive, for which
    ``log y ~ N(0, 1/s + 1/lam)`` in closed form.
    """
    if not (np.isfinite(y) and y > 0.0):
        raise DataError(f"mixture density requires y > 0, got {y!r}")
    return float(mixture_density_grid(state, np.asarray([y], dtype=float))[0])


def mixture_density_grid(state: ChainState, grid) -> np.ndarray:
    """Vectorized mixture density; grid points must be >= 0 (the density's
    limit 0 is used at y = 0)."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0.0):
        raise DataError("grid points must be nonnegative")
    out = np.zeros(grid.shape)
    pos = grid > 0.0
    y = grid[pos]
    if y.size == 0:
        return out
    ly = np.log(y)
    lam = state.lam
    dens = np.zeros(y.shape)
    diff = ly[:, None] - state.mu[None, :]
    kernels = math.sqrt(lam) / _SQRT_TWO_PI * np.exp(-0.5 * lam * diff * diff) / y[:, None]
    dens = kernels @ state.w
    rem = _remainder_mass(state)
    if rem > 0.0:
        var_tot = 1.0 / state.s + 1.0 / lam
        dens = dens + rem * np.exp(-0.5 * ly * ly / var_tot) / (
            y * math.sqrt(var_tot) * _SQRT_TWO_PI
        )
    out[pos] = dens
    return out


@dataclass(eq=False)
class ChainRun:
    """Output of ``run_chain``: the kept predictive stream, per-iteration
    cluster counts, the averaged (raw, un-renormalized) mixture density on the
    output grid, and the final state."""

    predictive: np.ndarray
    cluster_counts: np.ndarray
    g_density: DensityEstimate | None
    state: ChainState | None
    n_kept: int
    valid: bool = True
    error: str | None = None


def run_chain(data: Dataset, hp: Hyperparams, rng=None, grid=None, hooks=(), backend="auto") -> ChainRun:
    """Run ``n_iter`` sweeps; after burn-in every ``thin``-th iteration emits
    one predictive draw, records the occupied-cluster count, accumulates the
    mixture density on ``grid``, and feeds each hook with ``(state, draw)``.

    A truncation-guard failure aborts and returns a partial run flagged
    invalid; other errors propagate.
    """
    if rng is None:
        rng = make_rng(hp.seed)
    kern = get_backend(backend)
    pred: list = []
    clusters: list = []
    accum = np.zeros(len(grid)) if grid is not None else None
    kept = 0
    state = None
    try:
        state = init_chain(data, hp, rng)
        log_y = data.log_y
        for it in range(1, hp.n_iter + 1):
            state.n_active, state.lam = kern.sweep(
                log_y, state._v, state._w, state._mu, state.u, state.d,
                state.lam, state.n_active, hp.a, hp.b, hp.s, hp.c, state.capacity, rng,
            )
            state.iteration = it
            if it > hp.burn_in and (it - hp.burn_in) % hp.thin == 0:
                y_next = sample_predictive(state, hp, rng)
                pred.append(y_next)
                clusters.append(np.unique(state.d).size)
                if accum is not None:
                    accum += mixture_density_grid(state, grid)
                kept += 1
                for hook in hooks:
                    hook(state, y_next)
    except TruncationError as exc:
        return ChainRun(
            np.asarray(pred), np.asarray(clusters, dtype=int),
            None, state, kept, valid=False, error=str(exc),
        )
    g_density = None
    if accum is not None and kept:
        g_density = DensityEstimate(grid, accum / kept, normalized=False)
    return ChainRun(
        np.asarray(pred), np.asarray(clusters, dtype=int), g_density, state, kept,
    )
