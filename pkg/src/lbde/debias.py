"""Metropolis conversion of draws from a biased density g into draws from
``f(y) proportional to g(y) / w(y)``.

The kernel needs no tuning: a proposal ``y`` replaces the current state ``x``
with probability ``min(1, w(x)/w(y))``, otherwise the chain stays put.  For
length bias (``w(y) = y``) this is ``min(1, x/y)``.  Detailed balance with
respect to ``g/w`` holds for any positive weight function, so the retained
states are draws from the debiased density.

When the proposals come from a Dirichlet-process mixture state, the debiased
density is available in closed form: each log-normal component has
``integral of y**-1 LN(y | mu, 1/lam) dy = exp(-mu + 1/(2 lam))``, which gives
an exact normalizer (``debias_normalizer``) and hence ``exact_debias_density``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dpmm import ChainState, mixture_density_grid, _remainder_mass
from .errors import ConfigurationError, DataError
from .kde import DensityEstimate


class WeightFn:
    """Positive biasing weight: length (w(y)=y), power (w(y)=y**p), or custom."""

    __slots__ = ("kind", "exponent", "fn")

    def __init__(self, kind: str, exponent: float = 1.0, fn=None):
        if kind not in ("length", "power", "custom"):
            raise ConfigurationError(f"unknown weight kind {kind!r}")
        if kind == "custom" and fn is None:
            raise ConfigurationError("custom weight needs a callable")
        self.kind = kind
        self.exponent = float(exponent)
        self.fn = fn

    @classmethod
    def length(cls) -> "WeightFn":
        return cls("length")

    @classmethod
    def power(cls, p: float) -> "WeightFn":
        return cls("power", exponent=p)

    @classmethod
    def custom(cls, fn) -> "WeightFn":
        return cls("custom", fn=fn)

    def __call__(self, y):
        arr = np.asarray(y, dtype=float)
        if np.any(arr <= 0.0) or not np.isfinite(arr).all():
            raise DataError("weight functions are defined for y > 0 only")
        if self.kind == "length":
            out = arr
        elif self.kind == "power":
            out = arr**self.exponent
        else:
            out = np.asarray(self.fn(arr), dtype=float)
        if np.any(out <= 0.0) or not np.isfinite(out).all():
            raise DataError("weight function must be positive and finite on y > 0")
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        if self.kind == "length":
            return "length"
        if self.kind == "power":
            return f"power({self.exponent!r})"
        return "custom"


def accept_probability(x_prev: float, y_prop: float, weight: WeightFn) -> float:
    """``min(1, w(x_prev) / w(y_prop))``; both arguments must be positive."""
    wx = weight(x_prev)
    wy = weight(y_prop)
    return min(1.0, wx / wy)


class DebiasChain:
    """Metropolis chain over proposals from the biased density.

    Holds the retained state, acceptance counters, and (optionally) the full
    sample path.  One chain is owned by exactly one driving process.
    """

    __slots__ = ("weight", "x_current", "accept_count", "step_count", "history", "accept_flags")

    def __init__(self, x0: float, weight: WeightFn | None = None, keep_history: bool = True):
        if not (np.isfinite(x0) and x0 > 0.0):
            raise DataError(f"initial state must be positive, got {x0!r}")
        self.weight = weight if weight is not None else WeightFn.length()
        self.x_current = float(x0)
        self.accept_count = 0
        self.step_count = 0
        self.history: list | None = [] if keep_history else None
        self.accept_flags: list | None = [] if keep_history else None

    @property
    def acceptance_rate(self) -> float:
        return self.accept_count / self.step_count if self.step_count else 0.0

    @property
    def acceptance_running(self) -> np.ndarray:
        if self.accept_flags is None:
            raise ConfigurationError("chain was created without history")
        flags = np.asarray(self.accept_flags, dtype=float)
        return np.cumsum(flags) / np.arange(1, flags.size + 1)

    def step(self, y_prop: float, rng) -> float:
        """Advance by one proposal; returns the retained state."""
        prob = accept_probability(self.x_current, y_prop, self.weight)
        accepted = rng.random() < prob
        if accepted:
            self.x_current = float(y_prop)
            self.accept_count += 1
        self.step_count += 1
        if self.history is not None:
            self.history.append(self.x_current)
            self.accept_flags.append(bool(accepted))
        return self.x_current

    def as_hook(self, rng):
        """Adapter feeding the chain one proposal per kept Gibbs iteration."""

        def hook(state, y_pred):
            self.step(y_pred, rng)

        return hook


def debias_step(chain: DebiasChain, y_prop: float, rng) -> DebiasChain:
    """Functional spelling of ``chain.step``."""
    chain.step(y_prop, rng)
    return chain


@dataclass(eq=False)
class DebiasRun:
    """Retained states and the per-step acceptance indicator."""

    samples: np.ndarray
    accepted: np.ndarray

    @property
    def acceptance_running(self) -> np.ndarray:
        return np.cumsum(self.accepted) / np.arange(1, self.accepted.size + 1)


def run_debias(proposals, x0: float, weight: WeightFn | None = None, rng=None) -> DebiasRun:
    """Apply the Metropolis step once per proposal, starting from ``x0``."""
    if rng is None:
        raise ConfigurationError("run_debias needs an explicit random generator")
    chain = DebiasChain(x0, weight, keep_history=True)
    accepted = np.empty(len(proposals), dtype=bool)
    for i, y in enumerate(proposals):
        before = chain.accept_count
        chain.step(float(y), rng)
        accepted[i] = chain.accept_count > before
    return DebiasRun(np.asarray(chain.history), accepted)


def debias_normalizer(state: ChainState) -> float:
    """``integral of y**-1 g(y) dy`` for the state's mixture, in closed form.

    Component j contributes ``w_j exp(-mu_j + 1/(2 lam))``; the remainder mass
    integrates the base measure, giving ``exp(1/(2 s) + 1/(2 lam))``.
    """
    half_inv_lam = 0.5 / state.lam
    total = float(np.sum(state.w * np.exp(-state.mu + half_inv_lam)))
    rem = _remainder_mass(state)
    if rem > 0.0:
        total += rem * math.exp(0.5 / state.s + half_inv_lam)
    return total


def exact_debias_density(state: ChainState, y: float) -> float:
    """``y**-1 g(y) / normalizer``; integrates to one over the positive axis."""
    if not (np.isfinite(y) and y > 0.0):
        raise DataError(f"debiased density requires y > 0, got {y!r}")
    return float(exact_debias_density_grid(state, np.asarray([y], dtype=float))[0])


def exact_debias_density_grid(state: ChainState, grid) -> np.ndarray:
    """Vectorized exact debiased density; grid points must be >= 0 (limit 0
    is used at y = 0)."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0.0):
        raise DataError("grid points must be nonnegative")
    out = np.zeros(grid.shape)
    pos = grid > 0.0
    g_vals = mixture_density_grid(state, grid)
    out[pos] = g_vals[pos] / grid[pos] / debias_normalizer(state)
    return out


def make_density_accumulator(grid):
    """Hook accumulating the exact debiased density over kept states.

    Returns ``(hook, finalize)``; ``finalize()`` yields the averaged estimate
    as a raw (un-renormalized) ``DensityEstimate``.
    """
    grid = np.asarray(grid, dtype=float)
    accum = np.zeros(grid.shape)
    count = [0]

    def hook(state, y_pred):
        accum[:] += exact_debias_density_grid(state, grid)
        count[0] += 1

    def finalize() -> DensityEstimate:
        if count[0] == 0:
            raise ConfigurationError("no states accumulated")
        return DensityEstimate(grid, accum / count[0], normalized=False)

    return hook, finalize
