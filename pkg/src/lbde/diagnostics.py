"""Chain and estimate diagnostics: running averages, autocorrelation,
cluster-count summaries, and the distance measures the acceptance tests use.

The autocorrelation uses the biased (n-denominator) normalization, the common
default for MCMC traces.  L1 distances are trapezoid integrals of |p - q| on a
shared grid and form a metric on estimates over that grid.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DataError
from .kde import DensityEstimate


def running_average(x) -> np.ndarray:
    """``out[k] = mean(x[:k+1])``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DataError("need a nonempty 1-D sequence")
    return np.cumsum(arr) / np.arange(1, arr.size + 1)


def acf(x, max_lag: int = 100) -> np.ndarray:
    """Autocorrelation at lags 0..max_lag with biased normalization.

    ``rho(k) = sum_t (x_t - mean)(x_{t+k} - mean) / sum_t (x_t - mean)^2``
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DataError("need a 1-D sequence")
    if max_lag < 1 or arr.size <= max_lag:
        raise DataError(f"need length > max_lag >= 1, got n={arr.size}, max_lag={max_lag}")
    centered = arr - arr.mean()
    denom = float(centered @ centered)
    if denom == 0.0:
        raise DataError("zero variance; autocorrelation undefined")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(centered[:-k] @ centered[k:]) / denom
    return out


def average_clusters(cluster_counts) -> float:
    """Arithmetic mean of per-iteration distinct-allocation counts."""
    arr = np.asarray(cluster_counts, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DataError("need a nonempty sequence of cluster counts")
    return float(arr.mean())


def l1_distance(p: DensityEstimate, q: DensityEstimate) -> float:
    """Trapezoid integral of |p - q| over the shared grid."""
    if not np.array_equal(p.grid, q.grid):
        raise ConfigurationError("L1 distance requires identical grids")
    return float(np.trapezoid(np.abs(p.values - q.values), p.grid))


def ks_statistic(sample, cdf) -> float:
    """Sup-norm distance between the empirical CDF of ``sample`` and ``cdf``."""
    arr = np.sort(np.asarray(sample, dtype=float))
    if arr.size == 0:
        raise DataError("need a nonempty sample")
    n = arr.size
    ref = np.asarray(cdf(arr), dtype=float)
    steps = np.arange(1, n + 1) / n
    d_plus = float(np.max(steps - ref))
    d_minus = float(np.max(ref - (steps - 1.0 / n)))
    return max(d_plus, d_minus)


@dataclass(eq=False)
class TraceSummary:
    """Per-run trace diagnostics.

    ``running_mean`` tracks the predictive sample, ``acceptance_running`` the
    debiasing chain's acceptance rate, ``cluster_counts`` the number of
    occupied mixture components per kept iteration.
    """

    running_mean: np.ndarray
    acf: np.ndarray
    acceptance_running: np.ndarray
    cluster_counts: np.ndarray

    def __post_init__(self):
        self.running_mean = np.asarray(self.running_mean, dtype=float)
        self.acf = np.asarray(self.acf, dtype=float)
        self.acceptance_running = np.asarray(self.acceptance_running, dtype=float)
        self.cluster_counts = np.asarray(self.cluster_counts, dtype=int)
        if self.acf.size and self.acf[0] != 1.0:
            raise ConfigurationError("acf[0] must be 1")
        if self.acceptance_running.size and (
            np.any(self.acceptance_running < 0.0) or np.any(self.acceptance_running > 1.0)
        ):
            raise ConfigurationError("acceptance rates must lie in [0, 1]")

    def to_json(self) -> str:
        payload = {
            "running_mean": self.running_mean.tolist(),
            "acf": self.acf.tolist(),
            "acceptance_running": self.acceptance_running.tolist(),
            "cluster_counts": self.cluster_counts.tolist(),
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TraceSummary":
        payload = json.loads(text)
        return cls(
            payload["running_mean"],
            payload["acf"],
            payload["acceptance_running"],
            payload["cluster_counts"],
        )
