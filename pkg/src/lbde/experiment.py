"""Experiment orchestration: configuration, data ingestion, synthetic data,
the fit pipeline, cross-run comparison, and the sample-size consistency ladder.

``fit`` wires the whole estimator together: it fits the mixture to the biased
sample, couples a Metropolis debiasing chain to the kept predictive draws,
averages the exact debiased density over kept states, and computes both
frequentist baselines with a common bandwidth.  One master seed is split into
independent streams for data generation, the Gibbs chain, and the debiasing
chain, so runs are reproducible end to end.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import distributions as dists
from ._kernels import default_backend
from .debias import DebiasChain, WeightFn, make_density_accumulator
from .diagnostics import TraceSummary, acf, l1_distance, running_average
from .dpmm import Dataset, Hyperparams, run_chain
from .errors import ConfigurationError, DataError
from .kde import Bandwidth, DensityEstimate, classical_kde, default_grid, jones_kde, select_bandwidth
from .report import RunReport
from .rng import make_rng, split_rng

PRESETS = {
    "gamma1": (dists.Gamma(2.0, 0.5), 50),
    "mixture2": (dists.Mixture((0.25, 0.75), (dists.Gamma(2.0, 1.0), dists.Gamma(10.0, 1.0))), 70),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One run's inputs: exactly one data source, priors, grid, and output."""

    data_path: str | None = None
    preset: str | None = None
    truth: object | None = None
    n: int | None = None
    hyper: Hyperparams = field(default_factory=Hyperparams)
    weight: WeightFn = field(default_factory=WeightFn.length)
    bandwidth: float | None = None
    grid_max: float | None = None
    grid_points: int = 512
    out_dir: str | None = None
    seed: int = 0
    backend: str = "auto"

    def __post_init__(self):
        if self.preset is not None:
            if self.preset not in PRESETS:
                raise ConfigurationError(
                    f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}"
                )
            truth, default_n = PRESETS[self.preset]
            if self.truth is None:
                object.__setattr__(self, "truth", truth)
            if self.n is None:
                object.__setattr__(self, "n", default_n)
        has_synthetic = self.truth is not None
        if (self.data_path is None) == (not has_synthetic):
            raise ConfigurationError("exactly one data source: --data or a synthetic preset")
        if has_synthetic and (self.n is None or self.n < 1):
            raise ConfigurationError("synthetic data needs a positive sample size")
        if self.grid_points < 2:
            raise ConfigurationError("grid needs at least 2 points")
        if self.bandwidth is not None and self.bandwidth <= 0.0:
            raise ConfigurationError("bandwidth override must be positive")

    def echo(self) -> dict:
        hp = self.hyper
        return {
            "data_path": self.data_path if self.data_path else "none",
            "preset": self.preset if self.preset else "none",
            "truth": dists.describe(self.truth) if self.truth is not None else "none",
            "n": str(self.n) if self.n is not None else "none",
            "seed": str(self.seed),
            "iters": str(hp.n_iter),
            "burnin": str(hp.burn_in),
            "thin": str(hp.thin),
            "a": repr(hp.a),
            "b": repr(hp.b),
            "s": repr(hp.s),
            "c": repr(hp.c),
            "n_max": str(hp.n_max) if hp.n_max is not None else "auto",
            "weight": self.weight.describe(),
            "bandwidth": repr(self.bandwidth) if self.bandwidth is not None else "auto",
            "grid_max": repr(self.grid_max) if self.grid_max is not None else "auto",
            "grid_points": str(self.grid_points),
            "backend": default_backend() if self.backend == "auto" else self.backend,
        }


def load_csv(path) -> Dataset:
    """Read one numeric column (optional single header line) of positive values."""
    if not os.path.isfile(path):
        raise DataError(f"no data file at {path!r}")
    values = []
    first_content_line = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if first_content_line is None:
                first_content_line = lineno
            try:
                value = float(text)
            except ValueError:
                if lineno == first_content_line:
                    continue  # header
                raise DataError(f"{path}: non-numeric entry at line {lineno}") from None
            if not np.isfinite(value) or value <= 0.0:
                raise DataError(f"{path}: nonpositive entry at line {lineno}")
            values.append(value)
    if not values:
        raise DataError(f"{path}: no observations found")
    return Dataset(np.asarray(values))


def gen_synthetic(descriptor, n: int, seed: int | None = None, rng=None) -> Dataset:
    """n i.i.d. draws from the descriptor; reproducible per seed."""
    if rng is None:
        if seed is None:
            raise ConfigurationError("gen_synthetic needs a seed or a generator")
        rng = make_rng(seed)
    if n < 1:
        raise ConfigurationError("need n >= 1 draws")
    return Dataset(dists.sample(descriptor, rng, size=int(n)))


def _trace_summary(predictive, chain: DebiasChain, cluster_counts) -> TraceSummary:
    if predictive.size >= 2:
        max_lag = min(100, predictive.size - 1)
        try:
            acf_vals = acf(predictive, max_lag)
        except DataError:
            acf_vals = np.ones(1)
    else:
        acf_vals = np.ones(1)
    return TraceSummary(
        running_mean=running_average(predictive),
        acf=acf_vals,
        acceptance_running=chain.acceptance_running,
        cluster_counts=cluster_counts,
    )


def fit(config: ExperimentConfig) -> RunReport:
    """Run the full pipeline for one configuration; write the report if asked."""
    rng_data, rng_chain, rng_debias = split_rng(config.seed, 3)
    if config.data_path is not None:
        data = load_csv(config.data_path)
    else:
        data = gen_synthetic(config.truth, config.n, rng=rng_data)

    grid = default_grid(data.y, config.grid_max, config.grid_points)
    if config.bandwidth is not None:
        bandwidth = Bandwidth(config.bandwidth, "manual")
    else:
        bandwidth = select_bandwidth(data.y)

    chain = DebiasChain(float(data.y[0]), config.weight, keep_history=True)
    f_hook, f_finalize = make_density_accumulator(grid)
    run = run_chain(
        data, config.hyper, rng=rng_chain, grid=grid,
        hooks=(chain.as_hook(rng_debias), f_hook), backend=config.backend,
    )

    classical = classical_kde(data.y, bandwidth, grid)
    jones = jones_kde(data.y, bandwidth, grid)

    if run.valid:
        report = RunReport(
            config_echo=config.echo(),
            predictive_sample=run.predictive,
            debiased_sample=np.asarray(chain.history),
            predictive_density=run.g_density.normalize(),
            debiased_density=f_finalize().normalize(),
            classical_density=classical,
            jones_density=jones,
            trace=_trace_summary(run.predictive, chain, run.cluster_counts),
            average_clusters=float(run.cluster_counts.mean()),
            bandwidth=bandwidth,
            valid=True,
        )
    else:
        report = RunReport(
            config_echo=config.echo(),
            predictive_sample=run.predictive,
            debiased_sample=np.asarray(chain.history if chain.history else []),
            predictive_density=None,
            debiased_density=None,
            classical_density=classical,
            jones_density=jones,
            trace=None,
            average_clusters=float("nan"),
            bandwidth=bandwidth,
            valid=False,
            error=run.error,
        )
    if config.out_dir is not None:
        report.write(config.out_dir)
    return report


_G_METHODS = ("predictive_density", "classical_density")
_F_METHODS = ("debiased_density", "jones_density")
_ALL_METHODS = _G_METHODS + _F_METHODS


def _truth_estimates(truth, grid):
    """Biased truth g0 and its debiased counterpart f0 evaluated on the grid."""
    g0 = DensityEstimate(grid, dists.pdf_eval(truth, grid), normalized=False)
    f_truth = dists.length_debiased(truth)
    f0 = DensityEstimate(grid, dists.pdf_eval(f_truth, grid), normalized=False)
    return g0, f0


def compare(run_dirs, out_path=None) -> list:
    """L1 distances to truth (when synthetic) and pairwise across reports.

    Returns rows ``(kind, label_a, label_b, method, l1)``; ``kind`` is
    ``truth`` (label_b names the reference density) or ``pair``.
    """
    if not run_dirs:
        raise ConfigurationError("need at least one report directory")
    reports = []
    for path in run_dirs:
        report = RunReport.read(path)
        if not report.valid:
            raise DataError(f"report {path!r} is flagged invalid")
        reports.append((os.path.basename(os.path.normpath(path)), report))

    first = reports[0][1]
    ref_grid = first.predictive_density.grid
    truth_text = first.config_echo.get("truth", "none")
    for label, report in reports[1:]:
        if not np.array_equal(report.predictive_density.grid, ref_grid):
            raise ConfigurationError(f"report {label!r} uses a different grid")
        if report.config_echo.get("truth", "none") != truth_text:
            raise ConfigurationError(f"report {label!r} uses a different truth descriptor")

    rows = []
    if truth_text != "none":
        truth = dists.parse_distribution(truth_text)
        g0, f0 = _truth_estimates(truth, ref_grid)
        for label, report in reports:
            for method in _ALL_METHODS:
                est = getattr(report, method)
                target = g0 if method in _G_METHODS else f0
                target_name = "g_truth" if method in _G_METHODS else "f_truth"
                rows.append(("truth", label, target_name, method, l1_distance(est, target)))
            # the no-debiasing baseline, measured against the density of interest
            rows.append(
                ("truth", label, "f_truth", "classical_density", l1_distance(report.classical_density, f0))
            )
    for i, (label_a, rep_a) in enumerate(reports):
        for label_b, rep_b in reports[i:]:
            for method in _ALL_METHODS:
                rows.append(
                    ("pair", label_a, label_b, method,
                     l1_distance(getattr(rep_a, method), getattr(rep_b, method)))
                )
    if out_path is not None:
        with open(out_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("kind,label_a,label_b,method,l1\n")
            for kind, a, b, method, value in rows:
                fh.write(f"{kind},{a},{b},{method},{value!r}\n")
    return rows


def consistency(config: ExperimentConfig, ns=(50, 200, 800), replications: int = 5, out_path=None) -> list:
    """Mean L1 between the debiased estimate and the debiased truth per n.

    Runs ``fit`` at each rung and replication with the derived seed
    ``seed + 1000 n + r``.  Returns rows ``(n, mean_l1, [per-replication l1])``.
    """
    if config.truth is None:
        raise ConfigurationError("consistency needs a synthetic truth")
    if replications < 1:
        raise ConfigurationError("need at least one replication")
    f_truth = dists.length_debiased(config.truth)
    rows = []
    for n in ns:
        l1s = []
        for r in range(replications):
            cfg = replace(
                config, n=int(n), seed=config.seed + 1000 * int(n) + r, out_dir=None
            )
            report = fit(cfg)
            f0 = DensityEstimate(
                report.debiased_density.grid,
                dists.pdf_eval(f_truth, report.debiased_density.grid),
                normalized=False,
            )
            l1s.append(l1_distance(report.debiased_density, f0))
        rows.append((int(n), float(np.mean(l1s)), l1s))
    if out_path is not None:
        with open(out_path, "w", encoding="ascii", newline="\n") as fh:
            reps = ",".join(f"rep{r}" for r in range(replications))
            fh.write(f"n,mean_l1,{reps}\n")
            for n, mean_l1, l1s in rows:
                vals = ",".join(repr(v) for v in l1s)
                fh.write(f"{n},{mean_l1!r},{vals}\n")
    return rows
