"""Run reports and their on-disk layout.

A run writes one directory: a structured-text config echo, single-column CSV
samples, two-column CSV densities, and a JSON diagnostics file.  Everything is
plottable by external tools and diffable in tests; identical config and seed
reproduce the directory byte for byte.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .diagnostics import TraceSummary
from .errors import ConfigurationError, DataError
from .kde import Bandwidth, DensityEstimate

SAMPLE_FILES = {
    "predictive_sample": "predictive_sample.csv",
    "debiased_sample": "debiased_sample.csv",
}
DENSITY_FILES = {
    "predictive_density": "predictive_density.csv",
    "debiased_density": "debiased_density.csv",
    "classical_density": "classical_kde.csv",
    "jones_density": "jones_kde.csv",
}
CONFIG_FILE = "config.txt"
DIAGNOSTICS_FILE = "diagnostics.json"


def write_config_echo(path, entries: dict) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for key in sorted(entries):
            fh.write(f"{key} = {entries[key]}\n")


def read_config_echo(path) -> dict:
    entries = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            key, _, value = line.partition(" = ")
            entries[key.strip()] = value.strip()
    return entries


def write_sample(path, values) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for v in np.asarray(values, dtype=float):
            fh.write(f"{v!r}\n")


def read_sample(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        return np.asarray([float(line) for line in fh if line.strip()], dtype=float)


@dataclass(eq=False)
class RunReport:
    """Everything one fit produces.

    All four density estimates share the configured grid.  ``valid`` is False
    when the chain aborted (truncation guard); partial fields may then be
    empty or None.
    """

    config_echo: dict
    predictive_sample: np.ndarray
    debiased_sample: np.ndarray
    predictive_density: DensityEstimate | None
    debiased_density: DensityEstimate | None
    classical_density: DensityEstimate | None
    jones_density: DensityEstimate | None
    trace: TraceSummary | None
    average_clusters: float
    bandwidth: Bandwidth | None
    valid: bool = True
    error: str | None = None

    def __post_init__(self):
        grids = [
            est.grid
            for est in (
                self.predictive_density,
                self.debiased_density,
                self.classical_density,
                self.jones_density,
            )
            if est is not None
        ]
        if grids and not all(np.array_equal(grids[0], g) for g in grids[1:]):
            raise ConfigurationError("all density estimates must share one grid")
        if self.valid and (self.predictive_sample.size == 0 or self.debiased_sample.size == 0):
            raise ConfigurationError("a valid report needs nonempty samples")

    def write(self, out_dir) -> None:
        os.makedirs(out_dir, exist_ok=True)
        write_config_echo(os.path.join(out_dir, CONFIG_FILE), self.config_echo)
        write_sample(os.path.join(out_dir, SAMPLE_FILES["predictive_sample"]), self.predictive_sample)
        write_sample(os.path.join(out_dir, SAMPLE_FILES["debiased_sample"]), self.debiased_sample)
        for attr, fname in DENSITY_FILES.items():
            est = getattr(self, attr)
            if est is not None:
                est.to_csv(os.path.join(out_dir, fname))
        payload = {
            "average_clusters": self.average_clusters,
            "bandwidth_h": self.bandwidth.h if self.bandwidth else None,
            "bandwidth_method": self.bandwidth.method if self.bandwidth else None,
            "valid": self.valid,
            "error": self.error,
            "trace": json.loads(self.trace.to_json()) if self.trace else None,
        }
        with open(os.path.join(out_dir, DIAGNOSTICS_FILE), "w", encoding="ascii", newline="\n") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, run_dir) -> "RunReport":
        if not os.path.isdir(run_dir):
            raise DataError(f"no run directory at {run_dir!r}")
        cfg_path = os.path.join(run_dir, CONFIG_FILE)
        diag_path = os.path.join(run_dir, DIAGNOSTICS_FILE)
        if not (os.path.isfile(cfg_path) and os.path.isfile(diag_path)):
            raise DataError(f"{run_dir!r} is not a run directory (missing config or diagnostics)")
        config_echo = read_config_echo(cfg_path)
        with open(diag_path, "r", encoding="ascii") as fh:
            payload = json.load(fh)
        densities = {}
        for attr, fname in DENSITY_FILES.items():
            path = os.path.join(run_dir, fname)
            densities[attr] = DensityEstimate.from_csv(path) if os.path.isfile(path) else None
        samples = {}
        for attr, fname in SAMPLE_FILES.items():
            path = os.path.join(run_dir, fname)
            samples[attr] = read_sample(path) if os.path.isfile(path) else np.empty(0)
        bandwidth = None
        if payload.get("bandwidth_h") is not None:
            bandwidth = Bandwidth(payload["bandwidth_h"], payload["bandwidth_method"])
        trace = None
        if payload.get("trace") is not None:
            trace = TraceSummary.from_json(json.dumps(payload["trace"]))
        return cls(
            config_echo=config_echo,
            predictive_sample=samples["predictive_sample"],
            debiased_sample=samples["debiased_sample"],
            predictive_density=densities["predictive_density"],
            debiased_density=densities["debiased_density"],
            classical_density=densities["classical_density"],
            jones_density=densities["jones_density"],
            trace=trace,
            average_clusters=payload["average_clusters"],
            bandwidth=bandwidth,
            valid=payload["valid"],
            error=payload.get("error"),
        )
