"""Stochastic hybrid of two prediction sources and its Monte Carlo evaluation.

With integer-coded labels, a hybrid prediction starts from the first source's
label f0 and walks toward the second source's label f1 by a binomial number
of unit steps: out = f0 + sign(f1 - f0) * Binomial(|f1 - f0|, mu). At mu = 0
the hybrid reproduces f0 exactly, at mu = 1 it reproduces f1 exactly, and in
between each case's expected label is f0 + mu * (f1 - f0), so mu weighs how
far predictions have migrated from the first model to the second.

Metrics of the hybrid are random variables; they are estimated over repeated
executions with derived per-run seeds, reported as mean, standard deviation
and a 0.95 normal-approximation confidence half-width 1.96 * std / sqrt(runs).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import ConfusionMatrix, MetricSpec, confusion, police_resource
from .seeding import derive_rng

Z_95 = 1.96


def hybrid_predict(f0_label: int, f1_label: int, mu: float, rng: np.random.Generator) -> int:
    """One stochastic draw for a single case."""
    return int(hybrid_sample(np.array([f0_label]), np.array([f1_label]), mu, rng)[0])


def hybrid_sample(f0, f1, mu: float, rng: np.random.Generator) -> np.ndarray:
    """One hybrid execution over aligned prediction vectors."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    f0 = np.asarray(f0, dtype=np.int64)
    f1 = np.asarray(f1, dtype=np.int64)
    if f0.shape != f1.shape:
        raise ValueError("prediction vectors must be aligned")
    rho = f1 - f0
    steps = rng.binomial(np.abs(rho), mu)
    return f0 + np.sign(rho) * steps


@dataclass(frozen=True)
class HybridEstimate:
    mean: float
    std: float
    ci_half_width: float
    n_runs: int
    values: np.ndarray  # per-run metric values


def _run_confusions(f0, f1, truths, mu, n_runs, seed_parts) -> list[ConfusionMatrix]:
    f0 = np.asarray(f0, dtype=np.int64)
    f1 = np.asarray(f1, dtype=np.int64)
    truths = np.asarray(truths, dtype=np.int64)
    if not (f0.shape == f1.shape == truths.shape):
        raise ValueError("prediction and truth vectors must be aligned")
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    cms = []
    for run in range(n_runs):
        rng = derive_rng(*seed_parts, run)
        cms.append(confusion(hybrid_sample(f0, f1, mu, rng), truths))
    return cms


def _summarize(values: np.ndarray) -> HybridEstimate:
    n = values.size
    if np.all(values == values[0]):  # degenerate runs: report the exact value
        return HybridEstimate(float(values[0]), 0.0, 0.0, n, values)
    std = float(values.std(ddof=1)) if n >= 2 else 0.0
    return HybridEstimate(float(values.mean()), std, Z_95 * std / np.sqrt(n), n, values)


def evaluate_hybrid(
    f0_preds, f1_preds, truths, mu: float, metric: MetricSpec, n_runs: int, master_seed: int
) -> HybridEstimate:
    """Monte Carlo estimate of one metric at one mu."""
    cms = _run_confusions(f0_preds, f1_preds, truths, mu, n_runs, (master_seed, "run"))
    return _summarize(np.array([metric.evaluate(cm) for cm in cms]))


@dataclass
class SweepResult:
    grid: np.ndarray  # strictly increasing mu values spanning [0, 1]
    means: np.ndarray
    stds: np.ndarray
    ci_half_widths: np.ndarray
    n_runs: int
    metric: MetricSpec

    def __len__(self) -> int:
        return self.grid.size


def mu_sweep(
    f0_preds,
    f1_preds,
    truths,
    metric: MetricSpec,
    grid_size: int = 200,
    n_runs: int = 10,
    master_seed: int = 0,
) -> SweepResult:
    """Metric statistics along a uniform mu grid on [0, 1]."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    grid = np.linspace(0.0, 1.0, grid_size)
    means = np.empty(grid_size)
    stds = np.empty(grid_size)
    halves = np.empty(grid_size)
    for i, mu in enumerate(grid):
        cms = _run_confusions(f0_preds, f1_preds, truths, mu, n_runs, (master_seed, "mu", i))
        est = _summarize(np.array([metric.evaluate(cm) for cm in cms]))
        means[i], stds[i], halves[i] = est.mean, est.std, est.ci_half_width
    return SweepResult(grid, means, stds, halves, n_runs, metric)


@dataclass(frozen=True)
class ResourceSummary:
    """Distribution of the resource metric at one penalty, over executions."""

    tau: float
    values: np.ndarray
    mean: float
    std: float
    ci_half_width: float
    quantiles: tuple[float, float, float, float, float]  # min, q1, median, q3, max


def resource_profile(
    f0_preds, f1_preds, truths, mu: float, tau_list, n_runs: int = 50, master_seed: int = 0
) -> list[ResourceSummary]:
    """Resource-overload distributions for several penalties at a fixed mu.

    Executions are shared across penalties: each run draws one hybrid
    prediction vector and every tau scores the same confusion matrix.
    """
    tau_list = list(tau_list)
    if any(tau < 0 for tau in tau_list):
        raise ValueError("penalties must be >= 0")
    cms = _run_confusions(f0_preds, f1_preds, truths, mu, n_runs, (master_seed, "run"))
    out = []
    for tau in tau_list:
        values = np.array([police_resource(cm, tau) for cm in cms])
        est = _summarize(values)
        quantiles = tuple(np.quantile(values, (0.0, 0.25, 0.5, 0.75, 1.0)))
        out.append(
            ResourceSummary(tau, values, est.mean, est.std, est.ci_half_width, quantiles)
        )
    return out


def _isotonic_non_decreasing(values: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators projection onto non-decreasing sequences."""
    level = values.astype(np.float64).copy()
    weight = np.ones_like(level)
    size = 0
    for v in range(level.shape[0]):
        level[size], weight[size] = level[v], 1.0
        size += 1
        while size > 1 and level[size - 2] > level[size - 1]:
            total = weight[size - 2] + weight[size - 1]
            level[size - 2] = (weight[size - 2] * level[size - 2] + weight[size - 1] * level[size - 1]) / total
            weight[size - 2] = total
            size -= 1
    return np.repeat(level[:size], weight[:size].astype(np.int64))


def decide_mu(resource_curve: SweepResult, r0: float, monotone: bool = False) -> float:
    """Largest grid mu whose mean resource overload stays within the budget r0.

    Scans the raw Monte Carlo means from mu = 1 downward; `monotone` first
    projects the means onto a non-decreasing curve. Returns 0 when no grid
    point satisfies the constraint.
    """
    if len(resource_curve) == 0:
        raise ValueError("resource curve is empty")
    if r0 < 0:
        raise ValueError("r0 must be >= 0")
    means = resource_curve.means
    if monotone:
        means = _isotonic_non_decreasing(means)
    for i in range(len(resource_curve) - 1, -1, -1):
        if means[i] <= r0:
            return float(resource_curve.grid[i])
    return 0.0


# ---------------------------------------------------------------------------
# Delimited emission: one row per grid point, directly plottable.

SWEEP_COLUMNS = ("mu", "mean", "std", "ci_lo", "ci_hi", "metric", "tau", "n_runs")


def write_sweep(path: str | Path, sweep: SweepResult, manifest: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if manifest:
            fh.write(f"# manifest: {manifest}\n")
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        tau = "" if sweep.metric.tau is None else repr(float(sweep.metric.tau))
        for i in range(len(sweep)):
            writer.writerow(
                [
                    repr(float(sweep.grid[i])),
                    repr(float(sweep.means[i])),
                    repr(float(sweep.stds[i])),
                    repr(float(sweep.means[i] - sweep.ci_half_widths[i])),
                    repr(float(sweep.means[i] + sweep.ci_half_widths[i])),
                    sweep.metric.name,
                    tau,
                    sweep.n_runs,
                ]
            )


def read_sweep(path: str | Path) -> SweepResult:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader)
        if list(header) != list(SWEEP_COLUMNS):
            raise ValueError(f"{path}: unexpected sweep columns {header}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: empty sweep")
    grid = np.array([float(r[0]) for r in rows])
    means = np.array([float(r[1]) for r in rows])
    stds = np.array([float(r[2]) for r in rows])
    halves = means - np.array([float(r[3]) for r in rows])
    name, tau_text, n_runs = rows[0][5], rows[0][6], int(rows[0][7])
    metric = MetricSpec(name, float(tau_text) if tau_text else None)
    return SweepResult(grid, means, stds, halves, n_runs, metric)
