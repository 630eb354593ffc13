"""Rate reports: delimited summaries and rendered figures.

Given an :class:`ErrorRates` sample the report directory receives two
CSV files (the headline numbers and a threshold sweep recomputed from
the sampled distances) and two PNG figures (distance distributions and
error rates across thresholds).
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import ErrorRates

RATES_CSV = "rates.csv"
SWEEP_CSV = "threshold_sweep.csv"
DISTANCES_PNG = "distance_distributions.png"
SWEEP_PNG = "error_rates_vs_threshold.png"


def sweep_thresholds(
    rates: ErrorRates, steps: int = 101
) -> list[tuple[float, float, float]]:
    """(threshold, frr, far) rows recomputed from the sampled distances."""
    rows = []
    trials = rates.trials
    for step in range(steps):
        threshold = step / (steps - 1)
        frr = sum(1 for d in rates.genuine_distances if d > threshold) / trials
        far = sum(1 for d in rates.impostor_distances if d <= threshold) / trials
        rows.append((threshold, frr, far))
    return rows


def write_rates_csv(rates: ErrorRates, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "value"])
        writer.writerow(["trials", rates.trials])
        writer.writerow(["vector_length", rates.vector_length])
        writer.writerow(["threshold", rates.threshold])
        writer.writerow(["genuine_flip_prob", rates.genuine_flip_prob])
        writer.writerow(["genuine_rejects", rates.genuine_rejects])
        writer.writerow(["impostor_accepts", rates.impostor_accepts])
        writer.writerow(["frr", rates.frr])
        writer.writerow(["far", rates.far])


def write_sweep_csv(sweep: list[tuple[float, float, float]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["threshold", "frr", "far"])
        for threshold, frr, far in sweep:
            writer.writerow([f"{threshold:.2f}", frr, far])


def render_distance_histogram(rates: ErrorRates, path: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 5))
    bins = [i / 100 for i in range(0, 101, 2)]
    ax.hist(
        rates.genuine_distances,
        bins=bins,
        alpha=0.6,
        label="genuine captures",
        color="tab:blue",
    )
    ax.hist(
        rates.impostor_distances,
        bins=bins,
        alpha=0.6,
        label="impostor captures",
        color="tab:red",
    )
    ax.axvline(
        rates.threshold,
        color="black",
        linestyle="--",
        label=f"threshold = {rates.threshold}",
    )
    ax.set_xlabel("fractional Hamming distance")
    ax.set_ylabel("trials")
    ax.set_title(
        f"Distance distributions ({rates.trials} trials, "
        f"L = {rates.vector_length})"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_sweep_figure(
    sweep: list[tuple[float, float, float]], threshold: float, path: str
) -> None:
    thresholds = [row[0] for row in sweep]
    frrs = [row[1] for row in sweep]
    fars = [row[2] for row in sweep]
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(thresholds, frrs, label="false rejection rate", color="tab:blue")
    ax.plot(thresholds, fars, label="false acceptance rate", color="tab:red")
    ax.axvline(threshold, color="black", linestyle="--", label=f"threshold = {threshold}")
    ax.set_xlabel("match threshold")
    ax.set_ylabel("error rate")
    ax.set_title("Error rates across thresholds")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(rates: ErrorRates, directory: str) -> dict[str, str]:
    """Write all report files; returns {name: path} for what was written."""
    os.makedirs(directory, exist_ok=True)
    sweep = sweep_thresholds(rates)
    paths = {
        RATES_CSV: os.path.join(directory, RATES_CSV),
        SWEEP_CSV: os.path.join(directory, SWEEP_CSV),
        DISTANCES_PNG: os.path.join(directory, DISTANCES_PNG),
        SWEEP_PNG: os.path.join(directory, SWEEP_PNG),
    }
    write_rates_csv(rates, paths[RATES_CSV])
    write_sweep_csv(sweep, paths[SWEEP_CSV])
    render_distance_histogram(rates, paths[DISTANCES_PNG])
    render_sweep_figure(sweep, rates.threshold, paths[SWEEP_PNG])
    return paths
