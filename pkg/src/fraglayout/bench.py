"""Multi-trial benchmark harness: variant x dataset grids, statistics, files.

Each grid cell (dataset, variant) runs a fixed number of seeded trials; the
per-cell aggregates mirror the usual mean/SD/best/worst reporting and the
flagship variant is compared against every baseline with a two-sample z-test.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import ContractViolation
from .fragments import FragmentSet, OverlapMatrix, build_overlap_matrix
from .stochastic import substream_seed
from .swarm import (
    BASELINE_VARIANTS,
    RunTrace,
    Variant,
    VariantConfig,
    default_config,
    run,
)

SIGNIFICANCE_LEVEL = 0.05
REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BenchDataset:
    label: str
    fragments: FragmentSet
    matrix: OverlapMatrix

    @classmethod
    def from_fragments(cls, label: str, fragments: FragmentSet) -> "BenchDataset":
        return cls(label, fragments, build_overlap_matrix(fragments))


@dataclass(frozen=True)
class TrialReport:
    """One grid cell: its traces and the spread of their final scores."""

    variant: Variant
    dataset_label: str
    trials: tuple[RunTrace, ...]
    mean: float
    sd: float
    best: int
    worst: int

    @classmethod
    def from_trials(
        cls, variant: Variant, dataset_label: str, trials: Sequence[RunTrace]
    ) -> "TrialReport":
        finals = [t.best_fitness for t in trials]
        return cls(
            variant=variant,
            dataset_label=dataset_label,
            trials=tuple(trials),
            mean=statistics.fmean(finals),
            sd=statistics.stdev(finals),
            best=max(finals),
            worst=min(finals),
        )

    @property
    def finals(self) -> list[int]:
        return [t.best_fitness for t in self.trials]


@dataclass(frozen=True)
class PairwiseTest:
    variant_a: str
    variant_b: str
    z_statistic: float
    p_value: float
    significant: bool

    @property
    def pair(self) -> str:
        return f"{self.variant_a}-{self.variant_b}"


@dataclass(frozen=True)
class CellFailure:
    dataset_label: str
    variant: Variant
    error: str


def z_test(
    a: Sequence[float],
    b: Sequence[float],
    variant_a: str = "a",
    variant_b: str = "b",
) -> PairwiseTest:
    """Two-sample unpooled z-test with sample SDs and a two-tailed p-value.

    Degenerate samples follow a documented convention: both variances zero
    gives p = 1 when the means agree and p = 0 when they differ.
    """
    if len(a) < 2 or len(b) < 2:
        raise ContractViolation("z-test needs at least 2 observations per sample")
    mean_a, mean_b = statistics.fmean(a), statistics.fmean(b)
    se = math.sqrt(statistics.variance(a) / len(a) + statistics.variance(b) / len(b))
    if se == 0.0:
        if mean_a == mean_b:
            z, p = 0.0, 1.0
        else:
            z, p = math.copysign(math.inf, mean_a - mean_b), 0.0
    else:
        z = (mean_a - mean_b) / se
        p = math.erfc(abs(z) / math.sqrt(2.0))
    return PairwiseTest(variant_a, variant_b, z, p, p < SIGNIFICANCE_LEVEL)


# ---------------------------------------------------------------------------
# grid execution


def _run_trial(
    cfg: VariantConfig, fragments: FragmentSet, matrix: OverlapMatrix, seed: int
) -> RunTrace:
    return run(cfg, fragments, matrix, seed)


def trial_seed(master_seed: int, dataset_label: str, variant: Variant, k: int) -> int:
    return substream_seed(master_seed, dataset_label, variant.value, k)


def run_grid(
    datasets: Sequence[BenchDataset],
    variants: Sequence[Variant],
    trials_per_cell: int,
    master_seed: int,
    *,
    iters: int = 50,
    population: int = 10,
    jobs: int = 1,
    config_overrides: dict[str, Any] | None = None,
) -> tuple[list[TrialReport], list[CellFailure]]:
    """Run every (dataset, variant) cell for trials_per_cell seeded trials.

    Trial seeds derive from (master_seed, dataset label, variant, trial), so
    reruns reproduce results and jobs > 1 changes wall time only. A failing
    trial voids its whole cell (reported as a CellFailure); other cells are
    unaffected.
    """
    if trials_per_cell < 2:
        raise ContractViolation(
            f"sd undefined below 2 trials, got trials_per_cell={trials_per_cell}"
        )
    overrides = dict(config_overrides or {})
    overrides.update(max_itr=iters, population=population)

    cells: list[tuple[BenchDataset, Variant, VariantConfig]] = []
    for ds in datasets:
        for variant in variants:
            cells.append((ds, variant, default_config(variant, **overrides)))

    tasks = [
        (ds, variant, cfg, k, trial_seed(master_seed, ds.label, variant, k))
        for ds, variant, cfg in cells
        for k in range(trials_per_cell)
    ]

    results: dict[tuple[str, Variant, int], RunTrace | Exception] = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                (ds.label, variant, k): pool.submit(_run_trial, cfg, ds.fragments, ds.matrix, seed)
                for ds, variant, cfg, k, seed in tasks
            }
            for key, future in futures.items():
                exc = future.exception()
                results[key] = exc if exc is not None else future.result()
    else:
        for ds, variant, cfg, k, seed in tasks:
            try:
                results[(ds.label, variant, k)] = _run_trial(cfg, ds.fragments, ds.matrix, seed)
            except Exception as exc:  # cell-level isolation, reported below
                results[(ds.label, variant, k)] = exc

    reports: list[TrialReport] = []
    failures: list[CellFailure] = []
    for ds, variant, _cfg in cells:
        outcomes = [results[(ds.label, variant, k)] for k in range(trials_per_cell)]
        errors = [o for o in outcomes if isinstance(o, Exception)]
        if errors:
            failures.append(CellFailure(ds.label, variant, str(errors[0])))
            continue
        reports.append(TrialReport.from_trials(variant, ds.label, outcomes))
    return reports, failures


def make_ztests(reports: Sequence[TrialReport]) -> list[tuple[str, PairwiseTest]]:
    """CPSOLF-vs-baseline tests per dataset, in fixed baseline order."""
    by_dataset: dict[str, dict[Variant, TrialReport]] = {}
    for report in reports:
        by_dataset.setdefault(report.dataset_label, {})[report.variant] = report

    tests: list[tuple[str, PairwiseTest]] = []
    for label, cell in by_dataset.items():
        flagship = cell.get(Variant.CPSOLF)
        if flagship is None:
            continue
        for baseline in BASELINE_VARIANTS:
            other = cell.get(baseline)
            if other is None:
                continue
            tests.append(
                (label, z_test(flagship.finals, other.finals, "CPSOLF", baseline.value))
            )
    return tests


# ---------------------------------------------------------------------------
# output files


def _write_csv(path: Path, header: list[str], rows: Iterable[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def emit_outputs(
    reports: Sequence[TrialReport],
    ztests: Sequence[tuple[str, PairwiseTest]],
    out_dir: str | Path,
    *,
    master_seed: int | None = None,
) -> dict[str, Path]:
    """Write summary.csv, ztests.csv, convergence.csv, finals.csv, report.json.

    CSV cells use repr-exact floats so aggregates can be recomputed from
    report.json and compared for equality.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv" for name in ("summary", "ztests", "convergence", "finals")}
    paths["report"] = out / "report.json"

    _write_csv(
        paths["summary"],
        ["dataset", "variant", "trials", "mean", "sd", "best", "worst", "iters", "population"],
        (
            [
                r.dataset_label,
                r.variant.value,
                len(r.trials),
                r.mean,
                r.sd,
                r.best,
                r.worst,
                r.trials[0].config.max_itr,
                r.trials[0].config.population,
            ]
            for r in reports
        ),
    )
    _write_csv(
        paths["ztests"],
        ["dataset", "pair", "z_statistic", "p_value", "significant"],
        ([label, t.pair, t.z_statistic, t.p_value, t.significant] for label, t in ztests),
    )
    _write_csv(
        paths["convergence"],
        ["dataset", "variant", "trial", "iteration", "gbest"],
        (
            [r.dataset_label, r.variant.value, k, i, g]
            for r in reports
            for k, trace in enumerate(r.trials)
            for i, g in enumerate(trace.gbest_per_iteration)
        ),
    )
    _write_csv(
        paths["finals"],
        ["dataset", "variant", "trial", "seed", "final_fitness"],
        (
            [r.dataset_label, r.variant.value, k, trace.seed, trace.best_fitness]
            for r in reports
            for k, trace in enumerate(r.trials)
        ),
    )

    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "master_seed": master_seed,
        "reports": [
            {
                "variant": r.variant.value,
                "dataset": r.dataset_label,
                "mean": r.mean,
                "sd": r.sd,
                "best": r.best,
                "worst": r.worst,
                "trials": [t.to_dict() for t in r.trials],
            }
            for r in reports
        ],
        "ztests": [
            {
                "dataset": label,
                "pair": t.pair,
                "variant_a": t.variant_a,
                "variant_b": t.variant_b,
                "z_statistic": t.z_statistic,
                "p_value": t.p_value,
                "significant": t.significant,
            }
            for label, t in ztests
        ],
    }
    with open(paths["report"], "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    return paths
