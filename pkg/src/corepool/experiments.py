"""Repeated-trial comparisons of shared vs. separate allocation."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Any, Iterable, Sequence

import numpy as np

from corepool.allocator import allocate_separate, allocate_shared
from corepool.power import ServerProfile, savings_percent, total_power
from corepool.workload import WorkloadSpec, generate_workload

SCHEMA_VERSION = 1
CSV_HEADER = [
    "trial",
    "seed",
    "shared_cores",
    "separate_cores",
    "shared_watts",
    "separate_watts",
    "core_savings_pct",
    "power_savings_pct",
]
METRICS = CSV_HEADER[2:]


class EmptySampleError(ValueError):
    pass


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    seed: int
    shared_cores: int
    separate_cores: int
    shared_watts: float
    separate_watts: float
    core_savings_pct: float
    power_savings_pct: float

    def row(self) -> list[Any]:
        return [getattr(self, f.name) for f in fields(self)]


@dataclass(frozen=True)
class BoxplotStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float


def boxplot_stats(samples: Iterable[float]) -> BoxplotStats:
    """Five-number summary plus mean.

    Quartiles interpolate linearly between closest ranks (numpy's default
    ``linear`` percentile method).
    """
    xs = np.asarray(list(samples), dtype=float)
    if xs.size == 0:
        raise EmptySampleError("boxplot statistics need at least one sample")
    q1, med, q3 = np.percentile(xs, [25, 50, 75], method="linear")
    mean = math.fsum(xs.tolist()) / xs.size
    lo, hi = float(xs.min()), float(xs.max())
    return BoxplotStats(lo, float(q1), float(med), float(q3), hi, min(max(mean, lo), hi))


def compute_stats(trials: Sequence[TrialResult]) -> dict[str, BoxplotStats]:
    return {m: boxplot_stats(getattr(t, m) for t in trials) for m in METRICS}


@dataclass(frozen=True)
class ComparisonReport:
    label: str
    spec: WorkloadSpec
    profile_name: str
    base_seed: int
    trials: tuple[TrialResult, ...]
    stats: dict[str, BoxplotStats]

    def median(self, metric: str) -> float:
        return self.stats[metric].median

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "label": self.label,
            "spec": self.spec.to_dict(),
            "profile": self.profile_name,
            "base_seed": self.base_seed,
            "trials": [asdict(t) for t in self.trials],
            "stats": {m: asdict(s) for m, s in self.stats.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> ComparisonReport:
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {doc.get('schema')!r}")
        return cls(
            label=doc["label"],
            spec=WorkloadSpec.from_dict(doc["spec"]),
            profile_name=doc["profile"],
            base_seed=doc["base_seed"],
            trials=tuple(TrialResult(**t) for t in doc["trials"]),
            stats={m: BoxplotStats(**s) for m, s in doc["stats"].items()},
        )


def run_trial(spec: WorkloadSpec, profile: ServerProfile, index: int, seed: int) -> TrialResult:
    w = generate_workload(spec, seed)
    shared = allocate_shared(w)
    separate = allocate_separate(w)
    p_shared = total_power(shared, profile)
    p_separate = total_power(separate, profile)
    return TrialResult(
        trial_index=index,
        seed=seed,
        shared_cores=p_shared.cores_used,
        separate_cores=p_separate.cores_used,
        shared_watts=p_shared.total_watts,
        separate_watts=p_separate.total_watts,
        core_savings_pct=savings_percent(p_shared.cores_used, p_separate.cores_used),
        power_savings_pct=savings_percent(p_shared, p_separate),
    )


def run_trials(
    spec: WorkloadSpec,
    profile: ServerProfile,
    n_trials: int,
    base_seed: int,
    label: str | None = None,
    max_workers: int | None = None,
) -> ComparisonReport:
    """Run ``n_trials`` independent comparisons; trial ``t`` uses seed ``base_seed + t``.

    With ``max_workers`` > 1 trials run on a thread pool; results are always
    assembled in trial order, so the report does not depend on scheduling.
    """
    if isinstance(n_trials, bool) or not isinstance(n_trials, int) or n_trials < 1:
        raise ValueError(f"n_trials must be a positive integer, got {n_trials!r}")
    jobs = [(t, base_seed + t) for t in range(n_trials)]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            trials = list(pool.map(lambda j: run_trial(spec, profile, *j), jobs))
    else:
        trials = [run_trial(spec, profile, t, s) for t, s in jobs]
    return ComparisonReport(
        label=label if label is not None else spec.label,
        spec=spec,
        profile_name=profile.name,
        base_seed=base_seed,
        trials=tuple(trials),
        stats=compute_stats(trials),
    )


def trials_to_csv(trials: Iterable[TrialResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t in trials:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in t.row()])
    return buf.getvalue()


def trials_from_csv(text: str) -> list[TrialResult]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}, got {reader.fieldnames}")
    out = []
    for r in reader:
        out.append(
            TrialResult(
                trial_index=int(r["trial"]),
                seed=int(r["seed"]),
                shared_cores=int(r["shared_cores"]),
                separate_cores=int(r["separate_cores"]),
                shared_watts=float(r["shared_watts"]),
                separate_watts=float(r["separate_watts"]),
                core_savings_pct=float(r["core_savings_pct"]),
                power_savings_pct=float(r["power_savings_pct"]),
            )
        )
    return out


def export_report(r: ComparisonReport, format: str = "json") -> str:
    """Serialize a report: CSV gives one row per trial, JSON adds spec and stats."""
    fmt = format.lower()
    if fmt == "csv":
        return trials_to_csv(r.trials)
    if fmt == "json":
        return json.dumps(r.to_dict(), indent=2) + "\n"
    raise ValueError(f"unknown report format {format!r}; use csv or json")


def report_from_json(text: str) -> ComparisonReport:
    return ComparisonReport.from_dict(json.loads(text))


def summary_table(reports: Sequence[ComparisonReport]) -> str:
    """Markdown table of medians (and quartiles) per report."""
    lines = [
        "| use case | profile | trials | cores shared | cores separate | core savings % "
        "| watts shared | watts separate | power savings % (q1 / median / q3) |",
        "|---|---|---|---|---|---|---|---|---|",
    ]
    for r in reports:
        s = r.stats
        ps = s["power_savings_pct"]
        lines.append(
            f"| {r.label} | {r.profile_name} | {len(r.trials)} "
            f"| {s['shared_cores'].median:g} | {s['separate_cores'].median:g} "
            f"| {s['core_savings_pct'].median:.2f} "
            f"| {s['shared_watts'].median:.1f} | {s['separate_watts'].median:.1f} "
            f"| {ps.q1:.2f} / {ps.median:.2f} / {ps.q3:.2f} |"
        )
    return "\n".join(lines) + "\n"
