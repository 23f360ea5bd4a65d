"""Stochastic SDR/SDN process workloads.

Utilizations are drawn with numpy's PCG64 bit generator, which produces the
same stream on every platform for a given seed. SDR draws come first, then
SDN draws, from a single stream.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np


class InvalidUsecaseError(ValueError):
    pass


class WorkloadSpecError(ValueError):
    pass


class ProcessKind(str, enum.Enum):
    SDR = "SDR"  # single-threaded, never split across cores
    SDN = "SDN"  # parallelizable, treated as divisible load once aggregated


@dataclass(frozen=True)
class Process:
    id: int
    kind: ProcessKind
    utilization: float  # percent of one core

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"process id must be non-negative, got {self.id}")
        if not 0.0 < self.utilization <= 100.0:
            raise ValueError(
                f"process {self.id}: utilization must be in (0, 100], got {self.utilization}"
            )


@dataclass(frozen=True)
class WorkloadSpec:
    sdr_count: int
    sdr_range: tuple[float, float]
    sdn_count: int
    sdn_range: tuple[float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sdr_range", tuple(float(x) for x in self.sdr_range))
        object.__setattr__(self, "sdn_range", tuple(float(x) for x in self.sdn_range))
        for name in ("sdr", "sdn"):
            count = getattr(self, f"{name}_count")
            rng = getattr(self, f"{name}_range")
            if isinstance(count, bool) or not isinstance(count, int) or count < 0:
                raise WorkloadSpecError(f"{name}_count must be a non-negative integer, got {count!r}")
            if len(rng) != 2:
                raise WorkloadSpecError(f"{name}_range must be [lo, hi], got {rng!r}")
            lo, hi = rng
            if not (0.0 <= lo <= hi <= 100.0) or math.isnan(lo) or math.isnan(hi):
                raise WorkloadSpecError(f"{name}_range must satisfy 0 <= lo <= hi <= 100, got {rng!r}")
            if count > 0 and hi == 0.0:
                raise WorkloadSpecError(f"{name}_range [0, 0] cannot produce positive utilizations")

    @property
    def label(self) -> str:
        """Compact identifier such as ``50x[80,100]+30x[10,30]``."""
        def fmt(x: float) -> str:
            return f"{x:g}"

        return (
            f"{self.sdr_count}x[{fmt(self.sdr_range[0])},{fmt(self.sdr_range[1])}]"
            f"+{self.sdn_count}x[{fmt(self.sdn_range[0])},{fmt(self.sdn_range[1])}]"
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "sdr_count": self.sdr_count,
            "sdr_range": list(self.sdr_range),
            "sdn_count": self.sdn_count,
            "sdn_range": list(self.sdn_range),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> WorkloadSpec:
        missing = {"sdr_count", "sdr_range", "sdn_count", "sdn_range"} - set(doc)
        if missing:
            raise WorkloadSpecError(f"workload spec is missing fields: {sorted(missing)}")
        return cls(
            sdr_count=doc["sdr_count"],
            sdr_range=tuple(doc["sdr_range"]),
            sdn_count=doc["sdn_count"],
            sdn_range=tuple(doc["sdn_range"]),
        )

    @classmethod
    def from_json(cls, text: str) -> WorkloadSpec:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise WorkloadSpecError(f"invalid workload spec JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise WorkloadSpecError("workload spec JSON must be an object")
        return cls.from_dict(doc)

    @classmethod
    def from_file(cls, path: str | Path) -> WorkloadSpec:
        return cls.from_json(Path(path).read_text())


_USECASES = {
    1: WorkloadSpec(50, (80, 100), 30, (10, 30)),
    2: WorkloadSpec(30, (60, 80), 50, (30, 50)),
    3: WorkloadSpec(50, (80, 100), 50, (30, 50)),
}

USECASES = tuple(sorted(_USECASES))


def usecase_spec(n: int) -> WorkloadSpec:
    """Return the process mix for one of the three reference use cases."""
    try:
        return _USECASES[n]
    except (KeyError, TypeError):
        raise InvalidUsecaseError(f"use case must be one of {list(USECASES)}, got {n!r}") from None


@dataclass(frozen=True)
class Workload:
    processes: tuple[Process, ...]
    spec: WorkloadSpec
    seed: int

    @property
    def sdr(self) -> list[Process]:
        return [p for p in self.processes if p.kind is ProcessKind.SDR]

    @property
    def sdn(self) -> list[Process]:
        return [p for p in self.processes if p.kind is ProcessKind.SDN]

    @property
    def ref(self) -> str:
        return f"seed={self.seed};spec={self.spec.label}"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "kind", "utilization"])
        for p in self.processes:
            writer.writerow([p.id, p.kind.value, repr(p.utilization)])
        return buf.getvalue()


def read_processes_csv(text: str) -> list[Process]:
    """Parse the ``id,kind,utilization`` CSV written by :meth:`Workload.to_csv`."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["id", "kind", "utilization"]:
        raise ValueError(f"expected header id,kind,utilization, got {reader.fieldnames}")
    return [
        Process(int(row["id"]), ProcessKind(row["kind"]), float(row["utilization"]))
        for row in reader
    ]


def workload_from_utils(
    sdr: list[float] | tuple[float, ...] = (),
    sdn: list[float] | tuple[float, ...] = (),
    seed: int = 0,
) -> Workload:
    """Build a workload from explicit utilizations (ids assigned SDR first)."""
    procs = [Process(i, ProcessKind.SDR, float(u)) for i, u in enumerate(sdr)]
    procs += [Process(len(sdr) + j, ProcessKind.SDN, float(u)) for j, u in enumerate(sdn)]

    def span(xs):
        return (min(xs), max(xs)) if xs else (0.0, 0.0)

    spec = WorkloadSpec(len(sdr), span(list(sdr)), len(sdn), span(list(sdn)))
    return Workload(tuple(procs), spec, seed)


def generate_workload(spec: WorkloadSpec, seed: int) -> Workload:
    """Draw i.i.d. uniform utilizations for every process in ``spec``.

    The result is a pure function of ``(spec, seed)``. Degenerate ranges
    (``lo == hi``) yield constant utilizations.
    """
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    rng = np.random.Generator(np.random.PCG64(seed))
    sdr = rng.uniform(spec.sdr_range[0], spec.sdr_range[1], spec.sdr_count)
    sdn = rng.uniform(spec.sdn_range[0], spec.sdn_range[1], spec.sdn_count)
    procs = [Process(i, ProcessKind.SDR, float(u)) for i, u in enumerate(sdr)]
    offset = spec.sdr_count
    procs += [Process(offset + j, ProcessKind.SDN, float(u)) for j, u in enumerate(sdn)]
    return Workload(tuple(procs), spec, seed)


def aggregate_sdn(w: Workload) -> float:
    """Total SDN demand in percent of one core, summed exactly."""
    return math.fsum(p.utilization for p in w.processes if p.kind is ProcessKind.SDN)
