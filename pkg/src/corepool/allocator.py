"""Core allocation: shared-pool packing, class-segregated baseline, exact oracle.

All capacities are in percent of one core (100 per core). SDR processes are
atomic; the aggregated SDN demand is a divisible quantity poured into
whatever room is left.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from corepool.workload import Process, Workload, aggregate_sdn

CORE_CAPACITY = 100.0
EPS = 1e-9  # packing slack for float sums
TOLERANCE = 1e-6  # validation slack


class InfeasibleProcessError(ValueError):
    pass


class OracleSizeError(ValueError):
    pass


class Scheme(str, enum.Enum):
    SHARED = "SHARED"
    SEPARATE_SDR = "SEPARATE_SDR"
    SEPARATE_SDN = "SEPARATE_SDN"


@dataclass(frozen=True)
class CoreAssignment:
    core_index: int
    sdr_process_ids: tuple[int, ...]
    sdn_fraction: float
    total_utilization: float
    base_load: float = 0.0  # occupancy present before allocation (warm pools)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "index": self.core_index,
            "sdr_ids": list(self.sdr_process_ids),
            "sdn_fraction": self.sdn_fraction,
            "total": self.total_utilization,
        }
        if self.base_load:
            d["base_load"] = self.base_load
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> CoreAssignment:
        return cls(
            core_index=int(d["index"]),
            sdr_process_ids=tuple(int(i) for i in d["sdr_ids"]),
            sdn_fraction=float(d["sdn_fraction"]),
            total_utilization=float(d["total"]),
            base_load=float(d.get("base_load", 0.0)),
        )


@dataclass(frozen=True)
class Allocation:
    cores: tuple[CoreAssignment, ...]
    scheme: Scheme
    workload_ref: str = ""

    @property
    def cores_used(self) -> int:
        return len(self.cores)

    @property
    def utilizations(self) -> list[float]:
        return [c.total_utilization for c in sorted(self.cores, key=lambda c: c.core_index)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "scheme": self.scheme.value,
            "workload_ref": self.workload_ref,
            "cores": [c.to_dict() for c in self.cores],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Allocation:
        return cls(
            cores=tuple(CoreAssignment.from_dict(c) for c in d["cores"]),
            scheme=Scheme(d["scheme"]),
            workload_ref=d.get("workload_ref", ""),
        )


@dataclass
class _Core:
    base: float = 0.0
    sdr_ids: list[int] = field(default_factory=list)
    sdr_load: float = 0.0
    sdn: float = 0.0

    @property
    def used(self) -> float:
        return self.base + self.sdr_load + self.sdn

    def freeze(self, index: int) -> CoreAssignment:
        return CoreAssignment(index, tuple(self.sdr_ids), self.sdn, self.used, self.base)


def _check_sdr(sdr: Sequence[Process]) -> None:
    for p in sdr:
        if p.utilization > CORE_CAPACITY:
            raise InfeasibleProcessError(
                f"SDR process {p.id} needs {p.utilization}% of a core and cannot be split"
            )


def _ffd(sdr: Sequence[Process], cores: list[_Core]) -> list[_Core]:
    """First-fit-decreasing; ties broken by ascending process id."""
    _check_sdr(sdr)
    for p in sorted(sdr, key=lambda p: (-p.utilization, p.id)):
        for core in cores:
            if core.used + p.utilization <= CORE_CAPACITY + EPS:
                break
        else:
            core = _Core()
            cores.append(core)
        core.sdr_ids.append(p.id)
        core.sdr_load += p.utilization
    return cores


def _pour(amount: float, cores: list[_Core]) -> list[_Core]:
    """Fill remaining room in index order with divisible load, opening cores as needed."""
    remaining = amount
    last = None
    for core in cores:
        if remaining <= EPS:
            break
        chunk = min(CORE_CAPACITY - core.used, remaining)
        if chunk > 0:
            core.sdn += chunk
            remaining -= chunk
            last = core
    while remaining > EPS:
        chunk = min(CORE_CAPACITY, remaining)
        last = _Core(sdn=chunk)
        cores.append(last)
        remaining -= chunk
    if remaining > 0 and last is not None:
        last.sdn += remaining  # float residue, at most EPS
    return cores


def allocate_shared(w: Workload, start_occupancy: Sequence[float] = ()) -> Allocation:
    """Pack SDR and SDN onto one core pool.

    Largest SDR processes go first, each onto the first core with room; the
    summed SDN demand then fills leftover capacity core by core. The result
    uses ``max(FFD cores for SDR, ceil(total / 100))`` cores on an empty pool.

    ``start_occupancy`` lists loads already present on existing cores; those
    cores are reused before new ones are opened.
    """
    cores = [_Core(base=float(b)) for b in start_occupancy]
    if any(not 0.0 <= c.base <= CORE_CAPACITY for c in cores):
        raise ValueError("start occupancy values must lie in [0, 100]")
    _ffd(w.sdr, cores)
    _pour(aggregate_sdn(w), cores)
    return Allocation(
        tuple(c.freeze(i) for i, c in enumerate(cores)), Scheme.SHARED, w.ref
    )


def allocate_separate(w: Workload) -> tuple[Allocation, Allocation]:
    """SDR and SDN on disjoint core sets: ``(sdr_allocation, sdn_allocation)``.

    SDN core indices continue after the SDR ones so the two sets never overlap.
    """
    sdr_cores = _ffd(w.sdr, [])
    sdn_cores = _pour(aggregate_sdn(w), [])
    offset = len(sdr_cores)
    return (
        Allocation(tuple(c.freeze(i) for i, c in enumerate(sdr_cores)), Scheme.SEPARATE_SDR, w.ref),
        Allocation(
            tuple(c.freeze(offset + i) for i, c in enumerate(sdn_cores)), Scheme.SEPARATE_SDN, w.ref
        ),
    )


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str


def validate_allocation(a: Allocation, w: Workload) -> list[Violation]:
    """Check an allocation against its workload; an empty list means valid."""
    out: list[Violation] = []
    sdr = {p.id: p for p in w.sdr}
    sdn_ids = {p.id for p in w.sdn}
    expect_sdr = a.scheme in (Scheme.SHARED, Scheme.SEPARATE_SDR)
    expect_sdn = a.scheme in (Scheme.SHARED, Scheme.SEPARATE_SDN)

    seen_idx: set[int] = set()
    placed: dict[int, int] = {}
    for c in a.cores:
        if c.core_index < 0 or c.core_index in seen_idx:
            out.append(Violation("bad-core-index", f"core index {c.core_index} is negative or repeated"))
        seen_idx.add(c.core_index)
        if c.sdn_fraction < -TOLERANCE or c.base_load < -TOLERANCE:
            out.append(Violation("negative-load", f"core {c.core_index} has negative load"))
        load = c.base_load + c.sdn_fraction
        for pid in c.sdr_process_ids:
            if pid in sdr:
                load += sdr[pid].utilization
                placed[pid] = placed.get(pid, 0) + 1
            elif pid in sdn_ids:
                out.append(Violation("wrong-kind", f"SDN process {pid} placed as an SDR item on core {c.core_index}"))
            else:
                out.append(Violation("unknown-process", f"core {c.core_index} holds unknown process {pid}"))
        if abs(load - c.total_utilization) > TOLERANCE:
            out.append(
                Violation(
                    "total-mismatch",
                    f"core {c.core_index}: total {c.total_utilization} != assigned load {load}",
                )
            )
        if max(load, c.total_utilization) > CORE_CAPACITY + TOLERANCE:
            out.append(
                Violation("over-capacity", f"core {c.core_index} at {max(load, c.total_utilization):g}%")
            )

    if expect_sdr:
        for pid in sdr:
            n = placed.get(pid, 0)
            if n == 0:
                out.append(Violation("unplaced-process", f"SDR process {pid} is not placed"))
            elif n > 1:
                out.append(Violation("duplicate-process", f"SDR process {pid} placed {n} times"))
    elif placed:
        out.append(Violation("wrong-kind", f"SDR processes {sorted(placed)} in an SDN-only allocation"))

    sdn_total = math.fsum(c.sdn_fraction for c in a.cores)
    expected = aggregate_sdn(w) if expect_sdn else 0.0
    if abs(sdn_total - expected) > TOLERANCE:
        out.append(Violation("sdn-mismatch", f"SDN placed {sdn_total} != expected {expected}"))
    return out


def brute_force_min_cores(w: Workload, max_items: int = 10) -> int:
    """Exact minimum core count by exhaustive search over SDR groupings.

    Every way of grouping the SDR processes onto cores is explored (with
    branch-and-bound pruning); each grouping is then topped up with the
    divisible SDN demand, so a grouping into ``k`` cores costs
    ``max(k, ceil(total / 100))``.
    """
    # Order only affects pruning speed, not the result.
    items = sorted((p.utilization for p in w.sdr), reverse=True)
    if len(items) > max_items:
        raise OracleSizeError(f"{len(items)} SDR items exceeds oracle limit of {max_items}")
    _check_sdr(w.sdr)
    total = math.fsum(items) + aggregate_sdn(w)
    floor = math.ceil(total / CORE_CAPACITY - EPS) if total > EPS else 0
    best = [max(len(items), floor)]  # one core per SDR item is always feasible

    def search(i: int, loads: list[float]) -> None:
        if max(len(loads), floor) >= best[0]:
            return
        if i == len(items):
            best[0] = max(len(loads), floor)
            return
        u = items[i]
        tried: set[float] = set()
        for k in range(len(loads)):
            if loads[k] in tried or loads[k] + u > CORE_CAPACITY + EPS:
                continue
            tried.add(loads[k])
            loads[k] += u
            search(i + 1, loads)
            loads[k] -= u
        loads.append(u)
        search(i + 1, loads)
        loads.pop()

    search(0, [])
    return best[0]
