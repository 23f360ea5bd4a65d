"""Server power profiles and power evaluation of core allocations."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from corepool.allocator import CORE_CAPACITY, Allocation

PROFILE_DIR_ENV = "COREPOOL_PROFILE_DIR"
BUNDLED_PROFILES = ("asus-80core", "hpe-400core")


class ProfileFormatError(ValueError):
    pass


class UndefinedSavingsError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class ServerProfile:
    name: str
    cores_per_server: int
    curve: tuple[tuple[float, float], ...]  # (load fraction, watts), loads increasing

    def __post_init__(self) -> None:
        curve = tuple((float(x), float(y)) for x, y in self.curve)
        object.__setattr__(self, "curve", curve)
        if isinstance(self.cores_per_server, bool) or not isinstance(self.cores_per_server, int):
            raise ProfileFormatError("cores_per_server must be an integer")
        if self.cores_per_server <= 0:
            raise ProfileFormatError("cores_per_server must be positive")
        if len(curve) < 2:
            raise ProfileFormatError("power curve needs at least two points")
        loads = [x for x, _ in curve]
        watts = [y for _, y in curve]
        if len(set(loads)) != len(loads):
            raise ProfileFormatError(f"duplicate load points in curve: {loads}")
        if any(b <= a for a, b in zip(loads, loads[1:])):
            raise ProfileFormatError("curve loads must be strictly increasing")
        if loads[0] != 0.0 or loads[-1] != 1.0:
            raise ProfileFormatError("curve must include the idle (0) and full-load (1) points")
        if any(not math.isfinite(y) or y < 0 for y in watts):
            raise ProfileFormatError("watts must be finite and non-negative")
        if any(b < a for a, b in zip(watts, watts[1:])):
            raise ProfileFormatError("watts must not decrease as load increases")

    @property
    def idle_watts(self) -> float:
        return self.curve[0][1]

    @property
    def max_watts(self) -> float:
        return self.curve[-1][1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "cores_per_server": self.cores_per_server,
            "curve": [list(pt) for pt in self.curve],
        }


def power_at_load(p: ServerProfile, load: float) -> float:
    """Watts drawn by one server at ``load`` (fraction of full capacity)."""
    if not 0.0 <= load <= 1.0:
        raise ValueError(f"load must be within [0, 1], got {load}")
    xs, ys = zip(*p.curve)
    return float(np.interp(load, xs, ys))


@dataclass(frozen=True)
class PowerReport:
    scheme: str
    cores_used: int
    servers_used: int
    total_watts: float
    watts_breakdown: tuple[float, ...]  # one entry per occupied server


def _single_report(a: Allocation, p: ServerProfile) -> PowerReport:
    utils = a.utilizations
    n = p.cores_per_server
    breakdown = []
    for start in range(0, len(utils), n):
        load = math.fsum(utils[start : start + n]) / (CORE_CAPACITY * n)
        breakdown.append(power_at_load(p, min(max(load, 0.0), 1.0)))
    return PowerReport(
        scheme=a.scheme.value,
        cores_used=len(utils),
        servers_used=len(breakdown),
        total_watts=math.fsum(breakdown),
        watts_breakdown=tuple(breakdown),
    )


def total_power(a: Allocation | Sequence[Allocation], p: ServerProfile) -> PowerReport:
    """Power of an allocation, or of a set of class-segregated allocations.

    Cores fill servers of ``p.cores_per_server`` in index order and each
    occupied server draws ``power_at_load`` at its mean core utilization.
    A sequence of allocations (the separate scheme) is provisioned on its own
    servers per allocation, so each class pays its own idle overhead.
    """
    if isinstance(a, Allocation):
        return _single_report(a, p)
    parts = [_single_report(x, p) for x in a]
    breakdown = tuple(w for r in parts for w in r.watts_breakdown)
    return PowerReport(
        scheme="+".join(r.scheme for r in parts) or "EMPTY",
        cores_used=sum(r.cores_used for r in parts),
        servers_used=sum(r.servers_used for r in parts),
        total_watts=math.fsum(breakdown),
        watts_breakdown=breakdown,
    )


def savings_percent(shared: PowerReport | float, separate: PowerReport | float) -> float:
    """Relative reduction of ``shared`` versus ``separate``, in percent.

    Reports are compared by total watts; plain numbers (e.g. core counts)
    are compared directly.
    """
    s = shared.total_watts if isinstance(shared, PowerReport) else float(shared)
    b = separate.total_watts if isinstance(separate, PowerReport) else float(separate)
    if not b > 0:
        raise UndefinedSavingsError(f"savings undefined for a non-positive baseline ({b})")
    return 100.0 * (b - s) / b


def profile_from_dict(doc: dict[str, Any]) -> ServerProfile:
    try:
        return ServerProfile(
            name=str(doc["name"]),
            cores_per_server=doc["cores_per_server"],
            curve=tuple(tuple(pt) for pt in doc["curve"]),
        )
    except KeyError as exc:
        raise ProfileFormatError(f"profile is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ProfileFormatError):
            raise
        raise ProfileFormatError(f"malformed profile: {exc}") from None


def _curve_from_csv(text: str) -> list[tuple[float, float]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["load", "watts"]:
        raise ProfileFormatError(f"expected CSV header load,watts, got {reader.fieldnames}")
    try:
        return [(float(r["load"]), float(r["watts"])) for r in reader]
    except (TypeError, ValueError) as exc:
        raise ProfileFormatError(f"bad curve row: {exc}") from None


def profile_dir() -> Path | None:
    env = os.environ.get(PROFILE_DIR_ENV)
    return Path(env) if env else None


def load_power_profile(
    source: dict[str, Any] | str | Path,
    *,
    name: str | None = None,
    cores_per_server: int | None = None,
) -> ServerProfile:
    """Build a validated profile from a document, a file, or a bundled name.

    ``source`` may be an already-parsed JSON document, a ``.json`` profile
    file, a ``load,watts`` CSV, or the name of a bundled profile. CSV curves
    take ``name``/``cores_per_server`` from the keyword arguments or from a
    ``<stem>.meta.json`` sidecar next to the CSV.
    """
    if isinstance(source, dict):
        return profile_from_dict(source)

    path = Path(source)
    if not path.suffix and not path.exists():
        return bundled_profile(str(source))
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProfileFormatError(f"cannot read profile {path}: {exc}") from None

    if path.suffix.lower() == ".csv":
        meta: dict[str, Any] = {}
        sidecar = path.with_suffix(".meta.json")
        if sidecar.exists():
            meta = json.loads(sidecar.read_text())
        doc = {
            "name": name or meta.get("name") or path.stem,
            "cores_per_server": cores_per_server or meta.get("cores_per_server"),
            "curve": _curve_from_csv(text),
        }
        if doc["cores_per_server"] is None:
            raise ProfileFormatError("CSV profiles need cores_per_server (flag or sidecar)")
        return profile_from_dict(doc)

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileFormatError(f"invalid profile JSON in {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ProfileFormatError("profile JSON must be an object")
    if name:
        doc["name"] = name
    if cores_per_server:
        doc["cores_per_server"] = cores_per_server
    return profile_from_dict(doc)


def bundled_profile(name: str) -> ServerProfile:
    """Load ``<name>.json`` from the override directory or the packaged profiles."""
    override = profile_dir()
    if override is not None and (override / f"{name}.json").exists():
        return load_power_profile(override / f"{name}.json")
    res = resources.files("corepool.profiles").joinpath(f"{name}.json")
    if not res.is_file():
        raise ProfileFormatError(
            f"unknown profile {name!r}; bundled profiles: {', '.join(BUNDLED_PROFILES)}"
        )
    return profile_from_dict(json.loads(res.read_text()))
