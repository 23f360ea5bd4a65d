"""Testbed measurement tables and the SDN utilization-vs-rate model."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal

Protocol = Literal["TCP", "UDP"]

CSV_HEADER = [
    "prb",
    "protocol",
    "bandwidth_setting_mbps",
    "throughput_mbps",
    "cpu_util_pct",
    "loss_or_retries",
]

# Mean SDN data-plane utilization at the lowest and highest tested rates (kbps).
SDN_ANCHOR_POINTS: tuple[tuple[float, float], ...] = ((100.0, 20.0), (1e7, 175.0))


class MeasurementNotFoundError(LookupError):
    pass


class UnderdeterminedFitError(ValueError):
    pass


class DegenerateFitError(ValueError):
    """Raised when fitted utilization does not grow with data rate."""


@dataclass(frozen=True)
class SdrMeasurement:
    prb: int
    protocol: Protocol
    bandwidth_setting: float  # Mbps, offered load
    real_throughput: float  # Mbps
    cpu_utilization: float  # percent
    loss_or_retries: float  # TCP retries or UDP packet loss

    def __post_init__(self) -> None:
        if self.protocol not in ("TCP", "UDP"):
            raise ValueError(f"protocol must be TCP or UDP, got {self.protocol!r}")
        if not 0.0 <= self.cpu_utilization <= 100.0:
            raise ValueError(f"cpu_utilization out of range: {self.cpu_utilization}")
        if self.real_throughput > self.bandwidth_setting * 1.05:
            raise ValueError(
                f"throughput {self.real_throughput} exceeds offered load {self.bandwidth_setting}"
            )
        if self.loss_or_retries < 0:
            raise ValueError("loss_or_retries must be non-negative")

    @property
    def key(self) -> tuple[int, str, float]:
        return (self.prb, self.protocol, self.bandwidth_setting)


def _num(text: str) -> float:
    return float(text)


def _fmt(x: float) -> str:
    # Shortest repr without a trailing ".0", so "90" stays "90".
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def parse_measurements_csv(text: str) -> list[SdrMeasurement]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}, got {reader.fieldnames}")
    rows = []
    for row in reader:
        rows.append(
            SdrMeasurement(
                prb=int(row["prb"]),
                protocol=row["protocol"].strip().upper(),
                bandwidth_setting=_num(row["bandwidth_setting_mbps"]),
                real_throughput=_num(row["throughput_mbps"]),
                cpu_utilization=_num(row["cpu_util_pct"]),
                loss_or_retries=_num(row["loss_or_retries"]),
            )
        )
    keys = [r.key for r in rows]
    if len(set(keys)) != len(keys):
        raise ValueError("duplicate (prb, protocol, bandwidth_setting) rows")
    return rows


def measurements_to_csv(rows: Iterable[SdrMeasurement]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [
                r.prb,
                r.protocol,
                _fmt(r.bandwidth_setting),
                _fmt(r.real_throughput),
                _fmt(r.cpu_utilization),
                _fmt(r.loss_or_retries),
            ]
        )
    return buf.getvalue()


@lru_cache(maxsize=1)
def embedded_measurements() -> tuple[SdrMeasurement, ...]:
    """The PRB 50 and PRB 25 SDR tables shipped with the package."""
    text = resources.files("corepool.data").joinpath("sdr_measurements.csv").read_text()
    return tuple(parse_measurements_csv(text))


def load_measurements(path: str | Path) -> tuple[SdrMeasurement, ...]:
    return tuple(parse_measurements_csv(Path(path).read_text()))


def sdr_measurement_lookup(
    prb: int,
    protocol: str,
    bandwidth_setting: float,
    table: Iterable[SdrMeasurement] | None = None,
) -> SdrMeasurement:
    rows = embedded_measurements() if table is None else tuple(table)
    proto = protocol.upper()
    for r in rows:
        if r.prb == prb and r.protocol == proto and r.bandwidth_setting == bandwidth_setting:
            return r
    valid = sorted({(r.prb, r.protocol) for r in rows})
    settings = {
        f"PRB {p}/{pr}": [_fmt(r.bandwidth_setting) for r in rows if (r.prb, r.protocol) == (p, pr)]
        for p, pr in valid
    }
    raise MeasurementNotFoundError(
        f"no measurement for PRB {prb}, {proto}, {bandwidth_setting} Mbps; valid settings: {settings}"
    )


@dataclass(frozen=True)
class SdnRateModel:
    """utilization = intercept_a + slope_b * log10(rate_kbps)."""

    intercept_a: float
    slope_b: float  # percent per decade

    def __post_init__(self) -> None:
        if not self.slope_b > 0:
            raise DegenerateFitError(f"slope must be positive, got {self.slope_b}")


def fit_sdn_rate_model(points: Iterable[tuple[float, float]]) -> SdnRateModel:
    """Least-squares fit of utilization against log10 of the data rate (kbps)."""
    pts = [(float(r), float(u)) for r, u in points]
    if any(r <= 0 for r, _ in pts):
        raise ValueError("rates must be positive")
    if len({r for r, _ in pts}) < 2:
        raise UnderdeterminedFitError("need at least two distinct rates to fit the model")
    xs = [math.log10(r) for r, _ in pts]
    ys = [u for _, u in pts]
    n = len(pts)
    x_mean = math.fsum(xs) / n
    y_mean = math.fsum(ys) / n
    sxx = math.fsum((x - x_mean) ** 2 for x in xs)
    sxy = math.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    if not slope > 0:
        raise DegenerateFitError(
            f"degenerate fit: slope {slope:g} per decade; utilization must increase with rate"
        )
    return SdnRateModel(intercept_a=y_mean - slope * x_mean, slope_b=slope)


def anchor_sdn_model() -> SdnRateModel:
    """Two-point model through the published 100 kbps and 10 Gbps means."""
    return fit_sdn_rate_model(SDN_ANCHOR_POINTS)


def predict_sdn_utilization(model: SdnRateModel, rate: float) -> float:
    """Predicted SDN load in percent of one core; may exceed 100 (multi-core)."""
    if not rate > 0:
        raise ValueError(f"rate must be positive, got {rate}")
    return max(0.0, model.intercept_a + model.slope_b * math.log10(rate))
