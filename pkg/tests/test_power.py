import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corepool.allocator import Allocation, CoreAssignment, Scheme, allocate_separate, allocate_shared
from corepool.power import (
    PowerReport,
    ProfileFormatError,
    ServerProfile,
    UndefinedSavingsError,
    bundled_profile,
    load_power_profile,
    power_at_load,
    savings_percent,
    total_power,
)
from corepool.workload import generate_workload, usecase_spec, workload_from_utils

LINEAR = ServerProfile("linear", 80, ((0, 100), (1, 500)))


def cores(*utils):
    return Allocation(tuple(CoreAssignment(i, (), u, u) for i, u in enumerate(utils)), Scheme.SHARED)


def test_bundled_idle_points():
    asus = load_power_profile("asus-80core")
    hpe = load_power_profile("hpe-400core")
    assert (asus.cores_per_server, power_at_load(asus, 0)) == (80, 100)
    assert (hpe.cores_per_server, power_at_load(hpe, 0)) == (400, 700)


def test_linear_midpoint():
    assert power_at_load(LINEAR, 0.5) == 300


def test_knots_exact_and_domain():
    p = ServerProfile("spec", 4, ((0, 50), (0.1, 70), (0.5, 120), (1, 200)))
    for x, y in p.curve:
        assert power_at_load(p, x) == y
    assert power_at_load(p, 0.3) == pytest.approx(95)
    for bad in (-0.01, 1.01):
        with pytest.raises(ValueError):
            power_at_load(p, bad)


@pytest.mark.parametrize(
    "curve",
    [
        ((0, 100), (1, 90)),  # decreasing watts
        ((0, 100),),  # single point
        ((0.1, 100), (1, 200)),  # no idle point
        ((0, 100), (0.9, 200)),  # no full-load point
        ((0, 100), (0.5, 150), (0.5, 160), (1, 200)),  # duplicate load
        ((0, 100), (0.6, 150), (0.4, 160), (1, 200)),  # unsorted
    ],
)
def test_bad_curves_rejected(curve):
    with pytest.raises(ProfileFormatError):
        ServerProfile("bad", 8, curve)


def test_load_from_json_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"name": "x", "cores_per_server": 16, "curve": [[0, 40], [0.5, 90], [1, 120]]}))
    p = load_power_profile(path)
    assert (p.name, p.cores_per_server, p.max_watts) == ("x", 16, 120)


def test_load_from_csv_with_flags_and_sidecar(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("load,watts\n0,50\n0.5,80\n1,100\n")
    with pytest.raises(ProfileFormatError):
        load_power_profile(path)
    p = load_power_profile(path, name="c", cores_per_server=32)
    assert (p.name, p.cores_per_server, power_at_load(p, 0.25)) == ("c", 32, 65)
    (tmp_path / "curve.meta.json").write_text('{"name": "side", "cores_per_server": 8}')
    assert load_power_profile(path).name == "side"


def test_load_bad_documents(tmp_path):
    with pytest.raises(ProfileFormatError):
        load_power_profile({"name": "x", "curve": [[0, 1], [1, 2]]})
    with pytest.raises(ProfileFormatError):
        load_power_profile({"name": "x", "cores_per_server": 4, "curve": [[0, 9], [1, 2]]})
    with pytest.raises(ProfileFormatError):
        load_power_profile("no-such-profile")
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    with pytest.raises(ProfileFormatError):
        load_power_profile(bad)


def test_profile_dir_override(tmp_path, monkeypatch):
    (tmp_path / "asus-80core.json").write_text(
        json.dumps({"name": "asus-80core", "cores_per_server": 80, "curve": [[0, 1], [1, 2]]})
    )
    monkeypatch.setenv("COREPOOL_PROFILE_DIR", str(tmp_path))
    assert bundled_profile("asus-80core").idle_watts == 1
    monkeypatch.delenv("COREPOOL_PROFILE_DIR")
    assert bundled_profile("asus-80core").idle_watts == 100


def test_empty_allocation_power():
    r = total_power(cores(), LINEAR)
    assert (r.total_watts, r.servers_used, r.cores_used) == (0, 0, 0)


def test_single_full_core():
    r = total_power(cores(100), LINEAR)
    assert r.servers_used == 1
    assert r.total_watts == pytest.approx(105, abs=1e-12)


def test_servers_fill_in_index_order():
    p = ServerProfile("tiny", 2, ((0, 10), (1, 30)))
    r = total_power(cores(100, 50, 20), p)
    assert r.servers_used == 2
    assert r.watts_breakdown == pytest.approx((10 + 20 * 0.75, 10 + 20 * 0.1))


def test_separate_pair_provisions_each_class():
    w = workload_from_utils([60, 60], [60])
    r = total_power(allocate_separate(w), LINEAR)
    assert (r.cores_used, r.servers_used) == (3, 2)
    assert r.total_watts == pytest.approx(100 + 400 * 120 / 8000 + 100 + 400 * 60 / 8000)


@pytest.mark.parametrize("seed", range(20))
def test_usecase2_shared_below_separate(seed):
    p = bundled_profile("asus-80core")
    w = generate_workload(usecase_spec(2), seed)
    assert total_power(allocate_shared(w), p).total_watts < total_power(allocate_separate(w), p).total_watts


def test_savings_percent():
    rep = lambda w: PowerReport("X", 1, 1, w, (w,))
    assert savings_percent(rep(80), rep(100)) == 20.0
    assert savings_percent(rep(100), rep(100)) == 0.0
    assert savings_percent(41, 50) == 18.0
    with pytest.raises(UndefinedSavingsError):
        savings_percent(rep(0), rep(0))


@given(st.floats(0, 1), st.floats(0, 1))
def test_power_monotone(a, b):
    p = bundled_profile("hpe-400core")
    lo, hi = sorted((a, b))
    assert power_at_load(p, lo) <= power_at_load(p, hi)


@given(st.lists(st.floats(0, 100), min_size=1, max_size=200), st.integers(0, 199), st.floats(0, 100))
def test_total_power_monotone_in_load(utils, idx, extra):
    idx %= len(utils)
    p = ServerProfile("nl", 16, ((0, 30), (0.2, 60), (0.7, 90), (1, 150)))
    bumped = list(utils)
    bumped[idx] = min(100.0, bumped[idx] + extra)
    r0 = total_power(cores(*utils), p)
    r1 = total_power(cores(*bumped), p)
    assert r1.total_watts >= r0.total_watts - 1e-9
    assert r0.servers_used == math.ceil(len(utils) / 16)
