import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import enumerate_min_cores, workloads
from corepool.allocator import (
    Allocation,
    CoreAssignment,
    InfeasibleProcessError,
    OracleSizeError,
    Scheme,
    allocate_separate,
    allocate_shared,
    brute_force_min_cores,
    validate_allocation,
)
from corepool.workload import Process, ProcessKind, Workload, generate_workload, usecase_spec, workload_from_utils


def core_view(a: Allocation, w: Workload):
    util = {p.id: p.utilization for p in w.processes}
    return [(sorted(util[i] for i in c.sdr_process_ids), c.sdn_fraction) for c in a.cores]


def test_shared_two_sdr_plus_fluid():
    w = workload_from_utils([60, 60], [60])
    a = allocate_shared(w)
    assert core_view(a, w) == [([60], 40), ([60], 20)]
    assert enumerate_min_cores([60, 60], 60) == 2


def test_shared_overflow_opens_core():
    w = workload_from_utils([90], [50])
    a = allocate_shared(w)
    assert core_view(a, w) == [([90], 10), ([], 40)]
    assert enumerate_min_cores([90], 50) == 2


def test_shared_empty():
    w = workload_from_utils()
    assert allocate_shared(w).cores == ()
    sdr, sdn = allocate_separate(w)
    assert sdr.cores == () and sdn.cores == ()


def test_separate_example():
    w = workload_from_utils([60, 60], [60])
    sdr, sdn = allocate_separate(w)
    assert (sdr.cores_used, sdn.cores_used) == (2, 1)
    assert sdr.scheme is Scheme.SEPARATE_SDR and sdn.scheme is Scheme.SEPARATE_SDN
    assert not {c.core_index for c in sdr.cores} & {c.core_index for c in sdn.cores}


@pytest.mark.parametrize("seed", [0, 1, 99, 12345])
def test_separate_usecase2_sdr_never_pairs(seed):
    w = generate_workload(usecase_spec(2), seed)
    sdr, _ = allocate_separate(w)
    assert sdr.cores_used == 30


def test_ffd_order_and_tie_break():
    w = workload_from_utils([30, 50, 50, 70], [])
    a = allocate_shared(w)
    # ids 1 and 2 tie at 50; id 1 goes first
    assert [c.sdr_process_ids for c in a.cores] == [(3, 0), (1, 2)]


def test_infeasible_sdr():
    w = Workload((Process(0, ProcessKind.SDR, 100.0),), usecase_spec(1), 0)
    allocate_shared(w)  # exactly one full core is fine
    bad = Workload((Process(0, ProcessKind.SDR, 100.0),), usecase_spec(1), 0)
    object.__setattr__(bad.processes[0], "utilization", 120.0)
    with pytest.raises(InfeasibleProcessError):
        allocate_shared(bad)
    with pytest.raises(InfeasibleProcessError):
        allocate_separate(bad)


def test_warm_pool():
    w = workload_from_utils([50], [80])
    a = allocate_shared(w, start_occupancy=[70, 20])
    assert a.cores[0].base_load == 70 and a.cores[1].sdr_process_ids == (0,)
    assert [round(c.total_utilization, 9) for c in a.cores] == [100, 100, 20]
    assert validate_allocation(a, w) == []
    with pytest.raises(ValueError):
        allocate_shared(w, start_occupancy=[120])


def test_validate_clean_output(small_workload):
    assert validate_allocation(allocate_shared(small_workload), small_workload) == []
    for a in allocate_separate(small_workload):
        assert validate_allocation(a, small_workload) == []


def test_validate_over_capacity():
    w = workload_from_utils([60, 60], [])
    a = Allocation((CoreAssignment(0, (0, 1), 0.0, 120.0),), Scheme.SHARED)
    v = validate_allocation(a, w)
    assert [x.kind for x in v] == ["over-capacity"]


def test_validate_unplaced():
    w = workload_from_utils([60, 60], [])
    a = Allocation((CoreAssignment(0, (0,), 0.0, 60.0),), Scheme.SHARED)
    assert [x.kind for x in validate_allocation(a, w)] == ["unplaced-process"]


def test_validate_other_violations():
    w = workload_from_utils([60], [30])
    a = Allocation(
        (
            CoreAssignment(0, (0, 7), 10.0, 99.0),
            CoreAssignment(0, (0, 1), 0.0, 90.0),
        ),
        Scheme.SHARED,
    )
    kinds = {x.kind for x in validate_allocation(a, w)}
    assert {"unknown-process", "total-mismatch", "bad-core-index", "wrong-kind", "duplicate-process", "sdn-mismatch"} <= kinds


def test_allocation_json_roundtrip(small_workload):
    a = allocate_shared(small_workload)
    doc = json.loads(a.to_json())
    assert set(doc) == {"scheme", "workload_ref", "cores"}
    assert set(doc["cores"][0]) == {"index", "sdr_ids", "sdn_fraction", "total"}
    assert Allocation.from_dict(doc) == a


@pytest.mark.parametrize(
    "sdr, sdn, expected",
    [([60, 60], [60], 2), ([], [100, 100, 50], 3), ([50, 50, 50], [], 2)],
)
def test_oracle_examples(sdr, sdn, expected):
    assert brute_force_min_cores(workload_from_utils(sdr, sdn)) == expected
    assert enumerate_min_cores(sdr, sum(sdn)) == expected


def test_oracle_size_limit():
    w = workload_from_utils([10] * 11, [])
    with pytest.raises(OracleSizeError):
        brute_force_min_cores(w)
    assert brute_force_min_cores(w, max_items=11) == 2


def test_oracle_beats_ffd_on_known_instance():
    # FFD needs 3 cores here; {44,25,31} and {34,26,24,16} fit in 2.
    items = [44, 34, 31, 26, 25, 24, 16]
    w = workload_from_utils(items, [])
    assert allocate_shared(w).cores_used == enumerate_min_cores(items, 0) + 1 == 3
    assert brute_force_min_cores(w) == 2


@given(workloads(max_sdr=7, max_sdn=4))
@settings(max_examples=150, deadline=None)
def test_oracle_matches_enumeration(w):
    sdn_total = sum(p.utilization for p in w.sdn)
    assert brute_force_min_cores(w) == enumerate_min_cores([p.utilization for p in w.sdr], sdn_total)


@given(workloads())
@settings(max_examples=300, deadline=None)
def test_allocation_properties(w):
    shared = allocate_shared(w)
    sdr, sdn = allocate_separate(w)
    for a in (shared, sdr, sdn):
        assert validate_allocation(a, w) == []
    total = sum(p.utilization for p in w.processes)
    floor = math.ceil(total / 100 - 1e-9) if total > 1e-9 else 0
    assert shared.cores_used >= floor
    assert shared.cores_used == max(sdr.cores_used, floor)
    assert shared.cores_used <= sdr.cores_used + sdn.cores_used
    assert sdn.cores_used == (math.ceil(sum(p.utilization for p in w.sdn) / 100 - 1e-9) if w.sdn else 0)
    assert allocate_shared(w) == shared
