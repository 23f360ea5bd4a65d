"""Shared-core packing and power evaluation for co-located SDN/SDR workloads."""

from corepool.allocator import (
    Allocation,
    CoreAssignment,
    Scheme,
    allocate_separate,
    allocate_shared,
    brute_force_min_cores,
    validate_allocation,
)
from corepool.experiments import (
    BoxplotStats,
    ComparisonReport,
    TrialResult,
    boxplot_stats,
    export_report,
    run_trials,
)
from corepool.measurements import (
    SdnRateModel,
    SdrMeasurement,
    fit_sdn_rate_model,
    predict_sdn_utilization,
    sdr_measurement_lookup,
)
from corepool.power import (
    PowerReport,
    ServerProfile,
    load_power_profile,
    power_at_load,
    savings_percent,
    total_power,
)
from corepool.workload import (
    Process,
    ProcessKind,
    Workload,
    WorkloadSpec,
    aggregate_sdn,
    generate_workload,
    usecase_spec,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BoxplotStats",
    "ComparisonReport",
    "CoreAssignment",
    "PowerReport",
    "Process",
    "ProcessKind",
    "Scheme",
    "SdnRateModel",
    "SdrMeasurement",
    "ServerProfile",
    "TrialResult",
    "Workload",
    "WorkloadSpec",
    "aggregate_sdn",
    "allocate_separate",
    "allocate_shared",
    "boxplot_stats",
    "brute_force_min_cores",
    "export_report",
    "fit_sdn_rate_model",
    "generate_workload",
    "load_power_profile",
    "power_at_load",
    "predict_sdn_utilization",
    "run_trials",
    "savings_percent",
    "sdr_measurement_lookup",
    "total_power",
    "usecase_spec",
    "validate_allocation",
]
