"""Command-line interface.

Exit codes: 0 on success, 2 for usage errors, 1 for runtime errors. Output
files are written to a temporary sibling and renamed into place, so a failed
command never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from corepool.allocator import allocate_separate, allocate_shared
from corepool.experiments import export_report, run_trials, summary_table
from corepool.power import BUNDLED_PROFILES, load_power_profile, power_at_load
from corepool.workload import USECASES, WorkloadSpec, generate_workload, usecase_spec

REPRODUCE_TRIALS = 20


def reproduce_seed(usecase: int) -> int:
    return 1000 + 100 * usecase


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _positive_int(min_value: int):
    def parse(s: str) -> int:
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
        if v < min_value:
            raise argparse.ArgumentTypeError(f"must be >= {min_value}, got {v}")
        return v

    return parse


def _seed(s: str) -> int:
    v = _positive_int(0)(s)
    if v >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--usecase", type=int, choices=USECASES, help="reference use case number")
    g.add_argument("--spec", metavar="FILE", help="workload spec JSON file")


def _add_profile_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--profile",
        default="asus-80core",
        help=f"bundled profile ({', '.join(BUNDLED_PROFILES)}) or a .json/.csv file",
    )
    p.add_argument("--profile-name", help="name for a CSV profile")
    p.add_argument("--cores-per-server", type=_positive_int(1), help="cores per server for a CSV profile")


def _resolve_spec(args) -> tuple[WorkloadSpec, str]:
    if args.usecase is not None:
        return usecase_spec(args.usecase), f"usecase{args.usecase}"
    spec = WorkloadSpec.from_file(args.spec)
    return spec, Path(args.spec).stem


def _resolve_profile(args):
    return load_power_profile(
        args.profile, name=args.profile_name, cores_per_server=args.cores_per_server
    )


def cmd_generate(args) -> int:
    spec, _ = _resolve_spec(args)
    _emit(generate_workload(spec, args.seed).to_csv(), args.output)
    return 0


def cmd_allocate(args) -> int:
    spec, _ = _resolve_spec(args)
    w = generate_workload(spec, args.seed)
    if args.scheme == "shared":
        doc = allocate_shared(w).to_dict()
    else:
        doc = [a.to_dict() for a in allocate_separate(w)]
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return 0


def cmd_compare(args) -> int:
    spec, label = _resolve_spec(args)
    profile = _resolve_profile(args)
    report = run_trials(spec, profile, args.trials, args.seed, label=label, max_workers=args.jobs)
    if args.output:
        write_atomic(args.output, export_report(report, args.format))
    s = report.stats
    print(
        f"{label} on {profile.name}: {len(report.trials)} trials, seed {args.seed}\n"
        f"  cores (median): shared {s['shared_cores'].median:g}, separate {s['separate_cores'].median:g}\n"
        f"  watts (median): shared {s['shared_watts'].median:.1f}, separate {s['separate_watts'].median:.1f}\n"
        f"  median core savings: {s['core_savings_pct'].median:.2f}%\n"
        f"  median power savings: {s['power_savings_pct'].median:.2f}%"
    )
    return 0


def cmd_reproduce(args) -> int:
    usecases = list(USECASES) if args.all else [args.usecase]
    profiles = [load_power_profile(name) for name in BUNDLED_PROFILES]
    outdir = Path(args.output)
    reports = []
    texts: dict[Path, str] = {}
    for uc in usecases:
        for profile in profiles:
            r = run_trials(
                usecase_spec(uc), profile, REPRODUCE_TRIALS, reproduce_seed(uc), label=f"usecase{uc}"
            )
            reports.append(r)
            texts[outdir / f"usecase{uc}_{profile.name}.{args.format}"] = export_report(r, args.format)
    header = (
        "# Shared vs. separate core allocation\n\n"
        f"{REPRODUCE_TRIALS} trials per cell; trial t of use case n uses seed 1000 + 100*n + t.\n\n"
    )
    texts[outdir / "summary.md"] = header + summary_table(reports)
    for path, text in texts.items():
        write_atomic(path, text)
    print(f"wrote {len(reports)} reports and summary.md to {outdir}")
    return 0


def cmd_power_curve(args) -> int:
    profile = _resolve_profile(args)
    lines = ["load,watts"]
    for k in range(args.steps):
        load = k / (args.steps - 1)
        lines.append(f"{load!r},{power_at_load(profile, load)!r}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corepool", description="Shared-core packing of SDR and SDN processes and its power cost."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a workload CSV")
    _add_spec_args(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("-o", "--output", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("allocate", help="allocate one generated workload and dump the cores as JSON")
    _add_spec_args(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--scheme", choices=["shared", "separate"], default="shared")
    p.add_argument("-o", "--output", help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("compare", help="run repeated shared-vs-separate trials")
    _add_spec_args(p)
    _add_profile_args(p)
    p.add_argument("--trials", type=_positive_int(1), default=20)
    p.add_argument("--seed", type=_seed, default=0, help="base seed; trial t uses seed + t")
    p.add_argument("--jobs", type=_positive_int(1), default=1, help="worker threads")
    p.add_argument("-o", "--output", help="report file")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("reproduce", help="run every use case on both bundled profiles")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--usecase", type=int, choices=USECASES)
    p.add_argument("-o", "--output", default="reproduction", help="output directory")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("power-curve", help="sample a server power curve")
    _add_profile_args(p)
    p.add_argument("--steps", type=_positive_int(2), default=11)
    p.add_argument("-o", "--output", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_power_curve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, LookupError, ArithmeticError) as exc:
        print(f"corepool {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
