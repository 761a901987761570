"""Experiment runner CLI.

Configures a (group, hidden subgroup, auxiliary state) instance, runs shot
campaigns, exact verifications, channel evaluations, or end-to-end
recovery, and writes a machine-readable report.

Exit codes: 0 success, 1 configuration error, 2 resource cap exceeded,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from .groups import FiniteAbelianGroup, ProductSubgroup
from .operators import make_canonical_hiding_function
from .pipelines import (
    AuxSpec,
    ShotRecord,
    channel_a_distribution,
    ifqa_expected_distribution,
    ifqa_sample,
    lambda_channel,
    standard_exact_distribution,
    standard_sample,
)
from .recovery import recover_hidden_subgroup
from .rng import make_rng, shot_rng
from .states import ResourceCapError

ALGORITHMS = ("standard", "init-free", "both")
MODES = ("shots", "exact", "channel", "recover")
FORMATS = ("json", "csv")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    moduli: list[int]
    generators: list[int] | str  # explicit divisors or "random"
    algorithm: str = "both"
    aux: str = "zero"
    mode: str = "exact"
    shots: int = 0
    seed: int = 0
    relabel_f: bool = False
    output: str | None = None
    format: str = "json"
    threads: int = 1

    def validate(self) -> None:
        if not self.moduli or any(n < 1 for n in self.moduli):
            raise ConfigError(f"moduli must be positive integers, got {self.moduli}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.shots < 0:
            raise ConfigError("shots must be nonnegative")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)


def _resolve_subgroup(config: ExperimentConfig, group: FiniteAbelianGroup) -> ProductSubgroup:
    if config.generators == "random":
        rng = make_rng(config.seed ^ 0x5EED)
        gens = []
        for n in group.moduli:
            divisors = [d for d in range(1, n + 1) if n % d == 0]
            gens.append(int(rng.choice(divisors)))
        return group.subgroup(gens)
    gens = list(config.generators)
    if len(gens) != group.rank:
        raise ConfigError(
            f"need {group.rank} generators for moduli {group.moduli}, got {len(gens)}"
        )
    normalized = group.subgroup(gens)
    if tuple(gens) != normalized.generators:
        print(
            f"warning: generators {gens} normalized to {list(normalized.generators)}",
            file=sys.stderr,
        )
    return normalized


def _distribution_section(dist: dict[tuple[int, ...], float]) -> list[dict]:
    rows = []
    for coords in sorted(dist):
        p = dist[coords]
        if p > 1e-15:
            rows.append({"outcome": list(coords), "probability": p})
    return rows


def _empirical_section(records: list[ShotRecord]) -> list[dict]:
    counts: dict[tuple[int, ...], int] = {}
    for rec in records:
        counts[rec.outcome.coords] = counts.get(rec.outcome.coords, 0) + 1
    n = len(records)
    return [
        {"outcome": list(coords), "frequency": c / n, "count": c}
        for coords, c in sorted(counts.items())
    ]


def run(config: ExperimentConfig) -> dict:
    """Execute one experiment and return (and optionally write) the report."""
    config.validate()
    start = time.time()
    group = FiniteAbelianGroup(tuple(config.moduli))
    hidden = _resolve_subgroup(config, group)
    relabel_rng = make_rng(config.seed ^ 0xF00D) if config.relabel_f else None
    f = make_canonical_hiding_function(hidden, relabel_rng)
    aux_spec = AuxSpec(config.aux)
    aux = aux_spec.resolve(f.y_dims, make_rng(config.seed ^ 0xA0C))

    report: dict = {
        "tool_version": __version__,
        "config": config.to_dict(),
        "instance": {
            "group": str(group),
            "group_order": group.order,
            "hidden_generators": list(hidden.generators),
            "hidden_order": hidden.order,
            "orthogonal_generators": list(hidden.orthogonal().generators),
            "codomain_dims": list(f.y_dims),
        },
    }

    algs = ["standard", "init-free"] if config.algorithm == "both" else [config.algorithm]

    if config.mode in ("exact", "shots"):
        exact: dict[str, dict[tuple[int, ...], float]] = {}
        for alg in algs:
            if alg == "standard":
                exact[alg] = standard_exact_distribution(f)
            else:
                exact[alg] = ifqa_expected_distribution(f, aux.density())
        report["exact"] = {
            alg: _distribution_section(dist) for alg, dist in exact.items()
        }

    if config.mode == "shots":
        report["shots"] = {}
        for alg in algs:
            records = _run_shots(f, aux, alg, config)
            section: dict = {"count": len(records)}
            if records:
                fids = [r.aux_restoration_fidelity for r in records]
                section["empirical"] = _empirical_section(records)
                section["restoration_fidelity"] = {
                    "min": min(fids),
                    "mean": sum(fids) / len(fids),
                }
                section["oracle_calls_per_shot"] = records[0].oracle_calls
            report["shots"][alg] = section

    if config.mode == "channel":
        dm = lambda_channel(aux.density(), f)
        trace = float(np.trace(dm.matrix).real)
        report["channel"] = {
            "trace": trace,
            "a_marginal": _distribution_section(channel_a_distribution(dm, f)),
        }

    if config.mode == "recover":
        report["recover"] = {}
        for alg in algs:
            sampler = _pipeline_sampler(f, aux, alg, config.seed)
            result = recover_hidden_subgroup(
                group, sampler, stop_rule="blind", planted=hidden
            )
            report["recover"][alg] = {
                "recovered_generators": list(result.estimate.generators),
                "success": bool(result.matches_planted),
                "queries_used": result.queries_used,
                "complete": result.complete,
            }

    if config.algorithm == "both" and config.mode in ("exact", "shots"):
        report["comparison"] = compare_sections(report)

    report["wall_clock_seconds"] = time.time() - start
    if config.output:
        write_report(report, config.output, config.format)
    return report


def _run_shots(f, aux, alg: str, config: ExperimentConfig) -> list[ShotRecord]:
    def one(i: int) -> ShotRecord:
        rng = shot_rng(config.seed, i)
        seed_desc = f"seed={config.seed} shot={i}"
        # per-shot copy keeps the oracle-call delta race-free under threads
        # (the lookup table itself is shared and read-only)
        local_f = replace(f, oracle_calls=f.oracle_calls)
        if alg == "standard":
            return standard_sample(local_f, rng, shot_index=i, rng_seed=seed_desc)
        return ifqa_sample(local_f, aux, rng, shot_index=i, rng_seed=seed_desc)

    indices = range(config.shots)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            records = list(pool.map(one, indices))
    else:
        records = [one(i) for i in indices]
    f.oracle_calls += sum(r.oracle_calls for r in records)
    return records


def _pipeline_sampler(f, aux, alg: str, seed: int):
    def gen():
        i = 0
        while True:
            rng = shot_rng(seed, i)
            if alg == "standard":
                rec = standard_sample(f, rng, shot_index=i)
            else:
                rec = ifqa_sample(f, aux, rng, shot_index=i)
            yield rec.outcome
            i += 1

    return gen()


def compare_sections(report: dict) -> dict:
    """Side-by-side summary when both algorithms ran on the same instance."""
    out: dict = {}
    exact = report.get("exact", {})
    if "standard" in exact and "init-free" in exact:
        std = {tuple(row["outcome"]): row["probability"] for row in exact["standard"]}
        iff = {tuple(row["outcome"]): row["probability"] for row in exact["init-free"]}
        keys = set(std) | set(iff)
        max_dev = max((abs(std.get(k, 0.0) - iff.get(k, 0.0)) for k in keys), default=0.0)
        out["exact_max_deviation"] = max_dev
        out["exact_distributions_match"] = max_dev < 1e-9
    shots = report.get("shots", {})
    if "standard" in shots and "init-free" in shots:
        out["oracle_calls_per_shot"] = {
            alg: shots[alg].get("oracle_calls_per_shot") for alg in ("standard", "init-free")
        }
        out["restoration_fidelity"] = {
            alg: shots[alg].get("restoration_fidelity") for alg in ("standard", "init-free")
        }
    return out


def compare(report_std: dict, report_ifqa: dict) -> dict:
    """Compare two single-algorithm reports from the same instance."""
    if report_std["instance"] != report_ifqa["instance"]:
        raise ConfigError("reports describe different instances")
    merged = {
        "instance": report_std["instance"],
        "exact": {},
        "shots": {},
    }
    for src, name in ((report_std, "standard"), (report_ifqa, "init-free")):
        if "exact" in src and name in src["exact"]:
            merged["exact"][name] = src["exact"][name]
        if "shots" in src and name in src["shots"]:
            merged["shots"][name] = src["shots"][name]
    return compare_sections(merged)


def write_report(report: dict, path: str, fmt: str) -> None:
    """Atomic write: temp file in the destination directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            if fmt == "json":
                json.dump(report, handle, indent=2)
                handle.write("\n")
            else:
                _write_csv(report, handle)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(report: dict, handle) -> None:
    """Flattened per-outcome table."""
    writer = csv.writer(handle)
    writer.writerow(["section", "algorithm", "outcome", "value"])
    for alg, rows in report.get("exact", {}).items():
        for row in rows:
            writer.writerow(
                ["exact", alg, ";".join(map(str, row["outcome"])), row["probability"]]
            )
    for alg, section in report.get("shots", {}).items():
        for row in section.get("empirical", []):
            writer.writerow(
                ["empirical", alg, ";".join(map(str, row["outcome"])), row["frequency"]]
            )
    for alg, section in report.get("recover", {}).items():
        writer.writerow(
            ["recover", alg, ";".join(map(str, section["recovered_generators"])),
             int(section["success"])]
        )


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ahsp-sim",
        description="Simulate and compare hidden-subgroup pipelines on finite abelian groups.",
    )
    parser.add_argument("--moduli", required=True, help="cyclic factor sizes, e.g. 2,4")
    parser.add_argument(
        "--generators",
        required=True,
        help="per-factor subgroup generators, e.g. 1,2, or 'random'",
    )
    parser.add_argument("--algorithm", choices=ALGORITHMS, default="both")
    parser.add_argument(
        "--aux",
        choices=("zero", "random-pure", "random-mixed"),
        default="zero",
        help="auxiliary register preparation (init-free pipeline)",
    )
    parser.add_argument("--mode", choices=MODES, default="exact")
    parser.add_argument("--shots", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--relabel-f", action="store_true",
                        help="compose the hiding function with a random codomain bijection")
    parser.add_argument("--output", default=None, help="report path (stdout if omitted)")
    parser.add_argument("--format", choices=FORMATS, default="json")
    parser.add_argument("--threads", type=int, default=1)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    generators: list[int] | str
    if args.generators.strip() == "random":
        generators = "random"
    else:
        generators = _parse_int_list(args.generators)
    return ExperimentConfig(
        moduli=_parse_int_list(args.moduli),
        generators=generators,
        algorithm=args.algorithm,
        aux=args.aux,
        mode=args.mode,
        shots=args.shots if args.mode == "shots" else 0,
        seed=args.seed,
        relabel_f=args.relabel_f,
        output=args.output,
        format=args.format,
        threads=args.threads,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
        report = run(config)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceCapError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, RuntimeError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3
    if not config.output:
        json.dump(report, sys.stdout, indent=2)
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
