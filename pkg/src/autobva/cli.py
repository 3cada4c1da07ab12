"""Command-line interface.

Subcommands: detect (run one search), summarize (cluster archives into a
report), rank (re-score and sort candidates), oracle (exhaustive adjacent
scan), experiment (repeated seeded runs with statistics).

Exit codes: 0 success, 1 usage error, 2 data error.  The AUTOBVA_SEED
environment variable overrides any --seed flag.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from .archive_io import (
    DataError,
    RunManifest,
    load_archives,
    write_archive_csv,
    write_archive_json,
    write_manifest,
    write_ranked_csv,
    write_report_json,
    write_report_markdown,
)
from .detection import DetectionConfig, detect
from .distances import parse_distance, pdq
from .oracle import WindowTooLarge, scan_adjacent
from .experiment import run_experiment
from .sampling import SamplerConfig
from .summarization import summarize
from .suts import get_sut
from .values import parse_value, render_tuple

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that
        raise UsageError(message)


def _effective_seed(value: int) -> int:
    env = os.environ.get("AUTOBVA_SEED")
    return int(env) if env else value


def _load_config_file(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"config file {path}: {exc}")


def _sampler_from(args) -> SamplerConfig:
    settings = {
        "sampling.method": args.sampling,
        "sampling.cts": args.cts == "on",
        "sampling.big_int_bit_cap": args.big_int_bit_cap,
        "seed": args.seed,
    }
    if getattr(args, "config", None):
        file_settings = _load_config_file(args.config)
        for key, value in file_settings.items():
            if key not in settings:
                raise DataError(f"config file {args.config}: unknown key {key!r}")
            settings[key] = value
    return SamplerConfig(
        method=settings["sampling.method"],
        cts=bool(settings["sampling.cts"]),
        big_int_bit_cap=int(settings["sampling.big_int_bit_cap"]),
        seed=_effective_seed(int(settings["seed"])),
    )


def _detection_config(args) -> DetectionConfig:
    return DetectionConfig(
        strategy=args.strategy,
        budget_seconds=args.seconds,
        budget_iterations=args.iterations,
        threshold=Fraction(args.threshold),
        output_distance=parse_distance(args.distance),
        sampler=_sampler_from(args),
    )


def _add_detect_flags(p, default_strategy="bcs"):
    p.add_argument("--sut", required=True,
                   help="bytecount | bmi | bmi-class | date | external:<cmd>")
    p.add_argument("--strategy", choices=["lns", "bcs"], default=default_strategy)
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--seconds", type=float, default=None)
    budget.add_argument("--iterations", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampling", choices=["uniform", "bituniform"], default="bituniform")
    p.add_argument("--cts", choices=["on", "off"], default="on")
    p.add_argument("--big-int-bit-cap", type=int, default=128)
    p.add_argument("--distance", default="strlen",
                   help="strlen | jaccard1 | jaccard2 | levenshtein")
    p.add_argument("--threshold", default="0", help="exact rational, e.g. 0 or 1/2")
    p.add_argument("--arity", type=int, default=1, help="arity of an external SUT")
    p.add_argument("--timeout", type=float, default=5.0, help="external SUT timeout (s)")
    p.add_argument("--config", default=None, help="JSON file with sampling.* / seed keys")
    p.add_argument("--out", default=".", help="output directory")


def cmd_detect(args) -> int:
    sut = get_sut(args.sut, external_arity=args.arity, external_timeout=args.timeout)
    if args.seconds is None and args.iterations is None:
        args.seconds = 30.0
    config = _detection_config(args)
    result = detect(sut, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.from_result(sut.name, config, result)
    write_archive_csv(out / "archive.csv", result.archive)
    write_archive_json(out / "archive.json", result.archive, manifest)
    write_manifest(out / "manifest.json", manifest)
    print(f"{sut.name} {config.strategy}: {len(result.archive)} candidates, "
          f"{result.executions} executions, {result.samples} samples, "
          f"{result.elapsed:.2f}s -> {out}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    archive = load_archives(args.archives)
    rng = random.Random(_effective_seed(args.seed))
    report = summarize(archive, rng, restarts=args.restarts)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report_markdown(out / "report.md", report)
    write_report_json(out / "report.json", report)
    clusters = sum(len(g.clusters) for g in report.groups)
    print(f"{report.total_candidates} candidates -> {clusters} clusters "
          f"in {len(report.groups)} validity groups -> {out}")
    return EXIT_OK


def cmd_rank(args) -> int:
    archive = load_archives(args.archives)
    distance = parse_distance(args.distance)
    cluster_ids = {}
    if args.report:
        doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
        for group in doc["groups"]:
            for cluster in group["clusters"]:
                label = f"{group['validity']}/{cluster['id']}"
                for key in cluster["members"]:
                    cluster_ids[tuple(key)] = label
    scored = []
    for c in archive:
        score = pdq(c.input1, c.output1.text, c.input2, c.output2.text, distance)
        scored.append((score, c))
    scored.sort(key=lambda sc: (-sc[0], render_tuple(sc[1].input1), render_tuple(sc[1].input2)))

    rows = []
    per_cluster_count: dict = {}
    for score, c in scored:
        cluster = cluster_ids.get(c.key, "")
        if args.top is not None:
            bucket = cluster if args.report else ""
            per_cluster_count[bucket] = per_cluster_count.get(bucket, 0) + 1
            if per_cluster_count[bucket] > args.top:
                continue
        rows.append({
            "rank": len(rows) + 1, "cluster": cluster,
            "input1": render_tuple(c.input1), "input2": render_tuple(c.input2),
            "output1": c.output1.text, "output2": c.output2.text,
            "validity": c.validity,
            "score_num": score.numerator, "score_den": score.denominator,
            "score": f"{float(score):.6g}",
        })
    write_ranked_csv(args.out, rows)
    print(f"{len(rows)} ranked candidates ({distance.name}) -> {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    sut = get_sut(args.sut, external_arity=args.arity, external_timeout=args.timeout)
    fixed = None
    if args.fixed is not None:
        fixed = tuple(parse_value(part) for part in args.fixed.split(","))
    distance = parse_distance(args.distance)
    found = list(scan_adjacent(sut, args.start, args.stop, distance,
                               vary=args.vary, fixed=fixed, force=args.force))
    write_archive_csv(args.out, found)
    print(f"{len(found)} boundary pairs in [{args.start}, {args.stop}] -> {args.out}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    sut = get_sut(args.sut, external_arity=args.arity, external_timeout=args.timeout)
    if args.seconds is None and args.iterations is None:
        args.iterations = 1000  # iteration budgets keep repetitions deterministic
    config = _detection_config(args)
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    result = run_experiment(sut, config, strategies=strategies,
                            repetitions=args.reps,
                            base_seed=config.sampler.seed,
                            summarize_restarts=args.restarts)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "experiment.md").write_text(result.to_markdown(), encoding="utf-8")
    stats_doc = {
        "sut": result.sut, "repetitions": result.repetitions, "budget": result.budget,
        "union_total": result.union_total, "total_clusters": result.total_clusters,
        "strategies": {
            s.strategy: {
                "found": s.found,
                "unique": result.unique_counts[s.strategy],
                "covered": [sorted(map(list, c)) for c in s.covered],
                "unique_clusters": sorted(map(list, result.unique_clusters[s.strategy])),
            } for s in result.stats
        },
    }
    (out / "experiment.json").write_text(json.dumps(stats_doc, indent=1), encoding="utf-8")
    write_report_markdown(out / "report.md", result.report)
    write_report_json(out / "report.json", result.report)
    print(result.to_markdown())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="autobva",
                     description="Black-box boundary value detection and summarization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run one detection search")
    _add_detect_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("summarize", help="cluster archives into a report")
    p.add_argument("archives", nargs="+", help="archive.csv / archive.json files")
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("rank", help="re-score candidates and emit a ranked CSV")
    p.add_argument("archives", nargs="+")
    p.add_argument("--distance", default="jaccard2")
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--report", default=None,
                   help="report.json for per-cluster ranking")
    p.add_argument("--out", default="ranked.csv")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("oracle", help="exhaustive adjacent-pair boundary scan")
    p.add_argument("--sut", required=True)
    p.add_argument("--from", dest="start", type=int, required=True)
    p.add_argument("--to", dest="stop", type=int, required=True)
    p.add_argument("--vary", type=int, default=0, help="argument index to sweep")
    p.add_argument("--fixed", default=None,
                   help="comma-separated full argument tuple, e.g. 2021,2,1")
    p.add_argument("--distance", default="strlen")
    p.add_argument("--force", action="store_true")
    p.add_argument("--arity", type=int, default=1)
    p.add_argument("--timeout", type=float, default=5.0)
    p.add_argument("--out", default="boundaries.csv")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("experiment", help="repeated seeded runs with statistics")
    _add_detect_flags(p)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--strategies", default="lns,bcs")
    p.add_argument("--restarts", type=int, default=100)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, ValueError, WindowTooLarge) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
