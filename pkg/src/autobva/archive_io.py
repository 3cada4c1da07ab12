"""File formats: archives (CSV and JSON), run manifests, cluster reports
and ranked candidate listings.

The CSV archive is the interchange format; a write-then-read round trip
reproduces every candidate bit-exactly.  The JSON archive additionally
carries structured error payloads and the run manifest.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from .detection import Archive, BoundaryCandidate, DetectionResult, canonical_candidate
from .summarization import ClusterReport
from .values import ExecutionOutcome, parse_tuple, render_tuple, display_tuple

CSV_HEADER = ["input1", "input2", "output1", "output2", "validity", "score_num", "score_den"]

_ERROR_PREFIXES = ("ArgumentError(", "BoundsError(", "DomainError(")


class DataError(Exception):
    """Malformed archive content; carries the offending file and line."""

    def __init__(self, message: str, path=None, line: Optional[int] = None):
        where = f"{path}:{line}: " if path is not None and line is not None else ""
        super().__init__(f"{where}{message}")
        self.path = path
        self.line = line


@dataclass
class RunManifest:
    sut: str
    strategy: str
    seed: int
    budget: dict                     # {"seconds": x} or {"iterations": n}
    sampling: dict = field(default_factory=dict)
    distance: str = "strlen"
    threshold: str = "0"
    counts: dict = field(default_factory=dict)
    elapsed_seconds: float = 0.0

    @classmethod
    def from_result(cls, sut_name, config, result: DetectionResult) -> "RunManifest":
        return cls(
            sut=sut_name,
            strategy=config.strategy,
            seed=config.sampler.seed,
            budget=({"iterations": config.budget_iterations}
                    if config.budget_iterations is not None
                    else {"seconds": config.budget_seconds}),
            sampling={
                "sampling.method": config.sampler.method,
                "sampling.cts": config.sampler.cts,
                "sampling.big_int_bit_cap": config.sampler.big_int_bit_cap,
                "seed": config.sampler.seed,
            },
            distance=config.output_distance.name,
            threshold=str(config.threshold),
            counts={
                "executions": result.executions,
                "samples": result.samples,
                "candidates": len(result.archive),
            },
            elapsed_seconds=round(result.elapsed, 6),
        )


# ---------------------------------------------------------------------------
# archives


def write_archive_csv(path, candidates: Iterable[BoundaryCandidate]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for c in candidates:
            writer.writerow([
                render_tuple(c.input1), render_tuple(c.input2),
                c.output1.text, c.output2.text,
                c.validity, c.score.numerator, c.score.denominator,
            ])


def _outcome_from_text(text: str, is_error: bool) -> ExecutionOutcome:
    if not is_error:
        return ExecutionOutcome(text=text)
    return ExecutionOutcome(text=text, error_kind="argument_error")


def _candidate_from_fields(i1, i2, o1, o2, validity, num, den) -> BoundaryCandidate:
    if validity == "VV":
        err1 = err2 = False
    elif validity == "EE":
        err1 = err2 = True
    elif validity == "VE":
        # the tag does not say which side erred; recognize the canonical texts
        err1 = o1.startswith(_ERROR_PREFIXES)
        err2 = o2.startswith(_ERROR_PREFIXES)
        if err1 == err2:
            err1, err2 = False, True
    else:
        raise ValueError(f"unknown validity tag {validity!r}")
    return canonical_candidate(
        parse_tuple(i1), _outcome_from_text(o1, err1),
        parse_tuple(i2), _outcome_from_text(o2, err2),
        Fraction(num, den),
    )


def read_archive_csv(path) -> list:
    """Parse a CSV archive; raises DataError with the line number on bad rows."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise DataError(f"bad header {header!r}", path, 1)
        for row in reader:
            line = reader.line_num
            if len(row) != len(CSV_HEADER):
                raise DataError(f"expected {len(CSV_HEADER)} fields, got {len(row)}", path, line)
            try:
                out.append(_candidate_from_fields(*row[:5], int(row[5]), int(row[6])))
            except (ValueError, ZeroDivisionError) as exc:
                raise DataError(str(exc), path, line) from exc
    return out


def _outcome_to_json(o: ExecutionOutcome) -> dict:
    data = {"status": o.status, "text": o.text}
    if o.error_kind is not None:
        data["error_kind"] = o.error_kind
        if o.payload:
            data["payload"] = o.payload
    return data


def _outcome_from_json(data: dict) -> ExecutionOutcome:
    return ExecutionOutcome(
        text=data["text"],
        error_kind=data.get("error_kind") if data.get("status") == "error" else None,
        payload=data.get("payload", {}),
    )


def write_archive_json(path, archive: Archive, manifest: Optional[RunManifest] = None) -> None:
    doc = {
        "manifest": asdict(manifest) if manifest else None,
        "candidates": [
            {
                "input1": render_tuple(c.input1),
                "input2": render_tuple(c.input2),
                "output1": _outcome_to_json(c.output1),
                "output2": _outcome_to_json(c.output2),
                "validity": c.validity,
                "score": {"num": c.score.numerator, "den": c.score.denominator},
                "strategies": sorted(archive.strategies.get(c.key, ())),
            }
            for c in archive
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def read_archive_json(path) -> tuple:
    """Returns (candidates, strategies-by-key, manifest dict or None)."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc}", path, exc.lineno) from exc
    candidates = []
    strategies = {}
    for i, entry in enumerate(doc.get("candidates", [])):
        try:
            c = canonical_candidate(
                parse_tuple(entry["input1"]),
                _outcome_from_json(entry["output1"]),
                parse_tuple(entry["input2"]),
                _outcome_from_json(entry["output2"]),
                Fraction(entry["score"]["num"], entry["score"]["den"]),
            )
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise DataError(f"candidate #{i}: {exc}", path) from exc
        candidates.append(c)
        if entry.get("strategies"):
            strategies[c.key] = set(entry["strategies"])
    return candidates, strategies, doc.get("manifest")


def load_archives(paths, threshold: Optional[Fraction] = None) -> Archive:
    """Merge archive files (CSV or JSON by extension), re-deduplicating.

    No re-filtering by default: rows are kept as stored, even at score zero,
    so ranking can list them last.
    """
    merged = Archive(Fraction(-1) if threshold is None else threshold)
    for path in paths:
        path = Path(path)
        if path.suffix == ".json":
            candidates, strategies, _ = read_archive_json(path)
            for c in candidates:
                merged.add(c)
                for tag in strategies.get(c.key, ()):
                    if c.key in merged:
                        merged.strategies.setdefault(c.key, set()).add(tag)
        else:
            for c in read_archive_csv(path):
                merged.add(c)
    return merged


def write_manifest(path, manifest: RunManifest) -> None:
    Path(path).write_text(json.dumps(asdict(manifest), indent=1), encoding="utf-8")


# ---------------------------------------------------------------------------
# cluster reports


def report_to_json(report: ClusterReport) -> dict:
    return {
        "total_candidates": report.total_candidates,
        "groups": [
            {
                "validity": g.validity,
                "size": g.size,
                "silhouette": g.silhouette,
                "clusters": [
                    {
                        "id": c.cluster_id,
                        "size": c.size,
                        "strategy_counts": c.strategy_counts,
                        "representative": {
                            "input1": render_tuple(c.representative.input1),
                            "output1": c.representative.output1.text,
                            "input2": render_tuple(c.representative.input2),
                            "output2": c.representative.output2.text,
                        },
                        "members": [list(m.key) for m in c.members],
                    }
                    for c in g.clusters
                ],
            }
            for g in report.groups
        ],
    }


def write_report_json(path, report: ClusterReport) -> None:
    Path(path).write_text(json.dumps(report_to_json(report), indent=1), encoding="utf-8")


def report_to_markdown(report: ClusterReport) -> str:
    lines = ["# Boundary candidate summary", ""]
    strategies = sorted({tag for g in report.groups for c in g.clusters
                         for tag in c.strategy_counts})
    head = ["ID", "Validity", "Input 1", "Output 1", "Input 2", "Output 2", "Cluster size"]
    head += [f"{s} found" for s in strategies]
    for g in report.groups:
        title = f"## {g.validity} ({g.size} candidates"
        title += f", silhouette {g.silhouette:.3f})" if g.silhouette is not None else ")"
        lines += [title, ""]
        lines.append("| " + " | ".join(head) + " |")
        lines.append("|" + "---|" * len(head))
        for c in g.clusters:
            rep = c.representative
            row = [str(c.cluster_id), g.validity,
                   display_tuple(rep.input1), rep.output1.text,
                   display_tuple(rep.input2), rep.output2.text,
                   str(c.size)]
            row += [str(c.strategy_counts.get(s, 0)) for s in strategies]
            lines.append("| " + " | ".join(cell.replace("|", "\\|") for cell in row) + " |")
        lines.append("")
    return "\n".join(lines)


def write_report_markdown(path, report: ClusterReport) -> None:
    Path(path).write_text(report_to_markdown(report), encoding="utf-8")


# ---------------------------------------------------------------------------
# ranking


def write_ranked_csv(path, rows: Iterable[dict]) -> None:
    fieldnames = ["rank", "cluster", "input1", "input2", "output1", "output2",
                  "validity", "score_num", "score_den", "score"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
