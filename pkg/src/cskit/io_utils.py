"""File formats: JSONL records, CSV reports, and provenance headers.

Every artifact starts with a provenance line (tool version, seed, input
digests) that readers skip. Headers contain no timestamps, so re-running
a stage on unchanged inputs is byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__
from .analysis import CorrelationCell
from .backtranslation import DiscardEntry, GoldEdit
from .error_taxonomy import ErrorAnnotation, ErrorCode, SystemErrorProfile
from .errors import SchemaError
from .metrics import InstanceMetrics, MetricReport
from .model import (
    LanguageTag,
    ParallelPair,
    Provenance,
    Split,
    SystemOutput,
    TaggedUtterance,
    Token,
)
from .preprocess import PreprocessedSentence
from .tournament import Comparison, Judgment, ScoreTable, Verdict

PROVENANCE_KEY = "_provenance"


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:12]


def make_provenance(
    command: str, seed: int | None, inputs: Mapping[str, str | Path]
) -> dict:
    return {
        "tool": f"cskit/{__version__}",
        "command": command,
        "seed": seed,
        "inputs": {name: file_digest(path) for name, path in sorted(inputs.items())},
    }


def write_jsonl(
    path: str | Path, records: Iterable[Mapping], provenance: dict | None = None
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        if provenance is not None:
            handle.write(json.dumps({PROVENANCE_KEY: provenance}, ensure_ascii=False) + "\n")
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    """All data records; provenance header lines and blanks are skipped."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{line_number}: invalid JSON ({exc})") from exc
            if isinstance(record, dict) and PROVENANCE_KEY in record:
                continue
            if not isinstance(record, dict):
                raise SchemaError(f"{path}:{line_number}: expected a JSON object")
            records.append(record)
    return records


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    provenance: dict | None = None,
) -> None:
    buffer = io.StringIO()
    if provenance is not None:
        buffer.write("# " + json.dumps(provenance, ensure_ascii=False) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")


def read_csv(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


# -- utterances ------------------------------------------------------------


def utterance_to_record(utterance: TaggedUtterance) -> dict:
    return {
        "id": utterance.id,
        "split": utterance.split.value,
        "tokens": [
            {"surface": t.surface, "tag": t.tag.value} for t in utterance.tokens
        ],
    }


def record_to_utterance(record: dict) -> TaggedUtterance:
    return TaggedUtterance(
        id=record["id"],
        split=Split(record["split"]),
        tokens=tuple(
            Token(surface=t["surface"], tag=LanguageTag(t["tag"]))
            for t in record["tokens"]
        ),
    )


# -- preprocessed sentences --------------------------------------------------


def sentence_to_record(sentence: PreprocessedSentence) -> dict:
    return {"id": sentence.id, "split": sentence.split.value, "text": sentence.text}


def record_to_sentence(record: dict) -> PreprocessedSentence:
    return PreprocessedSentence(
        id=record["id"], split=Split(record["split"]), text=record["text"]
    )


# -- parallel pairs ----------------------------------------------------------


def pair_to_record(pair: ParallelPair) -> dict:
    return {
        "id": pair.id,
        "split": pair.split.value,
        "cs_text": pair.cs_text,
        "en_text": pair.en_text,
        "provenance": pair.provenance.value,
    }


def record_to_pair(record: dict) -> ParallelPair:
    return ParallelPair(
        id=record["id"],
        split=Split(record["split"]),
        cs_text=record["cs_text"],
        en_text=record["en_text"],
        provenance=Provenance(record["provenance"]),
    )


def discard_to_record(entry: DiscardEntry) -> dict:
    return {"id": entry.id, "reason": entry.reason}


def record_to_gold_edit(record: dict) -> GoldEdit:
    if record.get("remove"):
        return GoldEdit(id=record["id"], remove=True)
    return GoldEdit(id=record["id"], en_text=record["en_text"])


# -- system outputs ----------------------------------------------------------


def output_to_record(output: SystemOutput) -> dict:
    return {
        "source_id": output.source_id,
        "system_id": output.system_id,
        "raw": output.raw,
        "truncated": output.truncated,
    }


def record_to_output(record: dict) -> SystemOutput:
    return SystemOutput(
        source_id=record["source_id"],
        system_id=record["system_id"],
        raw=record["raw"],
        truncated=record.get("truncated", record["raw"]),
    )


# -- tournament --------------------------------------------------------------


def comparison_to_record(comparison: Comparison) -> dict:
    return {
        "id": comparison.id,
        "source_id": comparison.source_id,
        "system_a": comparison.system_a,
        "system_b": comparison.system_b,
    }


def record_to_comparison(record: dict) -> Comparison:
    return Comparison(
        id=record["id"],
        source_id=record["source_id"],
        system_a=record["system_a"],
        system_b=record["system_b"],
    )


def judgment_to_record(judgment: Judgment) -> dict:
    return {
        "comparison_id": judgment.comparison_id,
        "verdict": judgment.verdict.value,
        "annotator_id": judgment.annotator_id,
        "timestamp": judgment.timestamp,
    }


def record_to_judgment(record: dict) -> Judgment:
    return Judgment(
        comparison_id=record["comparison_id"],
        verdict=Verdict(record["verdict"]),
        annotator_id=record["annotator_id"],
        timestamp=float(record.get("timestamp", 0.0)),
    )


def assignment_to_records(assignment: Mapping[str, Sequence[str]]) -> list[dict]:
    return [
        {"annotator_id": annotator, "comparison_ids": list(ids)}
        for annotator, ids in assignment.items()
    ]


def records_to_assignment(records: Iterable[dict]) -> dict[str, list[str]]:
    return {r["annotator_id"]: list(r["comparison_ids"]) for r in records}


def score_rows(table: ScoreTable) -> list[tuple[str, str, str]]:
    return [
        (system, f"{points:g}", str(rank)) for rank, system, points in table.ranking()
    ]


# -- metrics -----------------------------------------------------------------


def instance_metrics_to_record(metrics: InstanceMetrics) -> dict:
    return {
        "source_id": metrics.source_id,
        "system_id": metrics.system_id,
        "bleu": metrics.bleu,
        "chrf": metrics.chrf,
        "embed_f": metrics.embed_f,
    }


def record_to_instance_metrics(record: dict) -> InstanceMetrics:
    return InstanceMetrics(
        source_id=record["source_id"],
        system_id=record["system_id"],
        bleu=float(record["bleu"]),
        chrf=float(record["chrf"]),
        embed_f=float(record["embed_f"]),
    )


def system_metrics_rows(report: MetricReport) -> list[tuple[str, str, str, str]]:
    return [
        (
            row.system_id,
            f"{row.bleu:.2f}",
            f"{row.embed_f:.2f}",
            f"{row.chrf:.2f}",
        )
        for row in report.per_system
    ]


# -- error annotations ---------------------------------------------------------


def annotation_to_record(annotation: ErrorAnnotation) -> dict:
    return {
        "source_id": annotation.source_id,
        "system_id": annotation.system_id,
        "codes": sorted(error.code for error in annotation.codes),
    }


def record_to_annotation(record: dict) -> ErrorAnnotation:
    return ErrorAnnotation(
        source_id=record["source_id"],
        system_id=record["system_id"],
        codes=frozenset(ErrorCode.from_code(code) for code in record["codes"]),
    )


def error_report_rows(
    profiles: Sequence[SystemErrorProfile],
) -> list[tuple[str, str, str, str]]:
    rows = []
    for profile in profiles:
        for group, count in profile.group_counts.items():
            rows.append(
                (
                    profile.system_id,
                    group,
                    str(count),
                    f"{profile.group_shares[group]:.2f}",
                )
            )
    return rows


# -- correlation ---------------------------------------------------------------


def correlation_rows(
    cells: Sequence[CorrelationCell],
) -> tuple[list[str], list[list[str]]]:
    """Matrix shape: one row per subset, one column per metric."""
    metrics = list(dict.fromkeys(cell.metric for cell in cells))
    subsets = list(dict.fromkeys(cell.subset for cell in cells))
    by_key = {(cell.metric, cell.subset): cell for cell in cells}
    header = ["subset"] + metrics
    rows = []
    for subset in subsets:
        row = [subset]
        for metric in metrics:
            cell = by_key[(metric, subset)]
            if not cell.defined:
                row.append("undefined")
            else:
                star = "*" if cell.significant else ""
                row.append(f"{cell.rho:.3f}{star}")
        rows.append(row)
    return header, rows


def correlation_cells_to_records(cells: Sequence[CorrelationCell]) -> list[dict]:
    return [
        {
            "metric": cell.metric,
            "subset": cell.subset,
            "n": cell.n,
            "rho": cell.rho,
            "p_value": cell.p,
            "significant": cell.significant,
        }
        for cell in cells
    ]
