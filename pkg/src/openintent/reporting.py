"""Report serialization: canonical JSON, per-metric CSV, markdown tables.

JSON keeps full float precision and a fully sorted key order so a
repeated replay emits byte-identical files. CSV and markdown are display
formats; markdown rounds to 4 decimals, the table precision used
throughout the result displays.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence, Union

from .errors import ConfigError
from .runner import EvalReport, mean_of

_DISCOVERY_COLUMNS = [("acc", "ACC"), ("nmi", "NMI"), ("ari", "ARI")]
_GID_COLUMNS = [
    ("ind_f1", "IND F1"),
    ("ind_acc", "IND ACC"),
    ("ood_f1", "OOD F1"),
    ("ood_acc", "OOD ACC"),
    ("all_f1", "ALL F1"),
    ("all_acc", "ALL ACC"),
]
_ESTIMATE_COLUMNS = [("k_pred", "K pred"), ("k_error", "K error")]


def _columns_for(report: EvalReport) -> list[tuple[str, str]]:
    known = {
        "discovery": _DISCOVERY_COLUMNS,
        "gid": _GID_COLUMNS,
        "estimate_k": _ESTIMATE_COLUMNS,
    }.get(report.kind)
    if known is not None:
        return known
    return [(key, key.upper()) for key in sorted(report.run_results[0].metrics)]


def _self_check(report: EvalReport) -> None:
    """Every emitted mean must equal the mean recomputed from the runs."""
    recomputed = {
        key: mean_of([r.metrics[key] for r in report.run_results])
        for key in report.run_results[0].metrics
    }
    if recomputed != report.mean_metrics():
        raise AssertionError(f"report {report.label!r}: mean self-check failed")


def render_json(reports: Sequence[EvalReport]) -> str:
    for report in reports:
        _self_check(report)
    payload = {"reports": [report.to_dict() for report in reports]}
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_csv(reports: Sequence[EvalReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["label", "kind", "run", "metric", "value"])
    for report in reports:
        _self_check(report)
        for result in report.run_results:
            for metric in sorted(result.metrics):
                writer.writerow(
                    [report.label, report.kind, result.run_index, metric,
                     repr(result.metrics[metric])]
                )
        for metric, value in sorted(report.mean_metrics().items()):
            writer.writerow([report.label, report.kind, "mean", metric, repr(value)])
    return buffer.getvalue()


def _markdown_table(report: EvalReport) -> list[str]:
    columns = _columns_for(report)
    lines = []
    title = report.label or report.kind
    lines.append(f"## {title}")
    lines.append("")
    lines.append("| run | " + " | ".join(header for _, header in columns) + " |")
    lines.append("|" + "---|" * (len(columns) + 1))
    for result in report.run_results:
        cells = [f"{result.metrics[key]:.4f}" for key, _ in columns]
        lines.append(f"| {result.run_index} | " + " | ".join(cells) + " |")
    mean = report.mean_metrics()
    cells = [f"{mean[key]:.4f}" for key, _ in columns]
    lines.append("| mean | " + " | ".join(cells) + " |")
    recall = report.recall_summary()
    if recall:
        lines.append("")
        lines.append("| stage | mean missing | mean repeated |")
        lines.append("|---|---|---|")
        for stage, rates in recall.items():
            lines.append(
                f"| {stage} | {rates['mean_missing_rate']:.4f} "
                f"| {rates['mean_repeated_rate']:.4f} |"
            )
    return lines


def render_markdown(reports: Sequence[EvalReport]) -> str:
    lines = []
    for report in reports:
        _self_check(report)
        lines.extend(_markdown_table(report))
        lines.append("")
    return "\n".join(lines)


_RENDERERS = {"json": render_json, "csv": render_csv, "markdown": render_markdown}


def emit_report(
    reports: Sequence[EvalReport], format: str, path: Union[str, Path]
) -> Path:
    if not reports:
        raise ConfigError("nothing to emit: empty report set")
    renderer = _RENDERERS.get(format)
    if renderer is None:
        raise ConfigError(
            f"unknown report format {format!r}; choose from {sorted(_RENDERERS)}"
        )
    path = Path(path)
    text = renderer(reports)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write report to {path}: {exc}")
    return path


def read_report_file(path: Union[str, Path]) -> list[EvalReport]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"report file not found: {path}")
    try:
        payload = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"report file is not valid JSON: {path}: {exc}")
    if not isinstance(payload, dict) or "reports" not in payload:
        raise ConfigError(f"report file has no 'reports' key: {path}")
    return [EvalReport.from_dict(entry) for entry in payload["reports"]]
