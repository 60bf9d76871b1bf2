"""CSV and aligned-text emitters for result tables."""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from .mcnemar import McNemarResult
from .measures import ConfusionMatrix, IRMetrics

RESULT_COLUMNS = ["config", "TP", "TN", "FP", "FN", "accuracy", "precision", "recall", "f_measure"]
MCNEMAR_COLUMNS = ["model", "statistic", "p", "decision"]


def result_row(name: str, cm: ConfusionMatrix, m: IRMetrics) -> list[str]:
    return [
        name,
        str(cm.TP),
        str(cm.TN),
        str(cm.FP),
        str(cm.FN),
        m.percent("accuracy"),
        m.percent("precision"),
        m.percent("recall"),
        m.percent("f_measure"),
    ]


def results_csv(rows: Sequence[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()


def mcnemar_row(name: str, res: McNemarResult) -> list[str]:
    return [name, f"{res.statistic:.3f}", f"{res.p_value:.3f}", res.decision]


def mcnemar_csv(rows: Sequence[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MCNEMAR_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()


def text_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Left-aligned first column, right-aligned others."""
    cells = [list(header)] + [list(r) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for n, r in enumerate(cells):
        parts = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(parts).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def config_label(algorithm: str, config: dict) -> str:
    return f"{algorithm} {json.dumps(config, sort_keys=True)}" if config else algorithm
