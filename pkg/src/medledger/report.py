"""Render a simulation report to a directory of artifacts.

Writes the canonical JSON report, a per-commit CSV, and PNG charts. The
JSON and CSV bytes are fully determined by the report dict; the charts are
for eyeballs, not for diffing.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .codec import canonical_json

REPORT_JSON = "report.json"
METRICS_CSV = "metrics.csv"
HEIGHTS_PNG = "commit_heights.png"
MESSAGES_PNG = "messages.png"


def write_report(report: dict, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    json_path = out / REPORT_JSON
    json_path.write_text(canonical_json(report) + "\n")
    written.append(json_path)

    csv_path = out / METRICS_CSV
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "height", "time_ms", "txs"])
        for node in sorted(report.get("commit_log", {})):
            for height, time_ms, txs in report["commit_log"][node]:
                writer.writerow([node, height, time_ms, txs])
    written.append(csv_path)

    written.append(_plot_heights(report, out / HEIGHTS_PNG))
    written.append(_plot_messages(report, out / MESSAGES_PNG))
    return written


def _plot_heights(report: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    for node in sorted(report.get("commit_log", {})):
        log = report["commit_log"][node]
        times = [t / 1000.0 for _, t, _ in log]
        heights = [h for h, _, _ in log]
        fault = report.get("tips", {}).get(node, {}).get("fault")
        label = f"{node} ({fault})" if fault else node
        ax.step([0.0] + times, [0] + heights, where="post", label=label)
    ax.set_xlabel("virtual time (s)")
    ax.set_ylabel("committed height")
    title = f"seed {report.get('seed')}"
    if report.get("fault"):
        title += f", fault={report['fault']}"
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize="small")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _plot_messages(report: dict, path: Path) -> Path:
    by_type = report.get("messages", {}).get("sent_by_type", {})
    kinds = sorted(by_type)
    counts = [by_type[k] for k in kinds]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(kinds, counts, color="#4878a8")
    ax.set_ylabel("messages sent")
    ax.set_title("traffic by message type")
    for i, count in enumerate(counts):
        ax.text(i, count, str(count), ha="center", va="bottom", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
