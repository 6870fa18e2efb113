"""Rendering of verification results: JSON payloads and terminal lines.

Node keys are stable display paths ("root", "root.0.1", "S1.0"), never raw
node ids, so reports stay comparable across documents that differ only in
id allocation.
"""

from __future__ import annotations

from .document import DerivationDoc, iter_nodes, node_path_name
from .rules import locus_str
from .verify import (
    Correct,
    DocReport,
    Incorrect,
    Indeterminate,
    NodeStatus,
    status_name,
)

RED = "\x1b[31m"
YELLOW = "\x1b[33m"
GREEN = "\x1b[32m"
RESET = "\x1b[0m"

_STATUS_COLOR = {"correct": GREEN, "incorrect": RED, "indeterminate": YELLOW}


def _node_json(status: NodeStatus) -> dict:
    entry: dict = {"status": status_name(status), "errors": [], "obligations": []}
    if isinstance(status, Incorrect):
        for e in status.errors:
            entry["errors"].append({
                "locus": locus_str(e.locus),
                "path": list(e.path),
                "expected": e.expected,
                "found": e.found,
                "message": e.message,
            })
    elif isinstance(status, Indeterminate):
        for o in status.obligations:
            entry["obligations"].append({
                "locus": locus_str(o.locus),
                "paths": [list(p) for p in o.paths],
                "statement": o.statement,
            })
    return entry


def report_json(doc: DerivationDoc, report: DocReport) -> dict:
    """The machine-readable form of one document's verification report."""
    nodes = {}
    for _, node in iter_nodes(doc):
        nodes[node_path_name(doc, node.id)] = _node_json(report.statuses[node.id])
    return {
        "nodes": nodes,
        "tree_status": report.tree_status,
        "summaries": dict(report.summaries),
    }


def _paint(text: str, color: str, use_color: bool) -> str:
    return f"{color}{text}{RESET}" if use_color else text


def render_summary(report: DocReport, use_color: bool = False) -> str:
    n = len(report.statuses)
    color = {"CompleteCorrect": GREEN, "Incomplete": YELLOW, "HasErrors": RED}[report.tree_status]
    noun = "node" if n == 1 else "nodes"
    return f"{_paint(report.tree_status, color, use_color)} ({n} {noun})"


def render_human(doc: DerivationDoc, report: DocReport, spans: dict,
                 filename: str, use_color: bool = False) -> list[str]:
    """One line per error or open obligation, compiler style."""
    lines: list[str] = []
    for _, node in iter_nodes(doc):
        status = report.statuses[node.id]
        if isinstance(status, Correct):
            continue
        span = spans.get(node.id)
        where = f"{filename}:{span.line}:{span.col}" if span else filename
        label = node_path_name(doc, node.id)
        if isinstance(status, Incorrect):
            for e in status.errors:
                head = _paint("error", RED, use_color)
                lines.append(f"{where}: {head}: [{label}] {locus_str(e.locus)}: {e.message}")
        else:
            for o in status.obligations:
                head = _paint("open", YELLOW, use_color)
                lines.append(f"{where}: {head}: [{label}] {locus_str(o.locus)}: {o.statement}")
    return lines
