"""Report documents: JSON serialisation and Markdown/plain-text rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__
from .audit import AuditResult
from .convex import Tolerance

__all__ = ["ReportDocument", "GLYPHS", "render_markdown", "render_table", "utc_timestamp"]

TOOL = "gptaudit"
GLYPHS = {"holds": "✅", "fails": "❌", "inconclusive": "❔"}


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


@dataclass(frozen=True)
class ReportDocument:
    model: str
    params: dict
    seed: int
    tolerance: Tolerance
    results: tuple
    version: str = __version__
    timestamp: str = field(default_factory=utc_timestamp)

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "seed": self.seed,
            "tolerance": self.tolerance.as_dict(),
            "results": [r.to_json() for r in self.results],
            "version": self.version,
            "provenance": {"tool": TOOL, "version": self.version, "timestamp": self.timestamp},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, d: dict) -> "ReportDocument":
        return cls(
            model=d["model"],
            params=d["params"],
            seed=d["seed"],
            tolerance=Tolerance(**d["tolerance"]),
            results=tuple(AuditResult.from_json(r) for r in d["results"]),
            version=d["version"],
            timestamp=d["provenance"]["timestamp"],
        )

    @classmethod
    def loads(cls, text: str) -> "ReportDocument":
        return cls.from_json(json.loads(text))


def _fmt(v) -> str:
    return "" if v is None else f"{v:.6g}"


def _model_label(doc: ReportDocument) -> str:
    if not doc.params:
        return doc.model
    return doc.model + " (" + ", ".join(f"{k}={v}" for k, v in doc.params.items()) + ")"


def render_markdown(doc: ReportDocument) -> str:
    """One row per postulate; no timestamp so that the output is reproducible."""
    lines = [
        f"# Audit report: {_model_label(doc)}",
        "",
        f"seed `{doc.seed}`, eps `{doc.tolerance.eps:g}`, angle grid `{doc.tolerance.grid_angle}`, "
        f"gamma grid `{doc.tolerance.grid_gamma}`, version `{doc.version}`",
        "",
        "| postulate | status | value | notes |",
        "|---|---|---|---|",
    ]
    for r in doc.results:
        notes = r.notes.replace("|", "\\|")
        lines.append(f"| {r.postulate} | {GLYPHS[r.status]} {r.status} | {_fmt(r.value)} | {notes} |")
    return "\n".join(lines) + "\n"


def render_table(doc: ReportDocument) -> str:
    rows = [("postulate", "status", "value", "witness")]
    for r in doc.results:
        w = r.witness or {}
        rows.append((r.postulate, r.status, _fmt(r.value), str(w.get("label", w.get("kind", "")))))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    out = [f"model: {_model_label(doc)}  seed: {doc.seed}"]
    for row in rows:
        out.append("  ".join(c.ljust(wd) for c, wd in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"
