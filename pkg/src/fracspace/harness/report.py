"""Suite reports: per-statistic rows with witnesses, deterministic serialization."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

__all__ = ["SuiteReport", "fmt", "write_reports", "trend_ratios"]


def fmt(x) -> str:
    """Deterministic float formatting for report files."""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


@dataclass
class SuiteReport:
    suite: str
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def add(self, fixture: str, n: int, statistic: str, value: float, witness: str = ""):
        self.rows.append(
            {
                "fixture": fixture,
                "n": int(n),
                "statistic": statistic,
                "value": float(value),
                "witness": witness,
            }
        )

    def note(self, text: str):
        self.notes.append(text)

    def fail(self, text: str):
        self.failures.append(text)

    def values(self, statistic: str) -> list[tuple[int, float]]:
        out = [(r["n"], r["value"]) for r in self.rows if r["statistic"] == statistic]
        return sorted(out)

    def to_csv_text(self) -> str:
        lines = ["fixture\tn\tstatistic\tvalue\twitness"]
        for r in self.rows:
            lines.append(
                "\t".join(
                    [r["fixture"], str(r["n"]), r["statistic"], fmt(r["value"]), r["witness"]]
                )
            )
        return "\n".join(lines) + "\n"

    def to_summary(self) -> dict:
        stats = sorted({r["statistic"] for r in self.rows})
        trends = {}
        for s in stats:
            vals = [v for _, v in self.values(s)]
            trends[s] = {"values": [fmt(v) for v in vals], "ratios": [fmt(r) for r in trend_ratios(vals)]}
        return {
            "suite": self.suite,
            "rows": len(self.rows),
            "trends": trends,
            "notes": self.notes,
            "failures": self.failures,
        }


def trend_ratios(values) -> list[float]:
    """Consecutive-ladder growth ratios, skipping zero denominators."""
    out = []
    for a, b in zip(values, values[1:]):
        if a != 0:
            out.append(b / a)
    return out


def write_reports(reports: list[SuiteReport], output_dir: str) -> dict:
    os.makedirs(output_dir, exist_ok=True)
    summary = {"suites": [r.to_summary() for r in sorted(reports, key=lambda r: r.suite)]}
    for report in reports:
        path = os.path.join(output_dir, f"{report.suite}.tsv")
        with open(path, "w") as fh:
            fh.write(report.to_csv_text())
    with open(os.path.join(output_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return summary
