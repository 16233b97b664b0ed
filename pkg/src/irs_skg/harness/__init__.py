"""Experiment harness: configuration, sweeps over SNR / Eve count / probe length, and reports.

Every sweep produces an :class:`ExperimentReport`, a flat list of metric rows
that serializes to CSV (one metric per row) plus a JSON metadata sidecar.
"""

import math
from dataclasses import dataclass, field
from typing import Any

import pandas as pd

__all__ = [
    "REPORT_COLUMNS",
    "ExperimentReport",
    "ReportRow",
]

REPORT_COLUMNS = ["sweep_key", "metric", "value", "stderr", "n", "seed"]


def _finite_or_none(x: float) -> float | None:
    return None if x is None or not math.isfinite(x) else float(x)


@dataclass
class ReportRow:
    """One metric at one sweep point."""

    sweep_key: str  # e.g. "snr=10|M=4"
    metric: str
    value: float
    stderr: float = float("nan")
    n: int = 0  # samples behind the value
    seed: str = ""  # stream lineage "seed:stream_id"

    def to_dict(self) -> dict:
        return {
            "sweep_key": self.sweep_key,
            "metric": self.metric,
            "value": _finite_or_none(self.value),
            "stderr": _finite_or_none(self.stderr),
            "n": self.n,
            "seed": self.seed,
        }


@dataclass
class ExperimentReport:
    """Rows of one run plus the config and metadata that produced them."""

    name: str
    rows: list[ReportRow] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)

    def add(
        self,
        sweep_key: str,
        metric: str,
        value: float,
        stderr: float = float("nan"),
        n: int = 0,
        seed: str = "",
    ) -> ReportRow:
        row = ReportRow(sweep_key, metric, float(value), float(stderr), int(n), seed)
        self.rows.append(row)
        return row

    def value(self, sweep_key: str, metric: str) -> float:
        """Value of the first row matching ``(sweep_key, metric)``."""
        for row in self.rows:
            if row.sweep_key == sweep_key and row.metric == metric:
                return row.value
        raise KeyError(f"no row {metric!r} at {sweep_key!r}")

    def metrics(self) -> list[str]:
        return list(dict.fromkeys(row.metric for row in self.rows))

    def to_frame(self) -> pd.DataFrame:
        """Rows as a DataFrame with the fixed column order."""
        return pd.DataFrame([vars(row) for row in self.rows], columns=REPORT_COLUMNS)

    def to_dict(self) -> dict:
        """Convert to JSON-serializable dict."""
        return {
            "name": self.name,
            "metadata": self.metadata,
            "config": self.config,
            "rows": [row.to_dict() for row in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        rows = [
            ReportRow(
                sweep_key=r["sweep_key"],
                metric=r["metric"],
                value=float("nan") if r["value"] is None else r["value"],
                stderr=float("nan") if r["stderr"] is None else r["stderr"],
                n=r["n"],
                seed=r["seed"],
            )
            for r in data.get("rows", [])
        ]
        return cls(name=data["name"], rows=rows, config=data.get("config", {}), metadata=data.get("metadata", {}))
