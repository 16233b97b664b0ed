"""Saving and loading experiment reports.

CSV bodies and JSON documents carry no timestamps, so the same config and
seed always produce the same bytes.
"""

import json
from pathlib import Path

import pandas as pd

from irs_skg.errors import ConfigError
from irs_skg.harness import ExperimentReport

FLOAT_FORMAT = "%.12g"
FORMATS = ("csv", "json")


def _dump(data: dict, path: Path) -> None:
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def save_report(report: ExperimentReport, out_dir: Path, fmt: str = "csv") -> list[Path]:
    """Write ``<name>.csv`` plus ``<name>.meta.json``, or a single ``<name>.json``.

    Returns:
        Paths written, data file first
    """
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}; got {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if fmt == "json":
        path = out_dir / f"{report.name}.json"
        _dump(report.to_dict(), path)
        return [path]

    data_path = out_dir / f"{report.name}.csv"
    report.to_frame().to_csv(data_path, index=False, float_format=FLOAT_FORMAT)
    meta_path = out_dir / f"{report.name}.meta.json"
    _dump({"name": report.name, "metadata": report.metadata, "config": report.config}, meta_path)
    return [data_path, meta_path]


def load_report(path: Path) -> ExperimentReport:
    """Load a report from its JSON document or from a CSV with its sidecar."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"report not found: {path}")

    if path.suffix == ".json":
        with open(path) as f:
            return ExperimentReport.from_dict(json.load(f))

    meta_path = path.with_suffix(".meta.json")
    meta = {"name": path.stem}
    if meta_path.exists():
        with open(meta_path) as f:
            meta = json.load(f)
    frame = pd.read_csv(path, keep_default_na=True, dtype={"sweep_key": str, "metric": str, "seed": str})
    frame["seed"] = frame["seed"].fillna("")
    report = ExperimentReport(name=meta["name"], config=meta.get("config", {}), metadata=meta.get("metadata", {}))
    for row in frame.itertuples(index=False):
        report.add(row.sweep_key, row.metric, row.value, row.stderr, row.n, row.seed)
    return report


def save_trace(trace: pd.DataFrame, out_dir: Path, name: str = "trace") -> Path:
    """Per-round observation log next to the report."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.csv"
    trace.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path
