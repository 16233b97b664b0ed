"""Console summaries of experiment reports."""

import math

from rich.table import Table

from irs_skg.harness import ExperimentReport

# Headline metrics picked for the compact summary, in display order
HEADLINE = ("pearson", "kdr", "nrmse_median", "key_mi", "skr_raw", "mean_z", "violations")


def format_value(value: float) -> str:
    if value is None or not math.isfinite(value):
        return "-"
    if value != 0 and (abs(value) >= 1e4 or abs(value) < 1e-3):
        return f"{value:.3e}"
    return f"{value:.4f}"


def render_table(report: ExperimentReport, max_rows: int | None = 60) -> Table:
    """Rich table of the report rows; ``max_rows=None`` shows everything."""
    table = Table(title=f"{report.name} ({report.metadata.get('config_hash', '')[:12]})")
    table.add_column("Sweep point", style="cyan")
    table.add_column("Metric")
    table.add_column("Value", justify="right")
    table.add_column("Stderr", justify="right", style="dim")
    table.add_column("n", justify="right", style="dim")

    rows = report.rows if max_rows is None else report.rows[:max_rows]
    for row in rows:
        value = format_value(row.value)
        if row.metric == "flagged" and row.value:
            value = f"[yellow]{value}[/yellow]"
        table.add_row(row.sweep_key, row.metric, value, format_value(row.stderr), str(row.n))
    if max_rows is not None and len(report.rows) > max_rows:
        table.caption = f"... and {len(report.rows) - max_rows} more rows"
    return table


def compact_summary(report: ExperimentReport) -> str:
    """One-line summary for logs: the range of each headline metric."""
    parts = [f"{report.name}: {len(report.rows)} rows"]
    for metric in HEADLINE:
        values = [r.value for r in report.rows if r.metric == metric and math.isfinite(r.value)]
        if not values:
            continue
        low, high = min(values), max(values)
        if low == high:
            parts.append(f"{metric} {format_value(low)}")
        else:
            parts.append(f"{metric} {format_value(low)}..{format_value(high)}")
    return " | ".join(parts)
