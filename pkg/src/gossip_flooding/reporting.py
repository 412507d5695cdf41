"""CSV and JSON output shared by every command.

Each command produces a list of row dictionaries with a fixed column order.
CSV output is written through pandas with '\\n' line endings; JSON output is
an object with a ``meta`` header (tool name, version and the echoed
experiment spec) followed by the ``rows`` list. Both are deterministic for
identical inputs.
"""
import json
import sys
from pathlib import Path
from typing import Optional

import pandas as pd

from . import __version__
from .common.config import TOOL_NAME
from .exact_formulas import render_exact
from .monte_carlo import Estimate

ESTIMATE_COLUMNS = ["quantity", "graph", "n", "scenario", "mean", "stderr", "ci_low", "ci_high", "reps", "seed"]
EXACT_COLUMNS = ["quantity", "graph", "n", "scenario", "value", "decimal"]
TABLE_COLUMNS = ["quantity", "graph", "n", "scenario", "k", "value", "decimal"]
CDF_COLUMNS = ["quantity", "graph", "n", "scenario", "t", "probability", "decimal"]
SWEEP_COLUMNS = ["family", "n", "ratio", "ratio_low", "ratio_high", "ratio_sigma",
                 "bound_lower", "bound_upper", "limit", "reps", "seed", "min_biased"]
VERIFY_COLUMNS = ["check", "status", "measured", "expected", "provenance"]
CONVERT_COLUMNS = ["quantity", "graph", "n", "edges", "discrete_mean", "value", "decimal", "provenance"]


def estimate_row(est: Estimate, graph: str, n: int, scenario: str) -> dict:
    return {
        "quantity": est.quantity,
        "graph": graph,
        "n": n,
        "scenario": scenario,
        "mean": est.mean,
        "stderr": est.stderr,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "reps": est.reps,
        "seed": est.master_seed,
    }


def exact_row(quantity: str, value, graph: str = "", n=None, scenario: str = "", **extra) -> dict:
    text, decimal = render_exact(value)
    row = {"quantity": quantity, "graph": graph, "n": n, "scenario": scenario}
    row.update(extra)
    row.update({"value": text, "decimal": decimal})
    return row


def render(rows: list, columns: list, fmt: str = "csv", spec: Optional[dict] = None) -> str:
    """Render rows as CSV or JSON text.

    Args:
        rows: Row dictionaries; missing columns render empty
        columns: Column order of the CSV and key order of the JSON rows
        fmt: "csv" or "json"
        spec: Experiment spec echoed into the JSON meta header
    """
    if fmt == "json":
        ordered = [{c: row.get(c) for c in columns} for row in rows]
        payload = {"meta": {"tool": TOOL_NAME, "version": __version__, "spec": spec or {}}, "rows": ordered}
        return json.dumps(payload, indent=2, default=str) + "\n"
    df = pd.DataFrame(rows, columns=columns)
    return df.to_csv(index=False, lineterminator="\n")


def write_output(text: str, out: Optional[str] = None) -> None:
    """Write text to ``out`` (creating parent folders) or to stdout."""
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
