"""
Report files: the full report as JSON, and the per-step time series as CSV.
"""
import json
import logging
from pathlib import Path
from typing import Optional

import pandas as pd

from src.evaluation.metrics import EvalReport
from src.utils import ensure_directory

logger = logging.getLogger(__name__)

CSV_HEADER = ["step", "per_rx_accuracy", "instance_exact", "achieved_rate",
              "optimal_rate", "rate_error", "violated"]
CSV_FLOAT_FORMAT = "%.6g"


def write_report(report: EvalReport, json_path: Optional[str], csv_path: Optional[str]) -> None:
    """
    Write whichever of the two report files is requested.

    Raises:
        OSError: If a file cannot be written
    """
    if json_path:
        out = Path(json_path)
        ensure_directory(str(out.parent))
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            json.dump(report.to_dict(), f, indent=2, allow_nan=False)
            f.write("\n")
        logger.info(f"Wrote JSON report to {out}")

    if csv_path:
        out = Path(csv_path)
        ensure_directory(str(out.parent))
        df = pd.DataFrame(
            [{column: getattr(r, column) for column in CSV_HEADER} for r in report.records],
            columns=CSV_HEADER,
        )
        df.to_csv(out, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
        logger.info(f"Wrote {len(df)} CSV rows to {out}")
