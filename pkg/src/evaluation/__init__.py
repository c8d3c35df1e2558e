"""
Evaluation of trained models against oracle labels.
"""
from .metrics import EvalReport, StepRecord, confusion_matrix, evaluate
from .report import CSV_HEADER, write_report

__all__ = [
    "EvalReport",
    "StepRecord",
    "confusion_matrix",
    "evaluate",
    "CSV_HEADER",
    "write_report",
]
