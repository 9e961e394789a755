from .data import (
    CaptionRecord,
    DataFormatError,
    LENGTH_BOUNDARIES,
    LengthBuckets,
    LoadResult,
    generate_synthetic_dataset,
    load_dataset,
    split_by_length,
    write_dataset,
)
from .evaluation import (
    ABLATION_GRID,
    AblationReport,
    COLUMN_SCHEMA,
    EvalReport,
    REFERENCE_ROW,
    ablate,
    evaluate,
    evaluate_model,
    format_report,
    report_lines,
)
from .optim import AdamW
from .training import DivergenceError, TrainResult, build_corpus, build_model, train

__all__ = [
    "CaptionRecord", "DataFormatError", "LENGTH_BOUNDARIES", "LengthBuckets", "LoadResult",
    "generate_synthetic_dataset", "load_dataset", "split_by_length", "write_dataset",
    "ABLATION_GRID", "AblationReport", "COLUMN_SCHEMA", "EvalReport", "REFERENCE_ROW",
    "ablate", "evaluate", "evaluate_model", "format_report", "report_lines",
    "AdamW", "DivergenceError", "TrainResult", "build_corpus", "build_model", "train",
]
