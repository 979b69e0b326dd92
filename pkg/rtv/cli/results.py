"""
RTV Results

CSV writer for experiment rows: exact header, 9 significant digits, canonical order.
"""
import logging
import sys
from typing import Sequence, Type, Union

import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)

STDOUT = "-"


def rows_to_frame(rows: Sequence[BaseModel], row_type: Type[BaseModel]) -> pd.DataFrame:
    """DataFrame holding exactly the CSV columns of `row_type`, in order."""
    columns = list(row_type.CSV_COLUMNS)
    return pd.DataFrame([row.model_dump(include=set(columns)) for row in rows], columns=columns)


def write_rows(rows: Sequence[BaseModel], row_type: Type[BaseModel], out: Union[str, None] = STDOUT) -> None:
    """Write rows as CSV to `out`, or to standard output when `out` is "-"."""
    frame = rows_to_frame(rows, row_type)
    target = sys.stdout if out in (None, STDOUT) else out
    frame.to_csv(target, index=False, float_format="%.9g", na_rep="nan", lineterminator="\n")
    if target is not sys.stdout:
        logger.info(f"Wrote {len(frame)} rows to {out}")
