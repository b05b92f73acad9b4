"""CSV / JSON emission of result records and the matching reader."""
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable
import pandas as pd

from schema import OutputFormat, ResultRecord

FLOAT_FORMAT = "%.12g"


def _columns(records: list[ResultRecord]) -> list[str]:
    columns: list[str] = []
    for record in records:
        columns.extend(key for key in record.fields if key not in columns)
    return columns


def render(records: Iterable[ResultRecord], fmt: OutputFormat = OutputFormat.CSV) -> str:
    """Serialize records: CSV with a header row (union of keys, first-seen order) or a JSON array of objects."""
    records = list(records)
    if fmt == OutputFormat.JSON:
        return json.dumps([record.fields for record in records], indent=2) + "\n"
    frame = pd.DataFrame([record.fields for record in records], columns=_columns(records))
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_records(records: Iterable[ResultRecord], fmt: OutputFormat = OutputFormat.CSV, path: str | None = None) -> str:
    """Write rendered records to `path` (UTF-8) and return the text; without a path the text is only returned."""
    text = render(records, fmt)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _python_value(value: Any) -> Any:
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def parse_records(text: str, fmt: OutputFormat = OutputFormat.CSV) -> list[ResultRecord]:
    if fmt == OutputFormat.JSON:
        return [ResultRecord(fields=row) for row in json.loads(text)]
    frame = pd.read_csv(io.StringIO(text), float_precision="round_trip", keep_default_na=True)
    rows = frame.to_dict(orient="records")
    return [ResultRecord(fields={key: _python_value(value) for key, value in row.items()}) for row in rows]


def read_records(path: str, fmt: OutputFormat | None = None) -> list[ResultRecord]:
    """Read a file written by `write_records`; the format follows the suffix unless given."""
    if fmt is None:
        fmt = OutputFormat.JSON if path.endswith(".json") else OutputFormat.CSV
    return parse_records(Path(path).read_text(encoding="utf-8"), fmt)
