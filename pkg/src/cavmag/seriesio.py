"""Deterministic CSV and JSON serialization of tables, records and reports.

CSV files always carry a header row, use '.' as the decimal separator and
write floats with 17 significant digits, so a float64 survives a
round trip bit for bit and reruns of a command produce byte-identical
files.  Time series get a JSON sidecar with the sample rate, seed and a
full configuration echo instead of any binary container.
"""

import csv
import json
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from .config import ConfigError
from .lockin import TimeSeries


def format_float(value: float) -> str:
    return f"{value:.17g}"


def write_table(path: Path, columns: Dict[str, np.ndarray]) -> None:
    """Write named columns as CSV with a mandatory header row."""
    names = list(columns)
    if not names:
        raise ValueError("at least one column is required")
    arrays = [np.asarray(columns[name]) for name in names]
    length = arrays[0].size
    if any(a.size != length for a in arrays):
        raise ValueError("all columns must have the same length")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*arrays):
            writer.writerow([format_float(float(v)) for v in row])


def write_table_json(path: Path, columns: Dict[str, np.ndarray]) -> None:
    """Write named columns as a JSON object of arrays."""
    payload = {name: [float(v) for v in np.asarray(col)] for name, col in columns.items()}
    write_report(path, {"columns": payload})


def read_table(path: Path) -> Dict[str, np.ndarray]:
    """Read a headered CSV into named float columns.

    Raises ConfigError on a missing file or a file without a usable
    header, so CLI callers map it to the schema-error exit code.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"input file '{path}' not found")
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"input file '{path}' is empty") from None
        rows = list(reader)
    if not header or any(not name.strip() for name in header):
        raise ConfigError(f"input file '{path}' lacks a valid header row")
    try:
        data = [[float(cell) for cell in row] for row in rows if row]
    except ValueError as error:
        raise ConfigError(f"non-numeric cell in '{path}': {error}") from error
    if any(len(row) != len(header) for row in data):
        raise ConfigError(f"ragged rows in '{path}'")
    table = np.asarray(data, dtype=float).reshape(len(data), len(header))
    return {name: table[:, index] for index, name in enumerate(header)}


def require_columns(table: Dict[str, np.ndarray], names: tuple, path: Path) -> None:
    missing = [name for name in names if name not in table]
    if missing:
        raise ConfigError(f"input file '{path}' lacks required columns {missing}")


def write_report(path: Path, payload: dict) -> None:
    """Write a JSON report with sorted keys and a trailing newline."""
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def sidecar_path(path: Path) -> Path:
    path = Path(path)
    return path.parent / (path.stem + "_meta.json")


def write_timeseries(
    path: Path,
    series: TimeSeries,
    meta: Optional[dict] = None,
    table_format: str = "csv",
) -> None:
    """Write a record as a (time_s, value) table plus a JSON header sidecar."""
    path = Path(path)
    columns = {"time_s": series.times(), "value": series.samples}
    if table_format == "csv":
        write_table(path, columns)
    elif table_format == "json":
        write_table_json(path, columns)
    else:
        raise ValueError("table format must be 'csv' or 'json'")
    sidecar = {
        "sample_rate_hz": series.sample_rate_hz,
        "start_time_s": series.start_time_s,
        "n_samples": int(series.samples.size),
    }
    if meta:
        sidecar.update(meta)
    write_report(sidecar_path(path), sidecar)


def read_timeseries(path: Path) -> TimeSeries:
    """Read a (time_s, value) CSV back into a record.

    Uses the JSON sidecar for the exact sample rate when present and falls
    back to the median time step otherwise.
    """
    path = Path(path)
    table = read_table(path)
    require_columns(table, ("time_s", "value"), path)
    times = table["time_s"]
    if times.size < 2:
        raise ConfigError(f"time series in '{path}' needs at least two samples")
    sidecar = sidecar_path(path)
    if sidecar.exists():
        header = json.loads(sidecar.read_text())
        rate = float(header["sample_rate_hz"])
        start = float(header.get("start_time_s", times[0]))
    else:
        rate = 1.0 / float(np.median(np.diff(times)))
        start = float(times[0])
    return TimeSeries(sample_rate_hz=rate, samples=table["value"], start_time_s=start)
