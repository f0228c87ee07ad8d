"""Run reports and the on-disk formats.

Every command writes one JSON report plus zero or more CSV files into the
output directory. The JSON carries the command name, the sha256 of the
config file that produced it, the payload, and a provenance block with
library versions and wall time. Reports are byte-reproducible across
identical runs except for the wall-time entry: keys are sorted and floats
go through repr.

CSV files have a single machine-readable header line (exact column names
are part of the interface: ``epsilon,re_E,im_E,residual`` for scans,
``re,im`` for spectrum clouds, ``x,y,z`` for surfaces, ``x,V`` for
potentials) and every file gets a ``<name>.columns.txt`` sidecar that
documents each column and repeats the config hash, so a directory of
artifacts can be checked for consistency later.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import ConfigError


@dataclass(frozen=True, eq=False)
class Report:
    command: str
    config_hash: str
    payload: dict
    provenance: dict


def make_report(command, config_hash, payload, wall_time_s):
    provenance = {
        "package": "twistres",
        "package_version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "wall_time_s": round(float(wall_time_s), 3),
    }
    return Report(command=command, config_hash=config_hash,
                  payload=payload, provenance=provenance)


def write_report(report, out_dir, name=None):
    """Write <command>.json (or a custom name); returns the path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name or report.command}.json"
    doc = {"command": report.command, "config_hash": report.config_hash,
           "payload": report.payload, "provenance": report.provenance}
    path.write_text(json.dumps(doc, sort_keys=True, indent=2,
                               allow_nan=True) + "\n")
    return path


def read_report(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read report {path}: {err}") from err
    for key in ("command", "config_hash", "payload", "provenance"):
        if key not in doc:
            raise ConfigError(f"report {path} is missing '{key}'")
    return doc


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def write_csv(out_dir, name, columns, rows, config_hash):
    """Write name.csv plus its documenting sidecar.

    columns: list of (column_name, description). rows: iterables matching
    the column order; floats are written with 12 significant digits.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.csv"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([c for c, _ in columns])
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue())

    side = out_dir / f"{name}.columns.txt"
    lines = [f"file: {name}.csv", f"config_hash: {config_hash}"]
    for col, desc in columns:
        lines.append(f"column {col}: {desc}")
    side.write_text("\n".join(lines) + "\n")
    return path


def read_csv_sidecar(path):
    """Parse a .columns.txt sidecar into (file, config_hash, columns)."""
    path = Path(path)
    fname = chash = None
    cols = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if line.startswith("file:"):
            fname = line.split(":", 1)[1].strip()
        elif line.startswith("config_hash:"):
            chash = line.split(":", 1)[1].strip()
        elif line.startswith("column "):
            head = line.split(":", 1)[0]
            cols.append(head[len("column "):].strip())
    if fname is None or chash is None:
        raise ConfigError(f"sidecar {path} lacks file/config_hash lines")
    return fname, chash, cols


def _read_table(path, expected_prefix):
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ConfigError(f"{path} is empty")
            header = [h.strip() for h in header]
            if header[:len(expected_prefix)] != list(expected_prefix):
                raise ConfigError(
                    f"{path} must start with columns {','.join(expected_prefix)}; "
                    f"got {','.join(header)}")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    rows.append([float(v) for v in row])
                except ValueError as err:
                    raise ConfigError(f"{path}:{lineno}: {err}") from err
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    if not rows:
        raise ConfigError(f"{path} has no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() != len(header):
        raise ConfigError(f"{path}: ragged rows")
    return header, np.asarray(rows, dtype=float)


def read_potential_csv(path):
    """Sampled potential: header x,V and strictly increasing x."""
    _, data = _read_table(path, ("x", "V"))
    return data[:, 0], data[:, 1]


def read_twist_csv(path):
    """Sampled twist: header x,alpha_dot with optional alpha_ddot."""
    header, data = _read_table(path, ("x", "alpha_dot"))
    add = data[:, 2] if len(header) > 2 and header[2] == "alpha_ddot" else None
    return data[:, 0], data[:, 1], add


def timer():
    return time.perf_counter()
