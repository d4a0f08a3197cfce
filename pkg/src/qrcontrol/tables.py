"""Long-format CSV serialization of structural-function tables.

Columns are ``x,index,value,lo,hi,kind``; the index column is empty for
the average structural function and the band columns are empty when no
bands were computed.  Leading ``#`` lines form a self-describing header.
Floats are written with shortest round-trip representation so a parsed
file reproduces the tabulated estimate exactly.
"""

import csv
import os

import numpy as np

from .exceptions import DataError
from .structural import StructuralFunctionEstimate

_COLUMNS = ("x", "index", "value", "lo", "hi", "kind")


def _fmt(value):
    if value is None:
        return ""
    return repr(float(value))


def write_tables(estimates, path, header=()):
    """Write estimates as one long-format CSV with a commented header.

    The file appears under a ``.partial`` suffix until fully written.
    """
    partial = f"{path}.partial"
    with open(partial, "w", newline="") as handle:
        for line in header:
            handle.write(f"# {line}\n")
        writer = csv.writer(handle)
        writer.writerow(_COLUMNS)
        for estimate in estimates:
            for x, index, value, lo, hi, kind in estimate.rows():
                writer.writerow(
                    [_fmt(x), _fmt(index), _fmt(value), _fmt(lo), _fmt(hi), kind]
                )
    os.replace(partial, path)


def read_tables(path):
    """Parse a tables CSV back into StructuralFunctionEstimate objects.

    Returns (estimates, header_lines); estimates preserve the written
    grids and values exactly.
    """
    header_lines = []
    records = []
    with open(path, newline="") as handle:
        rows = []
        for line in handle:
            if line.startswith("#"):
                header_lines.append(line[1:].strip())
            else:
                rows.append(line)
        reader = csv.reader(rows)
        try:
            columns = next(reader)
        except StopIteration:
            raise DataError("tables file is empty") from None
        if tuple(c.strip() for c in columns) != _COLUMNS:
            raise DataError(
                f"expected columns {','.join(_COLUMNS)!r}, got {','.join(columns)!r}"
            )
        for number, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(_COLUMNS):
                raise DataError(
                    f"expected {len(_COLUMNS)} fields, got {len(record)}", row=number
                )
            records.append(record)

    by_kind = {}
    for record in records:
        x, index, value, lo, hi, kind = (f.strip() for f in record)
        entry = by_kind.setdefault(
            kind, {"x": [], "index": [], "value": [], "lo": [], "hi": []}
        )
        entry["x"].append(float(x))
        entry["index"].append(float(index) if index else None)
        entry["value"].append(float(value))
        entry["lo"].append(float(lo) if lo else None)
        entry["hi"].append(float(hi) if hi else None)

    estimates = []
    for kind, entry in by_kind.items():
        x_grid = list(dict.fromkeys(entry["x"]))
        raw_index = entry["index"]
        has_index = any(i is not None for i in raw_index)
        if has_index:
            index_grid = list(dict.fromkeys(i for i in raw_index if i is not None))
        else:
            index_grid = []
        n_x = len(x_grid)
        n_i = max(len(index_grid), 1)
        values = np.full((n_i, n_x), np.nan)
        lower = np.full((n_i, n_x), np.nan)
        upper = np.full((n_i, n_x), np.nan)
        x_pos = {x: j for j, x in enumerate(x_grid)}
        i_pos = {i: k for k, i in enumerate(index_grid)}
        has_bands = any(lo is not None for lo in entry["lo"])
        for x, index, value, lo, hi in zip(
            entry["x"], raw_index, entry["value"], entry["lo"], entry["hi"]
        ):
            i = i_pos[index] if has_index else 0
            j = x_pos[x]
            values[i, j] = value
            if lo is not None:
                lower[i, j] = lo
                upper[i, j] = hi
        if not has_index:
            values = values[0]
            lower = lower[0]
            upper = upper[0]
        estimates.append(
            StructuralFunctionEstimate(
                kind=kind,
                x_grid=np.asarray(x_grid, dtype=float),
                index_grid=np.asarray(index_grid, dtype=float),
                values=values,
                lower=lower if has_bands else None,
                upper=upper if has_bands else None,
            )
        )
    return estimates, header_lines
