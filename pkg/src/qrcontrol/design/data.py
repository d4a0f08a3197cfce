"""Observed samples and their CSV representation.

The on-disk format is a plain CSV with header ``y,x,z,z1``, decimal
points and no thousands separators.  Rows with blank or non-numeric
fields are rejected with their 1-based row number.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .._validation import check_binary, check_vector
from ..exceptions import DataError

_COLUMNS = ("y", "x", "z", "z1")


@dataclass(frozen=True)
class Dataset:
    """An observed sample (outcome, treatment, instrument, binary covariate)."""

    y: np.ndarray
    x: np.ndarray
    z: np.ndarray
    z1: np.ndarray

    def __post_init__(self):
        y = check_vector(self.y, "y")
        n = y.shape[0]
        x = check_vector(self.x, "x", n=n)
        z = check_vector(self.z, "z", n=n)
        z1 = check_binary(self.z1, "z1") if np.size(self.z1) else np.zeros(n)
        if z1.shape[0] != n:
            raise DataError(f"z1 has length {z1.shape[0]}, expected {n}")
        for arr in (y, x, z, z1):
            arr.flags.writeable = False
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "z1", z1)

    @property
    def n(self):
        return self.y.shape[0]

    def replace(self, **columns):
        fields = {name: getattr(self, name) for name in _COLUMNS}
        fields.update(columns)
        return Dataset(**fields)


def read_dataset_csv(path):
    """Load a dataset, raising DataError with the offending row number."""
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("file is empty") from None
        header = [h.strip() for h in header]
        if header != list(_COLUMNS):
            raise DataError(
                f"expected header {','.join(_COLUMNS)!r}, got {','.join(header)!r}",
                row=1,
            )
        for number, record in enumerate(reader, start=2):
            if not record or all(f.strip() == "" for f in record):
                continue  # ignore fully blank lines
            if len(record) != len(_COLUMNS):
                raise DataError(
                    f"expected {len(_COLUMNS)} fields, got {len(record)}", row=number
                )
            values = []
            for name, fieldval in zip(_COLUMNS, record):
                text = fieldval.strip()
                if text == "":
                    raise DataError(f"blank field {name!r}", row=number)
                try:
                    values.append(float(text))
                except ValueError:
                    raise DataError(
                        f"field {name!r} is not numeric: {text!r}", row=number
                    ) from None
            rows.append(values)
    if not rows:
        raise DataError("file contains no data rows")
    arr = np.asarray(rows, dtype=float)
    try:
        return Dataset(y=arr[:, 0], x=arr[:, 1], z=arr[:, 2], z1=arr[:, 3])
    except Exception as err:
        raise DataError(str(err)) from err


def write_dataset_csv(dataset, path):
    """Write a dataset in the canonical column order."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_COLUMNS)
        for row in zip(dataset.y, dataset.x, dataset.z, dataset.z1):
            writer.writerow([repr(float(v)) for v in row])
