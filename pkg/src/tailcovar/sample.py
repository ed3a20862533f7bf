"""Paired loss samples and their CSV wire format."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tailcovar.errors import BadSpec, NonFiniteData, TooShort
from tailcovar.serialize import format_float

__all__ = ["PairedSample", "load_sample_csv", "write_sample_csv"]


@dataclass(frozen=True)
class PairedSample:
    """``n`` paired loss observations ``(x_i, y_i)``.

    ``x`` is the conditioning institution's loss, ``y`` the system loss.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64).ravel()
        y = np.asarray(self.y, dtype=np.float64).ravel()
        if x.shape != y.shape:
            raise BadSpec(f"margin lengths differ: {x.shape[0]} vs {y.shape[0]}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]


def load_sample_csv(path) -> PairedSample:
    """Read a two-column ``x,y`` CSV written by :func:`write_sample_csv`.

    Raises:
        BadSpec: missing/garbled header or wrong column count.
        TooShort: no data rows.
        NonFiniteData: non-finite values.
    """
    with open(path, "r") as fh:
        header = fh.readline().strip()
        if [c.strip() for c in header.split(",")] != ["x", "y"]:
            raise BadSpec(f"expected header 'x,y', got {header!r}")
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise BadSpec(f"unparseable CSV body: {exc}") from exc
    if data.size == 0:
        raise TooShort("CSV contains no data rows")
    if data.shape[1] != 2:
        raise BadSpec(f"expected 2 columns, got {data.shape[1]}")
    if not np.all(np.isfinite(data)):
        raise NonFiniteData("CSV contains NaN or infinite values")
    return PairedSample(x=data[:, 0], y=data[:, 1])


def write_sample_csv(path, sample: PairedSample) -> None:
    """Write the sample as ``x,y`` CSV with round-trip-exact floats."""
    with open(path, "w", newline="\n") as fh:
        fh.write("x,y\n")
        for xi, yi in zip(sample.x, sample.y):
            fh.write(f"{format_float(xi)},{format_float(yi)}\n")
