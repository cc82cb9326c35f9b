"""Molecular-absorption coefficient providers.

The absorption coefficient kappa(f, T, p, RH) is treated as data: either a
single constant or a gridded table with multilinear interpolation.  Table
files are CSV with the exact header

    freq_hz,temp_k,pressure_pa,rel_humidity,kappa_per_m

whose rows form a full rectangular grid over the four axes (validated on
load).  Lines starting with '#' are comments; the bundled sample table is
marked synthetic there.  No extrapolation: queries outside the grid hull
raise ValueError.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Protocol

import numpy as np

from .errors import TableFormatError

if TYPE_CHECKING:
    from .channel import Environment

__all__ = [
    "AbsorptionProvider",
    "ConstantAbsorption",
    "TableAbsorption",
    "kappa_lookup",
    "bundled_table_path",
]

_HEADER = ("freq_hz", "temp_k", "pressure_pa", "rel_humidity", "kappa_per_m")


class AbsorptionProvider(Protocol):
    backend: str

    def kappa(self, freq_hz: float, env: "Environment") -> float: ...


@dataclass(frozen=True)
class ConstantAbsorption:
    """Fixed absorption coefficient, independent of frequency and weather."""

    kappa_per_m: float
    backend: str = "constant"

    def __post_init__(self):
        if self.kappa_per_m < 0.0 or not math.isfinite(self.kappa_per_m):
            raise ValueError("ConstantAbsorption.kappa_per_m must be finite and >= 0")

    def kappa(self, freq_hz: float, env: "Environment") -> float:
        return self.kappa_per_m


class TableAbsorption:
    """Gridded kappa(f, T, p, RH) with multilinear interpolation."""

    backend = "table"

    def __init__(self, axes: tuple[np.ndarray, ...], values: np.ndarray, source: str = "<memory>"):
        self.axes = axes
        self.values = values
        self.source = source

    @classmethod
    def from_csv(cls, path: str | Path) -> "TableAbsorption":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot read absorption table {path}: {exc}") from exc

        rows: list[tuple[float, ...]] = []
        header_seen = False
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                cols = tuple(c.strip() for c in line.split(","))
                if cols != _HEADER:
                    raise TableFormatError(
                        f"header must be {','.join(_HEADER)!r}, got {line!r}", line=lineno
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise TableFormatError(f"expected 5 columns, got {len(parts)}", line=lineno)
            try:
                vals = tuple(float(p) for p in parts)
            except ValueError:
                raise TableFormatError(f"non-numeric value in {line!r}", line=lineno) from None
            if not all(math.isfinite(v) for v in vals):
                raise TableFormatError("non-finite value", line=lineno)
            if vals[4] < 0.0:
                raise TableFormatError("kappa_per_m must be >= 0", line=lineno)
            rows.append(vals)
        if not header_seen:
            raise TableFormatError("missing header row")
        if not rows:
            raise TableFormatError("table has no data rows")

        data = np.array(rows, dtype=float)
        axes = tuple(np.unique(data[:, k]) for k in range(4))
        shape = tuple(len(ax) for ax in axes)
        expected = int(np.prod(shape))
        if len(rows) != expected:
            raise TableFormatError(
                f"rows do not form a full rectangular grid: got {len(rows)} rows, "
                f"grid of {shape} needs {expected}"
            )
        values = np.full(shape, np.nan)
        for row in data:
            idx = tuple(int(np.searchsorted(axes[k], row[k])) for k in range(4))
            if not np.isnan(values[idx]):
                raise TableFormatError(
                    f"duplicate grid node at freq={row[0]:g}, T={row[1]:g}, "
                    f"p={row[2]:g}, RH={row[3]:g}"
                )
            values[idx] = row[4]
        if np.any(np.isnan(values)):
            raise TableFormatError("grid is rectangular in counts but has missing nodes")
        return cls(axes=axes, values=values, source=str(path))

    def kappa(self, freq_hz: float, env: "Environment") -> float:
        query = (freq_hz, env.temp_k, env.pressure_pa, env.rel_humidity)
        block = self.values
        # Reduce one axis at a time: block becomes the linear blend of its
        # two bracketing slices along the leading remaining axis.
        for k, (axis, q) in enumerate(zip(self.axes, query)):
            if q < axis[0] or q > axis[-1]:
                raise ValueError(
                    f"absorption query {_HEADER[k]}={q:g} outside table hull "
                    f"[{axis[0]:g}, {axis[-1]:g}] ({self.source})"
                )
            if len(axis) == 1:
                block = block[0]
                continue
            j = int(np.searchsorted(axis, q))
            if j == 0 or axis[j] == q:
                block = block[j]
                continue
            w = (q - axis[j - 1]) / (axis[j] - axis[j - 1])
            block = (1.0 - w) * block[j - 1] + w * block[j]
        return float(block)


def kappa_lookup(provider: AbsorptionProvider, freq_hz: float, env: "Environment") -> float:
    """Absorption coefficient in 1/m for the given provider and conditions."""
    return provider.kappa(freq_hz, env)


def bundled_table_path() -> Path:
    """Path of the synthetic sample table shipped with the package."""
    return Path(resources.files("thzlink").joinpath("data/sample_absorption.csv"))
