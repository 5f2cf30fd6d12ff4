"""Sampled probability densities and their on-disk formats.

A Pattern is a 1D or 2D array of density values over explicit axes, plus the
metadata needed to interpret it (which fixed-detector position produced a
slice, what averaging window a bucket used).  The CSV and binary formats here
are the interchange formats of the command-line tool; they are deterministic:
identical patterns serialize to identical bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import ConfigError

__all__ = [
    "Pattern",
    "write_pattern_csv",
    "read_pattern_csv",
    "write_density_binary",
    "read_density_binary",
    "BINARY_MAGIC",
]

BINARY_MAGIC = b"GSIM2D01"

_FMT = "%.17g"


@dataclass(frozen=True)
class Pattern:
    """Density samples over one or two axes (all lengths in meters)."""

    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    label: str = ""
    y1_fixed: float | None = None
    window: float | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "notes", tuple(self.notes))
        if self.values.shape != tuple(len(a) for a in axes):
            raise ValueError("values shape does not match axes")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def axis(self) -> np.ndarray:
        if self.ndim != 1:
            raise ValueError("axis is only defined for 1D patterns")
        return self.axes[0]

    @property
    def step(self) -> float:
        ax = self.axis
        return float(ax[1] - ax[0]) if len(ax) > 1 else 0.0

    def mass(self) -> float:
        """Trapezoid integral over all axes."""
        m = self.values
        for i in range(self.ndim - 1, -1, -1):
            m = trapezoid(m, self.axes[i], axis=i)
        return float(m)


def _header_lines(p: Pattern) -> list[str]:
    lines = [f"# label: {p.label}"]
    if p.y1_fixed is not None:
        lines.append(f"# y1_fixed: {_FMT % p.y1_fixed}")
    if p.window is not None:
        lines.append(f"# window: {_FMT % p.window}")
    for note in p.notes:
        lines.append(f"# note: {note}")
    return lines


def write_pattern_csv(path, p: Pattern) -> None:
    """1D pattern: '# key: value' header lines, then 'y,value' rows, LF endings."""
    if p.ndim != 1:
        raise ValueError("CSV pattern format is 1D; use the 2D density formats")
    rows = [f"{_FMT % y},{_FMT % v}" for y, v in zip(p.axis, p.values)]
    text = "\n".join(_header_lines(p) + ["y,value"] + rows) + "\n"
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(text)


def read_pattern_csv(path) -> Pattern:
    label = ""
    y1_fixed: float | None = None
    window: float | None = None
    notes: list[str] = []
    ys: list[float] = []
    vs: list[float] = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, _, val = body.partition(":")
                key = key.strip()
                val = val.strip()
                if key == "label":
                    label = val
                elif key == "y1_fixed":
                    y1_fixed = float(val)
                elif key == "window":
                    window = float(val)
                elif key == "note":
                    notes.append(val)
                continue
            if line == "y,value":
                continue
            a, _, b = line.partition(",")
            try:
                ys.append(float(a))
                vs.append(float(b))
            except ValueError as exc:
                raise ConfigError(f"{path}: malformed CSV row {line!r}") from exc
    if not ys:
        raise ConfigError(f"{path}: no data rows")
    return Pattern(
        (np.array(ys),), np.array(vs), label=label, y1_fixed=y1_fixed,
        window=window, notes=tuple(notes),
    )


def write_density_binary(path, p: Pattern) -> None:
    """2D density: magic, int64 n1 n2, float64 axis extents, row-major float64.

    Layout (all little-endian):
      bytes 0..7    magic b"GSIM2D01"
      int64         n1, n2
      float64       y1_min, y1_max, y2_min, y2_max
      float64 * n1*n2   values, row-major (y1 index slow, y2 index fast)
    """
    if p.ndim != 2:
        raise ValueError("binary density format is 2D")
    y1, y2 = p.axes
    header = BINARY_MAGIC + struct.pack(
        "<qq4d", len(y1), len(y2), y1[0], y1[-1], y2[0], y2[-1]
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(p.values, dtype="<f8").tobytes())


def read_density_binary(path) -> Pattern:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != BINARY_MAGIC:
            raise ConfigError(f"{path}: not a density file (bad magic {magic!r})")
        n1, n2, y1min, y1max, y2min, y2max = struct.unpack("<qq4d", fh.read(48))
        data = np.frombuffer(fh.read(8 * n1 * n2), dtype="<f8")
    if data.size != n1 * n2:
        raise ConfigError(f"{path}: truncated density file")
    return Pattern(
        (np.linspace(y1min, y1max, n1), np.linspace(y2min, y2max, n2)),
        data.reshape(n1, n2).copy(),
        label="density2d",
    )
