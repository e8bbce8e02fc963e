"""RR-interval file parsing, tachogram construction and uniform resampling.

The raw input is an ordered series of RR intervals in milliseconds. Beat k
occurs at the cumulative sum of intervals 1..k (seconds); plotting interval
values against beat times gives the irregularly sampled tachogram. Frequency
analysis needs a uniform sampling grid, so the tachogram is interpolated with
a natural cubic spline and sampled at a fixed rate (4 Hz by default).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "Group",
    "RRSeries",
    "UniformSignal",
    "RRParseError",
    "parse_rr_file",
    "detect_format",
    "rr_to_tachogram",
    "resample_cubic_spline",
    "truncate_to_block",
]

RR_FORMATS = ("one-column-ms", "two-column-time-ms")


class Group(Enum):
    """Subject group label."""

    CONTROL = "Control"
    VT = "VT"
    VF = "VF"
    UNLABELED = "Unlabeled"

    @classmethod
    def from_string(cls, text: str) -> "Group":
        key = text.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(
            f"unknown group {text!r}; expected one of "
            f"{[m.value for m in cls]}"
        )


class RRParseError(ValueError):
    """Malformed token in an RR-interval file; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, eq=False)
class RRSeries:
    """Ordered RR intervals (ms) for one recording."""

    intervals_ms: np.ndarray
    subject_id: str = ""
    group: Group = Group.UNLABELED

    def __post_init__(self):
        arr = np.asarray(self.intervals_ms, dtype=float)
        object.__setattr__(self, "intervals_ms", arr)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("RR series needs at least 2 intervals")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise ValueError("RR intervals must be finite and positive")

    def __len__(self) -> int:
        return int(self.intervals_ms.size)


@dataclass(frozen=True, eq=False)
class UniformSignal:
    """Evenly sampled tachogram: RR value in ms on a fixed-rate grid."""

    samples: np.ndarray
    rate_hz: float
    t0_s: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", arr)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("uniform signal needs at least 2 samples")
        if not self.rate_hz > 0.0:
            raise ValueError("sampling rate must be positive")

    def __len__(self) -> int:
        return int(self.samples.size)


def _data_lines(text: str):
    """Yield (line_number, stripped_line) skipping blanks and '#' comments."""
    for num, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield num, line


def detect_format(text: str | bytes) -> str:
    """Guess the RR file format from the first data line's column count."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for _, line in _data_lines(text):
        return "two-column-time-ms" if len(line.split()) >= 2 else "one-column-ms"
    return "one-column-ms"


def parse_rr_file(
    text: str | bytes,
    fmt: str = "one-column-ms",
    subject_id: str = "",
    group: Group = Group.UNLABELED,
) -> RRSeries:
    """Parse an RR-interval text file into an RRSeries.

    Two formats are accepted: one RR interval (ms) per line, or two
    whitespace-separated columns (beat time, RR in ms) where only the second
    column is kept. Blank lines and lines starting with '#' are skipped.
    Input order is preserved.
    """
    if fmt not in RR_FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {RR_FORMATS}")
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    col = 0 if fmt == "one-column-ms" else 1
    values = []
    for num, line in _data_lines(text):
        tokens = line.split()
        if len(tokens) <= col:
            raise RRParseError(f"expected {col + 1} columns, got {len(tokens)}", num)
        try:
            value = float(tokens[col])
        except ValueError:
            raise RRParseError(f"non-numeric token {tokens[col]!r}", num) from None
        values.append(value)

    if len(values) < 2:
        raise ValueError(f"need at least 2 RR intervals, got {len(values)}")
    arr = np.asarray(values, dtype=float)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr) | (arr <= 0.0))[0])
        raise ValueError(f"non-positive RR interval at position {bad + 1}: {arr[bad]}")
    return RRSeries(intervals_ms=arr, subject_id=subject_id, group=group)


def rr_to_tachogram(series: RRSeries) -> tuple[np.ndarray, np.ndarray]:
    """Return (beat_times_s, rr_values_ms): beat k at cumsum(intervals)/1000."""
    times = np.cumsum(series.intervals_ms) / 1000.0
    return times, series.intervals_ms.copy()


def resample_cubic_spline(
    times_s: np.ndarray, values: np.ndarray, rate_hz: float
) -> UniformSignal:
    """Resample irregular (time, value) points to a uniform grid.

    Fits a natural cubic spline (zero second derivative at both ends) through
    all points and evaluates it at t0, t0 + 1/rate, ... up to the last knot.
    No extrapolation: the output ends at the last input time.
    """
    t = np.asarray(times_s, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.size != v.size:
        raise ValueError("times and values must be 1-d arrays of equal length")
    if t.size < 2:
        raise ValueError("need at least 2 points to resample")
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("times must be strictly increasing")
    if not rate_hz > 0.0:
        raise ValueError("sampling rate must be positive")

    span = t[-1] - t[0]
    # epsilon keeps an exactly-aligned final knot on the grid
    count = int(np.floor(span * rate_hz + 1e-9)) + 1
    if count < 2:
        raise ValueError(
            f"rate {rate_hz} Hz yields {count} sample(s) over a {span:.3f} s span"
        )
    spline = CubicSpline(t, v, bc_type="natural")
    grid = t[0] + np.arange(count) / rate_hz
    return UniformSignal(samples=spline(grid), rate_hz=rate_hz, t0_s=float(t[0]))


def truncate_to_block(signal: UniformSignal, depth: int) -> UniformSignal:
    """Truncate to the largest multiple of 2**depth samples (tail dropped).

    Truncation rather than zero padding: an artificial step edge would show
    up as spurious significant coefficients after thresholding.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    block = 2 ** depth
    keep = (len(signal) // block) * block
    if keep < block or keep < 2:
        raise ValueError(
            f"signal of {len(signal)} samples too short for depth {depth} "
            f"(needs at least {max(block, 2)})"
        )
    if keep == len(signal):
        return signal
    return UniformSignal(
        samples=signal.samples[:keep], rate_hz=signal.rate_hz, t0_s=signal.t0_s
    )
