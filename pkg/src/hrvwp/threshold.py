"""Adaptive per-band threshold and background/significant coefficient split.

Band coefficients are partitioned by magnitude against lambda = h * sqrt(2 ln N),
where h = MAD / 0.6745 is a robust noise scale and N is the band length.
Coefficients at or below lambda form the diffuse "background variability"
component; those above it are the significant changes. Values are kept as-is
on both sides (this separates, it does not shrink or denoise).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

__all__ = [
    "BandSplit",
    "mad",
    "noise_scale",
    "compute_threshold",
    "split_coefficients",
    "threshold_band",
    "MAD_NORMAL_CONSISTENCY",
]

# quartile constant for MAD of Gaussian data
MAD_NORMAL_CONSISTENCY = 0.6745


@dataclass(frozen=True, eq=False)
class BandSplit:
    """One band's coefficients partitioned at threshold lam.

    background holds every coefficient with |c| <= lam, significant the rest,
    both in original band order. source_index maps each original position to
    its (leaf_node, offset); significant_mask marks the significant positions.
    """

    band: str
    lam: float
    h: float
    n: int
    background: np.ndarray
    significant: np.ndarray
    significant_mask: np.ndarray
    source_index: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if self.lam < 0.0:
            raise ValueError("threshold must be non-negative")
        if len(self.background) + len(self.significant) != self.n:
            raise ValueError("component sizes must sum to the band length")
        if self.source_index is not None and len(self.source_index) != self.n:
            raise ValueError("source_index length must match the band length")
        if np.any(np.abs(self.background) > self.lam):
            raise ValueError("background holds a coefficient above the threshold")
        if np.any(np.abs(self.significant) <= self.lam):
            raise ValueError("significant holds a coefficient at or below the threshold")

    @property
    def n_background(self) -> int:
        return int(len(self.background))

    @property
    def n_significant(self) -> int:
        return int(len(self.significant))

    @property
    def energy_background(self) -> float:
        return float(np.dot(self.background, self.background))

    @property
    def energy_significant(self) -> float:
        return float(np.dot(self.significant, self.significant))

    def coefficient_records(self) -> list[tuple[int, int, float, str]]:
        """Rows (node, offset, coefficient, component) in original band order."""
        if self.source_index is None:
            raise ValueError("band split carries no source index")
        values = np.empty(self.n)
        values[~self.significant_mask] = self.background
        values[self.significant_mask] = self.significant
        return [
            (node, offset, float(values[i]),
             "significant" if self.significant_mask[i] else "background")
            for i, (node, offset) in enumerate(self.source_index)
        ]


def mad(values: np.ndarray) -> float:
    """Median absolute deviation from the median.

    Even-length medians are the mean of the two middle order statistics.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("mad of an empty vector is undefined")
    return float(np.median(np.abs(v - np.median(v))))


def noise_scale(coeffs: np.ndarray) -> float:
    """Robust noise scale h = MAD / 0.6745 (unbiased for Gaussian data)."""
    return mad(coeffs) / MAD_NORMAL_CONSISTENCY


def compute_threshold(coeffs: np.ndarray) -> tuple[float, float, int]:
    """Return (lambda, h, n) for a band's coefficient vector.

    lambda = h * sqrt(2 ln n) with n the length of this band's vector; a
    single-coefficient band gives lambda = 0.
    """
    v = np.asarray(coeffs, dtype=float)
    if v.size == 0:
        raise ValueError("cannot compute a threshold for an empty vector")
    h = noise_scale(v)
    n = int(v.size)
    return h * sqrt(2.0 * log(n)), h, n


def split_coefficients(
    band_coeffs: np.ndarray,
    lam: float,
    source_index: tuple[tuple[int, int], ...] | None = None,
    band: str = "",
    h: float = 0.0,
) -> BandSplit:
    """Partition band coefficients at lam: |c| <= lam -> background, else significant.

    Ties go to background (only strictly larger magnitudes count as
    significant). Original values are preserved on both sides.
    """
    v = np.asarray(band_coeffs, dtype=float)
    if lam < 0.0:
        raise ValueError("threshold must be non-negative")
    mask = np.abs(v) > lam
    return BandSplit(
        band=band,
        lam=float(lam),
        h=float(h),
        n=int(v.size),
        background=v[~mask],
        significant=v[mask],
        significant_mask=mask,
        source_index=tuple(source_index) if source_index is not None else None,
    )


def threshold_band(
    band_coeffs: np.ndarray,
    band: str = "",
    source_index: tuple[tuple[int, int], ...] | None = None,
    mad_coeffs: np.ndarray | None = None,
) -> BandSplit:
    """Threshold one band end to end: noise scale, lambda, then the split.

    mad_coeffs selects where the noise scale is estimated; it defaults to the
    band itself (local adaptive threshold). N in lambda is always the band
    length.
    """
    v = np.asarray(band_coeffs, dtype=float)
    if v.size == 0:
        raise ValueError("cannot threshold an empty band")
    h = noise_scale(v if mad_coeffs is None else mad_coeffs)
    lam = h * sqrt(2.0 * log(v.size))
    return split_coefficients(v, lam, source_index=source_index, band=band, h=h)
