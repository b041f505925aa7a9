"""OR-combination of block-thresholded scans in three orientations.

The raster scan propagates constraints from the top-left corner, so
flipping the image before thresholding (and flipping the labels back)
yields a genuinely different result. Unioning the foreground of the
identity, vertical-flip and horizontal-flip scans recovers detail that any
single scan direction may clamp away; the union only ever grows the
foreground.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .engine import LabtConfig, LabtResult, run_labt
from .image_core import flip_horizontal, flip_vertical

__all__ = ["MultiscanResult", "or_masks", "run_multiscan"]


@dataclass(frozen=True)
class MultiscanResult:
    """Union mask plus the three per-orientation masks (already flipped
    back) and their full run records."""

    combined: np.ndarray
    per_scan: tuple[np.ndarray, np.ndarray, np.ndarray]
    runs: tuple[LabtResult, LabtResult, LabtResult]


def or_masks(masks: Sequence[np.ndarray]) -> np.ndarray:
    """Pixelwise foreground union of equally sized binary masks."""
    if not masks:
        raise ValueError("need at least one mask")
    shapes = {np.asarray(m).shape for m in masks}
    if len(shapes) != 1:
        raise ValueError(f"mask dimensions differ: {sorted(shapes)}")
    return reduce(np.logical_or, (np.asarray(m, dtype=bool) for m in masks))


def run_multiscan(img, cfg: LabtConfig = LabtConfig()) -> MultiscanResult:
    """Run the block thresholder in three orientations and OR the results."""
    identity = run_labt(img, cfg)
    flipped_v = run_labt(flip_vertical(img), cfg)
    flipped_h = run_labt(flip_horizontal(img), cfg)
    scans = (
        identity.binary,
        flip_vertical(flipped_v.binary),
        flip_horizontal(flipped_h.binary),
    )
    return MultiscanResult(
        combined=or_masks(scans),
        per_scan=scans,
        runs=(identity, flipped_v, flipped_h),
    )
