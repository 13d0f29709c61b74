"""Per-block maxima and minima extraction (the block-sampling side of EVT)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import TimeSeries
from .errors import InsufficientDataError, ParameterDomainError

__all__ = ["BlockMaximaSeries", "extract_block_maxima", "extract_block_minima"]


@dataclass(frozen=True)
class BlockMaximaSeries:
    """Ordered per-block extremes; one entry per complete block."""

    block_size: int
    maxima: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "maxima", np.asarray(self.maxima, dtype=float))

    def __len__(self) -> int:
        return len(self.maxima)


def _block_values(series) -> tuple[np.ndarray, str]:
    if isinstance(series, TimeSeries):
        return series.values, series.label
    return np.asarray(series, dtype=float), ""


def extract_block_maxima(series, block_size: int) -> BlockMaximaSeries:
    """Maximum of each consecutive non-overlapping block of ``block_size``.

    A trailing partial block is discarded, never padded (padding would bias
    the recorded maximum downward).  ``series`` may be a TimeSeries or any
    one-dimensional array of values.
    """
    block_size = int(block_size)
    if block_size < 1:
        raise ParameterDomainError(f"block_size must be >= 1, got {block_size}")
    values, label = _block_values(series)
    n_blocks = len(values) // block_size
    if n_blocks == 0:
        raise InsufficientDataError(
            f"series of length {len(values)} is shorter than one block "
            f"of {block_size}"
        )
    blocks = values[: n_blocks * block_size].reshape(n_blocks, block_size)
    return BlockMaximaSeries(
        block_size=block_size,
        maxima=blocks.max(axis=1),
        source_label=label,
    )


def extract_block_minima(series, block_size: int) -> BlockMaximaSeries:
    """Minimum of each block, via the min(x) = -max(-x) duality."""
    values, label = _block_values(series)
    negated = extract_block_maxima(-values, block_size)
    return BlockMaximaSeries(
        block_size=negated.block_size,
        maxima=-negated.maxima,
        source_label=label,
    )
