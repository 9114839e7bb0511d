"""Best-worse-channel relay selection over estimated selection-time gains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SelectionResult:
    """Index of the chosen relay and the max-min gain it achieves."""

    index_k: int
    worst_gain: float


def best_worse_channel(gains) -> SelectionResult:
    """Pick the relay whose weaker link is strongest.

    `gains` is a sequence of (g1, g2) pairs of estimated selection-time
    power gains, one pair per relay.  Returns argmax_i min(g1_i, g2_i);
    ties break to the lowest index so results are reproducible.
    """
    arr = np.asarray(gains, dtype=float)
    if arr.size == 0:
        raise ValueError("best_worse_channel: empty relay list")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("best_worse_channel: expected a sequence of (g1, g2) pairs")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("best_worse_channel: gains must be finite and >= 0")
    worst = np.minimum(arr[:, 0], arr[:, 1])
    k = int(np.argmax(worst))  # argmax returns the first (lowest) max index
    return SelectionResult(index_k=k, worst_gain=float(worst[k]))
