"""Centralized timestamp-broadcast baseline.

One geographically central node transmits a timestamp at a power just
sufficient to reach every other node; receivers set their clocks from
the decoded value with no propagation-delay compensation.  Round
execution lives in the engine; this module holds the configuration and
the center selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class BroadcastConfig:
    timestamp_bits: int = 180
    period_s: Optional[float] = None    # default: the PCO resync period

    def rx_on_s(self, bitrate_bps: float) -> float:
        return self.timestamp_bits / bitrate_bps

    def validate(self) -> None:
        if self.timestamp_bits <= 0:
            raise ValueError("timestamp_bits must be positive")
        if self.period_s is not None and self.period_s <= 0.0:
            raise ValueError("period_s must be positive")


def select_center_node(positions: np.ndarray) -> int:
    """1-center under the Euclidean metric, brute force over nodes.

    Returns the node minimizing the maximum distance to all others;
    ties break to the lowest node id.
    """
    n = positions.shape[0]
    if n < 1:
        raise ValueError("select_center_node needs at least one node")
    if n == 1:
        return 0
    dx = positions[:, 0:1] - positions[:, 0:1].T
    dy = positions[:, 1:2] - positions[:, 1:2].T
    dist = np.sqrt(dx * dx + dy * dy)
    return int(np.argmin(dist.max(axis=1)))
