"""Synchronization metrics and the closed-form broadcast-vs-neighbor gain.

Covers the proportion-out-of-sync (PoS), power-normalized sync
efficiency, clock variance, per-round time-to-synchronize, cumulative
energy ratio, and the analytic transmission-distance gain curves.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

GAIN_MODES = ("per-transmission", "aggregate-sum")

CSV_COLUMNS = ["t_s", "pos", "tts_ms", "clock_var_s2", "density_per_m2",
               "energy_tx_J", "energy_rx_J", "energy_startup_J", "sync_eff_per_W"]


@dataclass
class MetricSample:
    """One timestamped metrics row; tts_ms and density may be absent."""
    t_s: float
    pos: float
    tts_ms: Optional[float]
    clock_var_s2: float
    density_per_m2: Optional[float]
    energy_tx_j: float
    energy_rx_j: float
    energy_startup_j: float
    sync_eff_per_w: float

    def row(self) -> list[str]:
        def fmt(v):
            return "" if v is None else repr(v)
        return [fmt(self.t_s), fmt(self.pos), fmt(self.tts_ms),
                fmt(self.clock_var_s2), fmt(self.density_per_m2),
                fmt(self.energy_tx_j), fmt(self.energy_rx_j),
                fmt(self.energy_startup_j), fmt(self.sync_eff_per_w)]


def write_metrics_csv(path, samples: Iterable[MetricSample]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for s in samples:
            w.writerow(s.row())


@dataclass
class RoundRecord:
    """Outcome of one synchronization round."""
    index: int
    open_t_s: float
    tts_s: float
    converged_nodes: int
    eligible_nodes: int
    capped: bool            # some node hit the window cap unconverged

    @property
    def tts_ms(self) -> float:
        return self.tts_s * 1e3


def pos(synced_count: int, n: int) -> float:
    """Proportion of nodes out of sync, 1 - s/n."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not (0 <= synced_count <= n):
        raise ValueError("synced count outside [0, n]")
    return 1.0 - synced_count / n


def sync_efficiency(synced_count: int, n: int, total_power_w: float) -> float:
    """(s/n) normalized by total transmitter+receiver power."""
    if total_power_w <= 0.0:
        raise ValueError("total power must be positive")
    if n <= 0:
        raise ValueError("n must be positive")
    return (synced_count / n) / total_power_w


def clock_variance(local_times: Sequence[float], reference_s: float) -> float:
    """Population variance of (local - reference) across nodes.

    The reference only shifts the errors uniformly, so this equals the
    population variance of the readings themselves.
    """
    if len(local_times) < 1:
        raise ValueError("need at least one clock")
    errs = np.asarray(local_times, dtype=np.float64) - reference_s
    return float(np.var(errs))


def energy_ratio(broadcast_total_j: float, pco_total_j: float) -> float:
    """Broadcast energy over PCO energy; >1 means the oscillators win."""
    if broadcast_total_j <= 0.0 or pco_total_j <= 0.0:
        raise ValueError("energy totals must be positive")
    return broadcast_total_j / pco_total_j


def gain_ratio(n: int, area_m2: float, exponent: float,
               mode: str = "per-transmission") -> float:
    """Transmission-distance gain of nearest-neighbor pulsing over a beacon.

    numerator   = (sqrt(A/pi) + sqrt(A/(n+1)))**exponent
    denominator = (sqrt(A/n))**exponent          [per-transmission]
                  n * (sqrt(A/n))**exponent      [aggregate-sum]

    The area cancels algebraically in both modes.  Per-transmission is
    the default: it is the reading under which the gain rises with node
    count for exponents 2 and 3 alike.  The aggregate-sum reading of
    the summed nearest-neighbor loss is kept for completeness; with
    exponent 2 it falls toward 1/pi as n grows.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if area_m2 <= 0.0:
        raise ValueError("area must be positive")
    if mode not in GAIN_MODES:
        raise ValueError(f"mode must be one of {GAIN_MODES}")
    num = (math.sqrt(area_m2 / math.pi) + math.sqrt(area_m2 / (n + 1))) ** exponent
    den = math.sqrt(area_m2 / n) ** exponent
    if mode == "aggregate-sum":
        den *= n
    return num / den


def sweep_gain(n_values: Sequence[int], exponents: Sequence[float],
               modes: Sequence[str] = ("per-transmission",),
               area_m2: float = 1e6) -> list[tuple[int, float, str, float]]:
    """Rows of (n, exponent, mode, gain) for every combination."""
    rows = []
    for mode in modes:
        for exp in exponents:
            for n in n_values:
                rows.append((n, exp, mode, gain_ratio(n, area_m2, exp, mode)))
    return rows


def write_gain_csv(path, rows: Sequence[tuple[int, float, str, float]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "exponent", "mode", "gain"])
        for n, exp, mode, gain in rows:
            w.writerow([n, repr(exp), mode, repr(gain)])
