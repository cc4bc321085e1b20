"""Radio propagation, decode decisions, energy accounting, power control.

Pathloss comes in two flavors: generalized free-space (distance exponent
configurable) and the Hata open/rural-area model.  Decode decisions are
capture-threshold based.  Energy is tracked per node in three buckets
(TX, RX, LO startup) that only ever grow.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from ._kernels import SPEED_OF_LIGHT

log = logging.getLogger(__name__)

HATA_F_MIN_MHZ = 150.0
HATA_F_MAX_MHZ = 1500.0
HATA_HB_MIN_M = 30.0
HATA_HM_MIN_M = 1.0

PATHLOSS_MODELS = ("free-space", "hata-rural")


class InfeasibleBroadcastError(RuntimeError):
    """Required broadcast power exceeds the radio's maximum."""


@dataclass
class RadioConfig:
    """Radio timing and power constants shared by both protocols.

    The defaults model a cheap burst radio: 4 Mb/s raw rate, 50 mW
    receive and transmit-circuit draw, a 450 us local-oscillator warmup,
    and a very insensitive detector (burst receivers trade sensitivity
    for power).  Sensitivity is the single knob that sets every
    transmit power in the system, so the overall energy balance between
    the two protocols moves with it.
    """
    bitrate_bps: float = 4e6
    pulse_bits: int = 16
    tx_power_max_dbm: float = 90.0
    rx_power_w: float = 0.05
    tx_circuit_power_w: float = 0.05
    lo_warmup_s: float = 450e-6
    lo_startup_energy_j: Optional[float] = None   # default: lo_warmup_s * rx_power_w
    sensitivity_dbm: float = -33.5
    capture_threshold_db: float = 10.0
    frequency_hz: float = 1e9
    antenna_height_m: float = 1.0
    pathloss_model: str = "hata-rural"
    pathloss_exponent: float = 2.0
    hata_clamp_heights: bool = False
    # power-control ladder
    ladder_floor_dbm: Optional[float] = None      # default: the sensitivity level
    ladder_step_db: float = 1.0
    power_margin_db: float = 0.0
    probe_slot_s: float = 5e-4

    def startup_energy_j(self) -> float:
        if self.lo_startup_energy_j is not None:
            return self.lo_startup_energy_j
        return self.lo_warmup_s * self.rx_power_w

    def ladder_floor(self) -> float:
        if self.ladder_floor_dbm is not None:
            return self.ladder_floor_dbm
        return self.sensitivity_dbm


def dbm_to_w(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def w_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts * 1e3)


# =============================================================================
# Pathloss
# =============================================================================

def freespace_pathloss_db(d_m, f_hz: float, exponent: float = 2.0):
    """Free-space loss with a configurable distance exponent.

    Only the distance power law scales with the exponent; the frequency
    and 4*pi/c terms keep their exponent-2 form.  Accepts scalars or
    arrays; distances must be positive.
    """
    d = np.asarray(d_m, dtype=np.float64)
    if np.any(d <= 0.0):
        raise ValueError("distance must be positive")
    out = _kernels.freespace_db(np.atleast_1d(d), float(f_hz), float(exponent))
    return float(out[0]) if d.ndim == 0 else out.reshape(d.shape)


def hata_rural_pathloss_db(d_m, f_hz: float, h_b: float, h_m: float,
                           clamp_heights: bool = False):
    """Hata open/rural-area pathloss in dB.

    Urban base formula with the small/medium-city mobile correction and
    the open-area adjustment.  Valid for 150-1500 MHz; out-of-band
    frequencies raise.  Antenna heights below the model's minima are
    used raw unless ``clamp_heights`` is set, in which case they are
    clamped (with a warning for the base height).
    """
    f_mhz = f_hz / 1e6
    if not (HATA_F_MIN_MHZ <= f_mhz <= HATA_F_MAX_MHZ):
        raise ValueError(f"frequency {f_mhz:.1f} MHz outside Hata validity "
                         f"[{HATA_F_MIN_MHZ:.0f}, {HATA_F_MAX_MHZ:.0f}] MHz")
    if h_b <= 0.0 or h_m <= 0.0:
        raise ValueError("antenna heights must be positive")
    if clamp_heights:
        if h_b < HATA_HB_MIN_M:
            log.warning("base antenna height %.2f m below Hata minimum, clamping to %.0f m",
                        h_b, HATA_HB_MIN_M)
            h_b = HATA_HB_MIN_M
        h_m = max(h_m, HATA_HM_MIN_M)
    d = np.asarray(d_m, dtype=np.float64)
    if np.any(d <= 0.0):
        raise ValueError("distance must be positive")
    out = _kernels.hata_rural_db(np.atleast_1d(d), float(f_mhz), float(h_b), float(h_m))
    return float(out[0]) if d.ndim == 0 else out.reshape(d.shape)


class Channel:
    """Pathloss model bound to one radio configuration."""

    def __init__(self, radio: RadioConfig) -> None:
        if radio.pathloss_model not in PATHLOSS_MODELS:
            raise ValueError(f"unknown pathloss model {radio.pathloss_model!r}")
        self.radio = radio

    def loss_db(self, d_m):
        if self.radio.pathloss_model == "free-space":
            return freespace_pathloss_db(d_m, self.radio.frequency_hz,
                                         self.radio.pathloss_exponent)
        return hata_rural_pathloss_db(d_m, self.radio.frequency_hz,
                                      self.radio.antenna_height_m,
                                      self.radio.antenna_height_m,
                                      self.radio.hata_clamp_heights)

    def flight_s(self, d_m: float) -> float:
        return d_m / SPEED_OF_LIGHT

    def rx_power_matrix(self, dist_m: np.ndarray, tx_dbm: np.ndarray) -> np.ndarray:
        """Received power (dBm) at every j from every i; diagonal is +inf loss."""
        d = dist_m.copy()
        np.fill_diagonal(d, 1.0)  # placeholder, diagonal masked below
        loss = self.loss_db(d)
        np.fill_diagonal(loss, np.inf)
        return _kernels.rx_power_matrix(np.ascontiguousarray(tx_dbm, dtype=np.float64),
                                        np.ascontiguousarray(loss, dtype=np.float64))


def can_decode(rx_dbm: float, sensitivity_dbm: float,
               interferers_dbm: Sequence[float] = (),
               capture_threshold_db: float = 10.0) -> bool:
    """Decode gate: above sensitivity and above capture over summed interference."""
    if rx_dbm < sensitivity_dbm:
        return False
    if interferers_dbm:
        total_mw = 0.0
        for p in interferers_dbm:
            total_mw += 10.0 ** (p / 10.0)
        return rx_dbm - 10.0 * math.log10(total_mw) >= capture_threshold_db
    return True


# =============================================================================
# Energy ledger
# =============================================================================

class EnergyLedger:
    """Per-node joule accounting with radio on/off state.

    Any charge while the radio is off first books one LO startup and
    marks the radio on; ``power_down`` arms the next startup charge.
    Accumulators never decrease.
    """

    def __init__(self, n_nodes: int, radio: RadioConfig) -> None:
        self.radio = radio
        self.tx_j = np.zeros(n_nodes)
        self.rx_j = np.zeros(n_nodes)
        self.startup_j = np.zeros(n_nodes)
        self.radio_on = np.zeros(n_nodes, dtype=bool)

    def _ensure_on(self, node: int) -> None:
        if not self.radio_on[node]:
            self.startup_j[node] += self.radio.startup_energy_j()
            self.radio_on[node] = True

    def charge_tx(self, node: int, bits: int, p_radiated_w: float) -> None:
        if bits <= 0:
            raise ValueError("bits must be positive")
        self._ensure_on(node)
        self.tx_j[node] += (bits / self.radio.bitrate_bps) * (
            p_radiated_w + self.radio.tx_circuit_power_w)

    def charge_rx(self, node: int, on_time_s: float) -> None:
        if on_time_s < 0.0:
            raise ValueError("on_time must be non-negative")
        self._ensure_on(node)
        self.rx_j[node] += on_time_s * self.radio.rx_power_w

    def power_down(self, node: int) -> None:
        self.radio_on[node] = False

    def node_total_j(self, node: int) -> float:
        return float(self.tx_j[node] + self.rx_j[node] + self.startup_j[node])

    def totals(self) -> dict[str, float]:
        tx = float(self.tx_j.sum())
        rx = float(self.rx_j.sum())
        su = float(self.startup_j.sum())
        return {"tx_j": tx, "rx_j": rx, "startup_j": su, "total_j": tx + rx + su}


# =============================================================================
# Power control
# =============================================================================

@dataclass
class PowerControlResult:
    tx_power_dbm: float
    probe_powers_dbm: list[float] = field(default_factory=list)
    reached_neighbor: bool = True

    @property
    def n_probes(self) -> int:
        return len(self.probe_powers_dbm)


def power_control_escalate(node: int, positions: np.ndarray, channel: Channel,
                           start_dbm: Optional[float] = None) -> PowerControlResult:
    """Climb the discrete power ladder until the nearest neighbor is reachable.

    Returns the lowest ladder power whose received level at the nearest
    neighbor clears sensitivity plus the configured margin, along with
    the probe powers actually tried (the caller charges those to the
    ledger).  ``start_dbm`` lets a re-run resume near the previous
    setting instead of sweeping up from the floor.  If even maximum
    power cannot reach the neighbor the node transmits at maximum and
    is reported unreached.
    """
    n = positions.shape[0]
    if n < 2:
        raise ValueError("power control needs at least one other node")
    radio = channel.radio
    deltas = positions - positions[node]
    d2 = np.einsum("ij,ij->i", deltas, deltas)
    d2[node] = np.inf
    d_nn = math.sqrt(float(d2.min()))
    needed = radio.sensitivity_dbm + float(channel.loss_db(d_nn)) + radio.power_margin_db

    floor = radio.ladder_floor()
    step = radio.ladder_step_db
    if start_dbm is not None:
        # resume two rungs below the previous power, never below the floor
        floor = max(floor, start_dbm - 2.0 * step)
    probes: list[float] = []
    p = floor
    while p < radio.tx_power_max_dbm and p < needed:
        probes.append(p)
        p += step
    p = min(p, radio.tx_power_max_dbm)
    probes.append(p)
    return PowerControlResult(p, probes, reached_neighbor=(p >= needed))


def min_broadcast_power(center: int, positions: np.ndarray,
                        channel: Channel) -> float:
    """Exact power (dBm) putting the farthest node at exactly sensitivity.

    Raises InfeasibleBroadcastError beyond the radio's maximum.
    """
    n = positions.shape[0]
    if n < 2:
        raise ValueError("broadcast needs at least one receiver")
    deltas = positions - positions[center]
    d = np.sqrt(np.einsum("ij,ij->i", deltas, deltas))
    d[center] = 0.0
    d_max = float(d.max())
    p = channel.radio.sensitivity_dbm + float(channel.loss_db(d_max))
    if p > channel.radio.tx_power_max_dbm:
        raise InfeasibleBroadcastError(
            f"broadcast needs {p:.2f} dBm to reach {d_max:.1f} m, "
            f"max is {channel.radio.tx_power_max_dbm:.2f} dBm")
    return p
