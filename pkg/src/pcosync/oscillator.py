"""Pulse-coupled oscillator state machine.

Each node runs a leaky integrate-and-fire oscillator on its own local
clock: the state variable x climbs from 0 toward a firing threshold
under a constant excitation drive (optionally leaky), takes a fixed
increment for every decoded neighbor pulse, and emits a pulse plus
resets when it reaches the threshold.  Convergence is declared locally
when consecutive inter-pulse gaps stop changing.

All times in this module are node-local seconds; the event engine maps
between local and true time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

MASTER = "master"
SLAVE = "slave"


@dataclass
class PcoParams:
    """Oscillator and duty-cycle parameters.

    ``s0`` defaults to x_th / t_desired_s so an undisturbed oscillator
    free-runs at exactly the desired inter-pulse interval.  The listen
    window may stretch past its nominal length (up to window_max_s)
    when a node has not yet converged at the scheduled close.
    """
    s0: Optional[float] = None          # threshold-units per second
    gamma: float = 0.0                  # leak rate, 1/s
    x_th: float = 3.0
    epsilon: float = 1.0                # increment per decoded pulse
    t_desired_s: float = 100e-6
    refractory_s: float = 10e-6
    window_s: float = 5e-3
    window_max_s: float = 50e-3
    resync_period_s: float = 500.0
    phase_tol: float = 0.02
    k_confirm: int = 3

    def resolved_s0(self) -> float:
        if self.s0 is not None:
            return self.s0
        return self.x_th / self.t_desired_s

    def validate(self) -> None:
        if not (0.0 < self.refractory_s < self.t_desired_s < self.window_s):
            raise ValueError("need 0 < refractory_s < t_desired_s < window_s")
        if self.window_s > self.window_max_s:
            raise ValueError("window_max_s must be >= window_s")
        if self.x_th <= 0.0 or self.epsilon <= 0.0:
            raise ValueError("x_th and epsilon must be positive")
        if self.resolved_s0() < 0.0 or self.gamma < 0.0:
            raise ValueError("s0 and gamma must be non-negative")
        if self.resync_period_s <= self.window_max_s:
            raise ValueError("resync_period_s must exceed window_max_s")
        if not (0.0 < self.phase_tol < 1.0):
            raise ValueError("phase_tol must be in (0, 1)")
        if self.k_confirm < 1:
            raise ValueError("k_confirm must be >= 1")


@dataclass
class Pulse:
    """One emitted pulse burst (no payload)."""
    origin: int
    t_start_ns: int
    duration_s: float
    tx_power_dbm: float


class Oscillator:
    """Integrate-and-fire state for one node.

    Masters never integrate: their x stays put and decoded pulses are
    ignored; they only record their own emission times so phase
    bookkeeping works uniformly.
    """

    __slots__ = ("params", "role", "s0", "x", "last_pulse", "prev_gap", "phi",
                 "refractory_until", "confirm_count", "converged", "_t")

    def __init__(self, params: PcoParams, role: str = SLAVE) -> None:
        self.params = params
        self.role = role
        self.s0 = params.resolved_s0()
        self.reset(0.0)

    def reset(self, t_local: float, x0: float = 0.0) -> None:
        """Fresh window: arbitrary start phase, no pulse history."""
        self.x = x0
        self.last_pulse: Optional[float] = None
        self.prev_gap: Optional[float] = None
        self.phi: Optional[float] = None
        self.refractory_until = -math.inf
        self.confirm_count = 0
        self.converged = False
        self._t = t_local  # local time of last state update

    def integrate(self, t_local: float) -> None:
        """Advance x to t_local by the closed-form drive/leak solution."""
        if self.role == MASTER:
            self._t = t_local
            return
        dt = t_local - self._t
        if dt < 0.0:
            raise ValueError("integration backwards in local time")
        g = self.params.gamma
        if g == 0.0:
            self.x += self.s0 * dt
        else:
            x_inf = self.s0 / g
            self.x = x_inf + (self.x - x_inf) * math.exp(-g * dt)
        self.x = min(max(self.x, 0.0), self.params.x_th)
        self._t = t_local

    def time_to_threshold(self) -> Optional[float]:
        """Local seconds until x reaches threshold by integration alone."""
        if self.role == MASTER:
            return None
        g = self.params.gamma
        x_th = self.params.x_th
        if g == 0.0:
            if self.s0 <= 0.0:
                return None
            return (x_th - self.x) / self.s0
        x_inf = self.s0 / g
        if x_inf <= x_th:
            return None
        return -math.log((x_inf - x_th) / (x_inf - self.x)) / g

    def on_pulse_decoded(self, t_local: float) -> bool:
        """Apply one decoded pulse at t_local; True if it triggers a fire.

        Masters and refractory nodes ignore the pulse entirely.
        """
        if self.role == MASTER:
            return False
        if t_local < self.refractory_until:
            return False
        self.integrate(t_local)
        self.x = min(self.x + self.params.epsilon, self.params.x_th)
        return self.x >= self.params.x_th

    def fire(self, t_local: float) -> bool:
        """Emit at t_local: reset x, update phase records and convergence.

        Returns True when this firing newly latches local convergence.
        """
        p = self.params
        gap = None if self.last_pulse is None else t_local - self.last_pulse
        if gap is not None:
            self.phi = gap / p.t_desired_s
        newly = False
        if gap is not None and self.prev_gap is not None:
            if abs(gap - self.prev_gap) <= p.phase_tol * p.t_desired_s:
                self.confirm_count += 1
                if not self.converged and self.confirm_count >= p.k_confirm:
                    self.converged = True
                    newly = True
            else:
                self.confirm_count = 0
        if gap is not None:
            self.prev_gap = gap
        self.last_pulse = t_local
        self.x = 0.0
        self._t = t_local
        self.refractory_until = t_local + p.refractory_s
        return newly

    def detect_convergence(self) -> bool:
        """Current local convergence verdict (set by fire)."""
        return self.converged
