"""Event-driven execution of both protocols over a shared world.

Each protocol leg builds its own ``World`` from the scenario seed, so
node placement, drift signs, initial clock offsets, master choice and
the full mobility trajectory are bit-identical across legs: the two
protocols are measured on exactly the same network.

The pulse-coupled leg runs one listen window per resync period.  Nodes
wake on their own (drifting) clocks, restart their oscillators at an
arbitrary phase, pulse and couple until their inter-pulse gap stops
changing, then snap their clock to the agreed pulse grid and power
down.  A node that has not converged when its nominal window elapses
keeps its receiver on, up to a hard cap.  The broadcast leg wakes
everyone once per period for a single center-node timestamp
transmission.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import metrics
from .broadcast import select_center_node
from .channel import (Channel, EnergyLedger, InfeasibleBroadcastError, can_decode,
                      dbm_to_w, min_broadcast_power, power_control_escalate)
from .kernel import NS_PER_S, EventQueue, Event, RngStream, VirtualClock, to_ns, to_s
from .mobility import density, place_uniform, step_mobility
from .oscillator import MASTER, SLAVE, Oscillator
from .scenario import Scenario
from ._kernels import SPEED_OF_LIGHT, pairwise_distances

# round caches are built this long (true ns) before the scheduled window
# anchor; clock errors stay well under it, so every wake lands after prep
PREP_GUARD_NS = 1_000_000


class World:
    """Topology, clocks and mobility state; identical across legs by seed."""

    def __init__(self, sc: Scenario) -> None:
        self.sc = sc
        n = sc.n_nodes
        self.positions = place_uniform(
            n, sc.area_side_m, RngStream(sc.seed, "placement").generator())
        drift_rng = RngStream(sc.seed, "drift-sign").generator()
        signs = np.where(drift_rng.random(n) < 0.5, -1.0, 1.0)
        init_rng = RngStream(sc.seed, "clock-init").generator()
        if sc.clock_init_spread_s > 0.0:
            offsets = init_rng.uniform(-sc.clock_init_spread_s, sc.clock_init_spread_s, n)
        else:
            offsets = np.zeros(n)
        master_rng = RngStream(sc.seed, "masters").generator()
        if sc.n_masters > 0:
            chosen = master_rng.choice(n, size=sc.n_masters, replace=False)
            self.master_ids = sorted(int(m) for m in chosen)
        else:
            self.master_ids = []
        # GPS keeps master clocks disciplined to true time; everyone else
        # free-runs at the drawn drift from a small unknown boot offset
        masters = set(self.master_ids)
        self.clocks = [
            VirtualClock(0.0, 0.0) if i in masters else
            VirtualClock(float(signs[i]) * sc.drift_magnitude, float(offsets[i]))
            for i in range(n)
        ]
        self.mobility_rng = RngStream(sc.seed, "mobility").generator()

    def local_times(self, t_ns: int) -> np.ndarray:
        return np.array([c.local_time(t_ns) for c in self.clocks])

    def step(self, dt: float) -> None:
        self.positions = step_mobility(self.positions, self.sc.mobility,
                                       self.mobility_rng, dt)


@dataclass
class LegResult:
    protocol: str
    samples: list = field(default_factory=list)
    rounds: list = field(default_factory=list)
    energy: dict = field(default_factory=dict)
    infeasible_rounds: int = 0
    scheduled_on_s: float = 0.0       # per listening node, nominal windows
    actual_on_s: float = 0.0          # summed over listening nodes

    def tts_values_s(self) -> list[float]:
        return [r.tts_s for r in self.rounds]


class _LegBase:
    """Event plumbing shared by both protocol legs."""

    protocol = "?"

    def __init__(self, sc: Scenario) -> None:
        self.sc = sc
        self.world = World(sc)
        self.channel = Channel(sc.radio)
        self.ledger = EnergyLedger(sc.n_nodes, sc.radio)
        self.queue = EventQueue()
        self.result = LegResult(self.protocol)
        self._pending_tts: deque[float] = deque()
        self._handlers = {
            "mobility-step": self._on_mobility_step,
            "metric-sample": self._on_metric_sample,
        }

    # -- scheduling helpers ---------------------------------------------------

    def _schedule_background(self) -> None:
        if self.sc.mobility.enabled:
            first = to_ns(self.sc.mobility.step_dt)
            if first <= to_ns(self.sc.duration_s):
                self.queue.schedule(first, "mobility-step")
        first_sample = to_ns(self.sc.sample_interval_s)
        if first_sample <= to_ns(self.sc.duration_s):
            self.queue.schedule(first_sample, "metric-sample")

    def _dispatch(self, ev: Event) -> None:
        self._handlers[ev.kind](ev)

    def run(self) -> LegResult:
        self._setup()
        self._schedule_background()
        end = to_ns(self.sc.duration_s + self.sc.pco.window_max_s + 1.0)
        self.queue.run_until(end, self._dispatch)
        self.result.energy = self.ledger.totals()
        return self.result

    def _setup(self) -> None:
        raise NotImplementedError

    def _reference_time(self, t_ns: int, locals_: np.ndarray) -> float:
        raise NotImplementedError

    # -- background events ----------------------------------------------------

    def _on_mobility_step(self, ev: Event) -> None:
        dt = self.sc.mobility.step_dt
        self.world.step(dt)
        nxt = ev.fire_at + to_ns(dt)
        if nxt <= to_ns(self.sc.duration_s):
            self.queue.schedule(nxt, "mobility-step")

    def _on_metric_sample(self, ev: Event) -> None:
        t_ns = ev.fire_at
        t_s = to_s(t_ns)
        sc = self.sc
        locals_ = self.world.local_times(t_ns)
        ref = self._reference_time(t_ns, locals_)
        errs = locals_ - ref
        synced = int(np.sum(np.abs(errs) <= sc.sync_tolerance_s))
        totals = self.ledger.totals()
        eff = None
        if totals["total_j"] > 0.0:
            eff = metrics.sync_efficiency(synced, sc.n_nodes, totals["total_j"] / t_s)
        dens = None
        if sc.n_nodes >= 3:
            dens = density(self.world.positions)
        tts_ms = self._pending_tts.popleft() * 1e3 if self._pending_tts else None
        self.result.samples.append(metrics.MetricSample(
            t_s=t_s,
            pos=metrics.pos(synced, sc.n_nodes),
            tts_ms=tts_ms,
            clock_var_s2=float(np.var(errs)),
            density_per_m2=dens,
            energy_tx_j=totals["tx_j"],
            energy_rx_j=totals["rx_j"],
            energy_startup_j=totals["startup_j"],
            sync_eff_per_w=eff,
        ))
        nxt = t_ns + to_ns(sc.sample_interval_s)
        if nxt <= to_ns(sc.duration_s):
            self.queue.schedule(nxt, "metric-sample")


# =============================================================================
# Pulse-coupled oscillator leg
# =============================================================================

class PcoLeg(_LegBase):
    protocol = "pco"

    def _setup(self) -> None:
        sc = self.sc
        n = sc.n_nodes
        self.params = sc.pco
        self.proto_rng = RngStream(sc.seed, "pco-protocol").generator()
        self.roles = [MASTER if i in self.world.master_ids else SLAVE for i in range(n)]
        self.osc = [Oscillator(self.params, self.roles[i]) for i in range(n)]
        self.slave_ids = [i for i in range(n) if self.roles[i] == SLAVE]
        self.tx_dbm = np.full(n, np.nan)
        self.pulse_s = sc.radio.pulse_bits / sc.radio.bitrate_bps
        self.pulse_ns = to_ns(self.pulse_s)

        # per-round state
        self.round_idx = 0
        self.awake = np.zeros(n, dtype=bool)
        self.closed = np.zeros(n, dtype=bool)
        self.esc_s = np.zeros(n)
        self.conv_ns: list[Optional[int]] = [None] * n
        self.close_off: list[Optional[float]] = [None] * n
        self.pending_fire: list[Optional[Event]] = [None] * n
        self.last_tx_ns = np.full(n, -(10 ** 15), dtype=np.int64)
        self.reach: list[list[tuple[int, int, float]]] = [[] for _ in range(n)]
        self.intf: list[list[int]] = [[] for _ in range(n)]
        self.flight_ns: Optional[np.ndarray] = None
        self.rx_dbm: Optional[np.ndarray] = None
        self.n_open = 0
        self.wake_local = 0.0

        self._handlers.update({
            "round-prep": self._on_round_prep,
            "window-open": self._on_window_open,
            "window-close": self._on_window_close,
            "window-cap": self._on_window_cap,
            "master-pulse": self._on_master_pulse,
            "self-fire": self._on_self_fire,
            "rx-complete": self._on_rx_complete,
        })

        period = self.params.resync_period_s
        r = 1
        while r * period <= sc.duration_s:
            anchor = to_ns(r * period)
            self.queue.schedule(anchor - PREP_GUARD_NS, "round-prep", data=r)
            r += 1

    def _reference_time(self, t_ns: int, locals_: np.ndarray) -> float:
        if self.world.master_ids:
            return float(locals_[self.world.master_ids[0]])
        return float(locals_.mean())

    # -- round construction ---------------------------------------------------

    def _on_round_prep(self, ev: Event) -> None:
        sc = self.sc
        n = sc.n_nodes
        r = ev.data
        self.round_idx = r
        self.round_anchor_ns = to_ns(r * self.params.resync_period_s)
        self.wake_local = r * self.params.resync_period_s

        self.esc_s[:] = 0.0  # escalation time only accrues when control runs
        run_control = (r == 1) or sc.mobility.enabled
        if run_control and n >= 2:
            self._power_control(first=(r == 1))
        # fresh caches against current geometry
        dist = pairwise_distances(np.ascontiguousarray(self.world.positions))
        self.flight_ns = np.rint(dist / SPEED_OF_LIGHT * NS_PER_S).astype(np.int64)
        self.rx_dbm = self.channel.rx_power_matrix(dist, self.tx_dbm)
        sens = sc.radio.sensitivity_dbm
        intf_floor = sens - (sc.radio.capture_threshold_db + 10.0)
        self.reach = [[] for _ in range(n)]
        self.intf = [[] for _ in range(n)]
        for i in range(n):
            row = self.rx_dbm[i]
            for j in np.nonzero(row >= sens)[0]:
                j = int(j)
                if self.roles[j] == MASTER:
                    continue  # masters never integrate: skip their deliveries
                self.reach[i].append((j, int(self.flight_ns[i, j]), float(row[j])))
        for j in range(n):
            col = self.rx_dbm[:, j]
            self.intf[j] = [int(k) for k in np.nonzero(col >= intf_floor)[0]]

        self.x0 = self.proto_rng.uniform(0.0, self.params.x_th, n)
        self.awake[:] = False
        self.closed[:] = False
        self.conv_ns = [None] * n
        self.close_off = [None] * n
        self.last_fire_ns: list[Optional[int]] = [None] * n
        self.last_tx_ns[:] = -(10 ** 15)
        self.n_open = 0
        self.round_capped = False
        for i in range(n):
            wake = self.world.clocks[i].true_time_of_local(self.wake_local)
            self.queue.schedule(wake, "window-open", node=i, data=r)

    def _power_control(self, first: bool) -> None:
        """Choose per-node pulse powers; charge probes and responses.

        The climb is analytic (geometry decides which rung succeeds) but
        every probe transmission, the probe listening time and the
        neighbor's single response pulse are charged as if exchanged.
        """
        sc = self.sc
        n = sc.n_nodes
        pos = self.world.positions
        results = []
        for i in range(n):
            start = None if first else float(self.tx_dbm[i])
            results.append(power_control_escalate(i, pos, self.channel, start_dbm=start))
        respond_to = []
        for i in range(n):
            deltas = pos - pos[i]
            d2 = np.einsum("ij,ij->i", deltas, deltas)
            d2[i] = np.inf
            respond_to.append(int(np.argmin(d2)))
        for i, res in enumerate(results):
            self.tx_dbm[i] = res.tx_power_dbm
            self.esc_s[i] = res.n_probes * sc.radio.probe_slot_s
            for p in res.probe_powers_dbm:
                self.ledger.charge_tx(i, sc.radio.pulse_bits, dbm_to_w(p))
            if res.reached_neighbor:
                nn = respond_to[i]
                self.ledger.charge_tx(nn, sc.radio.pulse_bits,
                                      dbm_to_w(results[nn].tx_power_dbm))

    # -- window lifecycle -----------------------------------------------------

    def _on_window_open(self, ev: Event) -> None:
        i = ev.node
        self.awake[i] = True
        self.n_open += 1
        self.ledger.charge_rx(i, 0.0)  # books the LO startup
        osc = self.osc[i]
        start_local = self.wake_local + self.esc_s[i]
        if self.roles[i] == MASTER:
            osc.reset(start_local)
            # pulse on the agreed grid; escalation may eat the first ticks
            k0 = 0 if self.esc_s[i] == 0.0 else math.ceil(
                self.esc_s[i] / self.params.t_desired_s)
            tick_local = self.wake_local + k0 * self.params.t_desired_s
            t = self.world.clocks[i].true_time_of_local(tick_local)
            self.queue.schedule(t, "master-pulse", node=i, data=(self.round_idx, k0))
        else:
            osc.reset(start_local, x0=float(self.x0[i]))
            osc.refractory_until = start_local  # deaf while probing
            self._schedule_self_fire(i, start_local)
        close_off = self.esc_s[i] + self.params.window_s
        t_close = self.world.clocks[i].true_time_of_local(self.wake_local + close_off)
        self.queue.schedule(t_close, "window-close", node=i,
                            data=(self.round_idx, close_off))

    def _schedule_self_fire(self, i: int, from_local: float) -> None:
        old = self.pending_fire[i]
        if old is not None:
            old.cancel()
            self.pending_fire[i] = None
        dt = self.osc[i].time_to_threshold()
        if dt is None:
            return
        t = self.world.clocks[i].true_time_of_local(from_local + dt)
        t = max(t, self.queue.now)
        self.pending_fire[i] = self.queue.schedule(t, "self-fire", node=i,
                                                   data=self.round_idx)

    def _on_window_close(self, ev: Event) -> None:
        i = ev.node
        r, close_off = ev.data
        if r != self.round_idx or self.closed[i]:
            return
        if self.roles[i] == MASTER or self.osc[i].converged:
            self._close_node(i, close_off)
        else:
            cap_off = self.esc_s[i] + self.params.window_max_s
            t_cap = self.world.clocks[i].true_time_of_local(self.wake_local + cap_off)
            self.queue.schedule(max(t_cap, self.queue.now), "window-cap", node=i,
                                data=(r, cap_off))

    def _on_window_cap(self, ev: Event) -> None:
        i = ev.node
        r, cap_off = ev.data
        if r != self.round_idx or self.closed[i]:
            return
        self.round_capped = True
        self._close_node(i, cap_off)

    def _close_node(self, i: int, on_off_local: float) -> None:
        """Power a node down at local offset on_off_local past its wake."""
        osc = self.osc[i]
        clock = self.world.clocks[i]
        if self.roles[i] == SLAVE:
            self.ledger.charge_rx(i, on_off_local)
            self.result.actual_on_s += on_off_local
            if osc.converged and self.last_fire_ns[i] is not None:
                # the converged train's ticks are whole multiples of the
                # desired interval on the shared schedule grid; the final
                # pulse's tick index anchors the clock label
                t_d = self.params.t_desired_s
                k = round((self.last_fire_ns[i] - self.round_anchor_ns)
                          / (t_d * NS_PER_S))
                reference = self.wake_local + k * t_d
                clock.apply_correction(reference, self.last_fire_ns[i])
        else:
            self.ledger.charge_rx(i, self.esc_s[i])  # masters listen only to probes
        self.ledger.power_down(i)
        self.awake[i] = False
        self.closed[i] = True
        pend = self.pending_fire[i]
        if pend is not None:
            pend.cancel()
            self.pending_fire[i] = None
        self.n_open -= 1
        if self.n_open == 0:
            self._finalize_round()

    def _finalize_round(self) -> None:
        sc = self.sc
        anchor = self.round_anchor_ns
        if not self.slave_ids:
            tts = self.params.t_desired_s
            converged = 0
        else:
            spans = []
            converged = 0
            for i in self.slave_ids:
                if self.conv_ns[i] is not None:
                    converged += 1
                    spans.append((self.conv_ns[i] - anchor) / NS_PER_S)
                else:
                    spans.append(self.esc_s[i] + self.params.window_max_s)
            tts = max(spans)
        self.result.rounds.append(metrics.RoundRecord(
            index=self.round_idx,
            open_t_s=to_s(anchor),
            tts_s=tts,
            converged_nodes=converged,
            eligible_nodes=len(self.slave_ids),
            capped=self.round_capped,
        ))
        self.result.scheduled_on_s += self.params.window_s
        self._pending_tts.append(tts)

    # -- pulses ---------------------------------------------------------------

    def _on_master_pulse(self, ev: Event) -> None:
        i = ev.node
        r, k = ev.data
        if r != self.round_idx or not self.awake[i]:
            return
        tick_local = self.wake_local + k * self.params.t_desired_s
        self.osc[i].fire(tick_local)
        self._emit(i, ev.fire_at)
        next_local = self.wake_local + (k + 1) * self.params.t_desired_s
        if next_local < self.wake_local + self.esc_s[i] + self.params.window_s:
            t = self.world.clocks[i].true_time_of_local(next_local)
            self.queue.schedule(max(t, ev.fire_at), "master-pulse", node=i, data=(r, k + 1))

    def _on_self_fire(self, ev: Event) -> None:
        i = ev.node
        if ev.data != self.round_idx or not self.awake[i]:
            return
        self.pending_fire[i] = None
        osc = self.osc[i]
        t_loc = max(self.world.clocks[i].local_time(ev.fire_at), osc._t)
        osc.integrate(t_loc)
        newly = osc.fire(t_loc)
        self._emit(i, ev.fire_at)
        self._schedule_self_fire(i, osc.last_pulse)
        if newly:
            self._note_converged(i, ev.fire_at)

    def _emit(self, i: int, t_ns: int) -> None:
        """Charge and propagate one pulse fired by node i at true t_ns."""
        self.ledger.charge_tx(i, self.sc.radio.pulse_bits, dbm_to_w(float(self.tx_dbm[i])))
        self.last_tx_ns[i] = t_ns
        self.last_fire_ns[i] = t_ns
        for j, flight, rxp in self.reach[i]:
            if self.awake[j] and not self.closed[j]:
                self.queue.schedule(t_ns + flight, "rx-complete", node=j,
                                    data=(self.round_idx, i, rxp))

    def _on_rx_complete(self, ev: Event) -> None:
        j = ev.node
        r, i, rxp = ev.data
        if r != self.round_idx or not self.awake[j]:
            return
        osc = self.osc[j]
        clock = self.world.clocks[j]
        local = clock.local_time(ev.fire_at)
        if local < osc.refractory_until:
            return
        # co-channel energy still in the air at the leading edge
        interferers = []
        t = ev.fire_at
        for k in self.intf[j]:
            if k == i or k == j:
                continue
            a_k = self.last_tx_ns[k] + self.flight_ns[k, j]
            if a_k <= t <= a_k + self.pulse_ns:
                interferers.append(float(self.rx_dbm[k, j]))
        if not can_decode(rxp, self.sc.radio.sensitivity_dbm, interferers,
                          self.sc.radio.capture_threshold_db):
            return
        local = max(local, osc._t)
        if osc.on_pulse_decoded(local):
            pend = self.pending_fire[j]
            if pend is not None:
                pend.cancel()
                self.pending_fire[j] = None
            newly = osc.fire(local)
            self._emit(j, ev.fire_at)
            self._schedule_self_fire(j, osc.last_pulse)
            if newly:
                self._note_converged(j, ev.fire_at)
        else:
            # x moved up without firing: the pending prediction is stale
            self._schedule_self_fire(j, osc._t)

    def _note_converged(self, i: int, t_ns: int) -> None:
        if self.conv_ns[i] is None:
            self.conv_ns[i] = t_ns
        if not self.closed[i]:
            # past the nominal close this ends the node's extension
            local = self.world.clocks[i].local_time(t_ns)
            nominal_off = self.esc_s[i] + self.params.window_s
            off = local - self.wake_local
            if off >= nominal_off:
                self._close_node(i, off)


# =============================================================================
# Centralized timestamp broadcast leg
# =============================================================================

class BroadcastLeg(_LegBase):
    protocol = "broadcast"

    def _setup(self) -> None:
        sc = self.sc
        self.source_node: Optional[int] = None
        self.rx_on_s = sc.broadcast.rx_on_s(sc.radio.bitrate_bps)
        self.msg_s = sc.broadcast.timestamp_bits / sc.radio.bitrate_bps
        self.msg_ns = to_ns(self.msg_s)
        self._handlers.update({
            "bc-round": self._on_bc_round,
            "bc-apply": self._on_bc_apply,
        })
        period = sc.broadcast_period_s()
        k = 1
        while k * period <= sc.duration_s:
            self.queue.schedule(to_ns(k * period), "bc-round", data=k)
            k += 1

    def _reference_time(self, t_ns: int, locals_: np.ndarray) -> float:
        if self.source_node is not None:
            return float(locals_[self.source_node])
        if self.world.master_ids:
            return float(locals_[self.world.master_ids[0]])
        return float(locals_.mean())

    def _on_bc_round(self, ev: Event) -> None:
        sc = self.sc
        n = sc.n_nodes
        t = ev.fire_at
        pos = self.world.positions
        center = select_center_node(pos)
        self.source_node = center
        feasible = True
        if n >= 2:
            try:
                p_dbm = min_broadcast_power(center, pos, self.channel)
            except InfeasibleBroadcastError:
                p_dbm = sc.radio.tx_power_max_dbm
                feasible = False
                self.result.infeasible_rounds += 1
        else:
            p_dbm = self.channel.radio.ladder_floor()
        self.ledger.charge_tx(center, sc.broadcast.timestamp_bits, dbm_to_w(p_dbm))
        self.ledger.power_down(center)
        # the timestamp marks the end of the transmission on the sender clock
        stamp = self.world.clocks[center].local_time(t + self.msg_ns)

        decoded = 0
        max_flight = 0
        if n >= 2:
            deltas = pos - pos[center]
            d = np.sqrt(np.einsum("ij,ij->i", deltas, deltas))
            loss = np.empty(n)
            mask = np.arange(n) != center
            loss[mask] = self.channel.loss_db(d[mask])
            for j in range(n):
                if j == center:
                    continue
                self.ledger.charge_rx(j, self.rx_on_s)
                self.ledger.power_down(j)
                if p_dbm - loss[j] >= sc.radio.sensitivity_dbm:
                    flight = int(round(d[j] / SPEED_OF_LIGHT * NS_PER_S))
                    self.queue.schedule(t + self.msg_ns + flight, "bc-apply",
                                        node=j, data=stamp)
                    decoded += 1
                    max_flight = max(max_flight, flight)
        tts = (self.msg_ns + max_flight) / NS_PER_S
        self.result.rounds.append(metrics.RoundRecord(
            index=ev.data, open_t_s=to_s(t), tts_s=tts,
            converged_nodes=decoded, eligible_nodes=n - 1 if n > 1 else 0,
            capped=not feasible))
        self._pending_tts.append(tts)

    def _on_bc_apply(self, ev: Event) -> None:
        self.world.clocks[ev.node].apply_correction(ev.data, ev.fire_at)


# =============================================================================
# Run orchestration
# =============================================================================

@dataclass
class RunSummary:
    scenario_name: str
    seed: int
    legs: dict[str, LegResult]
    energy_ratio: Optional[float] = None

    def rows(self) -> list[tuple[str, object]]:
        rows: list[tuple[str, object]] = [("scenario", self.scenario_name),
                                          ("seed", self.seed)]
        for label, leg in self.legs.items():
            e = leg.energy
            rows += [
                (f"{label}_energy_tx_J", e["tx_j"]),
                (f"{label}_energy_rx_J", e["rx_j"]),
                (f"{label}_energy_startup_J", e["startup_j"]),
                (f"{label}_energy_total_J", e["total_j"]),
                (f"{label}_rounds", len(leg.rounds)),
            ]
            tts = leg.tts_values_s()
            if tts:
                rows.append((f"{label}_tts_first_s", tts[0]))
                rest = tts[1:] if len(tts) > 1 else tts
                rows.append((f"{label}_tts_mean_post_first_s", float(np.mean(rest))))
                rows.append((f"{label}_tts_var_post_first_s2", float(np.var(rest))))
            if label == "pco":
                capped = sum(1 for r in leg.rounds if r.capped)
                rows.append(("pco_capped_rounds", capped))
                if leg.rounds:
                    conv = np.mean([r.converged_nodes / max(r.eligible_nodes, 1)
                                    for r in leg.rounds])
                    rows.append(("pco_mean_converged_fraction", float(conv)))
                rows.append(("pco_scheduled_on_s_per_node", leg.scheduled_on_s))
            if label == "broadcast":
                rows.append(("broadcast_infeasible_rounds", leg.infeasible_rounds))
        if self.energy_ratio is not None:
            rows.append(("energy_ratio_broadcast_over_pco", self.energy_ratio))
        return rows


_LEG_CLASSES = {"pco": PcoLeg, "broadcast": BroadcastLeg}


def run_scenario(sc: Scenario) -> RunSummary:
    """Execute every leg the scenario asks for and derive the summary."""
    sc.validate()
    labels = ["pco", "broadcast"] if sc.protocol == "both" else [sc.protocol]
    legs: dict[str, LegResult] = {}
    for label in labels:
        legs[label] = _LEG_CLASSES[label](sc).run()
    ratio = None
    if "pco" in legs and "broadcast" in legs:
        pco_j = legs["pco"].energy["total_j"]
        bc_j = legs["broadcast"].energy["total_j"]
        if pco_j > 0.0 and bc_j > 0.0:
            ratio = metrics.energy_ratio(bc_j, pco_j)
    return RunSummary(sc.name, sc.seed, legs, ratio)
