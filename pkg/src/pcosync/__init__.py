"""Emergent pulse-coupled time synchronization vs centralized broadcast."""

from ._kernels import active_backend
from .broadcast import BroadcastConfig, select_center_node
from .channel import (Channel, EnergyLedger, RadioConfig, can_decode,
                      freespace_pathloss_db, hata_rural_pathloss_db,
                      min_broadcast_power, power_control_escalate)
from .engine import BroadcastLeg, PcoLeg, RunSummary, World, run_scenario
from .kernel import EventQueue, RngStream, VirtualClock, to_ns, to_s
from .metrics import (MetricSample, clock_variance, energy_ratio, gain_ratio,
                      pos, sweep_gain, sync_efficiency)
from .mobility import (MobilityParams, density, nearest_neighbor, place_uniform,
                       step_mobility)
from .oscillator import Oscillator, PcoParams, Pulse
from .scenario import Scenario, ScenarioError, load_scenario

__version__ = "0.1.0"
