"""Scenario definition: one YAML document describes one experiment.

A scenario file is a mapping with a handful of top-level keys plus
optional ``pco``, ``radio``, ``mobility`` and ``broadcast`` sections.
Only ``name`` and ``seed`` are required; everything else defaults to
the full-scale reference setup (612 nodes, 1 km^2, one master, 500 s
resync).  Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import yaml

from .broadcast import BroadcastConfig
from .channel import RadioConfig, PATHLOSS_MODELS
from .mobility import MobilityParams
from .oscillator import PcoParams

PROTOCOLS = ("pco", "broadcast", "both")


class ScenarioError(ValueError):
    """Scenario parse or validation failure; message names the field."""


@dataclass
class Scenario:
    name: str
    seed: int
    n_nodes: int = 612
    area_side_m: float = 1000.0
    protocol: str = "both"
    n_masters: int = 1
    duration_s: float = 5000.0
    sample_interval_s: float = 10.0
    sync_tolerance_s: float = 4e-8
    drift_magnitude: float = 1e-8
    clock_init_spread_s: float = 5e-6
    pco: PcoParams = field(default_factory=PcoParams)
    radio: RadioConfig = field(default_factory=RadioConfig)
    mobility: MobilityParams = field(default_factory=MobilityParams)
    broadcast: BroadcastConfig = field(default_factory=BroadcastConfig)

    def broadcast_period_s(self) -> float:
        if self.broadcast.period_s is not None:
            return self.broadcast.period_s
        return self.pco.resync_period_s

    def validate(self) -> None:
        if not self.name:
            raise ScenarioError("name: must be non-empty")
        if self.n_nodes < 1:
            raise ScenarioError("n_nodes: must be >= 1")
        if not (0 <= self.n_masters < self.n_nodes):
            raise ScenarioError("n_masters: must satisfy 0 <= n_masters < n_nodes")
        if self.protocol not in PROTOCOLS:
            raise ScenarioError(f"protocol: must be one of {PROTOCOLS}")
        if self.area_side_m <= 0.0:
            raise ScenarioError("area_side_m: must be positive")
        if self.duration_s <= 0.0:
            raise ScenarioError("duration_s: must be positive")
        if self.sample_interval_s <= 0.0:
            raise ScenarioError("sample_interval_s: must be positive")
        if self.sync_tolerance_s <= 0.0:
            raise ScenarioError("sync_tolerance_s: must be positive")
        if self.drift_magnitude < 0.0:
            raise ScenarioError("drift_magnitude: must be non-negative")
        if self.clock_init_spread_s < 0.0:
            raise ScenarioError("clock_init_spread_s: must be non-negative")
        for section, cfg in (("pco", self.pco), ("mobility", self.mobility),
                             ("broadcast", self.broadcast)):
            try:
                cfg.validate()
            except ValueError as exc:
                raise ScenarioError(f"{section}: {exc}") from exc
        self._validate_radio()

    def _validate_radio(self) -> None:
        r = self.radio
        if r.pathloss_model not in PATHLOSS_MODELS:
            raise ScenarioError(f"radio.pathloss_model: must be one of {PATHLOSS_MODELS}")
        if r.bitrate_bps <= 0.0:
            raise ScenarioError("radio.bitrate_bps: must be positive")
        if r.pulse_bits <= 0:
            raise ScenarioError("radio.pulse_bits: must be positive")
        for name in ("rx_power_w", "tx_circuit_power_w", "lo_warmup_s",
                     "frequency_hz", "antenna_height_m", "ladder_step_db",
                     "probe_slot_s"):
            if getattr(r, name) <= 0.0:
                raise ScenarioError(f"radio.{name}: must be positive")
        if r.capture_threshold_db < 0.0:
            raise ScenarioError("radio.capture_threshold_db: must be non-negative")
        if r.power_margin_db < 0.0:
            raise ScenarioError("radio.power_margin_db: must be non-negative")
        if r.sensitivity_dbm >= r.tx_power_max_dbm:
            raise ScenarioError("radio.sensitivity_dbm: must lie below tx_power_max_dbm")
        if r.lo_startup_energy_j is not None and r.lo_startup_energy_j < 0.0:
            raise ScenarioError("radio.lo_startup_energy_j: must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        """Normalized plain mapping (defaults filled in, sections nested)."""
        out: dict[str, Any] = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if dataclasses.is_dataclass(v):
                out[f.name] = dataclasses.asdict(v)
            else:
                out[f.name] = v
        return out


_SECTIONS = {"pco": PcoParams, "radio": RadioConfig,
             "mobility": MobilityParams, "broadcast": BroadcastConfig}


def _build_section(cls, data: dict, path: str):
    allowed = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}: unknown key")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def scenario_from_dict(data: dict[str, Any]) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("top level: scenario document must be a mapping")
    top_fields = {f.name for f in dataclasses.fields(Scenario)}
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key not in top_fields:
            raise ScenarioError(f"{key}: unknown key")
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ScenarioError(f"{key}: must be a mapping")
            kwargs[key] = _build_section(_SECTIONS[key], value, key)
        else:
            kwargs[key] = value
    for required in ("name", "seed"):
        if required not in kwargs:
            raise ScenarioError(f"{required}: required key missing")
    sc = Scenario(**kwargs)
    sc.validate()
    return sc


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Parse and fully validate a scenario file."""
    path = Path(path)
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: parse error: {exc}") from exc
    if data is None:
        raise ScenarioError(f"{path}: empty scenario file")
    return scenario_from_dict(data)
