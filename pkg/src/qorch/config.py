"""System configuration: one INI document with cluster, backend, routing,
and simulation-environment blocks.

Resolution order for the config path: explicit argument, the QORCH_CONFIG
environment variable, then the packaged default.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .qpm import (
    BackendDescriptor,
    BackendKind,
    BackendRegistry,
    MockHardwareBackend,
    StateVectorBackend,
)
from .qtm import RoutingConfig
from .simenv import TimingModel

ENV_CONFIG = "QORCH_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BackendSettings:
    id: str
    kind: BackendKind
    max_qubits: int
    supports_mid_circuit: bool = True
    supports_conditionals: bool = True
    concurrency: int = 1
    readout_flip_probability: float = 0.0
    alpha: float = 1e-3
    beta: float = 1e-9
    alpha_q: float = 1.0
    beta_q: float = 1e-6

    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(
            self.id, self.kind, self.max_qubits,
            self.supports_mid_circuit, self.supports_conditionals, self.concurrency,
        )

    def implementation(self):
        if self.kind is BackendKind.STATE_VECTOR:
            return StateVectorBackend(self.alpha, self.beta)
        if self.kind is BackendKind.HARDWARE:
            return MockHardwareBackend(
                self.readout_flip_probability, self.alpha_q, self.beta_q
            )
        return None  # tensor-network slots need an external plugin


@dataclass(frozen=True)
class SystemConfig:
    nodes: int
    device: str | None
    backfill: bool
    backends: tuple[BackendSettings, ...]
    routing: RoutingConfig
    timing: TimingModel
    partitions: tuple[tuple[str, int], ...] | None  # None = default plan
    text: str = ""  # verbatim snapshot for run directories

    def build_registry(self) -> BackendRegistry:
        registry = BackendRegistry()
        for settings in self.backends:
            registry.register(settings.descriptor(), settings.implementation())
        return registry


def default_config_text() -> str:
    return resources.files("qorch.data").joinpath("default.ini").read_text("utf-8")


def load_config(path: str | Path | None = None) -> SystemConfig:
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path is None:
        return parse_config(default_config_text())
    return parse_config(Path(path).read_text("utf-8"))


def parse_config(text: str) -> SystemConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config: {exc}") from exc

    cluster = parser["cluster"] if parser.has_section("cluster") else {}
    nodes = int(cluster.get("nodes", 8))
    device = cluster.get("device") or None
    backfill = _as_bool(cluster.get("backfill", "false"))

    backends: list[BackendSettings] = []
    for section in parser.sections():
        if not section.startswith("backend:"):
            continue
        raw = parser[section]
        backend_id = section.split(":", 1)[1]
        try:
            kind = BackendKind(raw.get("kind", "state_vector"))
        except ValueError as exc:
            raise ConfigError(f"backend {backend_id!r}: {exc}") from exc
        backends.append(
            BackendSettings(
                id=backend_id,
                kind=kind,
                max_qubits=int(raw.get("max_qubits", 26)),
                supports_mid_circuit=_as_bool(raw.get("supports_mid_circuit", "true")),
                supports_conditionals=_as_bool(raw.get("supports_conditionals", "true")),
                concurrency=int(raw.get("concurrency", 1)),
                readout_flip_probability=float(raw.get("readout_flip_probability", 0.0)),
                alpha=float(raw.get("alpha", 1e-3)),
                beta=float(raw.get("beta", 1e-9)),
                alpha_q=float(raw.get("alpha_q", 1.0)),
                beta_q=float(raw.get("beta_q", 1e-6)),
            )
        )
    if not backends:
        raise ConfigError("config declares no [backend:*] sections")
    if device is not None and device not in {b.id for b in backends}:
        raise ConfigError(f"cluster device {device!r} is not a configured backend")

    routing_raw = parser["routing"] if parser.has_section("routing") else {}
    routing = RoutingConfig(
        sv_max=int(routing_raw.get("sv_max", 24)),
        tn_depth_max=int(routing_raw.get("tn_depth_max", 1000)),
        local_qubits_per_worker=int(routing_raw.get("local_qubits_per_worker", 20)),
        gang_limit=int(routing_raw.get("gang_limit", 8)),
    )

    sim_raw = parser["simenv"] if parser.has_section("simenv") else {}
    timing = TimingModel(
        alpha=float(sim_raw.get("alpha", 1e-3)),
        beta=float(sim_raw.get("beta", 1e-9)),
        gamma=float(sim_raw.get("gamma", 1e-9)),
    )
    partitions = _parse_partitions(sim_raw.get("partitions", "state_vector:all"))

    return SystemConfig(
        nodes=nodes,
        device=device,
        backfill=backfill,
        backends=tuple(backends),
        routing=routing,
        timing=timing,
        partitions=partitions,
        text=text,
    )


def _parse_partitions(raw: str):
    raw = raw.strip()
    entries = [item.strip() for item in raw.split(",") if item.strip()]
    if len(entries) == 1 and entries[0].endswith(":all"):
        return None
    plan = []
    for entry in entries:
        try:
            kind, count = entry.split(":")
            plan.append((kind.strip(), int(count)))
        except ValueError as exc:
            raise ConfigError(f"bad partition entry {entry!r}") from exc
    return tuple(plan)


def _as_bool(raw: str) -> bool:
    value = str(raw).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected boolean, got {raw!r}")
