"""System wiring: configuration -> registry, task manager, cluster."""
from __future__ import annotations

from .config import SystemConfig, load_config
from .qtm import TaskManager
from .resman import Cluster, ClusterConfig


class System:
    """One configured deployment; cheap to construct per run."""

    def __init__(self, config: SystemConfig | None = None):
        self.config = config or load_config()
        self.registry = self.config.build_registry()

    def task_manager(self) -> TaskManager:
        return TaskManager(self.registry, self.config.routing)

    def new_cluster(self, on_event=None) -> Cluster:
        return Cluster(
            ClusterConfig(
                total_nodes=self.config.nodes,
                single_qc_device=self.config.device,
                backfill=self.config.backfill,
            ),
            on_event=on_event,
        )
