"""Simulation-environment planning: partitions, gang and throughput modes.

The nodes of a job's simulation partition are split by simulator kind.  A
queue of routed tasks is turned into an execution plan: tasks wanting w > 1
workers become gang assignments spanning w nodes of their kind partition,
single-worker tasks pack one per free node (throughput), FIFO per kind so
nothing starves.  Executing a plan drives the platform manager for real
counts while completion times follow the logical timing model

    T(task, w) = alpha + beta * gates * 2^n / w + gamma * exchange_cost(w)
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .circuit import Circuit, gate_count
from .qpm import BackendKind, BackendRegistry, ExecuteRequest, ExecuteResult
from .qtm import QuantumTask, RoutingDecision
from .statevec import exchange_cost


class Oversubscribed(ValueError):
    pass


class WorkersExceedPartition(ValueError):
    pass


@dataclass(frozen=True)
class TimingModel:
    alpha: float = 1e-3
    beta: float = 1e-9
    gamma: float = 1e-9

    def task_seconds(self, circuit: Circuit, workers: int) -> float:
        n = circuit.num_qubits
        compute = self.beta * gate_count(circuit) * 2**n / workers
        comm = self.gamma * exchange_cost(circuit, n, workers) if n else 0.0
        return self.alpha + compute + comm


@dataclass(frozen=True)
class SimPartitionPlan:
    partitions: tuple[tuple[BackendKind, int], ...]
    source: str  # "user_config" | "default"

    def nodes_for(self, kind: BackendKind) -> int:
        return sum(count for k, count in self.partitions if k is kind)


def configure(sim_nodes: int, user_partitions=None) -> SimPartitionPlan:
    """Partition a job's simulation nodes by simulator kind.

    A user plan is honored verbatim; the default gives every node to the
    state-vector kind.
    """
    if user_partitions is None:
        return SimPartitionPlan(
            ((BackendKind.STATE_VECTOR, sim_nodes),), source="default"
        )
    partitions = tuple((BackendKind(k), int(n)) for k, n in user_partitions)
    requested = sum(n for _, n in partitions)
    if requested > sim_nodes:
        raise Oversubscribed(
            f"partition plan wants {requested} nodes, only {sim_nodes} available"
        )
    return SimPartitionPlan(partitions, source="user_config")


@dataclass
class Assignment:
    task: QuantumTask
    decision: RoutingDecision
    kind: BackendKind
    nodes: tuple[int, ...]
    workers: int
    run_mode: str  # "gang" | "throughput"
    start: float
    duration: float

    @property
    def end(self) -> float:
        return self.start + self.duration

    def mode_label(self) -> str:
        return f"gang({self.workers})" if self.run_mode == "gang" else "throughput"


@dataclass
class ExecutionPlan:
    assignments: list[Assignment] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)  # task_id, reason

    @property
    def makespan(self) -> float:
        return max((a.end for a in self.assignments), default=0.0)


def assess(queue, plan: SimPartitionPlan, timing: TimingModel) -> ExecutionPlan:
    """Turn routed tasks into a timed plan over the partition's nodes.

    ``queue`` holds (task, decision) pairs in arrival order.  Gang tasks wait
    for w free nodes of their kind partition; strict FIFO per kind keeps the
    head from being starved by later small tasks.
    """
    # carve global node ids per kind partition, in plan order
    free: dict[BackendKind, list[int]] = {}
    base = 0
    for kind, size in plan.partitions:
        free.setdefault(kind, []).extend(range(base, base + size))
        base += size
    totals = {kind: len(nodes) for kind, nodes in free.items()}

    queues: dict[BackendKind, list[tuple[QuantumTask, RoutingDecision]]] = {}
    out = ExecutionPlan()
    for task, decision in queue:
        kind = decision.backend_kind
        if kind is BackendKind.HARDWARE:
            # hardware is not part of the simulation partition
            out.failures.append((task.task_id, "hardware tasks do not run in the simulation environment"))
            continue
        if totals.get(kind, 0) == 0:
            out.failures.append((task.task_id, f"no {kind.value} partition configured"))
            continue
        if decision.workers > totals[kind]:
            reason = WorkersExceedPartition(
                f"task wants {decision.workers} workers, {kind.value} "
                f"partition has {totals[kind]} nodes"
            )
            out.failures.append((task.task_id, f"WorkersExceedPartition: {reason}"))
            continue
        queues.setdefault(kind, []).append((task, decision))

    completions: list[tuple[float, int, Assignment]] = []
    seq = 0
    now = 0.0
    while True:
        for kind, pending in queues.items():
            while pending:
                task, decision = pending[0]
                if decision.workers > len(free[kind]):
                    break  # FIFO head blocks until its gang fits
                pending.pop(0)
                nodes = tuple(free[kind][: decision.workers])
                free[kind] = free[kind][decision.workers :]
                duration = timing.task_seconds(task.circuit, decision.workers)
                assignment = Assignment(
                    task=task,
                    decision=decision,
                    kind=kind,
                    nodes=nodes,
                    workers=decision.workers,
                    run_mode="gang" if decision.workers > 1 else "throughput",
                    start=now,
                    duration=duration,
                )
                out.assignments.append(assignment)
                heapq.heappush(completions, (assignment.end, seq, assignment))
                seq += 1
        if not completions:
            break
        now, _, finished = heapq.heappop(completions)
        free[finished.kind] = sorted(free[finished.kind] + list(finished.nodes))
        # drain every completion at this instant before rescheduling
        while completions and completions[0][0] == now:
            _, _, more = heapq.heappop(completions)
            free[more.kind] = sorted(free[more.kind] + list(more.nodes))
        if not any(queues.values()):
            while completions:
                _, _, more = heapq.heappop(completions)
                free[more.kind] = sorted(free[more.kind] + list(more.nodes))
            break
    return out


@dataclass
class EnvironmentRun:
    results: dict[str, ExecuteResult] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    makespan: float = 0.0
    utilization: float = 0.0


def execute_plan(plan: ExecutionPlan, registry: BackendRegistry,
                 total_nodes: int | None = None) -> EnvironmentRun:
    """Run every assignment through the platform manager.

    Counts are identical whether a task ran gang or throughput; only the
    timeline differs.  Per-task failures are recorded without aborting
    sibling assignments.
    """
    env = EnvironmentRun()
    for task_id, reason in plan.failures:
        env.failures[task_id] = reason
    busy = 0.0
    for assignment in plan.assignments:
        task = assignment.task
        request = ExecuteRequest(
            task_id=task.task_id,
            circuit=task.circuit,
            shots=task.shots,
            seed=task.seed,
            workers=assignment.workers,
        )
        try:
            result = registry.execute(assignment.decision.backend_id, request)
        except Exception as exc:
            env.failures[task.task_id] = f"{type(exc).__name__}: {exc}"
            continue
        result.queue_wait = assignment.start
        result.modeled_service_time = assignment.duration
        env.results[task.task_id] = result
        busy += assignment.workers * assignment.duration
    env.makespan = plan.makespan
    if total_nodes is None:
        total_nodes = sum(
            len(a.nodes) for a in plan.assignments
        ) or 1
    if env.makespan > 0:
        env.utilization = busy / (total_nodes * env.makespan)
    return env
