"""Usage-pattern scenario drivers and their circuits.

Three drivers cover the hybrid usage patterns end to end on a simulated
cluster: a repeatedly-sampled static circuit (GHZ), an ensemble of
independent random circuits post-processed classically, and an in-sequence
teleportation loop that uses mid-circuit measurement plus feed-forward and
adapts its angle between submissions.

Every driver runs as one hybrid job: under the per-job model its tasks are
planned onto the job's own simulation partition (gang/throughput); under the
single-QC model they serialize through the cluster device queue.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit, CircuitBuilder
from .qtm import Preferences, QuantumTask, TaskManager
from .report import RunReport, TaskRecord
from .resman import Advance, DeviceCall, GeneratorWorkload, JobSpec, JobState, Model, ParallelDeviceCalls
from .seeds import derive_seed
from .simenv import assess, configure, execute_plan
from .statevec import Counts
from .system import System


class NonConvergence(RuntimeError):
    """The in-sequence loop hit its iteration cap before reaching target."""

    def __init__(self, message: str, report: RunReport | None = None):
        super().__init__(message)
        self.report = report


PATTERNS = ("in_sequence", "single_circuit", "ensemble")


@dataclass(frozen=True)
class ScenarioSpec:
    """A fully described scenario run: pattern, parameters, seed, placement."""

    pattern: str
    seed: int = 0
    model: Model = Model.PER_JOB
    app_nodes: int = 1
    sim_nodes: int = 2
    n: int = 3
    shots: int = 10000
    k: int = 4
    layers: int = 2
    theta: float = 0.3
    tolerance: float = 0.02
    max_iterations: int = 30

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r} (have {PATTERNS})")
        if self.shots < 1 or self.app_nodes < 1:
            raise ValueError("shots and app_nodes must be positive")
        if self.pattern == "single_circuit" and self.n < 2:
            raise ValueError("single_circuit needs n >= 2")
        if self.pattern == "ensemble" and (self.k < 1 or self.n < 1 or self.layers < 0):
            raise ValueError("ensemble needs k >= 1, n >= 1, layers >= 0")
        if self.pattern == "in_sequence":
            if not 0.0 <= self.theta < 2.0 * math.pi:
                raise ValueError("in_sequence needs theta in [0, 2*pi)")
            if self.tolerance <= 0 or self.max_iterations < 1:
                raise ValueError("in_sequence needs positive tolerance and cap")


def run_scenario(spec: ScenarioSpec, system: System) -> RunReport:
    """Dispatch a ScenarioSpec to its pattern driver."""
    sim_nodes = 0 if Model(spec.model) is Model.SINGLE_QC else spec.sim_nodes
    if spec.pattern == "single_circuit":
        return run_single_circuit(
            spec.n, spec.shots, spec.seed, system,
            model=spec.model, app_nodes=spec.app_nodes, sim_nodes=sim_nodes,
        )
    if spec.pattern == "ensemble":
        return run_ensemble(
            spec.k, spec.n, spec.layers, spec.shots, spec.seed, system,
            model=spec.model, app_nodes=spec.app_nodes, sim_nodes=sim_nodes,
        )
    return run_in_sequence(
        spec.theta, spec.shots, spec.seed, system,
        model=spec.model, app_nodes=spec.app_nodes, sim_nodes=sim_nodes,
        tolerance=spec.tolerance, max_iterations=spec.max_iterations,
    )


# -- scenario circuits ---------------------------------------------------------


def ghz(n: int) -> Circuit:
    """h on qubit 0, a cx chain, and a full register measurement."""
    if n < 2:
        raise ValueError("GHZ needs at least 2 qubits")
    b = CircuitBuilder(n, (("c", n),)).h(0)
    for q in range(n - 1):
        b.cx(q, q + 1)
    return b.measure_all("c").build()


def teleport_circuit(theta: float) -> Circuit:
    """Teleport ry(theta)|0> from qubit 0 to qubit 2 with feed-forward."""
    return (
        CircuitBuilder(3, (("m0", 1), ("m1", 1), ("out", 1)))
        .ry(theta, 0)
        .h(1)
        .cx(1, 2)
        .cx(0, 1)
        .h(0)
        .measure(0, "m0", 0)
        .measure(1, "m1", 0)
        .x(2, condition=("m1", 1))
        .z(2, condition=("m0", 1))
        .measure(2, "out", 0)
        .build()
    )


def random_layered_circuit(n: int, layers: int, seed: int) -> Circuit:
    """Layers of per-qubit u gates followed by a random disjoint cx pairing."""
    rng = np.random.default_rng(seed)
    b = CircuitBuilder(n, (("c", n),))
    for _ in range(layers):
        for q in range(n):
            theta, phi, lam = rng.uniform(0.0, 2.0 * math.pi, 3)
            b.u(theta, phi, lam, q)
        order = rng.permutation(n)
        for i in range(0, n - 1, 2):
            b.cx(int(order[i]), int(order[i + 1]))
    return b.measure_all("c").build()


# -- job harness -----------------------------------------------------------------


@dataclass
class TaskOutcome:
    task_id: str
    backend_id: str = "-"
    queue_wait: float = 0.0
    service_time: float = 0.0
    counts: Counts | None = None
    error: str | None = None

    def record(self) -> TaskRecord:
        return TaskRecord(
            self.task_id, self.backend_id, self.queue_wait,
            self.service_time, self.counts, self.error,
        )


class QuantumBatch:
    """Task submission API handed to scenario bodies inside the job workload."""

    def __init__(self, system: System, tm: TaskManager, model: Model, sim_nodes: int):
        self.system = system
        self.tm = tm
        self.model = model
        self.sim_nodes = sim_nodes
        self.outcomes: list[TaskOutcome] = []
        self.failure: Exception | None = None

    def submit(self, source, shots, seed, preferences=None) -> QuantumTask:
        return self.tm.normalize(source, shots, seed, preferences)

    def run_batch(self, tasks: list[QuantumTask], sequential: bool = False):
        """Generator step: execute tasks under the job's integration model.

        Yields engine steps; returns the list of TaskOutcome in task order.
        """
        if self.model is Model.SINGLE_QC:
            return (yield from self._run_on_device(tasks, sequential))
        return (yield from self._run_on_partition(tasks))

    def _run_on_device(self, tasks, sequential):
        device = self.system.config.device
        batch: list[TaskOutcome] = []
        pending: list[tuple[TaskOutcome, object]] = []
        for task in tasks:
            if task.preferences.backend_id not in (None, device):
                raise ValueError(
                    "single_qc jobs execute on the cluster device "
                    f"{device!r}; use per_job for backend overrides"
                )
            forced = replace(task.preferences, backend_id=device, workers=1)
            outcome = TaskOutcome(task.task_id, backend_id=device)
            batch.append(outcome)
            try:
                result = self.tm.execute_task(replace(task, preferences=forced))
            except Exception as exc:
                outcome.error = f"{type(exc).__name__}: {exc}"
                continue
            outcome.service_time = result.modeled_service_time
            outcome.counts = result.counts
            pending.append((outcome, result))
        if pending:
            if sequential:
                for outcome, _ in pending:
                    grant = yield DeviceCall(hold=outcome.service_time)
                    outcome.queue_wait = grant.wait
            else:
                grants = yield ParallelDeviceCalls(
                    tuple(o.service_time for o, _ in pending)
                )
                for (outcome, _), grant in zip(pending, grants):
                    outcome.queue_wait = grant.wait
        self.outcomes.extend(batch)
        return batch

    def _run_on_partition(self, tasks):
        batch: list[TaskOutcome] = []
        queue = []
        for task in tasks:
            outcome = TaskOutcome(task.task_id)
            batch.append(outcome)
            try:
                decision = self.tm.route(task)
            except Exception as exc:
                outcome.error = f"{type(exc).__name__}: {exc}"
                continue
            outcome.backend_id = decision.backend_id
            queue.append((task, decision))
        if queue:
            plan = configure(self.sim_nodes, self.system.config.partitions)
            timed = assess(queue, plan, self.system.config.timing)
            env = execute_plan(timed, self.system.registry, total_nodes=self.sim_nodes)
            by_id = {o.task_id: o for o in batch}
            for task_id, result in env.results.items():
                outcome = by_id[task_id]
                outcome.queue_wait = result.queue_wait
                outcome.service_time = result.modeled_service_time
                outcome.counts = result.counts
            for task_id, reason in env.failures.items():
                by_id[task_id].error = reason
            if env.makespan > 0:
                yield Advance(env.makespan)
        self.outcomes.extend(batch)
        return batch


def run_hybrid_job(system: System, model, app_nodes: int,
                   sim_nodes: int, body) -> tuple[QuantumBatch, object]:
    """Run one hybrid job whose quantum workload is the scenario body."""
    model = Model(model)
    cluster = system.new_cluster()
    tm = system.task_manager()
    batch = QuantumBatch(system, tm, model, sim_nodes)

    def workload(ctx):
        yield from body(batch)

    spec = JobSpec(
        job_id="job-0001",
        app_nodes=app_nodes,
        sim_nodes=sim_nodes if model is Model.PER_JOB else 0,
        model=model,
        workload=GeneratorWorkload(workload),
        submit_time=0.0,
    )
    cluster.submit_job(spec)
    cluster.run()
    return batch, cluster


def _assemble(system: System, scenario: str, seed: int, model, batch: QuantumBatch,
              cluster, answer: str, iterations=None, status: str | None = None) -> RunReport:
    metrics = cluster.metrics()
    waits = [o.queue_wait for o in batch.outcomes if o.error is None]
    report = RunReport(
        scenario=scenario,
        seed=seed,
        model=Model(model).value,
        status=status or (
            "failed"
            if cluster.job_state("job-0001") is JobState.FAILED
            or any(o.error for o in batch.outcomes)
            else "ok"
        ),
        answer=answer,
        metrics={
            "makespan": cluster.now,
            "utilization": metrics["utilization"],
            "mean_queue_wait": float(np.mean(waits)) if waits else 0.0,
        },
        tasks=[o.record() for o in batch.outcomes],
        iterations=iterations or [],
        config_text=system.config.text,
        event_lines=cluster.export_log(),
    )
    return report


# -- drivers -------------------------------------------------------------------


def run_single_circuit(n: int, shots: int, seed: int, system: System,
                       model=Model.PER_JOB, app_nodes: int = 1,
                       sim_nodes: int = 2) -> RunReport:
    """Sample a GHZ state repeatedly: one static circuit, one distribution."""
    circuit = ghz(n)

    def body(batch: QuantumBatch):
        task = batch.submit(circuit, shots, derive_seed(seed, "task", 0))
        yield from batch.run_batch([task])

    batch, cluster = run_hybrid_job(system, model, app_nodes, sim_nodes, body)
    outcome = batch.outcomes[0] if batch.outcomes else None
    if outcome is not None and outcome.counts is not None:
        zero = "0" * n
        answer = f"p_all_zeros={outcome.counts.frequency(zero):.6f}"
    else:
        answer = "error"
    return _assemble(system, "single_circuit", seed, model, batch, cluster, answer)


def run_ensemble(k: int, n: int, layers: int, shots: int, seed: int, system: System,
                 model=Model.PER_JOB, app_nodes: int = 1,
                 sim_nodes: int = 2) -> RunReport:
    """K independent random circuits, aggregated classically.

    The answer is the mean over circuits of the all-zeros outcome frequency.
    """
    if k < 1:
        raise ValueError("ensemble needs at least one circuit")
    circuits = [
        random_layered_circuit(n, layers, derive_seed(seed, "circuit", i))
        for i in range(k)
    ]

    def body(batch: QuantumBatch):
        tasks = [
            batch.submit(c, shots, derive_seed(seed, "task", i))
            for i, c in enumerate(circuits)
        ]
        yield from batch.run_batch(tasks)

    batch, cluster = run_hybrid_job(system, model, app_nodes, sim_nodes, body)
    zero = "0" * n
    freqs = [
        o.counts.frequency(zero) for o in batch.outcomes if o.counts is not None
    ]
    answer = (
        f"mean_zero_frequency={float(np.mean(freqs)):.6f}" if freqs else "error"
    )
    return _assemble(system, "ensemble", seed, model, batch, cluster, answer)


def run_in_sequence(theta: float, shots_per_iter: int, seed: int, system: System,
                    model=Model.PER_JOB, app_nodes: int = 1, sim_nodes: int = 2,
                    tolerance: float = 0.02, max_iterations: int = 30) -> RunReport:
    """Teleportation feedback loop: bisect the preparation angle until the
    teleported P(output=1) lands within tolerance of one half."""
    if not 0.0 <= theta < 2.0 * math.pi:
        raise ValueError("theta must be in [0, 2*pi)")
    iterations: list[dict] = []

    def measured_p1(counts: Counts) -> float:
        ones = sum(v for key, v in counts.items() if key.split()[2] == "1")
        return ones / counts.total()

    def body(batch: QuantumBatch):
        increasing = theta <= math.pi
        lo, hi = (0.0, math.pi) if increasing else (math.pi, 2.0 * math.pi)
        angle = theta
        for i in range(max_iterations):
            task = batch.submit(
                teleport_circuit(angle), shots_per_iter, derive_seed(seed, "iter", i)
            )
            (outcome,) = yield from batch.run_batch([task], sequential=True)
            if outcome.error is not None:
                batch.failure = RuntimeError(outcome.error)
                return
            p1 = measured_p1(outcome.counts)
            iterations.append({"theta": f"{angle:.9g}", "p1": f"{p1:.6f}"})
            if abs(p1 - 0.5) <= tolerance:
                return
            high = p1 > 0.5
            if (increasing and high) or (not increasing and not high):
                hi = angle
            else:
                lo = angle
            angle = (lo + hi) / 2.0
        batch.failure = NonConvergence(
            f"no convergence after {max_iterations} iterations"
        )

    batch, cluster = run_hybrid_job(system, model, app_nodes, sim_nodes, body)
    if iterations:
        answer = (
            f"theta={iterations[-1]['theta']} p1={iterations[-1]['p1']} "
            f"iterations={len(iterations)}"
        )
    else:
        answer = "error"
    report = _assemble(
        system, "in_sequence", seed, model, batch, cluster, answer,
        iterations=iterations,
        status="failed" if batch.failure is not None else None,
    )
    if isinstance(batch.failure, NonConvergence):
        batch.failure.report = report
        raise batch.failure
    return report


def run_submitted_circuit(source: str, shots: int, seed: int, system: System,
                          model=Model.PER_JOB, app_nodes: int = 1, sim_nodes: int = 2,
                          backend_id: str | None = None,
                          workers: int | None = None) -> RunReport:
    """One user-provided QASM program run as a hybrid job (the submit command)."""
    prefs = Preferences(backend_id=backend_id, workers=workers)

    def body(batch: QuantumBatch):
        task = batch.submit(source, shots, seed, prefs)
        yield from batch.run_batch([task])

    batch, cluster = run_hybrid_job(system, model, app_nodes, sim_nodes, body)
    outcome = batch.outcomes[0] if batch.outcomes else None
    if outcome is not None and outcome.counts is not None:
        from .report import counts_digest

        answer = f"counts={counts_digest(outcome.counts)}"
    else:
        answer = "error"
    return _assemble(system, "submit", seed, model, batch, cluster, answer)
