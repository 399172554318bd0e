"""Discrete-event cluster with co-allocated hybrid jobs and a device queue.

Jobs request an application partition and (under the per-job model) a
simulation partition; both are granted atomically at one timestamp or not at
all.  Under the single-QC model a cluster-wide device is shared through an
exclusive FIFO queue.  The clock is logical: service times come from the
platform timing models, so whole scheduling experiments are deterministic.

Job behavior is described by a workload object whose ``body(ctx)`` generator
yields steps the engine interprets:

    yield Advance(seconds)            # local classical compute
    yield DeviceCall(hold, tag)       # FIFO device access; resumes after hold
    yield ParallelDeviceCalls(holds)  # several outstanding requests at once

A plain float workload is shorthand for one Advance of that duration, and
``None`` makes a manually driven job that runs until release() is called.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from itertools import count

MAX_EVENTS = 1_000_000  # safety cap against runaway scenarios


class Model(str, Enum):
    SINGLE_QC = "single_qc"
    PER_JOB = "per_job"


class InvalidSpec(ValueError):
    pass


class NoDevice(RuntimeError):
    pass


class NotHeld(RuntimeError):
    pass


@dataclass(frozen=True)
class ClusterConfig:
    total_nodes: int
    single_qc_device: str | None = None
    backfill: bool = False

    def __post_init__(self):
        if self.total_nodes < 1:
            raise InvalidSpec("cluster must have at least one node")


@dataclass(frozen=True)
class JobSpec:
    job_id: str
    app_nodes: int
    sim_nodes: int
    model: Model
    workload: object = None  # float duration, Workload-like, or None (manual)
    submit_time: float = 0.0


@dataclass(frozen=True)
class Allocation:
    job_id: str
    app: frozenset[int]
    sim: frozenset[int]
    granted_at: float

    @property
    def nodes(self) -> frozenset[int]:
        return self.app | self.sim


@dataclass(frozen=True)
class EventRecord:
    time: float
    kind: str  # submit grant device_acquire device_release complete fail
    job_id: str
    payload: dict = field(default_factory=dict)

    def to_line(self) -> str:
        detail = ",".join(f"{k}={v}" for k, v in sorted(self.payload.items()))
        return f"{self.time:.9g} {self.kind} {self.job_id} {detail}".rstrip()


# -- workload step vocabulary -------------------------------------------------


@dataclass(frozen=True)
class Advance:
    seconds: float


@dataclass(frozen=True)
class DeviceCall:
    hold: float
    tag: str | None = None


@dataclass(frozen=True)
class ParallelDeviceCalls:
    holds: tuple[float, ...]
    tags: tuple[str, ...] | None = None


@dataclass(frozen=True)
class DeviceGrant:
    granted_at: float
    wait: float
    tag: str | None = None


class FixedWorkload:
    """Pure classical compute for a fixed duration."""

    def __init__(self, duration: float):
        self.projected_duration = float(duration)

    def body(self, ctx):
        yield Advance(self.projected_duration)


class GeneratorWorkload:
    """Adapts a generator function fn(ctx) into a workload."""

    def __init__(self, fn, projected_duration: float = float("inf")):
        self._fn = fn
        self.projected_duration = projected_duration

    def body(self, ctx):
        return self._fn(ctx)


class JobState(str, Enum):
    QUEUED = "queued"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class JobContext:
    job_id: str
    cluster: "Cluster"
    allocation: Allocation | None = None

    @property
    def now(self) -> float:
        return self.cluster.now


@dataclass
class _JobRun:
    spec: JobSpec
    state: JobState = JobState.QUEUED
    allocation: Allocation | None = None
    generator: object = None
    projected_end: float = float("inf")
    submit_seq: int = 0
    # outstanding device-call bookkeeping for the current yield
    pending_total: int = 0
    pending_done: int = 0
    pending_results: list = field(default_factory=list)


@dataclass
class _DeviceRequest:
    seq: int
    job_id: str
    hold: float | None
    tag: str | None
    requested_at: float
    slot: int | None = None  # index into the job's pending_results, None if manual
    granted_at: float | None = None
    wait: float = 0.0


class Cluster:
    """Event-serial cluster state machine; one instance per simulation run."""

    def __init__(self, config: ClusterConfig, on_event=None):
        self.config = config
        self.now = 0.0
        self.log: list[EventRecord] = []
        self._heap: list[tuple[float, int, str, object]] = []
        self._seq = count()
        self._jobs: dict[str, _JobRun] = {}
        self._queue: list[str] = []
        self._free: list[int] = list(range(config.total_nodes))
        self._device_holder: _DeviceRequest | None = None
        self._device_queue: list[_DeviceRequest] = []
        self._device_request_order: list[int] = []
        self._device_grant_order: list[int] = []
        self._events_processed = 0
        self.on_event = on_event

    # -- public ops ----------------------------------------------------------

    def submit_job(self, spec: JobSpec) -> str:
        """Queue a job; never-satisfiable specs are rejected immediately."""
        if spec.job_id in self._jobs:
            raise InvalidSpec(f"duplicate job id {spec.job_id!r}")
        if spec.app_nodes < 1:
            raise InvalidSpec("app_nodes must be >= 1")
        model = Model(spec.model)
        if model is Model.PER_JOB and spec.sim_nodes < 1:
            raise InvalidSpec("per_job jobs need a simulation partition (sim_nodes >= 1)")
        if model is Model.SINGLE_QC:
            if spec.sim_nodes != 0:
                raise InvalidSpec("single_qc jobs must not request sim nodes")
            if self.config.single_qc_device is None:
                raise InvalidSpec("cluster has no single-QC device")
        if spec.app_nodes + spec.sim_nodes > self.config.total_nodes:
            raise InvalidSpec(
                f"job needs {spec.app_nodes + spec.sim_nodes} nodes, cluster has "
                f"{self.config.total_nodes}"
            )
        run = _JobRun(spec=spec, submit_seq=next(self._seq))
        self._jobs[spec.job_id] = run
        self._push(spec.submit_time, "submit", spec.job_id)
        return spec.job_id

    def tick(self) -> float | None:
        """Advance to the next event time; fire grants and completions there."""
        if not self._heap:
            return None
        t = self._heap[0][0]
        self.now = t
        batch: list[tuple[str, object]] = []
        while self._heap and self._heap[0][0] == t:
            _, _, kind, payload = heapq.heappop(self._heap)
            batch.append((kind, payload))
        for kind, payload in batch:
            self._events_processed += 1
            if self._events_processed > MAX_EVENTS:
                raise RuntimeError("event cap exceeded; runaway scenario aborted")
            if kind == "submit":
                self._handle_submit(payload)
            elif kind == "wake":
                self._step(payload, None)
            elif kind == "device_release":
                self._auto_release(payload)
        self._schedule_pass()
        if self.on_event is not None:
            self.on_event(self)
        return t

    def run(self) -> None:
        while self.tick() is not None:
            pass

    def acquire_device(self, job_id: str, hold: float | None = None):
        """FIFO exclusive device access; DeviceGrant now or the queue position."""
        run = self._running(job_id)
        if Model(run.spec.model) is not Model.SINGLE_QC:
            raise NoDevice(f"job {job_id!r} runs under the per-job model")
        if self.config.single_qc_device is None:
            raise NoDevice("cluster has no single-QC device")
        request = _DeviceRequest(
            next(self._seq), job_id, hold, None, self.now, slot=None
        )
        self._device_queue.append(request)
        self._device_request_order.append(request.seq)
        self._pump_device()
        if self._device_holder is request:
            return DeviceGrant(self.now, 0.0)
        return self._device_queue.index(request) + 1

    def release(self, job_id: str) -> None:
        """Return the device if held, else the job's node allocation."""
        run = self._jobs.get(job_id)
        if self._device_holder is not None and self._device_holder.job_id == job_id:
            self._release_device()
            self._schedule_pass()
            return
        if run is not None and run.state is JobState.RUNNING:
            self._complete(job_id)
            self._schedule_pass()
            return
        raise NotHeld(f"job {job_id!r} holds no allocation or device")

    def metrics(self) -> dict:
        """Waits, turnarounds, node utilization, and the device wait distribution."""
        submit: dict[str, float] = {}
        grants: dict[str, float] = {}
        ends: dict[str, float] = {}
        device_waits: list[float] = []
        t_first = self.log[0].time if self.log else 0.0
        t_last = self.log[-1].time if self.log else 0.0
        for rec in self.log:
            if rec.kind == "submit":
                submit[rec.job_id] = rec.time
            elif rec.kind == "grant":
                grants[rec.job_id] = rec.time
            elif rec.kind in ("complete", "fail"):
                ends[rec.job_id] = rec.time
            elif rec.kind == "device_acquire":
                device_waits.append(rec.payload["wait"])
        waits = {j: grants[j] - submit[j] for j in grants if j in submit}
        turnaround = {j: ends[j] - submit[j] for j in ends if j in submit}
        busy = 0.0
        for job_id, t_end in ends.items():
            if job_id in grants:
                spec = self._jobs[job_id].spec
                busy += (spec.app_nodes + spec.sim_nodes) * (t_end - grants[job_id])
        horizon = t_last - t_first
        utilization = busy / (self.config.total_nodes * horizon) if horizon > 0 else 0.0
        return {
            "wait": waits,
            "turnaround": turnaround,
            "utilization": utilization,
            "device_waits": device_waits,
        }

    # -- introspection ---------------------------------------------------------

    def job_state(self, job_id: str) -> JobState:
        return self._jobs[job_id].state

    def state_counts(self) -> dict[str, int]:
        out = {s.value: 0 for s in JobState}
        for run in self._jobs.values():
            out[run.state.value] += 1
        return out

    def live_allocations(self) -> list[Allocation]:
        return [
            run.allocation
            for run in self._jobs.values()
            if run.state is JobState.RUNNING and run.allocation is not None
        ]

    @property
    def device_grant_order(self) -> list[int]:
        return list(self._device_grant_order)

    @property
    def device_request_order(self) -> list[int]:
        return list(self._device_request_order)

    def export_log(self) -> str:
        return "\n".join(rec.to_line() for rec in self.log) + ("\n" if self.log else "")

    # -- internals ----------------------------------------------------------------

    def _push(self, time: float, kind: str, payload) -> None:
        heapq.heappush(self._heap, (time, next(self._seq), kind, payload))

    def _record(self, kind: str, job_id: str, **payload) -> None:
        self.log.append(EventRecord(self.now, kind, job_id, payload))

    def _running(self, job_id: str) -> _JobRun:
        run = self._jobs.get(job_id)
        if run is None or run.state is not JobState.RUNNING:
            raise InvalidSpec(f"job {job_id!r} is not running")
        return run

    def _handle_submit(self, job_id: str) -> None:
        self._queue.append(job_id)
        self._record("submit", job_id)

    def _fits(self, spec: JobSpec) -> bool:
        return spec.app_nodes + spec.sim_nodes <= len(self._free)

    def _schedule_pass(self) -> None:
        # FIFO head first; all-or-nothing grants at this timestamp.
        while self._queue and self._fits(self._jobs[self._queue[0]].spec):
            self._grant(self._queue.pop(0))
        if self.config.backfill and self._queue:
            head = self._jobs[self._queue[0]].spec
            head_start = self._earliest_start(head.app_nodes + head.sim_nodes)
            for job_id in list(self._queue[1:]):
                run = self._jobs[job_id]
                if not self._fits(run.spec):
                    continue
                duration = _projected_duration(run.spec.workload)
                if self.now + duration <= head_start:
                    self._queue.remove(job_id)
                    self._grant(job_id)

    def _earliest_start(self, need: int) -> float:
        """Earliest time the head job could start, from projected completions."""
        free = len(self._free)
        if free >= need:
            return self.now
        releases = sorted(
            (run.projected_end, run.spec.app_nodes + run.spec.sim_nodes)
            for run in self._jobs.values()
            if run.state is JobState.RUNNING
        )
        for when, nodes in releases:
            free += nodes
            if free >= need:
                return when
        return float("inf")

    def _grant(self, job_id: str) -> None:
        run = self._jobs[job_id]
        spec = run.spec
        app = frozenset(self._free[: spec.app_nodes])
        sim = frozenset(self._free[spec.app_nodes : spec.app_nodes + spec.sim_nodes])
        self._free = self._free[spec.app_nodes + spec.sim_nodes :]
        run.allocation = Allocation(job_id, app, sim, self.now)
        run.state = JobState.RUNNING
        run.projected_end = self.now + _projected_duration(spec.workload)
        self._record(
            "grant", job_id,
            app=_nodeset(app), sim=_nodeset(sim),
        )
        workload = _as_workload(spec.workload)
        if workload is not None:
            ctx = JobContext(job_id, self, run.allocation)
            run.generator = workload.body(ctx)
            self._step(job_id, None)

    def _step(self, job_id: str, value) -> None:
        run = self._jobs[job_id]
        if run.state is not JobState.RUNNING or run.generator is None:
            return
        try:
            if isinstance(value, BaseException):
                item = run.generator.throw(value)
            else:
                item = run.generator.send(value)
        except StopIteration:
            self._complete(job_id)
            return
        except NoDevice:
            self._fail(job_id, "NoDevice")
            return
        except Exception as exc:  # workload programming error
            self._fail(job_id, f"{type(exc).__name__}: {exc}")
            return
        if isinstance(item, Advance):
            self._push(self.now + item.seconds, "wake", job_id)
        elif isinstance(item, DeviceCall):
            run.pending_total = 1
            run.pending_done = 0
            run.pending_results = [None]
            self._request_from_workload(run, item.hold, item.tag, slot=0)
        elif isinstance(item, ParallelDeviceCalls):
            holds = tuple(item.holds)
            if not holds:
                self._step(job_id, [])
                return
            run.pending_total = len(holds)
            run.pending_done = 0
            run.pending_results = [None] * len(holds)
            tags = item.tags or (None,) * len(holds)
            for slot, (hold, tag) in enumerate(zip(holds, tags)):
                self._request_from_workload(run, hold, tag, slot)
        else:
            self._fail(job_id, f"workload yielded unknown step {item!r}")

    def _request_from_workload(self, run: _JobRun, hold: float, tag, slot: int) -> None:
        spec = run.spec
        if Model(spec.model) is not Model.SINGLE_QC or self.config.single_qc_device is None:
            self._step(spec.job_id, NoDevice(f"job {spec.job_id!r} has no device access"))
            return
        request = _DeviceRequest(
            next(self._seq), spec.job_id, hold, tag, self.now, slot
        )
        self._device_queue.append(request)
        self._device_request_order.append(request.seq)
        self._pump_device()

    def _pump_device(self) -> None:
        while self._device_holder is None and self._device_queue:
            request = self._device_queue.pop(0)
            run = self._jobs.get(request.job_id)
            if request.slot is not None and (
                run is None or run.state is not JobState.RUNNING
            ):
                continue  # the job failed while queued; drop its request
            request.granted_at = self.now
            request.wait = self.now - request.requested_at
            self._device_holder = request
            self._device_grant_order.append(request.seq)
            self._record(
                "device_acquire", request.job_id,
                wait=request.wait, tag=request.tag or "",
                device=self.config.single_qc_device,
            )
            if request.hold is not None:
                self._push(self.now + request.hold, "device_release", request)
            return  # manual holds wait for an explicit release()

    def _auto_release(self, request: _DeviceRequest) -> None:
        if self._device_holder is not request:
            return  # released manually in the meantime
        self._release_device()
        run = self._jobs.get(request.job_id)
        if run is None or request.slot is None:
            return
        run.pending_results[request.slot] = DeviceGrant(
            request.granted_at, request.wait, request.tag
        )
        run.pending_done += 1
        if run.pending_done == run.pending_total:
            results = run.pending_results
            run.pending_total = run.pending_done = 0
            run.pending_results = []
            value = results[0] if len(results) == 1 else results
            self._step(request.job_id, value)

    def _release_device(self) -> None:
        holder = self._device_holder
        self._device_holder = None
        self._record(
            "device_release", holder.job_id,
            tag=holder.tag or "", device=self.config.single_qc_device,
        )
        self._pump_device()

    def _complete(self, job_id: str) -> None:
        run = self._jobs[job_id]
        run.state = JobState.COMPLETED
        self._free = sorted(self._free + list(run.allocation.nodes))
        self._record("complete", job_id)
        run.allocation = None
        run.generator = None

    def _fail(self, job_id: str, reason: str) -> None:
        run = self._jobs[job_id]
        run.state = JobState.FAILED
        if run.allocation is not None:
            self._free = sorted(self._free + list(run.allocation.nodes))
        self._record("fail", job_id, reason=reason)
        run.allocation = None
        run.generator = None


def _as_workload(workload):
    if workload is None:
        return None
    if isinstance(workload, (int, float)):
        return FixedWorkload(float(workload))
    return workload


def _projected_duration(workload) -> float:
    if workload is None:
        return float("inf")
    if isinstance(workload, (int, float)):
        return float(workload)
    return getattr(workload, "projected_duration", float("inf"))


def _nodeset(nodes: frozenset[int]) -> str:
    return "+".join(str(n) for n in sorted(nodes)) or "-"
