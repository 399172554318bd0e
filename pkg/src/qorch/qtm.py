"""Quantum Task Manager: normalize, route, cut, execute, aggregate.

Incoming programs (QASM text or IR) become tasks with fresh ids.  Routing
follows qubit-count and depth heuristics unless user preferences name a
backend, in which case the preference wins or fails loudly.  Separable
circuits routed to simulator backends are cut into independent subcircuits
southbound and their shot lists are recombined northbound.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import count

import numpy as np

from .circuit import Circuit, CregSlice, interaction_components, split_circuit, depth
from .qasm import parse_qasm
from .qpm import (
    BackendDescriptor,
    BackendKind,
    BackendRegistry,
    ExecuteRequest,
    ExecuteResult,
)
from .seeds import derive_seed
from .statevec import Counts, ExecutionTrace


class NoFeasibleBackend(RuntimeError):
    pass


class IncompatiblePreference(ValueError):
    pass


class ShotMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Preferences:
    backend_id: str | None = None
    backend_kind: BackendKind | None = None
    workers: int | None = None
    allow_cutting: bool = True


@dataclass(frozen=True)
class QuantumTask:
    task_id: str
    circuit: Circuit
    shots: int
    seed: int
    preferences: Preferences = Preferences()
    origin_job_id: str | None = None


@dataclass(frozen=True)
class CutSubtask:
    circuit: Circuit
    qubit_map: dict[int, int]
    owned: tuple[CregSlice, ...]
    seed: int


@dataclass(frozen=True)
class CutPlan:
    subtasks: tuple[CutSubtask, ...]
    original_cregs: tuple[tuple[str, int], ...]
    seed: int


@dataclass(frozen=True)
class RoutingDecision:
    backend_id: str
    backend_kind: BackendKind
    workers: int
    cut: CutPlan | None = None


@dataclass(frozen=True)
class RoutingConfig:
    sv_max: int = 24
    tn_depth_max: int = 1000
    local_qubits_per_worker: int = 20
    gang_limit: int = 8


def _floor_pow2(x: int) -> int:
    return 1 if x < 1 else 1 << (x.bit_length() - 1)


class SubtaskRunner:
    """Runs independent subtask calls; 'parallel' composes service times with
    max, 'serial' with sum."""

    def __init__(self, mode: str = "parallel", max_workers: int | None = None):
        if mode not in ("parallel", "serial"):
            raise ValueError(f"unknown runner mode {mode!r}")
        self.mode = mode
        self.max_workers = max_workers

    def run_all(self, calls):
        if self.mode == "serial" or len(calls) <= 1:
            return [call() for call in calls]
        with ThreadPoolExecutor(max_workers=self.max_workers or len(calls)) as pool:
            futures = [pool.submit(call) for call in calls]
        # surface the first (lowest-index) failure, not the first to finish
        results = []
        first_error = None
        for fut in futures:
            exc = fut.exception()
            if exc is not None and first_error is None:
                first_error = exc
            results.append(None if exc else fut.result())
        if first_error is not None:
            raise first_error
        return results

    def combine_times(self, times) -> float:
        if not times:
            return 0.0
        return max(times) if self.mode == "parallel" else sum(times)


class TaskManager:
    """Stateful front door: holds the registry, routing config, and task ids."""

    def __init__(self, registry: BackendRegistry, routing: RoutingConfig = RoutingConfig()):
        self.registry = registry
        self.routing = routing
        self._ids = count(1)

    # -- normalize ---------------------------------------------------------

    def normalize(self, source: str | Circuit, shots: int, seed: int,
                  preferences: Preferences | None = None,
                  origin_job_id: str | None = None) -> QuantumTask:
        """Wrap QASM text or an IR circuit into a task with a fresh id."""
        if shots < 1:
            raise ValueError("shots must be >= 1")
        circuit = parse_qasm(source) if isinstance(source, str) else source
        task_id = f"task-{next(self._ids):04d}"
        return QuantumTask(
            task_id, circuit, shots, seed,
            preferences or Preferences(), origin_job_id,
        )

    # -- route -------------------------------------------------------------

    def route(self, task: QuantumTask) -> RoutingDecision:
        """Pick a backend and worker count; user preferences supersede heuristics."""
        if not self.registry.list():
            raise NoFeasibleBackend("no backends registered")
        c = task.circuit
        n = c.num_qubits
        prefs = task.preferences

        desc = None
        if prefs.backend_id is not None:
            try:
                desc = self.registry.descriptor(prefs.backend_id)
            except KeyError:
                raise IncompatiblePreference(
                    f"preferred backend {prefs.backend_id!r} is not registered"
                ) from None
            self._check_fit(desc, c)
        elif prefs.backend_kind is not None:
            kind = BackendKind(prefs.backend_kind)
            candidates = [d for d in self.registry.list() if d.kind is kind]
            if not candidates:
                raise IncompatiblePreference(f"no backend of kind {kind.value!r}")
            desc = candidates[0]
            self._check_fit(desc, c)
        else:
            svs = [d for d in self.registry.list() if d.kind is BackendKind.STATE_VECTOR]
            tns = [d for d in self.registry.list() if d.kind is BackendKind.TENSOR_NETWORK]
            if svs and n <= self.routing.sv_max:
                desc = svs[0]
            elif tns and depth(c) <= self.routing.tn_depth_max:
                desc = tns[0]
            else:
                raise NoFeasibleBackend(
                    f"no backend can take a {n}-qubit circuit "
                    f"(sv_max={self.routing.sv_max})"
                )

        workers = self._pick_workers(desc, n, prefs)
        cut = None
        if (
            prefs.allow_cutting
            and desc.kind is not BackendKind.HARDWARE
            and len(interaction_components(c)) > 1
        ):
            cut = self.cut(task)
        return RoutingDecision(desc.id, desc.kind, workers, cut)

    def _check_fit(self, desc: BackendDescriptor, c: Circuit) -> None:
        from .circuit import has_conditionals, has_mid_circuit

        problems = []
        if c.num_qubits > desc.max_qubits:
            problems.append(
                f"{c.num_qubits} qubits exceed max_qubits={desc.max_qubits}"
            )
        if not desc.supports_mid_circuit and has_mid_circuit(c):
            problems.append("mid-circuit measurement unsupported")
        if not desc.supports_conditionals and has_conditionals(c):
            problems.append("conditioned gates unsupported")
        if problems:
            raise IncompatiblePreference(
                f"backend {desc.id!r} incompatible: " + "; ".join(problems)
            )

    def _pick_workers(self, desc: BackendDescriptor, n: int, prefs: Preferences) -> int:
        if prefs.workers is not None:
            w = prefs.workers
            if w < 1 or w & (w - 1):
                raise IncompatiblePreference(f"workers must be a power of two, got {w}")
            if w > 2**n:
                raise IncompatiblePreference(f"workers {w} exceeds 2^{n}")
            if desc.kind is BackendKind.HARDWARE and w != 1:
                raise IncompatiblePreference("hardware backends run with workers=1")
            return w
        if desc.kind is BackendKind.HARDWARE:
            return 1
        grown = 2 ** max(0, n - self.routing.local_qubits_per_worker)
        return _floor_pow2(min(self.routing.gang_limit, grown))

    # -- cut ----------------------------------------------------------------

    def cut(self, task: QuantumTask) -> CutPlan:
        """Separability cut along interaction components; singleton when whole."""
        subs = split_circuit(task.circuit)
        subtasks = tuple(
            CutSubtask(
                circuit=s.circuit,
                qubit_map=s.qubit_map,
                owned=s.owned,
                seed=derive_seed(task.seed, "subtask", k),
            )
            for k, s in enumerate(subs)
        )
        return CutPlan(subtasks, task.circuit.cregs, task.seed)

    # -- aggregate ------------------------------------------------------------

    @staticmethod
    def aggregate(plan: CutPlan, results: list[Counts]) -> Counts:
        """Recombine subtask shot lists into the original creg layout.

        Each subtask's counts expand into a sorted shot list, shuffled by a
        seed-derived permutation so pairing introduces no spurious
        correlations; shot i of every subtask merges into output shot i.
        """
        if len(results) != len(plan.subtasks):
            raise ShotMismatch(
                f"{len(results)} results for {len(plan.subtasks)} subtasks"
            )
        totals = {counts.total() for counts in results}
        if len(totals) > 1:
            raise ShotMismatch(f"subtask shot totals differ: {sorted(totals)}")
        shots = totals.pop() if totals else 0

        offsets: dict[str, int] = {}
        acc = 0
        for name, size in plan.original_cregs:
            offsets[name] = acc
            acc += size
        total_bits = acc
        if total_bits > 63:
            raise ValueError("aggregation supports up to 63 classical bits")

        merged = np.zeros(shots, dtype=np.uint64)
        for k, (subtask, counts) in enumerate(zip(plan.subtasks, results)):
            contribution = {
                key: _owned_bits_value(key, subtask, offsets) for key in counts
            }
            expanded = np.concatenate(
                [
                    np.full(counts[key], contribution[key], dtype=np.uint64)
                    for key in sorted(counts)
                ]
            ) if counts else np.zeros(0, dtype=np.uint64)
            rng = np.random.default_rng(derive_seed(plan.seed, "aggregate", k))
            merged |= expanded[rng.permutation(shots)]

        values, tallies = np.unique(merged, return_counts=True)
        out = Counts()
        for value, tally in zip(values, tallies):
            key = " ".join(
                format((int(value) >> offsets[name]) & ((1 << size) - 1), f"0{size}b")
                for name, size in plan.original_cregs
            )
            out[key] = int(tally)
        return Counts(sorted(out.items()))

    # -- end to end -----------------------------------------------------------

    def execute_task(self, task: QuantumTask,
                     runner: SubtaskRunner | None = None) -> ExecuteResult:
        """Route, cut, execute (possibly concurrently), and aggregate one task."""
        runner = runner or SubtaskRunner()
        decision = self.route(task)

        if decision.cut is not None and len(decision.cut.subtasks) > 1:
            plan = decision.cut

            def make_call(index: int, subtask: CutSubtask):
                sub_workers = min(
                    decision.workers, 2**subtask.circuit.num_qubits
                )
                request = ExecuteRequest(
                    task_id=f"{task.task_id}.{index}",
                    circuit=subtask.circuit,
                    shots=task.shots,
                    seed=subtask.seed,
                    workers=_floor_pow2(sub_workers),
                )
                return lambda: self.registry.execute(decision.backend_id, request)

            calls = [make_call(i, s) for i, s in enumerate(plan.subtasks)]
            results = runner.run_all(calls)
            counts = self.aggregate(plan, [r.counts for r in results])
            trace = ExecutionTrace(seed=task.seed)
            for r in results:
                trace = trace + r.trace
            service = runner.combine_times([r.modeled_service_time for r in results])
            wait = runner.combine_times([r.queue_wait for r in results])
            return ExecuteResult(
                task.task_id, counts, trace, decision.backend_id, service, wait
            )

        request = ExecuteRequest(
            task_id=task.task_id,
            circuit=task.circuit,
            shots=task.shots,
            seed=task.seed,
            workers=decision.workers,
        )
        result = self.registry.execute(decision.backend_id, request)
        result.task_id = task.task_id
        return result


def _owned_bits_value(key: str, subtask: CutSubtask, offsets: dict[str, int]) -> int:
    """Map one subtask outcome bitstring onto the original creg bit positions."""
    groups = key.split(" ") if key else []
    layout = subtask.circuit.cregs
    values = {name: int(group, 2) if group else 0 for (name, _), group in zip(layout, groups)}
    packed = 0
    for cslice in subtask.owned:
        sub_value = values.get(cslice.name, 0)
        for j, original_bit in enumerate(cslice.bits):
            packed |= ((sub_value >> j) & 1) << (offsets[cslice.name] + original_bit)
    return packed
