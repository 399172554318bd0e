"""Quantum Platform Manager: the uniform backend plugin contract.

A registry maps backend descriptors to implementations behind one execute /
calibration API.  Two backends ship with the system: an ideal state-vector
simulator and a mock hardware device that reuses the ideal simulation and
flips readout bits with a calibrated probability.  A tensor-network
descriptor can be registered without an implementation; executing it raises
NotImplementedError until an external plugin provides one.

All service times are logical model values (seconds), never wall clock, so
the schedulers above this layer stay deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .circuit import Circuit, gate_count, has_conditionals, has_mid_circuit
from .seeds import derive_seed
from .statevec import Counts, ExecutionTrace, run


class BackendKind(str, Enum):
    STATE_VECTOR = "state_vector"
    TENSOR_NETWORK = "tensor_network"
    HARDWARE = "hardware"


class DuplicateId(ValueError):
    pass


class UnknownBackend(KeyError):
    pass


class CircuitTooLarge(ValueError):
    pass


class MidCircuitUnsupported(ValueError):
    pass


@dataclass(frozen=True)
class BackendDescriptor:
    id: str
    kind: BackendKind
    max_qubits: int
    supports_mid_circuit: bool = True
    supports_conditionals: bool = True
    concurrency: int = 1


@dataclass(frozen=True)
class CalibrationInfo:
    readout_flip_probability: float
    # (fixed overhead seconds, seconds per shot*gate)
    service_time_params: tuple[float, float]
    captured_at: float = 0.0


@dataclass(frozen=True)
class ExecuteRequest:
    task_id: str
    circuit: Circuit
    shots: int
    seed: int
    workers: int = 1
    submitted_at: float = 0.0

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class ExecuteResult:
    task_id: str
    counts: Counts
    trace: ExecutionTrace
    backend_id: str
    modeled_service_time: float
    queue_wait: float = 0.0


class StateVectorBackend:
    """Ideal chunked state-vector execution with a simple timing model."""

    def __init__(self, alpha: float = 1e-3, beta: float = 1e-9):
        self.alpha = alpha
        self.beta = beta

    def execute(self, request: ExecuteRequest, descriptor: BackendDescriptor) -> ExecuteResult:
        counts, trace = run(
            request.circuit, request.shots, request.seed, request.workers,
            max_qubits=descriptor.max_qubits,
        )
        g = gate_count(request.circuit)
        service = self.alpha + self.beta * g * 2**request.circuit.num_qubits / request.workers
        return ExecuteResult(request.task_id, counts, trace, descriptor.id, service)

    def calibration(self) -> CalibrationInfo:
        return CalibrationInfo(0.0, (0.0, 0.0))


class MockHardwareBackend:
    """Ideal simulation plus independent readout bit flips with probability p.

    Flip draws come from one counter-keyed stream indexed by (shot, bit), so
    they are a pure function of (request seed, shot, bit) regardless of how
    the shot list is enumerated.
    """

    def __init__(self, readout_flip_probability: float = 0.02,
                 alpha_q: float = 1.0, beta_q: float = 1e-6):
        if not 0.0 <= readout_flip_probability <= 1.0:
            raise ValueError("readout flip probability must be in [0, 1]")
        self.p = readout_flip_probability
        self.alpha_q = alpha_q
        self.beta_q = beta_q

    def execute(self, request: ExecuteRequest, descriptor: BackendDescriptor) -> ExecuteResult:
        counts, trace = run(
            request.circuit, request.shots, request.seed, workers=1,
            max_qubits=descriptor.max_qubits,
        )
        if self.p > 0.0:
            counts = self._flip(counts, request.shots, request.seed)
        g = gate_count(request.circuit)
        service = self.alpha_q + self.beta_q * request.shots * g
        return ExecuteResult(request.task_id, counts, trace, descriptor.id, service)

    def _flip(self, counts: Counts, shots: int, seed: int) -> Counts:
        keys = sorted(counts)
        if not keys or keys == [""]:
            return counts
        positions = [i for i, ch in enumerate(keys[0]) if ch != " "]
        rng = np.random.Generator(np.random.Philox(key=derive_seed(seed, "readout")))
        flips = rng.random((shots, len(positions))) < self.p
        out = Counts()
        shot = 0
        for key in keys:
            for _ in range(counts[key]):
                chars = list(key)
                for j, pos in enumerate(positions):
                    if flips[shot, j]:
                        chars[pos] = "1" if chars[pos] == "0" else "0"
                flipped = "".join(chars)
                out[flipped] = out.get(flipped, 0) + 1
                shot += 1
        return Counts(sorted(out.items()))

    def calibration(self) -> CalibrationInfo:
        return CalibrationInfo(self.p, (self.alpha_q, self.beta_q))


@dataclass
class _Entry:
    descriptor: BackendDescriptor
    implementation: object | None


class BackendRegistry:
    """Read-mostly registry shared by routing and execution."""

    def __init__(self):
        self._entries: dict[str, _Entry] = {}

    def register(self, descriptor: BackendDescriptor, implementation=None) -> None:
        if descriptor.id in self._entries:
            raise DuplicateId(f"backend {descriptor.id!r} already registered")
        if descriptor.kind is BackendKind.HARDWARE and descriptor.concurrency != 1:
            raise ValueError("hardware backends must have concurrency 1")
        self._entries[descriptor.id] = _Entry(descriptor, implementation)

    def list(self) -> list[BackendDescriptor]:
        return [e.descriptor for e in self._entries.values()]

    def descriptor(self, backend_id: str) -> BackendDescriptor:
        try:
            return self._entries[backend_id].descriptor
        except KeyError:
            raise UnknownBackend(backend_id) from None

    def get_calibration(self, backend_id: str) -> CalibrationInfo:
        entry = self._entry(backend_id)
        impl = entry.implementation
        if impl is None or not hasattr(impl, "calibration"):
            return CalibrationInfo(0.0, (0.0, 0.0))
        return impl.calibration()

    def execute(self, backend_id: str, request: ExecuteRequest) -> ExecuteResult:
        entry = self._entry(backend_id)
        desc = entry.descriptor
        c = request.circuit
        if c.num_qubits > desc.max_qubits:
            raise CircuitTooLarge(
                f"circuit has {c.num_qubits} qubits; backend {desc.id!r} "
                f"supports at most {desc.max_qubits}"
            )
        if not desc.supports_mid_circuit and has_mid_circuit(c):
            raise MidCircuitUnsupported(
                f"backend {desc.id!r} does not support mid-circuit measurement"
            )
        if not desc.supports_conditionals and has_conditionals(c):
            raise MidCircuitUnsupported(
                f"backend {desc.id!r} does not support conditioned gates"
            )
        if entry.implementation is None:
            raise NotImplementedError(
                f"backend {desc.id!r} ({desc.kind.value}) has no execution engine; "
                "register an external plugin implementation"
            )
        return entry.implementation.execute(request, desc)

    def _entry(self, backend_id: str) -> _Entry:
        try:
            return self._entries[backend_id]
        except KeyError:
            raise UnknownBackend(backend_id) from None


# module-level operation aliases matching the registry surface
def register_backend(registry: BackendRegistry, descriptor: BackendDescriptor,
                     implementation=None) -> None:
    registry.register(descriptor, implementation)


def list_backends(registry: BackendRegistry) -> list[BackendDescriptor]:
    return registry.list()


def get_calibration(registry: BackendRegistry, backend_id: str) -> CalibrationInfo:
    return registry.get_calibration(backend_id)


def execute(registry: BackendRegistry, backend_id: str, request: ExecuteRequest) -> ExecuteResult:
    return registry.execute(backend_id, request)
