"""Shared circuit generators for the test suite."""
import numpy as np

from qorch.circuit import CircuitBuilder
from qorch.gates import GateKind

_ALL_GATES = [
    GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG,
    GateKind.T, GateKind.TDG, GateKind.RX, GateKind.RY, GateKind.RZ,
    GateKind.U, GateKind.CX, GateKind.CZ, GateKind.SWAP, GateKind.ID,
]


def random_gate_circuit(n, layers, seed, measure=False):
    """Random circuit over the full gate vocabulary, one gate per qubit-slot."""
    rng = np.random.default_rng(seed)
    cregs = (("c", n),) if measure else ()
    b = CircuitBuilder(n, cregs)
    for _ in range(layers):
        order = rng.permutation(n)
        used = set()
        for q in order:
            q = int(q)
            if q in used:
                continue
            kind = _ALL_GATES[int(rng.integers(len(_ALL_GATES)))]
            if kind.num_qubits == 2:
                free = [p for p in range(n) if p not in used and p != q]
                if not free:
                    kind = GateKind.H
                    b.gate(kind, (q,))
                    used.add(q)
                    continue
                partner = int(free[int(rng.integers(len(free)))])
                b.gate(kind, (q, partner))
                used.update((q, partner))
            else:
                params = tuple(rng.uniform(0, 2 * np.pi, kind.num_params))
                b.gate(kind, (q,), params)
                used.add(q)
    if measure:
        b.measure_all("c")
    return b.build()


def product_circuit(component_sizes, layers, seed, measure=True):
    """Independent random blocks on disjoint qubit groups (cuttable)."""
    rng = np.random.default_rng(seed)
    n = sum(component_sizes)
    cregs = (("c", n),) if measure else ()
    b = CircuitBuilder(n, cregs)
    offset = 0
    for size in component_sizes:
        local = list(range(offset, offset + size))
        for _ in range(layers):
            for q in local:
                b.u(*rng.uniform(0, 2 * np.pi, 3), q)
            if size >= 2:
                pairs = rng.permutation(size)
                for i in range(0, size - 1, 2):
                    b.cx(local[int(pairs[i])], local[int(pairs[i + 1])])
        offset += size
    if measure:
        b.measure_all("c")
    return b.build()
