"""Independent brute-force oracle: full-matrix simulation of static circuits.

Deliberately avoids the library's gate application path: gates are lifted to
the full 2^n x 2^n space by explicit index arithmetic and multiplied out, so
agreement with the production simulator is a real cross-check.
"""
import math

import numpy as np

_S2 = 1.0 / math.sqrt(2.0)


def oracle_gate_matrix(name, params):
    if name == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if name == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if name == "z":
        return np.diag([1, -1]).astype(complex)
    if name == "h":
        return np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
    if name == "s":
        return np.diag([1, 1j]).astype(complex)
    if name == "sdg":
        return np.diag([1, -1j]).astype(complex)
    if name == "t":
        return np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex)
    if name == "tdg":
        return np.diag([1, np.exp(-1j * math.pi / 4)]).astype(complex)
    if name == "id":
        return np.eye(2, dtype=complex)
    if name == "rx":
        (th,) = params
        return np.array(
            [
                [math.cos(th / 2), -1j * math.sin(th / 2)],
                [-1j * math.sin(th / 2), math.cos(th / 2)],
            ],
            dtype=complex,
        )
    if name == "ry":
        (th,) = params
        return np.array(
            [
                [math.cos(th / 2), -math.sin(th / 2)],
                [math.sin(th / 2), math.cos(th / 2)],
            ],
            dtype=complex,
        )
    if name == "rz":
        (lam,) = params
        return np.diag([np.exp(-0.5j * lam), np.exp(0.5j * lam)]).astype(complex)
    if name == "u":
        th, ph, lam = params
        return np.array(
            [
                [math.cos(th / 2), -np.exp(1j * lam) * math.sin(th / 2)],
                [np.exp(1j * ph) * math.sin(th / 2), np.exp(1j * (ph + lam)) * math.cos(th / 2)],
            ],
            dtype=complex,
        )
    if name == "cx":
        return np.array(
            [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
        )
    if name == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if name == "swap":
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    raise ValueError(name)


def lift(small, qubits, n):
    """Embed a k-qubit matrix into the full space by index arithmetic.

    Small-matrix index convention: bit i of the index is qubits[i]'s bit.
    """
    dim = 2**n
    k = len(qubits)
    mask = 0
    for q in qubits:
        mask |= 1 << q
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        sub_col = 0
        for i, q in enumerate(qubits):
            sub_col |= ((col >> q) & 1) << i
        rest = col & ~mask
        for sub_row in range(2**k):
            row = rest
            for i, q in enumerate(qubits):
                row |= ((sub_row >> i) & 1) << q
            full[row, col] = small[sub_row, sub_col]
    return full


def oracle_probabilities(circuit):
    """Exact probabilities of a gate-only circuit via the full matrix product."""
    n = circuit.num_qubits
    total = np.eye(2**n, dtype=complex)
    for instr in circuit.instructions:
        name = getattr(instr, "kind", None)
        if name is None:  # barrier etc.
            continue
        small = oracle_gate_matrix(name.value, instr.params)
        total = lift(small, instr.qubits, n) @ total
    vec = total[:, 0]
    return np.abs(vec) ** 2


def oracle_statevector(circuit):
    n = circuit.num_qubits
    total = np.eye(2**n, dtype=complex)
    for instr in circuit.instructions:
        name = getattr(instr, "kind", None)
        if name is None:
            continue
        small = oracle_gate_matrix(name.value, instr.params)
        total = lift(small, instr.qubits, n) @ total
    return total[:, 0]
