"""Fixed gate vocabulary and its unitary matrices.

Two-qubit matrices use a little-endian operand convention: the index of the
4x4 matrix is ``bit(q1)*2 + bit(q0)`` where ``[q0, q1]`` is the operand list,
matching the little-endian amplitude layout used by the simulator (qubit 0 is
the least-significant amplitude index bit).
"""
from __future__ import annotations

import math
from enum import Enum

import numpy as np


class GateKind(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    U = "u"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"
    ID = "id"

    @property
    def num_qubits(self) -> int:
        return 2 if self in (GateKind.CX, GateKind.CZ, GateKind.SWAP) else 1

    @property
    def num_params(self) -> int:
        if self in (GateKind.RX, GateKind.RY, GateKind.RZ):
            return 1
        if self is GateKind.U:
            return 3
        return 0


_SQ2 = 1.0 / math.sqrt(2.0)

_FIXED = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex),
    GateKind.ID: np.eye(2, dtype=complex),
    GateKind.CX: np.array(
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
    ),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def gate_unitary(kind: GateKind, params: tuple[float, ...] = ()) -> np.ndarray:
    """Return the unitary for a gate kind; raises ValueError on arity mismatch."""
    if len(params) != kind.num_params:
        raise ValueError(
            f"gate '{kind.value}' expects {kind.num_params} parameter(s), got {len(params)}"
        )
    if kind in _FIXED:
        return _FIXED[kind].copy()
    if kind is GateKind.RX:
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        (lam,) = params
        return np.array(
            [[np.exp(-0.5j * lam), 0], [0, np.exp(0.5j * lam)]], dtype=complex
        )
    if kind is GateKind.U:
        theta, phi, lam = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array(
            [
                [c, -np.exp(1j * lam) * s],
                [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
            ],
            dtype=complex,
        )
    raise ValueError(f"unknown gate kind {kind!r}")
