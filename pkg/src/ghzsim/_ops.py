"""Raw dense state-vector operations shared by the register, circuit, and network code.

Vectors are flat complex arrays of length 2**n. Qubit 0 is the most significant
bit of the basis index, so reshaping to [2]*n puts qubit k on axis k.
"""
from __future__ import annotations

import numpy as np

SQRT_HALF = 1.0 / np.sqrt(2.0)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT_HALF

KET_PLUS = np.array([SQRT_HALF, SQRT_HALF], dtype=complex)
KET_MINUS = np.array([SQRT_HALF, -SQRT_HALF], dtype=complex)


def apply_single_qubit(state: np.ndarray, n: int, qubit: int, matrix: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to one qubit of a flat 2**n state vector."""
    t = state.reshape(2 ** qubit, 2, -1)
    out = np.empty_like(t)
    out[:, 0, :] = matrix[0, 0] * t[:, 0, :] + matrix[0, 1] * t[:, 1, :]
    out[:, 1, :] = matrix[1, 0] * t[:, 0, :] + matrix[1, 1] * t[:, 1, :]
    return out.reshape(-1)


def project_qubit(state: np.ndarray, n: int, qubit: int, bit: int) -> np.ndarray:
    """Zero out the component where `qubit` != bit; dimensions are kept."""
    t = state.reshape(2 ** qubit, 2, -1).copy()
    t[:, 1 - bit, :] = 0.0
    return t.reshape(-1)


def project_onto(state: np.ndarray, n: int, qubit: int, ket: np.ndarray) -> np.ndarray:
    """Project one qubit onto |ket><ket| without renormalizing."""
    proj = np.outer(ket, ket.conj())
    return apply_single_qubit(state, n, qubit, proj)


def norm2(state: np.ndarray) -> float:
    return float(np.real(np.vdot(state, state)))


def reduced_single_qubit(state: np.ndarray, n: int, qubit: int) -> np.ndarray:
    """2x2 reduced density matrix of one qubit from an unnormalized pure state."""
    t = np.moveaxis(state.reshape([2] * n), qubit, 0).reshape(2, -1)
    return t @ t.conj().T


def kron_all(*vectors: np.ndarray) -> np.ndarray:
    out = np.array([1.0], dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out
