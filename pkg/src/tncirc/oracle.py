"""Brute-force density-matrix simulator used as ground truth.

The state is kept as a ``2n``-index array ``rho[r_0..r_{n-1}, c_0..c_{n-1}]``
and gates act as ``E rho E^dag`` on the touched row and column indices. Only
raw superoperator definitions (no Kraus form) go through the vectorized
picture. Nothing here calls the tensor-network engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, GateApplication

MAX_QUBITS = 12


@dataclass
class DenseState:
    num_qubits: int
    rho: np.ndarray  # shape (2,) * 2n

    @property
    def matrix(self) -> np.ndarray:
        d = 2**self.num_qubits
        return self.rho.reshape(d, d)

    @property
    def vector(self) -> np.ndarray:
        """Vectorized state: per-qubit index ``2*r + c``, qubit 0 slowest."""
        n = self.num_qubits
        perm = [k for q in range(n) for k in (q, n + q)]
        return np.transpose(self.rho, perm).reshape(-1)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def _apply_left(rho: np.ndarray, op: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    op = op.reshape((2,) * (2 * k))
    out = np.tensordot(op, rho, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def _apply_kraus(state: DenseState, ops: list[np.ndarray], qubits: tuple[int, ...]) -> None:
    n = state.num_qubits
    rows = list(qubits)
    cols = [n + q for q in qubits]
    acc = np.zeros_like(state.rho)
    for e in ops:
        tmp = _apply_left(state.rho, e, rows)
        acc += _apply_left(tmp, e.conj(), cols)
    state.rho = acc


def _apply_superop(state: DenseState, sup: np.ndarray, qubits: tuple[int, ...]) -> None:
    n = state.num_qubits
    k = len(qubits)
    # bring (r_q, c_q) pairs for the touched qubits to the front, in gate order
    front = [ax for q in qubits for ax in (q, n + q)]
    rest = [ax for ax in range(2 * n) if ax not in front]
    t = np.transpose(state.rho, front + rest)
    shape = t.shape
    t = t.reshape(4**k, -1)
    t = sup.reshape(4**k, 4**k) @ t
    t = t.reshape(shape)
    state.rho = np.transpose(t, np.argsort(front + rest))


def apply_gate(state: DenseState, circuit: Circuit, op: GateApplication) -> None:
    ops = circuit.kraus_operators(op)
    if ops is None:
        _apply_superop(state, circuit.definitions[op.gate].superop, op.qubits)
    else:
        _apply_kraus(state, ops, op.qubits)


def initial_state(n: int) -> DenseState:
    rho = np.zeros((2,) * (2 * n), dtype=np.complex128)
    rho[(0,) * (2 * n)] = 1.0
    return DenseState(n, rho)


def oracle_simulate(circuit: Circuit) -> DenseState:
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"oracle limited to {MAX_QUBITS} qubits, got {n}")
    state = initial_state(n)
    for op in circuit.ops:
        apply_gate(state, circuit, op)
    return state


def oracle_expectation(circuit: Circuit, state: DenseState | None = None) -> complex:
    """``Tr((M_0 x ... x M_{n-1}) rho)`` for the circuit's measurement operators."""
    state = state or oracle_simulate(circuit)
    n = circuit.num_qubits
    t = state.rho
    # contract qubit by qubit: sum_{r,c} M[c, r] rho[.., r, .., c, ..]
    for q in reversed(range(n)):
        m = circuit.measurements[q].operator
        t = np.tensordot(t, m, axes=([q, t.ndim - 1], [1, 0]))
    return complex(t)


def oracle_distribution(state: DenseState) -> np.ndarray:
    """Computational-basis probabilities; index bits read qubit 0 first (most significant)."""
    return np.real(np.diag(state.matrix)).copy()
