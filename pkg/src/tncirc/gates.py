"""Gate matrices and their superoperator form.

A single-qubit density matrix ``|r><c|`` is vectorized to index ``2*r + c``.
Under that convention ``U rho U^dag`` becomes ``(U kron conj(U)) @ vec(rho)``.
Two-qubit superoperators are stored as ``(out_q0, out_q1, in_q0, in_q1)``
legs, each of dimension 4.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

ATOL = 1e-10

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
T = np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=np.complex128)
P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz(theta: float) -> np.ndarray:
    return np.diag([cmath.exp(-0.5j * theta), cmath.exp(0.5j * theta)])


def zz(gamma: float) -> np.ndarray:
    """``exp(-i gamma (1 - Z Z) / 2)``, the Max-Cut clause gate."""
    ph = cmath.exp(-1j * gamma)
    return np.diag([1, ph, ph, 1]).astype(np.complex128)


class Measurement(Enum):
    TRACE = "MEAST"
    X = "MEASX"
    Y = "MEASY"
    Z = "MEASZ"
    PROJ0 = "PROJ0"
    PROJ1 = "PROJ1"

    @property
    def operator(self) -> np.ndarray:
        return _MEAS_OPERATORS[self]


_MEAS_OPERATORS = {
    Measurement.TRACE: I2,
    Measurement.X: X,
    Measurement.Y: Y,
    Measurement.Z: Z,
    Measurement.PROJ0: P0,
    Measurement.PROJ1: P1,
}


@dataclass(frozen=True)
class GateSpec:
    name: str
    arity: int
    nparams: int
    unitary: Callable[..., np.ndarray]


BUILTIN_GATES: dict[str, GateSpec] = {
    g.name: g
    for g in [
        GateSpec("X", 1, 0, lambda: X),
        GateSpec("Y", 1, 0, lambda: Y),
        GateSpec("Z", 1, 0, lambda: Z),
        GateSpec("H", 1, 0, lambda: H),
        GateSpec("S", 1, 0, lambda: S),
        GateSpec("T", 1, 0, lambda: T),
        GateSpec("RX", 1, 1, rx),
        GateSpec("RY", 1, 1, ry),
        GateSpec("RZ", 1, 1, rz),
        GateSpec("CNOT", 2, 0, lambda: CNOT),
        GateSpec("CZ", 2, 0, lambda: CZ),
        GateSpec("SWAP", 2, 0, lambda: SWAP),
        GateSpec("ZZ", 2, 1, zz),
    ]
}


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol)


def _arity(dim: int) -> int:
    if dim == 2:
        return 1
    if dim == 4:
        return 2
    raise ValueError(f"only 1- and 2-qubit operators are supported, got dimension {dim}")


def linear_map_superoperator(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> left @ rho @ right^dag`` in per-qubit leg layout.

    Returns shape ``(4, 4)`` for one qubit, ``(4, 4, 4, 4)`` for two.
    """
    left = np.asarray(left, dtype=np.complex128)
    right = np.asarray(right, dtype=np.complex128)
    k = _arity(left.shape[0])
    full = np.kron(left, right.conj())
    if k == 1:
        return full
    # rows: (r0 r1 c0 c1), cols: (r0' r1' c0' c1') -> per-qubit (r, c) pairs
    full = full.reshape(2, 2, 2, 2, 2, 2, 2, 2)
    full = full.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    return full.reshape(4, 4, 4, 4)


def make_superoperator(u: np.ndarray, check: bool = True) -> np.ndarray:
    """``U kron conj(U)`` reindexed to per-qubit dimension-4 legs."""
    u = np.asarray(u, dtype=np.complex128)
    if check and not is_unitary(u):
        raise ValueError("gate matrix is not unitary")
    return linear_map_superoperator(u, u)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving channel ``rho -> sum_j E_j rho E_j^dag``."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(e, dtype=np.complex128) for e in self.operators)
        if not ops:
            raise ValueError("Kraus channel needs at least one operator")
        dim = ops[0].shape[0]
        _arity(dim)
        if any(e.shape != (dim, dim) for e in ops):
            raise ValueError("Kraus operators must share one square shape")
        completeness = sum(e.conj().T @ e for e in ops)
        if not np.allclose(completeness, np.eye(dim), atol=ATOL):
            raise ValueError("Kraus operators violate sum_j E_j^dag E_j = I")
        object.__setattr__(self, "operators", ops)

    @property
    def arity(self) -> int:
        return _arity(self.operators[0].shape[0])

    def superoperator(self) -> np.ndarray:
        return sum(linear_map_superoperator(e, e) for e in self.operators)

    def __eq__(self, other):
        return (
            isinstance(other, KrausChannel)
            and len(self.operators) == len(other.operators)
            and all(np.array_equal(a, b) for a, b in zip(self.operators, other.operators))
        )

    __hash__ = object.__hash__


def make_kraus_superoperator(channel: KrausChannel) -> np.ndarray:
    return channel.superoperator()


def depolarizing(p: float) -> KrausChannel:
    return KrausChannel(
        (
            math.sqrt(1 - 3 * p / 4) * I2,
            math.sqrt(p / 4) * X,
            math.sqrt(p / 4) * Y,
            math.sqrt(p / 4) * Z,
        )
    )


def phase_damping(lam: float) -> KrausChannel:
    return KrausChannel(
        (
            np.diag([1, math.sqrt(1 - lam)]).astype(np.complex128),
            np.diag([0, math.sqrt(lam)]).astype(np.complex128),
        )
    )


def amplitude_damping(gamma: float) -> KrausChannel:
    return KrausChannel(
        (
            np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=np.complex128),
            np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=np.complex128),
        )
    )


def input_vector() -> np.ndarray:
    """Vectorized ``|0><0|``."""
    return np.array([1, 0, 0, 0], dtype=np.complex128)


def measurement_vector(kind: Measurement) -> np.ndarray:
    """Covector ``m`` with ``m @ vec(rho) == Tr(O rho)`` for the kind's operator ``O``.

    Since ``Tr(O rho) = sum_{r,c} O[c, r] rho[r, c]``, this is ``O^T`` flattened.
    """
    return np.ascontiguousarray(kind.operator.T).reshape(4).astype(np.complex128)


def superoperator_matrix(sup: np.ndarray) -> np.ndarray:
    """Flatten a per-qubit-leg superoperator to a square matrix (out x in)."""
    d = int(round(math.sqrt(sup.size)))
    return np.asarray(sup).reshape(d, d)

