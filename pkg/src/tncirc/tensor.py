"""Dense dimension-4 tensors and the pairwise contraction kernel."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from . import kernels

DIM = 4

WireId = Hashable


@dataclass
class KernelConfig:
    """Process-wide knobs for the contraction kernel.

    Attributes:
        threads: worker count for contractions above ``parallel_threshold``.
        parallel_threshold: flop count at which a single contraction is split
            across workers.
        rank_cap: largest tensor rank that may be materialized.
        backend: ``"numba"`` or ``"numpy"``; defaults to numba when importable.
    """

    threads: int = 8
    parallel_threshold: int = DIM**10
    rank_cap: int = 15
    backend: str = field(default_factory=lambda: kernels.BACKEND)


config = KernelConfig()


def configure(**kwargs) -> KernelConfig:
    for key, value in kwargs.items():
        if not hasattr(config, key):
            raise AttributeError(f"unknown kernel setting {key!r}")
        if value is not None:
            setattr(config, key, value)
    return config


class RankCapExceeded(MemoryError):
    """Raised instead of allocating a tensor above the configured rank cap."""

    def __init__(self, rank: int, cap: int, step: int | None = None, wire: WireId | None = None):
        self.rank = rank
        self.cap = cap
        self.step = step
        self.wire = wire
        where = "" if step is None else f" at contraction step {step} (wire {wire})"
        nbytes = 16 * DIM**rank
        super().__init__(
            f"tensor of rank {rank} exceeds rank cap {cap}{where}; would need {nbytes / 2**30:.3g} GiB"
        )


def _is_power_of_dim(d: int) -> bool:
    while d > 1 and d % DIM == 0:
        d //= DIM
    return d == 1


class DisjointTensors(ValueError):
    pass


class Tensor:
    """Immutable complex tensor whose every leg has dimension 4.

    ``data`` has shape ``(4,) * rank`` in row-major order, so the first label
    in ``indices`` varies slowest in :attr:`entries`.
    """

    __slots__ = ("indices", "data")

    def __init__(self, indices: Sequence[WireId], data, rank_cap: int | None = None):
        indices = tuple(indices)
        if len(set(indices)) != len(indices):
            raise ValueError(f"duplicate index labels in {indices}")
        rank = len(indices)
        cap = config.rank_cap if rank_cap is None else rank_cap
        if rank > cap:
            raise RankCapExceeded(rank, cap)
        arr = np.asarray(data, dtype=np.complex128)
        if arr.size != DIM**rank:
            raise ValueError(f"rank {rank} tensor needs {DIM**rank} entries, got {arr.size}")
        if arr.ndim > 1 and not all(_is_power_of_dim(d) for d in arr.shape):
            raise ValueError(f"every index must have dimension {DIM}, got shape {arr.shape}")
        arr = arr.reshape((DIM,) * rank).view()
        arr.flags.writeable = False
        self.indices = indices
        self.data = arr

    @property
    def rank(self) -> int:
        return len(self.indices)

    @property
    def entries(self) -> np.ndarray:
        return self.data.reshape(-1)

    def item(self) -> complex:
        if self.rank != 0:
            raise ValueError(f"tensor has rank {self.rank}, not a scalar")
        return complex(self.data.reshape(()))

    def aligned(self, order: Sequence[WireId]) -> np.ndarray:
        """Return the data with axes permuted to follow ``order``."""
        order = tuple(order)
        if len(order) != self.rank or set(order) != set(self.indices):
            raise ValueError(f"{order} is not a permutation of {self.indices}")
        return np.transpose(self.data, [self.indices.index(lab) for lab in order])

    def relabel(self, mapping: dict) -> Tensor:
        return Tensor([mapping.get(lab, lab) for lab in self.indices], self.data)

    def __repr__(self) -> str:
        return f"Tensor(indices={self.indices}, rank={self.rank})"


@dataclass(frozen=True)
class ContractionCost:
    flops: int = 0
    peak_rank: int = 0

    def __add__(self, other: ContractionCost) -> ContractionCost:
        return ContractionCost(self.flops + other.flops, max(self.peak_rank, other.peak_rank))


def pair_cost(rank_a: int, rank_b: int, shared: int) -> ContractionCost:
    """Cost of one pairwise contraction from ranks alone: ``4**(x+y+z)``."""
    out_rank = rank_a + rank_b - 2 * shared
    return ContractionCost(DIM ** (rank_a + rank_b - shared), max(rank_a, rank_b, out_rank))


def _canonical(labels: list) -> list:
    try:
        return sorted(labels)
    except TypeError:
        return sorted(labels, key=repr)


def contract(a: Tensor, b: Tensor, threads: int | None = None) -> tuple[Tensor, ContractionCost]:
    """Contract every index label shared by ``a`` and ``b``.

    The result carries ``a``'s free labels followed by ``b``'s, each in their
    original order.
    """
    b_pos = {lab: i for i, lab in enumerate(b.indices)}
    # a canonical order for the summed legs makes contract(a, b) and
    # contract(b, a) accumulate every entry in the same sequence
    shared = _canonical([lab for lab in a.indices if lab in b_pos])
    if not shared:
        raise DisjointTensors(f"disjoint tensors: {a.indices} and {b.indices} share no index")
    free_a = [i for i, lab in enumerate(a.indices) if lab not in b_pos]
    shared_a = [a.indices.index(lab) for lab in shared]
    shared_b = [b_pos[lab] for lab in shared]
    shared_set = set(shared)
    free_b = [i for i, lab in enumerate(b.indices) if lab not in shared_set]

    out_labels = [a.indices[i] for i in free_a] + [b.indices[i] for i in free_b]
    if len(out_labels) > config.rank_cap:
        raise RankCapExceeded(len(out_labels), config.rank_cap)
    cost = pair_cost(a.rank, b.rank, len(shared))

    y = DIM ** len(shared)
    a2 = np.transpose(a.data, free_a + shared_a).reshape(-1, y)
    b2 = np.transpose(b.data, shared_b + free_b).reshape(y, -1)
    nthreads = config.threads if threads is None else threads
    if cost.flops < config.parallel_threshold:
        nthreads = 1
    out = kernels.matmul(a2, b2, threads=nthreads, backend=config.backend)
    return Tensor(out_labels, out), cost


def self_trace(t: Tensor, first: WireId, second: WireId) -> Tensor:
    """Identify legs ``first`` and ``second`` and sum over their diagonal."""
    if first not in t.indices or second not in t.indices or first == second:
        raise ValueError(f"cannot trace legs {first!r}, {second!r} of {t.indices}")
    i, j = t.indices.index(first), t.indices.index(second)
    rest = [k for k in range(t.rank) if k not in (i, j)]
    arr = np.transpose(t.data, [i, j] + rest).reshape(1, DIM, 1, DIM, -1)
    out = kernels.diag_trace(arr, backend=config.backend)
    return Tensor([t.indices[k] for k in rest], out.reshape(-1))


def identity_superoperator(first: WireId, second: WireId) -> Tensor:
    return Tensor([first, second], np.eye(DIM))
