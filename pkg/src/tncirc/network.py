"""Circuit to tensor network, plan execution and cost simulation.

Wires are numbered ``0..W-1`` and nodes ``0..N-1``. A plan is an order over
wire ids; eliminating a wire merges its two current endpoint groups and
contracts every wire the groups share in one pairwise contraction. Wires that
an earlier merge already consumed are skipped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gates
from .circuit import Circuit
from .graphs import SimpleGraph, multigraph_line_graph
from .tensor import ContractionCost, RankCapExceeded, Tensor, config, contract, pair_cost


@dataclass
class TensorNetwork:
    tensors: dict[int, Tensor]
    wires: dict[int, tuple[int, int]]
    kinds: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        slots: dict[int, int] = {}
        for node, t in self.tensors.items():
            for lab in t.indices:
                if lab not in self.wires:
                    raise ValueError(f"open edge: node {node} leg {lab!r} has no wire")
                slots[lab] = slots.get(lab, 0) + 1
                if node not in self.wires[lab]:
                    raise ValueError(f"wire {lab} does not touch node {node}")
        for w, (u, v) in self.wires.items():
            if u == v:
                raise ValueError(f"wire {w} is a self-loop")
            if slots.get(w, 0) != 2:
                raise ValueError(f"wire {w} must appear in exactly two tensors")

    @property
    def num_nodes(self) -> int:
        return len(self.tensors)

    @property
    def num_wires(self) -> int:
        return len(self.wires)

    def ranks(self) -> dict[int, int]:
        return {n: t.rank for n, t in self.tensors.items()}

    def wire_ids(self) -> list[int]:
        return sorted(self.wires)

    def is_connected(self) -> bool:
        return self.graph_view()[0].is_connected()

    def graph_view(self) -> tuple[SimpleGraph, dict[int, int]]:
        """Simple graph over nodes (parallel wires collapsed) and node -> vertex map."""
        index = {node: i for i, node in enumerate(sorted(self.tensors))}
        g = SimpleGraph(len(index))
        for u, v in self.wires.values():
            a, b = index[u], index[v]
            if not g.has_edge(a, b):
                g.add_edge(a, b)
        return g, index

    def line_graph(self) -> SimpleGraph:
        """Line graph over wires: vertex ``i`` is the ``i``-th wire of :meth:`wire_ids`."""
        index = {node: i for i, node in enumerate(sorted(self.tensors))}
        wids = self.wire_ids()
        edges = [(index[self.wires[w][0]], index[self.wires[w][1]]) for w in wids]
        return multigraph_line_graph(len(index), edges)

    @classmethod
    def from_structure(cls, num_nodes: int, edges: Sequence[tuple[int, int]], rng=None) -> TensorNetwork:
        """Network with random complex tensors on an arbitrary multigraph."""
        rng = np.random.default_rng(rng)
        legs: dict[int, list[int]] = {n: [] for n in range(num_nodes)}
        wires = {}
        for w, (u, v) in enumerate(edges):
            wires[w] = (u, v)
            legs[u].append(w)
            legs[v].append(w)
        tensors = {}
        for n, ls in legs.items():
            size = 4 ** len(ls)
            data = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            tensors[n] = Tensor(ls, data / np.sqrt(size))
        return cls(tensors, wires)


def build_network(circuit: Circuit) -> TensorNetwork:
    """One input node per qubit, one node per gate in order, one measurement node per qubit.

    Gate tensors carry legs ``(out..., in...)`` matching the superoperator layout.
    """
    tensors: dict[int, Tensor] = {}
    kinds: dict[int, str] = {}
    wires: dict[int, tuple[int, int]] = {}
    pending: list[tuple[int, int]] = []  # per qubit: (wire id, source node)
    next_wire = 0

    for q in range(circuit.num_qubits):
        node = len(tensors)
        tensors[node] = Tensor([next_wire], gates.input_vector())
        kinds[node] = f"input[{q}]"
        pending.append((next_wire, node))
        next_wire += 1

    for op in circuit.ops:
        node = len(tensors)
        ins, outs = [], []
        for q in op.qubits:
            w_in, src = pending[q]
            wires[w_in] = (src, node)
            ins.append(w_in)
            outs.append(next_wire)
            pending[q] = (next_wire, node)
            next_wire += 1
        tensors[node] = Tensor(outs + ins, circuit.superoperator(op))
        kinds[node] = f"{op.gate}{list(op.qubits)}"

    for q, m in enumerate(circuit.measurements):
        node = len(tensors)
        w_in, src = pending[q]
        wires[w_in] = (src, node)
        tensors[node] = Tensor([w_in], gates.measurement_vector(m))
        kinds[node] = f"{m.value}[{q}]"

    return TensorNetwork(tensors, wires, kinds)


@dataclass(frozen=True)
class ContractionPlan:
    order: tuple[int, ...]
    predicted_flops: int
    predicted_peak_rank: int
    width: int | None = None
    planner: str = ""


@dataclass(frozen=True)
class PlanStep:
    wire: int
    left: int
    right: int
    shared: int
    out_rank: int
    flops: int


class _Merger:
    """Union-find over nodes tracking the open wire set of every group."""

    def __init__(self, wires: dict[int, tuple[int, int]], nodes: Sequence[int]):
        self.wires = wires
        self.parent = {n: n for n in nodes}
        self.legs: dict[int, set[int]] = {n: set() for n in nodes}
        for w, (u, v) in wires.items():
            self.legs[u].add(w)
            self.legs[v].add(w)

    def find(self, n: int) -> int:
        root = n
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[n] != root:
            self.parent[n], n = root, self.parent[n]
        return root

    def endpoints(self, w: int) -> tuple[int, int]:
        u, v = self.wires[w]
        return self.find(u), self.find(v)

    def preview(self, a: int, b: int) -> tuple[int, int, int]:
        la, lb = self.legs[a], self.legs[b]
        shared = len(la & lb)
        return len(la), len(lb), shared

    def merge(self, a: int, b: int) -> tuple[int, set[int]]:
        """Merge group ``b`` into ``a``; return the new root and the consumed wires."""
        la, lb = self.legs[a], self.legs.pop(b)
        consumed = la & lb
        self.legs[a] = la ^ lb
        self.parent[b] = a
        return a, consumed


def check_order(net: TensorNetwork, order: Sequence[int]) -> None:
    if len(order) != net.num_wires or set(order) != set(net.wires):
        raise ValueError(
            f"plan must list each of the {net.num_wires} wires exactly once, got {len(order)} entries"
        )


def simulate_plan(net: TensorNetwork, order: Sequence[int]) -> tuple[ContractionCost, list[PlanStep]]:
    """Cost of executing ``order`` on the abstract merge model; no tensor data touched."""
    check_order(net, order)
    m = _Merger(net.wires, list(net.tensors))
    total = ContractionCost(0, max((t.rank for t in net.tensors.values()), default=0))
    steps = []
    for w in order:
        a, b = m.endpoints(w)
        if a == b:
            continue
        ra, rb, shared = m.preview(a, b)
        cost = pair_cost(ra, rb, shared)
        root, _ = m.merge(a, b)
        total = total + cost
        steps.append(PlanStep(w, a, b, shared, len(m.legs[root]), cost.flops))
    return total, steps


def make_plan(net: TensorNetwork, order: Sequence[int], width: int | None = None, planner: str = "") -> ContractionPlan:
    cost, _ = simulate_plan(net, order)
    return ContractionPlan(tuple(order), cost.flops, cost.peak_rank, width, planner)


def execute_plan(net: TensorNetwork, plan: ContractionPlan | Sequence[int], threads: int | None = None) -> tuple[complex, ContractionCost]:
    """Contract the network to a scalar following ``plan``.

    Raises :class:`RankCapExceeded` naming the step before allocating any
    tensor above the configured rank cap.
    """
    order = plan.order if isinstance(plan, ContractionPlan) else tuple(plan)
    check_order(net, order)
    m = _Merger(net.wires, list(net.tensors))
    live: dict[int, Tensor] = dict(net.tensors)
    scalar = 1.0 + 0j
    total = ContractionCost(0, max((t.rank for t in live.values()), default=0))
    step = 0
    for w in order:
        a, b = m.endpoints(w)
        if a == b:
            continue
        ra, rb, shared = m.preview(a, b)
        out_rank = ra + rb - 2 * shared
        if out_rank > config.rank_cap:
            raise RankCapExceeded(out_rank, config.rank_cap, step=step, wire=w)
        t, cost = contract(live.pop(a), live.pop(b), threads=threads)
        root, _ = m.merge(a, b)
        total = total + cost
        step += 1
        if t.rank == 0:
            scalar *= t.item()
        else:
            live[root] = t
    for t in live.values():
        if t.rank != 0:
            raise RuntimeError("plan left uncontracted wires")
        scalar *= t.item()
    return scalar, total


@dataclass
class SimulationReport:
    value: complex
    flops: int
    peak_rank: int
    width: int | None
    planner: str
    plan_seconds: float
    contract_seconds: float
    plan: ContractionPlan

    @property
    def wall_seconds(self) -> float:
        return self.plan_seconds + self.contract_seconds


def simulate(circuit: Circuit, planner: str = "lg", seed: int = 0, budget: int | None = None,
             max_rejections: int | None = None, seconds: float | None = None,
             ordering: Sequence[int] | None = None, threads: int | None = None,
             light_cone: bool = False) -> SimulationReport:
    """Build, plan and contract ``circuit``; the full report behind :func:`expectation`.

    With ``light_cone`` the circuit is first reduced by :meth:`Circuit.light_cone`,
    which leaves the value unchanged and can shrink the network drastically.
    """
    from .ordering import plan_network

    net = build_network(circuit.light_cone() if light_cone else circuit)
    t0 = time.perf_counter()
    plan = plan_network(net, planner=planner, seed=seed, budget=budget,
                        max_rejections=max_rejections, seconds=seconds, ordering=ordering)
    t1 = time.perf_counter()
    value, cost = execute_plan(net, plan, threads=threads)
    t2 = time.perf_counter()
    return SimulationReport(value, cost.flops, cost.peak_rank, plan.width, plan.planner, t1 - t0, t2 - t1, plan)


def expectation(circuit: Circuit, planner: str = "lg", **kwargs) -> complex:
    """Contract ``circuit`` with its measurement nodes to the scalar ``Tr(M rho)``."""
    return simulate(circuit, planner=planner, **kwargs).value
