"""Contraction ordering.

Two planners produce a :class:`~tncirc.network.ContractionPlan`:

* ``lg``: find an elimination ordering of the network's line graph (one
  vertex per wire) and eliminate wires in that order. The ordering search is
  an anytime loop of randomized min-fill restarts; when the budget is large
  enough to cover every vertex subset it switches to an exact subset DP.
* ``stoch``: random wire proposals accepted when the rank growth
  ``rank(C) - max(rank(A), rank(B))`` stays within a threshold that starts at
  -1 and is relaxed by one after too many consecutive rejections.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .graphs import SimpleGraph
from .network import ContractionPlan, TensorNetwork, _Merger, make_plan

DEFAULT_RESTARTS = 10
EXACT_MAX_VERTICES = 16


@dataclass(frozen=True)
class EliminationOrdering:
    order: tuple[int, ...]
    width: int
    history: tuple[int, ...] = field(default=(), compare=False)


@dataclass
class TreeDecomposition:
    bags: list[frozenset[int]]
    tree_edges: list[tuple[int, int]]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


def _check_permutation(g: SimpleGraph, order: Sequence[int]) -> None:
    if len(order) != g.n or set(order) != set(range(g.n)):
        raise ValueError(f"ordering must be a permutation of {g.n} vertices")


def _eliminate(g: SimpleGraph, order: Sequence[int]):
    """Yield ``(v, higher_neighbours)`` while eliminating in ``order``."""
    adj = [set(a) for a in g.adj]
    for v in order:
        nbrs = adj[v]
        yield v, frozenset(nbrs)
        for u in nbrs:
            adj[u].discard(v)
            adj[u] |= nbrs - {u}
        adj[v] = set()


def elimination_width(g: SimpleGraph, order: Sequence[int]) -> int:
    """Induced width: largest neighbourhood at elimination time."""
    _check_permutation(g, order)
    return max((len(nb) for _, nb in _eliminate(g, order)), default=-1)


treewidth_upper_bound = elimination_width


def tree_decomposition(g: SimpleGraph, order: Sequence[int]) -> TreeDecomposition:
    """Bags ``{v} | N+(v)``; bag ``v`` hangs off the bag of its earliest-eliminated higher neighbour."""
    _check_permutation(g, order)
    pos = {v: i for i, v in enumerate(order)}
    bags: list[frozenset[int]] = []
    parent: list[int | None] = []
    for v, nbrs in _eliminate(g, order):
        bags.append(frozenset(nbrs | {v}))
        parent.append(pos[min(nbrs, key=pos.__getitem__)] if nbrs else None)
    edges = [(i, p) for i, p in enumerate(parent) if p is not None]
    roots = [i for i, p in enumerate(parent) if p is None]
    # components of a disconnected graph: chain their root bags
    edges += list(zip(roots, roots[1:]))
    return TreeDecomposition(bags, edges)


def validate_tree_decomposition(g: SimpleGraph, td: TreeDecomposition) -> list[str]:
    """Return the violated properties; an empty list means ``td`` is valid."""
    problems = []
    nb = len(td.bags)
    covered = set().union(*td.bags) if td.bags else set()
    if covered != set(range(g.n)):
        problems.append("vertex cover")
    for u, v in g.edges:
        if not any(u in b and v in b for b in td.bags):
            problems.append("edge cover")
            break
    tree_adj: list[set[int]] = [set() for _ in range(nb)]
    for a, b in td.tree_edges:
        tree_adj[a].add(b)
        tree_adj[b].add(a)
    is_tree = len(td.tree_edges) == max(nb - 1, 0) and _connected(tree_adj, range(nb))
    if not is_tree:
        problems.append("tree shape")
    for v in range(g.n):
        holding = [i for i, b in enumerate(td.bags) if v in b]
        if holding and not _connected(tree_adj, holding):
            problems.append("running intersection")
            break
    if td.width != max((len(b) for b in td.bags), default=0) - 1:
        problems.append("width")
    return problems


def _connected(adj: list[set[int]], members) -> bool:
    members = set(members)
    if not members:
        return True
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v in members and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == members


def _fill_in(adj: list[set[int]], v: int) -> int:
    nbrs = adj[v]
    d = len(nbrs)
    present = sum(len(adj[u] & nbrs) for u in nbrs) // 2
    return d * (d - 1) // 2 - present


def min_fill_ordering(g: SimpleGraph, seed: int | None = 0, rng: random.Random | None = None) -> EliminationOrdering:
    """Greedy min-fill: fewest fill edges, then smallest degree, then random."""
    rng = rng or random.Random(seed)
    adj = [set(a) for a in g.adj]
    remaining = set(range(g.n))
    fill = {v: _fill_in(adj, v) for v in remaining}
    order = []
    width = -1
    while remaining:
        best_key = None
        ties: list[int] = []
        for v in remaining:
            key = (fill[v], len(adj[v]))
            if best_key is None or key < best_key:
                best_key, ties = key, [v]
            elif key == best_key:
                ties.append(v)
        v = ties[0] if len(ties) == 1 else rng.choice(sorted(ties))
        nbrs = adj[v]
        width = max(width, len(nbrs))
        added = False
        for u in nbrs:
            adj[u].discard(v)
            new = nbrs - adj[u] - {u}
            if new:
                added = True
                adj[u] |= new
        dirty = set(nbrs)
        if added:
            for u in nbrs:
                dirty |= adj[u]
        remaining.discard(v)
        adj[v] = set()
        del fill[v]
        for u in dirty & remaining:
            fill[u] = _fill_in(adj, u)
        order.append(v)
    return EliminationOrdering(tuple(order), width)


def exact_ordering(g: SimpleGraph) -> EliminationOrdering:
    """Treewidth-optimal ordering via the subset dynamic program (small graphs only)."""
    n = g.n
    if n > EXACT_MAX_VERTICES:
        raise ValueError(f"exact search limited to {EXACT_MAX_VERTICES} vertices, got {n}")
    if n == 0:
        return EliminationOrdering((), -1)
    nbr_mask = [sum(1 << u for u in g.adj[v]) for v in range(n)]

    def q_size(s: int, v: int) -> int:
        # vertices outside s | {v} reachable from v through s
        seen = 1 << v
        frontier = [v]
        out = 0
        while frontier:
            u = frontier.pop()
            m = nbr_mask[u] & ~seen
            seen |= m
            while m:
                low = m & -m
                w = low.bit_length() - 1
                m ^= low
                if s >> w & 1:
                    frontier.append(w)
                else:
                    out += 1
        return out

    best = {0: -1}
    choice = {}
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            s = sum(1 << v for v in combo)
            val, pick = None, None
            for v in combo:
                rest = s & ~(1 << v)
                cand = max(best[rest], q_size(rest, v))
                if val is None or cand < val:
                    val, pick = cand, v
            best[s] = val
            choice[s] = pick
    order = []
    s = (1 << n) - 1
    while s:
        v = choice[s]
        order.append(v)
        s &= ~(1 << v)
    order.reverse()
    return EliminationOrdering(tuple(order), best[(1 << n) - 1])


def _default_score(g: SimpleGraph, order: Sequence[int]) -> int:
    return sum(4 ** (len(nb) + 1) for _, nb in _eliminate(g, order))


def anytime_ordering(
    g: SimpleGraph,
    budget: int = DEFAULT_RESTARTS,
    seed: int = 0,
    seconds: float | None = None,
    score: Callable[[Sequence[int]], int] | None = None,
) -> EliminationOrdering:
    """Best-of randomized min-fill restarts.

    ``budget`` counts restarts; the first restart is exactly
    :func:`min_fill_ordering` with ``seed``. A budget of at least ``2**n``
    (and ``n <= 16``) buys the exact subset DP instead. With ``seconds`` set,
    restarts continue until that wall time has elapsed. Candidates are ranked
    by (width, score, ordering); ``history`` records the best width after
    every restart.
    """
    score = score or (lambda order: _default_score(g, order))
    if g.n <= EXACT_MAX_VERTICES and budget >= 2**g.n and seconds is None:
        exact = exact_ordering(g)
        return EliminationOrdering(exact.order, exact.width, (exact.width,))

    deadline = None if seconds is None else time.perf_counter() + seconds
    best_key = None
    best: EliminationOrdering | None = None
    history = []
    r = 0
    while True:
        rng = random.Random(seed) if r == 0 else random.Random(f"{seed}:{r}")
        cand = min_fill_ordering(g, rng=rng)
        key = (cand.width, score(cand.order), cand.order)
        if best_key is None or key < best_key:
            best_key, best = key, cand
        history.append(best.width)
        r += 1
        if deadline is None:
            if r >= budget:
                break
        elif time.perf_counter() >= deadline:
            break
    return EliminationOrdering(best.order, best.width, tuple(history))


def plan_from_ordering(net: TensorNetwork, ordering: EliminationOrdering | Sequence[int]) -> ContractionPlan:
    """Read a line-graph elimination ordering as a wire contraction order."""
    order = ordering.order if isinstance(ordering, EliminationOrdering) else tuple(ordering)
    wids = net.wire_ids()
    if sorted(order) != list(range(len(wids))):
        raise ValueError(f"ordering covers {len(order)} entries but the network has {len(wids)} wires")
    wires = [wids[i] for i in order]
    lg = net.line_graph()
    width = ordering.width if isinstance(ordering, EliminationOrdering) else elimination_width(lg, order)
    return make_plan(net, wires, width=width, planner="lg")


def lg_plan(net: TensorNetwork, budget: int = DEFAULT_RESTARTS, seed: int = 0,
            seconds: float | None = None) -> ContractionPlan:
    lg = net.line_graph()
    wids = net.wire_ids()

    def flops(order):
        return make_plan(net, [wids[i] for i in order]).predicted_flops

    ordering = anytime_ordering(lg, budget=budget, seed=seed, seconds=seconds, score=flops)
    return plan_from_ordering(net, ordering)


def stochastic_plan(net: TensorNetwork, max_rejections: int | None = None, seed: int = 0,
                    on_accept: Callable[[int, int, int], None] | None = None) -> ContractionPlan:
    """Random-wire contraction with a relaxing rank-growth threshold.

    A proposal is accepted when ``rank(C) - max(rank(A), rank(B)) <= threshold``.
    Acceptance resets the rejection counter and the threshold to -1; once the
    counter exceeds ``max_rejections`` the threshold rises by one and the
    counter restarts. ``on_accept(wire, cost, threshold)`` observes every
    accepted proposal.
    """
    if max_rejections is None:
        max_rejections = 2 * net.num_wires
    if max_rejections < 1:
        raise ValueError("max_rejections must be at least 1")
    rng = random.Random(seed)
    m = _Merger(net.wires, list(net.tensors))
    alive = net.wire_ids()
    slot = {w: i for i, w in enumerate(alive)}

    def drop(w):
        i = slot.pop(w)
        last = alive.pop()
        if last != w:
            alive[i] = last
            slot[last] = i

    order: list[int] = []
    threshold = -1
    rejections = 0
    while alive:
        w = alive[rng.randrange(len(alive))]
        a, b = m.endpoints(w)
        ra, rb, shared = m.preview(a, b)
        cost = (ra + rb - 2 * shared) - max(ra, rb)
        if cost <= threshold:
            if on_accept is not None:
                on_accept(w, cost, threshold)
            _, consumed = m.merge(a, b)
            order.append(w)
            order.extend(sorted(consumed - {w}))
            for c in consumed:
                drop(c)
            rejections = 0
            threshold = -1
        else:
            rejections += 1
            if rejections > max_rejections:
                threshold += 1
                rejections = 0
    vertex = {w: i for i, w in enumerate(net.wire_ids())}
    width = elimination_width(net.line_graph(), [vertex[w] for w in order]) if order else -1
    return make_plan(net, order, width=width, planner="stoch")


def plan_network(net: TensorNetwork, planner: str = "lg", seed: int = 0, budget: int | None = None,
                 max_rejections: int | None = None, seconds: float | None = None,
                 ordering: Sequence[int] | None = None) -> ContractionPlan:
    if ordering is not None:
        return plan_from_ordering(net, ordering)
    if planner == "lg":
        return lg_plan(net, budget=DEFAULT_RESTARTS if budget is None else budget, seed=seed, seconds=seconds)
    if planner == "stoch":
        return stochastic_plan(net, max_rejections=max_rejections, seed=seed)
    raise ValueError(f"unknown planner {planner!r}; expected 'lg' or 'stoch'")


def write_ordering(order: Sequence[int]) -> str:
    return " ".join(str(int(v)) for v in order) + "\n"


def read_ordering(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise ValueError(f"malformed ordering file: {exc}") from None
