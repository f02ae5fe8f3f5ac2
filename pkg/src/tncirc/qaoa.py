"""Max-Cut instances, QAOA circuits and answer-string estimation."""

from __future__ import annotations

import csv
import io
import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit
from .gates import Measurement
from .graphs import SimpleGraph
from .network import simulate

MAX_PAIRING_TRIES = 100_000


class VanishingBranch(ArithmeticError):
    pass


@dataclass
class MaxCutInstance:
    graph: SimpleGraph
    regularity: int | None = None

    def __post_init__(self):
        if not self.graph.is_connected():
            raise ValueError("Max-Cut instance must be connected")
        if self.regularity is not None and not self.graph.is_regular(self.regularity):
            raise ValueError(f"graph is not {self.regularity}-regular")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def edges(self) -> list[tuple[int, int]]:
        return self.graph.edges


@dataclass(frozen=True)
class QaoaParams:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.gammas) != len(self.betas) or not self.gammas:
            raise ValueError("need p >= 1 gammas and the same number of betas")

    @property
    def p(self) -> int:
        return len(self.gammas)


def random_regular_graph(n: int, k: int, seed: int | None = 0, max_tries: int = MAX_PAIRING_TRIES) -> MaxCutInstance:
    """Connected simple k-regular graph from the pairing model with rejection."""
    if (n * k) % 2:
        raise ValueError(f"n*k must be even, got n={n}, k={k}")
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    rng = random.Random(seed)
    points = [v for v in range(n) for _ in range(k)]
    for _ in range(max_tries):
        rng.shuffle(points)
        pairs = {(min(a, b), max(a, b)) for a, b in zip(points[::2], points[1::2])}
        if len(pairs) != n * k // 2 or any(a == b for a, b in pairs):
            continue
        g = SimpleGraph(n, sorted(pairs))
        if g.is_connected():
            return MaxCutInstance(g, k)
    raise RuntimeError(f"no connected simple {k}-regular graph on {n} vertices after {max_tries} pairings")


def ring_plus_chords(n: int, seed: int | None = 0, max_tries: int = 10_000) -> MaxCutInstance:
    """Ring on ``n`` vertices plus random chords until every vertex has degree 3."""
    if n % 2 or n < 4:
        raise ValueError("ring-plus-chords needs an even n >= 4")
    rng = random.Random(seed)
    ring = [(v, (v + 1) % n) for v in range(n)]
    for _ in range(max_tries):
        g = SimpleGraph(n, ring)
        open_ = list(range(n))
        while open_:
            candidates = [(a, b) for a, b in itertools.combinations(open_, 2) if not g.has_edge(a, b)]
            if not candidates:
                break
            a, b = rng.choice(candidates)
            g.add_edge(a, b)
            open_ = [v for v in open_ if g.degree(v) < 3]
        if not open_:
            return MaxCutInstance(g, 3)
    raise RuntimeError("could not complete ring-plus-chords graph")


def qaoa_circuit(inst: MaxCutInstance, params: QaoaParams) -> Circuit:
    """H on every qubit, then per round ZZ(gamma) on each edge and RX(2 beta) on each qubit."""
    c = Circuit(inst.n)
    for q in range(inst.n):
        c.add("H", q)
    for gamma, beta in zip(params.gammas, params.betas):
        for u, v in inst.edges:
            c.add("ZZ", u, v, params=[gamma])
        for q in range(inst.n):
            c.add("RX", q, params=[2 * beta])
    return c


def edge_circuit(inst: MaxCutInstance, params: QaoaParams, edge: tuple[int, int]) -> Circuit:
    """QAOA circuit measuring ``Z_i Z_j`` on ``edge`` and tracing out the rest."""
    i, j = edge
    return qaoa_circuit(inst, params).with_measurements({i: Measurement.Z, j: Measurement.Z})


def expectation_of_cut(inst: MaxCutInstance, params: QaoaParams, planner: str = "lg", **kwargs) -> float:
    """``<C> = sum_edges (1 - <Z_i Z_j>) / 2``, one contraction per edge."""
    total = 0.0
    for edge in inst.edges:
        zz = simulate(edge_circuit(inst, params, edge), planner=planner, **kwargs).value
        total += 0.5 * (1.0 - zz.real)
    return total


def cut_value(inst: MaxCutInstance, bits: Sequence[int]) -> int:
    if len(bits) != inst.n:
        raise ValueError(f"bit string has {len(bits)} bits, graph has {inst.n} vertices")
    return sum(1 for u, v in inst.edges if bits[u] != bits[v])


def brute_force_max_cut(inst: MaxCutInstance) -> tuple[int, tuple[int, ...]]:
    if inst.n > 20:
        raise ValueError("brute-force Max-Cut limited to 20 vertices")
    best = (-1, ())
    for bits in itertools.product((0, 1), repeat=inst.n):
        val = cut_value(inst, bits)
        if val > best[0]:
            best = (val, bits)
    return best


@dataclass
class AnswerString:
    bits: tuple[int, ...]
    p0: tuple[float, ...]  # conditional P(bit k = 0 | chosen prefix) per step

    @property
    def chosen_probabilities(self) -> tuple[float, ...]:
        return tuple(p if b == 0 else 1.0 - p for b, p in zip(self.bits, self.p0))

    @property
    def probability(self) -> float:
        return math.prod(self.chosen_probabilities)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


TIE_TOL = 1e-12


def _choose(p0: float, rng: random.Random) -> int:
    if abs(p0 - 0.5) <= TIE_TOL:
        return rng.randrange(2)
    return 0 if p0 > 0.5 else 1


def estimate_answer_string(circuit: Circuit, planner: str = "lg", seed: int = 0, on_step=None,
                           **kwargs) -> AnswerString:
    """Fix qubits one at a time to their more likely value.

    Step ``q`` contracts the circuit with the already chosen projectors on
    qubits ``< q``, ``PROJ0`` on ``q`` and trace elsewhere; dividing by the
    prefix probability gives ``P(q = 0 | prefix)``. ``on_step(q, bit, p0)``
    is called after each step.
    """
    rng = random.Random(seed)
    n = circuit.num_qubits
    chosen: list[Measurement] = []
    prefix = 1.0
    if not circuit.is_trace_preserving:
        prefix = simulate(circuit.with_measurements([Measurement.TRACE] * n), planner=planner, seed=seed,
                          **kwargs).value.real
    bits, p0s = [], []
    for q in range(n):
        if prefix < 1e-14 * 0.5**q:
            raise VanishingBranch(f"vanishing branch: prefix probability {prefix:.3g} before qubit {q}")
        meas = chosen + [Measurement.PROJ0] + [Measurement.TRACE] * (n - q - 1)
        r0 = simulate(circuit.with_measurements(meas), planner=planner, seed=seed, **kwargs).value.real
        p0 = min(max(r0 / prefix, 0.0), 1.0)
        bit = _choose(p0, rng)
        prefix = r0 if bit == 0 else prefix - r0
        bits.append(bit)
        p0s.append(p0)
        chosen.append(Measurement.PROJ0 if bit == 0 else Measurement.PROJ1)
        if on_step is not None:
            on_step(q, bit, p0)
    if prefix < 1e-14 * 0.5**n:
        raise VanishingBranch(f"vanishing branch: output string has probability {prefix:.3g}")
    return AnswerString(tuple(bits), tuple(p0s))


def answer_string_from_distribution(probs: np.ndarray, rng: random.Random) -> AnswerString:
    """The same qubit-by-qubit rule applied to an explicit distribution over ``2**n`` strings."""
    n = int(round(math.log2(len(probs))))
    sub = np.asarray(probs, dtype=float).reshape((2,) * n)
    bits, p0s = [], []
    for _ in range(n):
        marg = sub.reshape(2, -1).sum(axis=1)
        total = marg.sum()
        if total <= 0:
            raise VanishingBranch("vanishing branch")
        p0 = float(marg[0] / total)
        bit = _choose(p0, rng)
        bits.append(bit)
        p0s.append(p0)
        sub = sub[bit]
    return AnswerString(tuple(bits), tuple(p0s))


def product_distribution(ans: AnswerString) -> np.ndarray:
    """``p'`` of the product state whose qubit ``k`` is 0 with the step-``k`` probability."""
    p = np.ones(1)
    for p0 in ans.p0:
        p = np.kron(p, [p0, 1.0 - p0])
    return p


RANK_TOL = 1e-12


def string_rank(probs: np.ndarray, bits: Sequence[int]) -> int:
    """Number of basis states strictly more probable than ``bits``.

    Differences below ``RANK_TOL`` count as ties so rounding noise in
    ``|psi|**2`` does not split equal probabilities.
    """
    idx = int("".join(map(str, bits)), 2) if len(bits) else 0
    return int(np.count_nonzero(probs > probs[idx] + RANK_TOL))


def qaoa_like_state(n: int, diagonals: Sequence[np.ndarray], betas: Sequence[float],
                    gammas: Sequence[float]) -> np.ndarray:
    """``prod_j exp(i beta_j sum X) exp(i gamma_j D_j)`` applied to the uniform superposition."""
    psi = np.full(2**n, 2 ** (-n / 2), dtype=np.complex128)
    for d, beta, gamma in zip(diagonals, betas, gammas):
        psi = psi * np.exp(1j * gamma * np.asarray(d))
        c, s = math.cos(beta), 1j * math.sin(beta)
        t = psi.reshape((2,) * n)
        for q in range(n):
            a = np.take(t, 0, axis=q)
            b = np.take(t, 1, axis=q)
            t = np.stack([c * a + s * b, s * a + c * b], axis=q)
        psi = t.reshape(-1)
    return psi


@dataclass
class HarnessResult:
    ranks: np.ndarray
    l1: np.ndarray
    n: int

    def rank_histogram(self) -> np.ndarray:
        return np.bincount(self.ranks, minlength=2**self.n)

    def top_fraction(self, frac: float = 0.1) -> float:
        """Share of trials whose output ranks within the top ``frac`` of strings."""
        return float(np.mean(self.ranks < frac * 2**self.n))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "rank", "l1"])
        for i, (r, d) in enumerate(zip(self.ranks, self.l1)):
            w.writerow([i, int(r), repr(float(d))])
        return buf.getvalue()


def product_state_harness(n: int = 6, m: int = 10, p: int = 2, trials: int = 10_000, seed: int = 0) -> HarnessResult:
    """Score the answer-string rule on random QAOA-like states.

    Each trial draws ``p`` diagonals with integer entries in ``1..n*m``,
    ``beta_j`` in ``[0, pi]`` and ``gamma_j`` in ``[0, 2 pi]``. The phase
    layers are dense on ``2**n`` amplitudes, so trials run on an exact state
    vector rather than the tensor network.
    """
    if n > 12:
        raise ValueError("harness runs on exact state vectors; n must be <= 12")
    rng = np.random.default_rng(seed)
    tie_rng = random.Random(seed)
    ranks = np.empty(trials, dtype=np.int64)
    l1 = np.empty(trials)
    for t in range(trials):
        diagonals = [rng.integers(1, n * m + 1, size=2**n) for _ in range(p)]
        betas = rng.uniform(0, math.pi, size=p)
        gammas = rng.uniform(0, 2 * math.pi, size=p)
        probs = np.abs(qaoa_like_state(n, diagonals, betas, gammas)) ** 2
        ans = answer_string_from_distribution(probs, tie_rng)
        ranks[t] = string_rank(probs, ans.bits)
        l1[t] = np.abs(product_distribution(ans) - probs).sum()
    return HarnessResult(ranks, l1, n)


def grid_scan(inst: MaxCutInstance, points: int = 50, planner: str = "lg", evaluate=None):
    """Best ``(gamma, beta, <C>)`` over a ``points x points`` grid for p = 1."""
    evaluate = evaluate or (lambda params: expectation_of_cut(inst, params, planner=planner))
    best = None
    for gamma in np.linspace(0, 2 * math.pi, points, endpoint=False):
        for beta in np.linspace(0, math.pi, points, endpoint=False):
            val = evaluate(QaoaParams((gamma,), (beta,)))
            if best is None or val > best[2]:
                best = (float(gamma), float(beta), float(val))
    return best
