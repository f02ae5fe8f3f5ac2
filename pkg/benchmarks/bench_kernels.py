"""Compare the numba and numpy contraction backends.

Times the raw matrix kernel on a few contraction shapes and one end-to-end
QAOA edge expectation per backend. Run from the repository root:

    python3 benchmarks/bench_kernels.py --repeat 5 --threads 4
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from tncirc import kernels, tensor
from tncirc.qaoa import QaoaParams, edge_circuit, random_regular_graph
from tncirc.network import simulate

# (rows, summed, cols) as powers of the leg dimension 4
SHAPES = [(3, 2, 3), (5, 2, 4), (6, 3, 5), (8, 2, 6)]


def _best(fn, repeat: int) -> float:
    fn()  # warm up (numba compilation, caches)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_matmul(backends: list[str], repeat: int, threads: int) -> None:
    rng = np.random.default_rng(0)
    print(f"{'shape (4^x, 4^y, 4^z)':<24}" + "".join(f"{b:>14}" for b in backends))
    for x, y, z in SHAPES:
        a = rng.standard_normal((4**x, 4**y)) + 1j * rng.standard_normal((4**x, 4**y))
        b = rng.standard_normal((4**y, 4**z)) + 1j * rng.standard_normal((4**y, 4**z))
        row = f"{f'({x}, {y}, {z})':<24}"
        for backend in backends:
            secs = _best(lambda: kernels.matmul(a, b, threads=threads, backend=backend), repeat)
            row += f"{secs * 1e3:>11.2f} ms"
        print(row)


def bench_end_to_end(backends: list[str], repeat: int, threads: int) -> None:
    inst = random_regular_graph(14, 4, seed=1)
    circuit = edge_circuit(inst, QaoaParams((0.7,), (0.3,)), inst.edges[0])
    saved = tensor.config.backend
    values = {}
    print(f"\nQAOA edge expectation, n={inst.n}, degree 4, p=1")
    try:
        for backend in backends:
            tensor.configure(backend=backend)
            secs = _best(lambda: simulate(circuit, threads=threads), repeat)
            rep = simulate(circuit, threads=threads)
            values[backend] = rep.value
            print(f"  {backend:<8}{secs * 1e3:>10.2f} ms  flops {rep.flops}  value {rep.value.real:+.12f}")
    finally:
        tensor.configure(backend=saved)
    if len(values) == 2:
        diff = abs(values["numba"] - values["numpy"])
        print(f"  backend difference {diff:.2e}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    backends = ["numba", "numpy"] if kernels.NUMBA_OK else ["numpy"]
    if not kernels.NUMBA_OK:
        print("numba unavailable or disabled; timing numpy only")
    bench_matmul(backends, args.repeat, args.threads)
    bench_end_to_end(backends, args.repeat, args.threads)


if __name__ == "__main__":
    main()
