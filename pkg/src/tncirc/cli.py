"""Command-line entry point: ``tncirc <subcommand> ...``.

Exit codes: 0 success, 1 bad input (parse errors, bad ordering files,
parity violations), 2 rank cap exceeded, 3 vanishing answer-string branch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import tensor
from .circuit import CircuitError, parse_circuit, serialize_circuit
from .graphs import write_graph
from .network import build_network, execute_plan
from .oracle import oracle_expectation
from .ordering import plan_network, read_ordering, write_ordering
from .qaoa import (
    QaoaParams,
    VanishingBranch,
    edge_circuit,
    estimate_answer_string,
    product_state_harness,
    qaoa_circuit,
    random_regular_graph,
)

EXIT_INPUT = 1
EXIT_RANK_CAP = 2
EXIT_VANISHING = 3


@dataclass
class RunConfig:
    planner: str = "lg"
    threads: int = 8
    seed: int = 0
    budget: int | None = None
    budget_seconds: float | None = None
    max_rejections: int | None = None
    rank_cap: int = 15
    output_format: str = "text"
    ordering_file: str | None = None
    light_cone: bool = False

    def __post_init__(self):
        if self.planner not in ("lg", "stoch"):
            raise ValueError(f"unknown planner {self.planner!r}")
        if self.output_format not in ("text", "jsonl"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        for name in ("threads", "rank_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        for name in ("budget", "max_rejections", "budget_seconds"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError("--seed must fit in 64 unsigned bits")

    @classmethod
    def from_args(cls, args) -> RunConfig:
        return cls(
            planner=args.planner,
            threads=args.threads,
            seed=args.seed,
            budget=args.budget,
            budget_seconds=args.budget_seconds,
            max_rejections=args.max_rejections,
            rank_cap=args.rank_cap,
            output_format=args.format,
            ordering_file=args.ordering_file,
            light_cone=args.light_cone,
        )

    def apply(self) -> None:
        tensor.configure(threads=self.threads, rank_cap=self.rank_cap)


class _Out:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, record: dict, text: str) -> None:
        line = json.dumps(record) if self.fmt == "jsonl" else text
        print(line, file=self.stream, flush=True)


def _load_circuit(path: str, cfg: RunConfig | None = None):
    circuit = parse_circuit(Path(path).read_text(encoding="utf-8"))
    return circuit.light_cone() if cfg is not None and cfg.light_cone else circuit


def _plan(net, cfg: RunConfig):
    ordering = None
    if cfg.ordering_file:
        ordering = read_ordering(Path(cfg.ordering_file).read_text())
    return plan_network(net, planner=cfg.planner, seed=cfg.seed, budget=cfg.budget,
                        max_rejections=cfg.max_rejections, seconds=cfg.budget_seconds, ordering=ordering)


def cmd_simulate(args, cfg: RunConfig, out: _Out) -> int:
    circuit = _load_circuit(args.circuit, cfg)
    net = build_network(circuit)
    t0 = time.perf_counter()
    plan = _plan(net, cfg)
    value, cost = execute_plan(net, plan)
    wall = time.perf_counter() - t0
    record = {
        "command": "simulate",
        "value_re": value.real,
        "value_im": value.imag,
        "flops": cost.flops,
        "peak_rank": cost.peak_rank,
        "width": plan.width,
        "planner": plan.planner,
        "wall_seconds": wall,
    }
    out.emit(record, (
        f"value      {value.real:.15g} {value.imag:+.3g}i\n"
        f"flops      {cost.flops}\n"
        f"peak rank  {cost.peak_rank}\n"
        f"width      {plan.width}\n"
        f"wall time  {wall:.3f} s"
    ))
    return 0


def cmd_plan(args, cfg: RunConfig, out: _Out) -> int:
    circuit = _load_circuit(args.circuit, cfg)
    net = build_network(circuit)
    plan = _plan(net, cfg)
    vertex = {w: i for i, w in enumerate(net.wire_ids())}
    ordering = [vertex[w] for w in plan.order]
    if args.output:
        Path(args.output).write_text(write_ordering(ordering))
    record = {
        "command": "plan",
        "planner": plan.planner,
        "width": plan.width,
        "predicted_flops": plan.predicted_flops,
        "predicted_peak_rank": plan.predicted_peak_rank,
        "ordering": ordering,
    }
    out.emit(record, (
        f"width            {plan.width}\n"
        f"predicted flops  {plan.predicted_flops}\n"
        f"peak rank        {plan.predicted_peak_rank}\n"
        f"ordering         {write_ordering(ordering).strip()}"
    ))
    return 0


def cmd_qaoa_gen(args, cfg: RunConfig, out: _Out) -> int:
    gammas = args.gammas or [0.0] * args.p
    betas = args.betas or [0.0] * args.p
    if len(gammas) != args.p or len(betas) != args.p:
        raise ValueError(f"need exactly {args.p} gammas and betas")
    inst = random_regular_graph(args.n, args.k, seed=cfg.seed)
    params = QaoaParams(tuple(gammas), tuple(betas))
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "graph.txt").write_text(write_graph(inst.graph))
    (outdir / "circuit.txt").write_text(serialize_circuit(qaoa_circuit(inst, params)))
    if args.per_edge:
        for idx, edge in enumerate(inst.edges):
            (outdir / f"edge_{idx}.txt").write_text(serialize_circuit(edge_circuit(inst, params, edge)))
    out.emit({"command": "qaoa-gen", "edges": inst.graph.num_edges, "out_dir": str(outdir)},
             f"edges {inst.graph.num_edges}")
    return 0


def cmd_answer_string(args, cfg: RunConfig, out: _Out) -> int:
    circuit = _load_circuit(args.circuit)

    def step(q, bit, p0):
        out.emit({"step": q, "bit": bit, "p0": p0, "p1": 1.0 - p0},
                 f"qubit {q}: P(0)={p0:.6f} -> {bit}")

    ans = estimate_answer_string(circuit, planner=cfg.planner, seed=cfg.seed, budget=cfg.budget,
                                 max_rejections=cfg.max_rejections, seconds=cfg.budget_seconds,
                                 on_step=step)
    out.emit({"bits": str(ans), "probability": ans.probability}, f"answer {ans}")
    return 0


def cmd_harness(args, cfg: RunConfig, out: _Out) -> int:
    res = product_state_harness(n=args.n, m=args.m, p=args.p, trials=args.trials, seed=cfg.seed)
    if args.csv:
        Path(args.csv).write_text(res.to_csv())
    record = {
        "command": "harness",
        "trials": args.trials,
        "top10_fraction": res.top_fraction(0.1),
        "l1_median": float(sorted(res.l1)[len(res.l1) // 2]),
        "l1_below_0.15": float((res.l1 < 0.15).mean()),
    }
    out.emit(record, "\n".join(f"{k:16s} {v}" for k, v in record.items() if k != "command"))
    return 0


def cmd_oracle(args, cfg: RunConfig, out: _Out) -> int:
    circuit = _load_circuit(args.circuit)
    value = oracle_expectation(circuit)
    out.emit({"command": "oracle", "value_re": value.real, "value_im": value.imag},
             f"value {value.real:.15g} {value.imag:+.3g}i")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--planner", choices=["lg", "stoch"], default="lg")
    common.add_argument("--threads", type=int, default=8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None, help="lg planner restarts")
    common.add_argument("--budget-seconds", type=float, default=None)
    common.add_argument("--max-rejections", type=int, default=None)
    common.add_argument("--rank-cap", type=int, default=15)
    common.add_argument("--format", choices=["text", "jsonl"], default="text")
    common.add_argument("--ordering-file", default=None)
    common.add_argument("--light-cone", action="store_true",
                        help="drop gates that cannot influence the measured qubits before planning")

    parser = argparse.ArgumentParser(prog="tncirc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="contract a circuit file")
    p.add_argument("circuit")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plan", parents=[common], help="plan only, no tensor data")
    p.add_argument("circuit")
    p.add_argument("--output", default=None, help="write the ordering to this file")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("qaoa-gen", parents=[common], help="random regular Max-Cut QAOA circuit")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("p", type=int)
    p.add_argument("--gammas", type=float, nargs="+")
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--per-edge", action="store_true", help="also write one ZZ-measured circuit per edge")
    p.set_defaults(func=cmd_qaoa_gen)

    p = sub.add_parser("answer-string", parents=[common], help="estimate a likely output bit string")
    p.add_argument("circuit")
    p.set_defaults(func=cmd_answer_string)

    p = sub.add_parser("harness", parents=[common], help="product-state answer-string experiment")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_harness)

    p = sub.add_parser("oracle", parents=[common], help="brute-force density-matrix expectation")
    p.add_argument("circuit")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        cfg.apply()
        out = _Out(cfg.output_format)
        return args.func(args, cfg, out)
    except tensor.RankCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANK_CAP
    except VanishingBranch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VANISHING
    except (CircuitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
