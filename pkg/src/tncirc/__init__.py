"""Exact tensor-network contraction of quantum circuits in the superoperator picture."""

from .circuit import Circuit, CircuitError, GateApplication, UserGate, parse_circuit, serialize_circuit
from .gates import KrausChannel, Measurement, make_kraus_superoperator, make_superoperator
from .network import ContractionPlan, TensorNetwork, build_network, execute_plan, expectation, simulate
from .ordering import anytime_ordering, min_fill_ordering, plan_from_ordering, stochastic_plan
from .tensor import ContractionCost, RankCapExceeded, Tensor, contract, self_trace

__all__ = [
    "Circuit",
    "CircuitError",
    "ContractionCost",
    "ContractionPlan",
    "GateApplication",
    "KrausChannel",
    "Measurement",
    "RankCapExceeded",
    "Tensor",
    "TensorNetwork",
    "UserGate",
    "anytime_ordering",
    "build_network",
    "contract",
    "execute_plan",
    "expectation",
    "make_kraus_superoperator",
    "make_superoperator",
    "min_fill_ordering",
    "parse_circuit",
    "plan_from_ordering",
    "self_trace",
    "serialize_circuit",
    "simulate",
    "stochastic_plan",
]
