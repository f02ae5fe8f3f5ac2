import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tncirc import gates
from tncirc.circuit import Circuit, CircuitError, GateApplication, UserGate, parse_circuit, serialize_circuit
from tncirc.gates import Measurement

from _helpers import random_circuit


def test_parse_bell_circuit():
    c = parse_circuit("2\nH 0\nCNOT 0 1\nMEASZ 0\nMEASZ 1")
    assert c.num_qubits == 2
    assert c.ops == [GateApplication("H", (0,)), GateApplication("CNOT", (0, 1))]
    assert c.measurements == [Measurement.Z, Measurement.Z]


def test_parse_parameterized_gate_defaults_to_trace():
    c = parse_circuit("1\nRZ 1.5707963 0")
    assert c.ops == [GateApplication("RZ", (0,), (1.5707963,))]
    assert c.measurements == [Measurement.TRACE]


def test_duplicate_qubit_rejected():
    with pytest.raises(CircuitError, match="duplicate qubit in two-qubit gate"):
        parse_circuit("2\nCNOT 1 1")


@pytest.mark.parametrize(
    "text, message, line",
    [
        ("2\nFOO 0", "unknown gate", 2),
        ("2\nH 2", "out of range", 2),
        ("1\nRX abc 0", "malformed parameter", 2),
        ("1\nRX nan 0", "non-finite", 2),
        ("2\nMEASZ 0\nMEASX 0", "duplicate measurement", 3),
        ("2\nMEASZ 5", "out of range", 2),
        ("1\nH", "expects 0 parameter", 2),
        ("", "empty", None),
        ("0", "positive", 1),
        ("x", "malformed qubit count", 1),
        ("1\nDEF G 1 1,0 0,0 0,0", "needs 4 or 16", 2),
        ("1\nDEF G 1 1,0 1,0 0,0 1,0", "not unitary", 2),
        ("1\nDEF H 1 1,0 0,0 0,0 1,0", "reserved", 2),
        ("1\nKRAUS K 1 1 0.5,0 0,0 0,0 0.5,0", "E_j", 2),
        ("1\nDEF G 3 1,0", "arity", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, message, line):
    with pytest.raises(CircuitError, match=message) as info:
        parse_circuit(text)
    assert info.value.line == line


def test_comments_and_blank_lines_ignored():
    c = parse_circuit("# header\n\n2  # qubits\nH 0 # hadamard\n\nmeasz 1\n")
    assert c.ops == [GateApplication("H", (0,))]
    assert c.measurements == [Measurement.TRACE, Measurement.Z]


def test_def_unitary_multiline():
    text = "1\nDEF MYX 1\n0,0 1,0\n1,0 0,0\nMYX 0\nMEASZ 0\n"
    c = parse_circuit(text)
    assert np.array_equal(c.superoperator(c.ops[0]), gates.make_superoperator(gates.X))


def test_def_raw_superoperator_not_trace_preserving():
    zero = " ".join(["0,0"] * 16)
    c = parse_circuit(f"1\nDEF KILL 1 {zero}\nKILL 0\n")
    assert not c.is_trace_preserving
    assert c.kraus_operators(c.ops[0]) is None


def test_kraus_block_parses_to_channel():
    ch = gates.amplitude_damping(0.3)
    entries = " ".join(f"{float(v.real)!r},{float(v.imag)!r}" for e in ch.operators for v in e.reshape(-1))
    c = parse_circuit(f"1\nKRAUS AD 1 2 {entries}\nAD 0\n")
    assert np.allclose(c.superoperator(c.ops[0]), ch.superoperator())


def test_builder_validates():
    c = Circuit(2)
    with pytest.raises(CircuitError):
        c.add("RX", 0)
    with pytest.raises(CircuitError):
        c.add("CNOT", 0, 2)
    with pytest.raises(CircuitError):
        Circuit(2, measurements=[Measurement.Z])


def test_with_measurements_dict_fills_trace():
    c = Circuit(3).with_measurements({1: Measurement.X})
    assert c.measurements == [Measurement.TRACE, Measurement.X, Measurement.TRACE]


def _roundtrip(c: Circuit) -> Circuit:
    return parse_circuit(serialize_circuit(c))


def test_roundtrip_with_user_gates():
    rng = np.random.default_rng(3)
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    u = np.linalg.qr(z)[0]
    c = Circuit(2)
    c.define(UserGate("U2", 2, unitary=u))
    c.define(UserGate("DEP", 1, kraus=gates.depolarizing(0.2)))
    c.define(UserGate("RAW", 1, superop=np.arange(16) * (0.1 + 0.2j)))
    c.add("U2", 1, 0).add("DEP", 0).add("RAW", 1).add("ZZ", 0, 1, params=[math.pi / 3])
    c = c.with_measurements([Measurement.Y, Measurement.PROJ1])
    assert _roundtrip(c) == c


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5), g=st.integers(0, 20), noisy=st.booleans())
def test_roundtrip_random(seed, n, g, noisy):
    c = random_circuit(random.Random(seed), n, g, noisy=noisy, measurements=list(Measurement))
    assert _roundtrip(c) == c


def test_light_cone_drops_only_dead_gates():
    c = Circuit(3).add("H", 0).add("H", 1).add("CNOT", 1, 2).add("RX", 2, params=[0.3]).add("H", 0)
    c = c.with_measurements({0: Measurement.X})
    pruned = c.light_cone()
    assert pruned.ops == [GateApplication("H", (0,)), GateApplication("H", (0,))]


def test_light_cone_keeps_raw_superoperators():
    zero = " ".join(["0,0"] * 16)
    c = parse_circuit(f"2\nDEF KILL 1 {zero}\nKILL 1\nH 0\nMEASZ 0\n")
    assert [op.gate for op in c.light_cone().ops] == ["KILL", "H"]


def test_light_cone_follows_two_qubit_gates_backwards():
    c = Circuit(3).add("H", 2).add("CNOT", 2, 1).add("CNOT", 1, 0).add("X", 2)
    c = c.with_measurements({0: Measurement.Z})
    assert [op.gate for op in c.light_cone().ops] == ["H", "CNOT", "CNOT"]
