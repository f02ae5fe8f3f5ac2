import random

import numpy as np
import pytest

from tncirc.circuit import Circuit, parse_circuit
from tncirc.gates import BUILTIN_GATES, Measurement
from tncirc.oracle import oracle_distribution, oracle_expectation, oracle_simulate

from _helpers import random_circuit


def _full_unitary(n: int, u: np.ndarray, qubits) -> np.ndarray:
    """Embed ``u`` on ``qubits`` into the ``2**n`` space by permuting a Kronecker product."""
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    big = np.kron(u, np.eye(2 ** (n - k))).reshape((2,) * (2 * n))
    order = list(qubits) + rest
    inv = np.argsort(order)
    perm = list(inv) + [n + i for i in inv]
    return big.transpose(perm).reshape(2**n, 2**n)


def _statevector_expectation(c: Circuit) -> complex:
    n = c.num_qubits
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for op in c.ops:
        u = BUILTIN_GATES[op.gate].unitary(*op.params)
        psi = _full_unitary(n, u, op.qubits) @ psi
    obs = np.array([[1.0]])
    for m in c.measurements:
        obs = np.kron(obs, m.operator)
    return complex(psi.conj() @ obs @ psi)


def test_empty_circuit_is_ground_state():
    assert np.array_equal(oracle_simulate(Circuit(1)).vector, [1, 0, 0, 0])


def test_hadamard_state():
    assert np.allclose(oracle_simulate(parse_circuit("1\nH 0")).matrix, 0.5 * np.ones((2, 2)))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2\nH 0\nCNOT 0 1\nMEASZ 0\nMEASZ 1", 1),
        ("1\nH 0\nMEASZ 0", 0),
        ("1\nMEAST 0", 1),
        ("1\nX 0\nMEASZ 0", -1),
        ("1\nH 0\nMEASX 0", 1),
    ],
)
def test_expectation_examples(text, expected):
    assert abs(oracle_expectation(parse_circuit(text)) - expected) < 1e-12


def test_distributions():
    uniform = oracle_distribution(oracle_simulate(parse_circuit("3\nH 0\nH 1\nH 2")))
    assert np.allclose(uniform, 1 / 8)
    basis = oracle_distribution(oracle_simulate(parse_circuit("3\nX 1")))
    assert np.array_equal(basis, [0, 0, 1, 0, 0, 0, 0, 0])
    bell = oracle_distribution(oracle_simulate(parse_circuit("2\nH 0\nCNOT 0 1")))
    assert np.allclose(bell, [0.5, 0, 0, 0.5])


def test_too_many_qubits():
    with pytest.raises(ValueError, match="12"):
        oracle_simulate(Circuit(13))


def test_matches_independent_statevector():
    rng = random.Random(5)
    for _ in range(40):
        c = random_circuit(rng, rng.randint(1, 4), rng.randint(0, 15))
        assert abs(oracle_expectation(c) - _statevector_expectation(c)) < 1e-12


def test_unitary_circuit_states_are_physical():
    rng = random.Random(6)
    for _ in range(20):
        state = oracle_simulate(random_circuit(rng, 4, 20, noisy=rng.random() < 0.5))
        assert abs(state.trace() - 1) < 1e-10
        assert np.allclose(state.matrix, state.matrix.conj().T, atol=1e-10)
        probs = oracle_distribution(state)
        assert probs.min() >= -1e-12
        assert abs(probs.sum() - 1) < 1e-9


def test_measurement_order_follows_qubits():
    c = parse_circuit("2\nX 1\nMEASZ 0\nPROJ1 1")
    assert abs(oracle_expectation(c) - 1) < 1e-12
    c = c.with_measurements([Measurement.PROJ1, Measurement.TRACE])
    assert abs(oracle_expectation(c)) < 1e-12
