"""Circuit representation and the line-oriented circuit file format.

Grammar (``#`` starts a comment, blank lines are ignored)::

    <num_qubits>
    <GATE> [<param>] <q> [<q2>]
    MEAST|MEASX|MEASY|MEASZ|PROJ0|PROJ1 <q>
    DEF <name> <1|2> <entries...>
    KRAUS <name> <1|2> <count> <entries...>

``DEF`` entries are ``re,im`` pairs in row-major order and may continue on
following lines. For arity 1, 4 entries give a unitary and 16 give a raw
superoperator matrix; for arity 2, 16 and 256 respectively. ``KRAUS``
takes ``count`` operator matrices back to back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .gates import (
    BUILTIN_GATES,
    KrausChannel,
    Measurement,
    is_unitary,
    make_superoperator,
)

_MEAS_TOKENS = {m.value: m for m in Measurement}


class CircuitError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True, eq=False)
class UserGate:
    """A gate defined in the circuit file.

    Exactly one of ``unitary``, ``superop`` or ``kraus`` is set. ``superop``
    is a square matrix in per-qubit leg order and is not checked for trace
    preservation.
    """

    name: str
    arity: int
    unitary: np.ndarray | None = None
    superop: np.ndarray | None = None
    kraus: KrausChannel | None = None

    def __post_init__(self):
        set_fields = [f for f in (self.unitary, self.superop, self.kraus) if f is not None]
        if len(set_fields) != 1:
            raise ValueError("user gate needs exactly one of unitary, superop, kraus")
        d = 2**self.arity
        if self.unitary is not None:
            u = np.asarray(self.unitary, dtype=np.complex128).reshape(d, d)
            if not is_unitary(u):
                raise ValueError(f"DEF {self.name}: matrix is not unitary")
            object.__setattr__(self, "unitary", u)
        if self.superop is not None:
            object.__setattr__(self, "superop", np.asarray(self.superop, dtype=np.complex128).reshape(d * d, d * d))
        if self.kraus is not None and self.kraus.arity != self.arity:
            raise ValueError(f"KRAUS {self.name}: operator size does not match arity {self.arity}")

    def superoperator(self) -> np.ndarray:
        shape = (4,) * (2 * self.arity)
        if self.unitary is not None:
            return make_superoperator(self.unitary)
        if self.kraus is not None:
            return self.kraus.superoperator()
        return self.superop.reshape(shape)

    def __eq__(self, other):
        if not isinstance(other, UserGate) or (self.name, self.arity) != (other.name, other.arity):
            return False
        if self.kraus is not None or other.kraus is not None:
            return self.kraus == other.kraus
        a = self.unitary if self.unitary is not None else self.superop
        b = other.unitary if other.unitary is not None else other.superop
        return (self.unitary is None) == (other.unitary is None) and np.array_equal(a, b)

    __hash__ = object.__hash__


@dataclass(frozen=True)
class GateApplication:
    gate: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()


@dataclass
class Circuit:
    num_qubits: int
    ops: list[GateApplication] = field(default_factory=list)
    measurements: list[Measurement] = field(default_factory=list)
    definitions: dict[str, UserGate] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        if not self.measurements:
            self.measurements = [Measurement.TRACE] * self.num_qubits
        if len(self.measurements) != self.num_qubits:
            raise CircuitError("exactly one measurement per qubit is required")
        for op in self.ops:
            self.validate(op)

    def arity_of(self, name: str) -> tuple[int, int]:
        if name in self.definitions:
            return self.definitions[name].arity, 0
        spec = BUILTIN_GATES.get(name)
        if spec is None:
            raise CircuitError(f"unknown gate {name!r}")
        return spec.arity, spec.nparams

    def validate(self, op: GateApplication) -> None:
        arity, nparams = self.arity_of(op.gate)
        if len(op.qubits) != arity:
            raise CircuitError(f"{op.gate} acts on {arity} qubit(s), got {len(op.qubits)}")
        if len(op.params) != nparams:
            raise CircuitError(f"{op.gate} takes {nparams} parameter(s), got {len(op.params)}")
        for q in op.qubits:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"qubit index {q} out of range [0, {self.num_qubits})")
        if len(set(op.qubits)) != len(op.qubits):
            raise CircuitError("duplicate qubit in two-qubit gate")

    def add(self, gate: str, *qubits: int, params: Sequence[float] = ()) -> Circuit:
        op = GateApplication(gate, tuple(int(q) for q in qubits), tuple(float(p) for p in params))
        self.validate(op)
        self.ops.append(op)
        return self

    def define(self, gate: UserGate) -> Circuit:
        if gate.name in BUILTIN_GATES or gate.name in _MEAS_TOKENS or gate.name in ("DEF", "KRAUS"):
            raise CircuitError(f"cannot redefine reserved name {gate.name!r}")
        self.definitions[gate.name] = gate
        return self

    def superoperator(self, op: GateApplication) -> np.ndarray:
        if op.gate in self.definitions:
            return self.definitions[op.gate].superoperator()
        return make_superoperator(BUILTIN_GATES[op.gate].unitary(*op.params), check=False)

    def kraus_operators(self, op: GateApplication) -> list[np.ndarray] | None:
        """Kraus form of ``op``; ``None`` for a raw superoperator definition."""
        user = self.definitions.get(op.gate)
        if user is None:
            return [BUILTIN_GATES[op.gate].unitary(*op.params)]
        if user.unitary is not None:
            return [user.unitary]
        if user.kraus is not None:
            return list(user.kraus.operators)
        return None

    def with_measurements(self, measurements: Sequence[Measurement] | dict[int, Measurement]) -> Circuit:
        if isinstance(measurements, dict):
            meas = [Measurement.TRACE] * self.num_qubits
            for q, m in measurements.items():
                meas[q] = m
        else:
            meas = list(measurements)
        return Circuit(self.num_qubits, list(self.ops), meas, dict(self.definitions))

    @property
    def is_trace_preserving(self) -> bool:
        return all(d.superop is None for d in self.definitions.values())

    def light_cone(self) -> Circuit:
        """Drop trace-preserving gates whose every output is eventually traced out.

        Walking backwards from the measurements, a qubit is live once anything
        after this point on it is kept or measured with a non-trace covector.
        A trace-preserving gate touching only dead qubits satisfies
        ``Tr_out(E(rho)) = Tr_in(rho)``, so removing it leaves the expectation
        unchanged. Raw superoperator definitions are always kept.
        """
        live = {q for q, m in enumerate(self.measurements) if m is not Measurement.TRACE}
        kept = []
        for op in reversed(self.ops):
            raw = op.gate in self.definitions and self.definitions[op.gate].superop is not None
            if raw or live.intersection(op.qubits):
                kept.append(op)
                live.update(op.qubits)
        return Circuit(self.num_qubits, kept[::-1], list(self.measurements), dict(self.definitions))

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.num_qubits == other.num_qubits
            and self.ops == other.ops
            and self.measurements == other.measurements
            and self.definitions.keys() == other.definitions.keys()
            and all(self.definitions[k] == other.definitions[k] for k in self.definitions)
        )


def _parse_complex(tok: str) -> complex:
    re_s, sep, im_s = tok.partition(",")
    if not sep:
        raise ValueError(tok)
    return complex(float(re_s), float(im_s))


def _is_entry(tok: str) -> bool:
    try:
        _parse_complex(tok)
    except ValueError:
        return False
    return True


def _parse_int(tok: str, what: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise CircuitError(f"malformed {what} {tok!r}", line) from None


def _parse_float(tok: str, line: int) -> float:
    try:
        value = float(tok)
    except ValueError:
        raise CircuitError(f"malformed parameter {tok!r}", line) from None
    if not math.isfinite(value):
        raise CircuitError(f"non-finite parameter {tok!r}", line)
    return value


def parse_circuit(text: str) -> Circuit:
    """Parse the circuit file format into a validated :class:`Circuit`."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            lines.append((lineno, tokens))
    if not lines:
        raise CircuitError("empty circuit file")

    head_line, head = lines[0]
    if len(head) != 1:
        raise CircuitError("first line must hold only the qubit count", head_line)
    num_qubits = _parse_int(head[0], "qubit count", head_line)
    if num_qubits < 1:
        raise CircuitError("qubit count must be positive", head_line)

    circuit = Circuit(num_qubits)
    measured: dict[int, Measurement] = {}
    i = 1
    while i < len(lines):
        lineno, tokens = lines[i]
        i += 1
        word = tokens[0]
        upper = word.upper()
        try:
            if upper in ("DEF", "KRAUS"):
                nhead = 3 if upper == "DEF" else 4
                if len(tokens) < nhead:
                    raise CircuitError(f"{upper} needs a name and an arity", lineno)
                name = tokens[1]
                arity = _parse_int(tokens[2], "arity", lineno)
                if arity not in (1, 2):
                    raise CircuitError(f"arity must be 1 or 2, got {arity}", lineno)
                count = _parse_int(tokens[3], "operator count", lineno) if upper == "KRAUS" else None
                entry_toks = tokens[nhead:]
                while i < len(lines) and all(_is_entry(t) for t in lines[i][1]):
                    entry_toks += lines[i][1]
                    i += 1
                bad = [t for t in entry_toks if not _is_entry(t)]
                if bad:
                    raise CircuitError(f"malformed complex entry {bad[0]!r}", lineno)
                entries = np.array([_parse_complex(t) for t in entry_toks], dtype=np.complex128)
                d = 2**arity
                try:
                    if upper == "DEF":
                        if entries.size == d * d:
                            gate = UserGate(name, arity, unitary=entries)
                        elif entries.size == d**4:
                            gate = UserGate(name, arity, superop=entries)
                        else:
                            raise CircuitError(
                                f"DEF {name} of arity {arity} needs {d * d} or {d**4} entries, got {entries.size}",
                                lineno,
                            )
                    else:
                        if count < 1 or entries.size != count * d * d:
                            raise CircuitError(
                                f"KRAUS {name} needs {count} x {d * d} entries, got {entries.size}", lineno
                            )
                        gate = UserGate(name, arity, kraus=KrausChannel(tuple(entries.reshape(count, d, d))))
                except CircuitError:
                    raise
                except ValueError as exc:
                    raise CircuitError(str(exc), lineno) from None
                circuit.define(gate)
            elif upper in _MEAS_TOKENS:
                if len(tokens) != 2:
                    raise CircuitError(f"{upper} takes exactly one qubit", lineno)
                q = _parse_int(tokens[1], "qubit index", lineno)
                if not 0 <= q < num_qubits:
                    raise CircuitError(f"qubit index {q} out of range [0, {num_qubits})", lineno)
                if q in measured:
                    raise CircuitError(f"duplicate measurement for qubit {q}", lineno)
                measured[q] = _MEAS_TOKENS[upper]
            else:
                name = word if word in circuit.definitions else upper
                arity, nparams = circuit.arity_of(name)
                if len(tokens) != 1 + nparams + arity:
                    raise CircuitError(
                        f"{name} expects {nparams} parameter(s) and {arity} qubit(s)", lineno
                    )
                params = [_parse_float(t, lineno) for t in tokens[1 : 1 + nparams]]
                qubits = [_parse_int(t, "qubit index", lineno) for t in tokens[1 + nparams :]]
                circuit.add(name, *qubits, params=params)
        except CircuitError as exc:
            if exc.line is None:
                raise CircuitError(str(exc), lineno) from None
            raise
    for q, m in measured.items():
        circuit.measurements[q] = m
    return circuit


def _fmt_entries(values: Iterable[complex]) -> str:
    return " ".join(f"{repr(float(v.real))},{repr(float(v.imag))}" for v in values)


def serialize_circuit(circuit: Circuit) -> str:
    out = [str(circuit.num_qubits)]
    for name, g in circuit.definitions.items():
        if g.kraus is not None:
            ops = g.kraus.operators
            out.append(f"KRAUS {name} {g.arity} {len(ops)}")
            out.extend(_fmt_entries(e.reshape(-1)) for e in ops)
        else:
            out.append(f"DEF {name} {g.arity}")
            mat = g.unitary if g.unitary is not None else g.superop
            out.extend(_fmt_entries(row) for row in mat)
    for op in circuit.ops:
        parts = [op.gate] + [repr(p) for p in op.params] + [str(q) for q in op.qubits]
        out.append(" ".join(parts))
    for q, m in enumerate(circuit.measurements):
        if m is not Measurement.TRACE:
            out.append(f"{m.value} {q}")
    return "\n".join(out) + "\n"
