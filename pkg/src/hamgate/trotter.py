"""First-order Trotterized ansatz circuits and their dense evaluation.

Rotation convention: ``R_a(phi) = exp(-i phi sigma^a / 2)``, while a term
exponential ``TERMEXP(P, phi) = exp(-i phi P) = cos(phi) I - i sin(phi) P``.
A ZZ exponential therefore decomposes as ``CNOT, RZ(2 phi), CNOT``.
"""
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import CapacityError, ValidationError
from .linalg import CNOT, H, PAULI, apply_gate_to_columns, kron_all
from .validation import MAX_QUBITS, check_qubit_indices

MODES = ("primitive", "decomposed")
_ROTATIONS = {"RX": "x", "RY": "y", "RZ": "z"}
_ARITY = {"H": 1, "RX": 1, "RY": 1, "RZ": 1, "CNOT": 2}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple
    angle: float = None
    axes: str = None
    payload: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise ValidationError(f"{self.kind} has repeated operands {self.qubits}")
        if self.kind in _ARITY:
            if len(self.qubits) != _ARITY[self.kind]:
                raise ValidationError(f"{self.kind} takes {_ARITY[self.kind]} qubit(s)")
        elif self.kind == "TERMEXP":
            if self.axes is None or len(self.axes) != len(self.qubits) or len(self.qubits) not in (1, 2):
                raise ValidationError(f"TERMEXP needs 1-2 qubits with matching axes")
        elif self.kind == "UNITARY":
            if self.payload is None or self.payload.shape != (2 ** len(self.qubits),) * 2:
                raise ValidationError("UNITARY gate payload does not match its operands")
        else:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        if self.kind in _ROTATIONS or self.kind == "TERMEXP":
            if self.angle is None or not np.isfinite(self.angle):
                raise ValidationError(f"{self.kind} needs a finite angle")
            object.__setattr__(self, "angle", float(self.angle))

    def matrix(self):
        """The gate's local matrix on its own operands."""
        if self.kind == "H":
            return H
        if self.kind == "CNOT":
            return CNOT
        if self.kind in _ROTATIONS:
            p = PAULI[_ROTATIONS[self.kind]]
            return np.cos(self.angle / 2) * np.eye(2) - 1j * np.sin(self.angle / 2) * p
        if self.kind == "TERMEXP":
            p = kron_all(*(PAULI[a] for a in self.axes))
            return np.cos(self.angle) * np.eye(len(p)) - 1j * np.sin(self.angle) * p
        return self.payload

    def shifted(self, offset):
        return Gate(self.kind, tuple(q + offset for q in self.qubits), self.angle, self.axes, self.payload)


def hadamard(q):
    return Gate("H", (q,))


def rotation(axis, q, angle):
    return Gate("R" + axis.upper(), (q,), angle)


def cnot(control, target):
    return Gate("CNOT", (control, target))


def term_exp(term, angle):
    return Gate("TERMEXP", term.qubits, angle, term.axes)


def dense(matrix, qubits):
    m = np.asarray(matrix, dtype=complex)
    m.setflags(write=False)
    return Gate("UNITARY", tuple(qubits), payload=m)


@dataclass
class Circuit:
    n_qubits: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("a circuit needs at least one qubit")
        self.gates = list(self.gates)
        for g in self.gates:
            check_qubit_indices(g.qubits, self.n_qubits)

    def append(self, gate):
        check_qubit_indices(gate.qubits, self.n_qubits)
        self.gates.append(gate)
        return self

    def extend(self, gates):
        for g in gates:
            self.append(g)
        return self

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


@dataclass(frozen=True)
class TrotterConfig:
    steps: int = 1
    mode: str = "primitive"

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValidationError(f"Trotter steps must be a positive integer, got {self.steps!r}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "steps", int(self.steps))


def slice_angles(theta, steps):
    """Per-occurrence angles ``theta / m`` laid out as ``(steps, Q)``."""
    theta = np.asarray(theta, dtype=float)
    return np.tile(theta / steps, (steps, 1))


def _decomposed_term(term, angle):
    if term.is_local:
        return [rotation(term.axes, term.qubits[0], 2 * angle)]
    pre, post = [], []
    for q, a in zip(term.qubits, term.axes):
        if a == "x":
            pre.append(hadamard(q))
            post.append(hadamard(q))
        elif a == "y":
            # RX(pi/2) Y RX(-pi/2) = Z
            pre.append(rotation("x", q, np.pi / 2))
            post.append(rotation("x", q, -np.pi / 2))
    i, j = term.qubits
    return pre + [cnot(i, j), rotation("z", j, 2 * angle), cnot(i, j)] + post


def build_circuit(spec, angles, mode="primitive"):
    """Circuit for explicit per-occurrence angles of shape ``(steps, Q)``."""
    angles = np.asarray(angles, dtype=float)
    if angles.ndim != 2 or angles.shape[1] != len(spec.terms):
        raise ValidationError(f"angles shape {angles.shape} does not match {len(spec.terms)} terms")
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    circ = Circuit(spec.n_qubits)
    for row in angles:
        for term, phi in zip(spec.terms, row):
            if mode == "primitive":
                circ.append(term_exp(term, phi))
            else:
                circ.extend(_decomposed_term(term, phi))
    return circ


def trotterize(spec, theta, cfg):
    """Circuit for ``(prod_j exp(-i theta_j H_j / m))**m``, terms in spec order."""
    theta = spec.check_theta(theta)
    return build_circuit(spec, slice_angles(theta, cfg.steps), cfg.mode)


def circuit_unitary(circ):
    if circ.n_qubits > MAX_QUBITS:
        raise CapacityError(f"{circ.n_qubits} qubits exceeds the dense limit of {MAX_QUBITS}")
    u = np.eye(2**circ.n_qubits, dtype=complex)
    for g in circ.gates:
        u = apply_gate_to_columns(u, g.matrix(), g.qubits)
    return u


def trotter_unitary(spec, theta, steps):
    """Dense Trotter product without building a circuit (optimizer hot path)."""
    theta = spec.check_theta(theta)
    return unitary_from_angles(spec, slice_angles(theta, steps))


def unitary_from_angles(spec, angles):
    dim = 2**spec.n_qubits
    eye = np.eye(dim)
    mats = spec.matrices()
    u = np.eye(dim, dtype=complex)
    for row in angles:
        for m, phi in zip(mats, row):
            u = (np.cos(phi) * eye - 1j * np.sin(phi) * m) @ u
    return u


def two_qubit_gate_count(circ):
    """CNOTs plus two-qubit term exponentials; local and dense gates are free."""
    return sum(
        1 for g in circ.gates if g.kind == "CNOT" or (g.kind == "TERMEXP" and len(g.qubits) == 2)
    )


def dump_circuit(circ):
    lines = [f"# n_qubits={circ.n_qubits}"]
    for g in circ.gates:
        qs = " ".join(str(q) for q in g.qubits)
        if g.kind in ("H", "CNOT"):
            lines.append(f"{g.kind} {qs}")
        elif g.kind in _ROTATIONS:
            lines.append(f"{g.kind} {qs} {g.angle!r}")
        elif g.kind == "TERMEXP":
            lines.append(f"TERMEXP {g.axes} {qs} {g.angle!r}")
        else:
            lines.append(f"UNITARY {qs}")
    return "\n".join(lines) + "\n"


def parse_circuit(text, n_qubits=None):
    """Inverse of :func:`dump_circuit` for circuits without dense payloads."""
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("# n_qubits=") and n_qubits is None:
            n_qubits = int(line.split("=", 1)[1])
            continue
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            kind = tok[0].upper()
            if kind in ("H", "CNOT"):
                gates.append(Gate(kind, tuple(int(q) for q in tok[1:])))
            elif kind in _ROTATIONS:
                gates.append(Gate(kind, (int(tok[1]),), float(tok[2])))
            elif kind == "TERMEXP":
                axes = tok[1].lower()
                qs = tuple(int(q) for q in tok[2 : 2 + len(axes)])
                gates.append(Gate("TERMEXP", qs, float(tok[2 + len(axes)]), axes))
            else:
                raise ValidationError(f"gate {kind!r} cannot be parsed from text")
        except (IndexError, ValueError) as exc:
            raise ValidationError(f"line {lineno}: cannot parse {raw!r} ({exc})")
    if n_qubits is None:
        n_qubits = 1 + max((max(g.qubits) for g in gates), default=0)
    return Circuit(n_qubits, gates)


def save_circuit(path, circ):
    Path(path).write_text(dump_circuit(circ))
