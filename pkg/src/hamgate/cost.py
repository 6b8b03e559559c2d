"""Operator-overlap cost and its Hilbert-Schmidt-test circuit estimators.

The HS test prepares ``n`` Bell pairs between registers ``x`` (qubits
``0..n-1``) and ``y`` (``n..2n-1``), runs the ansatz on ``x`` and the
*complex conjugate* of the target on ``y``, then undoes the Bell
preparation. Since ``(A (x) B)|Phi> = (A B^T (x) I)|Phi>``, conjugating the
target is what makes the all-zeros probability equal
``|Tr(U_target^dag U)|**2 / 4**n``.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError, ValidationError
from .linalg import apply_gate, basis_state
from .trotter import (
    Circuit,
    Gate,
    build_circuit,
    cnot,
    dense,
    hadamard,
    slice_angles,
    unitary_from_angles,
)
from .validation import MAX_QUBITS, check_square_matrix

COST_KINDS = ("exact", "hst", "hst-sampled")


@dataclass(frozen=True)
class CostMode:
    """How the cost is evaluated.

    ``exact`` is the trace formula on the dense circuit unitary, ``hst``
    is the exact all-zeros probability of the HS-test circuit and
    ``hst-sampled`` estimates that probability from ``shots`` samples.
    """

    kind: str = "exact"
    shots: int = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in COST_KINDS:
            raise ValidationError(f"cost mode must be one of {COST_KINDS}, got {self.kind!r}")
        if self.kind == "hst-sampled":
            if self.shots is None or int(self.shots) != self.shots or self.shots < 1:
                raise ValidationError(f"sampled cost needs shots >= 1, got {self.shots!r}")
            object.__setattr__(self, "shots", int(self.shots))


EXACT = CostMode("exact")


def _check_pair(u_target, u):
    u_target = check_square_matrix(u_target, "target")
    u = check_square_matrix(u, "unitary")
    if u_target.shape != u.shape:
        raise ValidationError(f"dimension mismatch: {u_target.shape} vs {u.shape}")
    return u_target, u


def trace_overlap(u_target, u):
    return np.vdot(u_target, u)  # == Tr(u_target^dag u)


def operator_fidelity(u_target, u):
    """``|Tr(U_target^dag U)| / 2**n``, insensitive to global phase."""
    u_target, u = _check_pair(u_target, u)
    return float(min(1.0, abs(trace_overlap(u_target, u)) / u.shape[0]))


def trace_cost(u_target, u):
    u_target, u = _check_pair(u_target, u)
    d = u.shape[0]
    return float(max(0.0, 1.0 - abs(trace_overlap(u_target, u)) ** 2 / d**2))


def conjugate_gate(g):
    """Gate whose matrix is the entrywise complex conjugate of ``g``'s."""
    if g.kind in ("H", "CNOT", "RY"):
        return g
    if g.kind in ("RX", "RZ"):
        return Gate(g.kind, g.qubits, -g.angle)
    if g.kind == "TERMEXP":
        # (cos - i sin P)^* = cos + i sin P^*, and P^* = (-1)^{#y} P
        sign = -1.0 if g.axes.count("y") % 2 == 0 else 1.0
        return Gate("TERMEXP", g.qubits, sign * g.angle, g.axes)
    return dense(np.conj(g.payload), g.qubits)


def target_circuit(u_target):
    """Wrap a dense target as a single-gate circuit."""
    u_target = check_square_matrix(u_target, "target")
    n = u_target.shape[0].bit_length() - 1
    return Circuit(n, [dense(u_target, range(n))])


def build_hs_circuit(u_circuit, tgt_circuit):
    if u_circuit.n_qubits != tgt_circuit.n_qubits:
        raise ValidationError(
            f"qubit-count mismatch: {u_circuit.n_qubits} vs {tgt_circuit.n_qubits}"
        )
    n = u_circuit.n_qubits
    if 2 * n > MAX_QUBITS:
        raise CapacityError(f"HS test on {n} qubits needs {2 * n} > {MAX_QUBITS} qubits")
    hs = Circuit(2 * n)
    hs.extend(hadamard(k) for k in range(n))
    hs.extend(cnot(k, n + k) for k in range(n))
    hs.extend(u_circuit.gates)
    hs.extend(conjugate_gate(g).shifted(n) for g in tgt_circuit.gates)
    hs.extend(cnot(k, n + k) for k in range(n))
    hs.extend(hadamard(k) for k in range(n))
    return hs


def run_statevector(circ, state=None):
    psi = basis_state(circ.n_qubits, 0) if state is None else np.asarray(state, dtype=complex)
    for g in circ.gates:
        psi = apply_gate(psi, g.matrix(), g.qubits)
    return psi


def all_zeros_probability(circ):
    psi = run_statevector(circ)
    return float(abs(psi[0]) ** 2)


def sample_all_zeros(circ, shots, seed):
    """Fraction of ``shots`` computational-basis samples that are all zeros.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if int(shots) != shots or shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots!r}")
    probs = np.abs(run_statevector(circ)) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(shots), probs)
    return counts[0] / shots


def _check_n(u_target, spec):
    u_target = check_square_matrix(u_target, "target")
    if u_target.shape[0] != 2**spec.n_qubits:
        raise ValidationError(
            f"target acts on {u_target.shape[0].bit_length() - 1} qubits, spec on {spec.n_qubits}"
        )
    return u_target


def cost_from_angles(u_target, spec, angles, mode=EXACT, trotter_mode="primitive", rng=None):
    """Cost for explicit per-occurrence angles; the shift rule evaluates this."""
    u_target = _check_n(u_target, spec)
    if mode.kind == "exact":
        return trace_cost(u_target, unitary_from_angles(spec, angles))
    hs = build_hs_circuit(build_circuit(spec, angles, trotter_mode), target_circuit(u_target))
    if mode.kind == "hst":
        p0 = all_zeros_probability(hs)
    else:
        p0 = sample_all_zeros(hs, mode.shots, mode.seed if rng is None else rng)
    return float(min(1.0, max(0.0, 1.0 - p0)))


def cost(u_target, spec, theta, cfg, mode=EXACT):
    """``C = 1 - |Tr(U_target^dag U_QC(theta))|**2 / 4**n``."""
    if spec.n_qubits > MAX_QUBITS // 2 and mode.kind != "exact":
        raise CapacityError(f"HS test needs 2n <= {MAX_QUBITS} qubits")
    theta = spec.check_theta(theta)
    return cost_from_angles(u_target, spec, slice_angles(theta, cfg.steps), mode, cfg.mode)
