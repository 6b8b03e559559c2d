"""Target gates and diagnostics comparing a Hamiltonian to a target's generator."""
from dataclasses import dataclass
from itertools import permutations
from pathlib import Path

import numpy as np

from .cost import operator_fidelity
from .exceptions import ValidationError
from .linalg import (
    H,
    X,
    Y,
    Z,
    apply_gate,
    basis_state,
    bits_to_index,
    expm_hermitian,
    kron_all,
    load_matrix,
    logm_principal,
)
from .pauli import hamiltonian_matrix
from .trotter import trotter_unitary
from .validation import check_hermitian, check_unitary, n_qubits_of

BUILTINS = ("toffoli", "fredkin", "qft3", "parity4")


@dataclass(frozen=True)
class TargetGate:
    name: str
    n_qubits: int
    matrix: np.ndarray
    evolution_time: float = 1.0

    def __post_init__(self):
        m = check_unitary(self.matrix, 1e-12, name=self.name)
        if m.shape[0] != 2**self.n_qubits:
            raise ValidationError(f"{self.name}: matrix is not {2**self.n_qubits}-dimensional")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def _toffoli():
    u = np.eye(8, dtype=complex)
    u[6:, 6:] = X
    return u


def _fredkin():
    u = np.eye(8, dtype=complex)
    u[[5, 6]] = u[[6, 5]]
    return u


def _qft(n):
    d = 2**n
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2j * np.pi * j * k / d) / np.sqrt(d)


def parity_generator():
    """The four-body operator ``Z (x) Z (x) Z (x) Y``."""
    return kron_all(Z, Z, Z, Y)


def builtin(name):
    if name == "toffoli":
        return TargetGate(name, 3, _toffoli())
    if name == "fredkin":
        return TargetGate(name, 3, _fredkin())
    if name == "qft3":
        return TargetGate(name, 3, _qft(3))
    if name == "parity4":
        t = np.pi / 4
        return TargetGate(name, 4, expm_hermitian(parity_generator(), t), evolution_time=t)
    raise ValidationError(f"unknown target {name!r}; choose from {', '.join(BUILTINS)}")


def load_target(name_or_path):
    """Builtin by name, otherwise a matrix file in the ``dim`` / ``re im`` format."""
    if name_or_path in BUILTINS:
        return builtin(name_or_path)
    path = Path(name_or_path)
    if not path.exists():
        raise ValidationError(f"{name_or_path!r} is neither a builtin target nor a file")
    m = check_unitary(load_matrix(path), 1e-10, name=str(path))
    return TargetGate(path.stem, n_qubits_of(m), m)


@dataclass(frozen=True)
class ParityRow:
    inputs: tuple
    parity: int
    probability: float
    distribution: tuple


def parity_truth_table(u):
    """Read out ``z1 ^ z2 ^ z3`` from ``u`` acting on ``|z1 z2 z3>|0>``.

    After ``u`` the last qubit is Hadamard-rotated and measured. Outcome 0
    is labelled even parity (the ancilla ends in ``|+>`` for even parity under
    ``exp(-i pi/4 ZZZY)``). Each row reports the more likely outcome, its
    probability and the full ``(p0, p1)`` distribution.
    """
    u = check_unitary(u, name="parity unitary")
    if u.shape != (16, 16):
        raise ValidationError(f"parity readout needs a 4-qubit unitary, got {u.shape}")
    rows = []
    for bits in np.ndindex(2, 2, 2):
        psi = u @ basis_state(4, bits_to_index(bits + (0,)))
        psi = apply_gate(psi, H, [3])
        p = np.abs(psi.reshape(8, 2)) ** 2
        dist = p.sum(axis=0)
        outcome = int(np.argmax(dist))
        rows.append(ParityRow(tuple(int(b) for b in bits), outcome, float(dist[outcome]), tuple(map(float, dist))))
    return rows


def principal_generator(u):
    return logm_principal(u)


@dataclass(frozen=True)
class ConditionReport:
    physical_ok: bool
    commutator_norm: float
    eigdiff_max_deviation: float

    def to_json(self):
        return {
            "physical_ok": self.physical_ok,
            "commutator_norm": self.commutator_norm,
            "eigdiff_max_deviation": self.eigdiff_max_deviation,
        }

    def satisfied(self, tol=1e-8):
        return self.physical_ok and self.commutator_norm < tol and self.eigdiff_max_deviation < tol


def check_conditions(h, target, tol=1e-8, physical_ok=True):
    """Diagnose how ``h`` relates to the target's principal generator.

    ``commutator_norm`` is ``||[h, H_p]||_F`` and ``eigdiff_max_deviation`` the
    largest distance of an eigenvalue of ``h - H_p`` from ``2 pi Z``. Both
    vanishing is sufficient for ``exp(-i h) == target`` but not necessary.
    ``physical_ok`` is passed through: a spec-built ``h`` is local/two-body
    by construction; ``tol`` is kept for :meth:`ConditionReport.satisfied`.
    """
    u = target.matrix if isinstance(target, TargetGate) else check_unitary(target)
    h = check_hermitian(h, 1e-10)
    if h.shape != u.shape:
        raise ValidationError(f"dimension mismatch: {h.shape} vs {u.shape}")
    hp = principal_generator(u)
    comm = float(np.linalg.norm(h @ hp - hp @ h))
    mu = np.linalg.eigvalsh((h - hp + (h - hp).conj().T) / 2)
    dev = float(np.max(np.abs(mu - 2 * np.pi * np.round(mu / (2 * np.pi)))))
    return ConditionReport(bool(physical_ok), comm, dev)


def permute_qubits(u, perm):
    """Relabel qubits: output qubit ``k`` is input qubit ``perm[k]``."""
    n = n_qubits_of(u)
    t = np.asarray(u).reshape((2,) * (2 * n))
    axes = list(perm) + [n + p for p in perm]
    return t.transpose(axes).reshape(2**n, 2**n)


def convention_audit(spec, theta, target, steps):
    """Fidelity of published parameters under alternative reading conventions.

    Covers the sign of the generator, every relabelling of the target's
    qubits (which includes reversing the tensor order), and both ``theta/m``
    and ``theta`` per Trotter slice.
    Returns a list of ``(description, exact_fidelity, trotter_fidelity)``.
    """
    theta = spec.check_theta(theta)
    n = spec.n_qubits
    ham = hamiltonian_matrix(spec, theta)
    rows = []
    for perm in permutations(range(n)):
        tgt = permute_qubits(target.matrix, perm)
        for sign in (1, -1):
            label = f"target qubits {perm}, sign {'+' if sign > 0 else '-'}"
            rows.append(
                (
                    label + ", theta/m per slice",
                    operator_fidelity(tgt, expm_hermitian(sign * ham)),
                    operator_fidelity(tgt, trotter_unitary(spec, sign * theta, steps)),
                )
            )
            rows.append(
                (
                    label + ", theta per slice",
                    operator_fidelity(tgt, expm_hermitian(sign * ham, steps)),
                    operator_fidelity(tgt, trotter_unitary(spec, sign * theta * steps, steps)),
                )
            )
    return rows
