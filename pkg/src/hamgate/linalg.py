"""Dense complex linear algebra for unitaries, generators and statevectors.

Qubit ordering is global: qubit 0 is the most significant (leftmost) tensor
factor, so the basis state ``|z_1 z_2 ... z_n>`` lives at index
``sum(z_k * 2**(n - k))``.
"""
from pathlib import Path

import numpy as np
from scipy.linalg import schur
from scipy.stats import unitary_group

from .exceptions import CapacityError, ValidationError
from .validation import (
    MAX_QUBITS,
    check_hermitian,
    check_qubit_indices,
    check_square_matrix,
    check_unitary,
)

MAX_ENTRIES = 2**16
STATE_NORM_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
PAULI = {"x": X, "y": Y, "z": Z}


def kron(a, b):
    """Kronecker product with a hard cap of ``MAX_ENTRIES`` output entries."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > MAX_ENTRIES:
        raise CapacityError(f"kron result {rows}x{cols} exceeds {MAX_ENTRIES} entries")
    return np.kron(a, b)


def kron_all(*factors):
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = kron(out, f)
    return out


def expm_hermitian(h, t=1.0):
    """Return ``exp(-i h t)`` for Hermitian ``h`` via ``h = V diag(w) V^dag``."""
    h = check_hermitian(h)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def _unitary_eig(u):
    # complex Schur form of a normal matrix is diagonal, and unlike np.linalg.eig
    # it returns orthonormal vectors inside degenerate eigenspaces
    t, v = schur(u, output="complex")
    return np.diag(t), v


def logm_principal(u):
    """Hermitian generator ``G`` with ``expm_hermitian(G, 1) == u``.

    Eigenvalues of the result lie in ``(-pi, pi]``; an eigenvalue ``-1`` of
    ``u`` maps to ``+pi``.
    """
    u = check_unitary(u)
    lam, v = _unitary_eig(u)
    # exp(-i g) = lam  =>  g = -angle(lam)
    g = -np.angle(lam)
    g = np.where(g <= -np.pi + 1e-9, g + 2 * np.pi, g)
    out = (v * g) @ v.conj().T
    return (out + out.conj().T) / 2


def random_unitary(dim, seed=None):
    """Haar-distributed unitary; ``seed`` is anything ``default_rng`` accepts."""
    rng = np.random.default_rng(seed)
    return unitary_group.rvs(dim, random_state=rng)


def random_hermitian(dim, seed=None, scale=1.0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2


def random_state(n_qubits, seed=None):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return psi / np.linalg.norm(psi)


def basis_state(n_qubits, index):
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def bits_to_index(bits):
    idx = 0
    for b in bits:
        idx = 2 * idx + int(b)
    return idx


def check_state(state):
    state = np.asarray(state, dtype=complex)
    if state.ndim != 1 or state.size < 2 or state.size & (state.size - 1):
        raise ValidationError(f"state length {state.size} is not a power of two >= 2")
    if abs(np.vdot(state, state).real - 1.0) > STATE_NORM_TOL:
        raise ValidationError("state is not normalized")
    return state


def _apply_on_axes(tensor, gate, qubits, n):
    """Contract ``gate`` into the first ``n`` axes of ``tensor`` at ``qubits``."""
    k = len(qubits)
    g = gate.reshape((2,) * (2 * k))
    out = np.tensordot(g, tensor, axes=(list(range(k, 2 * k)), list(qubits)))
    # tensordot puts the gate's output axes first; move them back into place
    return np.moveaxis(out, list(range(k)), list(qubits))


def _check_gate_operands(gate, qubits, n):
    gate = np.asarray(gate, dtype=complex)
    qubits = check_qubit_indices(qubits, n)
    if gate.shape != (2 ** len(qubits),) * 2:
        raise ValidationError(
            f"gate of shape {gate.shape} does not act on {len(qubits)} qubits"
        )
    return gate, qubits


def apply_gate(state, gate, qubits):
    """Apply ``gate`` to the named qubits of ``state`` and return a new state."""
    state = np.asarray(state, dtype=complex)
    if state.ndim != 1 or state.size < 2 or state.size & (state.size - 1):
        raise ValidationError(f"state length {state.size} is not a power of two >= 2")
    n = int(state.size).bit_length() - 1
    gate, qubits = _check_gate_operands(gate, qubits, n)
    psi = state.reshape((2,) * n)
    return _apply_on_axes(psi, gate, qubits, n).reshape(-1)


def apply_gate_to_columns(matrix, gate, qubits):
    """Left-multiply ``matrix`` (columns are states) by the embedded gate."""
    matrix = np.asarray(matrix, dtype=complex)
    dim = matrix.shape[0]
    n = int(dim).bit_length() - 1
    gate, qubits = _check_gate_operands(gate, qubits, n)
    t = matrix.reshape((2,) * n + (matrix.shape[1],))
    return _apply_on_axes(t, gate, qubits, n).reshape(dim, matrix.shape[1])


def save_matrix(path, u):
    """Write ``u`` as text: ``dim`` then ``dim**2`` lines of ``re im``."""
    u = check_square_matrix(u)
    lines = [str(u.shape[0])]
    lines += [f"{float(z.real)!r} {float(z.imag)!r}" for z in u.reshape(-1)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path):
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValidationError(f"{path}: empty matrix file")
    try:
        dim = int(lines[0])
    except ValueError:
        raise ValidationError(f"{path}:1: expected integer dimension, got {lines[0]!r}")
    if dim < 1 or dim & (dim - 1) or dim > 2**MAX_QUBITS:
        raise ValidationError(f"{path}:1: bad dimension {dim}")
    if len(lines) - 1 != dim * dim:
        raise ValidationError(f"{path}: expected {dim * dim} entries, found {len(lines) - 1}")
    vals = np.empty(dim * dim, dtype=complex)
    for k, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != 2:
            raise ValidationError(f"{path}:{k + 2}: expected 're im', got {ln!r}")
        try:
            vals[k] = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ValidationError(f"{path}:{k + 2}: unparseable entry {ln!r}")
    return vals.reshape(dim, dim)
