"""Input validation helpers shared by the kernel and the estimator."""
import numpy as np

from .exceptions import CapacityError, ValidationError

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
MAX_QUBITS = 8


def check_square_matrix(a, name="matrix"):
    """Return ``a`` as a complex square array whose side is a power of two."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    dim = a.shape[0]
    if dim < 1 or dim & (dim - 1):
        raise ValidationError(f"{name} dimension {dim} is not a power of two")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def n_qubits_of(a):
    return int(a.shape[0]).bit_length() - 1


def is_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def is_hermitian(h, tol=HERMITIAN_TOL):
    h = np.asarray(h)
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) < tol)


def check_unitary(u, tol=UNITARY_TOL, name="unitary"):
    u = check_square_matrix(u, name)
    if not is_unitary(u, tol):
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        raise ValidationError(f"{name} is not unitary (max |U^dag U - I| = {err:.3e})")
    return u


def check_hermitian(h, tol=HERMITIAN_TOL, name="hamiltonian"):
    h = check_square_matrix(h, name)
    if not is_hermitian(h, tol):
        err = np.max(np.abs(h - h.conj().T))
        raise ValidationError(f"{name} is not Hermitian (max |H - H^dag| = {err:.3e})")
    return h


def check_n_qubits(n, limit=MAX_QUBITS):
    if int(n) != n or n < 1:
        raise ValidationError(f"qubit count must be a positive integer, got {n!r}")
    if n > limit:
        raise CapacityError(f"{n} qubits exceeds the dense limit of {limit}")
    return int(n)


def check_qubit_indices(qubits, n):
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits):
        raise ValidationError(f"duplicate qubit indices {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise ValidationError(f"qubit index {q} out of range for {n} qubits")
    return qubits
