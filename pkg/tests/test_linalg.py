import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamgate.exceptions import CapacityError, ValidationError
from hamgate.linalg import (
    CNOT,
    X,
    Y,
    Z,
    apply_gate,
    apply_gate_to_columns,
    basis_state,
    expm_hermitian,
    kron,
    load_matrix,
    logm_principal,
    random_hermitian,
    random_state,
    random_unitary,
    save_matrix,
)
from hamgate.validation import is_hermitian, is_unitary

from conftest import embed_by_loops


def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_zz():
    assert np.array_equal(kron(Z, Z), np.diag([1, -1, -1, 1]))


def test_kron_elementwise_oracle():
    out = kron(X, Y)
    for i, j, k, l in itertools.product(range(2), repeat=4):
        assert out[2 * i + k, 2 * j + l] == X[i, j] * Y[k, l]


def test_kron_capacity():
    with pytest.raises(CapacityError):
        kron(np.eye(256), np.eye(2))


def test_expm_zero_generator():
    assert np.allclose(expm_hermitian(np.zeros((4, 4)), 1.0), np.eye(4), atol=1e-15)


def test_expm_pauli_rotation():
    assert np.allclose(expm_hermitian(np.pi / 2 * X, 1.0), -1j * X, atol=1e-14)


def _taylor_expm(a, terms=60):
    out = np.eye(len(a), dtype=complex)
    term = np.eye(len(a), dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def test_expm_matches_taylor_series():
    h = random_hermitian(8, seed=7)
    assert np.max(np.abs(expm_hermitian(h, 1.0) - _taylor_expm(-1j * h))) < 1e-9


def test_expm_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_expm_group_property(seed, s, t):
    h = random_hermitian(4, seed=seed)
    lhs = expm_hermitian(h, s) @ expm_hermitian(h, t)
    assert np.max(np.abs(lhs - expm_hermitian(h, s + t))) < 1e-9
    assert is_unitary(expm_hermitian(h, s))


def test_logm_identity():
    assert np.allclose(logm_principal(np.eye(8)), 0, atol=1e-15)


def test_logm_toffoli_spectrum():
    u = np.eye(8, dtype=complex)
    u[6:, 6:] = X
    w = np.sort(np.linalg.eigvalsh(logm_principal(u)))
    assert np.allclose(w, [0] * 7 + [np.pi], atol=1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_logm_round_trip_haar(seed):
    u = random_unitary(8, seed=seed)
    g = logm_principal(u)
    assert is_hermitian(g)
    assert np.max(np.abs(expm_hermitian(g, 1.0) - u)) < 1e-9
    w = np.linalg.eigvalsh(g)
    assert np.all(w > -np.pi) and np.all(w <= np.pi + 1e-12)


def test_logm_rejects_non_unitary():
    with pytest.raises(ValidationError):
        logm_principal(2 * np.eye(2))


def test_apply_gate_bit_flip():
    out = apply_gate(basis_state(2, 0b00), X, [1])
    assert np.allclose(out, basis_state(2, 0b01))


def test_apply_gate_cnot():
    out = apply_gate(basis_state(2, 0b10), CNOT, [0, 1])
    assert np.allclose(out, basis_state(2, 0b11))


def test_apply_gate_matches_embedding_oracle():
    psi = random_state(3, seed=3)
    g = random_unitary(4, seed=4)
    expected = embed_by_loops(g, [0, 2], 3) @ psi
    assert np.allclose(apply_gate(psi, g, [0, 2]), expected, atol=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_apply_gate_exhaustive_basis(n):
    rng = np.random.default_rng(n)
    for k in (1, 2):
        if k > n:
            continue
        for qubits in itertools.permutations(range(n), k):
            g = random_unitary(2**k, seed=rng.integers(1 << 30))
            full = embed_by_loops(g, list(qubits), n)
            for idx in range(2**n):
                out = apply_gate(basis_state(n, idx), g, qubits)
                assert np.allclose(out, full[:, idx], atol=1e-13)


def test_apply_gate_preserves_norm():
    psi = random_state(4, seed=9)
    out = apply_gate(psi, random_unitary(4, seed=10), [3, 1])
    assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_apply_gate_to_columns_is_matrix_product():
    g = random_unitary(4, seed=1)
    m = random_unitary(8, seed=2)
    assert np.allclose(apply_gate_to_columns(m, g, [2, 0]), embed_by_loops(g, [2, 0], 3) @ m)


@pytest.mark.parametrize("qubits", [[2], [0, 0], [-1]])
def test_apply_gate_bad_indices(qubits):
    g = X if len(qubits) == 1 else CNOT
    with pytest.raises(ValidationError):
        apply_gate(basis_state(2, 0), g, qubits)


def test_matrix_file_round_trip(tmp_path):
    u = random_unitary(8, seed=5)
    path = tmp_path / "u.txt"
    save_matrix(path, u)
    lines = path.read_text().splitlines()
    assert lines[0] == "8" and len(lines) == 65
    assert np.array_equal(load_matrix(path), u)


def test_matrix_file_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2\n1 0\n0 0\n0 0\n")
    with pytest.raises(ValidationError, match="expected 4 entries"):
        load_matrix(path)
    path.write_text("2\n1 0\n0 0\nfoo bar\n1 0\n")
    with pytest.raises(ValidationError, match=":4:"):
        load_matrix(path)
