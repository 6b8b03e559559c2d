import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamgate.cost import operator_fidelity
from hamgate.exceptions import ValidationError
from hamgate.linalg import basis_state, bits_to_index, expm_hermitian, random_hermitian, random_unitary, save_matrix
from hamgate.pauli import hamiltonian_matrix, published_theta, standard_specs
from hamgate.targets import (
    BUILTINS,
    TargetGate,
    builtin,
    check_conditions,
    convention_audit,
    load_target,
    parity_generator,
    parity_truth_table,
    permute_qubits,
    principal_generator,
)
from hamgate.validation import is_unitary


def test_toffoli_flips_target():
    assert np.array_equal(builtin("toffoli").matrix @ basis_state(3, 0b110), basis_state(3, 0b111))


def test_fredkin_swaps():
    assert np.array_equal(builtin("fredkin").matrix @ basis_state(3, 0b110), basis_state(3, 0b101))


def test_qft_entries():
    u = builtin("qft3").matrix
    w = np.exp(2j * np.pi / 8)
    assert u[3, 5] == pytest.approx(w**15 / np.sqrt(8))


def test_parity4_closed_form():
    t = builtin("parity4")
    assert t.evolution_time == pytest.approx(np.pi / 4)
    expected = (np.eye(16) - 1j * parity_generator()) / np.sqrt(2)
    assert np.max(np.abs(t.matrix - expected)) < 1e-14


def test_parity4_structure():
    u = builtin("parity4").matrix
    p = parity_generator()
    for bits in np.ndindex(2, 2, 2):
        z0 = basis_state(4, bits_to_index(bits + (0,)))
        rest = np.sqrt(2) * (u @ z0) - z0
        pz = p @ z0
        c = np.vdot(pz, rest)
        assert abs(abs(c) - 1) < 1e-12
        assert np.allclose(rest, c * pz, atol=1e-12)


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_unitary(name):
    t = builtin(name)
    assert t.matrix.shape == (2**t.n_qubits,) * 2
    assert is_unitary(t.matrix, 1e-12)
    assert not t.matrix.flags.writeable


def test_unknown_builtin():
    with pytest.raises(ValidationError, match="unknown target"):
        builtin("swap")


def test_target_gate_rejects_non_unitary():
    with pytest.raises(ValidationError):
        TargetGate("bad", 1, np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValidationError):
        TargetGate("bad", 2, np.eye(2))


@pytest.mark.parametrize("bits,parity", [((0, 0, 0), 0), ((1, 1, 0), 0), ((1, 1, 1), 1)])
def test_truth_table_examples(bits, parity):
    rows = {r.inputs: r for r in parity_truth_table(builtin("parity4").matrix)}
    assert rows[bits].parity == parity
    assert abs(rows[bits].probability - 1) < 1e-10


def test_truth_table_all_rows():
    rows = parity_truth_table(builtin("parity4").matrix)
    assert len(rows) == 8
    for r in rows:
        assert r.parity == sum(r.inputs) % 2
        assert abs(sum(r.distribution) - 1) < 1e-12


def test_truth_table_identity_is_uninformative():
    rows = parity_truth_table(np.eye(16))
    assert all(abs(r.distribution[0] - 0.5) < 1e-12 for r in rows)


def test_truth_table_wrong_size():
    with pytest.raises(ValidationError):
        parity_truth_table(np.eye(8))


def test_principal_generator_examples():
    assert np.allclose(principal_generator(np.eye(4)), 0, atol=1e-15)
    w = np.sort(np.linalg.eigvalsh(principal_generator(builtin("toffoli").matrix)))
    assert np.allclose(w, [0] * 7 + [np.pi], atol=1e-10)


@pytest.mark.parametrize("name", BUILTINS)
def test_principal_generator_round_trip(name):
    u = builtin(name).matrix
    assert np.max(np.abs(expm_hermitian(principal_generator(u)) - u)) < 1e-10


def test_conditions_on_principal_generator():
    t = builtin("qft3")
    rep = check_conditions(principal_generator(t.matrix), t)
    assert rep.commutator_norm < 1e-10 and rep.eigdiff_max_deviation < 1e-10
    assert rep.satisfied()


def test_conditions_shifted_by_projector():
    t = builtin("toffoli")
    hp = principal_generator(t.matrix)
    _, vecs = np.linalg.eigh(hp)
    proj = np.outer(vecs[:, 7], vecs[:, 7].conj()) + np.outer(vecs[:, 0], vecs[:, 0].conj())
    h = hp + 2 * np.pi * proj
    rep = check_conditions(h, t)
    assert rep.eigdiff_max_deviation < 1e-10 and rep.commutator_norm < 1e-10
    assert operator_fidelity(t.matrix, expm_hermitian(h)) == pytest.approx(1.0, abs=1e-12)


def test_conditions_fig4a_is_diagnostic():
    spec = standard_specs("fig4a")
    rep = check_conditions(hamiltonian_matrix(spec, published_theta("fig4a")), builtin("toffoli"))
    assert np.isfinite(rep.commutator_norm) and np.isfinite(rep.eigdiff_max_deviation)
    assert set(rep.to_json()) == {"physical_ok", "commutator_norm", "eigdiff_max_deviation"}


def test_conditions_dimension_mismatch():
    with pytest.raises(ValidationError):
        check_conditions(np.zeros((4, 4)), builtin("toffoli"))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.integers(-3, 3), min_size=8, max_size=8), st.floats(0, 1e-9))
def test_small_deviations_imply_high_fidelity(seed, ks, eps):
    u = random_unitary(8, seed=seed)
    hp = principal_generator(u)
    _, vecs = np.linalg.eigh(hp)
    # Shift each eigenvalue by 2 pi k plus a tiny offset; h still commutes with hp.
    shift = vecs @ np.diag(2 * np.pi * np.array(ks) + eps) @ vecs.conj().T
    h = hp + shift
    rep = check_conditions(h, u)
    if rep.commutator_norm < 1e-8 and rep.eigdiff_max_deviation < 1e-8:
        assert operator_fidelity(u, expm_hermitian(h)) > 1 - 1e-6


def test_random_hermitian_usually_fails_conditions():
    rep = check_conditions(random_hermitian(8, seed=0), builtin("toffoli"))
    assert not rep.satisfied()


def test_permute_qubits_reverses_toffoli():
    u = permute_qubits(builtin("toffoli").matrix, (2, 1, 0))
    # Controls now on qubits 1, 2 and target on qubit 0.
    assert np.array_equal(u @ basis_state(3, 0b011), basis_state(3, 0b111))
    assert np.array_equal(permute_qubits(u, (2, 1, 0)), builtin("toffoli").matrix)


def test_convention_audit_covers_all_readings():
    spec = standard_specs("fig4a")
    rows = convention_audit(spec, published_theta("fig4a"), builtin("toffoli"), 6)
    assert len(rows) == 6 * 2 * 2
    labels = [r[0] for r in rows]
    assert len(set(labels)) == len(labels)
    assert all(0 <= r[1] <= 1 and 0 <= r[2] <= 1 for r in rows)
    base = rows[0]
    assert base[1] == pytest.approx(0.1364, abs=1e-4)
    assert base[2] == pytest.approx(0.1933, abs=1e-4)


def test_load_target_file(tmp_path):
    u = random_unitary(4, seed=2)
    path = tmp_path / "gate.txt"
    save_matrix(path, u)
    t = load_target(str(path))
    assert t.n_qubits == 2 and t.name == "gate"
    assert np.array_equal(t.matrix, u)
    assert load_target("toffoli").name == "toffoli"
    with pytest.raises(ValidationError):
        load_target(str(tmp_path / "missing.txt"))
