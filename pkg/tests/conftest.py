import itertools

import numpy as np
import pytest

_ACCEPTANCE = []


def record_criterion(label, passed, detail):
    _ACCEPTANCE.append((label, passed, detail))
    print(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")


def embed_by_loops(gate, qubits, n):
    """Full 2**n matrix of ``gate`` on ``qubits`` built entry by entry.

    Independent of the tensordot kernel: for every pair of basis states it
    checks the spectator bits agree and reads the gate entry from the
    operand bits (qubit 0 is the most significant bit).
    """
    dim = 2**n
    k = len(qubits)
    out = np.zeros((dim, dim), dtype=complex)
    for row, col in itertools.product(range(dim), repeat=2):
        rb = [(row >> (n - 1 - q)) & 1 for q in range(n)]
        cb = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        if any(rb[q] != cb[q] for q in range(n) if q not in qubits):
            continue
        gr = sum(rb[q] << (k - 1 - i) for i, q in enumerate(qubits))
        gc = sum(cb[q] << (k - 1 - i) for i, q in enumerate(qubits))
        out[row, col] = gate[gr, gc]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
