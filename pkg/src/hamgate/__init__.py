"""Find two-body Hamiltonians whose evolution implements multi-qubit gates."""
from .cost import CostMode, build_hs_circuit, cost, operator_fidelity, sample_all_zeros
from .estimator import GateSynthesizer
from .linalg import apply_gate, expm_hermitian, kron, logm_principal
from .optimize import (
    Init,
    OptimizationTrace,
    OptimizerConfig,
    gradient_fd,
    gradient_shift,
    minimize,
)
from .pauli import HamiltonianSpec, PauliTerm, hamiltonian_matrix, standard_specs, term_matrix
from .targets import builtin, check_conditions, parity_truth_table, principal_generator
from .trotter import Circuit, Gate, TrotterConfig, circuit_unitary, trotterize, two_qubit_gate_count

__version__ = "0.1.0"
