"""scikit-learn style front end for Hamiltonian gate synthesis."""
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cost import CostMode, operator_fidelity
from .exceptions import ValidationError
from .linalg import expm_hermitian
from .optimize import Init, OptimizerConfig, minimize
from .pauli import HamiltonianSpec, hamiltonian_matrix, standard_specs
from .targets import TargetGate, builtin
from .trotter import TrotterConfig, trotter_unitary, trotterize
from .validation import check_unitary, n_qubits_of


def _as_target(X):
    if isinstance(X, TargetGate):
        return X.matrix
    if isinstance(X, str):
        return builtin(X).matrix
    return check_unitary(X, name="target")


class GateSynthesizer(TransformerMixin, BaseEstimator):
    """Learn couplings ``theta`` of a two-body Hamiltonian whose Trotterized
    evolution matches a target unitary.

    ``fit`` takes the target (a unitary array, a :class:`TargetGate` or a
    builtin name). After fitting, ``transform`` evolves row statevectors with
    the learned circuit and ``score`` returns the operator fidelity against a
    target.

    Parameters
    ----------
    spec : str or HamiltonianSpec
        Preset name (qubit count taken from the target) or an explicit spec.
    n_steps : int
        Trotter steps ``m``.
    cost_mode : {"exact", "hst", "hst-sampled"}
    shots : int, optional
        Shots per evaluation for ``hst-sampled``.
    learning_rate, max_iter, tol, grad_tol
        Gradient-descent settings; ``tol`` bounds the cost, ``grad_tol`` the
        gradient norm.
    init : {"uniform", "zeros", "explicit"}
    init_range : tuple
        Bounds of the uniform draw (also used for restarts).
    theta0 : array-like, optional
        Starting point when ``init="explicit"``.
    restarts : int
        Extra runs from fresh uniform draws; the best run is kept.
    random_state : int
    """

    def __init__(
        self,
        spec="full_general",
        n_steps=6,
        trotter_mode="primitive",
        cost_mode="exact",
        shots=None,
        learning_rate=0.1,
        max_iter=500,
        tol=1e-4,
        grad_tol=1e-6,
        init="uniform",
        init_range=(-math.pi, math.pi),
        theta0=None,
        restarts=0,
        random_state=0,
    ):
        self.spec = spec
        self.n_steps = n_steps
        self.trotter_mode = trotter_mode
        self.cost_mode = cost_mode
        self.shots = shots
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.tol = tol
        self.grad_tol = grad_tol
        self.init = init
        self.init_range = init_range
        self.theta0 = theta0
        self.restarts = restarts
        self.random_state = random_state

    def _resolve_spec(self, n):
        if isinstance(self.spec, HamiltonianSpec):
            if self.spec.n_qubits != n:
                raise ValidationError(f"spec acts on {self.spec.n_qubits} qubits, target on {n}")
            return self.spec
        return standard_specs(self.spec, n)

    def _init(self):
        low, high = self.init_range
        seed = 0 if self.random_state is None else int(self.random_state)
        if self.init == "explicit":
            if self.theta0 is None:
                raise ValidationError("init='explicit' needs theta0")
            return Init("explicit", low, high, seed, tuple(np.ravel(self.theta0)))
        return Init(self.init, low, high, seed)

    def fit(self, X, y=None):
        target = _as_target(X)
        n = n_qubits_of(target)
        spec = self._resolve_spec(n)
        trotter = TrotterConfig(self.n_steps, self.trotter_mode)
        opt = OptimizerConfig(
            self.learning_rate, self.max_iter, self.tol, self.grad_tol, self._init(), self.restarts
        )
        mode = CostMode(self.cost_mode, self.shots, 0 if self.random_state is None else int(self.random_state))
        trace = minimize(spec, target, trotter, opt, mode)
        self.spec_ = spec
        self.target_ = target
        self.n_qubits_ = n
        self.trace_ = trace
        self.theta_ = trace.final_theta
        self.cost_ = trace.final_cost
        self.n_iter_ = len(trace.iterations)
        return self

    def unitary(self, exact=False):
        """Learned evolution: the Trotter circuit, or ``exp(-i H(theta))``."""
        check_is_fitted(self, "theta_")
        if exact:
            return expm_hermitian(self.hamiltonian())
        return trotter_unitary(self.spec_, self.theta_, self.n_steps)

    def hamiltonian(self):
        check_is_fitted(self, "theta_")
        return hamiltonian_matrix(self.spec_, self.theta_)

    def circuit(self):
        check_is_fitted(self, "theta_")
        return trotterize(self.spec_, self.theta_, TrotterConfig(self.n_steps, self.trotter_mode))

    def transform(self, X):
        """Evolve each row of ``X`` (statevectors) by the learned circuit."""
        check_is_fitted(self, "theta_")
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        if X.shape[1] != 2**self.n_qubits_:
            raise ValidationError(f"states must have {2**self.n_qubits_} amplitudes, got {X.shape[1]}")
        return X @ self.unitary().T

    def score(self, X=None, y=None, exact=False):
        """Operator fidelity against ``X`` (defaults to the fitted target)."""
        check_is_fitted(self, "theta_")
        target = self.target_ if X is None else _as_target(X)
        return operator_fidelity(target, self.unitary(exact))
