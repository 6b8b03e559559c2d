"""Local-field and two-body Pauli Hamiltonians.

A :class:`HamiltonianSpec` is the ordered set of allowed interaction terms;
its order fixes the layout of the real parameter vector ``theta`` and the
order in which terms are applied inside a Trotter slice.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .exceptions import ValidationError
from .linalg import I2, PAULI, kron_all
from .validation import check_n_qubits

AXES = ("x", "y", "z")


def _check_axis(a):
    a = str(a).lower()
    if a not in AXES:
        raise ValidationError(f"unknown Pauli axis {a!r}; expected one of x, y, z")
    return a


@dataclass(frozen=True)
class PauliTerm:
    """A single-qubit field (one qubit) or a two-body coupling (two qubits).

    Couplings are stored with ``qubits[0] < qubits[1]``; use the
    :meth:`coupling` constructor to canonicalize arbitrary input.
    """

    qubits: tuple
    axes: str

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        axes = "".join(_check_axis(a) for a in self.axes)
        if len(qubits) not in (1, 2) or len(axes) != len(qubits):
            raise ValidationError(f"malformed term qubits={qubits} axes={axes!r}")
        if any(q < 0 for q in qubits):
            raise ValidationError(f"negative qubit index in {qubits}")
        if len(qubits) == 2 and not qubits[0] < qubits[1]:
            raise ValidationError(
                f"coupling qubits must satisfy i < j, got {qubits}; use PauliTerm.coupling"
            )
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "axes", axes)

    @classmethod
    def local(cls, q, axis):
        return cls((q,), axis)

    @classmethod
    def coupling(cls, i, j, axis_i, axis_j):
        if i == j:
            raise ValidationError(f"coupling needs two distinct qubits, got {i} twice")
        if i > j:
            i, j, axis_i, axis_j = j, i, axis_j, axis_i
        return cls((i, j), _check_axis(axis_i) + _check_axis(axis_j))

    @property
    def is_local(self):
        return len(self.qubits) == 1

    @property
    def kind(self):
        return "local" if self.is_local else "coupling"

    def label(self):
        """Human-readable label with 1-based qubit numbers, e.g. ``Z1Y4``."""
        return "".join(f"{a.upper()}{q + 1}" for q, a in zip(self.qubits, self.axes))

    def to_json(self):
        if self.is_local:
            return {"local": [self.qubits[0], self.axes]}
        return {"coupling": [self.qubits[0], self.qubits[1], self.axes[0], self.axes[1]]}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or len(obj) != 1:
            raise ValidationError(f"term must be a single-key object, got {obj!r}")
        (key, val), = obj.items()
        if key == "local" and isinstance(val, list) and len(val) == 2:
            return cls.local(int(val[0]), val[1])
        if key == "coupling" and isinstance(val, list) and len(val) == 4:
            return cls.coupling(int(val[0]), int(val[1]), val[2], val[3])
        raise ValidationError(f"cannot parse term {obj!r}")


@lru_cache(maxsize=4096)
def _term_matrix_cached(term, n):
    factors = [I2] * n
    for q, a in zip(term.qubits, term.axes):
        factors[q] = PAULI[a]
    m = kron_all(*factors)
    m.setflags(write=False)
    return m


def term_matrix(term, n):
    """Dense ``2**n`` square matrix of ``term`` (read-only, cached)."""
    n = check_n_qubits(n)
    if max(term.qubits) >= n:
        raise ValidationError(f"term {term.label()} does not fit on {n} qubits")
    return _term_matrix_cached(term, n)


@dataclass(frozen=True)
class HamiltonianSpec:
    n_qubits: int
    terms: tuple
    heisenberg_only: bool = False
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        n = check_n_qubits(self.n_qubits)
        terms = tuple(self.terms)
        if not terms:
            raise ValidationError("a Hamiltonian spec needs at least one term")
        seen = set()
        for t in terms:
            if not isinstance(t, PauliTerm):
                raise ValidationError(f"expected PauliTerm, got {t!r}")
            if max(t.qubits) >= n:
                raise ValidationError(f"term {t.label()} out of range for {n} qubits")
            if t in seen:
                raise ValidationError(f"duplicate term {t.label()}")
            if self.heisenberg_only and not t.is_local and t.axes[0] != t.axes[1]:
                raise ValidationError(
                    f"term {t.label()} mixes axes but heisenberg_only is set"
                )
            seen.add(t)
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "terms", terms)

    def __len__(self):
        return len(self.terms)

    @property
    def n_params(self):
        return len(self.terms)

    def matrices(self):
        return [term_matrix(t, self.n_qubits) for t in self.terms]

    def check_theta(self, theta):
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != len(self.terms):
            raise ValidationError(
                f"theta has {theta.size} entries but there are {len(self.terms)} terms"
            )
        if not np.all(np.isfinite(theta)):
            raise ValidationError("theta has non-finite entries")
        return theta

    def labels(self):
        return [t.label() for t in self.terms]

    def to_json(self):
        return [t.to_json() for t in self.terms]

    @classmethod
    def from_json(cls, n_qubits, terms, heisenberg_only=False):
        return cls(n_qubits, tuple(PauliTerm.from_json(t) for t in terms), heisenberg_only)


def hamiltonian_matrix(spec, theta):
    """``sum_j theta_j * term_j`` as a dense Hermitian, traceless matrix."""
    theta = spec.check_theta(theta)
    dim = 2**spec.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for c, m in zip(theta, spec.matrices()):
        out += c * m
    return out


# Published presets use 1-based qubit labels; label k is index k - 1 here.
_FIG4A = [
    (PauliTerm.local(0, "x"), 1.09),
    (PauliTerm.local(0, "z"), 2.35),
    (PauliTerm.local(1, "x"), 3.11),
    (PauliTerm.local(1, "z"), -0.78),
    (PauliTerm.coupling(0, 1, "x", "x"), 0.07),
    (PauliTerm.coupling(0, 1, "y", "y"), 0.07),
    (PauliTerm.coupling(0, 1, "z", "z"), 0.78),
    (PauliTerm.coupling(0, 2, "x", "x"), 1.089),
    (PauliTerm.coupling(1, 2, "z", "z"), 3.11),
]
_FIG4B = [
    (PauliTerm.coupling(0, 1, "x", "x"), 1.42),
    (PauliTerm.coupling(0, 1, "y", "y"), 1.04),
    (PauliTerm.coupling(0, 1, "z", "z"), 1.30),
    (PauliTerm.coupling(1, 2, "x", "x"), 1.23),
    (PauliTerm.coupling(1, 2, "y", "y"), 0.73),
    (PauliTerm.coupling(1, 2, "z", "z"), 1.60),
    (PauliTerm.coupling(0, 2, "x", "x"), 1.03),
    (PauliTerm.coupling(0, 2, "y", "y"), 0.29),
    (PauliTerm.coupling(0, 2, "z", "z"), 2.57),
    (PauliTerm.coupling(1, 3, "z", "y"), 2.37),
    (PauliTerm.coupling(0, 3, "z", "y"), 2.29),
    (PauliTerm.coupling(2, 3, "z", "y"), 2.30),
]
_FIXED = {"fig4a": (3, _FIG4A), "fig4b": (4, _FIG4B)}
PRESETS = ("full_heisenberg", "full_general", "fig4a", "fig4b")


def _locals(n):
    return [PauliTerm.local(q, a) for q in range(n) for a in AXES]


def standard_specs(name, n=None):
    """Build a preset spec.

    ``full_heisenberg`` has every local field plus XX, YY, ZZ on every pair
    (``3n + 3n(n-1)/2`` terms); ``full_general`` allows all nine axis pairs
    (``3n + 9n(n-1)/2`` terms). ``fig4a`` (3 qubits) and ``fig4b`` (4 qubits)
    are the fixed published term sets; see :func:`published_theta`.
    """
    if name in _FIXED:
        fixed_n, rows = _FIXED[name]
        if n is not None and n != fixed_n:
            raise ValidationError(f"preset {name!r} is defined for {fixed_n} qubits, not {n}")
        return HamiltonianSpec(fixed_n, tuple(t for t, _ in rows), name=name)
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    if n is None or n < 2:
        raise ValidationError(f"preset {name!r} needs n >= 2, got {n}")
    pairs = list(combinations(range(n), 2))
    if name == "full_heisenberg":
        couplings = [PauliTerm.coupling(i, j, a, a) for i, j in pairs for a in AXES]
        return HamiltonianSpec(n, tuple(_locals(n) + couplings), True, name=name)
    couplings = [
        PauliTerm.coupling(i, j, a, b) for i, j in pairs for a in AXES for b in AXES
    ]
    return HamiltonianSpec(n, tuple(_locals(n) + couplings), name=name)


def published_theta(name):
    if name not in _FIXED:
        raise ValidationError(f"no published parameters for preset {name!r}")
    return np.array([v for _, v in _FIXED[name][1]], dtype=float)
