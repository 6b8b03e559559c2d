"""Gradients of the gate cost and the gradient-descent loop around them."""
import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cost import EXACT, _check_n, cost, cost_from_angles, trace_overlap
from .exceptions import ValidationError
from .trotter import TrotterConfig, slice_angles

SHIFT = np.pi / 4
TERMINATION_REASONS = ("cost_tol", "grad_tol", "max_iters")
DIVERGENCE_WINDOW = 50


@dataclass(frozen=True)
class Init:
    """Starting point: ``zeros``, ``uniform(low, high, seed)`` or ``explicit``.

    Restarts after the first run always draw ``uniform(low, high)`` from a
    generator seeded with ``seed``.
    """

    kind: str = "uniform"
    low: float = -math.pi
    high: float = math.pi
    seed: int = 0
    values: tuple = None

    def __post_init__(self):
        if self.kind not in ("zeros", "uniform", "explicit"):
            raise ValidationError(f"unknown init kind {self.kind!r}")
        if not self.low < self.high:
            raise ValidationError(f"init needs low < high, got {self.low}, {self.high}")
        if self.kind == "explicit":
            if self.values is None:
                raise ValidationError("explicit init needs values")
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def zeros(cls):
        return cls("zeros")

    @classmethod
    def uniform(cls, low=-math.pi, high=math.pi, seed=0):
        return cls("uniform", low, high, seed)

    @classmethod
    def explicit(cls, values, seed=0):
        return cls("explicit", seed=seed, values=tuple(values))


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 0.1
    max_iters: int = 500
    cost_tolerance: float = 1e-4
    grad_norm_tolerance: float = 1e-6
    init: Init = field(default_factory=Init)
    restarts: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValidationError("max_iters must be a positive integer")
        if not (self.cost_tolerance > 0 and self.grad_norm_tolerance > 0):
            raise ValidationError("tolerances must be positive")
        if int(self.restarts) != self.restarts or self.restarts < 0:
            raise ValidationError("restarts must be a nonnegative integer")


@dataclass
class IterationRecord:
    iteration: int
    cost: float
    theta: np.ndarray
    grad_norm: float


@dataclass
class OptimizationTrace:
    iterations: list
    final_theta: np.ndarray
    final_cost: float
    termination_reason: str
    diverged: bool = False
    restart: int = 0
    run_costs: list = field(default_factory=list)

    def costs(self):
        return np.array([r.cost for r in self.iterations])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        q = len(self.final_theta)
        w.writerow(["iter", "cost", "grad_norm"] + [f"theta_{j}" for j in range(q)])
        for r in self.iterations:
            w.writerow([r.iteration, repr(r.cost), repr(r.grad_norm)] + [repr(float(t)) for t in r.theta])
        return buf.getvalue()

    def save_csv(self, path):
        Path(path).write_text(self.to_csv())

    @staticmethod
    def read_csv(path):
        """Load the per-iteration rows written by :meth:`save_csv`."""
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        out = []
        for row in rows:
            thetas = [float(v) for k, v in row.items() if k.startswith("theta_")]
            out.append(
                IterationRecord(int(row["iter"]), float(row["cost"]), np.array(thetas), float(row["grad_norm"]))
            )
        return out


def gradient_fd(costfn, theta, h=1e-5):
    """Central finite differences of ``costfn`` at ``theta``."""
    if not h > 0:
        raise ValidationError("finite-difference step must be positive")
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for j in range(theta.size):
        e = np.zeros_like(theta)
        e[j] = h
        grad[j] = (costfn(theta + e) - costfn(theta - e)) / (2 * h)
    return grad


def cost_and_gradient_shift(spec, theta, cfg, u_target):
    """Exact-trace cost and its parameter-shift gradient.

    Each ``theta_j`` occurs once per Trotter slice as ``exp(-i (theta_j/m) P_j)``.
    For every occurrence the cost is re-evaluated with that angle moved by
    ``+-pi/4`` and the difference accumulated with weight ``1/m``. The shifted
    traces are formed from cached prefix/suffix products, so the whole
    gradient costs ``O(m Q)`` dense products instead of ``O(m**2 Q**2)``.
    """
    theta = spec.check_theta(theta)
    m = cfg.steps
    mats = spec.matrices()
    q = len(mats)
    d = 2**spec.n_qubits
    eye = np.eye(d)
    phis = theta / m
    gates = [np.cos(p) * eye - 1j * np.sin(p) * mat for p, mat in zip(phis, mats)] * m
    prefix = [np.eye(d, dtype=complex)]
    for g in gates:
        prefix.append(g @ prefix[-1])
    t_dag = np.asarray(u_target, dtype=complex).conj().T
    c = 1.0 - abs(trace_overlap(u_target, prefix[-1])) ** 2 / d**2
    mats_t = [mat.T for mat in mats]
    grad = np.zeros(q)
    suffix = t_dag
    for k in range(len(gates) - 1, -1, -1):
        j = k % q
        env = prefix[k] @ suffix
        a = np.trace(env)
        b = np.sum(env * mats_t[j])
        f_plus = np.cos(phis[j] + SHIFT) * a - 1j * np.sin(phis[j] + SHIFT) * b
        f_minus = np.cos(phis[j] - SHIFT) * a - 1j * np.sin(phis[j] - SHIFT) * b
        # C(+) - C(-) = (|f-|^2 - |f+|^2) / d^2
        grad[j] += (abs(f_minus) ** 2 - abs(f_plus) ** 2) / d**2
        suffix = suffix @ gates[k]
    return float(max(c, 0.0)), grad / m


def gradient_shift(spec, theta, cfg, u_target):
    return cost_and_gradient_shift(spec, theta, cfg, u_target)[1]


def gradient_shift_generic(angle_cost, theta, steps):
    """Shift rule through an arbitrary per-occurrence cost ``angle_cost(angles)``.

    Slower than :func:`gradient_shift` (``2 m Q`` full cost evaluations) but
    works for the HS-circuit estimators.
    """
    theta = np.asarray(theta, dtype=float)
    angles = slice_angles(theta, steps)
    grad = np.zeros(theta.size)
    for l in range(steps):
        for j in range(theta.size):
            plus = angles.copy()
            minus = angles.copy()
            plus[l, j] += SHIFT
            minus[l, j] -= SHIFT
            grad[j] += angle_cost(plus) - angle_cost(minus)
    return grad / steps


def _objective(spec, u_target, trotter_cfg, mode):
    if mode.kind == "exact":
        return lambda theta: cost_and_gradient_shift(spec, theta, trotter_cfg, u_target)
    rng = np.random.default_rng(mode.seed) if mode.kind == "hst-sampled" else None

    def angle_cost(angles):
        return cost_from_angles(u_target, spec, angles, mode, trotter_cfg.mode, rng)

    def fn(theta):
        c = angle_cost(slice_angles(theta, trotter_cfg.steps))
        return c, gradient_shift_generic(angle_cost, theta, trotter_cfg.steps)

    return fn


def _descend(objective, theta0, cfg):
    theta = np.array(theta0, dtype=float)
    records = []
    reason = "max_iters"
    diverged = False
    rising = 0
    for it in range(cfg.max_iters):
        c, g = objective(theta)
        gnorm = float(np.linalg.norm(g))
        if records and c > records[-1].cost:
            rising += 1
        else:
            rising = 0
        records.append(IterationRecord(it, c, theta.copy(), gnorm))
        if c < cfg.cost_tolerance:
            reason = "cost_tol"
            break
        if gnorm < cfg.grad_norm_tolerance:
            reason = "grad_tol"
            break
        if rising >= DIVERGENCE_WINDOW:
            diverged = True
            break
        theta = theta - cfg.learning_rate * g
    last = records[-1]
    return OptimizationTrace(records, last.theta.copy(), last.cost, reason, diverged)


def initial_points(init, n_params, restarts):
    """The ``1 + restarts`` deterministic starting vectors."""
    rng = np.random.default_rng(init.seed)
    if init.kind == "zeros":
        first = np.zeros(n_params)
    elif init.kind == "explicit":
        first = np.array(init.values, dtype=float)
        if first.size != n_params:
            raise ValidationError(f"explicit init has {first.size} values, spec needs {n_params}")
    else:
        first = rng.uniform(init.low, init.high, n_params)
    points = [first]
    for _ in range(restarts):
        points.append(rng.uniform(init.low, init.high, n_params))
    return points


def minimize(spec, u_target, trotter_cfg, opt_cfg, mode=EXACT):
    """Plain gradient descent ``theta <- theta - lr * grad C`` with restarts.

    Returns the trace with the lowest final cost; ``run_costs`` lists the
    final cost of every run in order.
    """
    u_target = _check_n(u_target, spec)
    objective = _objective(spec, u_target, trotter_cfg, mode)
    best = None
    run_costs = []
    for r, theta0 in enumerate(initial_points(opt_cfg.init, spec.n_params, opt_cfg.restarts)):
        trace = _descend(objective, theta0, opt_cfg)
        trace.restart = r
        run_costs.append(trace.final_cost)
        if best is None or trace.final_cost < best.final_cost:
            best = trace
    best.run_costs = run_costs
    return best


@dataclass
class GradcheckReport:
    max_rel_error: float
    passed: bool
    points: list

    def format(self):
        lines = []
        for k, (shift, fd, rel) in enumerate(self.points):
            worst = int(np.argmax(rel))
            lines.append(
                f"point {k}: max rel err {rel.max():.3e} at theta_{worst} "
                f"(shift {shift[worst]:+.9f}, fd {fd[worst]:+.9f})"
            )
        lines.append(f"max relative error {self.max_rel_error:.3e} -> {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


REL_TOL = 1e-4
ABS_TOL = 1e-7


def gradcheck(spec, u_target, steps, seed=0, n_points=5, h=1e-5, grad_fn=gradient_shift):
    """Compare ``grad_fn`` against central differences at seeded points.

    Relative error per component is ``|shift - fd| / max(|fd|, ABS_TOL/REL_TOL)``,
    so components near zero are judged by the absolute tolerance instead.
    """
    cfg = TrotterConfig(steps)
    rng = np.random.default_rng(seed)

    def c(theta):
        return cost(u_target, spec, theta, cfg)

    points = []
    for _ in range(n_points):
        theta = rng.uniform(-np.pi, np.pi, spec.n_params)
        shift = np.asarray(grad_fn(spec, theta, cfg, u_target))
        fd = gradient_fd(c, theta, h)
        rel = np.abs(shift - fd) / np.maximum(np.abs(fd), ABS_TOL / REL_TOL)
        points.append((shift, fd, rel))
    worst = max(p[2].max() for p in points)
    return GradcheckReport(float(worst), bool(worst < REL_TOL), points)
