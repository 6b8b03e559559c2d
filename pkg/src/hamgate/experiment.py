"""Experiment configs, result records and the runners behind the CLI.

Config JSON::

    {
      "target": "toffoli",                      # builtin name or matrix file
      "spec": "full_general",                   # preset, or {"terms": [...]}
      "trotter": {"steps": 6, "mode": "primitive"},
      "cost_mode": {"kind": "exact"},           # or hst / hst-sampled + shots, seed
      "optimizer": {"learning_rate": 0.5, "max_iters": 500,
                    "cost_tolerance": 1e-4, "grad_norm_tolerance": 1e-6,
                    "init": {"kind": "uniform", "low": -1, "high": 1, "seed": 0},
                    "restarts": 9},
      "output_dir": "runs/toffoli"
    }

Explicit terms use ``{"local": [q, "z"]}`` and ``{"coupling": [i, j, "x", "y"]}``
with 0-based qubit indices.
"""
import copy
import csv
import json
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .cost import COST_KINDS, CostMode, operator_fidelity
from .exceptions import ConfigError, ValidationError
from .linalg import expm_hermitian
from .optimize import Init, OptimizerConfig, gradcheck, minimize
from .pauli import PRESETS, HamiltonianSpec, hamiltonian_matrix, published_theta, standard_specs
from .targets import check_conditions, load_target
from .trotter import MODES, TrotterConfig, trotter_unitary, trotterize, two_qubit_gate_count

_TOP_KEYS = {"target", "spec", "trotter", "cost_mode", "optimizer", "output_dir"}


def _require(obj, key, where, kind=None):
    if key not in obj:
        raise ConfigError("missing required key", field=f"{where}{key}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"expected {getattr(kind, '__name__', kind)}, got {type(val).__name__}", field=f"{where}{key}")
    return val


def _check_keys(obj, allowed, where):
    extra = set(obj) - set(allowed)
    if extra:
        raise ConfigError(f"unknown key(s) {sorted(extra)}", field=where.rstrip(".") or "<root>")


def resolve_spec(spec_cfg, n_qubits):
    """Build a :class:`HamiltonianSpec` from a preset name or a term list."""
    if isinstance(spec_cfg, str):
        spec = standard_specs(spec_cfg, n_qubits)
        if spec.n_qubits != n_qubits:
            raise ValidationError(f"preset {spec_cfg!r} acts on {spec.n_qubits} qubits, target on {n_qubits}")
        return spec
    if isinstance(spec_cfg, dict):
        _check_keys(spec_cfg, {"terms", "n_qubits", "heisenberg_only"}, "spec.")
        n = spec_cfg.get("n_qubits", n_qubits)
        if n != n_qubits:
            raise ValidationError(f"spec.n_qubits={n} but the target acts on {n_qubits} qubits")
        return HamiltonianSpec.from_json(n, spec_cfg["terms"], bool(spec_cfg.get("heisenberg_only", False)))
    raise ValidationError(f"spec must be one of {PRESETS} or an object with 'terms'")


@dataclass
class ExperimentConfig:
    target: str
    spec: object
    trotter: TrotterConfig = field(default_factory=TrotterConfig)
    cost_mode: CostMode = field(default_factory=CostMode)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    output_dir: str = None

    def resolve(self):
        """Load the target and the term set, checking they agree on qubit count."""
        target = load_target(self.target)
        spec = resolve_spec(self.spec, target.n_qubits)
        return target, spec

    def to_json(self):
        opt = asdict(self.optimizer)
        init = opt["init"]
        if init["values"] is None:
            del init["values"]
        else:
            init["values"] = list(init["values"])
        return {
            "target": self.target,
            "spec": copy.deepcopy(self.spec),
            "trotter": asdict(self.trotter),
            "cost_mode": {k: v for k, v in asdict(self.cost_mode).items() if v is not None},
            "optimizer": opt,
            "output_dir": self.output_dir,
        }


def _parse_trotter(obj):
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", field="trotter")
    _check_keys(obj, {"steps", "mode"}, "trotter.")
    steps = obj.get("steps", 1)
    if not isinstance(steps, int) or isinstance(steps, bool):
        raise ConfigError(f"expected integer, got {steps!r}", field="trotter.steps")
    mode = obj.get("mode", "primitive")
    if mode not in MODES:
        raise ConfigError(f"expected one of {MODES}, got {mode!r}", field="trotter.mode")
    return TrotterConfig(steps, mode)


def _parse_cost(obj):
    if isinstance(obj, str):
        obj = {"kind": obj}
    if not isinstance(obj, dict):
        raise ConfigError("expected a string or object", field="cost_mode")
    _check_keys(obj, {"kind", "shots", "seed"}, "cost_mode.")
    kind = obj.get("kind", "exact")
    if kind not in COST_KINDS:
        raise ConfigError(f"expected one of {COST_KINDS}, got {kind!r}", field="cost_mode.kind")
    try:
        return CostMode(kind, obj.get("shots"), obj.get("seed", 0))
    except ValidationError as exc:
        raise ConfigError(str(exc), field="cost_mode")


def _parse_optimizer(obj):
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", field="optimizer")
    keys = {"learning_rate", "max_iters", "cost_tolerance", "grad_norm_tolerance", "init", "restarts"}
    _check_keys(obj, keys, "optimizer.")
    init_obj = obj.get("init", {"kind": "uniform"})
    if not isinstance(init_obj, dict):
        raise ConfigError("expected an object", field="optimizer.init")
    _check_keys(init_obj, {"kind", "low", "high", "seed", "values"}, "optimizer.init.")
    try:
        init = Init(**init_obj)
    except (ValidationError, TypeError) as exc:
        raise ConfigError(str(exc), field="optimizer.init")
    kwargs = {k: obj[k] for k in keys - {"init"} if k in obj}
    for k, v in kwargs.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"expected a number, got {v!r}", field=f"optimizer.{k}")
    try:
        return OptimizerConfig(init=init, **kwargs)
    except ValidationError as exc:
        raise ConfigError(str(exc), field="optimizer")


def parse_config(source, name="<config>"):
    """Parse JSON text (or an already-decoded dict) into a validated config.

    Errors carry the JSON line for syntax problems and the dotted field path
    for semantic ones.
    """
    if isinstance(source, (str, bytes)):
        try:
            obj = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{name}: invalid JSON ({exc.msg}, column {exc.colno})", line=exc.lineno)
    else:
        obj = source
    if not isinstance(obj, dict):
        raise ConfigError(f"{name}: top level must be an object")
    _check_keys(obj, _TOP_KEYS, "")
    target = _require(obj, "target", "", str)
    spec = _require(obj, "spec", "", (str, dict))
    cfg = ExperimentConfig(
        target=target,
        spec=spec,
        trotter=_parse_trotter(obj.get("trotter", {})),
        cost_mode=_parse_cost(obj.get("cost_mode", "exact")),
        optimizer=_parse_optimizer(obj.get("optimizer", {})),
        output_dir=obj.get("output_dir"),
    )
    try:
        target_gate = load_target(cfg.target)
    except ValidationError as exc:
        raise ConfigError(str(exc), field="target")
    try:
        spec_obj = resolve_spec(cfg.spec, target_gate.n_qubits)
    except (ValidationError, KeyError) as exc:
        raise ConfigError(str(exc), field="spec")
    if cfg.optimizer.init.kind == "explicit" and len(cfg.optimizer.init.values) != spec_obj.n_params:
        raise ConfigError(
            f"{len(cfg.optimizer.init.values)} initial values for {spec_obj.n_params} terms",
            field="optimizer.init.values",
        )
    if cfg.cost_mode.kind != "exact" and spec_obj.n_qubits > 4:
        raise ConfigError("HS-test cost modes support at most 4 qubits", field="cost_mode.kind")
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}")
    return parse_config(text, name=str(path))


@dataclass
class ResultRecord:
    config: dict
    final_theta: list
    term_labels: list
    final_cost: float
    termination_reason: str
    trotterized_fidelity: float
    exact_fidelity: float
    two_qubit_gate_count: int
    conditions: dict
    trace_path: str = None
    wall_time: float = 0.0
    run_costs: list = field(default_factory=list)

    def to_json(self):
        return asdict(self)

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path):
        return cls(**json.loads(Path(path).read_text()))

    def comparable(self):
        """Fields that must match between reruns of the same config."""
        d = self.to_json()
        for k in ("wall_time", "trace_path"):
            d.pop(k)
        d["config"] = {k: v for k, v in d["config"].items() if k != "output_dir"}
        return d


def _record(config_echo, spec, target, theta, steps, mode, trace=None, trace_path=None, wall=0.0):
    theta = np.asarray(theta, dtype=float)
    ham = hamiltonian_matrix(spec, theta)
    u_trot = trotter_unitary(spec, theta, steps)
    u_exact = expm_hermitian(ham)
    report = check_conditions(ham, target)
    f_trot = operator_fidelity(target.matrix, u_trot)
    return ResultRecord(
        config=config_echo,
        final_theta=[float(t) for t in theta],
        term_labels=spec.labels(),
        final_cost=float(trace.final_cost) if trace else float(1 - f_trot**2),
        termination_reason=trace.termination_reason if trace else "evaluated",
        trotterized_fidelity=f_trot,
        exact_fidelity=operator_fidelity(target.matrix, u_exact),
        two_qubit_gate_count=two_qubit_gate_count(trotterize(spec, theta, TrotterConfig(steps, mode))),
        conditions=report.to_json(),
        trace_path=None if trace_path is None else str(trace_path),
        wall_time=wall,
        run_costs=[float(c) for c in trace.run_costs] if trace else [],
    )


def synthesize(cfg, output_dir=None, write=True):
    """Run the optimizer for ``cfg`` and write ``result.json`` + ``trace.csv``."""
    t0 = time.perf_counter()
    target, spec = cfg.resolve()
    trace = minimize(spec, target.matrix, cfg.trotter, cfg.optimizer, cfg.cost_mode)
    out = output_dir or cfg.output_dir
    trace_path = None
    if write and out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        trace_path = out / "trace.csv"
        trace.save_csv(trace_path)
    rec = _record(
        cfg.to_json(), spec, target, trace.final_theta, cfg.trotter.steps, cfg.trotter.mode,
        trace, trace_path, time.perf_counter() - t0,
    )
    if write and out:
        rec.save(out / "result.json")
    return rec


def evaluate(target_name, spec_cfg, theta, steps, mode="primitive", output_dir=None):
    """Fidelities, gate count and condition report for fixed parameters."""
    t0 = time.perf_counter()
    target = load_target(target_name)
    spec = resolve_spec(spec_cfg, target.n_qubits)
    theta = spec.check_theta(theta)
    echo = {
        "target": target_name,
        "spec": copy.deepcopy(spec_cfg),
        "trotter": {"steps": steps, "mode": mode},
        "theta": [float(t) for t in theta],
    }
    rec = _record(echo, spec, target, theta, steps, mode, wall=time.perf_counter() - t0)
    if output_dir:
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        rec.save(Path(output_dir) / "result.json")
    return rec


def sweep_trotter(cfg, m_values, reoptimize=True, output_dir=None):
    """One record per Trotter depth; writes ``sweep.csv`` when given a directory.

    Without ``reoptimize`` the explicit initial parameters are evaluated.
    """
    m_values = [int(m) for m in m_values]
    if not m_values:
        raise ValidationError("need at least one Trotter depth")
    if not reoptimize and cfg.optimizer.init.kind != "explicit":
        raise ConfigError("re-evaluation needs explicit initial parameters", field="optimizer.init")
    out = output_dir or cfg.output_dir
    records = []
    for m in m_values:
        sub = copy.deepcopy(cfg)
        sub.trotter = TrotterConfig(m, cfg.trotter.mode)
        sub_out = Path(out) / f"m{m}" if out else None
        if reoptimize:
            records.append(synthesize(sub, sub_out, write=sub_out is not None))
        else:
            records.append(
                evaluate(cfg.target, cfg.spec, cfg.optimizer.init.values, m, cfg.trotter.mode, sub_out)
            )
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        write_sweep_csv(Path(out) / "sweep.csv", m_values, records)
    return records


def write_sweep_csv(path, m_values, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "exact_fidelity", "trotterized_fidelity", "final_cost"])
        for m, r in zip(m_values, records):
            w.writerow([m, repr(r.exact_fidelity), repr(r.trotterized_fidelity), repr(r.final_cost)])


def read_sweep_csv(path):
    with open(path, newline="") as fh:
        return [
            {"m": int(r["m"]), **{k: float(r[k]) for k in ("exact_fidelity", "trotterized_fidelity", "final_cost")}}
            for r in csv.DictReader(fh)
        ]


def run_gradcheck(spec_name, target_name, steps, seed=0, grad_fn=None):
    target = load_target(target_name)
    spec = resolve_spec(spec_name, target.n_qubits)
    kwargs = {} if grad_fn is None else {"grad_fn": grad_fn}
    return gradcheck(spec, target.matrix, steps, seed, **kwargs)


def reproduction_config(name):
    """Pinned config shipped for ``reproduce {toffoli|parity}``."""
    if name not in ("toffoli", "parity"):
        raise ValidationError(f"no reproduction recipe {name!r}; choose toffoli or parity")
    text = resources.files("hamgate").joinpath("configs", f"{name}.json").read_text()
    return parse_config(text, name=f"{name}.json")


def published_spec_theta(preset):
    return standard_specs(preset), published_theta(preset)
