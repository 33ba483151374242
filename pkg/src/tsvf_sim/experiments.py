"""Experiment registry and runners behind the command-line interface.

Each experiment resolves its parameters strictly (unknown keys are rejected),
runs deterministically from a single master seed, and produces a CSV whose
leading '#' lines embed the resolved configuration and a summary record, so
every output file is self-describing. Identical configuration and seed yield
byte-identical files.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, InvariantError, OrthogonalCollapseForbidden
from .hilbert import SIGMA_Z, StateVector
from .measurement import TwoState, strong_measure, weak_estimate, weak_value
from .ensemble import (
    EnsembleSpec,
    average_operator_residual,
    average_spin_commutator,
    brute_force_spin_commutator,
)
from .twotime import (
    RobustnessModel,
    brute_force_ratio,
    classical_threshold,
    core_decay,
    log_robustness_ratio,
    robustness_ratio,
)

THREADS_ENV_VAR = "TSVF_SIM_THREADS"


def thread_cap() -> int | None:
    """Worker-count cap from the environment; None means no cap (auto)."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(
            f"{THREADS_ENV_VAR} must be a non-negative integer, got {raw!r}"
        ) from None
    if value < 0:
        raise ConfigError(f"{THREADS_ENV_VAR} must be non-negative, got {value}")
    return None if value == 0 else value


def _workers(tasks: int) -> int:
    cap = thread_cap()
    auto = os.cpu_count() or 1
    return max(1, min(tasks, cap if cap is not None else auto))


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str  # int | float | int_list | float_list
    default: object
    help: str


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    params: tuple[ParamSpec, ...]
    runner: Callable[[dict, np.random.Generator], "ExperimentResult"]


@dataclass
class ExperimentResult:
    header: tuple[str, ...]
    rows: list[tuple]
    summary: dict = field(default_factory=dict)


def _parse_scalar(kind: str, name: str, raw: str):
    try:
        if kind == "int":
            return int(raw) if raw.strip().lstrip("+-").isdigit() else _int_from_float(raw)
        return float(raw)
    except (ValueError, TypeError):
        raise ConfigError(f"parameter {name!r}: cannot parse {raw!r} as {kind}") from None


def _int_from_float(raw: str) -> int:
    value = float(raw)
    if value != int(value):
        raise ValueError(raw)
    return int(value)


def parse_param_value(spec: ParamSpec, raw: str):
    """Parse one command-line/config value according to the parameter's kind."""
    if spec.kind in ("int", "float"):
        return _parse_scalar(spec.kind, spec.name, raw)
    base = spec.kind.removesuffix("_list")
    parts = [p for p in str(raw).split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"parameter {spec.name!r}: empty list")
    return [_parse_scalar(base, spec.name, p.strip()) for p in parts]


def resolve_params(experiment: Experiment, overrides: dict[str, str]) -> dict:
    """Apply string overrides to the experiment's defaults, strictly."""
    known = {p.name: p for p in experiment.params}
    for key in overrides:
        if key not in known:
            raise ConfigError(
                f"unknown parameter {key!r} for experiment {experiment.name!r} "
                f"(known: {', '.join(known) or 'none'})"
            )
    resolved = {}
    for spec in experiment.params:
        if spec.name in overrides:
            resolved[spec.name] = parse_param_value(spec, overrides[spec.name])
        else:
            resolved[spec.name] = spec.default
    return resolved


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


# ---------------------------------------------------------------- experiments


def _run_born(params: dict, rng: np.random.Generator) -> ExperimentResult:
    a2, trials = params["alpha2"], params["trials"]
    _require(0.0 <= a2 <= 1.0, "parameter 'alpha2' must lie in [0, 1]")
    _require(trials >= 1, "parameter 'trials' must be at least 1")
    psi = StateVector(np.array([math.sqrt(a2), math.sqrt(1.0 - a2)], dtype=complex))
    rows = []
    plus = 0
    for t in range(trials):
        record = strong_measure(psi, SIGMA_Z, rng)
        outcome = int(round(record.outcome))
        plus += outcome == 1
        rows.append((t, outcome))
    freq = plus / trials
    return ExperimentResult(
        header=("trial", "outcome"),
        rows=rows,
        summary={
            "frequency_plus": freq,
            "expected": a2,
            "binomial_stderr": math.sqrt(max(a2 * (1.0 - a2), 0.0) / trials),
        },
    )


def _run_weakvalue(params: dict, rng: np.random.Generator) -> ExperimentResult:
    ratio, sigma, trials = params["g_over_sigma"], params["sigma"], params["trials"]
    angle = params["post_angle"]
    _require(ratio > 0.0, "parameter 'g_over_sigma' must be positive")
    _require(sigma > 0.0, "parameter 'sigma' must be positive")
    _require(trials >= 1, "parameter 'trials' must be at least 1")
    forward = StateVector(np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0))
    backward = StateVector(np.array([math.cos(angle), -math.sin(angle)], dtype=complex))
    ts = TwoState(forward, backward)
    value = weak_value(ts, SIGMA_Z)
    g = ratio * sigma
    est = weak_estimate(ts, SIGMA_Z, g, sigma, trials, rng)
    rows = [(i, float(q)) for i, q in enumerate(est.samples)]
    return ExperimentResult(
        header=("index", "reading"),
        rows=rows,
        summary={
            "weak_value_re": value.real,
            "weak_value_im": value.imag,
            "mean_over_g": est.mean / g,
            "stderr_over_g": est.stderr / g,
            "acceptance_rate": est.acceptance_rate,
            "accepted": est.accepted,
        },
    )


def _run_convergence(params: dict, rng: np.random.Generator) -> ExperimentResult:
    sizes = params["Ns"]
    _require(all(n >= 1 for n in sizes), "parameter 'Ns' entries must be at least 1")
    _require(len(sizes) >= 2, "parameter 'Ns' needs at least two sizes to fit a slope")
    psi = StateVector(np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0))
    rows = []
    abar_last = 0.0
    for n in sizes:
        abar_last, residual = average_operator_residual(SIGMA_Z, EnsembleSpec(((psi, n),)))
        rows.append((n, residual))
    logs_n = np.log10([r[0] for r in rows])
    logs_r = np.log10([r[1] for r in rows])
    slope = float(np.polyfit(logs_n, logs_r, 1)[0])
    return ExperimentResult(
        header=("N", "residual"),
        rows=rows,
        summary={"slope": slope, "expected_slope": -0.5, "abar": abar_last},
    )


def _run_commutator(params: dict, rng: np.random.Generator) -> ExperimentResult:
    brute_max, closed_ns = params["brute_max"], params["closed_Ns"]
    _require(1 <= brute_max <= 12, "parameter 'brute_max' must lie in [1, 12]")
    _require(all(n >= 1 for n in closed_ns), "parameter 'closed_Ns' entries must be >= 1")
    spins = list(range(1, brute_max + 1))
    # Dense-matrix checks release the GIL inside numpy, so a thread pool pays
    # off; TSVF_SIM_THREADS caps it and the merge stays ordered by N.
    with ThreadPoolExecutor(max_workers=_workers(len(spins))) as pool:
        brute = list(pool.map(brute_force_spin_commutator, spins))
    rows = []
    worst = 0.0
    for n, (scale, err) in zip(spins, brute):
        worst = max(worst, err)
        rows.append((n, "brute", scale, err))
    for n in closed_ns:
        rows.append((n, "closed", average_spin_commutator(n), ""))
    return ExperimentResult(
        header=("spins", "method", "scale", "identity_error"),
        rows=rows,
        summary={"max_identity_error": worst, "brute_max": brute_max},
    )


def _model_from(params: dict, env_size: int) -> RobustnessModel:
    amp = 1.0 / math.sqrt(2.0)
    try:
        return RobustnessModel(
            alpha=amp,
            beta=amp,
            env_size=env_size,
            overlap=params["c"],
            n_collapsed=params["n"],
            gamma1=params["gamma1"],
            gamma2=params["gamma2"],
        )
    except (InvariantError, OrthogonalCollapseForbidden) as exc:
        raise ConfigError(str(exc)) from None


def _run_robustness(params: dict, rng: np.random.Generator) -> ExperimentResult:
    sizes = params["env_sizes"]
    _require(len(sizes) >= 2, "parameter 'env_sizes' needs at least two entries")
    _require(all(n > params["n"] for n in sizes), "every env_size must exceed 'n'")
    rows = []
    logs = []
    for size in sizes:
        model = _model_from(params, size)
        log_ratio = log_robustness_ratio(model)
        ratio = robustness_ratio(model)
        oracle = ""
        if 2 ** (size + 2) <= 2 ** 14 and model.n_collapsed >= 1:
            oracle = brute_force_ratio(model)
        rows.append((size, params["n"], log_ratio, ratio, oracle))
        logs.append(log_ratio)
    fitted = float(np.polyfit(sizes, logs, 1)[0]) if np.all(np.isfinite(logs)) else ""
    return ExperimentResult(
        header=("env_size", "n_collapsed", "log_ratio", "ratio", "brute_ratio"),
        rows=rows,
        summary={
            "expected_log_slope": -2.0 * math.log(params["c"]) if params["c"] > 0 else "",
            "fitted_log_slope": fitted,
        },
    )


def _run_threshold(params: dict, rng: np.random.Generator) -> ExperimentResult:
    targets = params["targets"]
    _require(all(t > 0 for t in targets), "parameter 'targets' entries must be positive")
    rows = []
    needed = []
    for target in targets:
        try:
            size = classical_threshold(
                params["n"], params["c"], params["gamma1"], params["gamma2"], target
            )
        except (InvariantError, OrthogonalCollapseForbidden) as exc:
            raise ConfigError(str(exc)) from None
        at = robustness_ratio(_model_from(params, size))
        below = ""
        if size - 1 > params["n"]:
            below = robustness_ratio(_model_from(params, size - 1))
        rows.append((target, size, at, below))
        needed.append(size)
    return ExperimentResult(
        header=("target", "env_size_needed", "ratio_at_threshold", "ratio_below"),
        rows=rows,
        summary={
            "targets": ",".join(repr(float(t)) for t in targets),
            "env_sizes_needed": ",".join(str(n) for n in needed),
        },
    )


def _run_decay(params: dict, rng: np.random.Generator) -> ExperimentResult:
    n0, tau = params["n0"], params["time_constant"]
    t_max, steps = params["t_max"], params["steps"]
    _require(n0 >= 0.0, "parameter 'n0' must be non-negative")
    _require(tau > 0.0, "parameter 'time_constant' must be positive")
    _require(t_max >= 0.0, "parameter 't_max' must be non-negative")
    _require(steps >= 2, "parameter 'steps' must be at least 2")
    times = np.linspace(0.0, t_max, steps)
    rows = [(float(t), core_decay(n0, tau, float(t))) for t in times]
    return ExperimentResult(
        header=("t", "remaining"),
        rows=rows,
        summary={"n0": n0, "time_constant": tau, "final_remaining": rows[-1][1]},
    )


EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in (
        Experiment(
            name="born",
            description="Projective measurement statistics of sqrt(a2)|0> + sqrt(1-a2)|1>",
            params=(
                ParamSpec("alpha2", "float", 0.36, "weight |<0|psi>|^2 of the +1 outcome"),
                ParamSpec("trials", "int", 100000, "number of projective trials"),
            ),
            runner=_run_born,
        ),
        Experiment(
            name="weakvalue",
            description="Weakly coupled, post-selected pointer readings and their mean shift",
            params=(
                ParamSpec("g_over_sigma", "float", 0.01, "coupling strength over pointer spread"),
                ParamSpec("sigma", "float", 1.0, "pointer spread"),
                ParamSpec("trials", "int", 200000, "Monte Carlo trials before post-selection"),
                ParamSpec("post_angle", "float", math.pi / 8.0,
                          "backward state cos(a)|0> - sin(a)|1>"),
            ),
            runner=_run_weakvalue,
        ),
        Experiment(
            name="convergence",
            description="1/sqrt(N) shrinkage of the ensemble-average operator residual",
            params=(
                ParamSpec("Ns", "int_list", [100, 1000, 10000, 100000], "ensemble sizes"),
            ),
            runner=_run_convergence,
        ),
        Experiment(
            name="commutator",
            description="Averaged-spin commutator identity, dense checks plus closed form",
            params=(
                ParamSpec("brute_max", "int", 10, "largest spin count for the dense check"),
                ParamSpec("closed_Ns", "int_list", [1000000], "closed-form sizes to tabulate"),
            ),
            runner=_run_commutator,
        ),
        Experiment(
            name="robustness",
            description="Backward-reconstruction robustness ratio versus record size",
            params=(
                ParamSpec("c", "float", 0.9, "per-qubit record overlap"),
                ParamSpec("n", "int", 5, "collapsed qubit count"),
                ParamSpec("gamma1", "float", 0.9, "collapse overlap for the right branch"),
                ParamSpec("gamma2", "float", 0.9, "collapse overlap for the wrong branch"),
                ParamSpec("env_sizes", "int_list", [8, 10, 12, 16, 20], "record sizes N"),
            ),
            runner=_run_robustness,
        ),
        Experiment(
            name="threshold",
            description="Record size needed for a classically robust reading",
            params=(
                ParamSpec("c", "float", 0.9, "per-qubit record overlap"),
                ParamSpec("n", "int", 0, "collapsed qubit count"),
                ParamSpec("gamma1", "float", 0.9, "collapse overlap for the right branch"),
                ParamSpec("gamma2", "float", 0.9, "collapse overlap for the wrong branch"),
                ParamSpec("targets", "float_list", [1e3, 1e6, 1e9], "ratio targets"),
            ),
            runner=_run_threshold,
        ),
        Experiment(
            name="decay",
            description="Exponential decay of the intact record core",
            params=(
                ParamSpec("n0", "float", 1e6, "initial record size"),
                ParamSpec("time_constant", "float", 1.0, "e-folding time T"),
                ParamSpec("t_max", "float", 10.0, "last sampled time"),
                ParamSpec("steps", "int", 101, "number of samples in [0, t_max]"),
            ),
            runner=_run_decay,
        ),
    )
}
