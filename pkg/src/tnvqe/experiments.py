"""Declarative experiment configs and their runners.

A config is a JSON document validated against a versioned schema.  Each
experiment kind produces one CSV table with a fixed column order plus a
JSON sidecar holding the resolved config and the library version.  With
identical seeds a rerun produces a byte-identical CSV body; the sidecar
carries the only timestamp.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, analysis, optimize, simulator, tn_rotation
from .analysis import BipartitionSpec, EnsembleSpec, GradientVarianceSetup
from .hamiltonians import HamiltonianSpec
from .optimize import OptimizerConfig
from .simulator import NoiseModel, make_template

KINDS = (
    "ground-state",
    "layer-sweep",
    "j-sweep",
    "expressivity",
    "partition-sweep",
    "gradient-variance",
    "noise",
)

_OPTIMIZER_SCHEMA = {
    "type": "object",
    "properties": {
        "learning_rate": {"type": "number", "minimum": 0},
        "max_steps": {"type": "integer", "minimum": 1},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "strategy": {"enum": ["alternating", "parallel", "pure_vqe"]},
        "n_c": {"type": "integer", "minimum": 1},
        "n_q": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "kind", "seeds"],
    "properties": {
        "schema_version": {"const": 1},
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "output": {"type": "string"},
        "seeds": {
            "type": "array",
            "items": {"type": "integer"},
            "minItems": 1,
        },
        "hamiltonian": {
            "type": "object",
            "required": ["variant", "params"],
            "properties": {
                "variant": {"enum": ["tfim1d", "tfim2d", "time_crystal"]},
                "params": {"type": "object"},
            },
            "additionalProperties": False,
        },
        "ansatz": {
            "type": "object",
            "required": ["template"],
            "properties": {
                "template": {"enum": ["A", "B", "C"]},
                "repetitions": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "layout": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["umpo1d", "uttn1d", "umpo2d", "uttn2d"]},
                "layers": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "methods": {
            "type": "array",
            "items": {"enum": ["pure", "umpo", "uttn"]},
            "minItems": 1,
        },
        "optimizer": _OPTIMIZER_SCHEMA,
        "noise": {
            "type": "object",
            "required": ["p1", "p2"],
            "properties": {
                "p1": {"type": "number", "minimum": 0, "maximum": 1},
                "p2": {"type": "number", "minimum": 0, "maximum": 1},
                "trajectories": {"type": "integer", "minimum": 2},
            },
            "additionalProperties": False,
        },
        "layers": {"type": "integer", "minimum": 1},
        "j_values": {"type": "array", "items": {"type": "number"}},
        "repetition_values": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
        },
        "expressivity": {
            "type": "object",
            "required": ["n", "pqc_depths"],
            "properties": {
                "n": {"type": "integer", "minimum": 2},
                "pqc_depths": {"type": "array",
                               "items": {"type": "integer", "minimum": 1}},
                "mpo_layers": {"type": "array",
                               "items": {"type": "integer", "minimum": 1}},
                "t_values": {"type": "array", "items": {"enum": [2, 3]}},
                "samples": {"type": "integer", "minimum": 2},
                "haar_samples": {"type": "integer", "minimum": 2},
                "include_controls": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "partition": {
            "type": "object",
            "properties": {
                "trials": {"type": "integer", "minimum": 0},
                "t": {"enum": [2, 3]},
                "samples": {"type": "integer", "minimum": 2},
                "haar_samples": {"type": "integer", "minimum": 2},
            },
            "additionalProperties": False,
        },
        "variance": {
            "type": "object",
            "properties": {
                "ns": {"type": "array",
                       "items": {"type": "integer", "minimum": 1}},
                "depths": {"type": "array",
                           "items": {"type": "integer", "minimum": 0}},
                "tn_layers": {"type": "integer", "minimum": 1},
                "samples": {"type": "integer", "minimum": 2},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

_REQUIRED_BY_KIND = {
    "ground-state": ["hamiltonian", "ansatz", "methods"],
    "layer-sweep": ["hamiltonian", "ansatz", "methods",
                    "repetition_values"],
    "j-sweep": ["hamiltonian", "ansatz", "methods", "j_values"],
    "expressivity": ["expressivity"],
    "partition-sweep": ["hamiltonian", "ansatz"],
    "gradient-variance": [],
    "noise": ["hamiltonian", "ansatz", "methods", "noise"],
}

COLUMNS = {
    "ground-state": ["method", "seed", "step", "energy", "energy_error",
                     "grad_phi_norm", "grad_theta_norm", "term_count",
                     "exact_energy"],
    "layer-sweep": ["method", "repetitions", "seed", "best_energy",
                    "energy_error", "exact_energy", "converged"],
    "j-sweep": ["J", "method", "seed", "best_energy", "exact_energy",
                "energy_error"],
    "expressivity": ["ensemble", "pqc_depth", "mpo_layers", "t", "delta",
                     "std_error", "haar_moment", "ensemble_moment"],
    "partition-sweep": ["subset", "t", "delta", "std_error"],
    "gradient-variance": ["depth", "n", "tag", "samples", "mean",
                          "variance", "mean_std_error"],
    "noise": ["method", "seed", "step", "mean_energy", "error_bar",
              "exact_energy"],
}


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def validate_config(cfg: dict) -> None:
    """Schema validation; raises ConfigError with the offending field
    path. Performs no computation."""
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from exc
    for key in _REQUIRED_BY_KIND[cfg["kind"]]:
        if key not in cfg:
            raise ConfigError(
                f"<root>: kind {cfg['kind']!r} requires field {key!r}")


def list_experiments() -> list[dict]:
    return [{"kind": k, "required": ["schema_version", "kind", "seeds"]
             + _REQUIRED_BY_KIND[k], "columns": COLUMNS[k]}
            for k in KINDS]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_csv(path: Path, kind: str, rows: list[dict]) -> None:
    cols = COLUMNS[kind]
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(cols)
        for r in rows:
            missing = [c for c in cols if c not in r]
            if missing:
                raise RuntimeError(f"row missing cells {missing}")
            w.writerow([_fmt(r[c]) for c in cols])


def _write_sidecar(path: Path, cfg: dict) -> None:
    doc = {
        "resolved_config": cfg,
        "library_version": __version__,
        "written_at": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def _optimizer_config(cfg: dict, seed: int, **extra) -> OptimizerConfig:
    opts = dict(cfg.get("optimizer", {}))
    opts.update(extra)
    return OptimizerConfig(seed=seed, **opts)


def _make_layout(cfg: dict, kind: str, hspec: HamiltonianSpec):
    layers = cfg.get("layout", {}).get("layers", 2)
    grid = hspec.grid
    if grid is not None:
        return tn_rotation.make_layout(f"{kind}2d", hspec.n, layers,
                                       grid=grid)
    return tn_rotation.make_layout(f"{kind}1d", hspec.n, layers)


def _ansatz(cfg: dict, n: int, reps: int | None = None):
    a = cfg["ansatz"]
    m = reps if reps is not None else a.get("repetitions", 2)
    return make_template(a["template"], n, m)


def _map(items, fn, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def _run_method(method, h, hspec, ansatz, cfg, seed):
    if method == "pure":
        return optimize.optimize_pure_vqe(
            h, ansatz, _optimizer_config(cfg, seed, strategy="pure_vqe"))
    layout = _make_layout(cfg, method, hspec)
    return optimize.optimize_alternating(
        h, layout, ansatz, _optimizer_config(cfg, seed))


def _run_ground_state(cfg: dict, threads: int) -> list[dict]:
    hspec = HamiltonianSpec(**cfg["hamiltonian"])
    h = hspec.build()
    exact = analysis.exact_ground_energy(h)
    ansatz = _ansatz(cfg, hspec.n)
    work = [(m, s) for m in cfg["methods"] for s in cfg["seeds"]]

    def one(item):
        method, seed = item
        rec = _run_method(method, h, hspec, ansatz, cfg, seed)
        return [{
            "method": method, "seed": seed, "step": st.step,
            "energy": st.energy, "energy_error": st.energy - exact,
            "grad_phi_norm": st.grad_phi_norm,
            "grad_theta_norm": st.grad_theta_norm,
            "term_count": st.term_count, "exact_energy": exact,
        } for st in rec.steps]

    return [row for rows in _map(work, one, threads) for row in rows]


def _run_layer_sweep(cfg: dict, threads: int) -> list[dict]:
    hspec = HamiltonianSpec(**cfg["hamiltonian"])
    h = hspec.build()
    exact = analysis.exact_ground_energy(h)
    work = [(m, reps, s) for m in cfg["methods"]
            for reps in cfg["repetition_values"] for s in cfg["seeds"]]

    def one(item):
        method, reps, seed = item
        ansatz = _ansatz(cfg, hspec.n, reps)
        rec = _run_method(method, h, hspec, ansatz, cfg, seed)
        return {
            "method": method, "repetitions": reps, "seed": seed,
            "best_energy": rec.best_energy,
            "energy_error": rec.best_energy - exact,
            "exact_energy": exact, "converged": rec.converged,
        }

    return _map(work, one, threads)


def _run_j_sweep(cfg: dict, threads: int) -> list[dict]:
    base = cfg["hamiltonian"]
    work = [(J, m, s) for J in cfg["j_values"] for m in cfg["methods"]
            for s in cfg["seeds"]]

    def one(item):
        J, method, seed = item
        params = dict(base["params"])
        params["J"] = J
        hspec = HamiltonianSpec(base["variant"], params)
        h = hspec.build()
        exact = analysis.exact_ground_energy(h)
        ansatz = _ansatz(cfg, hspec.n)
        rec = _run_method(method, h, hspec, ansatz, cfg, seed)
        return {
            "J": J, "method": method, "seed": seed,
            "best_energy": rec.best_energy, "exact_energy": exact,
            "energy_error": rec.best_energy - exact,
        }

    return _map(work, one, threads)


def _run_expressivity(cfg: dict, threads: int) -> list[dict]:
    e = cfg["expressivity"]
    n = e["n"]
    depths = e["pqc_depths"]
    mpo_layers = e.get("mpo_layers", [4, 6])
    ts = e.get("t_values", [2, 3])
    samples = e.get("samples", 500)
    haar_samples = e.get("haar_samples", 20000)
    a = BipartitionSpec(tuple(range(n // 2)))
    seed = cfg["seeds"][0]
    rows = []
    for t in ts:
        haar = analysis.haar_moment(n, a, t, haar_samples, seed + 1)

        def emit(name, ens, depth, layers):
            d = analysis.delta_t(ens, a, t, haar=haar)
            rows.append({
                "ensemble": name, "pqc_depth": depth,
                "mpo_layers": layers, "t": t, "delta": d.estimate,
                "std_error": d.std_error, "haar_moment": haar.estimate,
                "ensemble_moment": d.ensemble.estimate,
            })

        for m in depths:
            ansatz = make_template("A", n, m)
            emit("pqc", make_ensemble(n, samples, seed, ansatz), m, 0)
            for k in mpo_layers:
                layout = tn_rotation.make_layout("umpo1d", n, k)
                emit("pqc+umpo",
                     make_ensemble(n, samples, seed, ansatz, layout), m, k)
        if e.get("include_controls", True):
            emit("haar", EnsembleSpec(n=n, samples=samples, seed=seed + 2,
                                      kind="haar"), 0, 0)
            emit("product", EnsembleSpec(n=n, samples=max(2, samples // 10),
                                         seed=seed, kind="product"), 0, 0)
    return rows


def make_ensemble(n, samples, seed, ansatz, layout=None) -> EnsembleSpec:
    return EnsembleSpec(n=n, samples=samples, seed=seed, kind="circuit",
                        ansatz=ansatz, layout=layout)


def _run_partition_sweep(cfg: dict, threads: int) -> list[dict]:
    p = cfg.get("partition", {})
    hspec = HamiltonianSpec(**cfg["hamiltonian"])
    n = hspec.n
    ansatz = _ansatz(cfg, n)
    layout = None
    if "layout" in cfg:
        layout = _make_layout(cfg, cfg["layout"]["kind"][:4], hspec)
    ens = make_ensemble(n, p.get("samples", 200), cfg["seeds"][0], ansatz,
                        layout)
    t = p.get("t", 2)
    sweep = analysis.random_partition_sweep(
        ens, t, p.get("trials", 10), seed=cfg["seeds"][0],
        haar_samples=p.get("haar_samples", 20000))
    return [{
        "subset": " ".join(str(q) for q in subset), "t": t,
        "delta": d.estimate, "std_error": d.std_error,
    } for subset, d in sweep]


def _run_gradient_variance(cfg: dict, threads: int) -> list[dict]:
    v = cfg.get("variance", {})
    setup = GradientVarianceSetup(
        ns=tuple(v.get("ns", (4, 6, 8, 10))),
        depths=tuple(v.get("depths", (1, 4, 8))),
        tn_layers=v.get("tn_layers", 2),
        seed=cfg["seeds"][0],
    )
    report = analysis.gradient_variance_experiment(
        setup, samples=v.get("samples", 1000))
    rows = []
    for (depth, n), tags in sorted(report.cells.items()):
        for tag in sorted(tags):
            st = tags[tag]
            rows.append({
                "depth": depth, "n": n, "tag": tag,
                "samples": st.samples, "mean": st.mean,
                "variance": st.variance,
                "mean_std_error": st.mean_std_error,
            })
    return rows


def _run_noise(cfg: dict, threads: int) -> list[dict]:
    hspec = HamiltonianSpec(**cfg["hamiltonian"])
    h = hspec.build()
    exact = analysis.exact_ground_energy(h)
    ansatz = _ansatz(cfg, hspec.n)
    nd = cfg["noise"]
    work = [(m, s) for m in cfg["methods"] for s in cfg["seeds"]]

    def one(item):
        # A noiseless optimization fixes the parameter trajectory; the
        # noisy estimator (mean and error bar over the trajectory
        # ensemble) is then evaluated at every recorded step.
        method, seed = item
        if method == "pure":
            rec = optimize.optimize_pure_vqe(
                h, ansatz, _optimizer_config(
                    cfg, seed, strategy="pure_vqe",
                    record_parameters=True))
            layout = None
        else:
            layout = _make_layout(cfg, method, hspec)
            rec = optimize.optimize_alternating(
                h, layout, ansatz,
                _optimizer_config(cfg, seed, record_parameters=True))
        noise = NoiseModel(p1=nd["p1"], p2=nd["p2"],
                           trajectories=nd.get("trajectories", 40),
                           seed=seed)
        rows = []
        for st in rec.steps:
            if layout is None:
                est = simulator.noisy_energy(h, ansatz, st.phi, noise)
            else:
                r = tn_rotation.rotate_hamiltonian(h, layout, st.theta)
                est = simulator.noisy_energy(r, ansatz, st.phi, noise)
            rows.append({
                "method": method, "seed": seed, "step": st.step,
                "mean_energy": est.mean, "error_bar": est.error_bar,
                "exact_energy": exact,
            })
        return rows

    return [row for rows in _map(work, one, threads) for row in rows]


def run_config(path, output_dir=".", threads: int = 1,
               seed_override: int | None = None) -> int:
    """Execute a config; returns 0 on success, 2 on validation error,
    3 on runtime failure."""
    try:
        cfg = load_config(path)
        validate_config(cfg)
    except ConfigError as exc:
        print(f"invalid config: {exc}")
        return 2
    if seed_override is not None:
        cfg = dict(cfg)
        cfg["seeds"] = [int(seed_override)]
    runners = {
        "ground-state": _run_ground_state,
        "layer-sweep": _run_layer_sweep,
        "j-sweep": _run_j_sweep,
        "expressivity": _run_expressivity,
        "partition-sweep": _run_partition_sweep,
        "gradient-variance": _run_gradient_variance,
        "noise": _run_noise,
    }
    try:
        rows = runners[cfg["kind"]](cfg, threads)
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = cfg.get("output") or cfg.get("name") or cfg["kind"]
        stem = Path(stem).stem
        _write_csv(out / f"{stem}.csv", cfg["kind"], rows)
        _write_sidecar(out / f"{stem}.json", cfg)
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 3
        print(f"experiment failed: {type(exc).__name__}: {exc}")
        return 3
    print(f"wrote {out / (stem + '.csv')} ({len(rows)} rows)")
    return 0
