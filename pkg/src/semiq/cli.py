"""Batch experiment runner.

Reads a JSON config, builds the requested model, runs the classical checks,
quantum solves and baselines, and writes diff-able artifacts into a run
directory named by the config hash:

    manifest.json   resolved config echo (every numeric setting, no hidden
                    defaults) plus the seed
    summary.json    headline scalars for the run
    *.csv           per-experiment tables (17 significant digits)

Config layout::

    {
      "experiment": "oscillator" | "limit-cycle" | "rotators"
                    | "classical-flow" | "conformance",
      "seed": 1234,
      "output_dir": "runs",
      "params":   { model parameters, e.g. "omega0", "lambda", "mu", "l" },
      "numerics": { "dim", "n_max", "evolve.dt", "t_end",
                    "stationary.null_tol", "validate.pos_tol", ... },
      "sweep":    { "params.lambda": [0.5, 1.0, 2.0] }        # optional
    }

A sweep fans out over the cartesian grid and writes one row per grid point
into sweep.csv instead of per-point tables.  Runs are deterministic for a
fixed config and seed: rerunning produces byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

import numpy as np

from . import models
from .errors import NumericalFailure
from .faq import ensemble_weights, export_trajectory_csv, sample_phase_points, verify_faq
from .lindblad import DensityMatrix, evolve, stationary
from .observables import PhasePoint
from .quantize import annihilation, export_operator_csv, number

__all__ = ["main", "entry", "validate_config", "resolve_config", "run_config"]


class ConfigError(ValueError):
    pass


EXPERIMENTS = ("oscillator", "limit-cycle", "rotators", "classical-flow", "conformance")

# key -> (required, default, caster)
_SCHEMAS = {
    "oscillator": {
        "params": {
            "omega0": (True, None, float),
            "lambda": (True, None, float),
            "u": (False, 0.0, float),
        },
        "numerics": {
            "dim": (True, None, int),
            "evolve.dt": (True, None, float),
            "t_end": (True, None, float),
            "alpha": (False, [2.0, 0.0], list),
            "sample_every": (False, 0, int),
            "validate.pos_tol": (False, 1e-8, float),
            "faq_points": (False, 100, int),
            "faq_tol": (False, 1e-12, float),
        },
    },
    "limit-cycle": {
        "params": {
            "omega": (True, None, float),
            "lambda": (True, None, float),
            "mu": (True, None, float),
        },
        "numerics": {
            "dim": (True, None, int),
            "n_max": (True, None, int),
            "stationary.null_tol": (False, 1e-10, float),
            "validate.pos_tol": (False, 1e-8, float),
            "faq_points": (False, 100, int),
            "faq_tol": (False, 1e-12, float),
        },
    },
    "rotators": {
        "params": {
            "omega1": (True, None, float),
            "omega2": (True, None, float),
            "lambda": (True, None, float),
            "l": (True, None, float),
        },
        "numerics": {
            "stationary.null_tol": (False, 1e-10, float),
            "validate.pos_tol": (False, 1e-8, float),
            "faq_points": (False, 100, int),
            "faq_tol": (False, 1e-12, float),
        },
    },
    "classical-flow": {
        "params": {
            "model": (True, None, str),
            "omega0": (False, None, float),
            "omega": (False, None, float),
            "omega1": (False, None, float),
            "omega2": (False, None, float),
            "lambda": (False, None, float),
            "mu": (False, None, float),
            "u": (False, 0.0, float),
            "l": (False, 1.0, float),
        },
        "numerics": {
            "dt": (True, None, float),
            "t_end": (True, None, float),
            "record_every": (False, 1, int),
            "initial": (True, None, list),
        },
    },
    "conformance": {
        "params": {
            "omega1": (True, None, float),
            "omega2": (True, None, float),
            "lambda": (True, None, float),
            "l": (True, None, float),
        },
        "numerics": {
            "n_samples": (False, 50, int),
            "tol": (False, 1e-10, float),
        },
    },
}


def validate_config(config: dict) -> list[str]:
    """Schema check without running; returns a list of named problems."""
    problems: list[str] = []
    if not isinstance(config, dict):
        return ["config must be a JSON object"]
    experiment = config.get("experiment")
    if experiment is None:
        return ["missing key: experiment"]
    if experiment not in EXPERIMENTS:
        return [f"unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}"]
    schema = _SCHEMAS[experiment]
    if "seed" not in config:
        problems.append("missing key: seed")
    elif not isinstance(config["seed"], int):
        problems.append("seed must be an integer")
    allowed_top = {"experiment", "seed", "output_dir", "params", "numerics", "sweep"}
    for key in config:
        if key not in allowed_top:
            problems.append(f"extra key: {key}")
    for section in ("params", "numerics"):
        given = config.get(section, {})
        if not isinstance(given, dict):
            problems.append(f"{section} must be an object")
            continue
        for key, (required, _default, _cast) in schema[section].items():
            if required and key not in given:
                problems.append(f"missing key: {section}.{key}")
        for key in given:
            if key not in schema[section]:
                problems.append(f"extra key: {section}.{key}")
    sweep = config.get("sweep", {})
    if sweep:
        if not isinstance(sweep, dict):
            problems.append("sweep must be an object")
        else:
            for dotted, values in sweep.items():
                section, _, key = dotted.partition(".")
                if section not in ("params", "numerics") or key not in schema.get(section, {}):
                    problems.append(f"sweep key does not name a config entry: {dotted}")
                elif not isinstance(values, list) or not values:
                    problems.append(f"sweep values for {dotted} must be a non-empty list")
    return problems


def resolve_config(config: dict) -> dict:
    """Fill in every default so the manifest carries no hidden settings."""
    problems = validate_config(config)
    if problems:
        raise ConfigError("; ".join(problems))
    experiment = config["experiment"]
    schema = _SCHEMAS[experiment]
    resolved = {
        "experiment": experiment,
        "seed": int(config["seed"]),
        "output_dir": config.get("output_dir", "runs"),
        "params": {},
        "numerics": {},
        "sweep": config.get("sweep", {}),
    }
    for section in ("params", "numerics"):
        given = config.get(section, {})
        for key, (_required, default, cast) in schema[section].items():
            value = given.get(key, default)
            if value is None:
                continue
            try:
                resolved[section][key] = cast(value) if cast is not list else list(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc
    return resolved


def _config_hash(resolved: dict) -> str:
    hashed = {key: value for key, value in resolved.items() if key != "output_dir"}
    canonical = json.dumps(hashed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])


def _format_cell(cell):
    if isinstance(cell, bool):
        return "1" if cell else "0"
    if isinstance(cell, float):
        return f"{cell:.17g}"
    if isinstance(cell, complex):
        return f"{cell.real:.17g}{'+' if cell.imag >= 0 else '-'}{abs(cell.imag):.17g}i"
    return str(cell)


# -- experiment bodies -------------------------------------------------------


def _run_oscillator(resolved: dict, out_dir: Path | None) -> dict:
    p = resolved["params"]
    n = resolved["numerics"]
    params = models.OscillatorParams(omega0=p["omega0"], lam=p["lambda"], u=p["u"])
    system = models.oscillator_faq(params)
    check = verify_faq(
        system,
        models.oscillator_field(params),
        sample_phase_points(1, n["faq_points"], seed=resolved["seed"]),
        n["faq_tol"],
    )
    dim = n["dim"]
    dt = n["evolve.dt"]
    t_end = n["t_end"]
    alpha = complex(n["alpha"][0], n["alpha"][1])
    model = models.oscillator_lindblad(params, dim)
    rho0 = DensityMatrix.coherent_state(dim, alpha)
    a_op = annihilation(dim)
    sample_every = n["sample_every"] or None
    result = evolve(
        model, rho0, t_end, dt,
        observables={"a": a_op, "n": number(dim)},
        sample_every=sample_every,
        validate_pos_tol=n["validate.pos_tol"],
    )
    steps_per_sample = int(round((result.times[1] - result.times[0]) / dt)) if len(result.times) > 1 else 1
    [(trajectory, weights)] = ensemble_weights(
        system, [PhasePoint([alpha])], t_end, dt, record_every=steps_per_sample
    )
    n_common = min(len(trajectory.times), len(result.times))
    ehrenfest = float(np.max(np.abs(
        result.expectations["a"][:n_common] - trajectory.states[:n_common, 0]
    )))
    summary = {
        "faq_max_error": check.max_abs_error,
        "faq_pass": check.passed,
        "ehrenfest_max_error": ehrenfest,
        "mean_n_final": float(result.expectations["n"][-1].real),
        "max_trace_deviation": result.max_trace_deviation,
        "max_hermiticity_deviation": result.max_hermiticity_deviation,
        "min_eigenvalue": result.min_eigenvalue,
    }
    if out_dir is not None:
        export_trajectory_csv(trajectory, out_dir / "classical.csv", weights)
        rows = [
            (t, result.expectations["a"][i], result.expectations["n"][i])
            for i, t in enumerate(result.times)
        ]
        _write_csv(out_dir / "quantum.csv", ["t", "a", "n"], rows)
    return summary


def _run_limit_cycle(resolved: dict, out_dir: Path | None) -> dict:
    p = resolved["params"]
    n = resolved["numerics"]
    params = models.LimitCycleParams(omega=p["omega"], lam=p["lambda"], mu=p["mu"])
    system = models.limit_cycle_faq(params)
    check = verify_faq(
        system,
        models.limit_cycle_field(params),
        sample_phase_points(1, n["faq_points"], seed=resolved["seed"]),
        n["faq_tol"],
    )
    dim = n["dim"]
    distribution = models.recurrence_stationary(params.nu, n["n_max"])
    model = models.limit_cycle_lindblad(params, dim)
    state = stationary(model, null_tol=n["stationary.null_tol"], pos_tol=n["validate.pos_tol"])
    diag = np.diag(state.mat).real
    off = state.mat - np.diag(np.diag(state.mat))
    n_common = min(dim, len(distribution))
    summary = {
        "nu": params.nu,
        "mean_n": models.mean_n(params.nu),
        "mandel_q": models.mandel_q(params.nu),
        "diag_max_error": float(np.max(np.abs(diag[:n_common] - distribution[:n_common]))),
        "offdiag_max": float(np.max(np.abs(off))),
        "faq_max_error": check.max_abs_error,
        "faq_pass": check.passed,
    }
    if out_dir is not None:
        rows = [
            (k, distribution[k] if k < len(distribution) else 0.0, diag[k] if k < dim else 0.0)
            for k in range(max(len(distribution), dim))
        ]
        _write_csv(out_dir / "distribution.csv", ["n", "p_recurrence", "p_exact"], rows)
        export_operator_csv(state.op, out_dir / "stationary_state.csv")
    return summary


def _run_rotators(resolved: dict, out_dir: Path | None) -> dict:
    p = resolved["params"]
    n = resolved["numerics"]
    params = models.RotatorParams(omega1=p["omega1"], omega2=p["omega2"], lam=p["lambda"], l=p["l"])
    system = models.rotator_faq(params)
    check = verify_faq(
        system,
        models.rotator_field(params),
        sample_phase_points(2, n["faq_points"], seed=resolved["seed"]),
        n["faq_tol"],
    )
    report = models.closure_vs_exact_report(
        params, null_tol=n["stationary.null_tol"], pos_tol=n["validate.pos_tol"]
    )
    last = report.rows[-1]
    summary = {
        "x_closure": last.x_closure,
        "x_exact": last.x_exact,
        "rel_deviation": last.rel_deviation,
        "lz_exact": last.lz_exact,
        "faq_max_error": check.max_abs_error,
        "faq_pass": check.passed,
    }
    if out_dir is not None:
        rows = [
            (row.l, row.n_excitations, row.x_closure, row.x_exact,
             row.rel_deviation, row.lz_exact, row.ly_exact)
            for row in report.rows
        ]
        _write_csv(
            out_dir / "closure.csv",
            ["l", "N", "x_closure", "x_exact", "rel_deviation", "lz_exact", "ly_exact"],
            rows,
        )
    return summary


def _classical_flow_system(p: dict):
    kind = p["model"]
    if kind == "oscillator":
        return models.oscillator_faq(
            models.OscillatorParams(omega0=p["omega0"], lam=p["lambda"], u=p["u"])
        )
    if kind == "limit-cycle":
        return models.limit_cycle_faq(
            models.LimitCycleParams(omega=p["omega"], lam=p["lambda"], mu=p["mu"])
        )
    if kind == "rotators":
        return models.rotator_faq(
            models.RotatorParams(omega1=p["omega1"], omega2=p["omega2"], lam=p["lambda"], l=p["l"])
        )
    raise ConfigError(f"unknown classical-flow model {kind!r}")


def _run_classical_flow(resolved: dict, out_dir: Path | None) -> dict:
    p = resolved["params"]
    n = resolved["numerics"]
    for needed in _REQUIRED_MODEL_KEYS.get(p.get("model"), ()):
        if needed not in p or p[needed] is None:
            raise ConfigError(f"missing key: params.{needed} (required by model {p.get('model')!r})")
    system = _classical_flow_system(p)
    initial = []
    for entry_ in n["initial"]:
        coords = [complex(pair[0], pair[1]) for pair in entry_]
        if len(coords) != system.mode_count:
            raise ConfigError(
                f"initial point has {len(coords)} modes, model needs {system.mode_count}"
            )
        initial.append(PhasePoint(coords))
    carried = ensemble_weights(system, initial, n["t_end"], n["dt"], record_every=n["record_every"])
    finals = [float(weights[-1]) for _traj, weights in carried]
    summary = {
        "n_points": len(carried),
        "final_weight_min": min(finals),
        "final_weight_max": max(finals),
    }
    if out_dir is not None:
        for index, (trajectory, weights) in enumerate(carried):
            export_trajectory_csv(trajectory, out_dir / f"trajectory_{index:03d}.csv", weights)
    return summary


_REQUIRED_MODEL_KEYS = {
    "oscillator": ("omega0", "lambda"),
    "limit-cycle": ("omega", "lambda", "mu"),
    "rotators": ("omega1", "omega2", "lambda"),
}


def _run_conformance(resolved: dict, out_dir: Path | None) -> dict:
    p = resolved["params"]
    n = resolved["numerics"]
    params = models.RotatorParams(omega1=p["omega1"], omega2=p["omega2"], lam=p["lambda"], l=p["l"])
    report = models.moment_equations_conformance(
        params, n_samples=n["n_samples"], seed=resolved["seed"], tol=n["tol"]
    )
    summary = {"n_samples": report.n_samples, "tol": report.tol}
    for line in report.lines:
        slug = line.observable.replace("(", "_").replace(")", "").replace(",", "_").replace("^", "")
        summary[f"deviation_{slug}"] = line.max_abs_deviation
        summary[f"agrees_{slug}"] = line.agrees
    if out_dir is not None:
        rows = [(line.observable, line.max_abs_deviation, line.agrees) for line in report.lines]
        _write_csv(out_dir / "conformance.csv", ["moment_equation", "max_abs_deviation", "agrees"], rows)
    return summary


_RUNNERS = {
    "oscillator": _run_oscillator,
    "limit-cycle": _run_limit_cycle,
    "rotators": _run_rotators,
    "classical-flow": _run_classical_flow,
    "conformance": _run_conformance,
}


# -- sweep machinery ---------------------------------------------------------


def _apply_override(resolved: dict, dotted: str, value):
    section, _, key = dotted.partition(".")
    out = json.loads(json.dumps(resolved))
    out[section][key] = value
    out["sweep"] = {}
    return out


def _sweep_point(payload: str) -> dict:
    resolved = json.loads(payload)
    runner = _RUNNERS[resolved["experiment"]]
    return runner(resolved, None)


def _run_sweep(resolved: dict, out_dir: Path, jobs: int) -> dict:
    sweep = resolved["sweep"]
    keys = sorted(sweep)
    grids = [sweep[key] for key in keys]
    points = []
    for combo in product(*grids):
        overridden = json.loads(json.dumps(resolved))
        for dotted, value in zip(keys, combo):
            overridden = _apply_override(overridden, dotted, value)
        points.append((combo, overridden))
    payloads = [json.dumps(point, sort_keys=True) for _combo, point in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_sweep_point, payloads))
    else:
        summaries = [_sweep_point(payload) for payload in payloads]
    summary_keys = sorted(summaries[0]) if summaries else []
    header = list(keys) + summary_keys
    rows = []
    for (combo, _point), summary in zip(points, summaries):
        rows.append(list(combo) + [summary[k] for k in summary_keys])
    _write_csv(out_dir / "sweep.csv", header, rows)
    return {"grid_points": len(points), "sweep_keys": ",".join(keys)}


# -- entry points ------------------------------------------------------------


def run_config(config: dict, output_dir: str | None = None, seed: int | None = None, jobs: int = 1) -> Path:
    """Resolve, run, and write artifacts; returns the run directory."""
    config = dict(config)
    if seed is not None:
        config["seed"] = seed
    if output_dir is not None:
        config["output_dir"] = output_dir
    resolved = resolve_config(config)
    run_hash = _config_hash(resolved)
    out_dir = Path(resolved["output_dir"]) / f"{resolved['experiment']}-{run_hash}"
    out_dir.mkdir(parents=True, exist_ok=True)

    if resolved["sweep"]:
        summary = _run_sweep(resolved, out_dir, jobs)
    else:
        summary = _RUNNERS[resolved["experiment"]](resolved, out_dir)

    summary_payload = {"experiment": resolved["experiment"], "seed": resolved["seed"], **summary}
    _write_json(out_dir / "summary.json", summary_payload)
    _write_json(out_dir / "manifest.json", {"config": resolved, "hash": run_hash, "seed": resolved["seed"]})
    return out_dir


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="semiq", description="semiclassical quantization experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run an experiment config")
    run_parser.add_argument("config", type=Path)
    run_parser.add_argument("--output-dir", default=None)
    run_parser.add_argument("--seed", type=int, default=None)
    run_parser.add_argument("--jobs", type=int, default=1)

    validate_parser = sub.add_parser("validate", help="schema-check a config without running")
    validate_parser.add_argument("config", type=Path)

    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 1
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        problems = validate_config(config)
        if problems:
            for problem in problems:
                print(f"invalid: {problem}")
            return 1
        print("valid")
        return 0

    try:
        out_dir = run_config(config, output_dir=args.output_dir, seed=args.seed, jobs=args.jobs)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    print(out_dir)
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
