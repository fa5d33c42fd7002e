"""Batch front-end: run experiment configs, certify mappings, compare runs.

Subcommands
-----------
run <config.ini>      dispatch engines/oracle, write CSV + JSON manifest
verify-mappings       JSON residual report of all phase-space mapping checks
compare <a> <b>       statistical comparison of two run manifests

Config files are INI format: a [model] section (preset name plus parameter
overrides, or an inline model), a [run] section (grid, seed, output
directory, observables), and one [engine.<label>] section per requested
engine.  Every output CSV has the header ``time,mean,std_error`` and a
trailing ``# model_checksum=...`` comment so data files remain traceable to
the exact model; the manifest repeats the checksum together with the full
configuration and wall time.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (including
a failed comparison).
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConfigInvalid,
    DimensionTooLarge,
    EngineChannelMismatch,
    Error,
    GridMismatch,
    IntegratorDivergence,
    QuadratureFailure,
    UnknownPreset,
)
from .models import (
    Channel,
    Field,
    LindbladModel,
    RydbergCoupling,
    model_checksum,
    model_to_dict,
    preset,
    zz_all_to_all,
)
from .engines import ENGINES, EnsembleConfig, run_ensemble
from .exact import MAX_SPINS, exact_observable_series

_ENGINE_TYPES = ENGINES + ("exact",)

# engine/channel compatibility, validated before anything is launched
_ENGINE_CHANNELS = {
    "mean_field": {"dephasing", "decay", "pump"},
    "dtwa": {"dephasing"},
    "dctwa": {"dephasing", "decay", "pump"},
    "osdtwa": {"decay"},
    "exact": {"dephasing", "decay", "pump"},
}


def _parse_number(section, key, cast, where):
    try:
        return cast(section[key])
    except (KeyError, ValueError) as exc:
        raise ConfigInvalid(f"[{where}] {key}: {exc}") from exc


def _model_overrides(section) -> dict:
    out = {}
    for key, raw in section.items():
        if key == "preset":
            continue
        if key in ("n_spins", "n_traj"):
            out[key] = int(raw)
        elif key in ("boundary", "initial", "scheme", "time_unit"):
            out[key] = raw
        elif key in ("observables", "schemes"):
            out[key] = tuple(x for x in raw.replace(",", " ").split())
        else:
            try:
                out[key] = float(raw)
            except ValueError as exc:
                raise ConfigInvalid(f"[model] {key}: {exc}") from exc
    return out


def _inline_model(section) -> LindbladModel:
    n_spins = _parse_number(section, "n_spins", int, "model")
    terms = []
    for axis in ("x", "y", "z"):
        key = f"omega_{axis}" if axis != "x" else "omega"
        if key in section:
            terms.append(Field(axis, float(section[key])))
    if "zz_j" in section:
        terms.append(zz_all_to_all(n_spins, float(section["zz_j"])))
    if "rydberg_j" in section:
        terms.append(RydbergCoupling(
            float(section["rydberg_j"]),
            float(section.get("alpha_exp", 6.0)),
            section.get("boundary", "open"),
        ))
    channels = []
    for kind, key in (("decay", "gamma"), ("dephasing", "kappa"), ("pump", "pump")):
        if key in section and float(section[key]) > 0:
            channels.append(Channel(kind, float(section[key])))
    return LindbladModel(n_spins, tuple(terms), tuple(channels),
                         section.get("initial", "down"), label="inline")


def load_config(path: str) -> dict:
    """Parse and validate a run config; raises ConfigInvalid on any defect."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigInvalid(f"cannot read config file {path}")
    if "model" not in parser:
        raise ConfigInvalid("missing [model] section")
    model_sec = parser["model"]
    try:
        if "preset" in model_sec:
            pre = preset(model_sec["preset"], **_model_overrides(model_sec))
            model, defaults = pre.model, dict(pre.defaults)
        else:
            model, defaults = _inline_model(model_sec), {}
    except (UnknownPreset, ValueError) as exc:
        raise ConfigInvalid(f"[model]: {exc}") from exc

    run_sec = parser["run"] if "run" in parser else {}
    run = {
        "seed": int(run_sec.get("seed", 0)),
        "dt": float(run_sec.get("dt", defaults.get("dt", 1e-3))),
        "t_max": float(run_sec.get("t_max", defaults.get("t_max", 1.0))),
        "n_traj": int(run_sec.get("n_traj", defaults.get("n_traj", 1000))),
        "n_save": int(run_sec.get("n_save", 61)),
        "scheme": run_sec.get("scheme", defaults.get("scheme", "4p")),
        "threads": int(run_sec.get("threads", 1)),
        "out": run_sec.get("out", "out"),
    }
    raw_obs = run_sec.get("observables")
    if raw_obs:
        observables = tuple(x for x in raw_obs.replace(",", " ").split())
    else:
        observables = tuple(defaults.get("observables", ("Sx", "Sy", "Sz")))

    engines = {}
    for name in parser.sections():
        if not name.startswith("engine."):
            continue
        label = name.split(".", 1)[1]
        sec = parser[name]
        etype = sec.get("type", label)
        if etype not in _ENGINE_TYPES:
            raise ConfigInvalid(
                f"[{name}] type: {etype!r} is not one of {_ENGINE_TYPES}"
            )
        engines[label] = {
            "type": etype,
            "scheme": sec.get("scheme", run["scheme"]),
            "n_traj": int(sec.get("n_traj", run["n_traj"])),
        }
    if not engines:
        raise ConfigInvalid("no [engine.<label>] sections found")

    _validate_engine_channels(model, engines)
    try:
        from .observables import parse_observables
        parse_observables(observables, model.n_spins)
    except ValueError as exc:
        raise ConfigInvalid(f"[run] observables: {exc}") from exc
    return {"model": model, "run": run, "observables": observables,
            "engines": engines, "path": str(path)}


def _validate_engine_channels(model: LindbladModel, engines: dict):
    for label, spec in engines.items():
        allowed = _ENGINE_CHANNELS[spec["type"]]
        for ch in model.channels:
            if ch.kind not in allowed:
                raise EngineChannelMismatch(
                    f"engine {label!r} ({spec['type']}) does not support "
                    f"{ch.kind}; allowed channels: {sorted(allowed)}"
                )
        if spec["type"] == "exact" and model.n_spins > MAX_SPINS:
            raise ConfigInvalid(
                f"engine {label!r}: exact oracle limited to {MAX_SPINS} spins"
            )


def _csv_name(observable: str) -> str:
    return observable.replace(":", "-").replace(",", "_") + ".csv"


def _write_csv(path: Path, times, means, errors, checksum: str):
    lines = ["time,mean,std_error"]
    for t, m, e in zip(times, means, errors):
        lines.append(f"{t:.12g},{m:.17g},{e:.17g}")
    lines.append(f"# model_checksum={checksum}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_config(config: dict) -> Path:
    """Execute every engine in the config; returns the manifest path."""
    model = config["model"]
    run = config["run"]
    observables = config["observables"]
    out_dir = Path(run["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    checksum = model_checksum(model)
    started = time.time()
    outputs = {}
    times_ref = None
    for label, spec in config["engines"].items():
        if spec["type"] == "exact":
            n_steps = max(0, int(round(run["t_max"] / run["dt"])))
            from .engines import save_step_indices
            grid = save_step_indices(n_steps, run["n_save"]) * run["dt"]
            series = exact_observable_series(model, grid, observables)
        else:
            cfg = EnsembleConfig(
                n_traj=spec["n_traj"], dt=run["dt"], t_max=run["t_max"],
                seed=run["seed"], scheme=spec["scheme"], engine=spec["type"],
                n_save=run["n_save"], threads=run["threads"],
            )
            series = run_ensemble(model, None, cfg, observables)
        times_ref = series.times
        eng_dir = out_dir / label
        eng_dir.mkdir(exist_ok=True)
        outputs[label] = {}
        for name in observables:
            rel = f"{label}/{_csv_name(name)}"
            _write_csv(out_dir / rel, series.times, series.means[name],
                       series.std_errors[name], checksum)
            outputs[label][name] = rel
    manifest = {
        "version": __version__,
        "model_checksum": checksum,
        "model": model_to_dict(model),
        "run": run,
        "observables": list(observables),
        "engines": config["engines"],
        "outputs": outputs,
        "time_grid": [float(t) for t in (times_ref if times_ref is not None else [])],
        "wall_time_s": round(time.time() - started, 3),
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def _read_csv(path: Path):
    times, means, errors = [], [], []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#") or line.startswith("time,"):
            continue
        t, m, e = line.split(",")
        times.append(float(t))
        means.append(float(m))
        errors.append(float(e))
    return np.array(times), np.array(means), np.array(errors)


def compare_manifests(path_a: str, path_b: str, k: float = 3.0,
                      abs_tol: float = 0.0) -> dict:
    """Per-observable comparison of two runs on a shared time grid.

    Each engine pair is compared point by point; a point passes when
    |mean_a - mean_b| <= max(k * sqrt(se_a^2 + se_b^2), abs_tol).

    Raises:
        GridMismatch: when time grids or observable sets differ.
    """
    man_a = json.loads(Path(path_a).read_text())
    man_b = json.loads(Path(path_b).read_text())
    grid_a = np.array(man_a["time_grid"])
    grid_b = np.array(man_b["time_grid"])
    if grid_a.shape != grid_b.shape or not np.allclose(grid_a, grid_b, atol=1e-12):
        raise GridMismatch("runs do not share a time grid")
    obs_a, obs_b = set(man_a["observables"]), set(man_b["observables"])
    common = sorted(obs_a & obs_b)
    if not common:
        raise GridMismatch("runs share no observables")

    report = {"k": k, "abs_tol": abs_tol, "pairs": [], "all_pass": True}
    for la, outs_a in man_a["outputs"].items():
        for lb, outs_b in man_b["outputs"].items():
            for name in common:
                ta, ma, ea = _read_csv(Path(path_a).parent / outs_a[name])
                tb, mb, eb = _read_csv(Path(path_b).parent / outs_b[name])
                if ta.shape != tb.shape or not np.allclose(ta, tb, atol=1e-12):
                    raise GridMismatch(f"{name}: CSV grids differ")
                delta = np.abs(ma - mb)
                tol = np.maximum(k * np.sqrt(ea ** 2 + eb ** 2), abs_tol)
                ok = bool(np.all(delta <= tol))
                report["pairs"].append({
                    "engine_a": la, "engine_b": lb, "observable": name,
                    "max_abs_delta": float(delta.max()) if delta.size else 0.0,
                    "worst_ratio": float(np.max(np.divide(
                        delta, tol, out=np.zeros_like(delta), where=tol > 0)))
                    if delta.size else 0.0,
                    "pass": ok,
                })
                report["all_pass"] = report["all_pass"] and ok
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dctwa",
        description="trajectory engines and exact oracle for dissipative spin chains",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker-pool size hint (results independent of it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a run config")
    p_run.add_argument("config")

    p_ver = sub.add_parser("verify-mappings",
                           help="emit a JSON report of all mapping residuals")
    p_ver.add_argument("--out", default=None, help="write the report here")

    p_cmp = sub.add_parser("compare", help="compare two run manifests")
    p_cmp.add_argument("manifest_a")
    p_cmp.add_argument("manifest_b")
    p_cmp.add_argument("--k", type=float, default=3.0,
                       help="standard-error multiple for the pass band")
    p_cmp.add_argument("--abs-tol", type=float, default=0.0,
                       help="absolute tolerance floor")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args.config)
            if args.seed is not None:
                config["run"]["seed"] = args.seed
            if args.threads is not None:
                config["run"]["threads"] = args.threads
            manifest = run_config(config)
            print(f"wrote {manifest}")
            return 0
        if args.command == "verify-mappings":
            from .mappings import full_report
            report = full_report()
            text = json.dumps(report, indent=2)
            if args.out:
                Path(args.out).write_text(text + "\n", encoding="utf-8")
            else:
                print(text)
            return 0 if report["all_pass"] else 2
        if args.command == "compare":
            report = compare_manifests(args.manifest_a, args.manifest_b,
                                       k=args.k, abs_tol=args.abs_tol)
            print(json.dumps(report, indent=2))
            return 0 if report["all_pass"] else 2
    except (ConfigInvalid, EngineChannelMismatch, GridMismatch, UnknownPreset) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (IntegratorDivergence, QuadratureFailure, DimensionTooLarge) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
