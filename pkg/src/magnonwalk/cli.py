"""Experiment orchestration: configuration ingestion, the run pipeline
(schedule -> evolution -> observables), plot-ready data emission, and the
operator-algebra verification report.

Every run is deterministic: the pipeline contains no randomness, CSVs are
written with 17 significant digits (lossless float round-trip), and two
runs with the same configuration produce byte-identical artifacts except
for the manifest's wall-clock field.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import run_all_checks
from .errors import (
    ConfigError,
    FitDomainError,
    FlatDistributionError,
    InvalidParameterError,
    NumericalFailureError,
    ScheduleInfeasibleError,
)
from .model import (
    PRESET_NAMES,
    PhysicalParams,
    derive,
    dissipators,
    hamiltonian_rotframe,
    initial_state,
    preset,
    pulse_schedule,
)
from .observables import (
    SpreadSeries,
    loglog_slope,
    phase_distribution,
    reduce_boson,
    rotate_mode,
    sharpness_holevo,
    wigner,
)
from .solver import DT_MAX_DEFAULT, evolve

OUTPUT_ROOT_ENV = "MAGNONWALK_OUTPUT_ROOT"
DEFAULT_FIT_STEPS = {"base": 7, "realistic": 4, "realistic_gamma1": 4}
MAX_PHASE_FILES = 4

# PhysicalParams fields that may be overridden from [params] / --param.
_PARAM_FIELDS = {f.name: f for f in dataclasses.fields(PhysicalParams)}


@dataclass
class RunConfig:
    preset: str = "base"
    params: dict = field(default_factory=dict)  # overrides for PhysicalParams
    steps: int | None = None
    method: str = "expm"
    samples_per_segment: int = 10
    fit_steps: int | None = None
    dt_max: float = DT_MAX_DEFAULT
    drive_first: bool = True
    use_omega_r0: bool = False
    wigner_min: float = -4.5
    wigner_max: float = 4.5
    wigner_points: int = 101
    emit_timeseries: bool = True
    emit_holevo: bool = True
    emit_phase: bool = True
    emit_wigner: bool = True
    emit_fit: bool = True
    # Report phase/Wigner snapshots in the frame co-rotating with the mode
    # (the drive-mode detuning winds the raw rotating-frame state by many
    # turns per step; unwinding keeps the walk centered at phase 0).
    # Sharpness and sigma_H are rotation-invariant either way.
    corotating: bool = True
    out_dir: str | None = None

    def resolve_params(self) -> PhysicalParams:
        overrides = dict(self.params)
        if self.steps is not None:
            overrides["n_steps"] = self.steps
        try:
            return preset(self.preset, **overrides)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    def resolve_fit_steps(self, n_steps: int) -> int:
        k = self.fit_steps
        if k is None:
            k = DEFAULT_FIT_STEPS.get(self.preset, max(2, n_steps - 1))
        return min(k, n_steps)

    def resolve_out_dir(self) -> Path:
        if self.out_dir is not None:
            return Path(self.out_dir)
        root = os.environ.get(OUTPUT_ROOT_ENV, ".")
        return Path(root) / f"run_{self.preset}"


@dataclass
class RunManifest:
    preset: str
    params: dict
    derived: dict
    options: dict
    files: dict  # name -> sha256
    duration_s: float
    version: str


def _coerce_param(name: str, raw: str):
    if name not in _PARAM_FIELDS:
        raise ConfigError(
            f"unknown parameter {name!r}; valid: {', '.join(_PARAM_FIELDS)}"
        )
    kind = _PARAM_FIELDS[name].type
    try:
        if kind == "int":
            return int(raw)
        if kind == "complex":
            return complex(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {name} = {raw!r}") from exc


def load_config(path: str | Path) -> RunConfig:
    """Read a flat key/value config file (INI sections) into a RunConfig."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    cfg = RunConfig()
    try:
        if parser.has_section("run"):
            run = parser["run"]
            cfg.preset = run.get("preset", cfg.preset)
            if "steps" in run:
                cfg.steps = run.getint("steps")
            cfg.method = run.get("method", cfg.method)
            cfg.samples_per_segment = run.getint(
                "samples_per_segment", cfg.samples_per_segment
            )
            if "fit_steps" in run:
                cfg.fit_steps = run.getint("fit_steps")
            cfg.out_dir = run.get("out", cfg.out_dir)
        if parser.has_section("model"):
            mod = parser["model"]
            cfg.drive_first = mod.getboolean("drive_first", cfg.drive_first)
            cfg.use_omega_r0 = mod.getboolean("use_omega_r0", cfg.use_omega_r0)
            cfg.dt_max = mod.getfloat("dt_max", cfg.dt_max)
        if parser.has_section("emit"):
            em = parser["emit"]
            cfg.emit_timeseries = em.getboolean("timeseries", cfg.emit_timeseries)
            cfg.emit_holevo = em.getboolean("holevo", cfg.emit_holevo)
            cfg.emit_phase = em.getboolean("phase", cfg.emit_phase)
            cfg.emit_wigner = em.getboolean("wigner", cfg.emit_wigner)
            cfg.emit_fit = em.getboolean("fit", cfg.emit_fit)
            cfg.corotating = em.getboolean("corotating", cfg.corotating)
        if parser.has_section("wigner"):
            wg = parser["wigner"]
            cfg.wigner_min = wg.getfloat("min", cfg.wigner_min)
            cfg.wigner_max = wg.getfloat("max", cfg.wigner_max)
            cfg.wigner_points = wg.getint("points", cfg.wigner_points)
        if parser.has_section("params"):
            for key, raw in parser["params"].items():
                cfg.params[key] = _coerce_param(key, raw)
    except ValueError as exc:
        raise ConfigError(f"bad value in {path}: {exc}") from exc
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row)
                + "\n"
            )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _params_dict(p: PhysicalParams) -> dict:
    d = dataclasses.asdict(p)
    d["alpha"] = [p.alpha.real, p.alpha.imag]  # JSON-safe
    return d


def run(config: RunConfig) -> RunManifest:
    """Execute one full experiment and write the requested artifacts."""
    t_start = time.monotonic()
    p = config.resolve_params()
    if config.method not in ("expm", "rk4"):
        raise ConfigError(f"unknown method {config.method!r}")
    if config.samples_per_segment < 1:
        raise ConfigError("samples_per_segment must be >= 1")

    d = derive(p, use_omega_r0=config.use_omega_r0)
    schedule = pulse_schedule(p, d, drive_first=config.drive_first)
    h_on = hamiltonian_rotframe(p, d, drive_on=True)
    h_off = hamiltonian_rotframe(p, d, drive_on=False)
    diss = dissipators(p)
    rho0 = initial_state(p)

    traj = evolve(
        schedule,
        rho0,
        h_on,
        h_off,
        diss,
        samples_per_segment=config.samples_per_segment,
        method=config.method,
        dt_max=config.dt_max,
    )

    out = config.resolve_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}

    if config.emit_timeseries:
        path = out / "timeseries.csv"
        _write_csv(
            path,
            ["t_ns", "n_c", "P_e", "P_g", "drive_on"],
            (
                (float(t), float(n), float(pe), float(pg), int(flag))
                for t, n, pe, pg, flag in zip(
                    traj.times, traj.n_c, traj.p_e, traj.p_g, traj.drive_on
                )
            ),
        )
        files[path.name] = _sha256(path)

    steps, times, sharps, sigmas = [], [], [], []
    for step, t_boundary, rho in traj.snapshots:
        rho_m = reduce_boson(rho)
        dist = phase_distribution(rho_m, p.m_phase)
        sharp, sigma_h = sharpness_holevo(dist)
        steps.append(step)
        times.append(t_boundary)
        sharps.append(sharp)
        sigmas.append(sigma_h)
        rho_view = (
            rotate_mode(rho_m, -d.delta_c * t_boundary)
            if config.corotating
            else rho_m
        )
        if config.emit_phase and step <= MAX_PHASE_FILES:
            view = phase_distribution(rho_view, p.m_phase)
            path = out / f"phase_step{step}.csv"
            _write_csv(
                path,
                ["phi_rad", "P"],
                zip(map(float, view.phi), map(float, view.p)),
            )
            files[path.name] = _sha256(path)
        if config.emit_wigner:
            grid = wigner(
                rho_view,
                x_min=config.wigner_min,
                x_max=config.wigner_max,
                points=config.wigner_points,
            )
            path = out / f"wigner_step{step}.csv"
            _write_csv(
                path,
                ["x", "p", "W"],
                (
                    (float(grid.x[i]), float(grid.p[j]), float(grid.w[i, j]))
                    for i in range(len(grid.x))
                    for j in range(len(grid.p))
                ),
            )
            files[path.name] = _sha256(path)

    if config.emit_holevo and steps:
        path = out / "holevo.csv"
        _write_csv(
            path,
            ["step", "t_ns", "sharpness", "sigma_H"],
            zip(steps, map(float, times), map(float, sharps), map(float, sigmas)),
        )
        files[path.name] = _sha256(path)

    fit_payload = None
    if config.emit_fit and steps and config.resolve_fit_steps(len(steps)) >= 2:
        k = config.resolve_fit_steps(len(steps))
        series = SpreadSeries(
            steps=np.asarray(steps), times=np.asarray(times), sigma_h=np.asarray(sigmas)
        )
        slope, stderr = loglog_slope(series, k)
        fit_payload = {
            "slope": slope,
            "stderr": stderr,
            "n_points": k,
            "steps": steps[:k],
            "abscissa": "step_boundary_time_ns",
        }
        path = out / "fit.json"
        path.write_text(json.dumps(fit_payload, indent=2, sort_keys=True) + "\n")
        files[path.name] = _sha256(path)

    manifest = RunManifest(
        preset=config.preset,
        params=_params_dict(p),
        derived=dataclasses.asdict(d),
        options={
            "method": config.method,
            "samples_per_segment": config.samples_per_segment,
            "drive_first": config.drive_first,
            "use_omega_r0": config.use_omega_r0,
            "dt_max": config.dt_max,
            "fit_steps": config.resolve_fit_steps(len(steps)) if steps else 0,
            "wigner_grid": [config.wigner_min, config.wigner_max, config.wigner_points],
            "corotating": config.corotating,
        },
        files=files,
        duration_s=time.monotonic() - t_start,
        version=__version__,
    )
    (out / "manifest.json").write_text(
        json.dumps(dataclasses.asdict(manifest), indent=2, sort_keys=True) + "\n"
    )
    return manifest


def _verify(args) -> int:
    reports = run_all_checks(fock_dim=args.fock_dim)
    width = max(len(r.name) for r in reports)
    all_pass = True
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(
            f"{r.name:<{width}}  {r.value:12.4e}  {r.comparison} {r.threshold:.3g}"
            f"  {status}"
        )
        all_pass &= r.passed
    print(f"{'all checks passed' if all_pass else 'VERIFICATION FAILED'}")
    return 0 if all_pass else 3


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="magnonwalk",
        description="Phase-space quantum walk of a driven collective spin mode "
        "coupled to a flux-qubit coin.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="simulate a preset and emit data files")
    runp.add_argument("--preset", default=None, choices=PRESET_NAMES)
    runp.add_argument("--config", default=None, help="INI config file")
    runp.add_argument("--steps", type=int, default=None)
    runp.add_argument("--method", default=None, choices=("expm", "rk4"))
    runp.add_argument("--samples-per-segment", type=int, default=None)
    runp.add_argument("--fit-steps", type=int, default=None)
    runp.add_argument(
        "--wigner-grid",
        default=None,
        metavar="MIN:MAX:POINTS",
        help="phase-space grid, e.g. -4.5:4.5:101",
    )
    runp.add_argument("--no-wigner", action="store_true")
    runp.add_argument("--out", default=None, help="output directory")
    runp.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override a physical parameter (repeatable)",
    )

    ver = sub.add_parser("verify", help="run the operator-algebra check suite")
    ver.add_argument("--fock-dim", type=int, default=6)
    return ap


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.preset is not None:
        cfg.preset = args.preset
    if args.steps is not None:
        cfg.steps = args.steps
    if args.method is not None:
        cfg.method = args.method
    if args.samples_per_segment is not None:
        cfg.samples_per_segment = args.samples_per_segment
    if args.fit_steps is not None:
        cfg.fit_steps = args.fit_steps
    if args.out is not None:
        cfg.out_dir = args.out
    if args.no_wigner:
        cfg.emit_wigner = False
    if args.wigner_grid is not None:
        try:
            lo, hi, n = args.wigner_grid.split(":")
            cfg.wigner_min, cfg.wigner_max = float(lo), float(hi)
            cfg.wigner_points = int(n)
        except ValueError as exc:
            raise ConfigError(f"bad --wigner-grid {args.wigner_grid!r}") from exc
    for item in args.param:
        if "=" not in item:
            raise ConfigError(f"--param needs NAME=VALUE, got {item!r}")
        name, raw = item.split("=", 1)
        cfg.params[name.strip()] = _coerce_param(name.strip(), raw.strip())
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args)
        config = _config_from_args(args)
        manifest = run(config)
        out = config.resolve_out_dir()
        print(f"wrote {len(manifest.files) + 1} files to {out}")
        return 0
    except (ConfigError, InvalidParameterError, ScheduleInfeasibleError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailureError, FitDomainError, FlatDistributionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
