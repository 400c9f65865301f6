"""Command-line front end: run the standard experiments, write CSV + JSON.

Experiments
    decay        one excitation, atom initially excited (spontaneous decay)
    two-photon   two excitations from |e,1_d,0>: defect pumps the atom
    convergence  decay for a list of mode counts against the kernel reference
    oracle       the memory-kernel reference solution by itself

Every run writes <out>/run.csv plus a run.json sidecar holding the fully
resolved configuration (including derived k, g_r and the vacuum shift) and
runtime metadata; a run is reproducible bit-for-bit from its sidecar.
Floats are written with 17 significant digits so round-trips are lossless.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dos import Scheme, build_reservoir, solve_k
from .dynamics import (
    PropagationConfig,
    SystemParams,
    basis_for,
    build_hamiltonian,
    detuning_scale,
    propagate,
    schrodinger_rhs,
)
from .errors import ConfigError, IntegrationError
from .observables import record
from .oracle import KernelSpec, solve_decay_exact
from .statespace import (
    ATOM_EXCITED,
    ATOM_EXCITED_DEFECT_LOADED,
    initial_state,
    sector_size,
)

EXPERIMENTS = ("decay", "two-photon", "convergence", "oracle")

DECAY_COLUMNS = ("t", "p_excited", "p_res_one", "norm_sq", "n_total")
TWO_PHOTON_COLUMNS = (
    "t",
    "p_excited",
    "n_defect",
    "p_res_one",
    "p_res_two",
    "norm_sq",
    "n_total",
)
ORACLE_COLUMNS = ("t", "p_excited")
SUMMARY_COLUMNS = ("n_modes", "sup_dev", "t_rev")

REVIVAL_THRESHOLD = 0.05


@dataclass
class RunConfig:
    experiment: str
    n_modes: int = 150
    modes_list: tuple = (50, 150, 500)
    omega_u: float = 32.0
    delta_seed: float = 1e-4
    scheme: str = "midpoint"
    delta_o: float = 0.0
    delta_d: float = 0.0
    g_d: float = 0.0
    t_max: float = 10.0
    dt: float = 1e-3
    sample_stride: int = 10
    coupling_c: float = 1.0
    include_shift: bool = True
    inclusive_sector: bool = True
    max_states: int = 150_000
    jobs: int = 0
    out: str = "."


# Per-experiment defaults layered over the dataclass defaults; CLI flags and
# config-file entries override both.
EXPERIMENT_DEFAULTS = {
    "decay": {"t_max": 10.0},
    "two-photon": {"t_max": 20.0, "g_d": 1.0, "delta_o": -0.1, "delta_d": -0.1},
    "convergence": {"t_max": 80.0, "dt": 1.25e-3, "sample_stride": 40},
    "oracle": {"t_max": 10.0},
}

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def config_from_dict(entries: dict) -> RunConfig:
    """Rebuild a RunConfig from a sidecar's config block."""
    d = dict(entries)
    if "modes_list" in d:
        d["modes_list"] = tuple(int(x) for x in d["modes_list"])
    return RunConfig(**d)


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES.get(key)
    if kind is None:
        raise ConfigError(f"unknown configuration key {key!r}")
    raw = raw.strip()
    if key == "modes_list":
        return tuple(int(x) for x in raw.split(","))
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean value {raw!r} for {key}")
    return raw


def read_config_file(path) -> dict:
    """Flat key = value file; '#' starts a comment."""
    entries = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip().replace("-", "_")
        entries[key] = _parse_value(key, raw)
    return entries


def resolve_config(experiment: str, file_entries: dict, cli_entries: dict) -> RunConfig:
    """Apply precedence CLI > file > per-experiment defaults > base defaults."""
    merged = dict(EXPERIMENT_DEFAULTS[experiment])
    merged.update(file_entries)
    merged.update({k: v for k, v in cli_entries.items() if v is not None})
    merged["experiment"] = experiment
    cfg = config_from_dict(merged)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}")
    if cfg.n_modes < 1:
        raise ConfigError(f"n_modes must be >= 1, got {cfg.n_modes}")
    if cfg.omega_u <= 0 or cfg.omega_u <= cfg.delta_seed:
        raise ConfigError("need omega_u > delta_seed > 0")
    if cfg.delta_seed <= 0:
        raise ConfigError(f"delta_seed must be > 0, got {cfg.delta_seed}")
    if cfg.dt <= 0 or cfg.t_max < 0 or cfg.sample_stride < 1:
        raise ConfigError("need dt > 0, t_max >= 0, sample_stride >= 1")
    try:
        Scheme(cfg.scheme)
    except ValueError:
        choices = ", ".join(s.value for s in Scheme)
        raise ConfigError(f"scheme must be one of {choices}, got {cfg.scheme!r}") from None
    if cfg.experiment == "convergence" and not cfg.modes_list:
        raise ConfigError("convergence needs a non-empty modes list")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path, header, columns) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _reservoir_for(cfg: RunConfig):
    res = build_reservoir(
        n_modes=cfg.n_modes,
        omega_u=cfg.omega_u,
        delta_seed=cfg.delta_seed,
        scheme=Scheme(cfg.scheme),
        coupling_C=cfg.coupling_c,
    )
    if not cfg.include_shift:
        res = dataclasses.replace(res, vacuum_shift=0.0)
    return res


def _propagate_experiment(cfg: RunConfig, p: int):
    """Shared decay / two-photon path: build, guard, propagate, collect columns."""
    has_defect = cfg.g_d != 0.0 or p == 2
    size = sector_size(p, cfg.n_modes, has_defect)
    if size > cfg.max_states:
        raise ConfigError(
            f"sector size {size} exceeds max_states={cfg.max_states}; the state "
            f"count scales roughly as N^p, so reduce n_modes or raise --max-states"
        )
    res = _reservoir_for(cfg)
    params = SystemParams(delta_o=cfg.delta_o, delta_d=cfg.delta_d, g_d=cfg.g_d)
    basis = basis_for(params, res, p)
    which = ATOM_EXCITED if p == 1 else ATOM_EXCITED_DEFECT_LOADED
    psi0 = initial_state(basis, which)
    rhs = schrodinger_rhs(build_hamiltonian(params, res, basis))
    prop = PropagationConfig(t_max=cfg.t_max, dt=cfg.dt, sample_stride=cfg.sample_stride)
    traj = propagate(
        rhs,
        psi0,
        prop,
        obs=lambda _t, amps: record(basis, amps, include_excited_atom=cfg.inclusive_sector),
        max_detuning=detuning_scale(params, res),
    )
    return res, basis, traj


def _columns(traj, names):
    cols = [np.asarray(traj.times)]
    for name in names[1:]:
        cols.append(np.array([getattr(r, name) for r in traj.observables]))
    return cols


def _derived_block(cfg: RunConfig, res, basis=None) -> dict:
    block = {
        "k_const": solve_k(cfg.n_modes, 0.0, cfg.omega_u),
        "coupling_g": res.coupling_g,
        "vacuum_shift": res.vacuum_shift,
        "omega_max": float(res.frequencies[-1]),
    }
    if basis is not None:
        block["basis_size"] = basis.size
    return block


def _sidecar(cfg: RunConfig, columns, derived, extra=None) -> dict:
    payload = {
        "experiment": cfg.experiment,
        "config": dataclasses.asdict(cfg),
        "derived": derived,
        "csv_columns": list(columns),
        "version": __version__,
    }
    if extra:
        payload.update(extra)
    return payload


def run_decay(cfg: RunConfig) -> dict:
    """Single-excitation decay; CSV schema (t, p_excited, p_res_one, norm_sq, n_total)."""
    start = time.perf_counter()
    res, basis, traj = _propagate_experiment(cfg, p=1)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "run.csv", DECAY_COLUMNS, _columns(traj, DECAY_COLUMNS))
    sidecar = _sidecar(
        cfg,
        DECAY_COLUMNS,
        _derived_block(cfg, res, basis),
        extra={
            "n_samples": len(traj.times),
            "norm_drift_max": traj.norm_drift_max,
            "elapsed_seconds": time.perf_counter() - start,
        },
    )
    write_json(out / "run.json", sidecar)
    return sidecar


def run_two_photon(cfg: RunConfig) -> dict:
    """Two-excitation run from |e,1_d,0>; adds defect and pair-sector columns."""
    start = time.perf_counter()
    res, basis, traj = _propagate_experiment(cfg, p=2)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "run.csv", TWO_PHOTON_COLUMNS, _columns(traj, TWO_PHOTON_COLUMNS))
    sidecar = _sidecar(
        cfg,
        TWO_PHOTON_COLUMNS,
        _derived_block(cfg, res, basis),
        extra={
            "n_samples": len(traj.times),
            "norm_drift_max": traj.norm_drift_max,
            "elapsed_seconds": time.perf_counter() - start,
        },
    )
    write_json(out / "run.json", sidecar)
    return sidecar


def _oracle_on_samples(cfg: RunConfig):
    """Kernel reference on the run's sample grid, solved on a finer step."""
    sample_dt = cfg.dt * cfg.sample_stride
    refine = max(1, int(round(sample_dt / 5e-3)))
    h = sample_dt / refine
    n_samples = int(round(cfg.t_max / sample_dt))
    grid = np.arange(n_samples * refine + 1) * h
    amp = solve_decay_exact(KernelSpec(coupling_C=cfg.coupling_c, delta_o=cfg.delta_o), grid)
    pe = np.abs(amp) ** 2
    return grid[::refine], pe[::refine], h


def run_oracle(cfg: RunConfig) -> dict:
    """Memory-kernel reference; CSV schema (t, p_excited)."""
    start = time.perf_counter()
    spec = KernelSpec(coupling_C=cfg.coupling_c, delta_o=cfg.delta_o)
    n_steps = int(round(cfg.t_max / cfg.dt))
    grid = np.arange(n_steps + 1) * cfg.dt
    pe = np.abs(solve_decay_exact(spec, grid)) ** 2
    fine = np.abs(solve_decay_exact(spec, np.arange(2 * n_steps + 1) * (cfg.dt / 2.0))) ** 2
    refine_err = float(np.max(np.abs(pe - fine[::2]))) if n_steps else 0.0

    keep = np.arange(0, n_steps + 1, cfg.sample_stride)
    if n_steps and keep[-1] != n_steps:
        keep = np.append(keep, n_steps)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "run.csv", ORACLE_COLUMNS, [grid[keep], pe[keep]])
    sidecar = _sidecar(
        cfg,
        ORACLE_COLUMNS,
        {"refinement_error": refine_err},
        extra={
            "n_samples": len(keep),
            "elapsed_seconds": time.perf_counter() - start,
        },
    )
    write_json(out / "run.json", sidecar)
    return sidecar


def _convergence_member(args):
    """One N of the sweep; module-level so the process pool can pickle it."""
    cfg_dict, n = args
    cfg = config_from_dict(cfg_dict)
    cfg.n_modes = n
    res, basis, traj = _propagate_experiment(cfg, p=1)
    cols = _columns(traj, DECAY_COLUMNS)
    return n, cols, traj.norm_drift_max, _derived_block(cfg, res, basis)


def revival_time(times, pe_run, pe_ref, threshold=REVIVAL_THRESHOLD):
    """First time the run deviates from the reference by more than threshold."""
    dev = np.abs(np.asarray(pe_run) - np.asarray(pe_ref))
    hits = np.nonzero(dev > threshold)[0]
    return float(times[hits[0]]) if len(hits) else None


def run_convergence(cfg: RunConfig) -> dict:
    """Decay for each N in modes_list against the kernel reference.

    Writes run_N<k>.csv per member, oracle.csv, and summary.csv with the
    sup-norm deviation over [0, t_max] and the revival onset time (first
    deviation beyond 0.05; empty when it never happens).
    """
    start = time.perf_counter()
    n_steps = int(round(cfg.t_max / cfg.dt))
    if n_steps % cfg.sample_stride:
        raise ConfigError(
            "convergence needs the sample stride to divide the step count so the "
            "members and the reference share one grid"
        )
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)

    t_ref, pe_ref, h_ref = _oracle_on_samples(cfg)
    write_csv(out / "oracle.csv", ORACLE_COLUMNS, [t_ref, pe_ref])

    base = dataclasses.asdict(cfg)
    members = [(base, int(n)) for n in cfg.modes_list]
    jobs = cfg.jobs or min(len(members), os.cpu_count() or 1)
    if jobs > 1 and len(members) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_convergence_member, members))
    else:
        results = [_convergence_member(m) for m in members]

    sup_devs, t_revs, per_n = [], [], {}
    for n, cols, drift, derived in results:
        write_csv(out / f"run_N{n}.csv", DECAY_COLUMNS, cols)
        times, pe = cols[0], cols[1]
        if len(times) != len(t_ref):
            raise IntegrationError("convergence member grid does not match the reference")
        dev = np.abs(pe - pe_ref)
        sup_devs.append(float(dev.max()))
        t_revs.append(revival_time(times, pe, pe_ref))
        per_n[str(n)] = {"norm_drift_max": drift, **derived}

    lines = [",".join(SUMMARY_COLUMNS)]
    for n, sup, trev in zip(cfg.modes_list, sup_devs, t_revs):
        lines.append(f"{n},{_fmt(sup)},{_fmt(trev) if trev is not None else ''}")
    (out / "summary.csv").write_text("\n".join(lines) + "\n")

    sidecar = _sidecar(
        cfg,
        DECAY_COLUMNS,
        {"oracle_step": h_ref, "members": per_n},
        extra={
            "sup_dev": dict(zip(map(str, cfg.modes_list), sup_devs)),
            "t_rev": dict(zip(map(str, cfg.modes_list), t_revs)),
            "elapsed_seconds": time.perf_counter() - start,
        },
    )
    write_json(out / "run.json", sidecar)
    return sidecar


RUNNERS = {
    "decay": run_decay,
    "two-photon": run_two_photon,
    "convergence": run_convergence,
    "oracle": run_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat key = value configuration file")
    shared.add_argument("--modes", help="mode count (comma list for convergence)")
    shared.add_argument("--omega-u", type=float, help="upper cutoff of the discretized band")
    shared.add_argument("--delta-seed", type=float, help="offset of the first mode above the edge")
    shared.add_argument(
        "--scheme", choices=[s.value for s in Scheme], help="mode ladder recursion"
    )
    shared.add_argument("--delta0", type=float, help="atomic detuning from the band edge")
    shared.add_argument("--deltad", type=float, help="defect detuning from the band edge")
    shared.add_argument("--gd", type=float, help="atom-defect coupling")
    shared.add_argument("--tmax", type=float, help="end time")
    shared.add_argument("--dt", type=float, help="integrator step")
    shared.add_argument("--stride", type=int, help="output every k-th step")
    shared.add_argument("--coupling-c", type=float, help="effective coupling C (display units)")
    shared.add_argument("--out", help="output directory")
    shared.add_argument(
        "--no-shift",
        action="store_true",
        help="drop the vacuum shift from the eliminated high-frequency modes",
    )
    shared.add_argument(
        "--sector-def",
        choices=["inclusive", "exclusive"],
        help="count excited-atom states in the one-photon reservoir sector or not",
    )
    shared.add_argument("--max-states", type=int, help="refuse runs above this sector size")
    shared.add_argument("--jobs", type=int, help="concurrent sweep members (convergence)")

    parser = argparse.ArgumentParser(
        prog="pbgsim",
        description="Band-edge reservoir dynamics on a discretized continuum",
    )
    parser.add_argument("--version", action="version", version=f"pbgsim {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[shared], help=f"run the {name} experiment")
    return parser


def _cli_entries(args: argparse.Namespace) -> dict:
    entries = {
        "omega_u": args.omega_u,
        "delta_seed": args.delta_seed,
        "scheme": args.scheme,
        "delta_o": args.delta0,
        "delta_d": args.deltad,
        "g_d": args.gd,
        "t_max": args.tmax,
        "dt": args.dt,
        "sample_stride": args.stride,
        "coupling_c": args.coupling_c,
        "out": args.out,
        "max_states": args.max_states,
        "jobs": args.jobs,
    }
    if args.modes is not None:
        if args.experiment == "convergence":
            entries["modes_list"] = tuple(int(x) for x in args.modes.split(","))
        else:
            entries["n_modes"] = int(args.modes)
    if args.no_shift:
        entries["include_shift"] = False
    if args.sector_def is not None:
        entries["inclusive_sector"] = args.sector_def == "inclusive"
    return entries


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_entries = read_config_file(args.config) if args.config else {}
        cfg = resolve_config(args.experiment, file_entries, _cli_entries(args))
        RUNNERS[cfg.experiment](cfg)
    except (ValueError, OSError) as exc:
        print(f"pbgsim: configuration error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"pbgsim: numerical failure: {exc}", file=sys.stderr)
        return 3
    out = Path(cfg.out)
    print(f"{cfg.experiment}: wrote {out / 'run.csv'} and {out / 'run.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
