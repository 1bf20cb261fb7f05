"""Run orchestration: one function per command, sweeps, and artifact emission.

Each ``compute_*`` returns ``(results, tables, summary)``: a JSON-ready
results dict for the manifest, CSV tables keyed by file name, and the scalar
row a sweep records.
"""
from __future__ import annotations

import copy
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from types import SimpleNamespace

import numpy as np

from . import __version__
from .cavity import CavityParams, frequency_grid, rabi_peaks, single_excitation_spectrum
from .chain import ChainParams, evolve, init_from_profile
from .config import SCHEMAS, RunConfig, _check_block, _coerce, resolve_axis
from .core import Polynomial
from .errors import MtCavityError, NoConnection, OutputError
from .estimator import EstimateInputs, calibrated_inputs, full_report
from .io import write_csv, write_json
from .quantum import SmearingKernel, corrected_kink
from .travelwave import (
    export_grid,
    logistic_kink,
    match_logistic,
    phi4_potential,
    reduce_to_ode,
    residual,
    shoot,
    tanh_kink,
)

SWEEP_COLUMNS = {
    "simulate": ("front_speed", "energy_drift", "max_abs_change"),
    "travelwave": ("rho", "residual"),
    "correct": ("iterations", "converged", "amplitude"),
    "spectrum": ("splitting", "peak_minus", "peak_plus"),
    "estimate": ("lambda_MT", "E_c", "d_dimer"),
}


def build_potential(spec, scale: float = 1.0) -> Polynomial:
    if spec == "phi4":
        U = phi4_potential()
    elif spec == "nagumo":
        # U' = -2 u (1 - u)(u - 1/4)
        U = Polynomial([0.0, 0.5, -2.5, 2.0]).integral()
    else:
        U = Polynomial(spec)
    return U.scale(scale)


def _model(blk) -> SimpleNamespace:
    return SimpleNamespace(
        potential=build_potential(blk["potential"], blk["potential_scale"]),
        gamma=blk["gamma"],
        force=blk["force"],
    )


def _classical_kink(problem, velocity, method="auto", tol=1e-8, speed_selection=False):
    if method in ("auto", "match") and not speed_selection:
        prof = match_logistic(problem, velocity)
        if prof is not None:
            prof.info.setdefault("xi_max", 40.0 / prof.info["k"])
            return prof
        if method == "match":
            raise NoConnection("NoMatch: no logistic kink exists for this problem")
    return shoot(problem, tol, speed_selection, velocity)


def _profile_table(profile, n):
    xi = export_grid(profile, n)
    return xi, {"profile.csv": (("xi", "u"), np.column_stack([xi, profile(xi)]))}


def compute_simulate(cfg: RunConfig, blk: dict):
    model = _model(blk)
    params = ChainParams(model.potential, blk["gamma"], blk["force"], blk["dx"], blk["dt"], blk["boundary"])
    n_nodes = int(round(2.0 * blk["half_width"] / blk["dx"])) + 1
    init = blk["initial"]
    v = blk["velocity"]
    if init == "constant":
        profile = blk["constant"]
    elif init == "tanh":
        profile = tanh_kink(*blk["params"], velocity=v)
    elif init == "logistic":
        profile = logistic_kink(*blk["params"], velocity=v)
    else:
        problem = reduce_to_ode(model, v)
        profile = _classical_kink(problem, v)
    state = init_from_profile(profile, n_nodes, blk["dx"], blk["center"])
    traj = evolve(state, params, blk["t_final"], blk["stride"], blk["level"], cfg.dump_stride)
    final = traj.final
    e = np.asarray(traj.energies)
    results = {
        "n_nodes": n_nodes,
        "dt_used": blk["t_final"] / max(1, math.ceil(blk["t_final"] / blk["dt"] - 1e-9)),
        "t_final": final.t,
        "level": traj.level,
        "front_initial": traj.fronts[0],
        "front_final": traj.fronts[-1],
        "front_speed": traj.front_speed(blk["speed_skip"]),
        "energy_initial": float(e[0]),
        "energy_final": float(e[-1]),
        "energy_drift": traj.energy_drift(),
        "energy_nonincreasing": bool(np.all(np.diff(e) <= 1e-12 * max(1.0, abs(e[0])))),
        "max_abs_change": float(np.max(np.abs(final.u - state.u))),
    }
    if not isinstance(profile, float):
        rigid = np.asarray(profile(final.x - blk["center"] - v * final.t))
        results["shape_error"] = float(np.max(np.abs(final.u - rigid)))
    tables = {"trajectory.csv": (("t", "front", "energy", "maxu"), traj.rows())}
    for i, (t, x, u, ud) in enumerate(traj.dumps):
        tables[f"dumps/dump_{i:05d}.csv"] = (("x", "u", "udot"), np.column_stack([x, u, ud]))
    summary = {k: results[k] for k in SWEEP_COLUMNS["simulate"]}
    return results, tables, summary


def _travel_problem(blk):
    model = _model(blk)
    return reduce_to_ode(model, blk["velocity"], tuple(blk["interval"]), blk["descending"])


def compute_travelwave(cfg: RunConfig, blk: dict):
    problem = _travel_problem(blk)
    prof = _classical_kink(problem, blk["velocity"], blk["method"], blk["tol"], blk["speed_selection"])
    rho = prof.info.get("rho", problem.rho)
    xi, tables = _profile_table(prof, blk["n_samples"])
    res = residual(prof, problem.with_rho(rho), xi)
    results = {
        "family": prof.family,
        "params": list(prof.params),
        "rho": rho,
        "velocity": prof.velocity,
        "asymptotes": list(prof.asymptotes),
        "residual": res,
        "xi_max": prof.info.get("xi_max"),
        "P": problem.P.to_list(),
    }
    for k in ("defect", "mode", "takeoff_offset"):
        if k in prof.info:
            results[k] = prof.info[k]
    return results, tables, {"rho": rho, "residual": res}


def compute_correct(cfg: RunConfig, blk: dict):
    problem = _travel_problem(blk)
    initial = _classical_kink(problem, blk["velocity"])
    if blk["kernel"] == "uniform":
        kernel = SmearingKernel.uniform(blk["sigma2"])
    else:
        kernel = SmearingKernel.sech2_bump(blk["amplitude"], blk["width"], blk["base"])
    prof = corrected_kink(initial, kernel, problem, blk["max_iter"], blk["tol"])
    a, b = prof.info["corrected_asymptotes"]
    _, tables = _profile_table(prof, blk["n_samples"])
    results = {
        "kernel_kind": prof.info["kernel_kind"],
        "iterations": prof.info["iterations"],
        "converged": prof.info["converged"],
        "last_change": prof.info["last_change"],
        "asymptotes": [a, b],
        "amplitude": abs(b - a),
        "rho": prof.info.get("rho"),
        "xi_max": prof.info.get("xi_max"),
    }
    summary = {k: results[k] for k in SWEEP_COLUMNS["correct"]}
    return results, tables, summary


def compute_spectrum(cfg: RunConfig, blk: dict):
    omega_c = blk["omega_c"] if blk["omega_c"] is not None else blk["omega0"] + blk["detuning"]
    p = CavityParams(blk["omega0"], omega_c, blk["lam"], blk["n_emitters"], blk["quality"], blk["sign_convention"])
    grid = frequency_grid(p, blk["n_points"], blk["span"])
    oracle = single_excitation_spectrum(p, grid)
    formula = rabi_peaks(p)
    paper, standard = rabi_peaks(p, "paper"), rabi_peaks(p, "standard")
    discrepancy = max(abs(x - y) for x, y in zip(paper.peaks, standard.peaks))
    results = {
        "N": p.n_emitters,
        "omega0": p.omega0,
        "omega_c": p.omega_c,
        "detuning": p.detuning,
        "lambda": p.lam,
        "kappa": p.linewidth,
        "curve_width": oracle.linewidth,
        "peaks": list(oracle.peaks),
        "weights": list(oracle.weights),
        "splitting": oracle.splitting,
        "convention": formula.convention,
        "formula_peaks": list(formula.peaks),
        "formula_weights": list(formula.weights),
        "paper_peaks": list(paper.peaks),
        "standard_peaks": list(standard.peaks),
        "convention_discrepancy": discrepancy,
    }
    tables = {"spectrum.csv": (("omega", "absorption"), np.column_stack([oracle.omega, oracle.absorption]))}
    summary = {"splitting": oracle.splitting, "peak_minus": oracle.peaks[0], "peak_plus": oracle.peaks[1]}
    return results, tables, summary


def compute_estimate(cfg: RunConfig, blk: dict):
    kwargs = {k: v for k, v in blk.items() if k != "calibrated" and v is not None}
    kwargs["collapse_range"] = tuple(kwargs["collapse_range"])
    inputs = calibrated_inputs(**kwargs) if blk["calibrated"] else EstimateInputs(**kwargs)
    report = full_report(inputs)
    results = report.to_dict()
    results["inputs_used"] = {
        "cavity_volume": inputs.cavity_volume,
        "n_coherent": inputs.n_coherent,
        "calibrated": blk["calibrated"],
    }
    summary = {k: report.value(k) for k in SWEEP_COLUMNS["estimate"]}
    return results, {}, summary


COMPUTE = {
    "simulate": compute_simulate,
    "travelwave": compute_travelwave,
    "correct": compute_correct,
    "spectrum": compute_spectrum,
    "estimate": compute_estimate,
}


def _error_record(exc: BaseException) -> dict:
    return {"type": type(exc).__name__, "message": str(exc)}


def _sweep_row(args):
    cfg, target, key, value = args
    try:
        blk = copy.deepcopy(cfg.blocks[target])
        blk[key] = _coerce(f"{target}.{key}", SCHEMAS[target][key][0], value)
        _check_block(target, blk)
        _, _, summary = COMPUTE[target](cfg, blk)
        return summary, ""
    except Exception as exc:  # recorded per row, sweep continues
        return {}, f"{type(exc).__name__}: {exc}"


def compute_sweep(cfg: RunConfig, blk: dict, workers: int = 1):
    target, key = resolve_axis(cfg, blk["axis"])
    values = blk["values"]
    jobs = [(cfg, target, key, v) for v in values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            outcomes = list(pool.map(_sweep_row, jobs))
    else:
        outcomes = [_sweep_row(j) for j in jobs]
    cols = SWEEP_COLUMNS[target]
    rows = []
    for i, (v, (summary, err)) in enumerate(zip(values, outcomes)):
        rows.append([i, v] + [summary.get(c, "") for c in cols] + [err])
    header = ("index", key) + cols + ("error",)
    results = {
        "target": target,
        "axis": f"{target}.{key}",
        "n_rows": len(rows),
        "n_failed": sum(1 for _, err in outcomes if err),
    }
    if target == "spectrum" and not results["n_failed"]:
        ns = np.asarray([r[1] for r in rows], dtype=float)
        sp = np.asarray([r[2] for r in rows], dtype=float)
        if key == "n_emitters" and len(set(ns)) >= 2 and np.all(sp > 0):
            results["fitted_exponent"] = float(np.polyfit(np.log(ns), np.log(sp), 1)[0])
    return results, {"sweep.csv": (header, rows)}, {}


def _echo(cfg: RunConfig) -> dict:
    d = cfg.to_dict()
    d.pop("output_dir", None)
    if "sweep" in d:
        d["sweep"].pop("workers", None)
    return d


def run(cfg: RunConfig, output_dir: str | None = None, workers: int | None = None) -> int:
    """Execute ``cfg``, write artifacts, return the exit status."""
    out = output_dir or cfg.output_dir
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out!r}: {exc}") from exc
    t0 = time.perf_counter()
    manifest = {"command": cfg.command, "config": _echo(cfg), "version": __version__}
    status = 0
    tables = {}
    try:
        blk = cfg.blocks[cfg.command]
        if cfg.command == "sweep":
            w = workers if workers is not None else blk["workers"]
            results, tables, _ = compute_sweep(cfg, blk, w)
        else:
            results, tables, _ = COMPUTE[cfg.command](cfg, blk)
        manifest.update(status="ok", error=None, results=results)
    except MtCavityError as exc:
        manifest.update(status="error", error=_error_record(exc), results=None)
        status = exc.exit_code
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        manifest.update(status="error", error=_error_record(exc), results=None)
        status = 3
    try:
        for name, (header, rows) in tables.items():
            write_csv(os.path.join(out, name), header, rows)
        write_json(os.path.join(out, "manifest.json"), manifest)
        info = {"wall_time_s": time.perf_counter() - t0, "output_dir": os.path.abspath(out), "workers": workers}
        write_json(os.path.join(out, "run_info.json"), info)
    except OSError as exc:
        raise OutputError(f"writing artifacts failed: {exc}") from exc
    return status
