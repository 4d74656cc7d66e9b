"""Command-line front end: configs, runs, sweeps, bounds, and refinement studies.

This is the only module that touches the filesystem.  Everything numerical is
delegated to the pure modules; what lives here is INI parsing with strict key
checking, artifact emission (timeseries.csv, summary.json, sweep.json), and
the exit-code contract: 0 clean, 2 numerical failure, 3 monitor violation.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import diagnostics, flow, tubegeom
from .grid import GridError, RadialProfile, constant_profile, cosine_profile
from .quadrature import QuadratureError
from .symspace import (
    SpaceError,
    SpaceParams,
    catalog_entries,
    catalog_lookup,
    focal_radius,
)

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_config",
    "cmd_run",
    "cmd_sweep",
    "cmd_bounds",
    "cmd_cmc_search",
    "cmd_refine",
    "cmd_catalog",
    "main",
]

CSV_HEADER = "t,r_min,r_max,hbar,vol_d,vol_m,vhat_max,bound63_ok,bound65_ok,vhat_bound_ok"

LAP_MODES = ("paper61", "full")
SIGN_MODES = ("eq250", "eq34")
INIT_KINDS = ("const", "cosine")
FORMATS = ("csv", "json")
SWEEP_AXES = ("r0", "amplitude", "rb")
REFINE_NS = (100, 200, 400)

_SECTION_KEYS = {
    "space": {"name", "epsilon", "b", "k0", "mv1", "mv2", "mh0", "mh1", "mh2"},
    "base": {"rb", "density0", "density1", "density2"},
    "init": {"kind", "r0", "amplitude"},
    "solver": {"n", "scheme", "cfl", "lap_mode", "sign_mode"},
    "stop": {"t_max", "r_stop", "tol_cmc"},
    "output": {"dir", "stride", "formats"},
}


class ConfigError(ValueError):
    """A run configuration that cannot be parsed or validated."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration; r_stop stays None until bounds exist."""

    space: SpaceParams
    rb: float
    init_kind: str
    r0: float
    amplitude: float
    n: int
    scheme: str
    cfl: float
    lap_mode: str
    sign_mode: str
    t_max: float
    r_stop: float | None
    tol_cmc: float
    out_dir: str
    stride: int
    formats: tuple[str, ...]


# -- parsing ---------------------------------------------------------------------


def _to_float(label: str, raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"{label} must be a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{label} must be finite, got {raw!r}")
    return v


def _to_int(label: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{label} must be an integer, got {raw!r}") from None


def _choice(label: str, raw: str, allowed: tuple[str, ...]) -> str:
    if raw not in allowed:
        raise ConfigError(f"{label} must be one of {', '.join(allowed)}; got {raw!r}")
    return raw


def _build_space(sec: dict[str, str]) -> SpaceParams:
    if "name" in sec:
        extra = sorted(set(sec) - {"name", "b"})
        if extra:
            raise ConfigError(f"space.name cannot be combined with space.{extra[0]}")
        entry = catalog_lookup(sec["name"])
        if entry.informational:
            raise ConfigError(
                f"catalog entry {entry.name!r} carries no numeric multiplicities; "
                "give epsilon/b/mv*/mh* explicitly"
            )
        params = entry.params
        if "b" in sec:
            params = dataclasses.replace(params, b=_to_float("space.b", sec["b"]))
        return params
    if "epsilon" not in sec:
        raise ConfigError("space needs either space.name or space.epsilon")
    eps = _to_int("space.epsilon", sec["epsilon"])
    mv = {k: _to_int(f"space.mv{k}", sec[f"mv{k}"]) for k in (1, 2) if f"mv{k}" in sec}
    mh = {k: _to_int(f"space.mh{k}", sec[f"mh{k}"]) for k in (0, 1, 2) if f"mh{k}" in sec}
    b = _to_float("space.b", sec["b"]) if "b" in sec else 1.0
    k0 = _to_int("space.k0", sec["k0"]) if "k0" in sec else 1
    return SpaceParams(epsilon=eps, b=b, mv=mv, mh=mh, k0=k0)


def _apply_density(space: SpaceParams, sec: dict[str, str]) -> SpaceParams:
    keys = [k for k in (0, 1, 2) if f"density{k}" in sec]
    if not keys:
        return space
    pairs = tuple(
        (k, m)
        for k in keys
        if (m := _to_int(f"base.density{k}", sec[f"density{k}"])) > 0
    )
    if not pairs:
        raise ConfigError("base.density* must keep at least one positive multiplicity")
    return dataclasses.replace(space, density=pairs)


def parse_config(text: str) -> RunConfig:
    """Parse and validate one INI run configuration.

    Unknown sections and keys are rejected by name; every value is range
    checked so later stages can assume a sane config.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    if cp.defaults():
        raise ConfigError("a DEFAULT section is not supported; use named sections")
    sections: dict[str, dict[str, str]] = {}
    for name in cp.sections():
        if name not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{name}]")
        sec = dict(cp.items(name))
        for key in sec:
            if key not in _SECTION_KEYS[name]:
                raise ConfigError(f"unknown key {name}.{key}")
        sections[name] = sec

    for required in ("space", "base", "init"):
        if required not in sections:
            raise ConfigError(f"missing required section [{required}]")
    space_sec = sections["space"]
    base = sections["base"]
    init = sections["init"]
    solver = sections.get("solver", {})
    stop = sections.get("stop", {})
    output = sections.get("output", {})

    try:
        space = _apply_density(_build_space(space_sec), base)
    except SpaceError as exc:
        raise ConfigError(str(exc)) from None

    if "rb" not in base:
        raise ConfigError("base.rb is required")
    rb = _to_float("base.rb", base["rb"])
    if "r0" not in init:
        raise ConfigError("init.r0 is required")
    r0 = _to_float("init.r0", init["r0"])
    amplitude = _to_float("init.amplitude", init["amplitude"]) if "amplitude" in init else 0.0
    kind = _choice("init.kind", init.get("kind", "cosine"), INIT_KINDS)

    formats_raw = output.get("formats", "csv,json")
    formats = tuple(
        dict.fromkeys(
            _choice("output.formats", part.strip(), FORMATS)
            for part in formats_raw.split(",")
            if part.strip()
        )
    )
    if not formats:
        raise ConfigError("output.formats must name csv and/or json")

    cfg = RunConfig(
        space=space,
        rb=rb,
        init_kind=kind,
        r0=r0,
        amplitude=amplitude,
        n=_to_int("solver.n", solver["n"]) if "n" in solver else 200,
        scheme=_choice("solver.scheme", solver.get("scheme", "rk4"), flow.SCHEMES),
        cfl=_to_float("solver.cfl", solver["cfl"]) if "cfl" in solver else 0.2,
        lap_mode=_choice("solver.lap_mode", solver.get("lap_mode", "paper61"), LAP_MODES),
        sign_mode=_choice("solver.sign_mode", solver.get("sign_mode", "eq250"), SIGN_MODES),
        t_max=_to_float("stop.t_max", stop["t_max"]) if "t_max" in stop else 1.0,
        r_stop=_to_float("stop.r_stop", stop["r_stop"]) if "r_stop" in stop else None,
        tol_cmc=_to_float("stop.tol_cmc", stop["tol_cmc"]) if "tol_cmc" in stop else 1e-8,
        out_dir=output.get("dir", "out"),
        stride=_to_int("output.stride", output.get("stride", "10")),
        formats=formats,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.rb <= 0:
        raise ConfigError(f"base.rb must be positive, got {cfg.rb}")
    if cfg.r0 <= 0:
        raise ConfigError(f"init.r0 must be positive, got {cfg.r0}")
    if cfg.amplitude < 0:
        raise ConfigError(f"init.amplitude must be nonnegative, got {cfg.amplitude}")
    if cfg.init_kind == "const" and cfg.amplitude != 0.0:
        raise ConfigError("init.amplitude must be 0 when init.kind=const")
    if cfg.amplitude >= cfg.r0:
        raise ConfigError(
            f"init amplitude {cfg.amplitude} must be smaller than init.r0 {cfg.r0} "
            "to keep the profile positive"
        )
    rf = focal_radius(cfg.space)
    if cfg.r0 + cfg.amplitude >= rf:
        raise ConfigError(
            f"initial radius r0+amplitude={cfg.r0 + cfg.amplitude} reaches the focal "
            f"radius {rf:.6g} of this space"
        )
    if cfg.space.epsilon == 1:
        ks = [k for k, m in cfg.space.density_pairs if k > 0 and m > 0]
        if ks:
            z_zero = min(math.pi / (k * cfg.space.b) for k in ks)
            if cfg.rb >= z_zero:
                raise ConfigError(
                    f"base.rb={cfg.rb} reaches the first zero of the base density at {z_zero:.6g}"
                )
    if cfg.n < 16 or cfg.n % 2:
        raise ConfigError(f"solver.n must be an even integer >= 16, got {cfg.n}")
    if not 0.0 < cfg.cfl <= 0.5:
        raise ConfigError(f"solver.cfl must lie in (0, 0.5], got {cfg.cfl}")
    if cfg.t_max <= 0:
        raise ConfigError(f"stop.t_max must be positive, got {cfg.t_max}")
    if cfg.r_stop is not None and cfg.r_stop <= 0:
        raise ConfigError(f"stop.r_stop must be positive, got {cfg.r_stop}")
    if cfg.tol_cmc <= 0:
        raise ConfigError(f"stop.tol_cmc must be positive, got {cfg.tol_cmc}")
    if cfg.stride < 1:
        raise ConfigError(f"output.stride must be >= 1, got {cfg.stride}")


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# -- run assembly -----------------------------------------------------------------


def _initial_profile(cfg: RunConfig) -> RadialProfile:
    try:
        if cfg.init_kind == "const":
            return constant_profile(cfg.rb, cfg.n, cfg.r0)
        return cosine_profile(cfg.rb, cfg.n, cfg.r0, cfg.amplitude)
    except GridError as exc:
        raise ConfigError(str(exc)) from None


def _prepare(cfg: RunConfig):
    """Initial profile, static bounds (when defined), monitors and flow config."""
    profile = _initial_profile(cfg)
    bounds = None
    if cfg.space.invariant_mode:
        try:
            bounds = tubegeom.bounds_report(
                cfg.space, profile, sign_mode=cfg.sign_mode, lap_mode=cfg.lap_mode
            )
        except QuadratureError:
            bounds = None
    if bounds is None:
        monitors = flow.MonitorInputs.disabled()
    else:
        hyper = cfg.space.epsilon == -1
        monitors = flow.MonitorInputs(
            prop63_bound=bounds.prop63_bound,
            vol_b=tubegeom.vol_b(cfg.space, cfg.rb),
            vol_m0=tubegeom.vol_m(cfg.space, profile),
            check63=True,
            check65=hyper,
            check_vhat=hyper,
        )
    if cfg.r_stop is not None:
        r_stop = cfg.r_stop
    elif bounds is not None and math.isfinite(bounds.r_hat1) and bounds.r_hat1 > 0:
        r_stop = 1e-3 * bounds.r_hat1
    else:
        r_stop = 1e-3 * float(profile.r.min())
    fc = flow.FlowConfig(
        space=cfg.space,
        lap_mode=cfg.lap_mode,
        sign_mode=cfg.sign_mode,
        scheme=cfg.scheme,
        cfl=cfg.cfl,
        t_max=cfg.t_max,
        r_stop=r_stop,
        tol_cmc=cfg.tol_cmc,
        stride=cfg.stride,
    )
    return profile, bounds, monitors, fc


def _echo_config(cfg: RunConfig, r_stop: float) -> dict:
    s = cfg.space
    return {
        "space": {
            "epsilon": s.epsilon,
            "b": s.b,
            "mv": [list(p) for p in s.mv],
            "mh": [list(p) for p in s.mh],
            "k0": s.k0,
            "density": None if s.density is None else [list(p) for p in s.density],
        },
        "base": {"rb": cfg.rb},
        "init": {"kind": cfg.init_kind, "r0": cfg.r0, "amplitude": cfg.amplitude},
        "solver": {
            "n": cfg.n,
            "scheme": cfg.scheme,
            "cfl": cfg.cfl,
            "lap_mode": cfg.lap_mode,
            "sign_mode": cfg.sign_mode,
        },
        "stop": {"t_max": cfg.t_max, "r_stop": r_stop, "tol_cmc": cfg.tol_cmc},
        "output": {"dir": cfg.out_dir, "stride": cfg.stride, "formats": list(cfg.formats)},
    }


def _row_line(row: flow.Row) -> str:
    vals = [
        repr(row.t),
        repr(row.r_min),
        repr(row.r_max),
        repr(row.hbar),
        repr(row.vol_d),
        repr(row.vol_m),
        repr(row.vhat_max),
    ]
    vals += ["true" if ok else "false" for ok in (row.bound63_ok, row.bound65_ok, row.vhat_bound_ok)]
    return ",".join(vals)


def _write_csv(path: str, rows: list) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(_row_line(row) + "\n")


def _collect_audits(result: flow.RunResult, fc: flow.FlowConfig) -> list[dict]:
    if result.outcome not in (flow.FlowOutcome.CONVERGED_CMC, flow.FlowOutcome.MAX_TIME_REACHED):
        return []
    ctx = flow.build_audit_context(result.final_state, fc)
    if ctx is None:
        return []
    reports = []
    for which in diagnostics.AUDIT_IDS:
        # diagnostics must never take a run down with them
        try:
            reports.append(diagnostics.residual_audit(which, ctx).to_flat_dict())
        except (ValueError, FloatingPointError):
            continue
    return reports


def _exit_code(result: flow.RunResult) -> int:
    if result.outcome is flow.FlowOutcome.NUMERICAL_FAILURE:
        return 2
    if not result.monitors_ok:
        return 3
    return 0


def _execute_run(cfg: RunConfig, outdir: str) -> tuple[int, dict]:
    """Run one flow, write the requested artifacts, return (exit code, summary)."""
    t0 = time.perf_counter()
    profile, bounds, monitors, fc = _prepare(cfg)
    result = flow.run(fc, profile, monitors)
    rows = result.rows
    summary = {
        "command": "run",
        "outcome": result.outcome.value,
        "message": result.message,
        "steps": result.steps,
        "t_final": result.final_state.t,
        "config": _echo_config(cfg, fc.r_stop),
        "observed": {
            "beta1": result.beta1,
            "beta2": result.beta2,
            "hbar_min": result.hbar_min,
            "hbar_max": result.hbar_max,
        },
        "monitors": {
            "enabled": {
                "bound63": monitors.check63,
                "bound65": monitors.check65,
                "vhat_bound": monitors.check_vhat,
            },
            "bound63_ok": all(r.bound63_ok for r in rows),
            "bound65_ok": all(r.bound65_ok for r in rows),
            "vhat_bound_ok": all(r.vhat_bound_ok for r in rows),
        },
        "bounds": None if bounds is None else bounds.to_flat_dict(),
        "final_profile": {
            "rb": result.final_state.profile.rb,
            "n": result.final_state.profile.n,
            "r": [float(v) for v in result.final_state.profile.r],
        },
        "audits": _collect_audits(result, fc),
        "series_file": "timeseries.csv" if "csv" in cfg.formats else None,
        "meta": {
            "wall_time_s": round(time.perf_counter() - t0, 6),
            "out_dir": os.path.abspath(outdir),
        },
    }
    os.makedirs(outdir, exist_ok=True)
    if "csv" in cfg.formats:
        _write_csv(os.path.join(outdir, "timeseries.csv"), rows)
    if "json" in cfg.formats:
        with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return _exit_code(result), summary


def cmd_run(cfg: RunConfig, outdir: str | None = None) -> int:
    out = outdir if outdir is not None else cfg.out_dir
    code, summary = _execute_run(cfg, out)
    print(f"run: outcome={summary['outcome']} steps={summary['steps']} exit={code} -> {out}")
    return code


# -- sweeps -----------------------------------------------------------------------


def _parse_grid(spec: str) -> list[tuple[str, list[float]]]:
    axes: list[tuple[str, list[float]]] = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        key, eq, raw = part.partition("=")
        key = key.strip()
        if not eq:
            raise ConfigError(f"sweep axis {part!r} must look like key=v1,v2,...")
        if key not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}; got {key!r}")
        try:
            values = [float(x) for x in raw.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"sweep axis {key} has a non-numeric value in {raw!r}") from None
        if not values:
            raise ConfigError(f"sweep axis {key} needs at least one value")
        axes.append((key, values))
    if not 1 <= len(axes) <= 2:
        raise ConfigError("sweep needs one or two axes")
    if len({k for k, _ in axes}) != len(axes):
        raise ConfigError("sweep axes must be distinct")
    return axes


def _thread_cap(n_cells: int) -> int:
    raw = os.environ.get("TUBEFLOW_THREADS")
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(f"TUBEFLOW_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(n_cells, cap))


def _sweep_cell(payload: tuple[RunConfig, int, int, str]) -> dict:
    """One isolated sweep cell; every failure is folded into the row."""
    cfg, i, j, outdir = payload
    cell = f"cell_{i}_{j}"
    try:
        _validate(cfg)
        code, summary = _execute_run(cfg, outdir)
        return {
            "cell": cell,
            "params": {"r0": cfg.r0, "amplitude": cfg.amplitude, "rb": cfg.rb},
            "outcome": summary["outcome"],
            "steps": summary["steps"],
            "t_final": summary["t_final"],
            "observed": summary["observed"],
            "monitors": {
                "bound63_ok": summary["monitors"]["bound63_ok"],
                "bound65_ok": summary["monitors"]["bound65_ok"],
                "vhat_bound_ok": summary["monitors"]["vhat_bound_ok"],
            },
            "exit_code": code,
        }
    except Exception as exc:  # noqa: BLE001
        return {
            "cell": cell,
            "params": {"r0": cfg.r0, "amplitude": cfg.amplitude, "rb": cfg.rb},
            "outcome": "error",
            "message": str(exc),
            "exit_code": 2,
        }


def cmd_sweep(cfg: RunConfig, grid_spec: str, outdir: str | None = None) -> int:
    axes = _parse_grid(grid_spec)
    base_out = outdir if outdir is not None else cfg.out_dir
    first_key, first_vals = axes[0]
    second = axes[1] if len(axes) == 2 else None
    payloads = []
    for i, v1 in enumerate(first_vals):
        inner = second[1] if second else [None]
        for j, v2 in enumerate(inner):
            updates: dict = {first_key: v1, "out_dir": os.path.join(base_out, f"cell_{i}_{j}")}
            if second is not None:
                updates[second[0]] = v2
            derived = dataclasses.replace(cfg, **updates)
            payloads.append((derived, i, j, updates["out_dir"]))

    workers = _thread_cap(len(payloads))
    if workers <= 1:
        results = [_sweep_cell(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_cell, payloads))

    codes = [row["exit_code"] for row in results]
    code = 2 if 2 in codes else (3 if 3 in codes else 0)
    os.makedirs(base_out, exist_ok=True)
    aggregate = {
        "command": "sweep",
        "grid": {key: vals for key, vals in axes},
        "cells": results,
        "exit_code": code,
    }
    with open(os.path.join(base_out, "sweep.json"), "w", encoding="utf-8") as fh:
        json.dump(aggregate, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for row in results:
        detail = row.get("message", "") or f"steps={row.get('steps', 0)}"
        print(f"{row['cell']}: outcome={row['outcome']} exit={row['exit_code']} {detail}")
    print(f"sweep: cells={len(results)} exit={code} -> {base_out}")
    return code


# -- one-shot reports --------------------------------------------------------------


def cmd_bounds(cfg: RunConfig) -> int:
    cfg.space.require_invariant("the bounds report")
    profile = _initial_profile(cfg)
    report = tubegeom.bounds_report(
        cfg.space, profile, sign_mode=cfg.sign_mode, lap_mode=cfg.lap_mode
    )
    print(json.dumps(report.to_flat_dict(), indent=2, sort_keys=True))
    return 0


def cmd_cmc_search(cfg: RunConfig, hstar: float) -> int:
    if cfg.space.epsilon != -1:
        raise ConfigError("cmc-search is defined for epsilon=-1 spaces only")
    if not (math.isfinite(hstar) and hstar > 0):
        raise ConfigError(f"--hstar must be a positive number, got {hstar}")
    profile = flow.cmc_search(
        cfg.space,
        cfg.rb,
        hstar,
        shoot_from=cfg.r0,
        n=cfg.n,
        lap_mode=cfg.lap_mode,
        sign_mode=cfg.sign_mode,
    )
    out: dict = {
        "command": "cmc-search",
        "hstar": hstar,
        "shoot_from": cfg.r0,
        "rb": cfg.rb,
        "n": cfg.n,
        "lap_mode": cfg.lap_mode,
        "sign_mode": cfg.sign_mode,
        "found": profile is not None,
    }
    if profile is not None:
        r0 = float(profile.r[0])
        out["r0"] = r0
        out["rim_radius"] = float(profile.r[-1])
        out["max_h_dev"] = flow.cmc_self_check(
            cfg.space, cfg.rb, hstar, r0, n=cfg.n, lap_mode=cfg.lap_mode, sign_mode=cfg.sign_mode
        )
        out["profile_r"] = [float(v) for v in profile.r]
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


# -- refinement study ---------------------------------------------------------------


def _refine_rows(cfg: RunConfig) -> tuple[list[dict], int]:
    rows: list[dict] = []
    worst = 0
    for cfl in (cfg.cfl, 0.5 * cfg.cfl):
        for n in REFINE_NS:
            derived = dataclasses.replace(cfg, n=n, cfl=cfl)
            profile, _, _, fc = _prepare(derived)
            result = flow.run(fc, profile, flow.MonitorInputs.disabled())
            if result.outcome is flow.FlowOutcome.NUMERICAL_FAILURE:
                worst = 2
                continue
            ctx = flow.build_audit_context(result.final_state, fc)
            if ctx is None:
                continue
            for which in diagnostics.AUDIT_IDS:
                rep = diagnostics.residual_audit(which, ctx)
                rows.append(
                    {
                        "which": which,
                        "n": n,
                        "cfl": cfl,
                        "dt": rep.dt,
                        "sup": rep.sup_norm,
                        "l2": rep.l2_norm,
                    }
                )
    return rows, worst


def cmd_refine(cfg: RunConfig) -> int:
    rows, worst = _refine_rows(cfg)
    print(f"{'which':6s} {'n':>5s} {'cfl':>7s} {'dt':>13s} {'sup':>13s} {'l2':>13s} {'order':>6s}")
    for which in diagnostics.AUDIT_IDS:
        for cfl in (cfg.cfl, 0.5 * cfg.cfl):
            group = sorted(
                (r for r in rows if r["which"] == which and r["cfl"] == cfl),
                key=lambda r: r["n"],
            )
            prev_sup = None
            for r in group:
                if prev_sup is not None and prev_sup > 0 and r["sup"] > 0:
                    order = f"{math.log2(prev_sup / r['sup']):6.2f}"
                else:
                    order = "    --"
                print(
                    f"{r['which']:6s} {r['n']:5d} {r['cfl']:7.4f} {r['dt']:13.6e} "
                    f"{r['sup']:13.6e} {r['l2']:13.6e} {order}"
                )
                prev_sup = r["sup"]
    return worst


def cmd_catalog() -> int:
    for entry in catalog_entries():
        if entry.informational:
            print(f"{entry.name:12s} informational: {entry.notes}")
        else:
            p = entry.params
            mv = ",".join(f"{k}:{m}" for k, m in p.mv)
            mh = ",".join(f"{k}:{m}" for k, m in p.mh)
            print(f"{entry.name:12s} epsilon={p.epsilon:+d} b={p.b} mv={mv} mh={mh} k0={p.k0}")
    return 0


# -- CLI --------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tubeflow",
        description="Volume-preserving curvature flow of radial tubes: runs, sweeps, bounds.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="integrate one flow; writes timeseries.csv + summary.json")
    run_p.add_argument("config", help="path to an INI run configuration")
    run_p.add_argument("--out", default=None, help="override output.dir")

    sweep_p = sub.add_parser("sweep", help="grid of runs over r0/amplitude/rb")
    sweep_p.add_argument("config")
    sweep_p.add_argument("--grid", required=True, help='e.g. "r0=0.3,0.5,0.7;amplitude=0.01,0.05,0.1"')
    sweep_p.add_argument("--out", default=None, help="override output.dir")

    bounds_p = sub.add_parser("bounds", help="print the static bounds report as JSON")
    bounds_p.add_argument("config")

    cmc_p = sub.add_parser("cmc-search", help="shoot for a steady shape of given curvature")
    cmc_p.add_argument("config")
    cmc_p.add_argument("--hstar", type=float, required=True, help="target curvature")

    refine_p = sub.add_parser("refine", help="residual audit refinement study")
    refine_p.add_argument("config")

    sub.add_parser("catalog", help="list the built-in space presets")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            return cmd_catalog()
        cfg = load_config(args.config)
        if args.command == "run":
            return cmd_run(cfg, args.out)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.grid, args.out)
        if args.command == "bounds":
            return cmd_bounds(cfg)
        if args.command == "cmc-search":
            return cmd_cmc_search(cfg, args.hstar)
        return cmd_refine(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (SpaceError, GridError, flow.FlowError, tubegeom.TubeGeomError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
