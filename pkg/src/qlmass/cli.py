"""Batch front door: JSON experiment configs in, CSV/JSON artifacts out.

Subcommands: flow-run, oracle-check, phi-curve, annulus-sweep, limits, audit.
Exit codes: 0 = all asserted invariants pass, 1 = a named check failed,
2 = config/parse error.  CSV floats are written as shortest round-trip decimals
(repr), so re-running an identical config yields byte-identical files.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, flow, mass, oracle, shi_tam
from .background import Background, unit_sphere_area
from .sphere_grid import SphereGrid
from .surface import RadialGraph, assemble

log = logging.getLogger("qlmass")

TRAJECTORY_COLUMNS = flow.Snapshot.CSV_COLUMNS


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config plumbing

def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    if cfg.get("schema") != 1:
        raise ConfigError(f"unsupported config schema {cfg.get('schema')!r}; expected 1")
    return cfg


def _take(cfg, allowed, where="config"):
    """Reject unknown keys, return {key: value} with defaults filled."""
    unknown = set(cfg) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    out = {}
    for key, default in allowed.items():
        if default is _REQUIRED and key not in cfg:
            raise ConfigError(f"missing required key '{key}' in {where}")
        out[key] = cfg.get(key, default)
    return out


_REQUIRED = object()


def _fmt(x):
    x = float(x)
    return repr(x)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.info("wrote %s (%d rows)", path, len(rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        # strict JSON: no NaN/Infinity literals in emitted reports
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _write_json(path, payload):
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n",
                          encoding="utf-8")
    log.info("wrote %s", path)


def _out_paths(cfg, out_override, default_prefix):
    outputs = _take(cfg.get("outputs", {}), {"directory": ".", "prefix": default_prefix},
                    "outputs")
    directory = Path(out_override or outputs["directory"])
    directory.mkdir(parents=True, exist_ok=True)
    return directory, outputs["prefix"]


def _build_problem(cfg, allow_harmonics=True):
    bg_cfg = _take(cfg.get("background", {}), {"n": 2, "m": _REQUIRED}, "background")
    grid_cfg = _take(cfg.get("grid", {}), {"n_theta": 32, "n_phi": 64}, "grid")
    init_cfg = _take(cfg.get("initial_graph", {}),
                     {"R": _REQUIRED, "harmonics": []}, "initial_graph")
    h_cfg = _take(cfg.get("boundary_h", {}),
                  {"mode": "factor", "value": _REQUIRED}, "boundary_h")
    flow_cfg = _take(cfg.get("flow", {}),
                     {"k": 2, "t_final": 3.0, "dt_safety": 0.25, "output_stride": 20},
                     "flow")

    if h_cfg["mode"] not in ("factor", "field"):
        raise ConfigError(f"boundary_h.mode must be 'factor' or 'field', got {h_cfg['mode']!r}")
    if not allow_harmonics and init_cfg["harmonics"]:
        raise ConfigError("oracle-check requires round initial data (no harmonics)")

    bg = Background(n=int(bg_cfg["n"]), m=float(bg_cfg["m"]))
    grid = SphereGrid(int(grid_cfg["n_theta"]), int(grid_cfg["n_phi"]))
    R = float(init_cfg["R"])
    rho0 = np.full(grid.weights.shape, R)
    for entry in init_cfg["harmonics"]:
        try:
            ell, m_idx, amp = entry
        except (TypeError, ValueError) as err:
            raise ConfigError(f"harmonics entries must be (ell, m, amplitude): {entry}") from err
        rho0 = rho0 + R * float(amp) * grid.real_harmonic(int(ell), int(m_idx))

    graph = RadialGraph(grid, bg, rho0)
    geom0 = assemble(graph)
    if h_cfg["mode"] == "factor":
        h_boundary = float(h_cfg["value"]) * geom0.sigma1
    else:
        h_boundary = np.full(grid.weights.shape, float(h_cfg["value"]))

    config = flow.FlowConfig(
        k=int(flow_cfg["k"]), t_final=float(flow_cfg["t_final"]),
        dt_safety=float(flow_cfg["dt_safety"]),
        output_stride=int(flow_cfg["output_stride"]),
    )
    return graph, geom0, h_boundary, config


def _trajectory_rows(traj):
    return [[getattr(s, c) for c in TRAJECTORY_COLUMNS] for s in traj.snapshots]


def _decay_payload(traj):
    out = {}
    for name in ("roundness_defect", "gtilde_defect"):
        fit = flow.fit_decay(traj, name)
        out[name] = {"C": fit.C, "alpha": fit.alpha,
                     "residual": fit.residual, "status": fit.status}
    return out


# ---------------------------------------------------------------- commands

def cmd_flow_run(cfg, out_dir):
    _take(cfg, {"schema": 1, "background": {}, "grid": {}, "initial_graph": {},
                "boundary_h": {}, "flow": {}, "tolerances": {}, "outputs": {}})
    tol = _take(cfg.get("tolerances", {}),
                {"mono": 1e-6, "audit": 0.02, "oracle": 1e-6}, "tolerances")
    graph, geom0, h_boundary, fcfg = _build_problem(cfg)
    directory, prefix = _out_paths(cfg, out_dir, "run")

    w0 = shi_tam.initial_w(geom0, h_boundary)
    traj = flow.evolve(graph, fcfg, w0)
    report = mass.build_mass_report(traj, geom0, h_boundary,
                                    mono_tol=tol["mono"], audit_tol=tol["audit"])

    _write_csv(directory / f"{prefix}_trajectory.csv", TRAJECTORY_COLUMNS,
               _trajectory_rows(traj))
    checks = {
        "completed": traj.status == "completed",
        "monotone_ok": report.monotone_ok,
        "audit_ok": report.audit_ok,
    }
    m0 = report.m0_estimate
    payload = {
        "schema": 1,
        "command": "flow-run",
        "status": traj.status,
        "message": traj.message,
        "wall_time_s": traj.wall_time,
        "steps": traj.snapshots[-1].step,
        "Q_initial": traj.snapshots[0].Q,
        "Q_final": traj.snapshots[-1].Q,
        "eps_mono": report.eps_mono,
        "max_audit_defect": report.max_audit_defect,
        "quasilocal_energy": report.quasilocal_energy,
        "m0_estimate": None if m0 is None else
            {"value": m0[0], "spread": m0[1], "secondary": m0[2]},
        "decay_fits": _decay_payload(traj),
        "checks": checks,
        "config": cfg,
    }
    _write_json(directory / f"{prefix}_report.json", payload)
    return _verdict(checks)


def cmd_oracle_check(cfg, out_dir):
    _take(cfg, {"schema": 1, "background": {}, "grid": {}, "initial_graph": {},
                "boundary_h": {}, "flow": {}, "tolerances": {}, "outputs": {}})
    tol = _take(cfg.get("tolerances", {}),
                {"mono": 1e-6, "audit": 0.02, "oracle": 1e-6}, "tolerances")
    graph, geom0, h_boundary, fcfg = _build_problem(cfg, allow_harmonics=False)
    directory, prefix = _out_paths(cfg, out_dir, "oracle")

    bg, R = graph.bg, float(np.max(graph.rho))
    h_value = float(np.max(h_boundary))
    mhat = oracle.mhat_from_boundary(R, bg.m, h_value, bg.n)
    w0 = shi_tam.initial_w(geom0, h_boundary)
    traj = flow.evolve(graph, fcfg, w0)

    t = traj.times
    rho_ex = oracle.round_flow(R, t, bg.n)
    q_ex = oracle.q_exact(rho_ex, bg.m, mhat, bg.n)
    ma_ex = oracle.mass_aspect_exact(rho_ex, bg.m, mhat, bg.n)
    w_ex_final = oracle.exact_w(rho_ex[-1], bg.m, mhat, bg.n)

    err_rho = float(np.max(np.abs(np.stack([traj.series("rho_min"),
                                            traj.series("rho_max")]) - rho_ex) / rho_ex))
    err_w = float(np.max(np.abs(traj.final_w - w_ex_final) / w_ex_final))
    err_q = float(np.max(np.abs(traj.series("Q") - q_ex) / np.abs(q_ex)))
    err_ma = float(np.max(np.abs(np.stack([traj.series("m_aspect_min"),
                                           traj.series("m_aspect_max")]) - ma_ex)
                          / np.abs(ma_ex)))
    tol_field, tol_integral = tol["oracle"], 10.0 * tol["oracle"]
    checks = {
        "completed": traj.status == "completed",
        "rho_matches_oracle": err_rho <= tol_field,
        "w_matches_oracle": err_w <= tol_field,
        "Q_matches_oracle": err_q <= tol_integral,
        "mass_aspect_matches_oracle": err_ma <= tol_integral,
    }
    _write_csv(directory / f"{prefix}_trajectory.csv", TRAJECTORY_COLUMNS,
               _trajectory_rows(traj))
    _write_json(directory / f"{prefix}_report.json", {
        "schema": 1, "command": "oracle-check", "status": traj.status,
        "mhat": mhat, "m0_exact": mhat - bg.m,
        "errors": {"rho": err_rho, "w": err_w, "Q": err_q, "mass_aspect": err_ma},
        "tolerances": {"field": tol_field, "integral": tol_integral},
        "wall_time_s": traj.wall_time, "checks": checks, "config": cfg,
    })
    return _verdict(checks)


def cmd_phi_curve(cfg, out_dir):
    top = _take(cfg, {"schema": 1, "R": _REQUIRED, "h_mean": _REQUIRED,
                      "samples": 513, "outputs": {}})
    directory, prefix = _out_paths(cfg, out_dir, "phi")
    curve = mass.round_phi_curve(float(top["R"]), float(top["h_mean"]),
                                 int(top["samples"]))
    _write_csv(directory / f"{prefix}_curve.csv", ("m", "phi"),
               np.stack([curve.m, curve.phi], axis=1))
    checks = {
        "stationarity": abs(curve.lapse_at_m_star - curve.h_bar) <= 1e-10,
        "minimum_consistent": bool(curve.phi_min <= float(np.min(curve.phi)) + 1e-12),
    }
    _write_json(directory / f"{prefix}_report.json", {
        "schema": 1, "command": "phi-curve",
        "m_star": curve.m_star, "min_phi": curve.phi_min,
        "h_bar": curve.h_bar, "lapse_at_m_star": curve.lapse_at_m_star,
        "checks": checks, "config": cfg,
    })
    return _verdict(checks)


def cmd_annulus_sweep(cfg, out_dir):
    top = _take(cfg, {"schema": 1, "R": _REQUIRED, "m": _REQUIRED,
                      "m_hat_list": _REQUIRED, "n": 2, "outputs": {}})
    directory, prefix = _out_paths(cfg, out_dir, "annulus")
    R, m, n = float(top["R"]), float(top["m"]), int(top["n"])
    omega = unit_sphere_area(n)
    rows, max_defect = [], 0.0
    for mhat in top["m_hat_list"]:
        mhat = float(mhat)
        margin = float(oracle.annulus_margin(R, m, mhat, n))
        # independent energy path: quasilocal energy of the matched boundary
        # data minus the mhat-horizon term
        N = np.sqrt(1.0 - 2.0 * m * R ** (1 - n))
        Nh = np.sqrt(1.0 - 2.0 * mhat * R ** (1 - n))
        qle = m + R ** (n - 1) * N * (N - Nh)
        horizon = mass.horizon_term(omega * (2.0 * mhat) ** (n / (n - 1)), n) \
            if mhat > 0 else 0.0
        margin_energy = qle - horizon
        defect = abs(margin - margin_energy)
        max_defect = max(max_defect, defect)
        rows.append([mhat, margin, margin_energy, defect])
    _write_csv(directory / f"{prefix}_curve.csv",
               ("m_hat", "margin", "margin_energy_path", "defect"), rows)
    checks = {"paths_agree_1e12": max_defect <= 1e-12,
              "margins_nonnegative": all(r[1] >= 0.0 for r in rows)}
    _write_json(directory / f"{prefix}_report.json", {
        "schema": 1, "command": "annulus-sweep", "max_defect": max_defect,
        "margins": {str(r[0]): r[1] for r in rows}, "checks": checks, "config": cfg,
    })
    return _verdict(checks)


def cmd_limits(cfg, out_dir):
    top = _take(cfg, {"schema": 1, "mu": _REQUIRED, "m": _REQUIRED,
                      "rho_min": 10.0, "rho_max": 1e4, "num_samples": 15,
                      "quad_tol": 1e-11, "tolerances": {}, "outputs": {}})
    tol = _take(cfg.get("tolerances", {}),
                {"energy_final": 1e-3, "richardson": 1e-4, "volume": 0.01},
                "tolerances")
    directory, prefix = _out_paths(cfg, out_dir, "limits")
    mu, m = float(top["mu"]), float(top["m"])
    metric = asymptotics.RadialAFMetric.constant(mu)
    rho_list = np.geomspace(float(top["rho_min"]), float(top["rho_max"]),
                            int(top["num_samples"]))
    qc = asymptotics.quasilocal_limit_curve(metric, m, rho_list)
    vc = asymptotics.volume_deficit_curve(metric, m, rho_list,
                                          quad_tol=float(top["quad_tol"]))
    _write_csv(directory / f"{prefix}_curve.csv",
               ("rho", "energy", "volume_ratio"),
               np.stack([qc.rho, qc.value, vc.value], axis=1))
    checks = {
        "energy_final": abs(qc.value[-1] - mu) <= tol["energy_final"],
        "richardson": abs(qc.limit - mu) <= tol["richardson"],
        "volume_ratio": abs(vc.value[-1] - (mu - m)) <= tol["volume"] * max(abs(mu - m), 1.0),
    }
    _write_json(directory / f"{prefix}_report.json", {
        "schema": 1, "command": "limits",
        "adm_mass_target": mu,
        "energy_final": qc.value[-1], "richardson_limit": qc.limit,
        "energy_exponent": qc.exponent,
        "volume_ratio_final": vc.value[-1], "volume_limit": vc.limit,
        "volume_exponent": vc.exponent,
        "checks": checks, "config": cfg,
    })
    return _verdict(checks)


def cmd_audit(trajectory_path, out_dir, mono_tol=1e-6, audit_tol=0.02):
    """Recheck monotonicity and the stored audit column from an emitted CSV."""
    try:
        text = Path(trajectory_path).read_text(encoding="utf-8").strip().splitlines()
    except OSError as err:
        raise ConfigError(f"cannot read trajectory {trajectory_path}: {err}") from err
    header = text[0].split(",")
    if header != list(TRAJECTORY_COLUMNS):
        raise ConfigError(
            f"trajectory header mismatch: expected {','.join(TRAJECTORY_COLUMNS)}"
        )
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    if data.shape[0] < 2:
        raise ConfigError("trajectory holds fewer than two snapshots")
    t, Q = data[:, 0], data[:, 4]
    audit_col = data[:, 11]
    eps_mono = float(np.max(np.diff(Q)))
    dqdt = np.diff(Q) / np.diff(t)
    checks = {
        "monotone_ok": eps_mono <= mono_tol * max(abs(Q[0]), 1e-300),
        "audit_ok": float(np.max(audit_col)) <= audit_tol,
    }
    payload = {
        "schema": 1, "command": "audit", "source": str(trajectory_path),
        "eps_mono": eps_mono, "max_audit_defect": float(np.max(audit_col)),
        "mean_dqdt": float(np.mean(dqdt)), "checks": checks,
    }
    if out_dir:
        directory = Path(out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        _write_json(directory / "audit_report.json", payload)
    print(json.dumps(_jsonable(payload), indent=2))
    return _verdict(checks)


def _verdict(checks):
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        print(f"FAIL: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------- entry point

_CONFIG_COMMANDS = {
    "flow-run": cmd_flow_run,
    "oracle-check": cmd_oracle_check,
    "phi-curve": cmd_phi_curve,
    "annulus-sweep": cmd_annulus_sweep,
    "limits": cmd_limits,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="qlmass",
        description="Inverse curvature flow / quasi-local mass experiment runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _CONFIG_COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--seed", type=int, default=0,
                       help="reserved for randomized perturbation phases")
        p.add_argument("--verbose", action="store_true")
    p = sub.add_parser("audit")
    p.add_argument("trajectory", help="path to an emitted *_trajectory.csv")
    p.add_argument("--out", default=None)
    p.add_argument("--mono-tol", type=float, default=1e-6)
    p.add_argument("--audit-tol", type=float, default=0.02)
    p.add_argument("--verbose", action="store_true")

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "audit":
            return cmd_audit(args.trajectory, args.out, args.mono_tol, args.audit_tol)
        cfg = _load_config(args.config)
        return _CONFIG_COMMANDS[args.command](cfg, args.out)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
