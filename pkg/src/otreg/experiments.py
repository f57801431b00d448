"""Named experiments over solved transport pairs.

Each experiment solves the configured pair, measures one family of
quantities (eccentricity curves, obliqueness margins, Hessian growth,
...), writes CSV tables and SVG overlays, and returns a JSON-ready
report with pass/fail checks against config-declared thresholds.
"""

from __future__ import annotations

import json
import os

import numpy as np
from jsonschema import validate as _js_validate

from . import analysis
from .domains import domain_pair
from .geometry import (boundary_point, eccentricity, fit_ellipse, left_tangent,
                       perp, project_to_boundary, right_tangent)
from .solver import (SolverError, legendre_dual, newton_solve, sample_target,
                     save_solution, write_atomic)
from .svgplot import SvgCanvas

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["experiment", "domains", "n_targets", "seed"],
    "properties": {
        "experiment": {"type": "string", "enum": [
            "eccentricity-growth", "hessian-growth", "w2p-table",
            "obliqueness-scan", "corner-growth", "eccentricity-step",
            "volume-bounds", "engulfing", "duality-ellipse",
        ]},
        "domains": {
            "type": "object",
            "properties": {
                "pair": {"type": "string"},
                "source": {"type": "object"},
                "target": {"type": "object"},
            },
        },
        "n_targets": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "params": {"type": "object"},
        "thresholds": {"type": "object"},
    },
    "additionalProperties": False,
}


class ConfigError(ValueError):
    pass


def validate_config(config: dict) -> dict:
    try:
        _js_validate(config, CONFIG_SCHEMA)
    except Exception as e:
        raise ConfigError(f"invalid experiment config: {e}") from e
    dom = config["domains"]
    if "pair" not in dom and "source" not in dom:
        raise ConfigError("domains needs either 'pair' or 'source'")
    for side in ("source", "target"):
        spec = dom.get(side)
        if spec and "generator" in spec and spec["generator"] == "random_hull":
            if "seed" not in spec.get("params", {}):
                raise ConfigError(f"random {side} generator requires a seed")
    return config


def load_config(path: str) -> dict:
    with open(path) as f:
        return validate_config(json.load(f))


# ---------------------------------------------------------------------------
# output helpers


def _g17(x) -> str:
    return "%.17g" % float(x)


def write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_g17(v) for v in row))
    write_atomic(path, "\n".join(lines) + "\n")


def _resolve_point(spec, domain) -> np.ndarray:
    if spec == "centroid":
        return domain.centroid()
    if isinstance(spec, dict) and "boundary_arc" in spec:
        return boundary_point(domain, float(spec["boundary_arc"]))
    if isinstance(spec, dict) and "vertex" in spec:
        return domain.vertices[int(spec["vertex"])].copy()
    return np.asarray(spec, float)


def _check(name: str, value, threshold, ok: bool) -> dict:
    return {"name": name, "value": value, "threshold": threshold,
            "pass": bool(ok)}


# ---------------------------------------------------------------------------
# solve step


def solve_pair(config: dict) -> dict:
    source, target = domain_pair(config["domains"])
    n = int(config["n_targets"])
    cloud = sample_target(target, n, seed=int(config["seed"]),
                          source_area=source.area())
    weights, psi, diagram, info = newton_solve(
        source, cloud, tol=config.get("tol", 1e-7),
        max_iter=config.get("max_iter", 100))
    return {
        "source": source, "target": target, "cloud": cloud,
        "weights": weights, "psi": psi, "diagram": diagram, "info": info,
        "cell_size": float(np.sqrt(source.area() / n)),
    }


# ---------------------------------------------------------------------------
# individual experiments: each returns (results, checks)


def _curve_points(ctx, params):
    source = ctx["source"]
    specs = params.get("base_points", ["centroid"])
    pts = [_resolve_point(s, source) for s in specs]
    h_max = float(params.get("h_max", 0.1))
    h_min = float(params.get("h_min", 1e-3))
    spd = int(params.get("samples_per_decade", 8))
    curves = [analysis.eccentricity_curve(ctx["psi"], p, h_max, h_min, spd)
              for p in pts]
    return pts, curves


def _write_curve_csvs(out_dir, curves):
    for k, curve in enumerate(curves):
        rows = [(s.h, s.eta, s.vol_ratio_in, s.vol_ratio_full,
                 s.centring_residual) for s in curve.samples]
        write_csv(os.path.join(out_dir, f"eccentricity_{k}.csv"),
                  ["h", "eta", "vol_ratio_in", "vol_ratio_full",
                   "centring_residual"], rows)


def _curve_svg(out_dir, ctx, curve):
    canvas = SvgCanvas()
    canvas.add_polygon(ctx["source"], stroke="#000")
    for s in curve.samples[:: max(1, len(curve.samples) // 6)]:
        canvas.add_ellipse(s.ellipse, stroke="#c00")
    canvas.write(os.path.join(out_dir, "eccentricity.svg"))


def exp_eccentricity_growth(ctx, params, thresholds, out_dir):
    pts, curves = _curve_points(ctx, params)
    _write_curve_csvs(out_dir, curves)
    max_exp = thresholds.get("max_exponent")
    max_ci = thresholds.get("max_ci_upper")
    results = {"points": []}
    checks = []
    for k, curve in enumerate(curves):
        h = curve.h_values()
        eta = curve.eta_values()
        entry = {"base_point": [float(v) for v in pts[k]],
                 "n_samples": len(h), "skipped": curve.skipped}
        if len(h) >= 3:
            expo = analysis.fit_loglog(1.0 / h, eta)
            lo, hi = analysis.bootstrap_slope_ci(1.0 / h, eta,
                                                 seed=int(params.get("bootstrap_seed", 0)))
            entry.update(exponent=expo, ci_low=lo, ci_high=hi)
            if max_exp is not None:
                checks.append(_check(f"exponent[{k}]", expo, max_exp,
                                     expo <= max_exp))
            if max_ci is not None:
                checks.append(_check(f"ci_upper[{k}]", hi, max_ci, hi <= max_ci))
        else:
            checks.append(_check(f"resolvable_samples[{k}]", len(h), 3, False))
        results["points"].append(entry)
    if curves and curves[0].samples:
        _curve_svg(out_dir, ctx, curves[0])
    return results, checks


def exp_volume_bounds(ctx, params, thresholds, out_dir):
    pts, curves = _curve_points(ctx, params)
    _write_curve_csvs(out_dir, curves)
    max_band = thresholds.get("max_band", 10.0)
    results = {"points": []}
    checks = []
    for k, curve in enumerate(curves):
        rin = np.array([s.vol_ratio_in for s in curve.samples])
        rfull = np.array([s.vol_ratio_full for s in curve.samples])
        entry = {"base_point": [float(v) for v in pts[k]],
                 "n_samples": len(rin)}
        if len(rin) >= 2:
            band_in = float(rin.max() / rin.min())
            band_full = float(rfull.max() / rfull.min())
            entry.update(band_in=band_in, band_full=band_full)
            checks.append(_check(f"band_in[{k}]", band_in, max_band,
                                 band_in <= max_band))
            checks.append(_check(f"band_full[{k}]", band_full, max_band,
                                 band_full <= max_band))
        else:
            checks.append(_check(f"resolvable_samples[{k}]", len(rin), 2, False))
        results["points"].append(entry)
    return results, checks


def exp_obliqueness_scan(ctx, params, thresholds, out_dir):
    source, target, psi = ctx["source"], ctx["target"], ctx["psi"]
    n = int(params.get("n_samples", 200))
    arcs = (np.arange(n) + 0.5) / n
    rows = []
    records = []
    for s in arcs:
        x0 = boundary_point(source, s)
        ob = analysis.obliqueness_check(source, target, psi, x0)
        rows.append((s, x0[0], x0[1], ob["LdotL"], ob["RdotR"], ob["margin"]))
        records.append(ob)
    write_csv(os.path.join(out_dir, "obliqueness.csv"),
              ["arc_param", "x0x", "x0y", "LdotL", "RdotR", "margin"], rows)
    margins = np.array([r[5] for r in rows])
    worst = int(np.argmin(margins))
    min_margin = thresholds.get("min_margin", 0.05)
    weak_tol = thresholds.get("weak_tol", 1e-6)
    results = {
        "n_samples": n,
        "min_margin": float(margins.min()),
        "worst_arc_param": float(arcs[worst]),
        "n_under_resolved": int(sum(r["under_resolved"] for r in records)),
    }
    checks = [
        _check("min_margin", float(margins.min()), min_margin,
               margins.min() > min_margin),
        _check("weak_form", float(margins.min()), -weak_tol,
               margins.min() >= -weak_tol),
    ]
    canvas = SvgCanvas()
    canvas.add_polygon(source, stroke="#000")
    canvas.add_polygon(target, stroke="#06c")
    ob = records[worst]
    ln = 0.2 * source.diameter()
    canvas.add_ray(left_tangent(source, ob["x0"]), ln, stroke="#080")
    canvas.add_ray(right_tangent(source, ob["x0"]), ln, stroke="#0a0")
    y0, _ = project_to_boundary(target, ob["y0"])
    canvas.add_ray(left_tangent(target, y0), ln, stroke="#800")
    canvas.add_ray(right_tangent(target, y0), ln, stroke="#a00")
    canvas.write(os.path.join(out_dir, "obliqueness.svg"))
    return results, checks


def exp_hessian_growth(ctx, params, thresholds, out_dir):
    source, psi = ctx["source"], ctx["psi"]
    cell = ctx["cell_size"]
    n_rays = int(params.get("n_rays", 8))
    d_max = float(params.get("d_max", 0.25 * source.diameter()))
    d_min = max(float(params.get("d_min", 0.0)), 6.5 * cell)
    spd = int(params.get("samples_per_decade", 8))
    r_max = float(params.get("r_max", source.diameter() / 8.0))
    if d_min >= d_max:
        raise analysis.AnalysisError("no resolvable distance range")
    n_d = int(np.ceil(np.log10(d_max / d_min) * spd)) + 1
    dists = np.geomspace(d_max, d_min, n_d)
    c = source.centroid()
    rows = []
    for j in range(n_rays):
        b = boundary_point(source, (j + 0.5) / n_rays)
        u = c - b
        u = u / np.hypot(*u)
        for d in dists:
            x = b + d * u
            dist = source.distance_to_boundary(x)
            if dist <= 0:
                continue
            r = min(0.5 * dist, r_max)
            if r < 3.0 * cell:
                continue
            try:
                hess, resid = analysis.hessian_estimate(psi, x, r, domain=source)
            except analysis.AnalysisError:
                continue
            rows.append((x[0], x[1], dist, analysis.spectral_norm_2x2(hess),
                         resid))
    write_csv(os.path.join(out_dir, "hessian.csv"),
              ["x", "y", "dist_to_boundary", "hess_norm", "fit_residual"], rows)
    checks = []
    results = {"n_samples": len(rows)}
    if len(rows) >= 3:
        arr = np.array(rows)
        expo = analysis.fit_loglog(1.0 / arr[:, 2], arr[:, 3])
        lo, hi = analysis.bootstrap_slope_ci(1.0 / arr[:, 2], arr[:, 3],
                                             seed=int(params.get("bootstrap_seed", 0)))
        results.update(exponent=expo, ci_low=lo, ci_high=hi)
        max_exp = thresholds.get("max_exponent")
        if max_exp is not None:
            checks.append(_check("exponent", expo, max_exp, expo <= max_exp))
    else:
        checks.append(_check("resolvable_samples", len(rows), 3, False))
    return results, checks


def exp_w2p_table(ctx, params, thresholds, out_dir):
    source, psi = ctx["source"], ctx["psi"]
    p_list = [float(p) for p in params.get("p_list", [1, 2, 4, 10])]
    mesh = params.get("mesh_size")
    rows = []
    for p in p_list:
        integral, excluded = analysis.w2p_norm(
            psi, source, p, mesh_size=mesh, cell_size=ctx["cell_size"])
        rows.append((p, integral, integral ** (1.0 / p), excluded))
    write_csv(os.path.join(out_dir, "w2p.csv"),
              ["p", "integral", "norm", "excluded_area"], rows)
    finite = all(np.isfinite(r[1]) for r in rows)
    results = {"table": [{"p": r[0], "integral": r[1], "norm": r[2],
                          "excluded_area": r[3]} for r in rows]}
    checks = [_check("finite", finite, True, finite)]
    max_norm = thresholds.get("max_norm")
    if max_norm is not None:
        worst = max(r[2] for r in rows)
        checks.append(_check("max_norm", worst, max_norm, worst <= max_norm))
    return results, checks


def exp_corner_growth(ctx, params, thresholds, out_dir):
    source, psi = ctx["source"], ctx["psi"]
    x0 = _resolve_point(params.get("x0", {"vertex": 0}), source)
    e = np.asarray(params.get("direction", [0.0, 1.0]), float)
    s_max = float(params.get("s_max", 0.5 * source.diameter()))
    s_min = max(float(params.get("s_min", 0.0)), 2.0 * ctx["cell_size"])
    spd = int(params.get("samples_per_decade", 8))
    n_s = int(np.ceil(np.log10(s_max / s_min) * spd)) + 1
    grid = np.geomspace(s_min, s_max, n_s)
    expo, s_kept, vals = analysis.corner_growth(psi, x0, e, grid)
    write_csv(os.path.join(out_dir, "corner_growth.csv"),
              ["s", "value"], np.column_stack([s_kept, vals]))
    results = {"exponent": expo, "n_samples": int(len(s_kept)),
               "x0": [float(v) for v in x0],
               "direction": [float(v) for v in e]}
    checks = []
    min_exp = thresholds.get("min_exponent")
    if min_exp is not None:
        checks.append(_check("exponent", expo, min_exp, expo >= min_exp))
    return results, checks


def exp_eccentricity_step(ctx, params, thresholds, out_dir):
    source, psi = ctx["source"], ctx["psi"]
    x0 = _resolve_point(params.get("x0", "centroid"), source)
    h_max = float(params.get("h_max", 0.1))
    step = float(params.get("step", 8.0))
    n_steps = int(params.get("n_steps", 6))
    cell_area = source.area() / psi.n_pieces
    rows = []
    etas = []
    p_warm = None
    for k in range(n_steps):
        h = h_max * step ** (-k)
        try:
            sec = analysis.centred_section(psi, x0, h, initial_slope=p_warm)
        except analysis.AnalysisError:
            break
        p_warm = sec.slope
        if sec.polygon.area() / cell_area < 20:
            break
        eta = eccentricity(fit_ellipse(sec.polygon, h))
        ratio = eta / etas[-1] if etas else np.nan
        etas.append(eta)
        rows.append((h, eta, ratio))
    write_csv(os.path.join(out_dir, "eccentricity_step.csv"),
              ["h", "eta", "step_ratio"], rows)
    ratios = [r[2] for r in rows[1:]]
    results = {"n_samples": len(rows),
               "max_step_ratio": float(max(ratios)) if ratios else np.nan}
    checks = []
    max_ratio = thresholds.get("max_step_ratio")
    if max_ratio is not None and ratios:
        checks.append(_check("max_step_ratio", results["max_step_ratio"],
                             max_ratio, results["max_step_ratio"] <= max_ratio))
    if len(rows) < 2:
        checks.append(_check("resolvable_samples", len(rows), 2, False))
    return results, checks


def exp_engulfing(ctx, params, thresholds, out_dir):
    source, psi = ctx["source"], ctx["psi"]
    x0 = _resolve_point(params.get("x0", "centroid"), source)
    h = float(params.get("h", 0.05))
    t = float(params.get("t", 0.5))
    t_bar = float(params.get("t_bar", 0.75))
    offset = params.get("offset")
    if offset is None:
        x1 = x0
    else:
        sec = analysis.centred_section(psi, x0, h)
        x1 = x0 + np.asarray(offset, float) * sec.polygon.diameter()
    s_bar = analysis.check_engulfing(psi, x0, x1, h, t, t_bar)
    write_csv(os.path.join(out_dir, "engulfing.csv"),
              ["h", "t", "t_bar", "s_bar"], [(h, t, t_bar, s_bar)])
    results = {"s_bar": s_bar, "x0": [float(v) for v in x0],
               "x1": [float(v) for v in x1]}
    checks = []
    min_s = thresholds.get("min_s")
    if min_s is not None:
        checks.append(_check("s_bar", s_bar, min_s, s_bar >= min_s))
    return results, checks


def exp_duality_ellipse(ctx, params, thresholds, out_dir):
    source, target, psi = ctx["source"], ctx["target"], ctx["psi"]
    phi = legendre_dual(psi, ctx["diagram"], target)
    n_pairs = int(params.get("n_pairs", 20))
    h_list = [float(h) for h in params.get("h_list", [0.05, 0.02, 0.01])]
    # measurement depth: pairs sit this far inside the source boundary
    # (0 puts them exactly on it)
    offset = float(params.get("inward_offset", 0.0))
    cell = ctx["cell_size"]
    cell_area = source.area() / psi.n_pieces
    dual_cell_area = target.area() / psi.n_pieces
    rows = []
    for j in range(n_pairs):
        s = (j + 0.5) / n_pairs
        xb = boundary_point(source, s)
        if offset > 0:
            x0 = xb + offset * _inward(source, xb)
            y0 = psi.gradient(x0)
        else:
            x0 = xb
            y_in = psi.gradient(x0 + 0.5 * cell * _inward(source, x0))
            y0, _ = project_to_boundary(target, y_in)
        for h in h_list:
            try:
                sp = analysis.centred_section(psi, x0, h)
                sd = analysis.centred_section(phi, y0, h)
            except analysis.AnalysisError:
                continue
            if sp.polygon.area() / cell_area < 20:
                continue
            if sd.polygon.area() / dual_cell_area < 20:
                continue
            ep = fit_ellipse(sp.polygon, h)
            ed = fit_ellipse(sd.polygon, h)
            etap, etad = eccentricity(ep), eccentricity(ed)
            factor = max(etap / etad, etad / etap)
            e_short_p = perp(ep).e_long
            cosang = abs(float(ed.e_long @ e_short_p))
            ang = np.degrees(np.arccos(np.clip(cosang, 0, 1)))
            rows.append((s, h, etap, etad, factor, ang))
    write_csv(os.path.join(out_dir, "duality.csv"),
              ["arc_param", "h", "eta_primal", "eta_dual", "eta_factor",
               "axis_angle_deg"], rows)
    checks = []
    results = {"n_rows": len(rows)}
    if rows:
        arr = np.array(rows)
        results.update(max_eta_factor=float(arr[:, 4].max()),
                       max_axis_angle_deg=float(arr[:, 5].max()))
        max_factor = thresholds.get("max_eta_factor")
        max_angle = thresholds.get("max_axis_angle_deg")
        if max_factor is not None:
            checks.append(_check("max_eta_factor", results["max_eta_factor"],
                                 max_factor,
                                 results["max_eta_factor"] <= max_factor))
        if max_angle is not None:
            checks.append(_check("max_axis_angle_deg",
                                 results["max_axis_angle_deg"], max_angle,
                                 results["max_axis_angle_deg"] <= max_angle))
    else:
        checks.append(_check("resolvable_pairs", 0, 1, False))
    return results, checks


def _inward(poly, x):
    from .geometry import inward_normal
    return inward_normal(poly, x)


EXPERIMENTS = {
    "eccentricity-growth": exp_eccentricity_growth,
    "volume-bounds": exp_volume_bounds,
    "obliqueness-scan": exp_obliqueness_scan,
    "hessian-growth": exp_hessian_growth,
    "w2p-table": exp_w2p_table,
    "corner-growth": exp_corner_growth,
    "eccentricity-step": exp_eccentricity_step,
    "engulfing": exp_engulfing,
    "duality-ellipse": exp_duality_ellipse,
}


# ---------------------------------------------------------------------------
# runner


def run_experiment(config: dict, out_dir: str, verbose: bool = False) -> dict:
    """Solve, analyze, and emit all artifacts into out_dir.

    Returns the report dict; report['status'] is 'ok' or 'solver_failed',
    report['pass'] reflects the threshold checks.
    """
    config = validate_config(config)
    os.makedirs(out_dir, exist_ok=True)
    report = {"config": config, "status": "ok", "checks": [], "pass": False}
    try:
        ctx = solve_pair(config)
    except SolverError as e:
        report["status"] = "solver_failed"
        report["error"] = str(e)
        _write_report(os.path.join(out_dir, "report.json"), report)
        return report
    info = ctx["info"]
    report["solver"] = {"iterations": info["iterations"],
                        "residual": info["residual"],
                        "continuation_steps": info["continuation_steps"],
                        "n_targets": ctx["cloud"].n}
    save_solution(os.path.join(out_dir, "solution.json"), ctx["source"],
                  ctx["target"], ctx["cloud"], ctx["weights"], info)
    fn = EXPERIMENTS[config["experiment"]]
    results, checks = fn(ctx, config.get("params", {}),
                         config.get("thresholds", {}), out_dir)
    report["results"] = results
    report["checks"] = checks
    report["pass"] = all(c["pass"] for c in checks)
    if verbose:
        for c in checks:
            print(f"  [{'PASS' if c['pass'] else 'FAIL'}] {c['name']}: "
                  f"{c['value']} vs {c['threshold']}")
    _write_report(os.path.join(out_dir, "report.json"), report)
    return report


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_report(path: str, report: dict) -> None:
    write_atomic(path, json.dumps(_sanitize(report), indent=2, sort_keys=True))


def aggregate_reports(root: str) -> dict:
    """Collect report.json fragments under a directory tree."""
    runs = []
    for dirpath, _, files in sorted(os.walk(root)):
        if "report.json" in files:
            with open(os.path.join(dirpath, "report.json")) as f:
                rep = json.load(f)
            runs.append({"dir": os.path.relpath(dirpath, root),
                         "experiment": rep.get("config", {}).get("experiment"),
                         "status": rep.get("status"),
                         "pass": rep.get("pass"),
                         "checks": rep.get("checks", [])})
    return {"n_runs": len(runs),
            "pass": bool(runs) and all(r["pass"] for r in runs),
            "runs": runs}
