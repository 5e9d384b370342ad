"""Command-line experiment runner.

Subcommands: run (TOML scenario), render (state JSON -> SVG pair), wulff,
ground-state, minimize.  Scenario batches may run in parallel threads capped
by the LATTICE_FRACTURE_THREADS environment variable.

Exit codes: 0 success, 2 scenario inadmissible by its stated conditions
(an expected negative), 1 errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

from . import constructions as cons
from .analysis import classify_triangles, convergence_study, opening_crack_diagnostic
from .energy import Potential, ground_state_scan, total_energy
from .lattice import build_domain, triple_point_offset
from .minimize import BoundaryCondition, SolverParams, incremental_minimize, minimize_energy
from .pwrigid import rot, two_region_map
from .serialize import (
    bond_measure_rows,
    dumps_json,
    load_state,
    state_payload,
    write_csv,
    write_json,
)
from .surface import WulffPolygon, phi
from .svgfig import render_pair

KINDS = (
    "identity",
    "straight-crack",
    "polygonal-crack",
    "staircase",
    "triple-point",
    "surface-relaxation",
    "multilayer",
    "microdeformed-triple",
    "healing-demo",
    "small-deformation",
    "minimize",
    "wulff",
    "ground-state",
)


def _max_threads() -> int:
    try:
        return max(1, int(os.environ.get("LATTICE_FRACTURE_THREADS", "4")))
    except ValueError:
        return 4


def load_scenario(path: str) -> dict:
    with open(path, "rb") as fh:
        try:
            cfg = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise SystemExit(f"error: cannot parse {path}: {exc}")
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise SystemExit(f"error: unknown scenario kind {kind!r} in {path}")
    return cfg


def _domain_from(cfg: dict, eps: float, offset=None):
    poly = np.asarray(cfg["polygon"], dtype=float)
    off = offset if offset is not None else np.asarray(cfg.get("offset", (0.0, 0.0)), float)
    return build_domain(poly, eps, off)


def _eps_list(cfg: dict) -> list[float]:
    eps = cfg.get("epsilon_list") or [cfg.get("epsilon", 1 / 32)]
    return [float(e) for e in eps]


def _rotmat(cfg: dict, key: str):
    return rot(float(cfg.get(key, 0.0)))


def build_construction(cfg: dict, eps: float):
    """Scenario kind + parameters -> (domain, ConstructionResult)."""
    kind = cfg["kind"]
    pot = Potential(float(cfg.get("j_infinity", 1.0)))
    if kind == "identity":
        dom = _domain_from(cfg, eps)
        rep = total_energy(dom, dom.nodes.copy(), pot)
        res = cons.ConstructionResult(
            name="identity", displacement=dom.nodes.copy(), report=rep,
            predicted_limit=0.0, admissible=rep.admissible,
        )
        return dom, res
    if kind == "straight-crack":
        dom = _domain_from(cfg, eps)
        res = cons.straight_crack(
            dom, np.asarray(cfg["nu"], float), _rotmat(cfg, "theta_plus_deg"),
            _rotmat(cfg, "theta_minus_deg"), np.asarray(cfg["q_plus"], float),
            np.asarray(cfg.get("q_minus", (0, 0)), float), np.asarray(cfg["xbar"], float),
            pot,
        )
        return dom, res
    if kind == "staircase":
        dom = _domain_from(cfg, eps)
        h = float(cfg.get("step_factor", 16.0)) * eps if "step_factor" in cfg or "h" not in cfg else float(cfg["h"])
        res = cons.staircase_approximation(
            dom, np.asarray(cfg["nu"], float), np.asarray(cfg["xbar"], float),
            _rotmat(cfg, "theta_plus_deg"), _rotmat(cfg, "theta_minus_deg"),
            np.asarray(cfg["q_plus"], float), np.asarray(cfg.get("q_minus", (0, 0)), float),
            h, pot,
        )
        return dom, res
    if kind == "triple-point":
        x0 = np.asarray(cfg["x0"], float)
        dom = _domain_from(cfg, eps, triple_point_offset(x0, eps))
        if cfg.get("symmetric", True):
            data = cons.symmetric_triple_point_data(float(cfg.get("delta", 0.3)))
            R1, q1, R2, q2, R3, q3 = data
            if cfg.get("flip", False):
                q1, q2 = q2, q1
        else:
            R1, R2, R3 = (_rotmat(cfg, f"theta{i}_deg") for i in (1, 2, 3))
            q1, q2, q3 = (np.asarray(cfg[f"q{i}"], float) for i in (1, 2, 3))
        res = cons.triple_point(dom, x0, R1, q1, R2, q2, R3, q3, pot)
        return dom, res
    if kind == "surface-relaxation":
        dom = _domain_from(cfg, eps)
        res = cons.surface_relaxation(
            dom, float(cfg["crack_x"]) + eps * float(cfg.get("crack_x_shift_eps", 0.1)),
            np.asarray(cfg["q_jump"], float), pot,
        )
        return dom, res
    if kind == "multilayer":
        dom = _domain_from(cfg, eps)
        res = cons.multilayer_fracture(
            dom, np.asarray(cfg.get("nu", (0, 1)), float), float(cfg["crack_level"]),
            float(cfg["depth"]), int(cfg.get("layers", 1)),
            cfg.get("style", "fold"), pot,
        )
        return dom, res
    if kind == "microdeformed-triple":
        x0 = np.asarray(cfg["x0"], float)
        dom = _domain_from(cfg, eps, triple_point_offset(x0, eps))
        q1 = np.asarray(cfg["q1"], float)
        q2 = np.asarray(cfg["q2"], float)
        q3 = np.asarray(cfg.get("q3", (0, 0)), float)
        eye = np.eye(2)
        res = cons.microdeformed_triple_point(
            dom, x0, eye, q1, eye, q2, eye, q3,
            float(cfg["segment_length"]),
            x0 + np.asarray(cfg["a_image_offset"], float),
            x0 + np.asarray(cfg["a_image_offset"], float)
            - float(cfg["compression"]) * float(cfg["segment_length"]) * np.array([1.0, 0.0]),
            pot,
        )
        return dom, res
    if kind == "healing-demo":
        dom = _domain_from(cfg, eps)
        res = cons.healing_fracture_demo(
            dom, float(cfg["band_lo"]), float(cfg["band_hi"]),
            np.asarray(cfg["translation"], float), pot,
            aux_cut=float(cfg["aux_cut"]) if "aux_cut" in cfg else None,
            aux_opening=float(cfg.get("aux_opening", 0.1)),
        )
        return dom, res
    if kind == "polygonal-crack":
        from .pwrigid import PolylineGraph

        dom = _domain_from(cfg, eps)
        graph = PolylineGraph(
            anchor=np.asarray(cfg["anchor"], float),
            nu=np.asarray(cfg["nu"], float),
            breakpoints=np.asarray(cfg["breakpoints"], float),
        )
        res = cons.polygonal_crack(
            dom, graph, _rotmat(cfg, "theta_plus_deg"), _rotmat(cfg, "theta_minus_deg"),
            np.asarray(cfg["q_plus"], float), np.asarray(cfg.get("q_minus", (0, 0)), float),
            pot,
        )
        return dom, res
    raise SystemExit(f"error: kind {cfg['kind']!r} is not a construction scenario")


def run_scenario(path: str, outdir: str, s_threshold: float = 0.5,
                 eps_override=None, seed: int | None = None,
                 margin: float = 0.0) -> int:
    cfg = load_scenario(path)
    if eps_override:
        cfg["epsilon_list"] = list(eps_override)
        cfg["epsilon"] = eps_override[-1]
    if seed is not None:
        cfg["seed"] = int(seed)
    if margin:
        cfg["margin"] = float(margin)
    kind = cfg["kind"]
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(path).stem

    if kind == "wulff":
        return cmd_wulff(argparse.Namespace(out=str(out / f"{stem}_wulff"),
                                            j_infinity=float(cfg.get("j_infinity", 1.0)),
                                            samples=int(cfg.get("samples", 360))))
    if kind == "ground-state":
        scan = ground_state_scan(
            float(cfg.get("r_min", 0.9)), float(cfg.get("r_max", 1.05)),
            int(cfg.get("samples", 301)), float(cfg.get("cutoff", 8.0)),
            Potential(float(cfg.get("j_infinity", 1.0))),
        )
        write_csv(out / f"{stem}.csv", ["r", "e", "rho", "f"],
                  zip(scan["r"], scan["e"], scan["rho"], scan["f"]))
        write_json(out / f"{stem}.json",
                   {k: scan[k] for k in ("r_bar", "e_min", "neighbor_count", "cutoff_radius")})
        print(f"{stem}: r_bar = {scan['r_bar']}")
        return 0
    if kind == "minimize":
        return run_minimize_scenario(cfg, out, stem)
    if kind == "small-deformation":
        pot = Potential(float(cfg.get("j_infinity", 1.0)))
        v = two_region_map(np.asarray(cfg["xbar"], float), np.asarray(cfg["nu"], float),
                           np.eye(2), np.asarray(cfg["v_plus"], float),
                           np.eye(2), np.asarray(cfg.get("v_minus", (0, 0)), float))
        poly = np.asarray(cfg["polygon"], float)
        table = cons.small_deformation_scaling(
            lambda e: build_domain(poly, e), v, _eps_list(cfg),
            float(cfg.get("delta_exponent", 0.25)), pot)
        write_csv(out / f"{stem}.csv", sorted(table[0].keys()),
                  [[row[k] for k in sorted(table[0].keys())] for row in table])
        write_json(out / f"{stem}.json", {"rows": table})
        ok = all(r["admissible"] for r in table)
        print(f"{stem}: admissible on all eps: {ok}")
        return 0

    # construction scenarios: sweep the mesh list, write tables and figures
    eps_list = _eps_list(cfg)
    rows = []
    final = None
    for eps in eps_list:
        dom, res = build_construction(cfg, eps)
        pred = res.predicted_limit
        err = abs(res.measured - pred) / abs(pred) if pred else abs(res.measured)
        rows.append([eps, res.measured, pred, err, res.admissible])
        final = (dom, res)
    dom, res = final
    write_csv(out / f"{stem}_convergence.csv",
              ["eps", "measured", "predicted", "rel_error", "admissible"], rows)
    write_json(out / f"{stem}_result.json", res.as_dict())
    write_json(out / f"{stem}_state.json",
               state_payload(dom, res.displacement, {"scenario": kind}))
    rep = total_energy(dom, res.displacement, s_threshold=s_threshold,
                       margin=float(cfg.get("margin", 0.0)))
    write_csv(out / f"{stem}_bonds.csv",
              ["bond", "i", "j", "direction", "weight"],
              bond_measure_rows(dom, rep.bond_measure))
    ref_svg, def_svg = render_pair(
        dom, res.displacement, bad_triangles=rep.bad_triangles,
        violating_triangles=rep.violating_triangles,
    )
    (out / f"{stem}_reference.svg").write_text(ref_svg)
    (out / f"{stem}_deformed.svg").write_text(def_svg)
    status = "ok" if res.admissible else "inadmissible"
    print(f"{stem}: measured={res.measured} predicted={res.predicted_limit} [{status}]")
    if not res.admissible:
        print(f"{stem}: violating triangles: {list(map(int, res.report.violating_triangles[:20]))}")
        return 2
    return 0


def run_minimize_scenario(cfg: dict, out: Path, stem: str) -> int:
    pot = Potential(float(cfg.get("j_infinity", 1.0)))
    poly = np.asarray(cfg["polygon"], float)
    eps = float(cfg.get("epsilon", 1 / 8))
    dom = build_domain(poly, eps)
    pull = float(cfg.get("pull", 0.05))
    width = float(cfg.get("clamp_width", 0.1))
    xmid = 0.5 * (poly[:, 0].min() + poly[:, 0].max())
    lo = poly.min(axis=0)
    hi = poly.max(axis=0)
    left = (np.array([lo[0], lo[1]]), np.array([lo[0], hi[1]]))
    right = (np.array([hi[0], lo[1]]), np.array([hi[0], hi[1]]))

    def bc_for(load):
        return BoundaryCondition.from_edges(
            dom, [left, right], width,
            lambda p, load=load: p + np.where(p[:, :1] > xmid, np.array([[load, 0.0]]), 0.0),
        )

    params = SolverParams(
        max_iters=int(cfg.get("max_iters", 4000)),
        mu_rounds=int(cfg.get("mu_rounds", 2)),
        mu0=float(cfg.get("mu0", 1e-5)),
        grad_tol=float(cfg.get("grad_tol", 1e-5)),
        margin=float(cfg.get("margin", 0.0)),
    )
    init = dom.nodes.copy().astype(float)
    if cfg.get("seed_weak_layer", True):
        init[:, 0] += 0.01 * eps * np.tanh((dom.nodes[:, 0] - xmid) / 0.05)
    noise = float(cfg.get("init_noise", 0.0))
    if noise > 0:
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        init += noise * eps * rng.standard_normal(init.shape)
    steps = int(cfg.get("load_steps", 8))
    loads = np.linspace(pull / steps, pull, steps)
    u, rep, trace = incremental_minimize(dom, bc_for, loads, init, params, pot)
    cls = classify_triangles(dom, u, float(cfg.get("s_threshold", 0.5)), pot)
    write_csv(out / f"{stem}_trace.csv",
              ["load", "mu", "iter", "objective", "grad_norm", "min_det", "energy"],
              [[t.get("load", math.nan), t["mu"], t["iter"], t["objective"],
                t["grad_norm"], t["min_det"], t["energy"]] for t in trace])
    write_json(out / f"{stem}_state.json", state_payload(dom, u, {"scenario": "minimize"}))
    ref_svg, def_svg = render_pair(dom, u, bad_triangles=cls.bad_triangles)
    (out / f"{stem}_reference.svg").write_text(ref_svg)
    (out / f"{stem}_deformed.svg").write_text(def_svg)
    print(f"{stem}: energy={rep.bond_sum} bad_triangles={cls.n_bad} admissible={rep.admissible}")
    return 0 if rep.admissible else 2


def cmd_run(args) -> int:
    paths = list(args.scenario)
    eps_override = None
    if args.epsilon_list:
        eps_override = [float(v) for v in args.epsilon_list.split(",") if v]
    kw = dict(s_threshold=args.s_threshold, eps_override=eps_override,
              seed=args.seed, margin=args.margin)
    if len(paths) == 1:
        return run_scenario(paths[0], args.out, **kw)
    codes = []
    with ThreadPoolExecutor(max_workers=_max_threads()) as pool:
        futs = [pool.submit(run_scenario, p, args.out, **kw) for p in paths]
        for f in futs:
            codes.append(f.result())
    return max(codes)


def cmd_render(args) -> int:
    with open(args.state) as fh:
        payload = json.load(fh)
    domain, u = load_state(payload)
    rep = total_energy(domain, u, s_threshold=args.s_threshold)
    ref_svg, def_svg = render_pair(domain, u, bad_triangles=rep.bad_triangles,
                                   violating_triangles=rep.violating_triangles)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    Path(str(out) + "_reference.svg").write_text(ref_svg)
    Path(str(out) + "_deformed.svg").write_text(def_svg)
    print(f"wrote {out}_reference.svg and {out}_deformed.svg")
    return 0


def cmd_wulff(args) -> int:
    poly = WulffPolygon()
    table = poly.polar_table(args.samples, args.j_infinity)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(str(out) + "_polar.csv", ["angle", "phi"], table)
    write_json(str(out) + "_polygon.json",
               {"vertices": poly.vertices, "sectors": poly.sectors})
    # simple polygon figure
    pts = poly.vertices
    lines = ['<svg xmlns="http://www.w3.org/2000/svg" width="400" height="400" viewBox="-1.5 -1.5 3 3">']
    coords = " ".join(f"{p[0]:.6f},{-p[1]:.6f}" for p in pts)
    lines.append(f'<polygon points="{coords}" fill="#cfe2f3" stroke="#333" stroke-width="0.02"/>')
    lines.append("</svg>")
    Path(str(out) + "_polygon.svg").write_text("\n".join(lines))
    print(f"wrote {out}_polar.csv, {out}_polygon.json, {out}_polygon.svg")
    return 0


def cmd_ground_state(args) -> int:
    scan = ground_state_scan(args.r_min, args.r_max, args.samples, args.cutoff,
                             Potential(args.j_infinity))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(str(out) + ".csv", ["r", "e", "rho", "f"],
              zip(scan["r"], scan["e"], scan["rho"], scan["f"]))
    print(f"r_bar = {scan['r_bar']} (e_min = {scan['e_min']})")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="latticefrac",
                                 description="triangular-lattice fracture experiments")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="run one or more TOML scenarios")
    p_run.add_argument("scenario", nargs="+")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--s-threshold", type=float, default=0.5)
    p_run.add_argument("--epsilon-list", default=None,
                       help="comma-separated mesh sizes overriding the scenario")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--margin", type=float, default=0.0,
                       help="admissibility margin for the final report")
    p_run.set_defaults(func=cmd_run)

    p_r = sub.add_parser("render", help="render a state JSON to an SVG pair")
    p_r.add_argument("state")
    p_r.add_argument("--out", default="out/state")
    p_r.add_argument("--s-threshold", type=float, default=0.5)
    p_r.set_defaults(func=cmd_render)

    p_w = sub.add_parser("wulff", help="emit the surface-density polygon and polar table")
    p_w.add_argument("--out", default="out/wulff")
    p_w.add_argument("--samples", type=int, default=360)
    p_w.add_argument("--j-infinity", type=float, default=1.0)
    p_w.set_defaults(func=cmd_wulff)

    p_g = sub.add_parser("ground-state", help="scan the per-particle lattice energy")
    p_g.add_argument("--r-min", type=float, default=0.9)
    p_g.add_argument("--r-max", type=float, default=1.05)
    p_g.add_argument("--samples", type=int, default=301)
    p_g.add_argument("--cutoff", type=float, default=8.0)
    p_g.add_argument("--j-infinity", type=float, default=1.0)
    p_g.add_argument("--out", default="out/ground_state")
    p_g.set_defaults(func=cmd_ground_state)

    p_m = sub.add_parser("minimize", help="run a minimize scenario TOML")
    p_m.add_argument("scenario")
    p_m.add_argument("--out", default="out")
    p_m.set_defaults(func=lambda a: run_scenario(a.scenario, a.out))

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        raise
    except Exception as exc:  # noqa: BLE001 - CLI surface
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
