"""Command line interface: ``risdeploy <command> [--config FILE] ...``.

Every file written starts with the resolved configuration (``#`` comment
lines for CSV/text, a ``resolved_config`` member for JSON), and any such
file can be passed back as ``--config`` to regenerate it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .deployment import effective_region, optimal_ris_rotation, optimize_location, scan_grid
from .fading import db, mc_ergodic_capacity
from .geometry import DomainError, elevation_angles, feasible_interval, link_distances
from .radiometrics import PatternConfig
from .validation import moment_checks, summarize, tightness_checks

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN = 0, 2, 3

SWEEP_AXES = {
    "theta_t0": "theta_t0_deg",
    "theta_r0": "theta_r0_deg",
    "theta_0": "theta_0_deg",
    "l": "l",
    "r": "r",
    "h": "h",
    "q_u": "q_u",
    "p_t": "p_t_dbm",
    "n_units": "n_units",
}


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _dump_json(cfg: RunConfig, payload: dict) -> str:
    doc = {"resolved_config": cfg.as_dict(), **payload}
    return json.dumps(_json_safe(doc), indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _note(msg: str, out: str | None) -> None:
    # keep stdout clean when it carries the artifact itself
    print(msg, file=sys.stdout if out else sys.stderr)


def cmd_angles(cfg: RunConfig, args) -> int:
    scene = cfg.scene
    ang = elevation_angles(scene)
    d_tc, d_cr = link_distances(scene)
    lo, hi = feasible_interval(ang)
    deg = math.degrees
    lines = [
        f"d_tc             = {d_tc:.4f} m",
        f"d_cr             = {d_cr:.4f} m",
        f"alpha            = {deg(ang.alpha):.4f} deg",
        f"beta             = {deg(ang.beta):.4f} deg",
        f"theta_t0_opt     = {deg(ang.theta_t_aod):.4f} deg",
        f"theta_r0_opt     = {deg(ang.theta_r_aoa):.4f} deg",
        f"theta_0_opt      = {deg(optimal_ris_rotation(ang)):.4f} deg",
        f"theta_0_feasible = ({deg(lo):.4f}, {deg(hi):.4f}) deg",
        f"azimuth_tx_aod   = {deg(ang.phi_t_aod):.4f} deg",
        f"azimuth_rx_aoa   = {deg(ang.phi_r_aoa):.4f} deg",
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        _emit(cfg.header() + text, args.out)
    sys.stdout.write(text)
    return EXIT_OK


def _bound_for(cfg: RunConfig, scene, pattern: PatternConfig) -> float:
    return mc_ergodic_capacity(scene, pattern, cfg.spec, cfg.budget, trials=0,
                               directivity_mode=cfg.directivity_mode).upper_bound_bpshz


def cmd_capacity(cfg: RunConfig, args) -> int:
    scene = cfg.scene
    pattern = cfg.pattern(scene)
    report = mc_ergodic_capacity(
        scene, pattern, cfg.spec, cfg.budget, trials=cfg["trials"], seed=cfg["seed"],
        directivity_mode=cfg.directivity_mode, workers=cfg["workers"],
    )
    ang = elevation_angles(scene)
    best = PatternConfig(q_t=pattern.q_t, q_r=pattern.q_r, q_u=pattern.q_u,
                         theta_t0=ang.theta_t_aod, theta_r0=ang.theta_r_aoa,
                         theta_0=optimal_ris_rotation(ang))
    flat = PatternConfig(q_t=pattern.q_t, q_r=pattern.q_r, q_u=pattern.q_u,
                         theta_t0=ang.theta_t_aod, theta_r0=ang.theta_r_aoa, theta_0=0.0)
    c_best, c_flat = _bound_for(cfg, scene, best), _bound_for(cfg, scene, flat)
    payload = {
        "report": report.to_dict(),
        "reference": {
            "bound_optimal_rotations_bpshz": c_best,
            "bound_flat_ris_bpshz": c_flat,
            "ris_rotation_gain_bpshz": c_best - c_flat,
        },
    }
    _emit(_dump_json(cfg, payload), args.out)
    summary = f"upper bound {report.upper_bound_bpshz:.4f} bit/s/Hz, E{{SNR}} {report.expected_snr_db:.2f} dB"
    if report.mc_mean_bpshz is not None:
        summary += f", Monte Carlo {report.mc_mean_bpshz:.4f} +/- {report.mc_stderr_bpshz:.4f} ({report.trials} trials)"
    _note(summary, args.out)
    return EXIT_OK


def sweep_rows(cfg: RunConfig, axis: str, values):
    key = SWEEP_AXES[axis]
    for v in values:
        point = cfg.replace(**{key: int(round(v)) if key == "n_units" else float(v)})
        scene = point.scene
        rep = mc_ergodic_capacity(
            scene, point.pattern(scene), point.spec, point.budget, trials=point["trials"],
            seed=point["seed"], directivity_mode=point.directivity_mode, workers=point["workers"],
        )
        row = [float(v), db(rep.rho_cc), rep.expected_snr_db, rep.upper_bound_bpshz]
        if rep.mc_mean_bpshz is not None:
            row += [rep.mc_mean_bpshz, rep.mc_stderr_bpshz]
        yield row


def cmd_sweep(cfg: RunConfig, args) -> int:
    try:
        values = scan_grid(args.start, args.stop, args.step)
    except DomainError as exc:
        raise ConfigError(f"bad sweep range: {exc}") from None
    buf = io.StringIO()
    buf.write(cfg.header())
    buf.write(f"# sweep axis = {args.axis}, start = {args.start!r}, stop = {args.stop!r}, step = {args.step!r}\n")
    w = csv.writer(buf, lineterminator="\n")
    cols = ["axis_value", "ccg_db", "expected_snr_db", "capacity_bpshz"]
    if cfg["trials"] > 0:
        cols += ["mc_mean", "mc_stderr"]
    w.writerow(cols)
    for row in sweep_rows(cfg, args.axis, values):
        w.writerow(row)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _placement_args(cfg: RunConfig) -> dict:
    return dict(
        R=cfg["R"], h_min=cfg["h_min"], h_max=cfg["h_max"], grid=(cfg["dr"], cfg["dh"]),
        budget=cfg.budget, spec=cfg.spec,
        pattern=PatternConfig(q_t=cfg["q_t"], q_r=cfg["q_r"], q_u=cfg["q_u"]),
        directivity_mode=cfg.directivity_mode,
    )


def cmd_optimize(cfg: RunConfig, args) -> int:
    res = optimize_location(**_placement_args(cfg))
    _emit(_dump_json(cfg, {"result": res.to_dict()}), args.out)
    _note(
        f"optimum r={res.r_opt:g} m (mirror {res.mirror_r_opt:g} m), h={res.h_opt:g} m, "
        f"RIS rotation {res.theta0_opt_deg:.2f} deg, bound {res.capacity_opt_bpshz:.4f} bit/s/Hz",
        args.out,
    )
    return EXIT_OK


def cmd_region(cfg: RunConfig, args) -> int:
    region = effective_region(gamma_th_db=cfg["gamma_th_db"], **_placement_args(cfg))
    buf = io.StringIO()
    buf.write(cfg.header())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r_m", "h_m", "theta0_opt_deg", "ccg_db", "expected_snr_db", "capacity_bpshz", "effective"])
    w.writerows(region.rows())
    _emit(buf.getvalue(), args.out)
    _note(f"{int(region.effective.sum())} of {region.effective.size} cells effective "
          f"at {cfg['gamma_th_db']:g} dB", args.out)
    return EXIT_OK


def cmd_validate_mc(cfg: RunConfig, args) -> int:
    moments = moment_checks(samples=cfg["moment_samples"], seed=cfg["seed"])
    tight = tightness_checks(trials=max(cfg["trials"], 2), seed=cfg["seed"], budget=cfg.budget,
                             spec=cfg.spec, workers=cfg["workers"], R=cfg["R"])
    result = summarize(moments, tight)
    _emit(_dump_json(cfg, {"validation": result}), args.out)
    _note(f"validate-mc: {'PASS' if result['passed'] else 'FAIL'} "
          f"(max relative gap at N=64: {result['max_gap_n64']:.4%})", args.out)
    return EXIT_OK if result["passed"] else 1


COMMANDS = {
    "angles": cmd_angles,
    "capacity": cmd_capacity,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "region": cmd_region,
    "validate-mc": cmd_validate_mc,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file, or a previous output file")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, help="override the Monte Carlo seed")
    common.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    common.add_argument("--workers", type=int, help="worker threads for Monte Carlo")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key (repeatable)")

    parser = argparse.ArgumentParser(prog="risdeploy", description="RIS rotation and placement planning")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "sweep":
            p.add_argument("--axis", required=True, choices=sorted(SWEEP_AXES))
            p.add_argument("--start", type=float, required=True)
            p.add_argument("--stop", type=float, required=True)
            p.add_argument("--step", type=float, required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    for item in args.set:
        if "=" not in item:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return EXIT_CONFIG
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    for flag in ("seed", "trials", "workers"):
        if getattr(args, flag) is not None:
            overrides[flag] = str(getattr(args, flag))
    try:
        cfg = load_config(args.config, overrides)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, OverflowError) as exc:
        print(f"numerical domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
