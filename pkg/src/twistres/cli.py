"""Command-line entry point.

Every subcommand reads one INI config (``--config``) and writes its
artifacts into ``--out``: a ``<command>.json`` report plus the CSV files
of that command. Exit codes: 0 on success, 1 for configuration and usage
problems, 2 when the numerics refuse (lost resonance, unresolved mesh,
pole collisions).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import parse_config
from .cross_section import (coupling_matrices, solve_transverse_modes,
                            twisted_surface_points)
from .errors import ConfigError, NumericsError
from .longitudinal import (bound_states, numeric_bound_levels,
                           poschl_teller_levels, validate_assumption_moment)
from .report import (make_report, read_report, read_csv_sidecar, timer,
                     write_csv, write_report)
from .scaled import (assemble_channel_system, default_length, default_points,
                     epsilon_scan, essential_rays, nearby_spectrum)
from .width import (classify_spectrum, delta_gradient_im, width_coefficient,
                    width_vs_nu)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to the config exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _channel_payload(ch):
    return {"k": ch.k, "E_k": ch.E_k, "lam": ch.lam, "coupling": ch.coupling,
            "open": ch.open, "im_resolvent": ch.im_resolvent,
            "re_resolvent": ch.re_resolvent, "contribution": ch.contribution}


def _solve_modes(cfg, count):
    cfg.require("cross_section")
    return solve_transverse_modes(cfg.cross_section, count, path=cfg.mode_path)


def _cmd_modes(cfg, out_dir):
    mset = _solve_modes(cfg, cfg.mode_count)
    coup = coupling_matrices(mset)
    payload = {
        "count": len(mset.modes),
        "path": mset.path,
        "eigenvalues": mset.eigenvalues.tolist(),
        "degenerate": list(mset.degenerate),
        "T1": coup.T1.tolist(),
        "T2": coup.T2.tolist(),
        "asymmetry_residual": coup.asymmetry_residual,
        "completeness_defect": coup.completeness_defect().tolist(),
    }
    summary = (f"{len(mset.modes)} modes ({mset.path} path), "
               f"E_1 = {mset.eigenvalues[0]:.9g}, "
               f"T1 asymmetry {coup.asymmetry_residual:.2e}")
    return payload, summary


def _cmd_spectrum1d(cfg, out_dir):
    cfg.require("potential")
    pot = cfg.potential
    payload = {"kind": pot.kind}
    if pot.kind == "poschl_teller":
        exact = poschl_teller_levels(pot.nu)
        numeric = numeric_bound_levels(pot)[:exact.size]
        err = float(np.max(np.abs(numeric - exact))) if numeric.size else 0.0
        payload.update(nu=pot.nu, levels=exact.tolist(),
                       levels_numeric=numeric.tolist(), max_abs_error=err,
                       count=int(exact.size))
        summary = (f"{exact.size} bound level(s), numeric check "
                   f"max|err| = {err:.2e}")
    elif pot.kind == "delta_limit":
        payload.update(levels=[-0.25], levels_numeric=None,
                       max_abs_error=None, count=1)
        summary = "point interaction: single level mu = -1/4"
    elif pot.kind == "free":
        payload.update(levels=[], levels_numeric=[], max_abs_error=0.0,
                       count=0)
        summary = "free line: no bound states"
    else:
        numeric = numeric_bound_levels(pot)
        payload.update(levels=numeric.tolist(), levels_numeric=numeric.tolist(),
                       max_abs_error=None, count=int(numeric.size))
        summary = f"{numeric.size} numeric bound level(s)"

    if pot.kind == "sampled":
        xs = np.linspace(pot.x[0], pot.x[-1], 2001)
    else:
        R = pot.decay_radius if pot.decay_radius > 0 else 10.0
        xs = np.linspace(-R, R, 2001)
    Vs = np.zeros_like(xs) if pot.kind == "delta_limit" else np.real(pot.V(xs))
    note = ("regular part only; the point mass at x = 0 is not representable"
            if pot.kind == "delta_limit" else "potential samples for plotting")
    write_csv(out_dir, "potential",
              [("x", "axis coordinate"), ("V", note)],
              zip(xs, Vs), cfg.config_hash)
    return payload, summary


def _cmd_classify(cfg, out_dir):
    cfg.require("cross_section", "potential")
    mset = _solve_modes(cfg, cfg.mode_count)
    cls = classify_spectrum(mset, cfg.potential)
    payload = {
        "thresholds": list(cls.thresholds),
        "entries": [{"n": e.n, "j": e.j, "E": e.E, "embedded": e.embedded,
                     "simple": e.simple} for e in cls.entries],
        "sigma_minus": [e.E for e in cls.sigma_minus],
        "sigma_plus": [e.E for e in cls.sigma_plus],
    }
    summary = (f"{len(cls.sigma_minus)} below threshold, "
               f"{len(cls.sigma_plus)} embedded")
    return payload, summary


def _cmd_width(cfg, out_dir):
    cfg.require("cross_section", "potential", "twist")
    mset = _solve_modes(cfg, max(cfg.K, cfg.target_n))
    coup = coupling_matrices(mset)
    res = width_coefficient(mset, coup, cfg.potential, cfg.twist,
                            cfg.target_n, cfg.target_j, engine=cfg.engine)
    payload = {"E": res.E, "n": res.n, "j": res.j, "k_star": res.k_star,
               "a": res.a, "C0": res.C0, "engine": res.engine,
               "channels": [_channel_payload(c) for c in res.channels]}
    summary = f"a = {res.a:.9g} (k* = {res.k_star}, E = {res.E:.9g})"
    return payload, summary


def _cmd_limit(cfg, out_dir):
    cfg.require("cross_section")
    n = cfg.target_n
    mset = _solve_modes(cfg, max(cfg.K, n, 2))
    coup = coupling_matrices(mset)
    thr = mset.eigenvalues
    E = float(thr[n - 1]) - 0.25
    if E <= thr[0]:
        raise ConfigError(
            f"E_{n} - 1/4 = {E:.9g} is not embedded: the gap to the first "
            "threshold must exceed the binding energy 1/4")
    channels = []
    a = 0.0
    strongest = 0.0
    for k in range(1, coup.K + 1):
        lam = E - float(thr[k - 1])
        c = float(coup.T1[k - 1, n - 1])
        entry = {"k": k, "E_k": float(thr[k - 1]), "lam": lam, "coupling": c,
                 "open": lam > 0}
        if lam > 0 and abs(c) > 0:
            term = 4.0 * c * c * delta_gradient_im(lam)
            entry["contribution"] = term
            a += term
            strongest = max(strongest, abs(c))
        else:
            entry["contribution"] = 0.0
        channels.append(entry)
    trivial = strongest < 1e-12
    if trivial:
        print("warning: the target mode couples trivially at leading order "
              "(all open-channel T1 entries vanish); the limit width is 0",
              file=sys.stderr)
    payload = {"n": n, "E_n": float(thr[n - 1]), "E": E, "a": a,
               "trivial": trivial, "channels": channels}
    summary = f"limit width a = {a:.9g} at E = {E:.9g}"
    return payload, summary


def _cmd_nu_scan(cfg, out_dir):
    cfg.require("cross_section", "twist")
    if not cfg.scan_nu:
        raise ConfigError("nu-scan needs a nonempty 'nu' list in [scan]")
    mset = _solve_modes(cfg, max(cfg.K, cfg.target_n))
    coup = coupling_matrices(mset)
    res = width_vs_nu(mset, coup, cfg.twist, cfg.target_n, cfg.scan_nu,
                      engine=cfg.engine)
    write_csv(out_dir, "nu_scan",
              [("nu", "well steepness"),
               ("a", "width coefficient at this nu"),
               ("distance", "|a(nu) - a_limit|")],
              [(r.nu, r.a, r.distance) for r in res.rows], cfg.config_hash)
    payload = {"rows": [{"nu": r.nu, "E": r.E, "a": r.a,
                         "distance": r.distance} for r in res.rows],
               "a_limit": res.a_limit, "E_limit": res.E_limit,
               "monotone": res.monotone}
    summary = (f"a_limit = {res.a_limit:.9g}, closest distance "
               f"{res.rows[-1].distance:.3e}, monotone = {res.monotone}")
    return payload, summary


def _cmd_eps_scan(cfg, out_dir):
    cfg.require("cross_section", "potential", "twist")
    if not cfg.scan_eps:
        raise ConfigError("eps-scan needs a nonempty 'eps' list in [scan]")
    K = cfg.K
    if cfg.target_n > K:
        raise ConfigError(f"target n={cfg.target_n} is outside the K={K} "
                          "coupled channels")
    mset = _solve_modes(cfg, max(K, cfg.target_n))
    coup = coupling_matrices(mset)
    if cfg.potential.kind == "sampled":
        mus = numeric_bound_levels(cfg.potential)
    else:
        mus = [s.mu for s in bound_states(cfg.potential)]
    if cfg.target_j > len(mus):
        raise ConfigError(f"the potential has {len(mus)} bound states; "
                          f"j={cfg.target_j} does not exist")
    thr = mset.eigenvalues
    E = float(thr[cfg.target_n - 1] + mus[cfg.target_j - 1])
    gap = E - float(thr[0])
    if gap <= 0:
        raise ConfigError(f"target E = {E:.9g} is not embedded")
    theta = 1j * cfg.im_theta
    L = cfg.L if cfg.L is not None else default_length(
        theta, gap, cfg.twist, potential=cfg.potential, j=cfg.target_j)
    N = cfg.N if cfg.N is not None else default_points(cfg.potential, L,
                                                       theta, E_scale=E)
    system = assemble_channel_system(cfg.potential, cfg.twist, mset, coup,
                                     K, L, N, theta, epsilon=0.0,
                                     order=cfg.order)
    if cfg.scan_radius is not None:
        radius = cfg.scan_radius
    else:
        radius = 0.5 * min(r.distance_to(E) for r in system.rays)
    res = epsilon_scan(system, cfg.scan_eps, E, radius)
    write_csv(out_dir, "scan",
              [("epsilon", "twist strength"),
               ("re_E", "real part of the resonance"),
               ("im_E", "imaginary part of the resonance"),
               ("residual", "relative eigenpair residual")],
              [(r.eps, r.re_E, r.im_E, r.residual) for r in res.rows],
              cfg.config_hash)
    payload = {"target": E, "radius": radius, "a_fit": res.a_fit,
               "cubic_residual": res.cubic_residual, "K": K, "L": system.L,
               "N": system.N, "im_theta": cfg.im_theta, "order": cfg.order,
               "low_accuracy": system.low_accuracy,
               "thresholds": system.thresholds.tolist(),
               "rows": [{"eps": r.eps, "re_E": r.re_E, "im_E": r.im_E,
                         "residual": r.residual} for r in res.rows]}
    if cfg.dump_spectrum:
        cloud = nearby_spectrum(system.with_epsilon(res.rows[-1].eps), E,
                                cfg.spectrum_count)
        write_csv(out_dir, "spectrum",
                  [("re", "real part of the eigenvalue"),
                   ("im", "imaginary part of the eigenvalue")],
                  [(z.real, z.imag) for z in cloud], cfg.config_hash)
    summary = (f"a_fit = {res.a_fit:.9g} over {len(res.rows)} eps values "
               f"(cubic residual {res.cubic_residual:.2e})")
    return payload, summary


def _cmd_surface(cfg, out_dir):
    cfg.require("cross_section", "twist")
    sp = cfg.surface
    pts = twisted_surface_points(cfg.cross_section, sp.eps, cfg.twist,
                                 x_range=(sp.x_min, sp.x_max), n_x=sp.n_x,
                                 n_boundary=sp.n_boundary)
    write_csv(out_dir, "surface",
              [("x", "axis coordinate"),
               ("y", "first cross-section coordinate after twisting"),
               ("z", "second cross-section coordinate after twisting")],
              pts, cfg.config_hash)
    payload = {"eps": sp.eps, "n_x": sp.n_x, "n_boundary": sp.n_boundary,
               "x_min": sp.x_min, "x_max": sp.x_max,
               "points": int(pts.shape[0])}
    summary = f"{pts.shape[0]} surface points at eps = {sp.eps:g}"
    return payload, summary


def _cmd_validate(cfg, out_dir):
    problems = []
    checked = []
    payload = {"config_hash": cfg.config_hash}
    if cfg.potential is not None:
        rep = validate_assumption_moment(cfg.potential)
        payload["moment"] = {"kind": rep.kind, "integral": rep.integral,
                             "weighted_moment": rep.weighted_moment,
                             "finite": rep.finite, "note": rep.note}
    out_dir = Path(out_dir)
    if out_dir.is_dir():
        for jpath in sorted(out_dir.glob("*.json")):
            if jpath.name == "validate.json":
                continue
            doc = read_report(jpath)
            checked.append(jpath.name)
            if doc["config_hash"] != cfg.config_hash:
                problems.append(f"{jpath.name}: config_hash "
                                f"{doc['config_hash'][:12]}... does not match "
                                f"this config ({cfg.config_hash[:12]}...)")
        for spath in sorted(out_dir.glob("*.columns.txt")):
            fname, chash, cols = read_csv_sidecar(spath)
            checked.append(spath.name)
            if chash != cfg.config_hash:
                problems.append(f"{spath.name}: config_hash mismatch")
            csv_path = out_dir / fname
            if not csv_path.is_file():
                problems.append(f"{spath.name}: documented file {fname} "
                                "is missing")
                continue
            header = csv_path.read_text().splitlines()[0].split(",")
            if [h.strip() for h in header] != cols:
                problems.append(f"{fname}: header does not match its sidecar")
    payload["checked"] = checked
    payload["problems"] = problems
    if problems:
        raise ConfigError("run directory inconsistent: " +
                          "; ".join(problems))
    summary = f"{len(checked)} artifact(s) consistent"
    return payload, summary


_COMMANDS = {
    "modes": (_cmd_modes, "transverse modes and coupling matrices"),
    "spectrum1d": (_cmd_spectrum1d, "longitudinal bound levels"),
    "classify": (_cmd_classify, "split the point spectrum at the first threshold"),
    "width": (_cmd_width, "second-order resonance width coefficient"),
    "limit": (_cmd_limit, "closed-form width in the deep-well limit"),
    "nu-scan": (_cmd_nu_scan, "width versus well steepness"),
    "eps-scan": (_cmd_eps_scan, "resonance trajectory versus twist strength"),
    "surface": (_cmd_surface, "twisted tube boundary point cloud"),
    "validate": (_cmd_validate, "check config and run-directory consistency"),
}


def build_parser():
    parser = _ArgumentParser(
        prog="twistres",
        description="resonances of mildly twisted waveguides")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command",
                                parser_class=_ArgumentParser)
    for name, (_, help_text) in _COMMANDS.items():
        s = sub.add_parser(name, help=help_text, description=help_text)
        s.add_argument("--config", required=True,
                       help="INI run configuration")
        s.add_argument("--out", default=".",
                       help="output directory (default: current directory)")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    t0 = timer()
    try:
        cfg = parse_config(args.config)
        handler = _COMMANDS[args.command][0]
        payload, summary = handler(cfg, Path(args.out))
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except NumericsError as err:
        print(f"numerics: {err}", file=sys.stderr)
        return 2
    report = make_report(args.command, cfg.config_hash, payload,
                         wall_time_s=timer() - t0)
    path = write_report(report, args.out)
    print(f"{summary} -> {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
