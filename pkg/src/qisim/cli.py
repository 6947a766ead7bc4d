"""Command-line driver.

Every command loads a config (defaults, optional file, --set overrides),
computes its observables, and emits CSV/JSON/SVG through a single
OutputWriter that records content hashes into manifest.json.  Exit codes:
0 success, 2 config/input error, 3 resolution or model error, 4 one or
more reference checks failed.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import biphoton, config, outputs, qubit, svgplot
from .eit import (EitMedium, fit_gamma_s, group_delay, transmission,
                  window_fwhm)
from .errors import (ConfigError, InputError, ModelError, QisimError,
                     ResolutionError)
from .spectral import TWO_PI, build_jsa, sigma_from_pulse_duration

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_CHECKS = 4

_DEFAULT_SIGMAS = "12.5e6,3.7e6,1e9"
_DEFAULT_TPS = "30e-9,100e-9"
_DEFAULT_STORE_TIMES = "200e-9"
_DEFAULT_BELL_TIMES = "0,200e-9,1e-6"


def _float_list(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part:
            out.append(float(part))
    return out


def _writer(cfg, out_dir=None) -> outputs.OutputWriter:
    directory = out_dir if out_dir is not None else cfg["output.directory"]
    return outputs.OutputWriter(directory, config.formats_from(cfg))


def _finish(cfg, writer) -> None:
    writer.write_manifest(cfg.echo(),
                          outputs.sha256_text(cfg.canonical_text()),
                          config.seed_from(cfg))


# ------------------------------------------------------------- commands

def _visibility_of(cfg, sigma_rad: float) -> float:
    line = config.line_from(cfg)
    pump = config.pump_from(cfg, sigma_hz=sigma_rad / TWO_PI)
    grid = config.grid_from(cfg, line, pump)
    return biphoton.visibility(build_jsa(grid, line, pump))


def cmd_visibility(cfg, writer, sigmas_hz, tps_s) -> int:
    rows = []
    ok = 0
    for tp in tps_s:
        try:
            sigma_rad = sigma_from_pulse_duration(tp)
            v = _visibility_of(cfg, sigma_rad)
            rows.append((sigma_rad / TWO_PI, tp, v, None))
            ok += 1
        except QisimError as exc:
            rows.append((None, tp, None, str(exc)))
    for s_hz in sigmas_hz:
        try:
            v = _visibility_of(cfg, TWO_PI * s_hz)
            rows.append((s_hz, None, v, None))
            ok += 1
        except QisimError as exc:
            rows.append((s_hz, None, None, str(exc)))
    writer.write_csv("visibility.csv",
                     ["sigma_hz", "T_p_s", "visibility", "error"], rows)
    good = sorted((r[0], r[2]) for r in rows if r[3] is None)
    if len(good) >= 2:
        writer.write_svg("visibility.svg", svgplot.curve(
            [g[0] for g in good],
            [("visibility", [g[1] for g in good])],
            "pump bandwidth sigma (Hz)", "visibility V",
            "Spectral-purity visibility vs pump bandwidth"))
    if rows and ok == 0:
        print("visibility: every sweep row failed", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def _timedist_compute(cfg, tp_s: float, with_storage):
    line = config.line_from(cfg)
    pump = config.pump_from(cfg, t_p_s=tp_s)
    grid = config.grid_from(cfg, line, pump)
    jsa = build_jsa(grid, line, pump)
    window = cfg["grids.time_span_factor"] / line.gamma
    lo, hi = -0.2 * window, 0.8 * window
    n_t = cfg["grids.n_time"]
    if with_storage == "eit":
        medium = config.medium_from(cfg)
        tau_d = group_delay(medium)
        hi_ext = hi + 2.0 * tau_d
        factor = max(1, math.ceil((hi_ext - lo) / (hi - lo)))
        t_grid = np.linspace(lo, hi_ext, n_t * factor)
        dist = biphoton.post_storage_distribution(
            jsa, lambda d: transmission(d, medium), t_grid=t_grid)
    elif with_storage == "identity":
        t_grid = np.linspace(lo, hi, n_t)
        dist = biphoton.post_storage_distribution(jsa, None, t_grid=t_grid)
    else:
        t_grid = np.linspace(lo, hi, n_t)
        dist = biphoton.joint_time_distribution(jsa, t_grid)
    return dist


def cmd_timedist(cfg, writer, tp_s: float, with_storage=None,
                 name: str = "timedist") -> int:
    dist = _timedist_compute(cfg, tp_s, with_storage)
    t_ns = dist.t_grid * 1e9
    rows = []
    for i, t1 in enumerate(t_ns):
        for j, t2 in enumerate(t_ns):
            rows.append((t1, t2, dist.density[i, j]))
    writer.write_csv(f"{name}.csv", ["t1_ns", "t2_ns", "density"], rows)
    tag = f", storage: {with_storage}" if with_storage else ""
    writer.write_svg(f"{name}.svg", svgplot.heatmap(
        dist.density, (t_ns[0], t_ns[-1]), "t1 (ns)", "t2 (ns)",
        f"Joint detection-time density (T_p = {tp_s * 1e9:g} ns{tag})"))
    return EXIT_OK


def cmd_eit(cfg, writer, fit_target_hz=None) -> int:
    medium = config.medium_from(cfg)
    fit_info = None
    if fit_target_hz is not None:
        res = fit_gamma_s(medium, fit_target_hz)
        fit_info = {
            "target_hz": res.target_hz,
            "gamma_s_rad_s": res.gamma_s,
            "achieved_window_fwhm_hz": res.window_fwhm_hz,
            "converged": res.converged,
        }
        if not res.converged:
            print(f"eit: gamma_s fit did not converge; best achievable "
                  f"window is {res.window_fwhm_hz:.6g} Hz for target "
                  f"{res.target_hz:.6g} Hz", file=sys.stderr)
            return EXIT_MODEL
        medium = config.medium_from(cfg, gamma_s_hz=res.gamma_s / TWO_PI)

    base = config.medium_from(cfg)
    off_medium = EitMedium(base.optical_depth, 0.0, base.gamma_ge,
                           base.gamma_s, base.length)
    delta_hz = np.linspace(-30e6, 30e6, 2401)
    t_on = np.abs(transmission(TWO_PI * delta_hz, medium)) ** 2
    t_off = np.abs(transmission(TWO_PI * delta_hz, off_medium)) ** 2
    writer.write_csv(
        "eit_spectrum.csv",
        ["delta_hz", "transmission_control_on", "transmission_control_off"],
        list(zip(delta_hz, t_on, t_off)))
    writer.write_svg("eit_spectrum.svg", svgplot.curve(
        delta_hz / 1e6,
        [("control on", t_on), ("control off", t_off)],
        "probe detuning (MHz)", "intensity transmission",
        "Transparency spectrum"))

    fwhm = window_fwhm(medium)
    tau = group_delay(medium)
    report = {
        "window_fwhm_hz": fwhm,
        "group_delay_s": tau,
        "delay_bandwidth_product": TWO_PI * fwhm * tau,
        "delay_bandwidth_convention": "angular: 2*pi*fwhm_hz*delay_s",
        "v_g_m_per_s": medium.length / tau,
        "length_m": medium.length,
        "gamma_s_rad_s": medium.gamma_s,
        "transmission_on_resonance": float(
            np.abs(transmission(0.0, medium)) ** 2),
        "transmission_control_off_resonance": float(
            np.abs(transmission(0.0, off_medium)) ** 2),
        "fit": fit_info,
    }
    writer.write_json("eit_report.json", report)
    return EXIT_OK


def cmd_store(cfg, writer, states, times_s) -> int:
    decay = config.decay_from(cfg)
    results = []
    for t_s in times_s:
        params = config.channel_from(cfg, t_s)
        battery = qubit.six_state_battery(params, decay.eta)
        fids = {name: battery[name] for name in states}
        fids["average"] = sum(fids[n] for n in states) / len(states)
        results.append({"t_s": t_s, "fidelities": fids})
    writer.write_json("store_report.json", {"states": list(states),
                                            "results": results})
    first = results[0]["fidelities"]
    writer.write_svg("store_fidelities.svg", svgplot.bars(
        list(states) + ["avg"],
        [first[n] for n in states] + [first["average"]],
        "fidelity",
        f"Storage fidelities at t_s = {results[0]['t_s'] * 1e9:g} ns"))
    return EXIT_OK


def cmd_bell(cfg, writer, times_s) -> int:
    v_src = cfg["channel.V_src"]
    source = qubit.werner_state(v_src)
    decay = config.decay_from(cfg)
    s_local = qubit.chsh_S(source)
    rows = []
    last_state = source
    for t_s in times_s:
        params = config.channel_from(cfg, t_s, balanced=True)
        state = qubit.memory_channel_two_qubit(source, params, decay.eta,
                                               arm=2)
        s = qubit.chsh_S(state)
        rows.append({"t_s": t_s, "S": s, "violated": bool(s > 2.0)})
        last_state = state
    thetas = np.linspace(0.0, math.pi, 181)
    curve_h = qubit.correlation_curve(last_state, "H", thetas)
    curve_p = qubit.correlation_curve(last_state, "plus", thetas)
    writer.write_csv("bell_curve.csv",
                     ["theta_rad", "coincidence_H", "coincidence_plus"],
                     list(zip(thetas, curve_h, curve_p)))
    writer.write_svg("bell_curve.svg", svgplot.curve(
        np.degrees(thetas),
        [("flying H", curve_h), ("flying +", curve_p)],
        "analyzer angle (deg)", "normalized coincidences",
        f"Polarization correlation after {times_s[-1] * 1e6:g} us storage"))
    report = {
        "V_src": v_src,
        "angles_rad": list(qubit.CHSH_ANGLES),
        "convention": "minus",
        "S_local": s_local,
        "violated_local": bool(s_local > 2.0),
        "rows": rows,
        "curve": {
            "t_s": times_s[-1],
            "visibility_H": qubit.curve_visibility(curve_h),
            "visibility_plus": qubit.curve_visibility(curve_p),
        },
    }
    writer.write_json("bell_report.json", report)
    return EXIT_OK


def cmd_g13(cfg, writer, times_s) -> int:
    g0 = cfg["g13.g0"]
    decay = config.decay_from(cfg)
    rows = []
    for t in times_s:
        g = qubit.g13_decay_model(t, g0, decay.eta)
        alpha = qubit.alpha_quality(g) if g > 1.0 else None
        rows.append((t, g, alpha))
    writer.write_csv("g13.csv", ["t_s", "g13", "alpha"], rows)
    try:
        crossing = qubit.crossing_time(g0, decay.eta, threshold=5.0)
    except ModelError:
        crossing = None
    report = {
        "g0": g0,
        "threshold": 5.0,
        "crossing_time_s": crossing,
        "alpha_at_threshold": 1.0,
    }
    writer.write_json("g13_report.json", report)
    writer.write_svg("g13_curve.svg", svgplot.curve(
        np.asarray(times_s) * 1e6,
        [("g13", [r[1] for r in rows]),
         ("threshold", [5.0] * len(rows))],
        "storage time (us)", "cross-correlation g13",
        "Pair cross-correlation vs storage time"))
    return EXIT_OK


def _check(cid, value, target, tol, relative=False):
    err = abs(value - target)
    bound = tol * abs(target) if relative else tol
    return {
        "id": cid,
        "value": value,
        "target": target,
        "tolerance": bound,
        "relative": relative,
        "passed": bool(err <= bound),
    }


def cmd_reproduce_all(cfg, writer) -> int:
    cmd_visibility(cfg, writer, _float_list(_DEFAULT_SIGMAS),
                   _float_list(_DEFAULT_TPS))
    cmd_timedist(cfg, writer, 100e-9, None, name="timedist_tp100ns")
    cmd_timedist(cfg, writer, 30e-9, None, name="timedist_tp30ns")
    cmd_eit(cfg, writer)
    cmd_store(cfg, writer, list(qubit.SIX_STATES), [200e-9])
    cmd_bell(cfg, writer, _float_list(_DEFAULT_BELL_TIMES))
    cmd_g13(cfg, writer, list(np.linspace(0.0, 4e-6, 81)))

    checks = []
    checks.append(_check("vis_sigma_12p5MHz",
                         _visibility_of(cfg, TWO_PI * 12.5e6), 0.97, 0.01))
    checks.append(_check("vis_sigma_3p7MHz",
                         _visibility_of(cfg, TWO_PI * 3.7e6), 0.80, 0.02))

    medium = config.medium_from(cfg)
    fit = fit_gamma_s(medium, 5.5e6)
    eit_medium = config.medium_from(cfg, gamma_s_hz=fit.gamma_s / TWO_PI)
    fwhm = window_fwhm(eit_medium)
    tau = group_delay(eit_medium)
    checks.append(_check("eit_window_fwhm", fwhm, 5.5e6, 0.10,
                         relative=True))
    checks.append(_check("eit_group_delay", tau, 200e-9, 0.10,
                         relative=True))
    checks.append(_check("eit_dbp", TWO_PI * fwhm * tau, 7.0, 0.15,
                         relative=True))
    checks.append(_check("eit_vg", eit_medium.length / tau, 2e4, 0.10,
                         relative=True))
    off = EitMedium(medium.optical_depth, 0.0, medium.gamma_ge,
                    medium.gamma_s, medium.length)
    checks.append(_check("eit_control_off_transmission",
                         float(np.abs(transmission(0.0, off)) ** 2),
                         math.exp(-55.0), 1e-6, relative=True))

    decay = config.decay_from(cfg)
    battery = qubit.six_state_battery(config.channel_from(cfg, 200e-9),
                                      decay.eta)
    refs = {"H": 0.954, "V": 0.989, "plus": 0.909, "minus": 0.889,
            "R": 0.920, "L": 0.881}
    worst = max(abs(battery[n] - refs[n]) for n in refs)
    checks.append({
        "id": "six_state_each",
        "value": worst,
        "target": 0.0,
        "tolerance": 0.04,
        "relative": False,
        "passed": bool(worst <= 0.04),
    })
    checks.append(_check("six_state_average", battery["average"],
                         0.924, 0.03))

    checks.append(_check("bell_ideal_S", qubit.chsh_S(qubit.bell_state()),
                         2.0 * math.sqrt(2.0), 1e-9))
    params_1us = config.channel_from(cfg, 1e-6, balanced=True)
    stored = qubit.memory_channel_two_qubit(
        qubit.werner_state(cfg["channel.V_src"]), params_1us, decay.eta,
        arm=2)
    checks.append(_check("bell_S_1us", qubit.chsh_S(stored), 2.28, 0.17))
    checks.append(_check("g13_crossing",
                         qubit.crossing_time(cfg["g13.g0"], decay.eta, 5.0),
                         2e-6, 0.10, relative=True))

    failed = [c["id"] for c in checks if not c["passed"]]
    writer.write_json("checks.json", {"checks": checks, "failed": failed})
    if failed:
        print("reproduce-all: %d reference check(s) failed: %s"
              % (len(failed), ", ".join(failed)), file=sys.stderr)
        return EXIT_CHECKS
    return EXIT_OK


# ---------------------------------------------------------------- driver

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="config file path")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--out", default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qisim",
        description="Photon-pair source and atomic-memory simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("visibility", help="spectral visibility sweep")
    _add_common(p)
    p.add_argument("--sigma-hz", default=_DEFAULT_SIGMAS,
                   help="comma-separated pump bandwidths (Hz)")
    p.add_argument("--tp-s", default=_DEFAULT_TPS,
                   help="comma-separated pump durations (s)")

    p = sub.add_parser("timedist", help="joint detection-time density")
    _add_common(p)
    p.add_argument("--tp-s", type=float, default=100e-9,
                   help="pump duration (s)")
    p.add_argument("--with-storage", choices=["eit", "identity"],
                   default=None, help="filter the signal axis")

    p = sub.add_parser("eit", help="transparency spectrum and delay report")
    _add_common(p)
    p.add_argument("--fit-gamma-s", type=float, default=None,
                   metavar="TARGET_HZ",
                   help="fit gamma_s to a target window FWHM (Hz)")

    p = sub.add_parser("store", help="six-state storage fidelities")
    _add_common(p)
    p.add_argument("--states", default=",".join(qubit.SIX_STATES),
                   help="comma-separated subset of H,V,plus,minus,R,L")
    p.add_argument("--storage-times-s", default=_DEFAULT_STORE_TIMES,
                   help="comma-separated storage times (s)")

    p = sub.add_parser("bell", help="CHSH S versus storage time")
    _add_common(p)
    p.add_argument("--storage-times-s", default=_DEFAULT_BELL_TIMES,
                   help="comma-separated storage times (s)")

    p = sub.add_parser("g13", help="cross-correlation decay report")
    _add_common(p)
    p.add_argument("--times-s", default=None,
                   help="comma-separated times (s); default 0..4us")

    p = sub.add_parser("reproduce-all",
                       help="run every command and check reference numbers")
    _add_common(p)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config.load_config(args.config, args.set)
        writer = _writer(cfg, args.out)
        if args.command == "visibility":
            code = cmd_visibility(cfg, writer, _float_list(args.sigma_hz),
                                  _float_list(args.tp_s))
        elif args.command == "timedist":
            code = cmd_timedist(cfg, writer, args.tp_s, args.with_storage)
        elif args.command == "eit":
            code = cmd_eit(cfg, writer, args.fit_gamma_s)
        elif args.command == "store":
            states = [s.strip() for s in args.states.split(",") if s.strip()]
            for s in states:
                if s not in qubit.SIX_STATES:
                    raise ConfigError(f"unknown state {s!r}")
            code = cmd_store(cfg, writer,
                             states, _float_list(args.storage_times_s))
        elif args.command == "bell":
            code = cmd_bell(cfg, writer, _float_list(args.storage_times_s))
        elif args.command == "g13":
            times = (_float_list(args.times_s) if args.times_s
                     else list(np.linspace(0.0, 4e-6, 81)))
            code = cmd_g13(cfg, writer, times)
        else:
            code = cmd_reproduce_all(cfg, writer)
        _finish(cfg, writer)
        return code
    except (ConfigError, InputError) as exc:
        print(f"qisim: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResolutionError, ModelError) as exc:
        print(f"qisim: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as exc:
        print(f"qisim: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
