"""Command-line front end: rate sweeps, landmarks, finite-blocklength
bounds, seeded simulations and a fast self-validation suite.

Output is deterministic: CSV uses 12 significant digits with LF endings,
JSON is emitted with sorted keys. All values equal the underlying library
calls exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from . import __version__, binary, finite, simulate, spherical
from .numerics import LN2, binary_entropy

_BINARY_BOUNDS = ("gallager", "bz_e", "bz_x", "m_plus", "m_minus")
_SPHERICAL_BOUNDS = ("shannon", "m_error", "m_erasure")
_BOUND_ORDER = _BINARY_BOUNDS + _SPHERICAL_BOUNDS


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _make_channel(args):
    if args.channel == "bsc":
        if args.p is None:
            raise UsageError("--p is required for --channel bsc")
        return binary.BscChannel(args.p)
    if args.snr is None:
        raise UsageError("--snr is required for --channel awgn")
    return spherical.AwgnChannel(args.snr)


def _curve_rows(args, ch) -> list[tuple[float, str, float, str, bool]]:
    if args.channel == "bsc":
        allowed, native_bits = _BINARY_BOUNDS, True
    else:
        allowed, native_bits = _SPHERICAL_BOUNDS, False
    names = args.bounds.split(",") if args.bounds else list(allowed)
    for b in names:
        if b not in _BOUND_ORDER:
            raise UsageError(f"unknown bound name: {b}")
        if b not in allowed:
            raise UsageError(f"bound {b} is not defined for channel {args.channel}")
    names = [b for b in _BOUND_ORDER if b in names]

    want_bits = args.units == "bits"
    # Convert the user grid into the channel's native units, and values back.
    in_scale = 1.0 if want_bits == native_bits else (LN2 if want_bits else 1.0 / LN2)
    out_scale = 1.0 / in_scale

    rows = []
    for r_user in np.linspace(args.rmin, args.rmax, args.steps):
        r = float(r_user) * in_scale
        per_bound = {}
        if args.channel == "bsc":
            if "gallager" in names:
                per_bound["gallager"] = binary.gallager_exponent(r, ch)
            if "bz_e" in names or "bz_x" in names:
                ee, ex = binary.bz_bounds(r, ch, args.tau)
                per_bound["bz_e"], per_bound["bz_x"] = ee, ex
            if "m_plus" in names or "m_minus" in names:
                mp, mm = binary.tradeoff_bounds(r, ch, args.tau)
                per_bound["m_plus"], per_bound["m_minus"] = mp, mm
        else:
            if "shannon" in names:
                per_bound["shannon"] = spherical.shannon_exponent(r, ch)
            if "m_error" in names:
                per_bound["m_error"] = spherical.tradeoff_exponent(r, ch, args.tau, "error")
            if "m_erasure" in names:
                per_bound["m_erasure"] = spherical.tradeoff_exponent(r, ch, args.tau, "erasure")
        for b in names:
            v = per_bound[b]
            rows.append((float(r_user), b, v.value * out_scale, v.regime, v.valid))
    return rows


def _rows_to_csv(rows) -> str:
    lines = [f"# eebounds {__version__}", "R,bound,value,regime,valid"]
    for r, b, v, regime, valid in rows:
        lines.append(f"{_fmt(r)},{b},{_fmt(v)},{regime},{'true' if valid else 'false'}")
    return "\n".join(lines) + "\n"


def _rows_to_svg(rows, title: str) -> str:
    """Minimal static SVG: one polyline per bound over the valid points."""
    width, height, margin = 640, 440, 56
    by_bound: dict[str, list[tuple[float, float]]] = {}
    for r, b, v, _, valid in rows:
        if valid and math.isfinite(v):
            by_bound.setdefault(b, []).append((r, v))
    pts = [p for ps in by_bound.values() for p in ps]
    if not pts:
        raise UsageError("no valid points to plot")
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
    ]
    for i, (b, ps) in enumerate(sorted(by_bound.items())):
        color = palette[i % len(palette)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in ps)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{width - margin + 4}" y="{margin + 16 * i + 10}" '
            f'font-size="11" fill="{color}">{b}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_curve(args) -> int:
    ch = _make_channel(args)
    rows = _curve_rows(args, ch)
    if args.format == "csv":
        _emit(_rows_to_csv(rows), args.out)
    elif args.format == "json":
        obj = {
            "version": __version__,
            "rows": [
                {"R": r, "bound": b, "value": v, "regime": g, "valid": ok}
                for r, b, v, g, ok in rows
            ],
        }
        _emit(_json_dump(obj), args.out)
    else:
        title = f"{args.channel} tau={args.tau:g}"
        _emit(_rows_to_svg(rows, title), args.out)
    return 0


def cmd_landmarks(args) -> int:
    ch = _make_channel(args)
    if args.channel == "bsc":
        lm = binary.landmarks(ch, args.tau)
        obj = {
            "version": __version__,
            "channel": "bsc",
            "p": ch.p,
            "tau": args.tau,
            "rho0": lm.rho0,
            "omega0": lm.omega0,
            "R_e": lm.R_e,
            "R_c": lm.R_c,
            "rho0_plus": lm.rho0_plus,
            "rho0_minus": lm.rho0_minus,
            "omega0_tau": lm.omega0_tau,
            "residuals": {},
        }
    else:
        try:
            lm = spherical.spherical_landmarks(args.tau, ch)
        except Exception as exc:  # structured root-finding failure
            _emit(
                _json_dump(
                    {
                        "version": __version__,
                        "channel": "awgn",
                        "error": str(exc),
                        "snr": ch.A,
                        "tau": args.tau,
                    }
                ),
                args.out,
            )
            return 1
        obj = {
            "version": __version__,
            "channel": "awgn",
            "snr": ch.A,
            "tau": args.tau,
            "theta_e": lm.theta_e,
            "theta_c": lm.theta_c,
            "theta_1": lm.theta_1,
            "theta_2": lm.theta_2,
            "R_star": lm.R_star,
            "residuals": lm.residuals or {},
        }
    _emit(_json_dump(obj), args.out)
    return 0


def cmd_finite_bound(args) -> int:
    ch = _make_channel(args)
    if args.channel == "bsc":
        rate = args.rate if args.units == "bits" else args.rate / LN2
        wd = finite.WeightDistribution.gv_ensemble(args.n, rate)
        lb = finite.binary_union_bound(wd, ch.p, finite.MarginParams(t=args.t), args.mode)
        obj = {
            "version": __version__,
            "channel": "bsc",
            "n": args.n,
            "rate_bits": rate,
            "p": ch.p,
            "t": args.t,
            "mode": args.mode,
            "log2_bound": lb,
            "exponent_bits": -lb / args.n,
        }
    else:
        rate = args.rate if args.units == "nats" else args.rate * LN2
        wd = finite.WeightDistribution.binomial_spherical(args.n, rate)
        rho = args.rho if args.rho is not None else spherical.decoding_radius(rate, args.tau, ch)
        lb = finite.awgn_union_bound(wd, ch, args.tau, rho)
        obj = {
            "version": __version__,
            "channel": "awgn",
            "n": args.n,
            "rate_nats": rate,
            "snr": ch.A,
            "tau": args.tau,
            "rho": rho,
            "ln_bound": lb,
            "exponent_nats": -lb / args.n,
        }
    _emit(_json_dump(obj), args.out)
    return 0


def _wilson_dict(tally: simulate.TrialTally) -> dict:
    out = {}
    for cls in ("correct", "undetected", "erasure"):
        lo, hi = tally.wilson(cls)
        out[cls] = {"rate": tally.rate(cls), "wilson95": [lo, hi]}
    return out


def cmd_simulate(args) -> int:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)

    def opt(name, flag_value, default=None):
        return flag_value if flag_value is not None else cfg.get(name, default)

    seed = opt("seed", args.seed)
    if seed is None:
        raise UsageError("a seed is required for simulation (use --seed)")
    seed = int(seed)
    kind = opt("kind", args.kind)
    if kind is None:
        raise UsageError("simulation kind is required (use --kind bsc|awgn|cone)")
    trials = int(opt("trials", args.trials, 100000))
    workers = int(opt("workers", args.workers, 1))
    ns = opt("n", args.n)

    if kind == "bsc":
        if ns is None or len(ns) != 1:
            raise UsageError("bsc simulation needs exactly one --n")
        n = int(ns[0])
        k = opt("k", args.k)
        p = opt("p", args.p)
        if k is None or p is None:
            raise UsageError("bsc simulation needs --k and --p")
        t = int(opt("t", args.t, 0))
        code_seed = int(opt("code_seed", args.code_seed, 0))
        code = simulate.gen_linear_code(n, int(k), code_seed)
        tally = simulate.simulate_bsc(code, float(p), t, trials, seed, workers)
        obj = {
            "version": __version__,
            "kind": "bsc",
            "n": n,
            "k": int(k),
            "code_seed": code_seed,
            "p": float(p),
            "t": t,
            "trials": trials,
            "seed": seed,
            "counts": {
                "correct": tally.correct,
                "undetected": tally.undetected,
                "erasure": tally.erasure,
            },
            "rates": _wilson_dict(tally),
        }
    elif kind == "awgn":
        if ns is None or len(ns) != 1:
            raise UsageError("awgn simulation needs exactly one --n")
        n = int(ns[0])
        snr = opt("snr", args.snr)
        M = opt("M", args.M)
        tau = float(opt("tau", args.tau, 0.0))
        if snr is None or M is None:
            raise UsageError("awgn simulation needs --snr and --M")
        code_seed = int(opt("code_seed", args.code_seed, 0))
        cb = simulate.SphericalCodebook.random(int(M), n, float(snr), code_seed)
        tally = simulate.simulate_awgn(cb, tau, trials, seed, workers)
        obj = {
            "version": __version__,
            "kind": "awgn",
            "n": n,
            "M": int(M),
            "code_seed": code_seed,
            "snr": float(snr),
            "tau": tau,
            "trials": trials,
            "seed": seed,
            "counts": {
                "correct": tally.correct,
                "undetected": tally.undetected,
                "erasure": tally.erasure,
            },
            "rates": _wilson_dict(tally),
        }
    elif kind == "cone":
        snr = opt("snr", args.snr)
        phi = opt("phi", args.phi)
        if ns is None or snr is None or phi is None:
            raise UsageError("cone simulation needs --n (one or more), --snr and --phi")
        ch = spherical.AwgnChannel(float(snr))
        points = []
        per_n = []
        for n in ns:
            est, (lo, hi), exits = simulate.simulate_cone_exit(
                int(n), ch, float(phi), trials, seed, workers
            )
            per_n.append(
                {"n": int(n), "estimate": est, "exits": exits, "wilson95": [lo, hi]}
            )
            if est > 0.0:
                points.append((float(n), est))
        obj = {
            "version": __version__,
            "kind": "cone",
            "snr": float(snr),
            "phi": float(phi),
            "trials": trials,
            "seed": seed,
            "results": per_n,
        }
        if len(points) >= 3:
            reg = simulate.estimate_exponent(points)
            obj["regression"] = {
                "slope": reg.slope,
                "intercept": reg.intercept,
                "r_squared": reg.r_squared,
            }
    else:
        raise UsageError(f"unknown simulation kind: {kind}")
    _emit(_json_dump(obj), args.out)
    return 0


def _validation_checks(perturb_g: float = 0.0):
    """Yield (name, defect, tolerance) triples for the cross-module suite."""
    original_g = spherical.big_g
    if perturb_g != 0.0:
        # Negative-control hook: shift G and watch the identity suite fail.
        spherical.big_g = lambda phi, tau, ch: original_g(phi, tau, ch) + perturb_g

    try:
        # Binary: tau=0 reduction of the trade-off pair to the classical bound.
        worst = 0.0
        for p in (0.05, 0.1, 0.3):
            ch = binary.BscChannel(p)
            for r in np.linspace(1e-3, ch.capacity - 1e-6, 40):
                e0 = binary.gallager_exponent(float(r), ch).value
                mp, mm = binary.tradeoff_bounds(float(r), ch, 0.0)
                worst = max(worst, abs(mp.value - e0), abs(mm.value - e0))
        yield "binary tau=0 reduction", worst, 1e-9

        # Binary: trade-off pair dominates the linear bounds where both valid.
        ch = binary.BscChannel(0.07)
        worst = 0.0
        for r in np.linspace(0.01, ch.capacity - 1e-6, 60):
            ee, ex = binary.bz_bounds(float(r), ch, 0.03)
            mp, mm = binary.tradeoff_bounds(float(r), ch, 0.03)
            if ee.valid and mp.valid:
                worst = max(worst, ee.value - mp.value)
            if ex.valid and mm.valid:
                worst = max(worst, ex.value - mm.value)
        yield "binary trade-off dominance", worst, 1e-12

        # Binary: case-(b) value agrees with its alternative form.
        lmb = binary.landmarks(ch, 0.03)
        worst = 0.0
        for sign in (+1, -1):
            inner = (lmb.rho0_plus if sign > 0 else lmb.rho0_minus) - 2 * sign * 0.03
            r_mid = 0.5 * ((1.0 - binary_entropy(lmb.omega0_tau)) + (1.0 - binary_entropy(inner)))
            direct = binary._tradeoff_one(r_mid, ch, 0.03, sign).value
            alt = binary.tradeoff_case_b_alternative(ch, 0.03, sign, r_mid)
            worst = max(worst, abs(direct - alt))
        yield "binary case-b identity", worst, 1e-6

        # Spherical: G vanishes at tau=0.
        chA = spherical.AwgnChannel(4.0)
        worst = max(abs(spherical.big_g(phi, 0.0, chA)) for phi in np.linspace(0.2, 1.4, 25))
        yield "G(phi, 0) = 0", worst, 1e-14

        # Spherical: tau=0 trade-off collapses onto the classical bound.
        worst = 0.0
        for r in np.linspace(0.02, chA.capacity - 1e-3, 25):
            sh = spherical.shannon_exponent(float(r), chA).value
            me = spherical.tradeoff_exponent(float(r), chA, 0.0, "error").value
            worst = max(worst, abs(me - sh))
        yield "spherical tau=0 reduction", worst, 1e-6

        # Spherical: tau=0 landmark collapse.
        lms = spherical.spherical_landmarks(0.0, chA)
        defect = max(abs(lms.theta_1 - lms.theta_e), abs(lms.theta_2 - lms.theta_c))
        yield "tau=0 landmark collapse", defect, 1e-9

        # Neighbor-angle identity at tau=0: cos(theta) = cos^2(x).
        worst = 0.0
        for x in np.linspace(0.15, 1.5, 15):
            th = spherical.elias_theta(float(x), 0.0)
            worst = max(worst, abs(math.cos(th) - math.cos(float(x)) ** 2))
        yield "tau=0 neighbor-angle identity", worst, 1e-10

        # Closed-form boundary identity and its Rankin-rate consequence.
        te_root = spherical.elias_theta(spherical.theta_s(lms.R_star), 0.0)
        lhs = 1.0 / math.sin(te_root) ** 2
        rhs = 0.5 * (1.0 + math.sqrt(1.0 + chA.A**2 / 4.0))
        yield "critical-angle identity", abs(lhs - rhs), 1e-9
        worst = 0.0
        for r in (0.2, 0.4, 0.6):
            te = spherical.elias_theta(spherical.theta_s(r), 0.0)
            worst = max(worst, abs(spherical.rankin_rate(te) - r))
        yield "Rankin rate identity", worst, 1e-9

        # Landmark residuals reported by the solver.
        res = lms.residuals or {}
        defect = max((abs(v) for v in res.values()), default=0.0)
        yield "landmark residuals", defect, 1e-10

        # Triangle counts against brute force at n=6.
        n = 6
        worst = 0
        for kk in range(n + 1):
            x, y = 0, (1 << kk) - 1
            for i in range(n + 1):
                for j in range(n + 1):
                    bf = sum(
                        1
                        for z in range(1 << n)
                        if bin(z ^ x).count("1") == i and bin(z ^ y).count("1") == j
                    )
                    worst = max(worst, abs(bf - finite.triangle_count(n, kk, i, j)))
        yield "triangle-count brute force", float(worst), 0.5

        # Exhaustive oracle: probabilities sum to one, union bound dominates.
        worst_sum, worst_dom = 0.0, 0.0
        for seed in (1, 2, 3):
            code = simulate.gen_linear_code(12, 5, seed)
            wd = simulate.weight_distribution(code)
            for p in (0.05, 0.1):
                for t in (0, 1):
                    pc, pu, pe = finite.exact_margin_probability(code, p, t)
                    worst_sum = max(worst_sum, abs(pc + pu + pe - 1.0))
                    mb = finite.MarginParams(t=t)
                    ub_e = finite.binary_union_bound(wd, p, mb, "error")
                    ub_x = finite.binary_union_bound(wd, p, mb, "erasure")
                    if pu > 0:
                        worst_dom = max(worst_dom, math.log2(pu) - ub_e)
                    if pu + pe > 0:
                        worst_dom = max(worst_dom, math.log2(pu + pe) - ub_x)
        yield "oracle total probability", worst_sum, 1e-12
        yield "union bound dominates oracle", worst_dom, 1e-9
    finally:
        spherical.big_g = original_g


def cmd_validate(args) -> int:
    failures = 0
    lines = []
    for name, defect, tol in _validation_checks(args.perturb_g):
        ok = defect <= tol
        failures += 0 if ok else 1
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: defect={defect:.3e} tol={tol:.0e}")
    report = "\n".join(lines) + f"\n{'OK' if failures == 0 else f'{failures} FAILED'}\n"
    _emit(report, args.out)
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eebounds",
        description="Error/erasure exponent bounds for margin decoding on BSC and AWGN channels.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_channel(sp):
        sp.add_argument("--channel", choices=("bsc", "awgn"), required=True)
        sp.add_argument("--p", type=float, help="BSC crossover probability")
        sp.add_argument("--snr", type=float, help="AWGN signal-to-noise ratio A")
        sp.add_argument("--tau", type=float, default=0.0, help="decoding margin")
        sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("curve", help="sweep bounds over a rate grid")
    add_channel(sp)
    sp.add_argument("--rmin", type=float, required=True)
    sp.add_argument("--rmax", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--units", choices=("bits", "nats"), default=None)
    sp.add_argument("--bounds", help="comma-separated subset of bound names")
    sp.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("landmarks", help="regime boundaries and saddle parameters")
    add_channel(sp)
    sp.set_defaults(func=cmd_landmarks)

    sp = sub.add_parser("finite-bound", help="finite-blocklength union bound")
    add_channel(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rate", type=float, required=True)
    sp.add_argument("--t", type=int, default=0, help="binary margin")
    sp.add_argument("--rho", type=float, help="decoding radius override (awgn)")
    sp.add_argument("--mode", choices=("error", "erasure"), default="error")
    sp.add_argument("--units", choices=("bits", "nats"), default=None)
    sp.set_defaults(func=cmd_finite_bound)

    sp = sub.add_parser("simulate", help="seeded Monte Carlo simulation")
    sp.add_argument("config", nargs="?", help="JSON config file")
    sp.add_argument("--kind", choices=("bsc", "awgn", "cone"))
    sp.add_argument("--n", type=int, nargs="+")
    sp.add_argument("--k", type=int)
    sp.add_argument("--M", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--snr", type=float)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--t", type=int)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--code-seed", dest="code_seed", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("validate", help="run the fast cross-module identity suite")
    sp.add_argument("--out")
    sp.add_argument("--perturb-g", dest="perturb_g", type=float, default=0.0,
                    help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0,) else 0
    if getattr(args, "units", None) is None and hasattr(args, "units"):
        args.units = "bits" if args.channel == "bsc" else "nats"
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
