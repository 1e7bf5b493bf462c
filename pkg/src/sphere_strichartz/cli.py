"""Batch experiment runner.

Subcommands: kappa, identity-check, sweep, strichartz, sharpness,
solve-potential, selftest.  Results go to stdout plus an optional
--output file as CSV (default) or JSON (--format json).  A --config JSON
file (with a top-level "version" field) supplies flag defaults; explicit
command-line flags override it.  Runs are deterministic: the random
stream is a counter-based Philox generator keyed by --seed, and floats
are emitted at 17 significant digits, so identical configurations produce
byte-identical output files.

Exit codes: 0 success, 1 validation/configuration error, 2 numerical
error (identity/selftest tolerance exceeded or Picard divergence).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import experiments as xp
from . import potential as pot
from .grids import (
    ResourceLimitError,
    build_sphere_grid,
    build_zonal_grid,
    forward_sht,
    forward_zonal,
    grid_for,
    integrate,
    inverse_sht,
    inverse_zonal,
)
from .norms import TimeResolutionError, l2t_profile_exact, lp_norm, mixed_norm
from .spectral import (
    nyquist_time_grid,
    propagate,
    random_field,
    synthesize_history,
)

CONFIG_VERSION = 1


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _parse_p(text: str) -> float:
    if text.lower() in ("inf", "infinity", "oo"):
        return math.inf
    return float(text)


def _parse_degrees(spec: str, count: int) -> tuple:
    """Degree list: 'a:b' (log-spaced), 'a:b:k' (k points), or 'n1,n2,...'."""
    if ":" in spec:
        parts = spec.split(":")
        lo, hi = int(parts[0]), int(parts[1])
        k = int(parts[2]) if len(parts) > 2 else count
        return xp.geometric_degrees(lo, hi, k)
    return tuple(sorted({int(tok) for tok in spec.split(",") if tok}))


def _write_rows(args, columns, rows, summary=None) -> None:
    if not args.output:
        return
    if args.format == "json":
        payload = {
            "version": CONFIG_VERSION,
            "columns": list(columns),
            "rows": [[_fmt(v) for v in row] for row in rows],
        }
        if summary:
            payload["summary"] = {k: _fmt(v) for k, v in summary.items()}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _require(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise ValueError(f"--{name.replace('_', '-')} is required")
    return value


def _cmd_kappa(args) -> int:
    p = _parse_p(_require(args, "p"))
    pc = xp.p_critical(args.d)
    branch = "subcritical" if p <= pc else "supercritical"
    kp = xp.kappa_p(p, args.d)
    rows = [[args.d, args.p, kp, branch, pc]]
    cols = ["d", "p", "kappa_p", "branch", "p_critical"]
    print(f"kappa_p = {_fmt(kp)}  ({branch} branch, p_c = {_fmt(pc)})")
    if args.q is not None:
        kpq = xp.kappa_pq(p, args.q, args.d)
        cols += ["q", "kappa_pq"]
        rows[0] += [args.q, kpq]
        print(f"kappa_pq = {_fmt(kpq)}  (q = {_fmt(args.q)})")
    _write_rows(args, cols, rows)
    return 0


def _cmd_identity_check(args) -> int:
    rng = _rng(args.seed)
    grid = grid_for(args.N, args.d, 2.0)
    tg = nyquist_time_grid(args.N, args.d)
    ps = [_parse_p(tok) for tok in args.p_list.split(",")]
    rows = []
    worst = 0.0
    for trial in range(args.trials):
        f = random_field(args.N, args.d, rng, zonal=(args.d != 2))
        u = synthesize_history(f, tg, grid)
        prof = l2t_profile_exact(f, grid)
        for p in ps:
            sampled = mixed_norm(u, p, 2.0)
            spectral = lp_norm(prof, grid, p)
            rel = abs(sampled - spectral) / spectral
            worst = max(worst, rel)
            rows.append([trial, "inf" if p == math.inf else p, sampled, spectral, rel])
    _write_rows(args, ["trial", "p", "sampled", "spectral", "rel_error"], rows,
                {"max_rel_error": worst})
    print(f"max relative error over {args.trials} trials x p in {{{args.p_list}}}: "
          f"{_fmt(worst)}  (tolerance {_fmt(args.tol)})")
    if worst > args.tol:
        print("identity check FAILED", file=sys.stderr)
        return 2
    return 0


_FAMILY_ALIASES = {
    "zonal": "zonal-kernel",
    "zonal-kernel": "zonal-kernel",
    "highest-weight": "highest-weight",
    "hw": "highest-weight",
    "random": "random-eigenspace",
    "random-eigenspace": "random-eigenspace",
}


def _cmd_sweep(args) -> int:
    degrees = _parse_degrees(args.n, args.count)
    cfg = xp.SweepConfig(
        d=args.d,
        p=_parse_p(_require(args, "p")),
        family=_FAMILY_ALIASES[args.family],
        degrees=degrees,
        oversample=args.oversample,
        seed=args.seed,
    )
    rows, fit = xp.projection_ratio_sweep(cfg)
    out = [[n, r, args.p, cfg.q, cfg.s, cfg.d, cfg.family] for n, r in rows]
    _write_rows(args, ["n", "ratio", "p", "q", "s", "d", "family"], out,
                {"slope": fit.slope, "intercept": fit.intercept, "stderr": fit.stderr})
    print(f"fitted slope over n in [{fit.n_min}, {fit.n_max}]: {fit.slope:.6f} "
          f"(stderr {fit.stderr:.2g}, {fit.count} degrees)")
    return 0


def _cmd_strichartz(args) -> int:
    p = _parse_p(_require(args, "p"))
    s = xp.kappa_pq(p, args.q, args.d) if args.s == "auto" else float(args.s)
    rng = _rng(args.seed)
    if args.family == "random":
        f = random_field(args.N, args.d, rng, zonal=(args.d != 2))
    else:
        f = xp.make_family(_FAMILY_ALIASES[args.family], args.N, args.d, rng=rng)
    ratio = xp.strichartz_ratio(f, p, args.q, s)
    _write_rows(args, ["N", "p", "q", "s", "d", "family", "ratio"],
                [[args.N, args.p, args.q, s, args.d, args.family, ratio]])
    print(f"ratio = {_fmt(ratio)}  (N={args.N}, p={args.p}, q={_fmt(args.q)}, "
          f"s={_fmt(s)})")
    return 0


def _cmd_sharpness(args) -> int:
    degrees = _parse_degrees(args.n, args.count)
    p = _parse_p(_require(args, "p"))
    s = args.s if args.s is not None else xp.kappa_pq(p, 2.0, args.d)
    fams = ("zonal-kernel", "highest-weight") if args.d == 2 else ("zonal-kernel",)
    rows = []
    for fam in fams:
        for n in degrees:
            f = xp.make_family(fam, n, args.d)
            rows.append([n, xp.strichartz_ratio(f, p, 2.0, s), args.p, 2.0, s,
                         args.d, fam])
    fit = xp.sharpness_sweep(p, s, args.d, degrees)
    _write_rows(args, ["n", "ratio", "p", "q", "s", "d", "family"], rows,
                {"slope": fit.slope, "stderr": fit.stderr,
                 "expected_slope": xp.kappa_pq(p, 2.0, args.d) - s})
    print(f"growth slope at s={_fmt(s)}: {fit.slope:.6f} "
          f"(expected ~{xp.kappa_pq(p, 2.0, args.d) - s:.3f})")
    return 0


def _cmd_solve_potential(args) -> int:
    with open(_require(args, "potential"), "r", encoding="utf-8") as fh:
        V = pot.PotentialSpec.from_json_dict(json.load(fh), d=args.d)
    p = _parse_p(args.p)
    s = xp.kappa_pq(p, 2.0, args.d) if args.s == "auto" else float(args.s)
    rng = _rng(args.seed)
    f = random_field(args.N, args.d, rng)
    tg = None if args.M is None else pot.TimeGrid(args.M)
    u, rep = pot.picard_solve(f, V, p, s, tol=args.tol, max_iter=args.max_iter,
                              tg=tg, seed=args.seed)
    rows = [[k + 1, inc] for k, inc in enumerate(rep.increments)]
    _write_rows(args, ["iterate", "x_norm_increment"], rows, {
        "iterations": rep.iterations,
        "contraction_ratio": rep.contraction_ratio,
        "residual": rep.residual,
        "v_norm": rep.v_norm,
        "c0_estimate": rep.c0_estimate,
        "smallness_ok": rep.smallness_ok,
        "l2_drift": pot.l2_drift(u),
    })
    print(f"converged in {rep.iterations} iterates; contraction ratio "
          f"{rep.contraction_ratio:.4g}; residual {rep.residual:.3g}; "
          f"smallness gate {'ok' if rep.smallness_ok else 'NOT satisfied'}")
    return 0


def _cmd_selftest(args) -> int:
    rng = _rng(args.seed)
    checks = []

    def check(name, value, tol):
        ok = value <= tol
        checks.append((name, value, tol, ok))
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (tol {tol:.0e})")

    N = args.N
    g = build_sphere_grid(N)
    f = random_field(N, 2, rng)
    vals = inverse_sht(f, g)
    back = forward_sht(vals, g, N)
    check(f"sphere round-trip N={N}", float(np.max(np.abs(back.a - f.a))), 1e-12)
    check(f"sphere Parseval N={N}",
          abs(integrate(np.abs(vals) ** 2, g) - np.sum(np.abs(f.a) ** 2)), 1e-12)

    zg = build_zonal_grid(N, 3)
    zf = random_field(N, 3, rng, zonal=True)
    zvals = inverse_zonal(zf, zg)
    zback = forward_zonal(zvals, zg, N)
    check(f"zonal(d=3) round-trip N={N}", float(np.max(np.abs(zback.a - zf.a))), 1e-12)
    check(f"zonal(d=3) Parseval N={N}",
          abs(integrate(np.abs(zvals) ** 2, zg) - np.sum(np.abs(zf.a) ** 2)), 1e-12)

    small = random_field(32, 2, rng)
    t = float(rng.uniform(0, 2 * math.pi))
    check("propagator unitarity",
          abs(propagate(small, t).l2_norm() - small.l2_norm()), 1e-13)
    check("propagator 2pi-periodicity",
          float(np.max(np.abs(propagate(small, 2 * math.pi).a - small.a))), 1e-13)

    rows = [[name, value, tol, "pass" if ok else "fail"]
            for name, value, tol, ok in checks]
    _write_rows(args, ["check", "value", "tolerance", "status"], rows)
    if all(ok for *_, ok in checks):
        print("selftest: all checks passed")
        return 0
    print("selftest: FAILURES present", file=sys.stderr)
    return 2


def _add_common(sp, seed=0):
    sp.add_argument("--config", help="JSON config file supplying flag defaults")
    sp.add_argument("--output", help="result file path")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--seed", type=int, default=seed)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sphere-strichartz",
        description="Spectral experiments for the Schrodinger flow on the d-sphere",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("kappa", help="print the projection growth exponent")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--p", default=None)
    sp.add_argument("--q", type=float, default=None)
    _add_common(sp)
    sp.set_defaults(func=_cmd_kappa)

    sp = sub.add_parser("identity-check",
                        help="time-sampled mixed norm vs exact spectral profile")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--N", type=int, default=16)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--p-list", default="2,4,inf")
    sp.add_argument("--tol", type=float, default=1e-10)
    _add_common(sp)
    sp.set_defaults(func=_cmd_identity_check)

    sp = sub.add_parser("sweep", help="projection-norm ratio sweep and log-log fit")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--p", default=None)
    sp.add_argument("--family", default="zonal", choices=sorted(_FAMILY_ALIASES))
    sp.add_argument("--n", default="16:256", help="degrees: 'a:b', 'a:b:k', or list")
    sp.add_argument("--count", type=int, default=12)
    sp.add_argument("--oversample", type=float, default=2.0)
    _add_common(sp)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("strichartz", help="mixed-norm / Sobolev ratio for one field")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--N", type=int, default=16)
    sp.add_argument("--p", default=None)
    sp.add_argument("--q", type=float, default=2.0)
    sp.add_argument("--s", default="auto")
    sp.add_argument("--family", default="random",
                    choices=sorted(set(_FAMILY_ALIASES) | {"random"}))
    _add_common(sp)
    sp.set_defaults(func=_cmd_strichartz)

    sp = sub.add_parser("sharpness", help="ratio growth below the sharp regularity")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--p", default=None)
    sp.add_argument("--s", type=float, default=None)
    sp.add_argument("--n", default="16:256")
    sp.add_argument("--count", type=int, default=12)
    _add_common(sp)
    sp.set_defaults(func=_cmd_sharpness)

    sp = sub.add_parser("solve-potential", help="Picard solve with a separable potential")
    sp.add_argument("--potential", default=None, help="potential spec JSON file")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--N", type=int, default=8)
    sp.add_argument("--p", default="4")
    sp.add_argument("--s", default="auto")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=30)
    sp.add_argument("--M", type=int, default=None, help="time nodes (default 8(lam_N+1))")
    _add_common(sp)
    sp.set_defaults(func=_cmd_solve_potential)

    sp = sub.add_parser("selftest", help="transform round-trip and propagator checks")
    sp.add_argument("--N", type=int, default=128)
    _add_common(sp)
    sp.set_defaults(func=_cmd_selftest)

    return ap


def _apply_config(ap: argparse.ArgumentParser, argv: list) -> list:
    """Load --config defaults (flags still override); returns argv unchanged."""
    if "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    version = cfg.pop("version", None)
    if version != CONFIG_VERSION:
        raise ValueError(f"config version {version!r} != {CONFIG_VERSION}")
    for action in ap._subparsers._group_actions:
        for name, sub in action.choices.items():
            if argv and argv[0] == name:
                known = {a.dest for a in sub._actions}
                unknown = set(cfg) - known
                if unknown:
                    raise ValueError(f"unknown config keys: {sorted(unknown)}")
                sub.set_defaults(**cfg)
    return argv


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        argv = _apply_config(ap, argv)
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except pot.DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 2
    except TimeResolutionError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
