"""Command-line experiment runner.

Subcommands: gen, solve, bounds, mdcheck, netcheck, measure, sweep.
Every run is reproducible from (config, seed); CSV is the single machine
interface (one header row, floats at 17 significant digits).

Exit codes: 0 all checks passed, 2 solver returned a valid coloring over
the requested bound, 1 hard failure (including bad usage).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import instances as inst_mod
from . import measure as measure_mod
from . import mirror as mirror_mod
from .coloring import PartialColoringError, PartialColoringParams, brute_force_min, full_color, partial_color
from .entropy_net import build_entropy_net, net_error_sampled

ENV_WORKERS = "MATDISC_WORKERS"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_OVER_BOUND = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # bad usage is a hard failure, not exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_FAIL)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf"
        return "%.17g" % float(v)
    return str(v)


def write_csv(path, header: list[str], rows: list[dict]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(col)) for col in header))
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _parse_exp(v: str) -> float:
    return np.inf if str(v).lower() in ("inf", "infinity") else float(v)


def _jsonable(obj):
    """Strict-JSON encoding: inf -> "inf", nan -> None, arrays -> lists."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _workers(args) -> int:
    if getattr(args, "workers", None):
        return args.workers
    env = os.environ.get(ENV_WORKERS)
    if env:
        return int(env)
    return os.cpu_count() or 1


def _apply_config(parser: _Parser, argv: list[str]) -> argparse.Namespace:
    """Parse once to find --config, merge its keys as defaults (flags win)."""
    args = parser.parse_args(argv)
    cfg_path = getattr(args, "config", None)
    if not cfg_path:
        return args
    try:
        cfg = json.loads(Path(cfg_path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        parser.error(f"cannot read config {cfg_path}: {e}")
    if not isinstance(cfg, dict):
        parser.error(f"config {cfg_path} must be a JSON object")
    known = set(vars(args))
    unknown = set(cfg) - known
    if unknown:
        parser.error(f"unknown config keys: {sorted(unknown)}")
    for key, value in cfg.items():
        flag = f"--{key.replace('_', '-')}"
        given = any(a == flag or a.startswith(flag + "=") for a in argv[1:])
        if not given:
            setattr(args, key, value)
    return args


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _build_instance(args) -> inst_mod.Instance:
    fam = args.family
    if fam == "random":
        return inst_mod.gen_random(
            n=args.n, m=args.m, p=_parse_exp(args.p), r=args.r, h=args.h,
            seed=args.seed, q=_parse_exp(args.q) if args.q is not None else None,
        )
    if fam == "diagonal-spencer":
        return inst_mod.gen_diagonal_spencer(args.n, args.m or args.n, seed=args.seed)
    if fam == "hadamard":
        return inst_mod.gen_hadamard_lower(
            args.m, _parse_exp(args.p), symmetrize=not args.raw
        )
    if fam == "rank1-lower":
        return inst_mod.gen_rank1_lower(args.n)
    raise ValueError(f"unknown family {fam!r}")


def cmd_gen(args) -> int:
    inst = _build_instance(args)
    out = args.out or f"{args.family}.mdi.json"
    inst_mod.save(inst, out)
    print(f"wrote {out}: n={inst.n} m={inst.m} p={_fmt(inst.p)} q={_fmt(inst.q)} label={inst.label}")
    return EXIT_OK


def _bound_fn_for(inst, name: str, t_scale: float):
    p, q, r, h = inst.p, inst.q, inst.r, inst.h
    if name == "auto":
        name = "block" if h else ("schatten" if r or not np.isinf(p) else "conj")

    def fn(s: int) -> float:
        rep = bounds_mod.bound_all(n=s, m=inst.m, p=p, q=q, r=r, h=h)
        val = {
            "spencer": rep.spencer,
            "conj": rep.matrix_spencer_conj,
            "lowrank": rep.lowrank,
            "block": rep.block,
            "schatten": rep.schatten,
        }[name]
        return t_scale * val

    return fn


def cmd_solve(args) -> int:
    inst = inst_mod.load(args.instance)
    params = PartialColoringParams(
        sigma=args.sigma, delta_freeze=args.delta_freeze, growth=args.growth,
        max_retries=args.max_retries, oracle_cap_per_coord=args.oracle_cap,
        seed=args.seed,
    )
    q = _parse_exp(args.q) if args.q is not None else inst.q
    bound_fn = (
        (lambda s: args.t) if args.t is not None
        else _bound_fn_for(inst, args.bound, args.t_scale)
    )
    target = bound_fn(inst.n)
    report = {
        "instance": str(args.instance), "mode": args.mode, "n": inst.n, "m": inst.m,
        "p": inst.p, "q": q, "r": inst.r, "h": inst.h, "seed": args.seed, "t": target,
    }
    try:
        if args.mode == "partial":
            col = partial_color(inst, target, params=params, q=q)
            x = col.combined
            report.update(
                discrepancy=col.discrepancy, ratio=col.discrepancy / target,
                retries=col.retries, frozen=len(col.frozen), measured_c=col.measured_c,
                success=True,
            )
        else:
            res = full_color(inst, bound_fn, params=params, q=q)
            x = res.x
            report.update(
                discrepancy=res.discrepancy, ratio=res.discrepancy / target,
                rounds=res.rounds_executed,
                retries=sum(r.retries for r in res.rounds),
                frozen=inst.n, measured_c=res.discrepancy / target, success=True,
            )
    except PartialColoringError as e:
        report.update(success=False, error=str(e))
        if args.out:
            Path(args.out).write_text(json.dumps(_jsonable(report), indent=2))
        print(json.dumps(_jsonable(report), indent=2))
        return EXIT_FAIL

    rep_bounds = bounds_mod.bound_all(n=inst.n, m=inst.m, p=inst.p, q=q, r=inst.r, h=inst.h)
    report["bound_ratios"] = {
        name: (report["discrepancy"] / val if val == val and val > 0 else None)
        for name, val in rep_bounds.named().items()
    }
    if args.brute_check and inst.n <= 22:
        _, opt = brute_force_min(inst, q)
        report["brute_optimum"] = opt
        report["vs_optimum"] = report["discrepancy"] / opt if opt > 0 else None
    report["x"] = [float(v) for v in x]
    if args.out:
        Path(args.out).write_text(json.dumps(_jsonable(report), indent=2))
    summary = {k: v for k, v in report.items() if k != "x"}
    print(json.dumps(_jsonable(summary), indent=2))
    return EXIT_OK if report["ratio"] <= args.c_max else EXIT_OVER_BOUND


def cmd_bounds(args) -> int:
    rep = bounds_mod.bound_all(
        n=args.n, m=args.m, p=_parse_exp(args.p),
        q=_parse_exp(args.q) if args.q is not None else None,
        r=args.r, h=args.h,
    )
    row = {
        "n": rep.n, "m": rep.m, "p": rep.p, "q": rep.q, "r": rep.r, "h": rep.h,
        "k": rep.k, **rep.named(),
        "out_of_regime": ";".join(rep.out_of_regime),
    }
    if args.json:
        print(json.dumps(_jsonable(row)))
    else:
        write_csv(args.out, list(row), [row])
    return EXIT_OK


def cmd_mdcheck(args) -> int:
    setup = args.setup
    if setup == "spectraplex":
        inst = inst_mod.gen_random(n=args.n, m=args.m, p=np.inf, seed=args.seed)
        t0 = [np.eye(args.m) / args.m]
        p_star = None
    else:
        p_star = args.pstar
        p = p_star / (p_star - 1.0)
        inst = inst_mod.gen_random(n=args.n, m=args.m, p=p, seed=args.seed)
        t0 = [np.zeros((args.m, args.m))]
    rep = mirror_mod.verify_cover_sampled(
        inst, t0, setup, samples=args.samples, seed=args.seed, p_star=p_star
    )
    header = ["setup", "m", "n", "pstar", "seed", "sample", "d", "best", "bound", "ok"]
    rows = [
        {"setup": setup, "m": args.m, "n": args.n, "pstar": p_star, "seed": args.seed, **r}
        for r in rep.rows
    ]
    write_csv(args.out, header, rows)
    print(f"mdcheck {setup}: success fraction {rep.success_fraction}")
    if rep.success_fraction < 1.0:
        bad = [r for r in rep.rows if not r["ok"]]
        print(f"guarantee violated on {len(bad)} samples; first: {bad[0]}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_netcheck(args) -> int:
    net = build_entropy_net(args.m, args.h, args.n, cap=args.cap, seed=args.seed)
    rep = net_error_sampled(net, trials=args.trials, seed=args.seed, c_max=args.cnet_max)
    header = [
        "m", "h", "n", "N", "N_exact", "size", "declared_error", "op_error_bound",
        "trials", "max_entropy", "c_net", "seed", "passed",
    ]
    row = {
        "m": net.m, "h": net.h, "n": net.n, "N": net.N, "N_exact": net.N_exact,
        "size": net.size, "declared_error": net.declared_error,
        "op_error_bound": net.op_error_bound, "trials": rep.trials,
        "max_entropy": rep.max_entropy, "c_net": rep.c_net, "seed": args.seed,
        "passed": rep.passed,
    }
    write_csv(args.out, header, [row])
    print(f"netcheck m={net.m} h={net.h} n={net.n}: c_net = {rep.c_net:.4f} "
          f"({'pass' if rep.passed else 'FAIL'})")
    if args.export:
        net.export_json(args.export)
    return EXIT_OK if rep.passed else EXIT_FAIL


MEASURE_HEADER = [
    "n", "m", "p", "q", "r", "h", "t", "samples", "hits", "estimate",
    "log2_per_coord", "ci_halfwidth", "seed", "censored",
]


def cmd_measure(args) -> int:
    inst = inst_mod.load(args.instance)
    q = _parse_exp(args.q) if args.q is not None else inst.q
    est = measure_mod.mc_gaussian_measure(
        inst, args.t, q=q, samples=args.samples, seed=args.seed,
        antithetic=not args.no_antithetic,
    )
    row = {
        "n": inst.n, "m": inst.m, "p": inst.p, "q": q, "r": inst.r, "h": inst.h,
        "t": args.t, "samples": est.samples, "hits": est.hits,
        "estimate": est.estimate, "log2_per_coord": est.log2_per_coord,
        "ci_halfwidth": est.ci_halfwidth, "seed": args.seed, "censored": est.censored,
    }
    write_csv(args.out, MEASURE_HEADER, [row])
    return EXIT_OK


# -- sweep ------------------------------------------------------------------

SOLVE_HEADER = [
    "family", "kind", "n", "m", "p", "q", "r", "h", "seed", "t", "discrepancy",
    "ratio", "rounds", "retries", "success",
]


def _family_instance(family: str, n: int, m: int | None, p, r, h, seed: int):
    if family == "diagonal-spencer":
        return inst_mod.gen_diagonal_spencer(n, m or n, seed=seed)
    if family == "rank1-lower":
        return inst_mod.gen_rank1_lower(n)
    if family == "hadamard":
        return inst_mod.gen_hadamard_lower(m, _parse_exp(p) if p else np.inf)
    if family == "random":
        return inst_mod.gen_random(n=n, m=m or n, p=_parse_exp(p) if p else np.inf,
                                   r=r, h=h, seed=seed)
    raise ValueError(f"unknown family {family!r}")


def _t_rule(name, n, inst):
    if isinstance(name, (int, float)):
        return float(name)
    if name == "spencer":
        return inst_mod.spencer_target(n, inst.m)
    if name == "sqrt":
        return math.sqrt(n)
    if isinstance(name, str) and name.startswith("sqrt*"):
        return float(name.split("*", 1)[1]) * math.sqrt(n)
    raise ValueError(f"unknown t rule {name!r}")


def _sweep_point(cfg: dict) -> dict:
    inst = _family_instance(
        cfg["family"], cfg["n"], cfg.get("m"), cfg.get("p"), cfg.get("r"),
        cfg.get("h"), cfg["seed"],
    )
    base = {
        "family": cfg["family"], "kind": cfg["kind"], "n": inst.n, "m": inst.m,
        "p": inst.p, "q": inst.q, "r": inst.r, "h": inst.h, "seed": cfg["seed"],
    }
    if cfg["kind"] == "measure":
        t = _t_rule(cfg.get("t_rule", "spencer"), inst.n, inst)
        est = measure_mod.mc_gaussian_measure(
            inst, t, samples=cfg.get("samples", 10**5), seed=cfg["seed"]
        )
        return {
            **base, "t": t, "samples": est.samples, "hits": est.hits,
            "estimate": est.estimate, "log2_per_coord": est.log2_per_coord,
            "ci_halfwidth": est.ci_halfwidth, "censored": est.censored,
        }
    t = _t_rule(cfg.get("t_rule", "spencer"), inst.n, inst)
    params = PartialColoringParams(seed=cfg["seed"])
    try:
        res = full_color(inst, lambda s: _t_rule(cfg.get("t_rule", "spencer"), s, inst),
                         params=params)
        return {
            **base, "t": t, "discrepancy": res.discrepancy,
            "ratio": res.discrepancy / t, "rounds": res.rounds_executed,
            "retries": sum(r.retries for r in res.rounds), "success": True,
        }
    except PartialColoringError:
        return {**base, "t": t, "success": False}


def cmd_sweep(args) -> int:
    try:
        cfg = json.loads(Path(args.grid).read_text())
    except (OSError, json.JSONDecodeError) as e:
        print(f"cannot read sweep grid {args.grid}: {e}", file=sys.stderr)
        return EXIT_FAIL
    kind = cfg.get("kind", "solve")
    seeds = cfg.get("seeds", list(range(cfg.get("n_seeds", 5))))
    points = [
        {
            "kind": kind, "family": cfg["family"], "n": n, "m": cfg.get("m"),
            "p": cfg.get("p"), "r": cfg.get("r"), "h": cfg.get("h"),
            "seed": seed, "t_rule": cfg.get("t_rule", "spencer"),
            "samples": cfg.get("samples", 10**5),
        }
        for n in cfg["n"]
        for seed in seeds
    ]
    workers = _workers(args)
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(pt) for pt in points]
    header = MEASURE_HEADER[:-1] + ["censored", "family", "kind"] if kind == "measure" else SOLVE_HEADER
    write_csv(args.out, header, rows)
    ok = all(r.get("success", True) for r in rows)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="matdisc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output path (default stdout/derived)")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--config", default=None, help="JSON config; explicit flags win")

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True,
                   choices=["random", "diagonal-spencer", "hadamard", "rank1-lower"])
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--p", default="inf")
    g.add_argument("--q", default=None)
    g.add_argument("--r", type=int, default=None)
    g.add_argument("--h", type=int, default=None)
    g.add_argument("--raw", action="store_true", help="hadamard: skip symmetrization")
    common(g)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run the coloring pipeline on an instance")
    s.add_argument("instance")
    s.add_argument("--mode", choices=["partial", "full"], default="full")
    s.add_argument("--t", type=float, default=None, help="explicit target (overrides --bound)")
    s.add_argument("--bound", default="auto",
                   choices=["auto", "spencer", "conj", "lowrank", "block", "schatten"])
    s.add_argument("--t-scale", type=float, default=1.0)
    s.add_argument("--q", default=None)
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--delta-freeze", type=float, default=1e-6)
    s.add_argument("--growth", type=float, default=1.25)
    s.add_argument("--max-retries", type=int, default=8)
    s.add_argument("--oracle-cap", type=int, default=50)
    s.add_argument("--c-max", type=float, default=8.0,
                   help="ratio above which a valid coloring exits with code 2")
    s.add_argument("--brute-check", action="store_true")
    common(s)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bounds", help="closed-form bound table")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--p", default="inf")
    b.add_argument("--q", default=None)
    b.add_argument("--r", type=int, default=None)
    b.add_argument("--h", type=int, default=None)
    b.add_argument("--json", action="store_true")
    common(b)
    b.set_defaults(func=cmd_bounds)

    md = sub.add_parser("mdcheck", help="verify the mirror descent guarantee on samples")
    md.add_argument("--setup", choices=["spectraplex", "schatten"], default="spectraplex")
    md.add_argument("--m", type=int, default=16)
    md.add_argument("--n", type=int, default=32)
    md.add_argument("--pstar", type=float, default=2.0)
    md.add_argument("--samples", type=int, default=100)
    common(md)
    md.set_defaults(func=cmd_mdcheck)

    nc = sub.add_parser("netcheck", help="build an entropy net and verify sampled error")
    nc.add_argument("--m", type=int, required=True)
    nc.add_argument("--h", type=int, default=1)
    nc.add_argument("--n", type=int, required=True)
    nc.add_argument("--trials", type=int, default=200)
    nc.add_argument("--cnet-max", type=float, default=4.0)
    nc.add_argument("--cap", type=int, default=10**7)
    nc.add_argument("--export", default=None, help="also export the net as JSON")
    common(nc)
    nc.set_defaults(func=cmd_netcheck)

    me = sub.add_parser("measure", help="Monte-Carlo Gaussian measure of a discrepancy body")
    me.add_argument("instance")
    me.add_argument("--t", type=float, required=True)
    me.add_argument("--q", default=None)
    me.add_argument("--samples", type=int, default=10**5)
    me.add_argument("--no-antithetic", action="store_true")
    common(me)
    me.set_defaults(func=cmd_measure)

    sw = sub.add_parser("sweep", help="grid of solve/measure runs from a JSON grid file")
    sw.add_argument("grid", help="JSON grid: family, n list, seeds, kind, t_rule")
    common(sw)
    sw.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = _apply_config(parser, argv)
    try:
        return args.func(args)
    except (inst_mod.InstanceValidationError, ValueError, OSError) as e:
        print(f"matdisc: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
