"""``erw`` command line: simulate, oracle, verify, analyze."""

import argparse
import json
import math
import os
import sys
from typing import List, Optional

import numpy as np

from . import artifacts, svg
from .analysis import DEFAULT_BURN_IN, analyze, xi_scatter
from .group import make_presentation
from .montecarlo import RunConfig, resolve_workers, run_ensemble
from .observables import limit_variance
from .oracle import EnumerationBudgetError, enumerate_exact
from .sampler import MemoryConfig
from .verify import format_table, run_verify


class UsageError(Exception):
    pass


def _int_list(text: str) -> List[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _add_walk_args(sp, steps_flag=True):
    sp.add_argument("--d1", type=int, required=True, help="number of Z factors")
    sp.add_argument("--d2", type=int, required=True, help="number of Z2 factors")
    sp.add_argument("--p", type=float, help="memory parameter of the elephant walk")
    sp.add_argument("--variant", choices=("elephant", "pos", "neg"), default=None)
    sp.add_argument("--ptilde", type=float, help="reinforcement parameter for pos/neg")
    sp.add_argument("--moments", type=_float_list, default=[1.0, 1.5, 2.0],
                    help="comma-separated moment orders in [1, 4]")


def memory_from_args(args) -> MemoryConfig:
    variant = args.variant
    if args.p is not None and args.ptilde is not None:
        raise UsageError("--p and --ptilde are mutually exclusive")
    if variant in (None, "elephant"):
        if args.ptilde is not None:
            raise UsageError("--ptilde needs --variant pos or neg")
        if args.p is None:
            raise UsageError("--p is required for the elephant walk")
        return MemoryConfig("elephant", args.p)
    if args.p is not None:
        raise UsageError(f"--variant {variant} takes --ptilde, not --p")
    if args.ptilde is None:
        raise UsageError(f"--variant {variant} needs --ptilde")
    return MemoryConfig(variant, args.ptilde)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="erw", description="Elephant random walks on Cayley trees")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a Monte Carlo ensemble")
    _add_walk_args(s)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--replicas", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--checkpoints", type=_int_list, default=None)
    s.add_argument("--out-dir", default=".")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--svg", action="store_true", help="also write SVG plots")
    s.add_argument("--no-fluctuations", action="store_true",
                   help="skip the per-replica fluctuations.csv")

    o = sub.add_parser("oracle", help="exact law by path enumeration")
    _add_walk_args(o)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--out-dir", default=None)
    o.add_argument("--compare-mc", action="store_true",
                   help="also simulate and report per-bin z-scores")
    o.add_argument("--replicas", type=int, default=100000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--workers", type=int, default=None)

    v = sub.add_parser("verify", help="run the invariant suite")
    v.add_argument("--quick", action="store_true")

    a = sub.add_parser("analyze", help="fit rates and test normality of a simulate run")
    a.add_argument("--out-dir", required=True, help="directory written by simulate")
    a.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    a.add_argument("--svg", action="store_true")
    return ap


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def cmd_simulate(args) -> int:
    mem = memory_from_args(args)
    if 2 * args.d1 + args.d2 < 3:
        raise UsageError("simulate needs d = 2*d1 + d2 >= 3")
    cfg = RunConfig(args.d1, args.d2, mem, args.steps, args.replicas, args.seed,
                    tuple(args.checkpoints) if args.checkpoints else None, tuple(args.moments))
    summary = run_ensemble(cfg, workers=resolve_workers(args.workers))
    paths = artifacts.write_run(args.out_dir, summary, fluctuations=not args.no_fluctuations)
    if args.svg:
        last = summary.stats[-1]
        d = cfg.d
        p = cfg.p_effective
        body = svg.histogram_svg(last.fluct.hist[1:-1], last.fluct.edges, limit_variance(d),
                                 f"fluctuation statistic, n={last.n}")
        paths.append(os.path.join(args.out_dir, "fluct_hist.svg"))
        _write(paths[-1], body)
        if p < 1:
            sc = xi_scatter(summary.final["xi"], cfg.n_max, p, d) if cfg.n_max >= 2 else []
            paths.append(os.path.join(args.out_dir, "xi_scatter.svg"))
            _write(paths[-1], svg.scatter_svg(sc, "r_n * Xi_n"))
        vals = [(s.n, s.speed.abs_moment(1.0)) for s in summary.stats if s.speed.abs_moment(1.0) > 0]
        if len(vals) >= 2:
            paths.append(os.path.join(args.out_dir, "moment_decay.svg"))
            _write(paths[-1], svg.loglog_svg([v[0] for v in vals], [v[1] for v in vals],
                                             None, "E|speed - (d-2)/d|"))
    for pth in paths:
        print(pth)
    return 0


def cmd_oracle(args) -> int:
    mem = memory_from_args(args)
    pres = make_presentation(args.d1, args.d2)
    try:
        dist = enumerate_exact(pres, mem, args.n, args.moments)
    except EnumerationBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = {
        "d1": args.d1, "d2": args.d2, "variant": mem.variant, "param": float(mem.param),
        "n": args.n,
        "pmf": {str(k): v for k, v in dist.support().items()},
        "return_prob": dist.return_prob,
        "mean_delta": dist.mean_delta,
        "speed_abs_moments": {repr(m): v for m, v in dist.speed_moments.items()},
        "xi_abs_moments": {repr(m): v for m, v in dist.xi_moments.items()},
    }
    if args.compare_mc:
        cfg = RunConfig(args.d1, args.d2, mem, args.n, args.replicas, args.seed, (args.n,))
        summ = run_ensemble(cfg, workers=resolve_workers(args.workers), keep_final=True)
        emp = np.bincount(summ.final["delta_n"], minlength=args.n + 1) / args.replicas
        z = {}
        for k in range(args.n + 1):
            q = float(dist.pmf[k])
            se = math.sqrt(q * (1 - q) / args.replicas)
            if se > 0:
                z[str(k)] = (float(emp[k]) - q) / se
            elif emp[k] > 0:
                z[str(k)] = "inf"
        out["mc"] = {"replicas": args.replicas, "seed": args.seed,
                     "pmf": {str(k): float(v) for k, v in enumerate(emp) if v > 0},
                     "z_scores": z}
    text = json.dumps(out, indent=2, sort_keys=True)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        _write(os.path.join(args.out_dir, "oracle.json"), text + "\n")
    print(text)
    return 0


def cmd_verify(args) -> int:
    checks = run_verify(quick=args.quick)
    print(format_table(checks))
    return 0 if all(c.passed for c in checks) else 1


def cmd_analyze(args) -> int:
    with open(os.path.join(args.out_dir, "summary.json")) as fh:
        summary = json.load(fh)
    d = summary["derived"]["d"]
    p = summary["derived"]["p_effective"]
    if d < 3:
        raise UsageError("analyze needs d >= 3")
    if p >= 1:
        raise UsageError("rate fits are undefined for p = 1")
    rows = artifacts.read_checkpoints_csv(os.path.join(args.out_dir, "checkpoints.csv"))
    urn = [r["mean_urn_dev"] for r in summary["results"]]
    fpath = os.path.join(args.out_dir, "fluctuations.csv")
    fl = artifacts.read_fluctuations_csv(fpath) if os.path.exists(fpath) else None
    try:
        report = analyze(rows, d, p, None if fl is None else fl["fluct_stat"], urn, args.burn_in)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = report.to_dict()
    n = summary["config"]["steps"]
    if fl is not None and n >= 2:
        sc = xi_scatter(fl["xi"], n, p, d)
        with open(os.path.join(args.out_dir, "xi_scatter.csv"), "w") as fh:
            fh.write("replica_index,rn_xi\n")
            for i, v in enumerate(sc):
                fh.write(f"{i},{float(v)!r}\n")
        if args.svg:
            _write(os.path.join(args.out_dir, "xi_scatter.svg"), svg.scatter_svg(sc, "r_n * Xi_n"))
    if args.svg:
        pts = [(r["n"], r["abs_moment_m1"]) for r in rows if r["abs_moment_m1"] > 0]
        _write(os.path.join(args.out_dir, "moment_fit.svg"),
               svg.loglog_svg([q[0] for q in pts], [q[1] for q in pts], report.moment.slope,
                              "E|speed - (d-2)/d| with fitted slope"))
    artifacts.dump_json(os.path.join(args.out_dir, "analysis.json"), out)
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


COMMANDS = {"simulate": cmd_simulate, "oracle": cmd_oracle, "verify": cmd_verify,
            "analyze": cmd_analyze}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
