"""CSV/JSON artifacts.  Floats are written with ``repr`` so files are bit-stable."""

import csv
import json
import os
from typing import Dict, List

import numpy as np

from . import __version__
from .montecarlo import EnsembleSummary, RunConfig
from .observables import alpha_or_none, critical_p, regime, rate_exponent
from .sampler import second_eigenvalue

FORMAT_VERSION = 1

CHECKPOINT_COLUMNS = (
    "n", "mean_speed", "abs_moment_m1", "abs_moment_m1_5", "abs_moment_m2",
    "return_prob", "mean_xi", "var_xi", "mean_fluct", "var_fluct",
)
FLUCT_COLUMNS = ("replica_index", "delta_n", "speed", "xi", "fluct_stat")


def _num(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def checkpoint_rows(summary: EnsembleSummary) -> List[list]:
    rows = []
    for s in summary.stats:
        rows.append([
            s.n, s.speed.mean, s.speed.abs_moment(1.0), s.speed.abs_moment(1.5),
            s.speed.abs_moment(2.0), s.return_prob, s.xi.mean, s.xi.variance,
            s.fluct.mean, s.fluct.variance,
        ])
    return rows


def write_checkpoints_csv(path: str, summary: EnsembleSummary) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CHECKPOINT_COLUMNS)
        for row in checkpoint_rows(summary):
            w.writerow([_num(v) for v in row])


def write_fluctuations_csv(path: str, summary: EnsembleSummary) -> None:
    f = summary.final
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FLUCT_COLUMNS)
        for i in range(len(f["delta_n"])):
            w.writerow([str(i), _num(f["delta_n"][i]), _num(f["speed"][i]),
                        _num(f["xi"][i]), _num(f["fluct_stat"][i])])


def derived_constants(cfg: RunConfig) -> Dict:
    d, p = cfg.d, cfg.p_effective
    out = {"d": d, "p_effective": float(p), "p_d": None, "regime": None,
           "alpha": alpha_or_none(p, d) if d >= 3 else None,
           "lambda2": float(second_eigenvalue(p, d)), "r_exponent": None}
    if d >= 3:
        out["p_d"] = critical_p(d)
        out["regime"] = regime(p, d)
        if p < 1:
            out["r_exponent"] = rate_exponent(p, d)
    return out


def config_echo(cfg: RunConfig) -> Dict:
    return {
        "d1": cfg.d1, "d2": cfg.d2,
        "variant": cfg.memory.variant, "param": float(cfg.memory.param),
        "steps": cfg.n_max, "replicas": cfg.replicas, "seed": cfg.base_seed,
        "checkpoints": list(cfg.resolved_checkpoints()),
        "moments": [float(m) for m in cfg.moments],
        "chunk_size": cfg.chunk_size,
    }


def summary_dict(summary: EnsembleSummary) -> Dict:
    cfg = summary.config
    last = summary.stats[-1]
    return {
        "config": config_echo(cfg),
        "derived": derived_constants(cfg),
        "results": summary.table(),
        "final": {
            "n": last.n,
            "fluct_hist_edges": [float(e) for e in last.fluct.edges],
            "fluct_hist_counts": [int(c) for c in last.fluct.hist],
            "delta_hist": None if last.delta_hist is None else [int(c) for c in last.delta_hist],
        },
        "max_identity_residual_per_n": summary.max_identity_residual,
        "versions": {"erwtree": __version__, "format": FORMAT_VERSION},
    }


def dump_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_run(out_dir: str, summary: EnsembleSummary, fluctuations: bool = True) -> List[str]:
    """Write summary.json, checkpoints.csv and (optionally) fluctuations.csv."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    jobs = [("summary.json", lambda p: dump_json(p, summary_dict(summary))),
            ("checkpoints.csv", lambda p: write_checkpoints_csv(p, summary))]
    if fluctuations:
        jobs.append(("fluctuations.csv", lambda p: write_fluctuations_csv(p, summary)))
    errors = []
    for name, fn in jobs:
        path = os.path.join(out_dir, name)
        try:
            fn(path)
            written.append(path)
        except OSError as exc:
            errors.append(f"{path}: {exc}")
    if errors:
        raise OSError("failed to write: " + "; ".join(errors))
    return written


def read_checkpoints_csv(path: str) -> List[dict]:
    with open(path, newline="") as fh:
        rows = []
        for r in csv.DictReader(fh):
            rows.append({k: (int(v) if k == "n" else float(v)) for k, v in r.items()})
    return rows


def read_fluctuations_csv(path: str) -> Dict[str, np.ndarray]:
    cols = {c: [] for c in FLUCT_COLUMNS}
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            for c in FLUCT_COLUMNS:
                cols[c].append(float(r[c]))
    return {c: np.array(v) for c, v in cols.items()}
