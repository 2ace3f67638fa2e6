"""Property/oracle suite over a parameter grid, behind ``erw verify``."""

import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from . import _accel
from .group import make_presentation
from .kernels import F, simulate_block
from .observables import ObservableTrace, alpha, decomposition_residual, return_bound
from .oracle import compare_variants, enumerate_exact, srw_distance_law
from .reference import reference_rows
from .rng import ReplicaRandom, replica_seeds
from .sampler import MemoryConfig, UrnCounts, effective_memory, sample_next_step

GROUPS_BY_D = {3: ((0, 3), (1, 1)), 4: ((0, 4), (1, 2), (2, 0))}


def p_grid(d: int) -> Tuple[float, ...]:
    return (0.0, 0.3, 1 / d, 0.5, (d + 1) / (2 * d), 0.75, 0.9)


@dataclass
class Check:
    name: str
    params: str
    passed: bool
    observed: str
    expected: str


def chi2_critical(k: int, z: float = 2.3263478740408408) -> float:
    """Upper 1% point of chi-square with k dof (Wilson-Hilferty)."""
    c = 2.0 / (9.0 * k)
    return k * (1.0 - c + z * math.sqrt(c)) ** 3


def _groups(quick: bool):
    for d, groups in GROUPS_BY_D.items():
        for g in groups[:1] if quick else groups:
            yield d, g


def check_two_step_return(quick: bool) -> List[Check]:
    out = []
    for d, (d1, d2) in _groups(quick):
        pres = make_presentation(d1, d2)
        for p in p_grid(d):
            exact = enumerate_exact(pres, MemoryConfig("elephant", p), 2).return_prob
            expect = d2 / d * p + 2 * d1 / d * (1 - p) / (d - 1)
            out.append(Check("oracle P(D2=0)", f"({d1},{d2}) p={p:.4g}",
                             abs(exact - expect) <= 1e-12, repr(exact), repr(expect)))
    return out


def check_srw_law(quick: bool) -> List[Check]:
    out = []
    nmax = 6 if quick else 10
    for d, (d1, d2) in _groups(quick):
        pres = make_presentation(d1, d2)
        for n in range(1, nmax + 1):
            if d ** n > 10 ** 7:
                break
            pmf = enumerate_exact(pres, MemoryConfig("elephant", 1 / d), n).pmf
            err = float(np.max(np.abs(pmf - srw_distance_law(d, n))))
            out.append(Check("oracle = SRW law at p=1/d", f"({d1},{d2}) n={n}",
                             err <= 1e-12, f"{err:.2e}", "<= 1e-12"))
    return out


def check_variants(quick: bool) -> List[Check]:
    out = []
    cases = [("pos", q) for q in (0.0, 0.25, 0.5, 0.9)] + [("neg", q) for q in (0.25, 0.5, 1.0)]
    for d1, d2 in GROUPS_BY_D[4][:1] if quick else GROUPS_BY_D[4]:
        pres = make_presentation(d1, d2)
        for variant, q in cases:
            err = compare_variants(pres, q, variant, 4 if quick else 5)
            out.append(Check("variant equivalence", f"({d1},{d2}) {variant} p~={q}",
                             err <= 1e-12, f"{err:.2e}", "<= 1e-12"))
    return out


def check_path_identities(quick: bool) -> List[Check]:
    """Decomposition identity, ell-proximity, counts and unit increments at every step."""
    out = []
    horizon = 500 if quick else 2000
    reps = 8 if quick else 32
    ck = np.arange(1, horizon + 1)
    for d, (d1, d2) in _groups(quick):
        pres = make_presentation(d1, d2)
        for p in p_grid(d):
            rows = simulate_block(pres.inverse_table, 0, p, p, horizon, ck,
                                  replica_seeds(1234, 0, reps))
            n = rows[..., F["n"]]
            delta = rows[..., F["delta"]]
            res = decomposition_residual(delta, n, rows[..., F["M"]], rows[..., F["zero_count"]],
                                         rows[..., F["xi_sum"]], p, d)
            worst = float(np.max(np.abs(res) / n))
            prox = rows[..., F["ell_ratio"]] - (delta > 0) / d
            slack = float(np.max(np.abs(prox) - rows[..., F["urn_maxdev"]]))
            steps = np.diff(np.concatenate([np.zeros((reps, 1)), delta], axis=1), axis=1)
            zc = rows[..., F["zero_count"]]
            ok = (worst <= 1e-9 and slack <= 1e-12
                  and np.all(rows[..., F["count_total"]] == n)
                  and np.all(np.abs(steps) == 1)
                  and np.all(zc >= 1) and np.all(zc <= (n + 1) // 2)
                  and np.all(rows[..., F["qv"]] <= n + 1e-9))
            out.append(Check("path identities", f"({d1},{d2}) p={p:.4g}", bool(ok),
                             f"resid/n={worst:.1e} prox slack={slack:.1e}", "all hold"))
    return out


def check_return_bound(quick: bool) -> List[Check]:
    out = []
    reps = 2000 if quick else 20000
    ck = np.array([32, 64, 128, 256])
    for d, (d1, d2) in _groups(quick):
        pres = make_presentation(d1, d2)
        for p in p_grid(d):
            if p >= 0.5 or (p == 0 and d == 3):
                continue
            rows = simulate_block(pres.inverse_table, 0, p, p, int(ck[-1]), ck,
                                  replica_seeds(99, 0, reps))
            freq = (rows[..., F["delta"]] == 0).mean(axis=0)
            bad = []
            for i, n in enumerate(ck):
                se = math.sqrt(max(freq[i] * (1 - freq[i]), 1.0 / reps) / reps)
                if freq[i] > return_bound(int(n), p, d) + 4 * se:
                    bad.append(int(n))
            out.append(Check("return bound", f"({d1},{d2}) p={p:.4g} alpha={alpha(p, d):.3g}",
                             not bad, f"violations at {bad}", "none"))
    return out


def check_uniform_sampler(quick: bool) -> List[Check]:
    out = []
    draws = 20000 if quick else 100000
    for d in (3, 4):
        rng = ReplicaRandom(7, d)
        cfg = MemoryConfig("elephant", 1 / d)
        urn = UrnCounts(np.array([5] + [1] * (d - 1), dtype=np.int64), 4 + d)
        counts = np.zeros(d)
        for _ in range(draws):
            counts[sample_next_step(urn, cfg, rng)] += 1
        exp = draws / d
        chi2 = float(((counts - exp) ** 2 / exp).sum())
        crit = chi2_critical(d - 1)
        out.append(Check("sampler uniform at p=1/d", f"d={d}", chi2 <= crit,
                         f"chi2={chi2:.2f}", f"<= {crit:.2f}"))
    return out


class CorruptedTrace(ObservableTrace):
    """Counts the k = 0 term of xi as 1 instead of 0."""

    xi_origin_term = 1.0


def check_mutation(quick: bool) -> List[Check]:
    pres = make_presentation(1, 2)
    cfg = MemoryConfig("elephant", 0.6)
    p = effective_memory(cfg, pres.d)
    ck = list(range(1, 201))
    rows = reference_rows(pres, cfg, 200, ck, 5, 0, trace_cls=CorruptedTrace)
    res = decomposition_residual(rows[:, F["delta"]], rows[:, F["n"]], rows[:, F["M"]],
                                 rows[:, F["zero_count"]], rows[:, F["xi_sum"]], p, pres.d)
    caught = int(np.sum(np.abs(res) > 1e-9 * rows[:, F["n"]]))
    return [Check("mutation (xi k=0 term) detected", "(1,2) p=0.6", caught == len(ck),
                  f"identity fails at {caught}/{len(ck)} checkpoints", "all")]


def check_backends(quick: bool) -> List[Check]:
    if not _accel.HAVE_NUMBA:
        return [Check("backend equality", "numba unavailable", True, "skipped", "-")]
    out = []
    for d1, d2 in ((0, 4), (1, 2), (1, 1)):
        pres = make_presentation(d1, d2)
        for variant, q in (("elephant", 0.7), ("pos", 0.4), ("neg", 0.6)):
            cfg = MemoryConfig(variant, q)
            args = (pres.inverse_table, cfg.code, q, effective_memory(cfg, pres.d), 300,
                    np.array([1, 7, 100, 300]), replica_seeds(3, 0, 16))
            a = simulate_block(*args, backend="numba")
            b = simulate_block(*args, backend="numpy")
            out.append(Check("numba == numpy", f"({d1},{d2}) {variant} {q}",
                             bool(np.array_equal(a, b)), "bitwise" if np.array_equal(a, b)
                             else f"max diff {np.max(np.abs(a - b)):.2e}", "bitwise"))
    return out


SUITES: Tuple[Callable[[bool], List[Check]], ...] = (
    check_two_step_return, check_srw_law, check_variants, check_path_identities,
    check_return_bound, check_uniform_sampler, check_mutation, check_backends,
)


def run_verify(quick: bool = False) -> List[Check]:
    checks = []
    for suite in SUITES:
        checks.extend(suite(quick))
    return checks


def format_table(checks: List[Check]) -> str:
    w = max(len(c.name) for c in checks)
    wp = max(len(c.params) for c in checks)
    lines = []
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        line = f"{flag}  {c.name:<{w}}  {c.params:<{wp}}  {c.observed}"
        if not c.passed:
            line += f"  (expected {c.expected})"
        lines.append(line)
    npass = sum(c.passed for c in checks)
    lines.append(f"{npass}/{len(checks)} checks passed")
    return "\n".join(lines)
