"""Command-line batch runs: ``spherframe <command> [flags]``.

Exit status is 0 on success, 1 when a checked invariant fails and 2 on
usage or input errors.
"""
from __future__ import annotations

import argparse
import contextlib
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from ._rng import GENERATOR, make_rng
from .besov import BesovParams, equivalence_report
from .frame import (DEFAULT_OVERSAMPLING, CoefficientTree, FrameResourceError, TruncationWarning, analyze,
                    build_frame, localization_profile, synthesize, synthesize_function)
from .gegenbauer import eval_kernel_series
from .greedy import bernstein_check, jackson_experiment, synthetic_besov_tree, tau_for
from .harmonic import lp_norm, random_polynomial, sigma_j, zonal
from .quadrature import build_product_rule, moment_residual, mz_ratio
from .window import DEFAULT_WINDOW, check_partition

COMMANDS = {
    "frame-build": "build the frame levels, write the rules and check their exactness",
    "analyze": "frame coefficients of a function CSV (or of a seeded random polynomial)",
    "synthesize": "evaluate a coefficient tree CSV and compare with its source function",
    "besov": "coefficient, band-pass and approximation Besov norms over a seeded ensemble",
    "greedy": "greedy n-term error rates for a synthetic Besov-class coefficient tree",
    "mz-check": "discrete/continuous norm ratios for a cubature rule",
    "localization": "kernel localization profiles across levels",
    "selftest": "quick invariant suites",
}

JACKSON_SLACK = 0.15
JACKSON_RATIO = 10.0
LOCALIZATION_LIMIT = 10.0
ROUND_TRIP_TOL = 1e-8


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    def __init__(self, name, value, limit):
        self.name, self.value, self.limit = name, value, limit
        super().__init__(f"invariant violated: {name} (measured {value:.6g}, limit {limit:.6g})")


def _pos_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _real(s):
    if s.strip().lower() in ("inf", "infinity"):
        return float("inf")
    v = float(s)
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError("must be a finite real or 'inf'")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=3, help="ambient dimension d (only 3 is supported)")
    common.add_argument("--jmax", type=_pos_int, default=None, help="finest frame level")
    common.add_argument("--alpha", type=_real, default=None, help="smoothness")
    common.add_argument("--p", type=_real, default=None, help="integrability exponent (number or 'inf')")
    common.add_argument("--tau", type=_real, default=None, help="Besov summability exponent")
    common.add_argument("--seed", type=_pos_int, default=0)
    common.add_argument("--input", type=Path, default=None)
    common.add_argument("--output", type=Path, default=Path("."), help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=_pos_int, default=None, help="cap on BLAS/FFT threads")
    common.add_argument("--oversampling", type=_pos_int, default=None,
                        help="level j nodes are exact to degree 2^(j+s)")
    common.add_argument("--degree", type=_pos_int, default=None, help="polynomial degree of generated functions")

    ap = argparse.ArgumentParser(prog="spherframe", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")
    cmds = {c: sub.add_parser(c, parents=[common], help=h, description=h) for c, h in COMMANDS.items()}
    cmds["besov"].add_argument("--n-functions", type=_pos_int, default=20)
    cmds["greedy"].add_argument("--eps", type=_real, default=0.1, help="extra decay of the synthetic tree")
    cmds["greedy"].add_argument("--nmax", type=_pos_int, default=256, help="largest n of the grid 2, 4, ..., nmax")
    cmds["mz-check"].add_argument("--t", type=_real, default=1.0, help="weight exponent")
    cmds["mz-check"].add_argument("--rule-degree", type=_pos_int, default=None)
    cmds["mz-check"].add_argument("--trials", type=_pos_int, default=20)
    cmds["localization"].add_argument("--ell", type=_pos_int, default=6)
    cmds["localization"].add_argument("--jmin", type=_pos_int, default=3)
    cmds["synthesize"].add_argument("--reference", type=Path, default=None,
                                    help="function CSV to compare against (default: the tree's source)")
    return ap


def _get(args, name, default):
    v = getattr(args, name)
    return default if v is None else v


def _frame(args, jmax_default, s_default=DEFAULT_OVERSAMPLING):
    if args.dim != 3:
        raise UsageError("--dim: only d = 3 is supported")
    try:
        return build_frame(args.dim, _get(args, "jmax", jmax_default),
                           oversampling=_get(args, "oversampling", s_default))
    except FrameResourceError as exc:
        raise UsageError(f"--jmax/--oversampling: {exc}") from None


def _out(args, name) -> Path:
    args.output.mkdir(parents=True, exist_ok=True)
    return args.output / name


def _check(name, value, ok, limit):
    if not ok:
        raise InvariantViolation(name, value, limit)


def _rel_sup(a, b):
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


# --- commands --------------------------------------------------------------

def cmd_frame_build(args):
    F = _frame(args, 5)
    levels = []
    for j, rule in enumerate(F.levels):
        wsum = float(rule.weights.sum())
        res = moment_residual(rule, min(rule.degree, 64), seed=args.seed) if j else 0.0
        levels.append({"j": j, "nodes": len(rule), "degree": rule.degree, "weight_sum": wsum,
                       "moment_residual": res})
        if args.format == "csv":
            io.write_rule(_out(args, f"level_{j}.csv"), rule)
    io.write_json(_out(args, "frame.json"), {"dim": F.dim, "Jmax": F.jmax, "oversampling": F.oversampling,
                                             "seed": args.seed, "levels": levels})
    worst = max(abs(l["weight_sum"] - 1) for l in levels)
    _check("level weights sum to 1", worst, worst < 1e-13, 1e-13)
    res = max(l["moment_residual"] for l in levels)
    _check("level moment residual", res, res < 1e-12, 1e-12)


def cmd_analyze(args):
    F = _frame(args, 6)
    if args.input is not None:
        f = io.read_function(args.input)
        source = str(args.input.resolve())
    else:
        f, _ = random_polynomial(3, _get(args, "degree", 32), make_rng(args.seed))
        src = _out(args, "function.csv")
        io.write_function(src, f, seed=args.seed)
        source = src.name
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        tree = analyze(F, f)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.format == "json":
        j, k = tree.index()
        io.write_json(_out(args, "tree.json"), {"dim": F.dim, "Jmax": F.jmax, "oversampling": F.oversampling,
                                                "seed": args.seed, "source": source,
                                                "truncated": tree.truncated, "j": j, "k": k,
                                                "coef": tree.flat()})
    else:
        io.write_tree(_out(args, "tree.csv"), F, tree, seed=args.seed, source=source)


def cmd_synthesize(args):
    if args.input is None:
        raise UsageError("--input: a coefficient tree CSV is required")
    F, tree, header = io.read_tree(args.input)
    ref_path = args.reference
    if ref_path is None and header.get("source"):
        cand = Path(header["source"])
        cand = cand if cand.is_absolute() else args.input.parent / cand
        ref_path = cand if cand.exists() else None
    if ref_path is not None:
        ref = io.read_function(ref_path)
        carrier = ref.carrier
    else:
        ref = None
        carrier = build_product_rule(3, 2 * max(F.max_degree(), 1))
    vals = synthesize(F, tree, carrier.nodes)
    X = carrier.nodes
    seed = header.get("seed")
    if args.format == "json":
        io.write_json(_out(args, "synthesis.json"), {"dim": 3, "rule_degree": carrier.degree, "seed": seed,
                                                     "x": X[:, 0], "y": X[:, 1], "z": X[:, 2], "value": vals})
    else:
        io.write_csv(_out(args, "synthesis.csv"), ["x", "y", "z", "value"], [X[:, 0], X[:, 1], X[:, 2], vals])
        io.write_json(io.sidecar(_out(args, "synthesis.csv")),
                      {"dim": 3, "degree": min(F.max_degree(), carrier.degree // 2),
                       "rule_degree": carrier.degree, "seed": seed})
    if ref is not None:
        err = _rel_sup(vals, ref.samples)
        print(f"round-trip relative error {err:.3e}")
        _check("analyze/synthesize round trip", err, err < ROUND_TRIP_TOL, ROUND_TRIP_TOL)


def _besov_params(args, alpha=1.0, p=2.0):
    alpha, p = _get(args, "alpha", alpha), _get(args, "p", p)
    tau = _get(args, "tau", p)
    try:
        return BesovParams(alpha, p, tau)
    except ValueError as exc:
        raise UsageError(f"--alpha/--p/--tau: {exc}") from None


def cmd_besov(args):
    params = _besov_params(args)
    F = _frame(args, 6)
    rng = make_rng(args.seed)
    L = _get(args, "degree", 32)
    fs = [random_polynomial(3, L, rng)[0] for _ in range(args.n_functions)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        try:
            rep = equivalence_report(fs, params, F)
        except ValueError as exc:
            raise UsageError(f"--p: {exc}") from None
    rep["seed"] = args.seed
    rep["degree"] = L
    io.write_json(_out(args, "besov_report.json"), rep)
    st = rep["spread_stats"]
    worst = max(st["coef_over_sigma"]["spread"], st["coef_over_approx"]["spread"])
    _check("Besov norm equivalence spread", worst, st["passed"], st["limit"])


def cmd_greedy(args):
    alpha, p = _get(args, "alpha", 1.0), _get(args, "p", 2.0)
    if p < 1:
        raise UsageError("--p: greedy error norms need p >= 1")
    if args.tau is not None and not np.isclose(args.tau, tau_for(alpha, p, 3)):
        raise UsageError(f"--tau: must equal (alpha/(d-1) + 1/p)^-1 = {tau_for(alpha, p, 3):.6g}")
    F = _frame(args, 6, s_default=1)
    tree = synthetic_besov_tree(F, alpha, args.eps, make_rng(args.seed))
    f = synthesize_function(F, tree)
    n_grid = [1 << i for i in range(1, max(args.nmax, 2).bit_length()) if (1 << i) <= args.nmax]
    if len(n_grid) < 2:
        raise UsageError("--nmax: need at least two sparsity levels")
    rep = jackson_experiment(F, f, alpha, p, n_grid, tree=tree)
    if args.format == "json":
        rep["seed"] = args.seed
        io.write_json(_out(args, "rates.json"), rep)
    else:
        io.write_rates(_out(args, "rates.csv"), rep, seed=args.seed)
    target = rep["target_slope"] + JACKSON_SLACK
    _check("Jackson slope", rep["slope"], rep["slope"] <= target, target)
    _check("Jackson ratio max/median", rep["ratio_max_over_median"],
           rep["ratio_max_over_median"] < JACKSON_RATIO, JACKSON_RATIO)


def cmd_mz_check(args):
    p, t = _get(args, "p", 2.0), args.t
    L = _get(args, "degree", 16)
    if args.input is not None:
        rd = _get(args, "rule_degree", 2 * L)
        rule = io.read_rule(args.input, rd)
    else:
        rule = build_product_rule(3, _get(args, "rule_degree", 2 * L))
    if rule.degree < L:
        raise UsageError("--rule-degree: below the polynomial degree")
    rng = make_rng(args.seed)
    ratios = [mz_ratio(random_polynomial(3, L, rng)[0], rule, p, t) for _ in range(args.trials)]
    exact = p == 2 and t == 1 and rule.degree >= 2 * L
    io.write_json(_out(args, "mz.json"), {"p": p, "t": t, "degree": L, "rule_degree": rule.degree,
                                          "seed": args.seed, "ratios": ratios, "exact_case": exact})
    if exact:
        dev = max(abs(r - 1) for r in ratios)
        _check("MZ ratio equals 1", dev, dev < 1e-10, 1e-10)
    else:
        lo, hi = min(ratios), max(ratios)
        _check("MZ ratio within [1/4, 4]", hi if hi > 4 else lo, lo >= 0.25 and hi <= 4, 4.0)


def cmd_localization(args):
    F = _frame(args, 7)
    jmin = max(args.jmin, 1)
    if jmin > F.jmax:
        raise UsageError("--jmin: exceeds --jmax")
    prof = {j: localization_profile(F, j, args.ell) for j in range(jmin, F.jmax + 1)}
    ratio = max(prof.values()) / min(prof.values())
    io.write_json(_out(args, "localization.json"), {"ell": args.ell, "seed": args.seed, "profile": prof,
                                                    "max_over_min": ratio, "limit": LOCALIZATION_LIMIT})
    _check("localization profile max/min", ratio, ratio < LOCALIZATION_LIMIT, LOCALIZATION_LIMIT)


# --- selftest --------------------------------------------------------------

def _suite(value, limit, passed=None):
    return {"value": float(value), "limit": float(limit),
            "passed": bool(value < limit if passed is None else passed)}


def selftest_suites(jmax: int = 5, seed: int = 0) -> dict:
    """Quick versions of the library invariants on a level-``jmax`` frame."""
    if jmax < 3:
        raise UsageError("--jmax: selftest needs jmax >= 3")
    out = {}
    xs = np.logspace(-2, 2, 10_000)
    out["partition_of_unity"] = _suite(check_partition(xs, 1e-12)[0], 1e-12)
    res = 0.0
    for N in (8, 16, 32):
        r = build_product_rule(3, N)
        res = max(res, moment_residual(r, N, seed), abs(r.weights.sum() - 1))
    out["cubature_exactness"] = _suite(res, 1e-12)

    F = build_frame(3, jmax, oversampling=1)
    L = 1 << (jmax - 1)
    rng = make_rng(seed)
    rec = pars = 0.0
    for _ in range(3):
        f, _spec = random_polynomial(3, L, rng)
        tree = analyze(F, f)
        X = rng.standard_normal((100, 3))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        fx = f.eval_at(X)
        rec = max(rec, _rel_sup(synthesize(F, tree, X), fx))
        n2 = lp_norm(f, 2) ** 2
        pars = max(pars, abs(np.sum(tree.flat() ** 2) - n2) / n2)
    out["reconstruction"] = _suite(rec, 1e-8)
    out["parseval"] = _suite(pars, 1e-9)

    e = np.array([0.0, 0.6, 0.8])
    mult = 0.0
    for m in range(0, L + 1, max(1, L // 4)):
        Y = zonal(3, m, e, L=L)
        for j in range(jmax + 1):
            s = sigma_j(Y, j)
            g = 1.0 if (j == 0 and m == 0) else (0.0 if j == 0 else DEFAULT_WINDOW.phi(m / 2.0 ** (j - 1)))
            mult = max(mult, np.max(np.abs(s.samples - g * Y.samples)) / np.max(np.abs(Y.samples)))
    out["multiplier_identity"] = _suite(mult, 1e-10)

    rule = build_product_rule(3, 2 * L)
    dev = max(abs(mz_ratio(random_polynomial(3, L, rng)[0], rule, 2.0) - 1) for _ in range(3))
    out["mz_p2"] = _suite(dev, 1e-10)

    # the far-field tail sup_{theta >= pi/2} |G_j| / G_j(1) shrinks with the level
    Fk = build_frame(3, jmax)
    t = np.cos(np.linspace(np.pi / 2, np.pi, 4001))
    tail = np.array([np.max(np.abs(eval_kernel_series(Fk.kernel(j), t)))
                     / eval_kernel_series(Fk.kernel(j), np.array([1.0]))[0] for j in range(1, jmax + 1)])
    out["localization_decay"] = _suite(np.max(tail[1:] / tail[:-1]), 1.0)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        fs = [random_polynomial(3, L, rng)[0] for _ in range(3)]
        rep = equivalence_report(fs, BesovParams(1.0, 2.0, 2.0), F)
    st = rep["spread_stats"]
    out["besov_equivalence"] = _suite(max(st["coef_over_sigma"]["spread"], st["coef_over_approx"]["spread"]),
                                      st["limit"])

    bern = 0.0
    for j in range(1, jmax + 1):
        tree = CoefficientTree.zeros(F)
        tree.levels[j][int(rng.integers(len(F.levels[j])))] = 1.0
        bern = max(bern, abs(bernstein_check(F, tree, 1.0, 2.0)["R"] - 1))
    out["bernstein_single_atom"] = _suite(bern, 1e-6)

    tree = synthetic_besov_tree(F, 1.0, 0.1, make_rng(seed))
    rep = jackson_experiment(F, synthesize_function(F, tree), 1.0, 2.0, [2 ** i for i in range(1, 9)], tree=tree)
    target = rep["target_slope"] + JACKSON_SLACK
    out["jackson_slope"] = _suite(rep["slope"], target, rep["slope"] <= target)
    return out


def cmd_selftest(args):
    jmax = _get(args, "jmax", 5)
    suites = selftest_suites(jmax, args.seed)
    ok = all(s["passed"] for s in suites.values())
    io.write_json(_out(args, "selftest.json"), {"jmax": jmax, "seed": args.seed, "rng": GENERATOR,
                                                "suites": suites, "passed": ok})
    for name, s in suites.items():
        print(f"{'PASS' if s['passed'] else 'FAIL'}  {name}: {s['value']:.3e} (limit {s['limit']:.3e})")
    if not ok:
        bad = next(n for n, s in suites.items() if not s["passed"])
        raise InvariantViolation(bad, suites[bad]["value"], suites[bad]["limit"])


HANDLERS = {
    "frame-build": cmd_frame_build, "analyze": cmd_analyze, "synthesize": cmd_synthesize,
    "besov": cmd_besov, "greedy": cmd_greedy, "mz-check": cmd_mz_check,
    "localization": cmd_localization, "selftest": cmd_selftest,
}


def _thread_limit(n):
    if n is None:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=max(n, 1))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_limit(args.threads):
            HANDLERS[args.command](args)
    except InvariantViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except io.InputMismatch as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc.filename}: no such file", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
