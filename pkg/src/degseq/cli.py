"""Command-line entry point: ``degseq <command> ...``.

Exit codes: 0 success/affirmative, 1 negative or failed test, 2 input
error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from . import core
from .distributions import (
    OVERFLOW,
    iid_from_uniform,
    classify_regime,
    load_dist_config,
    renyi_from_exponential,
)
from .errors import DegenerateParity, DegreeFileError, InvalidTail, NoSwapPair, NotGraphical
from .realize import format_edge_list, realize, verify_realization
from .montecarlo import (
    ExperimentConfig,
    estimate_graphical_prob,
    ks_two_sample,
    max_law_check,
    parity_check,
    sample_maxima,
    trial_rng,
    write_results,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _echo(cmd: str, **cfg) -> None:
    print("# resolved config: " + json.dumps({"command": cmd, **cfg}, sort_keys=True), file=sys.stderr)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(64)
        print(f"# generated seed: {args.seed}", file=sys.stderr)
    return args.seed


def _load_dist(path):
    try:
        return load_dist_config(path)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except InvalidTail as exc:
        raise InputError(str(exc)) from None


def _load_degrees(path):
    try:
        if path == "-":
            return core.parse_degrees(sys.stdin.read())
        return core.read_degree_file(path)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except DegreeFileError as exc:
        raise InputError(str(exc)) from None


def check_report(seq: core.DegreeSequence) -> tuple[bool, list[str]]:
    even = core.sum_parity(seq).even
    s = core.sort_desc(seq)
    viol = core.first_violation(s)
    ok = even and viol is None
    lines = ["GRAPHICAL" if ok else "NOT GRAPHICAL"]
    if not even:
        lines.append("odd total degree")
    if viol is not None:
        lines.append(f"violated at j={viol.j}: {viol.lhs} > {viol.rhs}")
    if not ok:
        margin = core.eg_margin(s)
        lines.append(f"max margin {margin.value} at j={margin.j}")
    return ok, lines


def cmd_check(args) -> int:
    seq = _load_degrees(args.path)
    _echo("check", path=args.path, n=seq.n)
    ok, lines = check_report(seq)
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_realize(args) -> int:
    seq = _load_degrees(args.path)
    _echo("realize", path=args.path, out=args.out, n=seq.n)
    ok, lines = check_report(seq)
    if not ok:
        print("\n".join(lines))
        return EXIT_NEGATIVE
    try:
        g = realize(seq, check_steps=args.check_steps)
    except (NoSwapPair, NotGraphical) as exc:
        print(f"internal invariant failure: {exc} (please report a bug)", file=sys.stderr)
        return EXIT_INTERNAL
    if not verify_realization(g, seq) or g.degree != seq.values:
        print("internal invariant failure: realization does not match degrees", file=sys.stderr)
        return EXIT_INTERNAL
    text = format_edge_list(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sample(args) -> int:
    fam = _load_dist(args.dist)
    seed = _seed(args)
    cfg = {"dist": fam.to_config(), "n": args.n, "trials": args.trials, "seed": seed, "sampler": args.sampler}
    _echo("sample", **cfg)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("# config: " + json.dumps(cfg, sort_keys=True) + "\n")
        for t in range(args.trials):
            rng = trial_rng(seed, args.n, t)
            if args.sampler == "iid":
                d = iid_from_uniform(fam, 1.0 - rng.random(args.n))
            else:
                d = renyi_from_exponential(fam, rng.standard_exponential(args.n))
            if np.any(d == OVERFLOW):
                out.write(f"# trial {t}: CapExceeded (draw above support_max={fam.support_max})\n")
                continue
            out.write(core.format_degrees(d.tolist()) + "\n")
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def _grid(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad --grid {text!r}") from None


def cmd_estimate(args) -> int:
    fam = _load_dist(args.dist)
    seed = _seed(args)
    try:
        cfg = ExperimentConfig(
            family=fam,
            n_grid=tuple(_grid(args.grid)),
            trials=args.trials,
            seed=seed,
            workers=args.workers,
            sampler=args.sampler,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _echo("estimate", **cfg.to_dict(), out=args.out, format=args.format)
    series = estimate_graphical_prob(cfg)
    write_results(series, args.out, args.format)
    for r in series.rows:
        print(
            f"n={r.n} trials={r.trials} graphical={r.graphical} even_sum={r.even_sum} "
            f"p_hat={r.p_hat:.6f} ci=[{r.ci_low:.6f}, {r.ci_high:.6f}] overflow={r.overflow}"
        )
    return EXIT_OK


def cmd_classify(args) -> int:
    fam = _load_dist(args.dist)
    if args.N < 1000:
        raise InputError("--N must be at least 1000")
    _echo("classify", dist=fam.to_config(), N=args.N)
    report = classify_regime(fam, args.N)
    print(json.dumps(report.to_dict(), indent=2, default=str))
    return EXIT_OK


def cmd_validate_sampler(args) -> int:
    fam = _load_dist(args.dist)
    other = _load_dist(args.debug_mismatch) if args.debug_mismatch else fam
    seed = _seed(args)
    n, draws = args.n, args.draws
    _echo(
        "validate-sampler",
        dist=fam.to_config(),
        renyi_dist=other.to_config(),
        n=n,
        draws=draws,
        seed=seed,
        alpha=args.alpha,
    )
    results = []

    iid_max = sample_maxima(fam, n, draws, trial_rng(seed, n, 0), sampler="iid")
    renyi_max = sample_maxima(other, n, draws, trial_rng(seed, n, 1), sampler="renyi")
    ks = ks_two_sample(iid_max, renyi_max)
    results.append(("ks_iid_max_vs_renyi_first", ks.pvalue > args.alpha, f"D={ks.statistic:.6f} p={ks.pvalue:.6g}"))

    ml = max_law_check(fam, n, draws, trial_rng(seed, n, 2))
    results.append(("max_law", ml.passed, f"sup={ml.sup_distance:.6f} band={ml.band:.6f}"))

    try:
        pc = parity_check(fam, n, draws, trial_rng(seed, n, 3))
        results.append(
            ("parity", pc.passed, f"freq={pc.frequency:.6f} exact={pc.exact:.6f} sigma={pc.sigma:.6f} r={pc.r:.6g}")
        )
    except DegenerateParity as exc:
        print(f"parity: SKIP ({exc})")

    for name, passed, detail in results:
        print(f"{name}: {'PASS' if passed else 'FAIL'} {detail}")
    return EXIT_OK if all(p for _, p, _ in results) else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="degseq", description="Graphicality of i.i.d. degree sequences")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide whether a degree file is graphical")
    c.add_argument("path", help="degree-sequence file ('-' for stdin)")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("realize", help="write a simple graph with the given degrees")
    r.add_argument("path")
    r.add_argument("--out", help="edge-list output file (default stdout)")
    r.add_argument("--check-steps", action="store_true", help="re-check every reduced sequence")
    r.set_defaults(func=cmd_realize)

    s = sub.add_parser("sample", help="draw degree sequences")
    s.add_argument("--dist", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.add_argument("--sampler", choices=("iid", "renyi"), default="iid")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("estimate", help="Monte Carlo estimate of P(graphical)")
    e.add_argument("--dist", required=True)
    e.add_argument("--grid", required=True, help="comma-separated increasing n values")
    e.add_argument("--trials", type=int, required=True)
    e.add_argument("--seed", type=int)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--sampler", choices=("iid", "renyi"), default="renyi")
    e.add_argument("--out", default="estimate", help="output path stem")
    e.add_argument("--format", choices=("csv", "json", "both"), default="both")
    e.set_defaults(func=cmd_estimate)

    k = sub.add_parser("classify", help="tail-regime diagnostics as JSON")
    k.add_argument("--dist", required=True)
    k.add_argument("--N", type=int, default=10**6, help="probe bound (>= 1000)")
    k.set_defaults(func=cmd_classify)

    v = sub.add_parser("validate-sampler", help="distributional self-tests of the samplers")
    v.add_argument("--dist", required=True)
    v.add_argument("--n", type=int, default=100)
    v.add_argument("--draws", type=int, default=20000)
    v.add_argument("--seed", type=int)
    v.add_argument("--alpha", type=float, default=0.001)
    v.add_argument("--debug-mismatch", metavar="DIST", help="use another law for the sorted sampler")
    v.set_defaults(func=cmd_validate_sampler)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
