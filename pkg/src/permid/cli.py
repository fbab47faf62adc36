"""Command-line front end.

Subcommands cover the whole library surface: orbit enumeration, set-system
construction, achievable-code building, exact and sampled evaluation, the
transformation pipeline, resolution maps, the feedback scheme, and bound
sweeps. Every stochastic subcommand takes a 64-bit root seed (flag --seed,
env PERMID_SEED as fallback, 0 otherwise) and is bit-reproducible. Rational
parameters are parsed exactly from "p/q" strings. Bound or invariant
violations exit nonzero with a machine-readable JSON error on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .approx import approx_distance, build_approx, pigeonhole_collision_check
from .combinatorics import (
    ENUMERATION_LIMIT,
    check_N_bounds,
    count_types,
    iter_types,
    type_index,
    typeclass_size,
)
from .dist import Dist
from .errors import (
    BoundViolationError,
    BudgetError,
    HypothesisError,
    PermidError,
    ValidationError,
)
from .exact import frac_str, parse_frac
from .feedback import (
    build_feedback_code,
    build_until_target,
    eval_feedback_exact,
    eval_feedback_mc,
    target_test,
)
from .idcode import (
    NoiselessIdCode,
    PermIdCode,
    build_multishot_achievable,
    eval_noiseless,
    eval_perm_exact,
    eval_perm_mc,
    strong_converse_floor,
)
from .rng import Stream
from .serialize import (
    SCHEMA,
    code_from_json,
    code_to_json,
    dumps,
    matrix_csv,
    profile_to_json,
    report_to_json,
)
from .setsystem import (
    greedy_gilbert,
    johnson_bound_M,
    lemma6_check,
    prop2_lower_bound,
    verify_profile,
)
from .transforms import (
    gamma_for_rate,
    gamma_for_rate_multishot,
    soft_converse_pipeline,
)


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("PERMID_SEED")
    return int(env) if env else 0


def _emit(args, doc: dict, report=None) -> None:
    if args.format == "csv":
        if report is None:
            raise ValidationError("this subcommand has no CSV rendering")
        if args.output:
            with open(args.output, "w", newline="") as fh:
                matrix_csv(report, fh)
        else:
            matrix_csv(report, sys.stdout)
        return
    text = dumps(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _strip_matrix(doc: dict, report, cap: int) -> dict:
    if report is not None and report.M > cap:
        doc.pop("matrix", None)
        doc.pop("counts", None)
    return doc


def _read_json(path: str, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {what} file {path!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} file {path!r} is not valid JSON: {exc}") from exc


# run documents wrap the code they produced; accept them wherever a code
# document is expected so build/setsystem output chains straight into
# eval/transform/bounds without manual extraction
_NESTED_CODE_KEY = {"build": "code", "setsystem-run": "system"}


def _unwrap_code(doc):
    if isinstance(doc, dict):
        key = _NESTED_CODE_KEY.get(doc.get("kind"))
        if key is not None and key in doc:
            return doc[key]
    return doc


def _load_code(path: str):
    return code_from_json(_unwrap_code(_read_json(path, "code")))


def cmd_types(args) -> dict:
    N = count_types(args.n, args.q)
    bounds = check_N_bounds(args.n, args.q)
    doc = {
        "schema": SCHEMA,
        "kind": "types",
        "n": args.n,
        "q": args.q,
        "N": N,
        "bounds": {
            "lower_ok": bounds.lower_ok,
            "upper_ok": bounds.upper_ok,
            "coarse_ok": bounds.coarse_ok,
        },
    }
    if N <= ENUMERATION_LIMIT:
        doc["types"] = [
            {"index": type_index(t), "counts": list(t.counts), "size": typeclass_size(t)}
            for t in iter_types(args.n, args.q)
        ]
    return doc


def cmd_setsystem(args) -> dict:
    stream = Stream(_resolve_seed(args.seed), "setsystem")
    result = greedy_gilbert(
        args.N,
        parse_frac(args.epsilon),
        parse_frac(getattr(args, "lambda")),
        stream,
        max_attempts=args.max_attempts,
        m_target=args.m_target,
        strict=args.strict,
    )
    return {
        "schema": SCHEMA,
        "kind": "setsystem-run",
        "gamma": result.gamma,
        "cap": result.cap,
        "target": result.target,
        "attempts": result.attempts,
        "reached_target": result.reached_target,
        "warning": result.warning,
        "hypothesis_ok": result.hypothesis.ok,
        "system": code_to_json(result.system),
        "profile": profile_to_json(result.profile),
    }


def cmd_build(args) -> dict:
    stream = Stream(_resolve_seed(args.seed), "build")
    built = build_multishot_achievable(
        args.n,
        args.q,
        args.l,
        parse_frac(args.epsilon),
        stream,
        max_attempts=args.max_attempts,
    )
    p = built.params
    return {
        "schema": SCHEMA,
        "kind": "build",
        "params": {
            "n": p.n,
            "q": p.q,
            "l": p.l,
            "epsilon": frac_str(p.epsilon),
            "N": p.N,
            "ground": p.ground,
            "gamma": p.gamma,
            "cap": p.cap,
            "target": p.target,
            "cap_vacuous": p.cap_vacuous,
            "lambda2_budget": frac_str(p.lambda2_budget),
        },
        "attempts": built.attempts,
        "profile": profile_to_json(built.profile),
        "code": code_to_json(built.code, seed=_resolve_seed(args.seed)),
    }


def cmd_eval(args):
    code = _load_code(args.code)
    if args.mode == "mc":
        stream = Stream(_resolve_seed(args.seed), "eval")
        if isinstance(code, PermIdCode):
            report = eval_perm_mc(code, args.trials, stream)
        elif hasattr(code, "maps"):
            report = eval_feedback_mc(code, args.trials, stream)
        else:
            raise ValidationError("Monte Carlo mode applies to perm or feedback codes")
    else:
        if isinstance(code, PermIdCode):
            report = eval_perm_exact(code)
        elif isinstance(code, NoiselessIdCode):
            report = eval_noiseless(code)
        elif hasattr(code, "maps"):
            report = eval_feedback_exact(code)
        else:
            raise ValidationError(f"cannot evaluate {type(code).__name__}")
    doc = _strip_matrix(report_to_json(report), report, args.matrix_cap)
    if args.converse and isinstance(code, (PermIdCode, NoiselessIdCode)) and args.mode == "exact":
        doc["bounds"] = {"pairwise_floor": frac_str(strong_converse_floor(code))}
    return doc, report


def cmd_transform(args) -> dict:
    code = _load_code(args.code)
    if not isinstance(code, PermIdCode):
        raise ValidationError("the pipeline starts from a permutation-channel code")
    if args.gamma is not None:
        gamma = parse_frac(args.gamma)
    elif args.mu is not None:
        mu = parse_frac(args.mu)
        gamma = (
            gamma_for_rate(mu, code.q)
            if code.l == 1
            else gamma_for_rate_multishot(mu, code.q, code.l)
        )
    else:
        raise ValidationError("pass --gamma directly or --mu for the preset choice")
    result = soft_converse_pipeline(code, gamma)
    steps = []
    for step in result.steps:
        entry = {
            "name": step.name,
            "checks": list(step.checks),
            "before": {
                "lambda1": frac_str(step.before.lambda1),
                "lambda2": frac_str(step.before.lambda2),
            },
            "after": {
                "lambda1": frac_str(step.after.lambda1),
                "lambda2": frac_str(step.after.lambda2),
            },
            "M": step.code.M,
        }
        if hasattr(step, "chosen_bins"):
            entry["gamma"] = frac_str(step.gamma)
            entry["kappa"] = step.kappa
            entry["chosen_bins"] = list(step.chosen_bins)
            entry["factor_vacuous"] = step.factor_vacuous
        if hasattr(step, "kept"):
            entry["kept"] = list(step.kept)
            entry["support_size"] = step.support_size
        steps.append(entry)
    return {
        "schema": SCHEMA,
        "kind": "pipeline",
        "gamma": frac_str(gamma),
        "steps": steps,
        "duplicate_supports": result.duplicate_supports,
        "final": {
            "M": result.final_code.M,
            "lambda1": frac_str(result.final.lambda1),
            "lambda2": frac_str(result.final.lambda2),
        },
        "system": code_to_json(result.system) if result.system else None,
        "profile": profile_to_json(result.profile) if result.profile else None,
    }


def cmd_approx(args):
    if args.code:
        code = _load_code(args.code)
        if not isinstance(code, NoiselessIdCode):
            raise ValidationError("the collision check reads a noiseless code")
        report = pigeonhole_collision_check(code, args.K)
        return {
            "schema": SCHEMA,
            "kind": "pigeonhole",
            "N": report.N,
            "K": report.K,
            "M": report.M,
            "guaranteed": report.guaranteed,
            "collision": list(report.collision) if report.collision else None,
            "floor": frac_str(report.floor) if report.floor is not None else None,
            "lambda_sum": frac_str(report.lambda_sum),
            "distances": [frac_str(d) for d in report.distances],
        }
    if not args.target:
        raise ValidationError("pass --target (probabilities file) or --code")
    probs = _read_json(args.target, "target distribution")
    target = Dist(
        {y: parse_frac(p) for y, p in enumerate(probs, start=1)}, size=len(probs)
    )
    amap = build_approx(target, args.K)
    d = approx_distance(amap, target)
    return {
        "schema": SCHEMA,
        "kind": "approx-map",
        "N": amap.N,
        "K": amap.K,
        "atoms": list(amap.atoms),
        "distance": frac_str(d),
        "distance_decimal": float(d),
        "bound": frac_str(Fraction(amap.N, amap.K)),
    }


def cmd_feedback(args):
    seed = _resolve_seed(args.seed)
    if args.retry:
        result = build_until_target(
            args.n, args.q, args.l, args.M, Stream(seed, "feedback"), args.retry
        )
        code, report = result.code, result.report
        doc = _strip_matrix(report_to_json(report), report, args.matrix_cap)
        doc["draws"] = result.draws
        doc["success"] = result.success
        return doc, report
    code = build_feedback_code(args.n, args.q, args.l, args.M, Stream(seed, "feedback"))
    if args.mode == "mc":
        report = eval_feedback_mc(code, args.trials, Stream(seed, "feedback-mc"))
        return report_to_json(report), report
    report = eval_feedback_exact(code)
    doc = _strip_matrix(report_to_json(report), report, args.matrix_cap)
    if args.target_test:
        doc["target_test"] = target_test(code)
    return doc, report


def cmd_bounds(args) -> dict:
    alpha = parse_frac(args.alpha)
    rows = []
    for M in range(args.M_min, args.M_max + 1):
        row = {"M": M}
        if M > 1 + Fraction(args.N) / alpha:
            row["prop2_lower"] = prop2_lower_bound(args.N, M, alpha)
        rows.append(row)
    doc = {
        "schema": SCHEMA,
        "kind": "bounds",
        "N": args.N,
        "alpha": frac_str(alpha),
        "sweep": rows,
    }
    if args.d is not None and args.w is not None:
        try:
            doc["johnson"] = johnson_bound_M(args.N, args.d, args.w)
        except HypothesisError as exc:
            doc["johnson"] = None
            doc["johnson_note"] = str(exc)
    if args.system:
        system = code_from_json(_unwrap_code(_read_json(args.system, "system")))
        profile = verify_profile(system)
        doc["profile"] = profile_to_json(profile)
        try:
            doc["lemma6_holds"] = lemma6_check(system, alpha)
        except HypothesisError as exc:
            doc["lemma6_holds"] = None
            doc["lemma6_note"] = str(exc)
    return doc


def _bounds_csv(doc: dict, fh) -> None:
    import csv

    writer = csv.writer(fh)
    writer.writerow(["M", "prop2_lower"])
    for row in doc["sweep"]:
        writer.writerow([row["M"], row.get("prop2_lower", "")])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permid",
        description="Exact identification codes for q-ary uniform permutation channels.",
    )
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--output", "-o", help="write the report here instead of stdout")
    parser.add_argument(
        "--matrix-cap",
        type=int,
        default=4096,
        help="omit matrices once the message count exceeds this",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("types", help="enumerate orbits and check the count bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = sub.add_parser("setsystem", help="greedy bounded-intersection family")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--epsilon", required=True, help='set-size ratio, e.g. "1/10"')
    p.add_argument("--lambda", required=True, help='intersection ratio, e.g. "2/5"')
    p.add_argument("--seed", type=int)
    p.add_argument("--m-target", type=int, dest="m_target")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--max-attempts", type=int, default=100_000)

    p = sub.add_parser("build", help="orbit-union achievable code")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-attempts", type=int, default=500_000)

    p = sub.add_parser("eval", help="evaluate a code file")
    p.add_argument("--code", required=True)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--converse", action="store_true", help="attach the pairwise floor")

    p = sub.add_parser("transform", help="run the five-step pipeline")
    p.add_argument("--code", required=True)
    p.add_argument("--gamma", help='bin resolution, e.g. "1/2"')
    p.add_argument("--mu", help="rate margin for the preset gamma")

    p = sub.add_parser("approx", help="resolution maps and the collision check")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--target", help="JSON file with a probability list")
    p.add_argument("--code", help="noiseless code file for the pigeonhole check")

    p = sub.add_parser("feedback", help="two-phase feedback scheme")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--target-test", action="store_true", dest="target_test")
    p.add_argument("--retry", type=int, help="redraw budget for the target test")

    p = sub.add_parser("bounds", help="lower-bound sweeps")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--M-min", type=int, default=2, dest="M_min")
    p.add_argument("--M-max", type=int, default=64, dest="M_max")
    p.add_argument("--d", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--system", help="set-system file for the quadratic bound check")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = None
        if args.command == "types":
            doc = cmd_types(args)
        elif args.command == "setsystem":
            doc = cmd_setsystem(args)
        elif args.command == "build":
            doc = cmd_build(args)
        elif args.command == "eval":
            doc, report = cmd_eval(args)
        elif args.command == "transform":
            doc = cmd_transform(args)
        elif args.command == "approx":
            doc = cmd_approx(args)
        elif args.command == "feedback":
            doc, report = cmd_feedback(args)
        elif args.command == "bounds":
            doc = cmd_bounds(args)
            if args.format == "csv":
                if args.output:
                    with open(args.output, "w", newline="") as fh:
                        _bounds_csv(doc, fh)
                else:
                    _bounds_csv(doc, sys.stdout)
                return 0
        else:
            raise ValidationError(f"unknown command {args.command!r}")
        _emit(args, doc, report)
        return 0
    except BoundViolationError as exc:
        _error_out("bound-violation", exc)
        return 3
    except BudgetError as exc:
        _error_out("budget", exc)
        return 4
    except (ValidationError, HypothesisError) as exc:
        _error_out("invalid-input", exc)
        return 2
    except PermidError as exc:
        _error_out("internal", exc)
        return 1


def _error_out(kind: str, exc: Exception) -> None:
    sys.stderr.write(
        dumps(
            {
                "schema": SCHEMA,
                "kind": "error",
                "category": kind,
                "error": type(exc).__name__,
                "message": str(exc),
            }
        )
    )


if __name__ == "__main__":
    raise SystemExit(main())
