"""JSON and CSV renderings of codes and reports (schema tag "permid/1").

Probabilities serialize as exact "p/q" strings; a *_decimal neighbor is
attached for human reading and is never parsed back. Input vectors serialize
as their 1-based lexicographic rank over the full q-ary cube, so code files
stay flat lists of integers and strings. All JSON is emitted with sorted
keys, making equal objects byte-identical for determinism checks.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dist import Dist
from .errors import ValidationError
from .exact import frac_str, parse_frac
from .feedback import CollisionReport, FeedbackCode, FeedbackMCReport
from .idcode import ErrorReport, MCReport, NoiselessIdCode, PermIdCode
from .setsystem import IntersectionProfile, SetSystem

SCHEMA = "permid/1"


def vector_to_index(x: Sequence[int], q: int) -> int:
    """1-based lexicographic rank of a q-ary tuple (symbols 1..q)."""
    idx = 0
    for sym in x:
        if not 1 <= sym <= q:
            raise ValidationError(f"symbol {sym} outside [1..{q}]")
        idx = idx * q + (sym - 1)
    return idx + 1


def index_to_vector(index: int, q: int, m: int) -> tuple[int, ...]:
    """Inverse of vector_to_index for tuples of length m."""
    if not 1 <= index <= q**m:
        raise ValidationError(f"index {index} outside [1..{q**m}]")
    rest = index - 1
    out = []
    for _ in range(m):
        rest, digit = divmod(rest, q)
        out.append(digit + 1)
    return tuple(reversed(out))


def _frac_pair(value: Fraction) -> list:
    return [frac_str(value), float(value)]


def code_to_json(code, seed: int | None = None) -> dict:
    """Render any code (or set system) as a schema-tagged dict."""
    if isinstance(code, NoiselessIdCode):
        doc = {
            "schema": SCHEMA,
            "kind": "noiseless",
            "N": code.N,
            "M": code.M,
            "encoders": [
                sorted([k, frac_str(p)] for k, p in enc.items())
                for enc in code.encoders
            ],
        }
        if code.is_deterministic():
            doc["decoders"] = {
                "deterministic": [sorted(d) for d in code.decoders]
            }
        else:
            doc["decoders"] = {
                "stochastic": [
                    [
                        frac_str(d.get(k, 0)) if not isinstance(d, frozenset)
                        else frac_str(Fraction(1 if k in d else 0))
                        for k in range(1, code.N + 1)
                    ]
                    for d in code.decoders
                ]
            }
    elif isinstance(code, PermIdCode):
        doc = {
            "schema": SCHEMA,
            "kind": "perm",
            "n": code.n,
            "q": code.q,
            "l": code.l,
            "N": code.N,
            "M": code.M,
            "encoders": [
                sorted([vector_to_index(x, code.q), frac_str(p)] for x, p in enc.items())
                for enc in code.encoders
            ],
            "decoders": {
                "typecounts": [
                    [counts.get(t, 0) for t in range(1, code.ground + 1)]
                    for counts in code.decoder_counts
                ]
            },
        }
    elif isinstance(code, FeedbackCode):
        doc = {
            "schema": SCHEMA,
            "kind": "feedback",
            "n": code.n,
            "q": code.q,
            "l": code.l,
            "N": code.N,
            "M": code.M,
            "maps": code.maps.tolist(),
        }
    elif isinstance(code, SetSystem):
        doc = {
            "schema": SCHEMA,
            "kind": "setsystem",
            "N": code.N,
            "M": code.M,
            "sets": [sorted(s) for s in code.sets],
        }
    else:
        raise ValidationError(f"cannot serialize {type(code).__name__}")
    if seed is not None:
        doc["seed"] = seed
    return doc


def code_from_json(doc: dict):
    """Rebuild a code object from its JSON dict."""
    if doc.get("schema") != SCHEMA:
        raise ValidationError(f"unknown schema {doc.get('schema')!r}")
    kind = doc.get("kind")
    if kind == "noiseless":
        N = doc["N"]
        encoders = [
            Dist({int(k): parse_frac(p) for k, p in pairs}, size=N)
            for pairs in doc["encoders"]
        ]
        decs = doc["decoders"]
        if "deterministic" in decs:
            decoders = [frozenset(int(k) for k in d) for d in decs["deterministic"]]
        elif "stochastic" in decs:
            decoders = [
                {k: parse_frac(p) for k, p in enumerate(row, start=1) if parse_frac(p)}
                for row in decs["stochastic"]
            ]
        else:
            raise ValidationError("noiseless decoders must be deterministic or stochastic")
        return NoiselessIdCode(N, encoders, decoders)
    if kind == "perm":
        n, q, l = doc["n"], doc["q"], doc["l"]
        encoders = [
            Dist(
                {index_to_vector(int(i), q, n * l): parse_frac(p) for i, p in pairs}
            )
            for pairs in doc["encoders"]
        ]
        counts = [
            {t: int(c) for t, c in enumerate(row, start=1) if int(c)}
            for row in doc["decoders"]["typecounts"]
        ]
        return PermIdCode(n, q, encoders, counts, l=l)
    if kind == "feedback":
        return FeedbackCode(
            doc["n"], doc["q"], doc["l"], np.array(doc["maps"], dtype=np.int64)
        )
    if kind == "setsystem":
        return SetSystem(doc["N"], tuple(frozenset(s) for s in doc["sets"]))
    raise ValidationError(f"unknown code kind {kind!r}")


def report_to_json(report) -> dict:
    """Render an exact, Monte Carlo, or collision report as a dict."""
    if isinstance(report, ErrorReport):
        doc = {
            "schema": SCHEMA,
            "kind": "error-report",
            "M": report.M,
            "lambda1": frac_str(report.lambda1),
            "lambda1_decimal": float(report.lambda1),
            "lambda2": frac_str(report.lambda2),
            "lambda2_decimal": float(report.lambda2),
            "lambda": frac_str(report.total),
            "lambda_decimal": float(report.total),
            "missed": [frac_str(m) for m in report.missed],
            "argmax_miss": report.argmax_miss,
            "argmax_cross": list(report.argmax_cross) if report.argmax_cross else None,
        }
        if report.accept is not None:
            doc["matrix"] = [[frac_str(p) for p in row] for row in report.accept]
        return doc
    if isinstance(report, (MCReport, FeedbackMCReport)):
        doc = {
            "schema": SCHEMA,
            "kind": "mc-report",
            "M": report.M,
            "lambda1": report.lambda1_hat,
            "lambda2": report.lambda2_hat,
            "mc": {"trials": report.trials, "stderr": report.stderr},
        }
        if report.accept_hat is not None:
            doc["matrix"] = [list(row) for row in report.accept_hat]
        return doc
    if isinstance(report, CollisionReport):
        doc = {
            "schema": SCHEMA,
            "kind": "collision-report",
            "M": report.M,
            "D": report.D,
            "N": report.N,
            "lambda1": frac_str(report.lambda1),
            "lambda2": frac_str(report.lambda2) if report.lambda2 is not None else None,
            "lambda2_decimal": float(report.lambda2) if report.lambda2 is not None else None,
            "max_count": report.max_count,
            "argmax_pair": list(report.argmax_pair) if report.argmax_pair else None,
            "target": frac_str(report.target),
            "passed": report.passed,
        }
        if report.counts is not None:
            doc["counts"] = report.counts.tolist()
        return doc
    raise ValidationError(f"cannot serialize {type(report).__name__}")


def error_report_from_json(doc: dict) -> ErrorReport:
    """Rebuild an exact ErrorReport; inverse of report_to_json on that kind."""
    if doc.get("schema") != SCHEMA or doc.get("kind") != "error-report":
        raise ValidationError("not an error-report document")
    accept = None
    if "matrix" in doc:
        accept = tuple(tuple(parse_frac(p) for p in row) for row in doc["matrix"])
    return ErrorReport(
        M=doc["M"],
        lambda1=parse_frac(doc["lambda1"]),
        lambda2=parse_frac(doc["lambda2"]),
        missed=tuple(parse_frac(m) for m in doc["missed"]),
        argmax_miss=doc["argmax_miss"],
        argmax_cross=tuple(doc["argmax_cross"]) if doc["argmax_cross"] else None,
        accept=accept,
    )


def profile_to_json(profile: IntersectionProfile) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "profile",
        "N": profile.N,
        "M": profile.M,
        "gamma": profile.gamma,
        "delta": profile.delta,
        "epsilon": frac_str(profile.epsilon),
        "ratio": _frac_pair(profile.ratio)[0] if profile.gamma else None,
        "ratio_decimal": float(profile.ratio) if profile.gamma else None,
    }


def dumps(doc: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, one trailing
    newline; byte-identical for equal documents."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def matrix_csv(report, fh) -> None:
    """One row per (i, j) acceptance entry; exact string plus decimal."""
    writer = csv.writer(fh)
    if isinstance(report, ErrorReport):
        if report.accept is None:
            raise ValidationError("report carries no matrix (M too large)")
        writer.writerow(["i", "j", "accept", "accept_decimal"])
        for i, row in enumerate(report.accept, start=1):
            for j, p in enumerate(row, start=1):
                writer.writerow([i, j, frac_str(p), float(p)])
    elif isinstance(report, (MCReport, FeedbackMCReport)):
        if report.accept_hat is None:
            raise ValidationError("report carries no matrix (M too large)")
        writer.writerow(["i", "j", "accept_hat"])
        for i, row in enumerate(report.accept_hat, start=1):
            for j, p in enumerate(row, start=1):
                writer.writerow([i, j, p])
    elif isinstance(report, CollisionReport):
        if report.counts is None:
            raise ValidationError("report carries no matrix (M too large)")
        writer.writerow(["j", "k", "collisions", "fraction", "fraction_decimal"])
        for j in range(1, report.M + 1):
            for k in range(1, report.M + 1):
                if j == k:
                    continue
                c = int(report.counts[j - 1][k - 1])
                writer.writerow(
                    [j, k, c, frac_str(Fraction(c, report.D)), c / report.D]
                )
    else:
        raise ValidationError(f"cannot render {type(report).__name__} as CSV")
