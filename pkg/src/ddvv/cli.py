"""Command line front end.

Subcommands::

    ddvv check FILE [--tol T] [--format json|csv]   inequality gap + equality certificate
    ddvv geom FILE [--c C] [--tol T] [--format ...] curvature report at a point
    ddvv search --n N [--restarts R] [--seed S] [--max-iters K] [--workers W]
    ddvv demo {counterexample,equality,lemmas}

FILE holds one family document or a JSON array of them, e.g.
``{"n": 2, "m": 2, "kind": "symmetric", "matrices": [[[0,1],[1,0]], [[1,0],[0,-1]]]}``.
A report from ``check`` is also accepted as input (its ``input`` field is used).

Exit codes: 0 success, 2 input error, 3 internal inconsistency.

CSV columns (``check``): index, status, n, m, kind, lhs, rhs, gap, equality, mu,
residual, error. CSV columns (``geom``): index, status, n, m, c, rho, rho_perp,
H_sq, gap, wintgen, mu, error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .algebra import random_orthogonal
from .core import (
    EQUALITY_TOL,
    conjugate_family,
    ddvv_gap,
    detect_equality,
    mixed_gap,
    normal_form_pair,
    rotate_family,
)
from .errors import InputError, InternalInconsistencyError
from .geometry import CurvaturePoint, curvature_report, wintgen_detect
from .lemmas import lemma_suite
from .search import SearchConfig, classify_maximizers, maximize

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3
KINDS = ("symmetric", "antisymmetric", "mixed")
CHECK_COLUMNS = ["index", "status", "n", "m", "kind", "lhs", "rhs", "gap", "equality", "mu",
                 "residual", "error"]
GEOM_COLUMNS = ["index", "status", "n", "m", "c", "rho", "rho_perp", "H_sq", "gap", "wintgen",
                "mu", "error"]


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(obj):
    return json.dumps(obj, indent=2, default=_jsonable)


def load_documents(path):
    """Read one document or an array of documents; returns ``(docs, is_batch)``."""
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"malformed JSON at line {exc.lineno} column {exc.colno} (char {exc.pos}): {exc.msg}"
        ) from exc
    if isinstance(data, list):
        return data, True
    return [data], False


def parse_family(doc):
    """Validate a family document; returns ``(stack, kind, echo)``."""
    if isinstance(doc, dict) and "input" in doc and "matrices" not in doc:
        doc = doc["input"]
    if not isinstance(doc, dict):
        raise InputError("family document must be a JSON object")
    for key in ("n", "m", "matrices"):
        if key not in doc:
            raise InputError(f"family document missing '{key}'")
    n, m = doc["n"], doc["m"]
    if not (isinstance(n, int) and isinstance(m, int)) or n < 1 or m < 1:
        raise InputError("n and m must be positive integers")
    kind = doc.get("kind", "symmetric")
    if kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}, got {kind!r}")
    mats = doc["matrices"]
    if not isinstance(mats, list) or len(mats) != m:
        raise InputError(f"expected {m} matrices, got {len(mats) if isinstance(mats, list) else mats!r}")
    for r, mat in enumerate(mats):
        if (not isinstance(mat, list) or len(mat) != n
                or any(not isinstance(row, list) or len(row) != n for row in mat)):
            raise InputError(f"matrix {r} is not {n} x {n}")
        for row in mat:
            for v in row:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise InputError(f"matrix {r} has a non-numeric entry {v!r}")
    stack = np.array(mats, dtype=float).reshape(m, n, n)
    if not np.all(np.isfinite(stack)):
        raise InputError("matrix entries must be finite")
    if kind == "antisymmetric":
        defect = float(np.max(np.abs(stack + stack.transpose(0, 2, 1))))
        if defect > 1e-9 * max(1.0, float(np.max(np.abs(stack)))):
            raise InputError(f"antisymmetric kind with defect {defect:.3e}")
    echo = {"n": n, "m": m, "kind": kind, "matrices": mats}
    return stack, kind, echo


def check_one(doc, tol):
    report = {"tool": "ddvv", "version": __version__, "status": "ok"}
    try:
        stack, kind, echo = parse_family(doc)
        report["input"] = echo
        if kind == "symmetric":
            gap = ddvv_gap(stack, tol)
            cert = detect_equality(stack, tol) if gap.equality_flag else None
        else:
            gap = mixed_gap(stack, tol)
            cert = None
        report.update(gap.as_dict())
        report["certificate"] = cert.as_dict() if cert is not None else None
        return report, EXIT_OK
    except InputError as exc:
        report.update(status="input-error", error=str(exc))
        return report, EXIT_INPUT
    except InternalInconsistencyError as exc:
        report.update(status="internal-inconsistency", error=str(exc))
        return report, EXIT_INTERNAL


def geom_one(doc, c, tol):
    report = {"tool": "ddvv", "version": __version__, "status": "ok"}
    try:
        stack, kind, echo = parse_family(doc)
        if kind != "symmetric":
            raise InputError("shape operators must be symmetric")
        if c is None:
            c = doc.get("c", 0.0) if isinstance(doc, dict) else 0.0
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise InputError("c must be a finite number")
        echo["c"] = c
        report["input"] = echo
        point = CurvaturePoint(stack, c)
        rep = curvature_report(point, tol)
        report.update(rep.as_dict())
        frame = wintgen_detect(point, tol) if rep.wintgen_flag else None
        report["normal_form"] = frame.as_dict() if frame is not None else None
        return report, EXIT_OK
    except InputError as exc:
        report.update(status="input-error", error=str(exc))
        return report, EXIT_INPUT
    except InternalInconsistencyError as exc:
        report.update(status="internal-inconsistency", error=str(exc))
        return report, EXIT_INTERNAL


def _csv_row(index, report, columns):
    cert = report.get("certificate") or report.get("normal_form") or {}
    inp = report.get("input", {})
    values = {
        "index": index, "status": report["status"], "n": inp.get("n", ""), "m": inp.get("m", ""),
        "kind": inp.get("kind", ""), "c": inp.get("c", ""),
        "mu": cert.get("mu", ""), "residual": cert.get("residual", ""),
        "error": report.get("error", ""),
    }
    for key in ("lhs", "rhs", "gap", "equality", "rho", "rho_perp", "H_sq", "wintgen"):
        values[key] = report.get(key, "")
    return [repr(v) if isinstance(v, float) else v for v in (values[c] for c in columns)]


def _emit(reports, batch, fmt, columns, out):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for i, rep in enumerate(reports):
            writer.writerow(_csv_row(i, rep, columns))
        out.write(buf.getvalue())
    else:
        out.write(dumps(reports if batch else reports[0]) + "\n")


def _run_batch(func, docs, workers):
    if workers > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, docs))
    return [func(d) for d in docs]


def cmd_check(args, out):
    docs, batch = load_documents(args.input)
    results = _run_batch(lambda d: check_one(d, args.tol), docs, args.workers)
    _emit([r for r, _ in results], batch, args.format, CHECK_COLUMNS, out)
    return max(code for _, code in results)


def cmd_geom(args, out):
    docs, batch = load_documents(args.input)
    results = _run_batch(lambda d: geom_one(d, args.c, args.tol), docs, args.workers)
    _emit([r for r, _ in results], batch, args.format, GEOM_COLUMNS, out)
    return max(code for _, code in results)


def cmd_search(args, out):
    if not 2 <= args.n <= 8:
        raise InputError(f"--n must be between 2 and 8, got {args.n}")
    config = SearchConfig(n=args.n, restarts=args.restarts, max_iters=args.max_iters,
                          seed=args.seed, workers=args.workers)
    code = EXIT_OK
    try:
        result = maximize(config)
    except InternalInconsistencyError as exc:
        result, code = exc.result, EXIT_INTERNAL
    doc = {"tool": "ddvv", "version": __version__, "seed": args.seed}
    doc.update(result.as_dict())
    doc["config"].pop("workers")
    if result.best_f > -0.1:
        cls = classify_maximizers(result)
        doc["classification"] = {"passed": cls.passed, "weights": cls.weights,
                                 "residuals": cls.residuals}
    else:
        doc["classification"] = None
    out.write(dumps(doc) + "\n")
    return code


def demo_counterexample():
    mats = [[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]], [[0.0, 1.0], [-1.0, 0.0]]]
    rep = mixed_gap(mats)
    return {"demo": "counterexample", "matrices": mats, **rep.as_dict(),
            "violated": rep.gap < 0}, EXIT_OK


def demo_equality(seed=2024):
    rng = np.random.default_rng(seed)
    n, m, mu = 4, 3, 1.5
    fam = np.zeros((m, n, n))
    fam[0], fam[1] = normal_form_pair(n, mu)
    rot, conj = random_orthogonal(m, rng), random_orthogonal(n, rng)
    disguised = conjugate_family(rotate_family(fam, rot), conj)
    gap = ddvv_gap(disguised)
    cert = detect_equality(disguised)
    ok = cert is not None and cert.residual <= 1e-8 and abs(cert.mu - mu) <= 1e-8 * mu
    return {"demo": "equality", "n": n, "m": m, "mu": mu, "family": disguised.members,
            **gap.as_dict(), "certificate": cert.as_dict() if cert else None,
            "recovered": ok}, EXIT_OK if ok else EXIT_INTERNAL


def demo_lemmas(seed=0):
    stats = lemma_suite(seed=seed)
    ok = all(v[0] <= v[1] + (1e-12 if k.startswith("lemma22") else 1e-9)
             for k, v in stats.items() if isinstance(v, tuple))
    out = {"demo": "lemmas", "seed": seed, "all_bounds_respected": ok}
    out.update({k: ({"observed": v[0], "bound": v[1]} if isinstance(v, tuple) else v)
                for k, v in stats.items()})
    return out, EXIT_OK if ok else EXIT_INTERNAL


DEMOS = {"counterexample": demo_counterexample, "equality": demo_equality, "lemmas": demo_lemmas}


def cmd_demo(args, out):
    doc, code = DEMOS[args.name]()
    out.write(dumps(doc) + "\n")
    return code


def build_parser():
    ap = argparse.ArgumentParser(prog="ddvv", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ddvv {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate the commutator inequality for families")
    p.add_argument("input", help="family document(s), '-' for stdin")
    p.add_argument("--tol", type=float, default=EQUALITY_TOL)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("geom", help="curvature report from shape operators")
    p.add_argument("input", help="shape-operator document(s), '-' for stdin")
    p.add_argument("--c", type=float, default=None, help="ambient curvature (default 0)")
    p.add_argument("--tol", type=float, default=EQUALITY_TOL)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_geom)

    p = sub.add_parser("search", help="maximize the reduced objective")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("demo", help="reproducible demonstrations")
    p.add_argument("name", choices=sorted(DEMOS))
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalInconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
