"""JSON problem files and the ``qfdiv`` command line."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Mapping, Optional

import numpy as np

from .asymptotics import gap_report
from .convex_core import DivergenceGenerator, FamilyError, from_dict, to_dict
from .dmin_solver import PATHS, DivergenceResult, SolveOptions, SolverError, solve
from .fisher_info import (
    BUILTIN_FAMILIES,
    HypothesisError,
    SecondOrderReport,
    second_order_check,
    second_order_from_samples,
)
from .matrix_calc import DensityOperator, MatrixError
from .measurement_oracle import verify

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NONCONVERGED = 3


class InputError(ValueError):
    """Malformed problem file; the message names the offending field."""


@dataclass
class Problem:
    family: Optional[dict]
    generator: Optional[DivergenceGenerator]
    rho1: np.ndarray
    rho2: np.ndarray


# ---------------------------------------------------------------------------
# Parsing


def _check_keys(obj: Mapping, allowed: set, required: set, path: str) -> None:
    for k in obj:
        if k not in allowed:
            raise InputError(f"{path + '.' if path else ''}{k}: unknown field")
    for k in sorted(required):
        if k not in obj:
            raise InputError(f"{path + '.' if path else ''}{k}: required field is missing")


def _number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"{path}: expected a number, got {x!r}")
    if not math.isfinite(x):
        raise InputError(f"{path}: expected a finite number, got {x!r}")
    return float(x)


def parse_matrix(rows, path: str) -> np.ndarray:
    """Matrix given as rows of [re, im] pairs."""
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{path}: expected a non-empty list of rows")
    n = len(rows)
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"{path}[{i}]: expected a row of {n} [re, im] pairs")
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                raise InputError(f"{path}[{i}][{j}]: expected a [re, im] pair")
            out[i, j] = complex(_number(entry[0], f"{path}[{i}][{j}][0]"), _number(entry[1], f"{path}[{i}][{j}][1]"))
    return out


def _density(rows, path: str) -> np.ndarray:
    mat = parse_matrix(rows, path)
    try:
        DensityOperator(mat, name=path)
    except MatrixError as exc:
        raise InputError(str(exc)) from None
    return mat


def _load(source) -> Any:
    if isinstance(source, (dict, list)):
        return source
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None


def parse_family(obj, path: str = "family") -> DivergenceGenerator:
    try:
        return from_dict(obj, path)
    except FamilyError as exc:
        raise InputError(str(exc)) from None


def parse_problem(source, *, require_family: bool = True) -> Problem:
    """Parse ``{"family": {...}, "rho1": [...], "rho2": [...]}``; unknown fields are rejected."""
    obj = _load(source)
    if not isinstance(obj, dict):
        raise InputError("problem: expected a JSON object")
    _check_keys(obj, {"family", "rho1", "rho2"}, {"rho1", "rho2"} | ({"family"} if require_family else set()), "")
    gen = parse_family(obj["family"]) if "family" in obj else None
    rho1 = _density(obj["rho1"], "rho1")
    rho2 = _density(obj["rho2"], "rho2")
    if rho1.shape != rho2.shape:
        raise InputError(f"rho2: dimension {rho2.shape[0]} differs from rho1 dimension {rho1.shape[0]}")
    return Problem(dict(obj["family"]) if gen is not None else None, gen, rho1, rho2)


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def dump_problem(problem: Problem) -> str:
    obj = {}
    if problem.family is not None:
        obj["family"] = problem.family
    elif problem.generator is not None:
        obj["family"] = to_dict(problem.generator)
    obj["rho1"] = matrix_to_json(problem.rho1)
    obj["rho2"] = matrix_to_json(problem.rho2)
    return json.dumps(obj, sort_keys=True)


# ---------------------------------------------------------------------------
# Output


def format_number(x: float):
    """17 significant digits; infinities become the strings "inf" and "-inf"."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(format(x, ".17g"))


def _plain(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return matrix_to_json(obj)
        return [_plain(v) for v in obj.tolist()]
    return obj


def dumps(obj) -> str:
    """JSON text in which every float is written with 17 significant digits."""
    table = {}

    def mark(o):
        if isinstance(o, float):
            key = f"@@{len(table)}@@"
            table[key] = format_number(o)
            return key
        if isinstance(o, dict):
            return {k: mark(v) for k, v in o.items()}
        if isinstance(o, list):
            return [mark(v) for v in o]
        return o

    text = json.dumps(mark(_plain(obj)), indent=2)
    for key, val in table.items():
        token = json.dumps(val) if isinstance(val, str) else format(val, ".17g")
        if isinstance(val, float) and "." not in token and "e" not in token and "n" not in token:
            token += ".0"
        text = text.replace(f'"{key}"', token)
    return text


def result_to_dict(res: DivergenceResult) -> dict:
    return {
        "value": res.value,
        "finite": res.finite,
        "path": res.path,
        "converged": res.converged,
        "iterations": res.iterations,
        "gradient_residual": res.gradient_residual,
        "optimizer_T": None if res.optimizer_T is None else matrix_to_json(res.optimizer_T),
        "warnings": list(res.warnings),
    }


def report_to_dict(rep: SecondOrderReport) -> dict:
    rel = rep.gap / abs(rep.rhs) if rep.rhs != 0 else math.inf
    return {
        "lhs": rep.lhs, "rhs": rep.rhs, "gap": rep.gap, "relative_gap": rel,
        "naive_prediction": rep.naive, "J_S": rep.J_S, "J1": rep.J1, "J2": rep.J2,
        "J2_literal": rep.J2_literal, "rank": rep.rank,
    }


# ---------------------------------------------------------------------------
# Commands


def run(problem: Problem, opts: SolveOptions | None = None) -> DivergenceResult:
    return solve(problem.generator, problem.rho1, problem.rho2, opts or SolveOptions())


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _cmd_compute(args) -> int:
    prob = parse_problem(_read(args.file))
    if args.force_path is not None and args.force_path not in PATHS:
        raise InputError(f"--force-path: unknown path {args.force_path!r}; expected one of {list(PATHS)}")
    res = run(prob, SolveOptions(tol=args.tol, max_iter=args.max_iter, force_path=args.force_path))
    print(dumps(result_to_dict(res)))
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def _cmd_verify(args) -> int:
    prob = parse_problem(_read(args.file))
    out = verify(prob.generator, prob.rho1, prob.rho2, restarts=args.restarts, seed=args.seed)
    res, orc = out["solver"], out["oracle"]
    print(dumps({
        "solver_value": res.value,
        "solver_path": res.path,
        "oracle_value": orc.value,
        "gap": out["gap"],
        "restarts": args.restarts,
        "seed": args.seed,
        "measurement": [matrix_to_json(e) for e in orc.measurement.effects],
    }))
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


_FISHER_KEYS = {"family", "samples", "step", "builtin", "eta"}


def _cmd_fisher(args) -> int:
    obj = {}
    if args.file:
        obj = _load(_read(args.file))
        if not isinstance(obj, dict):
            raise InputError("fisher: expected a JSON object")
        _check_keys(obj, _FISHER_KEYS, {"family"}, "")
    gen = parse_family(obj.get("family", {"family": "fidelity"}))
    step = args.step if args.step is not None else _number(obj.get("step", 1e-3), "step")
    eta = args.eta if args.eta is not None else _number(obj.get("eta", 0.3), "eta")
    builtin = args.builtin or obj.get("builtin")
    if builtin is not None:
        if builtin not in BUILTIN_FAMILIES:
            raise InputError(f"builtin: unknown family {builtin!r}; expected one of {sorted(BUILTIN_FAMILIES)}")
        rep = second_order_check(gen, BUILTIN_FAMILIES[builtin], eta, step)
        source = {"builtin": builtin, "eta": eta}
    elif "samples" in obj:
        samples = obj["samples"]
        if not isinstance(samples, list) or len(samples) != 3:
            raise InputError("samples: expected three matrices at eta0 - h, eta0, eta0 + h")
        mats = [_density(m, f"samples[{k}]") for k, m in enumerate(samples)]
        rep = second_order_from_samples(gen, mats[0], mats[1], mats[2], step)
        source = {"samples": 3}
    else:
        raise InputError("fisher: provide either samples in the file or a builtin family")
    out = {"family": to_dict(gen), "step": step, **source, **report_to_dict(rep)}
    print(dumps(out))
    return EXIT_OK


def _cmd_compare(args) -> int:
    prob = parse_problem(_read(args.file), require_family=False)
    rep = gap_report(args.alpha, prob.rho1, prob.rho2)
    print(dumps({
        "alpha": rep.alpha, "single_copy_log": rep.single_copy_log,
        "asymptotic_log": rep.asymptotic_log, "gap": rep.gap,
        "commuting": rep.commuting, "single_copy_path": rep.single_copy_path,
    }))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfdiv", description="Minimal quantum f-divergences.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="solve one problem")
    p.add_argument("-f", "--file", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--force-path", default=None)
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("verify", help="compare the solver with a measurement search")
    p.add_argument("-f", "--file", required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("fisher", help="second-order check along a one-parameter family")
    p.add_argument("-f", "--file", default=None)
    p.add_argument("--builtin", default=None, choices=sorted(BUILTIN_FAMILIES))
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.set_defaults(func=_cmd_fisher)

    p = sub.add_parser("compare", help="single-copy versus asymptotic Renyi value")
    p.add_argument("-f", "--file", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except (InputError, FamilyError, MatrixError, SolverError, HypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
