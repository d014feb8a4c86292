"""``ghzforge`` command line: construct, verify, refute, genuine, bell, sample.

Settings come from defaults, then ``GHZFORGE_*`` environment variables, then
flags. Every report embeds the effective configuration. Exit codes: 0 ok,
1 verification failed, 2 contract, 3 resource, 4 parse.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, config, kernels
from .bell import build_bell, quantum_value, sample_correlations
from .config import RunConfig, apply_overrides, env_overrides
from .errors import ContractError, GhzError, ParseError
from .exactnum import format_rational, parse_rational
from .genuine import genuineness_check
from .lhv import classical_bound, classical_bound_exhaustive, refutation_report
from .paradox import (
    ParadoxInstance,
    mermin_embedded_instance,
    mermin_instance,
    sigma_of,
    theorem1_instance,
    theorem2_vector,
    three_setting_vector,
)
from .qudit import dense_checks, eigen_relation, ghz_eigenphase, ghz_state

FAMILIES = ("theorem2", "three-setting", "mermin", "mermin-embedded", "custom")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--family", choices=FAMILIES)
    common.add_argument("--input", help="instance JSON, or a vector file for --family custom")
    common.add_argument("--output", help="write the JSON report here instead of stdout")
    common.add_argument("--budget", type=int, help="enumeration budget (assignments)")
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--dense-check", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="ghzforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("construct", parents=[common], help="build a paradox instance")
    p.add_argument("--force", action="store_true", default=None, help="build uncertified instances too")
    sub.add_parser("verify", parents=[common], help="check eigenvalue targets on the GHZ state")
    sub.add_parser("refute", parents=[common], help="exhaustive LHV search plus parity certificate")
    sub.add_parser("genuine", parents=[common], help="genuine n-partite sweep")
    p = sub.add_parser("bell", parents=[common], help="classical and quantum values of the Bell operator")
    p.add_argument("--exhaustive", action="store_true", help="also run the brute-force classical maximum")
    p = sub.add_parser("sample", parents=[common], help="simulated measurement estimate of the Bell operator")
    p.add_argument("--shots", type=int)
    p.add_argument("--csv", help="also write per-batch term statistics as CSV")
    p.add_argument("--partitions", type=int, default=1)
    return parser


def _config(args) -> RunConfig:
    cfg = apply_overrides(RunConfig(command=args.command), env_overrides())
    flags = {
        "n": args.n,
        "d": args.d,
        "family": args.family,
        "input": args.input,
        "output": args.output,
        "tol": args.tol,
        "seed": args.seed,
        "workers": args.workers,
        "dense_check": args.dense_check,
        "force": getattr(args, "force", None),
        "shots": getattr(args, "shots", None),
        "csv": getattr(args, "csv", None),
        "budgets.enumeration": args.budget,
    }
    try:
        return apply_overrides(cfg, {k: v for k, v in flags.items() if v is not None})
    except ValueError as exc:
        raise ContractError(str(exc)) from exc


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _read_vector(path: str, d: int) -> tuple[tuple[Fraction, ...], int]:
    data = _read_json(path)
    if isinstance(data, dict) and "vectors" in data:
        return tuple(parse_rational(x) for x in data["vectors"][0]), int(data.get("d", d))
    if isinstance(data, dict):
        if "vector" not in data:
            raise ParseError(f"{path}: expected a 'vector' field")
        return tuple(parse_rational(str(x)) for x in data["vector"]), int(data.get("d", d))
    if isinstance(data, list):
        return tuple(parse_rational(str(x)) for x in data), d
    raise ParseError(f"{path}: expected a vector or an instance")


def _require_n(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise ContractError(f"--n is required for family {cfg.family}")
    return cfg.n


def _vector(cfg: RunConfig) -> tuple[tuple[Fraction, ...], int]:
    if cfg.family == "theorem2":
        return theorem2_vector(_require_n(cfg), cfg.d), cfg.d
    if cfg.family == "three-setting":
        return three_setting_vector(_require_n(cfg), cfg.d), cfg.d
    if cfg.family == "custom":
        if not cfg.input:
            raise ContractError("--family custom needs --input with a vector file")
        return _read_vector(cfg.input, cfg.d)
    raise ContractError(f"family {cfg.family} has no GHZ vector")


def _construct(cfg: RunConfig) -> ParadoxInstance:
    if cfg.family == "mermin":
        return mermin_instance()
    if cfg.family == "mermin-embedded":
        return mermin_embedded_instance()
    r, d = _vector(cfg)
    return theorem1_instance(r, d, force=cfg.force, family=cfg.family)


def _load_instance(cfg: RunConfig) -> ParadoxInstance:
    if cfg.input:
        data = _read_json(cfg.input)
        if not isinstance(data, dict):
            raise ParseError(f"{cfg.input}: expected a JSON object")
        return ParadoxInstance.from_dict(data)
    return _construct(cfg)


def _check_dense(cfg: RunConfig, n: int, d: int):
    if cfg.dense_check and d**n > config.DENSE_CHECK_DIM_LIMIT:
        raise ContractError(f"--dense-check needs d**n <= {config.DENSE_CHECK_DIM_LIMIT}, got {d**n}")


def cmd_construct(cfg: RunConfig) -> tuple[dict, int]:
    inst = _construct(cfg)
    return inst.to_dict(), 0


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    inst = _load_instance(cfg)
    _check_dense(cfg, inst.n, inst.d)
    psi = ghz_state(inst.n, inst.d, inst.state_phases, max_amplitudes=cfg.budgets.memory)
    rows, ok = [], True
    for i, (op, target) in enumerate(zip(inst.observables, inst.targets)):
        observed = eigen_relation(op, psi, cfg.tol)
        exact = ghz_eigenphase(op, inst.state_phases)
        good = observed == target and exact == target
        ok &= good
        rows.append(
            {
                "index": i,
                "target": format_rational(target.value),
                "observed": None if observed is None else format_rational(observed.value),
                "exact": None if exact is None else format_rational(exact.value),
                "ok": good,
            }
        )
    failed = [r["index"] for r in rows if not r["ok"]]
    report = {"pass": ok, "failed": failed, "observables": rows, "certified": inst.certified}
    return report, 0 if ok else 1


def cmd_refute(cfg: RunConfig) -> tuple[dict, int]:
    inst = _load_instance(cfg)
    return refutation_report(inst, budget=cfg.budgets.enumeration, workers=cfg.workers), 0


def cmd_genuine(cfg: RunConfig) -> tuple[dict, int]:
    inst = _load_instance(cfg)
    verdict = genuineness_check(inst, tol=cfg.tol, budgets=cfg.budgets, lhv_budget=cfg.budgets.enumeration)
    return verdict.to_dict(), 0


def _bell_expression(cfg: RunConfig):
    if cfg.input and cfg.family != "custom":
        data = _read_json(cfg.input)
        r = tuple(parse_rational(x) for x in data["vectors"][0]) if isinstance(data, dict) and "vectors" in data else None
        if r is None:
            r, _ = _read_vector(cfg.input, cfg.d)
    else:
        r, _ = _vector(cfg)
    return build_bell(r, 2)


def cmd_bell(cfg: RunConfig, exhaustive: bool = False) -> tuple[dict, int]:
    expr = _bell_expression(cfg)
    _check_dense(cfg, expr.n, expr.d)
    cb = classical_bound(expr, budget=cfg.budgets.enumeration)
    q = quantum_value(expr, ghz_state(expr.n, expr.d, max_amplitudes=cfg.budgets.memory))
    sigma = sigma_of(expr.n)
    report = {
        "n": expr.n,
        "sigma": sigma,
        "classical": cb.value if isinstance(cb.value, (int, float)) else format_rational(cb.value),
        "classical_witness": cb.assignment.to_dict(),
        "classical_method": cb.method,
        "patterns_enumerated": cb.enumerated,
        "quantum": q,
        "gap": float(q - float(cb.value)),
        "expected_classical": expr.n + sigma - 2,
        "expected_quantum": expr.n + sigma,
        "expression": expr.to_dict(),
    }
    if exhaustive:
        ex = classical_bound_exhaustive(expr, budget=cfg.budgets.enumeration)
        report["classical_exhaustive"] = ex.value
        report["exhaustive_method"] = ex.method
    return report, 0


def cmd_sample(cfg: RunConfig, partitions: int = 1) -> tuple[dict, int]:
    expr = _bell_expression(cfg)
    psi = ghz_state(expr.n, expr.d, max_amplitudes=cfg.budgets.memory)
    rep = sample_correlations(expr, psi, cfg.shots, cfg.seed, partitions=partitions, workers=cfg.workers)
    if cfg.csv:
        rep.write_csv(cfg.csv)
    out = rep.to_dict()
    out["quantum_value"] = quantum_value(expr, psi)
    return out, 0


def _emit(payload: dict, cfg: RunConfig):
    text = json.dumps(payload, indent=2, default=str)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    t0 = time.perf_counter()
    cfg = None
    try:
        cfg = _config(args)
        dense = dense_checks(True) if cfg.dense_check else contextlib.nullcontext()
        with dense:
            if args.command == "construct":
                payload, code = cmd_construct(cfg)
            elif args.command == "verify":
                payload, code = cmd_verify(cfg)
            elif args.command == "refute":
                payload, code = cmd_refute(cfg)
            elif args.command == "genuine":
                payload, code = cmd_genuine(cfg)
            elif args.command == "bell":
                payload, code = cmd_bell(cfg, exhaustive=args.exhaustive)
            else:
                payload, code = cmd_sample(cfg, partitions=args.partitions)
    except GhzError as exc:
        print(f"ghzforge {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    payload["meta"] = {
        "version": __version__,
        "command": args.command,
        "kernel_backend": kernels.BACKEND,
        "config": cfg.to_dict(),
        "config_hash": cfg.digest(),
        "wall_ms": (time.perf_counter() - t0) * 1e3,
    }
    try:
        _emit(payload, cfg)
    except OSError as exc:
        print(f"ghzforge {args.command}: cannot write output: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
