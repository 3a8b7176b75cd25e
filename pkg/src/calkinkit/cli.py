"""Command-line front end: ``calkinkit check|isometrize|index|verdict|demo|oracle``.

Exit codes:
    0  success (check: the tuple is an essential spherical isometry)
    1  parse or configuration error
    2  not an essential spherical isometry / not Fredholm / not an inverse pair
    3  index obstruction (single operator with dim ker T > dim ker T*)
    4  a numerical certificate could not be established
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .errors import (
    CalkinError,
    FormatError,
    IndexObstruction,
    NotEssentialInversePair,
    NotEssentialIsometry,
    SymbolVanishesOnCircle,
)
from .isometrize import IsometrizationReport, isometrize
from .obstruction import commuting_perturbation_verdict, counterexample_demo, fredholm_index
from .operator import is_compact
from .optuple import OperatorTuple, essential_left_inverse, is_essential_spherical_isometry
from .oracle import MAX_ORACLE_N, ORACLE_TOL, oracle_check
from .presets import PRESETS, preset
from .serialize import dumps_canonical, load_tuple, operator_to_json, tuple_to_json
from .spectral import (
    KERNEL_TOL,
    closed_range_witness,
    row_kernel_growth_certificate,
    stabilized_kernel,
    trim_tail,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NEGATIVE = 2
EXIT_OBSTRUCTION = 3
EXIT_NUMERICAL = 4

DEFAULT_SIZES = (32, 64, 128)


class ConfigError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    presets: list[str] = field(default_factory=list)
    sizes: tuple[int, ...] = DEFAULT_SIZES
    tol_kernel: float = KERNEL_TOL
    tol_residual: float = 1e-8
    fmt: str = "text"
    out: str | None = None
    oracle_N: int = 64

    def __post_init__(self):
        if not self.sizes or any(s <= 0 for s in self.sizes):
            raise ConfigError("--sizes must be positive integers")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ConfigError(f"--sizes must be strictly increasing, got {list(self.sizes)}")
        if self.tol_kernel <= 0 or self.tol_residual <= 0:
            raise ConfigError("tolerances must be positive")
        for name in self.presets:
            if name not in PRESETS:
                raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")

    def tuples(self) -> list[OperatorTuple]:
        return [load_tuple(p) for p in self.inputs] + [preset(p) for p in self.presets]

    def single_tuple(self) -> OperatorTuple:
        ts = self.tuples()
        if len(ts) != 1:
            raise ConfigError(f"{self.command} takes exactly one input file or preset, got {len(ts)}")
        return ts[0]


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.replace(" ", "").split(",") if s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None


def _vectors(rows: np.ndarray) -> list:
    return [[[z.real, z.imag] for z in trim_tail(v)] for v in rows]


def _check_report(t: OperatorTuple, cfg: JobConfig) -> tuple[int, dict]:
    check = is_essential_spherical_isometry(t)
    report: dict[str, Any] = {"n": t.n, "spherical": check.as_dict()}
    if not check:
        return EXIT_NEGATIVE, report
    s, defect = essential_left_inverse(t)
    report["left_inverse"] = {
        "S": tuple_to_json(s),
        "defect_is_compact": is_compact(defect),
        "defect": operator_to_json(defect),
    }
    try:
        ker = stabilized_kernel(t, tol=cfg.tol_kernel, sizes=cfg.sizes)
        report["joint_kernel"] = {
            "dim": ker.dim,
            "sizes": list(cfg.sizes),
            "residuals": ker.residuals.tolist(),
            "vectors": _vectors(ker.vectors),
        }
        witness = closed_range_witness(t, cfg.sizes, ker)
        report["closed_range_witness"] = {
            "diagnostic": True,
            "values": [[n, v] for n, v in witness],
            "minimum": min(v for _, v in witness),
        }
        if t.n >= 2:
            growth = row_kernel_growth_certificate(t, cfg.sizes, cfg.tol_kernel)
            report["row_kernel_growth"] = {
                "margin": growth.margin,
                "certificate": [[n, d] for n, d in growth],
                "max_residual": max(float(b.residuals.max(initial=0.0)) for b in growth.bases),
            }
    except CalkinError as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
    return EXIT_OK, report


def isometrization_to_json(rep: IsometrizationReport) -> dict:
    return {
        "input": tuple_to_json(rep.input),
        "V": tuple_to_json(rep.V),
        "K": tuple_to_json(rep.K),
        "pairing_K": tuple_to_json(rep.pairing_K),
        "A_inv_sqrt": operator_to_json(rep.A_inv_sqrt),
        "gram_residual": rep.gram_residual,
        "dense_residual": rep.dense_residual,
        "dense_N": rep.dense_N,
        "kernel_dims": list(rep.kernel_dims),
        "flags": dict(rep.flags),
    }


def cmd_check(cfg: JobConfig) -> tuple[int, dict]:
    return _check_report(cfg.single_tuple(), cfg)


def cmd_isometrize(cfg: JobConfig) -> tuple[int, dict]:
    t = cfg.single_tuple()
    try:
        rep = isometrize(
            t,
            sizes=cfg.sizes,
            tol_kernel=cfg.tol_kernel,
            tol_residual=cfg.tol_residual,
            kernel_sizes=cfg.sizes,
        )
    except NotEssentialIsometry as exc:
        return EXIT_NEGATIVE, {"status": "not-essential-isometry", "message": str(exc)}
    except IndexObstruction as exc:
        return EXIT_OBSTRUCTION, {
            "status": "index-obstruction",
            "message": str(exc),
            "kernel_dims": [exc.kernel_dim, exc.cokernel_dim],
        }
    return EXIT_OK, {"status": "ok", **isometrization_to_json(rep)}


def cmd_index(cfg: JobConfig) -> tuple[int, dict]:
    t = cfg.single_tuple()
    reports = []
    try:
        for i, op in enumerate(t):
            reports.append(fredholm_index(op, f"T{i + 1}", tol=cfg.tol_kernel, sizes=cfg.sizes))
    except SymbolVanishesOnCircle as exc:
        return EXIT_NEGATIVE, {"status": "not-fredholm", "message": str(exc)}
    return EXIT_OK, {"status": "ok", "indices": [r.as_dict() for r in reports]}


def cmd_verdict(cfg: JobConfig) -> tuple[int, dict]:
    tuples = cfg.tuples()
    if len(tuples) == 1 and tuples[0].n == 2:
        a, b = tuples[0]
    elif len(tuples) == 2 and all(t.n == 1 for t in tuples):
        a, b = tuples[0][0], tuples[1][0]
    else:
        raise ConfigError("verdict takes one 2-tuple or two single operators")
    try:
        rep = commuting_perturbation_verdict(a, b, tol=cfg.tol_kernel, sizes=cfg.sizes)
    except (NotEssentialInversePair, SymbolVanishesOnCircle) as exc:
        return EXIT_NEGATIVE, {"status": type(exc).__name__, "message": str(exc)}
    return EXIT_OK, {"status": "ok", **rep.as_dict()}


def cmd_demo(cfg: JobConfig) -> tuple[int, dict]:
    rep = counterexample_demo(cfg.tol_residual)
    return (EXIT_OK if rep.passed else EXIT_NEGATIVE), rep.as_dict()


def cmd_oracle(cfg: JobConfig) -> tuple[int, dict]:
    if not 0 < cfg.oracle_N <= MAX_ORACLE_N:
        raise ConfigError(f"oracle size N={cfg.oracle_N} exceeds the cap {MAX_ORACLE_N}")
    rep = oracle_check(cfg.single_tuple(), cfg.oracle_N)
    return (EXIT_OK if rep.passed(ORACLE_TOL) else EXIT_NEGATIVE), rep.as_dict(ORACLE_TOL)


COMMANDS = {
    "check": cmd_check,
    "isometrize": cmd_isometrize,
    "index": cmd_index,
    "verdict": cmd_verdict,
    "demo": cmd_demo,
    "oracle": cmd_oracle,
}


def _render_text(obj: Any, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                lines.append(f"{prefix}{k}:")
                lines.extend(_render_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {_short(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _is_flat(v):
                lines.append(f"{prefix}-")
                lines.extend(_render_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}- {_short(v)}")
    return lines


def _is_flat(v: Any) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    return False


def _short(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="calkinkit",
        description="Essential spherical isometries on structured Toeplitz-plus-finite-block operators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("files", nargs="*", help="operator or tuple JSON files")
    common.add_argument("--preset", action="append", default=[], help=f"one of: {', '.join(PRESETS)}")
    common.add_argument("--sizes", type=_parse_sizes, default=DEFAULT_SIZES, help="e.g. 32,64,128")
    common.add_argument("--tol-kernel", type=float, default=KERNEL_TOL)
    common.add_argument("--tol-residual", type=float, default=1e-8)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "oracle":
            p.add_argument("-N", "--size", type=int, default=64, help=f"section size (<= {MAX_ORACLE_N})")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    try:
        cfg = JobConfig(
            command=args.command,
            inputs=list(args.files),
            presets=list(args.preset),
            sizes=tuple(args.sizes),
            tol_kernel=args.tol_kernel,
            tol_residual=args.tol_residual,
            fmt=args.format,
            out=args.out,
            oracle_N=getattr(args, "size", 64),
        )
        code, report = COMMANDS[cfg.command](cfg)
    except (ConfigError, FormatError, OSError) as exc:
        print(f"calkinkit: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CalkinError as exc:
        print(f"calkinkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    report = {"command": cfg.command, "exit_code": code, **report}
    if cfg.fmt == "json":
        text = dumps_canonical(report)
    else:
        text = "\n".join(_render_text(report)) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
