"""Fredholm indices and the index obstruction to commuting compact perturbations.

Two operators ``A, B`` that are inverse to each other modulo compacts admit
commuting compact perturbations exactly when both have index 0.  The index of
a structured operator is computed twice, independently: as minus the winding
number of its symbol, and as ``dim ker - dim ker*`` from certified kernels.
"""

from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import IndexMismatch, NotEssentialInversePair
from .isometrize import isometrize
from .operator import StructuredOperator, compose, is_compact
from .optuple import OperatorTuple, is_essential_spherical_isometry
from .spectral import KERNEL_TOL, stabilized_kernel
from .symbol import DEFAULT_GRID, DEFAULT_MIN_MODULUS, winding_number


@dataclass
class IndexReport:
    operator_id: str
    winding_index: int
    section_index: int
    kernel_dim: int
    cokernel_dim: int

    @property
    def agreement(self) -> bool:
        return self.winding_index == self.section_index

    @property
    def index(self) -> int:
        return self.winding_index

    def as_dict(self) -> dict:
        return {
            "operator_id": self.operator_id,
            "winding_index": self.winding_index,
            "section_index": self.section_index,
            "kernel_dim": self.kernel_dim,
            "cokernel_dim": self.cokernel_dim,
            "agreement": self.agreement,
        }


def fredholm_index(
    op: StructuredOperator,
    operator_id: str = "T",
    N: int = 32,
    tol: float = KERNEL_TOL,
    strict: bool = True,
    sizes: Sequence[int] | None = None,
) -> IndexReport:
    """Index of ``op`` by winding number, cross-checked against kernel counts.

    Raises:
        SymbolVanishesOnCircle: ``op`` is not Fredholm.
        IndexMismatch: the two methods disagree (only when ``strict``).
    """
    winding = winding_number(op.symbol, DEFAULT_GRID, DEFAULT_MIN_MODULUS)
    ker = stabilized_kernel(OperatorTuple([op]), N, tol, sizes=sizes)
    coker = stabilized_kernel(OperatorTuple([op.H]), N, tol, sizes=sizes)
    report = IndexReport(operator_id, -winding, ker.dim - coker.dim, ker.dim, coker.dim)
    if strict and not report.agreement:
        raise IndexMismatch(
            f"{operator_id}: winding gives {report.winding_index}, "
            f"kernels give {report.section_index} ({ker.dim} - {coker.dim})"
        )
    return report


def essential_inverse_pair_check(a: StructuredOperator, b: StructuredOperator) -> bool:
    """Both ``BA - 1`` and ``AB - 1`` are compact."""
    one = StructuredOperator.identity()
    return is_compact(compose(b, a) - one) and is_compact(compose(a, b) - one)


class Verdict(str, enum.Enum):
    POSSIBLE = "POSSIBLE"
    OBSTRUCTED = "OBSTRUCTED"


@dataclass
class VerdictReport:
    verdict: Verdict
    reports: tuple[IndexReport, IndexReport]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "indices": [r.as_dict() for r in self.reports],
        }


def commuting_perturbation_verdict(
    a: StructuredOperator,
    b: StructuredOperator,
    N: int = 32,
    tol: float = KERNEL_TOL,
    sizes: Sequence[int] | None = None,
) -> VerdictReport:
    """Decide whether compact perturbations of ``a`` and ``b`` can commute.

    Only existence is decided; no perturbation is constructed.
    """
    if not essential_inverse_pair_check(a, b):
        raise NotEssentialInversePair("A and B are not inverse to each other modulo compacts")
    ra = fredholm_index(a, "A", N, tol, sizes=sizes)
    rb = fredholm_index(b, "B", N, tol, sizes=sizes)
    ok = ra.index == 0 and rb.index == 0
    return VerdictReport(Verdict.POSSIBLE if ok else Verdict.OBSTRUCTED, (ra, rb))


@dataclass
class DemoStep:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class DemoReport:
    steps: list[DemoStep]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "steps": [{"name": s.name, "passed": s.passed, **s.detail} for s in self.steps],
        }


def counterexample_tuple() -> OperatorTuple:
    """``(R, R*) / sqrt(2)`` on l^2."""
    r = StructuredOperator.shift(1)
    c = 2**-0.5
    return OperatorTuple([c * r, c * r.H])


def counterexample_demo(tol_residual: float = 1e-8) -> DemoReport:
    """An essential spherical isometry that is no compact perturbation of a commuting tuple.

    Runs four checks on ``T = (R, R*) / sqrt(2)``: it is an essential
    spherical isometry; ``sqrt(2) T_1`` and ``sqrt(2) T_2`` are inverse modulo
    compacts; the verdict is OBSTRUCTED because ``index(sqrt(2) T_1) = -1``;
    and isometrization still succeeds.
    """
    t = counterexample_tuple()
    steps = []

    check = is_essential_spherical_isometry(t)
    steps.append(DemoStep("essential_spherical_isometry", bool(check), {"value": bool(check)}))

    a, b = 2**0.5 * t[0], 2**0.5 * t[1]
    pair = essential_inverse_pair_check(a, b)
    steps.append(DemoStep("essential_inverse_pair", pair, {"value": pair}))

    verdict = commuting_perturbation_verdict(a, b) if pair else None
    idx = verdict.reports[0].index if verdict else None
    steps.append(
        DemoStep(
            "verdict_obstructed",
            verdict is not None and verdict.verdict is Verdict.OBSTRUCTED and idx == -1,
            {"verdict": verdict.verdict.value if verdict else None, "index_sqrt2_T1": idx},
        )
    )

    report = isometrize(t, tol_residual=tol_residual)
    steps.append(
        DemoStep(
            "isometrize_succeeds",
            report.ok and report.gram_residual <= tol_residual,
            {"gram_residual": report.gram_residual, "dense_residual": report.dense_residual},
        )
    )
    return DemoReport(steps)
