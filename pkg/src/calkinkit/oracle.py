"""Brute-force cross-check of the structured algebra by dense section arithmetic.

Products are recomputed as ``section(a, N, N + m) @ section(b, N + m, N)`` with
``m`` large enough that no nonzero term of the inner sum is cut off, so the
dense result is exact up to roundoff and independent of the closed-form
Hankel correction used by :func:`~calkinkit.operator.compose`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operator import StructuredOperator, adjoint, compose, truncate
from .optuple import OperatorTuple, gram

ORACLE_TOL = 1e-10
MAX_ORACLE_N = 512


def capture_margin(a: StructuredOperator, b: StructuredOperator) -> int:
    return a.bandwidth + b.bandwidth + a.compact.size + b.compact.size


def dense_product(a: StructuredOperator, b: StructuredOperator, N: int) -> np.ndarray:
    m = capture_margin(a, b)
    return truncate(a, N, N + m) @ truncate(b, N + m, N)


def dense_gram(t: OperatorTuple, N: int) -> np.ndarray:
    return sum(dense_product(adjoint(op), op, N) for op in t)


@dataclass
class OracleReport:
    N: int
    deviations: dict[str, float] = field(default_factory=dict)

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values(), default=0.0)

    def passed(self, tol: float = ORACLE_TOL) -> bool:
        return self.max_deviation <= tol

    def as_dict(self, tol: float = ORACLE_TOL) -> dict:
        return {
            "N": self.N,
            "deviations": dict(self.deviations),
            "max_deviation": self.max_deviation,
            "tolerance": tol,
            "passed": self.passed(tol),
        }


def _dev(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.max(np.abs(x - y))) if x.size else 0.0


def oracle_check(t: OperatorTuple, N: int = 64) -> OracleReport:
    """Max entrywise deviation of adjoints, all pairwise products and the Gram operator."""
    if not 0 < N <= MAX_ORACLE_N:
        raise ValueError(f"oracle size must be in 1..{MAX_ORACLE_N}, got {N}")
    report = OracleReport(N)
    ops = list(t)
    with_adjoints = ops + [adjoint(op) for op in ops]
    for i, op in enumerate(ops):
        report.deviations[f"adjoint[{i}]"] = _dev(
            truncate(adjoint(op), N, N), truncate(op, N, N).conj().T
        )
    n = len(ops)
    for i, a in enumerate(with_adjoints):
        for j, b in enumerate(with_adjoints):
            name_a = f"T{i}" if i < n else f"T{i - n}*"
            name_b = f"T{j}" if j < n else f"T{j - n}*"
            report.deviations[f"compose[{name_a},{name_b}]"] = _dev(
                truncate(compose(a, b), N, N), dense_product(a, b, N)
            )
    report.deviations["gram"] = _dev(truncate(gram(t), N, N), dense_gram(t, N))
    return report
