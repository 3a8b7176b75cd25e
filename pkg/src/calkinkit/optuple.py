"""Operator tuples, their column/row operators and the Gram operator.

For ``T = (T_1, ..., T_n)`` the column operator maps ``x`` to
``(T_1 x, ..., T_n x)`` and its adjoint, the row operator, maps ``(x_i)`` to
``sum_i T_i* x_i``.  Finite sections are always *tall*: a section with ``N``
columns keeps ``N + margin`` rows, enough to contain every nonzero entry of
the selected columns, so a null vector of the section is a null vector of the
infinite operator.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import CaptureConditionViolated, NotEssentialIsometry, PreconditionError
from .operator import (
    CompactBlock,
    StructuredOperator,
    adjoint,
    commutator,
    compose,
    is_compact,
    truncate,
)
from .symbol import LaurentPoly, sum_of_squares

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OperatorTuple:
    entries: tuple[StructuredOperator, ...]

    def __init__(self, entries: Iterable[StructuredOperator]):
        entries = tuple(entries)
        if not entries:
            raise PreconditionError("an operator tuple needs at least one entry")
        for op in entries:
            if not isinstance(op, StructuredOperator):
                raise TypeError(f"tuple entries must be StructuredOperator, got {type(op)!r}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> StructuredOperator:
        return self.entries[i]

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def symbols(self) -> list[LaurentPoly]:
        return [op.symbol for op in self.entries]

    def adjoint(self) -> OperatorTuple:
        return OperatorTuple(adjoint(op) for op in self.entries)

    def scaled(self, c: complex) -> OperatorTuple:
        return OperatorTuple(c * op for op in self.entries)

    @property
    def bandwidth(self) -> int:
        return max(op.bandwidth for op in self.entries)

    @property
    def block_size(self) -> int:
        return max(op.compact.size for op in self.entries)

    def required_margin(self) -> int:
        """Smallest margin meeting the capture condition for this tuple."""
        return self.bandwidth + self.block_size

    def default_margin(self) -> int:
        return self.required_margin() + 2


def _symmetrized(op: StructuredOperator) -> StructuredOperator:
    sym = (op.symbol + op.symbol.star()) * 0.5
    block = op.compact.entries
    if block.size and np.max(np.abs(block - block.conj().T)) > HERMITIAN_TOL * max(
        1.0, np.max(np.abs(block))
    ):
        raise ArithmeticError("Gram block lost Hermitian symmetry beyond roundoff")
    return StructuredOperator(sym, CompactBlock((block + block.conj().T) / 2))


def gram(t: OperatorTuple) -> StructuredOperator:
    """``sum_i T_i* T_i`` computed exactly; the result is symmetrized."""
    total = StructuredOperator.zero()
    for op in t:
        total = total + compose(adjoint(op), op)
    return _symmetrized(total)


@dataclass
class SphericalCheck:
    """Verdict of :func:`is_essential_spherical_isometry` plus diagnostics.

    Truthiness is the verdict.
    """

    column_essential_isometry: bool
    essentially_commuting: bool
    gram_symbol: LaurentPoly
    gram_block_norm: float
    commutator_block_norms: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return self.column_essential_isometry and self.essentially_commuting

    def __bool__(self) -> bool:
        return self.verdict

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "column_essential_isometry": self.column_essential_isometry,
            "essentially_commuting": self.essentially_commuting,
            "gram_symbol": [[k, c.real, c.imag] for k, c in self.gram_symbol.items()],
            "gram_block_norm": self.gram_block_norm,
            "commutator_block_norms": {
                f"{i},{j}": v for (i, j), v in sorted(self.commutator_block_norms.items())
            },
        }


def is_essential_spherical_isometry(t: OperatorTuple) -> SphericalCheck:
    """Check that ``sum T_i* T_i - 1`` is compact and all ``[T_i, T_j]`` are compact."""
    g = gram(t)
    comm_norms: dict[tuple[int, int], float] = {}
    commuting = True
    for i, j in combinations(range(t.n), 2):
        c = commutator(t[i], t[j])
        commuting &= is_compact(c)
        comm_norms[(i, j)] = c.compact.norm()
    return SphericalCheck(
        column_essential_isometry=(g.symbol == LaurentPoly.constant(1.0)),
        essentially_commuting=commuting,
        gram_symbol=g.symbol,
        gram_block_norm=g.compact.norm(),
        commutator_block_norms=comm_norms,
    )


def essential_left_inverse(t: OperatorTuple) -> tuple[OperatorTuple, StructuredOperator]:
    """Row operator ``S = (T_1*, ..., T_n*)`` with ``1 - S T`` compact.

    Returns ``(S, 1 - S T)``; the second item has zero symbol.
    """
    check = is_essential_spherical_isometry(t)
    if not check:
        raise NotEssentialIsometry(
            f"gram symbol is {check.gram_symbol!r}, commuting={check.essentially_commuting}"
        )
    s = t.adjoint()
    defect = StructuredOperator.identity() - gram(t)
    if not is_compact(defect):
        raise NotEssentialIsometry("1 - ST has a nonzero symbol")
    return s, defect


def _check_margin(t: OperatorTuple, margin: int) -> None:
    if margin < t.required_margin():
        raise CaptureConditionViolated(
            f"margin {margin} < bandwidth + block size = {t.required_margin()}"
        )


def column_truncate(t: OperatorTuple, N: int, margin: int | None = None) -> np.ndarray:
    """``(n (N + margin)) x N`` section of the column operator (entries stacked)."""
    if margin is None:
        margin = t.default_margin()
    if N <= 0:
        raise PreconditionError("section size must be positive")
    _check_margin(t, margin)
    return np.vstack([truncate(op, N + margin, N) for op in t])


def row_truncate(t: OperatorTuple, N: int, margin: int | None = None) -> np.ndarray:
    """``(N + margin) x (n N)`` section of the row operator ``(x_i) -> sum T_i* x_i``."""
    if margin is None:
        margin = t.default_margin()
    if N <= 0:
        raise PreconditionError("section size must be positive")
    _check_margin(t, margin)
    return np.hstack([truncate(adjoint(op), N + margin, N) for op in t])


def column_apply(t: OperatorTuple, v: np.ndarray, rows: int) -> np.ndarray:
    """First ``rows`` coordinates of each ``T_i v``, stacked."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.concatenate([truncate(op, rows, len(v)) @ v for op in t])


def row_apply(t: OperatorTuple, w: np.ndarray, rows: int) -> np.ndarray:
    """First ``rows`` coordinates of ``sum_i T_i* w_i``; ``w`` holds ``n`` equal-length blocks."""
    w = np.asarray(w, dtype=complex).ravel()
    if len(w) % t.n:
        raise ValueError("row vector length must be a multiple of n")
    parts = np.split(w, t.n)
    return sum(truncate(adjoint(op), rows, len(p)) @ p for op, p in zip(t, parts))


def tuple_from_symbols(symbols: Sequence[LaurentPoly]) -> OperatorTuple:
    return OperatorTuple(StructuredOperator.toeplitz(s) for s in symbols)


def gram_symbol(t: OperatorTuple) -> LaurentPoly:
    return sum_of_squares(t.symbols)
