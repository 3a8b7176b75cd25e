"""Named operator tuples used throughout the tests and the CLI."""

from __future__ import annotations

from collections.abc import Callable

from .operator import StructuredOperator
from .optuple import OperatorTuple
from .symbol import LaurentPoly

_SQRT_HALF = 2**-0.5


def _right_shift() -> OperatorTuple:
    return OperatorTuple([StructuredOperator.shift(1)])


def _left_shift() -> OperatorTuple:
    return OperatorTuple([StructuredOperator.shift(-1)])


def rank_one_corrected_shift() -> StructuredOperator:
    """``R (I - P_0)``: kills ``e_0``, shifts everything else."""
    one = StructuredOperator.identity()
    return StructuredOperator.shift(1) @ (one - StructuredOperator.projection(0))


def _fsw_rank_one() -> OperatorTuple:
    return OperatorTuple([rank_one_corrected_shift()])


def _scaled_shift_pair() -> OperatorTuple:
    r = StructuredOperator.shift(1)
    return OperatorTuple([_SQRT_HALF * r, _SQRT_HALF * r.H])


def _banded_spherical() -> OperatorTuple:
    return OperatorTuple(
        [
            StructuredOperator.toeplitz(LaurentPoly({1: 0.5, 2: 0.5})),
            StructuredOperator.toeplitz(LaurentPoly({1: 0.5, 2: -0.5})),
        ]
    )


def _kernel_spherical() -> OperatorTuple:
    # joint kernel span{e_0}, so the pipeline must add a rank-one perturbation
    return OperatorTuple(
        [_SQRT_HALF * rank_one_corrected_shift(), _SQRT_HALF * StructuredOperator.shift(-1)]
    )


PRESETS: dict[str, Callable[[], OperatorTuple]] = {
    "right-shift": _right_shift,
    "left-shift": _left_shift,
    "fsw-rank-one": _fsw_rank_one,
    "chavan-counterexample": _scaled_shift_pair,
    "banded-spherical": _banded_spherical,
    "kernel-spherical": _kernel_spherical,
}


def preset(name: str) -> OperatorTuple:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
