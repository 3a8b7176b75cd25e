"""End-to-end acceptance checks.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line per
criterion.
"""

from contextlib import contextmanager

import numpy as np
import pytest

from calkinkit.errors import IndexObstruction
from calkinkit.isometrize import isometrize
from calkinkit.obstruction import Verdict, counterexample_demo, fredholm_index
from calkinkit.operator import StructuredOperator, adjoint, compose, truncate
from calkinkit.optuple import (
    OperatorTuple,
    essential_left_inverse,
    gram,
    is_essential_spherical_isometry,
)
from calkinkit.presets import PRESETS, preset
from calkinkit.spectral import closed_range_witness, row_kernel_growth_certificate
from calkinkit.symbol import LaurentPoly

from .conftest import dense_corner, dense_product, random_fredholm_with_index, random_operator

SPHERICAL_SUITE = ["chavan-counterexample", "banded-spherical", "kernel-spherical"]


@contextmanager
def criterion(number: int, title: str):
    try:
        yield
    except BaseException:
        print(f"\nacceptance {number}: FAIL  {title}")
        raise
    print(f"\nacceptance {number}: PASS  {title}")


def test_counterexample_demo():
    with criterion(1, "counterexample demo"):
        rep = counterexample_demo(tol_residual=1e-8)
        steps = {s.name: s for s in rep.steps}
        assert steps["essential_spherical_isometry"].passed
        assert steps["essential_inverse_pair"].passed
        assert steps["verdict_obstructed"].detail["verdict"] == Verdict.OBSTRUCTED.value
        assert steps["verdict_obstructed"].detail["index_sqrt2_T1"] == -1
        assert steps["isometrize_succeeds"].detail["gram_residual"] <= 1e-8
        assert rep.passed


def test_necessity_of_index_condition():
    with criterion(2, "left shift obstructed, right shift unchanged"):
        with pytest.raises(IndexObstruction):
            isometrize(preset("left-shift"))
        rep = isometrize(preset("right-shift"))
        r = StructuredOperator.shift(1)
        assert rep.K[0].symbol.is_zero() and rep.K[0].compact.size == 0
        assert rep.V[0].symbol.coeffs == r.symbol.coeffs
        assert rep.V[0].compact.size == 0


def test_sufficiency_on_suite():
    with criterion(3, "isometrization of the spherical suite"):
        for name in SPHERICAL_SUITE:
            t = preset(name)
            rep = isometrize(t, dense_N=256)
            for v, op in zip(rep.V, t):
                assert v.symbol.coeffs == op.symbol.coeffs, name
            # symbol equality is coefficientwise at 1e-12; 2 * (1/sqrt 2)**2 is 1 + 2**-52
            assert gram(rep.V).symbol == LaurentPoly.constant(1.0), name
            assert gram(rep.V).symbol.bandwidth == 0, name
            assert rep.gram_residual <= 1e-8, name
            assert rep.dense_N == 256
            assert rep.dense_residual <= 1e-8, name
            # independent dense check of V* V = 1 at N = 256
            s = np.vstack([dense_corner(v, 256 + 8, 256) for v in rep.V])
            assert np.max(np.abs(s.conj().T @ s - np.eye(256))) <= 1e-8, name


def test_row_kernel_growth():
    with criterion(4, "row-kernel growth certificate"):
        pairs = [p for p in PRESETS if preset(p).n == 2]
        assert set(SPHERICAL_SUITE) <= set(pairs)
        for name in pairs:
            t = preset(name)
            cert = row_kernel_growth_certificate(t, (16, 32, 64))
            dims = [d for _, d in cert]
            assert all(a < b for a, b in zip(dims, dims[1:])), (name, dims)
            for (N, d), basis in zip(cert, cert.bases):
                assert d >= N - 2, (name, N, d)
                assert basis.vectors.shape[1] == t.n * N
                rows = N + max(op.bandwidth + op.compact.size for op in t) + 4
                for w in basis.vectors:
                    parts = np.split(w, t.n)
                    out = sum(dense_corner(adjoint(op), rows, N) @ x for op, x in zip(t, parts))
                    assert np.linalg.norm(out) <= 1e-10, (name, N)


def test_oracle_equivalence(rng):
    with criterion(5, "dense oracle and index arithmetic"):
        N = 64
        for _ in range(100):
            a = random_operator(rng, max_degree=4, max_block=6)
            b = random_operator(rng, max_degree=4, max_block=6)
            assert np.max(np.abs(truncate(compose(a, b), N, N) - dense_product(a, b, N))) <= 1e-12
            assert np.max(np.abs(truncate(adjoint(a), N, N) - dense_corner(a, N, N).conj().T)) <= 1e-12
            g = truncate(gram(OperatorTuple([a, b])), N, N)
            g_dense = dense_product(adjoint(a), a, N) + dense_product(adjoint(b), b, N)
            assert np.max(np.abs(g - g_dense)) <= 1e-12
        for _ in range(50):
            (a, ia), (b, ib) = random_fredholm_with_index(rng), random_fredholm_with_index(rng)
            ra, rb, rab = fredholm_index(a), fredholm_index(b), fredholm_index(compose(a, b))
            assert (ra.index, rb.index) == (ia, ib)
            assert rab.index == ra.index + rb.index
            assert ra.agreement and rb.agreement and rab.agreement


def test_left_inverse_and_closed_range():
    with criterion(6, "left inverse defect compact, closed range witness"):
        spherical = [p for p in PRESETS if is_essential_spherical_isometry(preset(p))]
        assert set(SPHERICAL_SUITE) | {"right-shift", "fsw-rank-one"} <= set(spherical)
        for name in spherical:
            t = preset(name)
            s, defect = essential_left_inverse(t)
            assert defect.symbol.is_zero(), name
            direct = StructuredOperator.identity() - sum(
                (compose(si, ti) for si, ti in zip(s, t)), StructuredOperator.zero()
            )
            assert direct.symbol == LaurentPoly.zero() and direct == defect
        witness = closed_range_witness(preset("chavan-counterexample"), (32, 64, 128))
        assert [n for n, _ in witness] == [32, 64, 128]
        assert min(v for _, v in witness) >= 0.5
