import numpy as np
import pytest

from calkinkit.errors import NotEssentialInversePair, SymbolVanishesOnCircle
from calkinkit.obstruction import (
    Verdict,
    commuting_perturbation_verdict,
    counterexample_demo,
    counterexample_tuple,
    essential_inverse_pair_check,
    fredholm_index,
)
from calkinkit.operator import StructuredOperator, compose
from calkinkit.symbol import winding_number

from .conftest import random_fredholm, random_fredholm_with_index


def e01(sign: float) -> StructuredOperator:
    return StructuredOperator.block(np.array([[0.0, sign], [0.0, 0.0]]))


class TestFredholmIndex:
    def test_right_shift(self, R):
        rep = fredholm_index(R)
        assert (rep.index, rep.kernel_dim, rep.cokernel_dim) == (-1, 0, 1)
        assert rep.agreement

    def test_scaled_counterexample_entries(self):
        t = counterexample_tuple()
        assert fredholm_index(2**0.5 * t[0]).index == -1
        assert fredholm_index(2**0.5 * t[1]).index == 1

    def test_invertible_block_perturbation(self, I):
        rep = fredholm_index(I + StructuredOperator.block(np.diag([1.0, 2.0, -0.5])))
        assert (rep.index, rep.kernel_dim, rep.cokernel_dim) == (0, 0, 0)

    def test_finite_rank_kernel(self, I, P0):
        # I - P_0 kills e_0 and is self-adjoint: ker and ker* are both one-dimensional
        rep = fredholm_index(I - P0)
        assert (rep.index, rep.kernel_dim, rep.cokernel_dim) == (0, 1, 1)

    def test_higher_shift(self):
        rep = fredholm_index(StructuredOperator.shift(-3))
        assert (rep.index, rep.kernel_dim, rep.cokernel_dim) == (3, 3, 0)

    def test_not_fredholm(self):
        with pytest.raises(SymbolVanishesOnCircle):
            fredholm_index(StructuredOperator.toeplitz({1: 0.5, 2: 0.5}))

    def test_stable_under_compact_perturbation(self, R, rng):
        for _ in range(5):
            n = int(rng.integers(1, 5))
            block = 0.1 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            assert fredholm_index(R + StructuredOperator.block(block)).index == -1

    def test_random_fredholm_agreement_and_multiplicativity(self, rng):
        for _ in range(20):
            (a, ia), (b, ib) = random_fredholm_with_index(rng), random_fredholm_with_index(rng)
            ra, rb = fredholm_index(a), fredholm_index(b)
            assert (ra.index, rb.index) == (ia, ib)
            assert ra.agreement and rb.agreement
            rab = fredholm_index(compose(a, b))
            assert rab.index == ra.index + rb.index
            assert rab.agreement


class TestInversePair:
    def test_shifts(self, R):
        assert essential_inverse_pair_check(R, R.H)

    def test_rank_one_pair(self, I):
        a, b = I + e01(1.0), I - e01(1.0)
        assert compose(a, b) == I
        assert essential_inverse_pair_check(a, b)

    def test_not_inverse(self, R):
        assert not essential_inverse_pair_check(R, R)

    def test_winding_sum_is_zero(self, rng):
        for _ in range(10):
            k = int(rng.integers(-3, 4))
            phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
            n = int(rng.integers(0, 4))
            block = 0.2 * rng.normal(size=(n, n))
            a = StructuredOperator.shift(k) * phase + StructuredOperator.block(block)
            b = StructuredOperator.shift(-k) * np.conj(phase)
            assert essential_inverse_pair_check(a, b)
            assert winding_number(a.symbol) + winding_number(b.symbol) == 0

    def test_adjoint_negates_index(self, rng):
        for _ in range(10):
            a = random_fredholm(rng)
            assert fredholm_index(a).index + fredholm_index(a.H).index == 0


class TestVerdict:
    def test_shift_pair_obstructed(self, R):
        rep = commuting_perturbation_verdict(R, R.H)
        assert rep.verdict is Verdict.OBSTRUCTED
        assert [r.index for r in rep.reports] == [-1, 1]

    def test_identity_pair(self, I):
        assert commuting_perturbation_verdict(I, I).verdict is Verdict.POSSIBLE

    def test_rank_one_pair(self, I):
        rep = commuting_perturbation_verdict(I + e01(1.0), I - e01(1.0))
        assert rep.verdict is Verdict.POSSIBLE

    def test_rejects_non_pair(self, R):
        with pytest.raises(NotEssentialInversePair):
            commuting_perturbation_verdict(R, R)

    def test_as_dict(self, R):
        d = commuting_perturbation_verdict(R, R.H).as_dict()
        assert d["verdict"] == "OBSTRUCTED"
        assert d["indices"][0]["operator_id"] == "A"


class TestDemo:
    def test_all_steps_pass(self):
        rep = counterexample_demo()
        assert rep.passed
        names = [s.name for s in rep.steps]
        assert names == [
            "essential_spherical_isometry",
            "essential_inverse_pair",
            "verdict_obstructed",
            "isometrize_succeeds",
        ]
        assert rep.steps[2].detail["index_sqrt2_T1"] == -1
        assert rep.steps[3].detail["gram_residual"] <= 1e-8
