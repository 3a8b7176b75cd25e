import numpy as np
import pytest
from scipy.stats import unitary_group

from calkinkit.errors import NotEssentialIsometry, PreconditionError, ToleranceAmbiguous
from calkinkit.operator import StructuredOperator
from calkinkit.optuple import OperatorTuple, column_truncate, row_apply, row_truncate
from calkinkit.presets import preset
from calkinkit.spectral import (
    canonical_basis,
    closed_range_witness,
    kernel_basis,
    row_kernel_growth_certificate,
    stabilized_joint_kernel,
    stabilized_kernel,
    trim_tail,
)

from .conftest import SQRT_HALF


class TestKernelBasis:
    def test_injective_column(self, R):
        for N in (4, 16, 33):
            assert kernel_basis(column_truncate(OperatorTuple([R]), N)).dim == 0

    def test_row_section_rank_nullity(self):
        section = row_truncate(preset("chavan-counterexample"), 8, 1)
        assert kernel_basis(section).dim >= 2 * 8 - (8 + 1)

    def test_zero_matrix(self):
        kb = kernel_basis(np.zeros((3, 3)))
        assert kb.dim == 3
        np.testing.assert_allclose(np.abs(kb.vectors), np.eye(3), atol=1e-15)

    def test_vectors_orthonormal(self):
        kb = kernel_basis(row_truncate(preset("banded-spherical"), 12))
        gram = kb.vectors.conj() @ kb.vectors.T
        np.testing.assert_allclose(gram, np.eye(kb.dim), atol=1e-10)

    def test_gap_is_mandated(self):
        with pytest.raises(ToleranceAmbiguous):
            kernel_basis(np.diag([1.0, 5e-10]), tol=1e-10)
        assert kernel_basis(np.diag([1.0, 5e-11]), tol=1e-10).dim == 1
        assert kernel_basis(np.diag([1.0, 2e-9]), tol=1e-10).dim == 0

    def test_dimension_invariant_under_left_unitaries(self, rng):
        section = row_truncate(preset("kernel-spherical"), 10)
        dim = kernel_basis(section).dim
        for seed in range(5):
            u = unitary_group.rvs(section.shape[0], random_state=seed)
            assert kernel_basis(u @ section).dim == dim

    def test_canonical_basis_depends_only_on_subspace(self, rng):
        q, _ = np.linalg.qr(rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3)))
        basis = q.T
        mix, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        np.testing.assert_allclose(canonical_basis(basis), canonical_basis(mix @ basis), atol=1e-12)

    def test_trim_tail(self):
        v = np.array([1.0, 0.5, 1e-14, 1e-15, 0.0])
        assert len(trim_tail(v)) == 2


class TestStabilizedJointKernel:
    def test_counterexample_injective(self):
        assert stabilized_joint_kernel(preset("chavan-counterexample")).dim == 0

    def test_rank_one_kernel(self):
        t = preset("kernel-spherical")
        # oracle: T_1 e_0 = T_2 e_0 = 0 exactly
        for op in t:
            np.testing.assert_array_equal(op.apply([1.0]), np.zeros_like(op.apply([1.0])))
        kb = stabilized_joint_kernel(t)
        assert kb.dim == 1
        np.testing.assert_allclose(trim_tail(kb.vectors[0]), [1.0])
        assert kb.exactness and kb.residuals.max() <= 1e-10

    def test_single_operator(self):
        kb = stabilized_joint_kernel(preset("fsw-rank-one"))
        assert kb.dim == 1
        np.testing.assert_allclose(trim_tail(kb.vectors[0]), [1.0])

    def test_requires_spherical(self, R):
        with pytest.raises(NotEssentialIsometry):
            stabilized_joint_kernel(OperatorTuple([R, R]))

    def test_geometric_kernel_is_certified(self):
        # T(z^-1 - 1/4) has the kernel vector (4^-k)_k, which is not finitely supported
        op = StructuredOperator.toeplitz({-1: 1.0, 0: -0.25})
        kb = stabilized_kernel(OperatorTuple([op]))
        assert kb.dim == 1
        v = trim_tail(kb.vectors[0])
        expected = 0.25 ** np.arange(len(v))
        expected /= np.linalg.norm(expected)
        np.testing.assert_allclose(np.abs(v), expected, atol=1e-12)
        assert kb.exactness


class TestGrowthCertificate:
    @pytest.mark.parametrize("name", ["chavan-counterexample", "banded-spherical", "kernel-spherical"])
    def test_strictly_increasing(self, name):
        t = preset(name)
        cert = row_kernel_growth_certificate(t, (16, 32, 64))
        dims = [d for _, d in cert]
        assert dims == sorted(set(dims))
        for N, d in cert:
            assert d >= (t.n - 1) * N - cert.margin
        for b in cert.bases:
            assert b.exactness

    def test_counterexample_bounds(self):
        cert = row_kernel_growth_certificate(preset("chavan-counterexample"), (16, 32, 64))
        for N, d in cert:
            assert d >= N - 1

    def test_certified_vectors_are_kernel_vectors(self):
        t = preset("chavan-counterexample")
        cert = row_kernel_growth_certificate(t, (16, 32))
        for b in cert.bases:
            for w in b.vectors:
                assert np.linalg.norm(row_apply(t, w, 4 * (b.N + b.margin))) <= 1e-10

    def test_single_operator_rejected(self, R):
        with pytest.raises(PreconditionError):
            row_kernel_growth_certificate(OperatorTuple([R]))


class TestClosedRangeWitness:
    def test_shift(self, R):
        for _, s in closed_range_witness(OperatorTuple([R]), (8, 16, 32)):
            assert s == pytest.approx(1.0, abs=1e-12)

    def test_counterexample(self):
        values = closed_range_witness(preset("chavan-counterexample"), (32, 64, 128))
        for _, s in values:
            assert s >= SQRT_HALF - 0.1
            assert s == pytest.approx(SQRT_HALF, abs=1e-12)

    def test_isometry_on_complement(self):
        for _, s in closed_range_witness(preset("fsw-rank-one"), (16, 32, 64)):
            assert s == pytest.approx(1.0, abs=1e-12)
