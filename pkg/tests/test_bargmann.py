import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gribov_lab.bargmann import (
    DimPolicy,
    GribovParams,
    TridiagonalOperator,
    TruncationSpec,
    build_full_operator,
    build_ladder,
    build_perturbation,
    build_shifted_operator,
    eigenvalue_G,
    g_eigenvalues,
    resolvent_diagonal,
)
from gribov_lab.errors import InvalidParameter, PoleCollision


def test_eigenvalues_of_G():
    assert [eigenvalue_G(n) for n in range(6)] == [0, 0, 0, 6, 24, 60]
    n = np.arange(2, 10_001)
    gap = g_eigenvalues(n + 1) - g_eigenvalues(n)
    assert np.array_equal(gap, 3 * n * (n - 1))


def test_eigenvalue_G_rejects_negative_index():
    with pytest.raises(InvalidParameter):
        eigenvalue_G(-1)


def test_perturbation_entries():
    op = build_perturbation(GribovParams(1.0, 1.0, 1.0), TruncationSpec(4))
    assert np.allclose(op.diag, [1, 2, 3, 4])
    assert np.allclose(op.off, 1j * np.array([1 * math.sqrt(2), 2 * math.sqrt(3), 3 * 2.0]))
    dense = op.to_dense()
    assert np.array_equal(dense, dense.T)
    # column norm of e_1: |mu|^2 + |h_12|^2 = 1 + 2
    assert math.isclose(np.linalg.norm(dense[:, 0]) ** 2, 3.0)


def test_full_operator_adds_scaled_G():
    params = GribovParams(2.0, 0.5, 0.3)
    spec = TruncationSpec(10)
    full = build_full_operator(params, spec)
    pert = build_perturbation(params, spec)
    assert np.allclose(full.diag - pert.diag, 2.0 * g_eigenvalues(spec.indices))
    assert np.array_equal(full.off, pert.off)


def test_shifted_operator_matches_full_minus_shift():
    params = GribovParams(1.0, 1.0, 0.1)
    spec = TruncationSpec(30)
    shifted = build_shifted_operator(params, spec, 7)
    full = build_full_operator(params, spec)
    assert np.allclose(shifted.diag, full.diag - eigenvalue_G(7), rtol=0, atol=1e-9)


def test_operators_start_at_one():
    with pytest.raises(InvalidParameter):
        build_full_operator(GribovParams(), TruncationSpec(5, start_index=0))


def test_ladder_commutator():
    spec = TruncationSpec(12, start_index=0)
    a = build_ladder(spec, "annihilation")
    ad = build_ladder(spec, "creation")
    comm = a @ ad - ad @ a
    # truncation spoils only the last diagonal entry
    assert np.allclose(comm[:-1, :-1], np.eye(11))
    assert math.isclose(comm[-1, -1], -11.0)


def test_ladder_reproduces_G_and_perturbation():
    spec0 = TruncationSpec(12, start_index=0)
    a = build_ladder(spec0, "annihilation")
    ad = build_ladder(spec0, "creation")
    g = np.linalg.matrix_power(ad, 3) @ np.linalg.matrix_power(a, 3)
    assert np.allclose(np.diag(g)[:9], g_eigenvalues(np.arange(9)))
    params = GribovParams(1.0, 0.7, 0.2)
    h = params.mu * ad @ a + 1j * params.lambda_ * ad @ (a + ad) @ a
    pert = build_perturbation(params, TruncationSpec(11)).to_dense()
    assert np.allclose(h[1:10, 1:10], pert[:9, :9])


def test_ladder_requires_e0():
    with pytest.raises(InvalidParameter):
        build_ladder(TruncationSpec(5), "creation")


def test_resolvent_collision():
    params = GribovParams()
    with pytest.raises(PoleCollision):
        resolvent_diagonal(params, 24.0, TruncationSpec(10))
    res = resolvent_diagonal(params, 15.0, TruncationSpec(5))
    assert np.allclose(res.values, 1.0 / (np.array([0, 0, 6, 24, 60]) - 15.0))


def test_param_validation():
    with pytest.raises(InvalidParameter):
        GribovParams(lambda_pp=float("nan"))
    with pytest.raises(InvalidParameter):
        TruncationSpec(1)
    with pytest.raises(InvalidParameter):
        GribovParams(lambda_pp=0.0).require_positive_coupling()


def test_dim_policy():
    policy = DimPolicy(4, 60)
    assert policy.dim_for(5) == 65
    assert policy.dim_for(40) == 160


def test_operator_arrays_are_read_only():
    op = build_perturbation(GribovParams(), TruncationSpec(5))
    with pytest.raises(ValueError):
        op.diag[0] = 1.0


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 2**31 - 1))
def test_matvec_matches_dense(dim, mu, lam, seed):
    op = build_perturbation(GribovParams(1.0, mu, lam), TruncationSpec(dim))
    x = np.random.default_rng(seed).standard_normal((dim, 3)) + 0j
    assert np.allclose(op.matvec(x), op.to_dense() @ x)
    assert np.allclose(op.banded()[1], op.diag)


def test_tridiagonal_shape_check():
    with pytest.raises(InvalidParameter):
        TridiagonalOperator(np.ones(3), np.ones(3))
