import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gribov_lab.bargmann import GribovParams, TruncationSpec, build_full_operator, g_eigenvalues
from gribov_lab.errors import DomainError, NoConvergence, StructureMismatch
from gribov_lab.linalg import (
    Banded,
    csum,
    eigen_product_det,
    eigenvalues,
    fredholm_det,
    perturbation_determinant,
    plemelj_det,
    refine_eigenvalue,
    schatten_norm,
    similarity_to_real,
    singular_values,
    trace_of_power,
    tridiagonal_det,
)


def _random_k(rng, n, scale):
    k = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * k / np.linalg.norm(k, "nuc")


def test_csum_recovers_cancelled_terms():
    assert csum([1e16, 1.0, -1e16]) == 1.0
    assert csum(np.array([1e16 + 1j, 1.0, -1e16])) == 1.0 + 1j
    assert csum([]) == 0.0


def test_eigenvalues_diagonal_case_exact():
    params = GribovParams(1.0, 1.0, 0.0)
    spec = TruncationSpec(20)
    spec_vals = eigenvalues(build_full_operator(params, spec))
    n = spec.indices
    assert np.allclose(spec_vals.values, np.sort(g_eigenvalues(n) + n), rtol=0, atol=1e-9)
    assert spec_vals.residuals.max() <= 1e-10


def test_eigenvalues_are_certified():
    op = build_full_operator(GribovParams(1.0, 1.0, 0.1), TruncationSpec(60))
    spec = eigenvalues(op)
    assert spec.values.size == 60
    assert spec.residuals.max() <= 1e-10
    with pytest.raises(NoConvergence):
        eigenvalues(op, tol=1e-40)


def test_similarity_to_real_preserves_spectrum():
    op = build_full_operator(GribovParams(1.0, 1.0, 0.3), TruncationSpec(25))
    real = similarity_to_real(op)
    assert real.dtype == float
    a = np.sort_complex(np.linalg.eigvals(real))
    b = np.sort_complex(np.linalg.eigvals(op.to_dense()))
    assert np.allclose(a, b, rtol=1e-9)


def test_similarity_to_real_rejects_general_structure():
    from gribov_lab.bargmann import TridiagonalOperator

    with pytest.raises(StructureMismatch):
        similarity_to_real(TridiagonalOperator([1.0, 2.0], [0.5]))


def test_refine_eigenvalue_converges():
    op = build_full_operator(GribovParams(1.0, 1.0, 0.1), TruncationSpec(40))
    guess = eigenvalues(op).values[4] + 1e-4
    value, res, vec = refine_eigenvalue(op, guess)
    assert res < 1e-14
    assert np.linalg.norm(op.matvec(vec) - value * vec) < 1e-10


def test_schatten_norms():
    a = np.diag([3.0, -4.0])
    assert math.isclose(schatten_norm(a, 1).value, 7.0)
    assert math.isclose(schatten_norm(a, 2).value, 5.0)
    # for p < 1 the raw sum is reported
    assert math.isclose(schatten_norm(a, 0.5).value, math.sqrt(3) + 2.0)
    assert np.allclose(singular_values(a), [4.0, 3.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_banded_products_match_dense(n, j, seed):
    rng = np.random.default_rng(seed)
    a = np.triu(np.tril(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1), -1)
    ba = Banded.from_dense(a)
    assert np.allclose((ba @ ba).to_dense(), a @ a)
    assert np.isclose(trace_of_power(a, j), np.trace(np.linalg.matrix_power(a, j)))


def test_banded_batched_trace():
    rng = np.random.default_rng(3)
    stack = rng.standard_normal((4, 6, 6))
    stack = np.triu(np.tril(stack, 1), -1)
    bands = {o: np.stack([Banded.from_dense(s).bands.get(o, np.zeros(6)) for s in stack]) for o in (-1, 0, 1)}
    tr = trace_of_power(Banded(bands, 6), 3)
    assert np.allclose(tr, [np.trace(np.linalg.matrix_power(s, 3)) for s in stack])


def test_fredholm_against_high_precision(oracles):
    for case in oracles["fredholm"]:
        k = np.array([[complex(*z) for z in row] for row in case["k"]])
        ref = complex(float(case["det"][0]), float(case["det"][1]))
        assert abs(fredholm_det(k) - ref) <= 1e-13 * abs(ref)
        assert abs(eigen_product_det(k) - ref) <= 1e-12 * abs(ref)


def test_plemelj_sign_and_domain():
    k = np.diag([0.3, -0.2])
    assert np.isclose(plemelj_det(k), 1.3 * 0.8, rtol=1e-14)
    with pytest.raises(DomainError):
        plemelj_det(np.diag([0.9, 0.5]))


def test_determinant_routes_agree():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 21))
        k = _random_k(rng, n, 0.5)
        d = fredholm_det(k)
        assert abs(plemelj_det(k) - d) <= 1e-10 * abs(d)
        assert abs(eigen_product_det(k) - d) <= 1e-8 * abs(d)


def test_tridiagonal_det_matches_dense():
    rng = np.random.default_rng(5)
    for n in (1, 2, 7, 40):
        d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        u = rng.standard_normal(n - 1)
        l = rng.standard_normal(n - 1)
        a = np.diag(d) + np.diag(u, 1) + np.diag(l, -1)
        assert np.isclose(tridiagonal_det(d, u, l), np.linalg.det(a), rtol=1e-10)
    # a vanishing leading minor takes the dense fallback
    assert np.isclose(tridiagonal_det([0.0, 1.0, 2.0], [1.0, 1.0], [1.0, 1.0]), -2.0)


def test_perturbation_determinant_vanishes_at_eigenvalues():
    params = GribovParams(1.0, 1.0, 0.1)
    spec = TruncationSpec(40)
    vals = eigenvalues(build_full_operator(params, spec)).values
    sigma = vals[5]
    away = perturbation_determinant(params, sigma + 0.5, spec)
    assert abs(perturbation_determinant(params, sigma, spec)) < 1e-9 * abs(away)
    # equals det(H - sigma)/det(lambda'' G - sigma)
    s = 10.0 + 3.0j
    poles = g_eigenvalues(spec.indices).astype(float)
    ratio = np.prod((vals - s) / (poles - s))
    assert np.isclose(perturbation_determinant(params, s, spec), ratio, rtol=1e-10)
