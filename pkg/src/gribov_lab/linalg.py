"""Complex linear algebra for tridiagonal truncations.

Eigenvalues come from LAPACK's shifted QR on the dense matrix and are then
certified one at a time by inverse iteration on the tridiagonal storage.
Traces of matrix powers are formed band by band so a whole contour's worth
of matrices is processed in one vectorised pass.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .bargmann import (
    GribovParams,
    TridiagonalOperator,
    TruncationSpec,
    build_perturbation,
    resolvent_diagonal,
)
from .errors import DomainError, InvalidParameter, NoConvergence, StructureMismatch

__all__ = [
    "Spectrum",
    "SchattenReport",
    "Banded",
    "csum",
    "eigenvalues",
    "refine_eigenvalue",
    "similarity_to_real",
    "singular_values",
    "schatten_norm",
    "trace_of_power",
    "fredholm_det",
    "eigen_product_det",
    "plemelj_det",
    "perturbation_determinant",
    "tridiagonal_det",
]

LOGGER = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
# The QR stage is LAPACK's xLAHQR/xHSEQR, capped at 30*max(10, N) sweeps;
# this caps the Rayleigh-quotient polish per eigenvalue.
MAX_REFINE_STEPS = 8
_START_SEED = 20240917


def _two_sum(a, b):
    s = a + b
    bp = s - a
    return s, (a - (s - bp)) + (b - bp)


def _cascade_real(x: np.ndarray) -> float:
    x = np.ascontiguousarray(x, dtype=float).ravel()
    if x.size == 0:
        return 0.0
    errors = []
    while x.size > 1:
        if x.size % 2:
            x = np.append(x, 0.0)
        x, e = _two_sum(x[0::2], x[1::2])
        errors.append(e)
    if not errors:
        return float(x[0])
    return float(x[0] + np.sum(np.concatenate(errors)))


def csum(values) -> complex | float:
    """Compensated sum in a fixed pairwise order.

    Each pairwise addition is split into its rounded sum and exact rounding
    error (TwoSum); the errors are added back at the end.  The order never
    depends on the data, so results are bit-reproducible.
    """
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        return complex(_cascade_real(arr.real), _cascade_real(arr.imag))
    return _cascade_real(arr)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted by (real, imaginary) part with certified residuals.

    ``residuals[k]`` is ``||M v - sigma v|| / ||M||`` for a unit vector ``v``
    obtained by inverse iteration; every entry is at most ``tol``.
    """

    values: np.ndarray
    residuals: np.ndarray
    dim: int
    tol: float

    def __len__(self):
        return self.dim


@dataclass(frozen=True)
class SchattenReport:
    order_p: float
    value: float
    singular_count: int


def _sort_complex(values: np.ndarray) -> np.ndarray:
    order = np.lexsort((values.imag, values.real))
    return order


def _start_vector(n: int) -> np.ndarray:
    rng = np.random.default_rng(_START_SEED)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _solve_shifted(op: TridiagonalOperator, theta: complex, rhs: np.ndarray) -> np.ndarray:
    ab = op.banded()
    ab[1] -= theta
    try:
        return scipy.linalg.solve_banded((1, 1), ab, rhs, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        # theta hit an eigenvalue exactly; nudge by one ulp of the local scale
        nudge = max(abs(theta), 1.0) * 4 * np.finfo(float).eps
        ab[1] -= nudge
        return scipy.linalg.solve_banded((1, 1), ab, rhs, check_finite=False)


def _residual(op: TridiagonalOperator, theta: complex, v: np.ndarray) -> float:
    return float(np.linalg.norm(op.matvec(v) - theta * v))


def _inverse_iteration(op: TridiagonalOperator, theta: complex, steps: int = 1):
    v = _start_vector(op.dim)
    with np.errstate(all="ignore"):
        for _ in range(steps):
            v = _solve_shifted(op, theta, v)
            nrm = np.linalg.norm(v)
            if not np.isfinite(nrm) or nrm == 0:
                raise NoConvergence(f"inverse iteration broke down at theta={theta}")
            v = v / nrm
    return v


def eigenvalues(op: TridiagonalOperator, tol: float = DEFAULT_TOL) -> Spectrum:
    """All eigenvalues of ``op`` with a residual certificate for each.

    Raises :class:`NoConvergence` when LAPACK fails or when any eigenpair's
    relative residual ``||Mv - sigma v|| / ||M||`` exceeds ``tol`` after two
    inverse-iteration steps.
    """
    if not tol > 0:
        raise InvalidParameter(f"tol must be positive, got {tol}")
    try:
        vals = scipy.linalg.eigvals(op.to_dense(), check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"QR iteration failed: {exc}") from exc
    vals = vals[_sort_complex(vals)]
    scale = max(op.inf_norm(), np.finfo(float).tiny)
    residuals = np.empty(vals.size)
    for k, theta in enumerate(vals):
        v = _inverse_iteration(op, theta, steps=1)
        res = _residual(op, theta, v) / scale
        if res > tol:
            v = _inverse_iteration(op, theta, steps=2)
            res = min(res, _residual(op, theta, v) / scale)
        residuals[k] = res
    if residuals.size and residuals.max() > tol:
        k = int(residuals.argmax())
        raise NoConvergence(
            f"eigenpair {k} (sigma={vals[k]}) has residual {residuals[k]:.3e} > tol={tol:.1e}")
    return Spectrum(values=vals, residuals=residuals, dim=op.dim, tol=tol)


def refine_eigenvalue(op: TridiagonalOperator, guess: complex, max_steps: int = MAX_REFINE_STEPS):
    """Polish one eigenvalue by complex-symmetric Rayleigh quotient iteration.

    For ``M = M.T`` the left eigenvector equals the right one, so the
    bilinear quotient ``v.T M v / v.T v`` is stationary and the iteration
    converges quadratically.  Returns ``(value, relative_residual, vector)``,
    keeping the best iterate seen.
    """
    theta = complex(guess)
    scale = max(op.inf_norm(), np.finfo(float).tiny)
    v = _inverse_iteration(op, theta, steps=2)
    best = (theta, _residual(op, theta, v) / scale, v)
    with np.errstate(all="ignore"):
        for _ in range(max_steps):
            denom = v @ v
            if denom == 0:
                break
            theta_new = complex((v @ op.matvec(v)) / denom)
            if not np.isfinite(theta_new):
                break
            res = _residual(op, theta_new, v) / scale
            if res < best[1]:
                best = (theta_new, res, v)
            if theta_new == theta:
                break
            theta = theta_new
            w = _solve_shifted(op, theta, v)
            nrm = np.linalg.norm(w)
            if not np.isfinite(nrm) or nrm == 0:
                break
            v = w / nrm
    return best


def similarity_to_real(op: TridiagonalOperator, atol: float = 1e-13) -> np.ndarray:
    """Real tridiagonal matrix ``D M D^{-1}`` with ``D = diag(i^n)``.

    Requires a real diagonal and a purely imaginary off-diagonal ``i b``;
    the result carries ``+b`` above and ``-b`` below the diagonal.
    """
    scale = max(1.0, op.inf_norm())
    if np.any(np.abs(op.diag.imag) > atol * scale) or np.any(np.abs(op.off.real) > atol * scale):
        raise StructureMismatch("similarity_to_real needs a real diagonal and imaginary off-diagonal")
    b = op.off.imag
    out = np.diag(op.diag.real)
    idx = np.arange(op.dim - 1)
    out[idx, idx + 1] = b
    out[idx + 1, idx] = -b
    return out


def _as_dense(matrix) -> np.ndarray:
    if isinstance(matrix, TridiagonalOperator):
        return matrix.to_dense()
    if isinstance(matrix, Banded):
        return matrix.to_dense()
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise InvalidParameter("expected a 2-D matrix")
    return arr


def singular_values(matrix) -> np.ndarray:
    """Singular values in nonincreasing order."""
    a = _as_dense(matrix)
    if not np.all(np.isfinite(a)):
        raise InvalidParameter("matrix entries must be finite")
    try:
        s = scipy.linalg.svdvals(a, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"SVD failed: {exc}") from exc
    return np.sort(s)[::-1]


def schatten_norm(matrix, p: float) -> SchattenReport:
    """Schatten p-norm; for ``p < 1`` the raw sum ``sum s_n^p`` is reported instead."""
    if not p > 0:
        raise InvalidParameter(f"Schatten order must be positive, got {p}")
    s = singular_values(matrix)
    total = csum(s ** p)
    value = total ** (1.0 / p) if p >= 1 else total
    return SchattenReport(order_p=float(p), value=float(value), singular_count=int(s.size))


class Banded:
    """Batched banded matrices in row-padded storage.

    ``bands[o][..., i]`` holds entry ``(i, i + o)`` and is zero where that
    column falls outside ``0 .. n-1``.  Leading axes index a batch (for
    example the nodes of a contour).
    """

    def __init__(self, bands: dict[int, np.ndarray], n: int):
        self.n = int(n)
        self.bands = {int(o): np.asarray(b) for o, b in bands.items()}

    @classmethod
    def from_dense(cls, a: np.ndarray) -> "Banded":
        a = np.asarray(a)
        n = a.shape[0]
        bands = {}
        for o in range(-(n - 1), n):
            d = np.diagonal(a, o)
            if np.any(d != 0):
                row = np.zeros(n, dtype=a.dtype)
                row[max(0, -o):max(0, -o) + d.size] = d
                bands[o] = row
        if not bands:
            bands[0] = np.zeros(n, dtype=a.dtype)
        return cls(bands, n)

    @classmethod
    def from_tridiagonal(cls, op: TridiagonalOperator) -> "Banded":
        n = op.dim
        up = np.zeros(n, dtype=complex)
        lo = np.zeros(n, dtype=complex)
        up[:-1] = op.off
        lo[1:] = op.off
        return cls({-1: lo, 0: op.diag.copy(), 1: up}, n)

    def __matmul__(self, other: "Banded") -> "Banded":
        if self.n != other.n:
            raise InvalidParameter("banded dimension mismatch")
        n = self.n
        out: dict[int, np.ndarray] = {}
        for o1, a in self.bands.items():
            for o2, b in other.bands.items():
                o = o1 + o2
                if abs(o) >= n:
                    continue
                # C[i, i+o] += A[i, i+o1] * B[i+o1, i+o]
                shifted = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
                if o1 >= 0:
                    shifted[..., :n - o1] = b[..., o1:]
                else:
                    shifted[..., -o1:] = b[..., :n + o1]
                term = a * shifted
                if o in out:
                    out[o] = out[o] + term
                else:
                    out[o] = term
        return Banded(out, n)

    def trace(self) -> np.ndarray:
        d = self.bands.get(0)
        if d is None:
            return np.zeros(())
        return d.sum(axis=-1)

    @property
    def bandwidth(self) -> int:
        return max(abs(o) for o in self.bands)

    def to_dense(self) -> np.ndarray:
        n = self.n
        first = next(iter(self.bands.values()))
        if first.ndim != 1:
            raise InvalidParameter("to_dense is only defined for an unbatched matrix")
        out = np.zeros((n, n), dtype=np.result_type(*self.bands.values()))
        for o, row in self.bands.items():
            i = np.arange(max(0, -o), n - max(0, o))
            out[i, i + o] = row[i]
        return out


def _as_banded(a) -> Banded:
    if isinstance(a, Banded):
        return a
    if isinstance(a, TridiagonalOperator):
        return Banded.from_tridiagonal(a)
    return Banded.from_dense(np.asarray(a))


def trace_of_power(a, j: int):
    """``Tr(A^j)`` by banded multiplication; batched input yields a batch of traces."""
    if int(j) != j or not 1 <= j <= 8:
        raise InvalidParameter(f"power must be an integer in 1..8, got {j}")
    base = _as_banded(a)
    power = base
    for _ in range(int(j) - 1):
        power = power @ base
    tr = power.trace()
    return complex(tr) if np.ndim(tr) == 0 else tr


def fredholm_det(k) -> complex:
    """``det(I + K)`` by LU factorisation with partial pivoting."""
    k = _as_dense(k)
    if not np.all(np.isfinite(k)):
        raise InvalidParameter("K must have finite entries")
    return complex(scipy.linalg.det(np.eye(k.shape[0]) + k, check_finite=False))


def eigen_product_det(k) -> complex:
    """``prod (1 + kappa_n)`` over the eigenvalues of ``K``."""
    kappa = scipy.linalg.eigvals(_as_dense(k))
    return complex(np.prod(1.0 + kappa))


def plemelj_det(k, terms: int = 60) -> complex:
    """``det(I + K)`` from the trace-log series ``exp(sum_m (-1)^{m+1} Tr K^m / m)``.

    The series is only used where it converges absolutely, i.e. when the
    trace norm of ``K`` is below one.
    """
    k = _as_dense(k).astype(complex)
    norm1 = schatten_norm(k, 1).value
    if not norm1 < 1:
        raise DomainError(f"trace-log series needs ||K||_1 < 1, got {norm1:.6g}")
    if terms < 1:
        raise InvalidParameter("terms must be >= 1")
    power = np.eye(k.shape[0], dtype=complex)
    series = []
    for m in range(1, int(terms) + 1):
        power = power @ k
        series.append((-1) ** (m + 1) * np.trace(power) / m)
    return complex(np.exp(csum(np.array(series))))


def tridiagonal_det(diag, upper, lower) -> complex:
    """Determinant of a tridiagonal matrix by the three-term continuant recurrence.

    The running ratio ``f_k / f_{k-1}`` is carried instead of ``f_k`` itself,
    with the logarithm of the product accumulated separately, so long
    products neither overflow nor underflow.
    """
    diag = np.asarray(diag, dtype=complex)
    coupling = np.asarray(upper, dtype=complex) * np.asarray(lower, dtype=complex)
    log_abs = 0.0
    phase = 1.0 + 0j
    ratio = diag[0]
    for k in range(diag.size):
        if k > 0:
            if ratio == 0:
                # f_{k-1} = 0: f_k = -c f_{k-2}; restart from the exact value
                return complex(_dense_det(diag, upper, lower))
            ratio = diag[k] - coupling[k - 1] / ratio
        if ratio == 0:
            if k == diag.size - 1:
                return 0j
            continue
        log_abs += math.log(abs(ratio))
        phase *= ratio / abs(ratio)
    return complex(phase * math.exp(log_abs))


def _dense_det(diag, upper, lower) -> complex:
    n = diag.size
    a = np.diag(diag)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = upper
    a[idx + 1, idx] = lower
    return complex(scipy.linalg.det(a))


def perturbation_determinant(params: GribovParams, sigma: complex, spec: TruncationSpec) -> complex:
    """``det(I + H_{mu,lambda} (lambda'' G - sigma)^{-1})`` on the truncation.

    ``I + H R0`` is tridiagonal, so the determinant comes from the continuant
    recurrence; it vanishes exactly at eigenvalues of the truncated ``H``.
    """
    r0 = resolvent_diagonal(params, sigma, spec).values
    h = build_perturbation(params, spec)
    diag = 1.0 + h.diag * r0
    upper = h.off * r0[1:]
    lower = h.off * r0[:-1]
    return tridiagonal_det(diag, upper, lower)
