"""Finite truncations of the Gribov operators in the basis e_n(z) = z^n / sqrt(n!).

In this basis the cubic number operator ``G = a*^3 a^3`` is diagonal with
eigenvalues ``n(n-1)(n-2)`` and the perturbation

    H_{mu,lambda} = mu a*a + i lambda a*(a + a*)a

is complex symmetric tridiagonal: ``h_nn = mu n`` and
``h_{n,n+1} = h_{n+1,n} = i lambda n sqrt(n+1)``.  All spectral work indexes
the basis from n = 1 (``e_0`` is annihilated by every operator here); the
ladder builders keep ``e_0`` so that ``[a, a*] = I`` can be checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InvalidParameter, PoleCollision

__all__ = [
    "GribovParams",
    "TruncationSpec",
    "DimPolicy",
    "TridiagonalOperator",
    "DiagonalResolvent",
    "eigenvalue_G",
    "g_eigenvalues",
    "build_perturbation",
    "build_full_operator",
    "build_shifted_operator",
    "build_ladder",
    "resolvent_diagonal",
]

# Relative distance below which a shift is treated as sitting on a pole.
POLE_RTOL = 1e-12


@dataclass(frozen=True)
class GribovParams:
    """Real couplings of ``H = lambda'' G + H_{mu,lambda}``.

    ``lambda_pp`` is the magic coupling, ``mu`` the intercept and ``lambda_``
    the triple coupling.  ``lambda_pp = 0`` is accepted so the perturbation
    alone can be built; every contour or trace operation calls
    :meth:`require_positive_coupling`.
    """

    lambda_pp: float = 1.0
    mu: float = 1.0
    lambda_: float = 0.1

    def __post_init__(self):
        for name in ("lambda_pp", "mu", "lambda_"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise InvalidParameter(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))

    def require_positive_coupling(self):
        if not self.lambda_pp > 0:
            raise InvalidParameter(
                f"lambda_pp must be > 0 for contour and trace operations, got {self.lambda_pp}")

    def as_dict(self) -> dict:
        return {"lambda_pp": self.lambda_pp, "mu": self.mu, "lambda": self.lambda_}


@dataclass(frozen=True)
class TruncationSpec:
    """Number of retained basis states and the lowest retained index."""

    dim: int
    start_index: int = 1

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidParameter(f"dim must be an integer >= 2, got {self.dim!r}")
        if self.start_index not in (0, 1):
            raise InvalidParameter(f"start_index must be 0 or 1, got {self.start_index!r}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + self.dim, dtype=np.int64)


@dataclass(frozen=True)
class DimPolicy:
    """Truncation size as a function of the contour index: ``N(m) = max(factor*m, m + floor)``."""

    factor: int = 4
    floor: int = 60

    def __post_init__(self):
        if self.factor < 1 or self.floor < 2:
            raise InvalidParameter(f"invalid dimension policy factor={self.factor}, floor={self.floor}")

    def dim_for(self, m: int) -> int:
        return max(self.factor * m, m + self.floor)

    def spec_for(self, m: int) -> TruncationSpec:
        return TruncationSpec(self.dim_for(m), start_index=1)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Complex symmetric tridiagonal matrix stored as one diagonal and one off-diagonal.

    ``off[k]`` couples rows/columns ``k`` and ``k+1`` (0-based storage index),
    so ``M = M.T`` holds structurally.  The matrix is generally not Hermitian.
    """

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=complex).ravel()
        off = np.array(self.off, dtype=complex).ravel()
        if diag.size < 1 or off.size != diag.size - 1:
            raise InvalidParameter(
                f"off-diagonal must have length dim-1: got dim={diag.size}, len(off)={off.size}")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise InvalidParameter("tridiagonal entries must be finite")
        object.__setattr__(self, "diag", _frozen(diag))
        object.__setattr__(self, "off", _frozen(off))

    @property
    def dim(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        if self.dim > 1:
            idx = np.arange(self.dim - 1)
            out[idx, idx + 1] = self.off
            out[idx + 1, idx] = self.off
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """``M @ x`` for a vector or a stack of column vectors (first axis = basis index)."""
        x = np.asarray(x)
        d = self.diag.reshape((-1,) + (1,) * (x.ndim - 1))
        e = self.off.reshape((-1,) + (1,) * (x.ndim - 1))
        y = d * x
        y[:-1] += e * x[1:]
        y[1:] += e * x[:-1]
        return y

    def shifted(self, shift: complex) -> "TridiagonalOperator":
        return TridiagonalOperator(self.diag - shift, self.off)

    def inf_norm(self) -> float:
        """Maximum absolute row sum."""
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.off)
        row[1:] += np.abs(self.off)
        return float(row.max())

    def banded(self) -> np.ndarray:
        """Storage in the ``(3, N)`` layout expected by :func:`scipy.linalg.solve_banded`."""
        ab = np.zeros((3, self.dim), dtype=complex)
        ab[0, 1:] = self.off
        ab[1] = self.diag
        ab[2, :-1] = self.off
        return ab


@dataclass(frozen=True, eq=False)
class DiagonalResolvent:
    """Diagonal of ``(lambda'' G - sigma)^{-1}`` on the retained basis states."""

    sigma: complex
    values: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size


def eigenvalue_G(n: int) -> int:
    """Eigenvalue ``n(n-1)(n-2)`` of ``G`` on ``e_n`` (zero for n = 0, 1, 2)."""
    n = int(n)
    if n < 0:
        raise InvalidParameter(f"basis index must be nonnegative, got {n}")
    return n * (n - 1) * (n - 2)


def g_eigenvalues(n) -> np.ndarray:
    """Vectorised :func:`eigenvalue_G` in exact int64 arithmetic."""
    n = np.asarray(n, dtype=np.int64)
    if np.any(n < 0):
        raise InvalidParameter("basis indices must be nonnegative")
    if n.size and n.max() > 2_000_000:
        raise InvalidParameter("basis index too large for exact int64 eigenvalues")
    return n * (n - 1) * (n - 2)


def _require_start_one(spec: TruncationSpec):
    if spec.start_index != 1:
        raise InvalidParameter(
            "Gribov operators are indexed from n = 1; the e_0 row and column vanish identically")


def _perturbation_bands(params: GribovParams, n: np.ndarray):
    diag = params.mu * n.astype(float)
    m = n[:-1].astype(float)
    off = 1j * params.lambda_ * m * np.sqrt(m + 1.0)
    return diag, off


def build_perturbation(params: GribovParams, spec: TruncationSpec) -> TridiagonalOperator:
    """Matrix of ``H_{mu,lambda}`` on ``e_1 .. e_N``."""
    _require_start_one(spec)
    diag, off = _perturbation_bands(params, spec.indices)
    return TridiagonalOperator(diag, off)


def build_full_operator(params: GribovParams, spec: TruncationSpec) -> TridiagonalOperator:
    """Matrix of ``H = lambda'' G + H_{mu,lambda}`` on ``e_1 .. e_N``."""
    _require_start_one(spec)
    n = spec.indices
    diag, off = _perturbation_bands(params, n)
    diag = params.lambda_pp * g_eigenvalues(n).astype(float) + diag
    return TridiagonalOperator(diag, off)


def build_shifted_operator(params: GribovParams, spec: TruncationSpec, k: int) -> TridiagonalOperator:
    """``H - lambda'' lambda_k I`` with the cubic differences formed in integers.

    Keeps the O(1) eigenvalue offsets ``sigma_k - lambda'' lambda_k`` resolvable to
    full relative precision even when ``lambda_k`` is large.
    """
    _require_start_one(spec)
    n = spec.indices
    diag, off = _perturbation_bands(params, n)
    gap = (g_eigenvalues(n) - eigenvalue_G(k)).astype(float)
    return TridiagonalOperator(params.lambda_pp * gap + diag, off)


def build_ladder(spec: TruncationSpec, which: Literal["annihilation", "creation"]) -> np.ndarray:
    """Dense truncated ladder operator on ``e_0 .. e_{N-1}``; ``a e_n = sqrt(n) e_{n-1}``."""
    if spec.start_index != 0:
        raise InvalidParameter("ladder operators are built on a basis that includes e_0")
    a = np.diag(np.sqrt(np.arange(1, spec.dim, dtype=float)), 1)
    if which == "annihilation":
        return a
    if which == "creation":
        return a.T.copy()
    raise InvalidParameter(f"which must be 'annihilation' or 'creation', got {which!r}")


def resolvent_diagonal(params: GribovParams, sigma: complex, spec: TruncationSpec) -> DiagonalResolvent:
    """Entries ``1/(lambda'' lambda_n - sigma)`` for the retained indices."""
    sigma = complex(sigma)
    poles = params.lambda_pp * g_eigenvalues(spec.indices).astype(float)
    gaps = poles - sigma
    if np.min(np.abs(gaps)) < POLE_RTOL * (1.0 + abs(sigma)):
        k = int(np.argmin(np.abs(gaps)))
        raise PoleCollision(
            f"sigma={sigma} collides with lambda'' lambda_n at n={int(spec.indices[k])}")
    return DiagonalResolvent(sigma=sigma, values=_frozen(1.0 / gaps))
