"""Regularized trace of ``H = lambda'' G + H_{mu,lambda}`` on circles between eigenvalues of G.

For the circle ``gamma_m`` of radius ``r_m = lambda'' (lambda_m + lambda_{m+1}) / 2``
the residual

    sum_{k<=m} (sigma_k - lambda'' lambda_k)
        + sum_{j=1}^{j_max} (1/2 pi i) oint ((-1)^{j-1}/j) Tr[(H_{mu,lambda} R0(sigma))^j] dsigma

is assembled from certified eigenvalues of the truncated ``H`` and from
trapezoid-rule contour integrals, where ``R0(sigma) = (lambda'' G - sigma)^{-1}``.
On a finite truncation the full series (``j_max -> inf``) cancels the
partial sum exactly, so the residual measures the omitted orders.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .bargmann import (
    DimPolicy,
    GribovParams,
    TruncationSpec,
    build_full_operator,
    build_perturbation,
    build_shifted_operator,
    eigenvalue_G,
    g_eigenvalues,
)
from .errors import (
    CountMismatch,
    DomainError,
    InvalidParameter,
    NoConvergence,
    PoleCollision,
    QuadratureNotConverged,
)
from .linalg import DEFAULT_TOL, Banded, csum, eigenvalues, refine_eigenvalue

__all__ = [
    "ContourSpec",
    "CorrectionTerm",
    "TraceReport",
    "DEFAULT_POLICY",
    "radius_sequence",
    "contour_for",
    "contour_nodes",
    "correction_terms",
    "correction_integral",
    "second_order_boundary_pair",
    "eigen_offsets",
    "partial_trace_sum",
    "regularized_residual",
    "correction_count_rule",
    "minimal_correction_count",
]

DEFAULT_POLICY = DimPolicy(factor=4, floor=60)
DEFAULT_NODES = 1024
# eigenvalues of the truncated H closer than this (relative to r) to the circle abort the run
CONTOUR_CLEARANCE = 1e-6
# The doubling estimate measures the error of the M/2 rule; for geometric
# convergence the M-node value is far more accurate than the estimate suggests.
QUAD_TOL = 1e-6


@dataclass(frozen=True)
class ContourSpec:
    """Counterclockwise circle ``|sigma| = radius`` sampled at ``nodes`` equispaced points."""

    radius: float
    nodes: int = DEFAULT_NODES
    m_index: int | None = None
    orientation: str = field(default="counterclockwise", init=False)

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidParameter(f"contour radius must be positive, got {self.radius}")
        n = int(self.nodes)
        if n != self.nodes or n < 16 or n & (n - 1):
            raise InvalidParameter(f"node count must be a power of two >= 16, got {self.nodes}")


@dataclass(frozen=True)
class CorrectionTerm:
    order_j: int
    value: complex
    quad_error_estimate: float


@dataclass(frozen=True)
class TraceReport:
    """One row of the regularized-trace table.

    ``residual`` is ``partial_sum + sum(c.value for c in corrections)`` added
    left to right.  ``eigenvalues`` are the certified ``sigma_k`` inside the
    contour, paired in order with ``k = 1 .. m``.
    """

    m_index: int
    partial_sum: complex
    corrections: tuple[CorrectionTerm, ...]
    residual: complex
    truncation_dim: int
    counts_inside: tuple[int, int]
    radius: float
    nodes: int
    eigenvalues: tuple[complex, ...] = ()
    max_eigen_residual: float = 0.0

    @property
    def quad_error(self) -> float:
        return max((c.quad_error_estimate for c in self.corrections), default=0.0)


def radius_sequence(params: GribovParams, m: int) -> float:
    """``lambda'' (lambda_m + lambda_{m+1}) / 2``; defined for ``m >= 3``.

    For m = 1, 2 the circle would pass through or hug the triple cluster
    ``lambda_0 = lambda_1 = lambda_2 = 0``, so those indices are rejected.
    """
    params.require_positive_coupling()
    if int(m) != m or m < 3:
        raise InvalidParameter(f"contour index must be an integer >= 3, got {m}")
    m = int(m)
    return params.lambda_pp * (eigenvalue_G(m) + eigenvalue_G(m + 1)) / 2.0


def contour_for(params: GribovParams, m: int, nodes: int = DEFAULT_NODES) -> ContourSpec:
    return ContourSpec(radius=radius_sequence(params, m), nodes=nodes, m_index=int(m))


def contour_nodes(spec: ContourSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``sigma_k = r e^{2 pi i k / M}`` and weights for ``(1/2 pi i) oint f dsigma``.

    The weight of node k is ``sigma_k / M``, so ``sum w_k f(sigma_k)`` is the
    periodic trapezoid rule, which converges geometrically for integrands
    analytic in an annulus around the circle.
    """
    k = np.arange(spec.nodes)
    sigma = spec.radius * np.exp(2j * np.pi * k / spec.nodes)
    return sigma, sigma / spec.nodes


def _check_truncation(m: int, trunc: TruncationSpec):
    if trunc.start_index != 1:
        raise InvalidParameter("trace-formula truncations must start at n = 1")
    if trunc.dim < 4 * m:
        raise InvalidParameter(f"truncation dim {trunc.dim} is below 4m = {4 * m}")


def _check_contour(params: GribovParams, m: int, spec: ContourSpec):
    lo = params.lambda_pp * eigenvalue_G(m)
    hi = params.lambda_pp * eigenvalue_G(m + 1)
    if not lo < spec.radius < hi:
        raise InvalidParameter(
            f"radius {spec.radius} must lie strictly between {lo} and {hi} for m = {m}")


def _resolve(params, m, trunc, spec):
    params.require_positive_coupling()
    if trunc is None:
        trunc = DEFAULT_POLICY.spec_for(m)
    if spec is None:
        spec = contour_for(params, m)
    _check_truncation(m, trunc)
    _check_contour(params, m, spec)
    return trunc, spec


def correction_terms(params: GribovParams, m: int, j_max: int,
                     spec: ContourSpec | None = None, trunc: TruncationSpec | None = None,
                     quad_tol: float = QUAD_TOL) -> tuple[CorrectionTerm, ...]:
    """Contour integrals of orders ``j = 1 .. j_max`` in one pass over the nodes.

    Each value is checked against the same rule on every other node; a
    change larger than ``quad_tol * (1 + |value|)`` raises
    :class:`QuadratureNotConverged`.
    """
    if int(j_max) != j_max or not 1 <= j_max <= 8:
        raise InvalidParameter(f"j_max must be an integer in 1..8, got {j_max}")
    trunc, spec = _resolve(params, m, trunc, spec)
    sigma, weight = contour_nodes(spec)
    poles = params.lambda_pp * g_eigenvalues(trunc.indices).astype(float)
    gaps = poles[None, :] - sigma[:, None]
    if np.min(np.abs(gaps)) < 1e-12 * (1.0 + spec.radius):
        raise PoleCollision("a contour node coincides with an eigenvalue of lambda'' G")
    r0 = 1.0 / gaps

    # K = H_{mu,lambda} R0: K[n,n] = mu n r_n, K[n,n+1] = h_n r_{n+1}, K[n+1,n] = h_n r_n
    h = build_perturbation(params, trunc)
    n = trunc.dim
    up = np.zeros_like(r0)
    lo = np.zeros_like(r0)
    up[:, :-1] = h.off[None, :] * r0[:, 1:]
    lo[:, 1:] = h.off[None, :] * r0[:, :-1]
    k_mat = Banded({-1: lo, 0: h.diag[None, :] * r0, 1: up}, n)

    terms = []
    power = k_mat
    for j in range(1, int(j_max) + 1):
        if j > 1:
            power = power @ k_mat
        integrand = ((-1) ** (j - 1) / j) * power.trace()
        full = csum(weight * integrand)
        half = csum(2.0 * weight[0::2] * integrand[0::2])
        err = abs(full - half)
        if err > quad_tol * (1.0 + abs(full)):
            raise QuadratureNotConverged(
                f"order {j} at m={m}: node doubling {spec.nodes // 2}->{spec.nodes} changed the "
                f"integral by {err:.3e}")
        terms.append(CorrectionTerm(order_j=j, value=complex(full), quad_error_estimate=float(err)))
    return tuple(terms)


def correction_integral(params: GribovParams, m: int, j: int,
                        spec: ContourSpec | None = None, trunc: TruncationSpec | None = None,
                        quad_tol: float = QUAD_TOL) -> CorrectionTerm:
    """``(1/2 pi i) oint ((-1)^{j-1}/j) Tr[(H_{mu,lambda} R0)^j] dsigma`` over ``gamma_m``."""
    return correction_terms(params, m, j, spec=spec, trunc=trunc, quad_tol=quad_tol)[-1]


def second_order_boundary_pair(params: GribovParams, m: int) -> float:
    """Closed form of the order-2 correction, ``-lambda^2 m (m+1) / (3 lambda'' (m-1))``.

    ``Tr[(H R0)^2]`` is a sum of ``r_n^2`` terms (double poles, no residue)
    and ``2 h_{n,n+1}^2 r_n r_{n+1}`` terms.  A product ``r_n r_{n+1}`` has
    nonzero total residue only when exactly one pole lies inside the circle,
    which for a tridiagonal perturbation happens only for the pair
    ``(m, m+1)``; that residue is ``-1/(lambda''(lambda_{m+1} - lambda_m))``
    with ``lambda_{m+1} - lambda_m = 3m(m-1)`` and
    ``h_{m,m+1}^2 = -lambda^2 m^2 (m+1)``.
    """
    radius_sequence(params, m)
    lam = params.lambda_
    return -lam * lam * m * (m + 1) / (3.0 * params.lambda_pp * (m - 1))


def eigen_offsets(params: GribovParams, m: int, trunc: TruncationSpec | None = None,
                  tol: float = DEFAULT_TOL, nodes_radius: float | None = None):
    """Certified offsets ``sigma_k - lambda'' lambda_k`` for the eigenvalues inside ``gamma_m``.

    Returns ``(offsets, counts, sigmas, max_residual)``.  Eigenvalues come
    from the dense QR solver; each one inside the circle is paired by sorted
    real part with ``k = 1 .. m`` and then re-solved on ``H - lambda'' lambda_k I``
    (cubic differences taken in integers), which resolves the O(1) offset
    to full relative precision instead of ``eps * lambda_N``.
    """
    params.require_positive_coupling()
    if trunc is None:
        trunc = DEFAULT_POLICY.spec_for(m)
    _check_truncation(m, trunc)
    radius = radius_sequence(params, m) if nodes_radius is None else float(nodes_radius)

    spectrum = eigenvalues(build_full_operator(params, trunc), tol=tol)
    vals = spectrum.values
    clearance = np.min(np.abs(np.abs(vals) - radius))
    if clearance < CONTOUR_CLEARANCE * radius:
        raise PoleCollision(
            f"an eigenvalue of the truncated H lies within {clearance:.3e} of the circle r={radius}")
    inside = vals[np.abs(vals) < radius]
    poles = params.lambda_pp * g_eigenvalues(trunc.indices).astype(float)
    count_g = int(np.count_nonzero(poles < radius))
    counts = (int(inside.size), count_g)
    if counts[0] != counts[1]:
        raise CountMismatch(
            f"m={m}: {counts[0]} eigenvalues of H but {counts[1]} of lambda'' G inside the circle")

    offsets = np.empty(inside.size, dtype=complex)
    max_res = float(spectrum.residuals.max()) if spectrum.residuals.size else 0.0
    for k, sigma_k in enumerate(inside, start=1):
        shift = params.lambda_pp * eigenvalue_G(k)
        shifted = build_shifted_operator(params, trunc, k)
        guess = sigma_k - shift
        value, res, _ = refine_eigenvalue(shifted, guess)
        others = np.delete(vals, np.flatnonzero(vals == sigma_k)[:1]) - shift
        separation = np.min(np.abs(others - guess)) if others.size else np.inf
        # degenerate clusters have zero separation; allow drift at the solver tolerance
        if abs(value - guess) > max(0.25 * separation, tol * shifted.inf_norm()):
            raise NoConvergence(
                f"refinement of sigma_{k} drifted from {guess} to {value} (separation {separation:.3e})")
        offsets[k - 1] = value
        max_res = max(max_res, res)
    sigmas = tuple(complex(params.lambda_pp * eigenvalue_G(k) + d) for k, d in enumerate(offsets, 1))
    return offsets, counts, sigmas, max_res


def partial_trace_sum(params: GribovParams, m: int, trunc: TruncationSpec | None = None,
                      tol: float = DEFAULT_TOL) -> complex:
    """``sum_{k<=m} (sigma_k - lambda'' lambda_k)`` after checking the inside counts agree."""
    offsets, _, _, _ = eigen_offsets(params, m, trunc=trunc, tol=tol)
    return complex(csum(offsets))


def regularized_residual(params: GribovParams, m: int, j_max: int = 4,
                         trunc: TruncationSpec | None = None, spec: ContourSpec | None = None,
                         tol: float = DEFAULT_TOL, quad_tol: float = QUAD_TOL) -> TraceReport:
    """Partial eigenvalue sum plus corrections of orders ``1 .. j_max`` on ``gamma_m``.

    The report records the residual; whether it tends to zero along the
    sequence of m is left to the caller.
    """
    if int(j_max) != j_max or not 1 <= j_max <= 6:
        raise InvalidParameter(f"j_max must be an integer in 1..6, got {j_max}")
    trunc, spec = _resolve(params, m, trunc, spec)
    offsets, counts, sigmas, max_res = eigen_offsets(params, m, trunc=trunc, tol=tol,
                                                     nodes_radius=spec.radius)
    partial = complex(csum(offsets))
    corrections = correction_terms(params, m, j_max, spec=spec, trunc=trunc, quad_tol=quad_tol)
    residual = partial
    for c in corrections:
        residual = residual + c.value
    return TraceReport(
        m_index=int(m),
        partial_sum=partial,
        corrections=corrections,
        residual=complex(residual),
        truncation_dim=trunc.dim,
        counts_inside=counts,
        radius=spec.radius,
        nodes=spec.nodes,
        eigenvalues=sigmas,
        max_eigen_residual=max_res,
    )


def correction_count_rule(delta: float, alpha: float) -> float:
    """Smallest integer ``l`` with ``l >= delta/alpha + 1``.

    Admissible inputs are ``1/2 <= delta < 2/3`` and ``0 <= alpha < 2/3 - delta``.
    ``alpha = 0`` gives no finite count and returns ``math.inf``.
    """
    if not 0.5 <= delta < 2.0 / 3.0:
        raise DomainError(f"delta must lie in [1/2, 2/3), got {delta}")
    if not 0.0 <= alpha < 2.0 / 3.0 - delta:
        raise DomainError(f"alpha must lie in [0, 2/3 - delta) = [0, {2.0 / 3.0 - delta:.6g}), got {alpha}")
    if alpha == 0:
        return math.inf
    # exact rational arithmetic on the decimal inputs, so 0.6/0.05 is exactly 12
    bound = Fraction(repr(float(delta))) / Fraction(repr(float(alpha))) + 1
    return int(math.ceil(bound))


def minimal_correction_count(grid: int = 400) -> dict:
    """Minimum of :func:`correction_count_rule` over the admissible (delta, alpha) window.

    ``delta/alpha + 1`` decreases as ``alpha`` approaches its supremum
    ``2/3 - delta`` and increases with ``delta``, so the infimum ``4`` is
    approached as ``(delta, alpha) -> (1/2, 1/6)`` without being attained
    and the smallest admissible integer count is 5.  The grid scan checks
    this numerically.
    """
    best = math.inf
    witness = None
    deltas = 0.5 + (2.0 / 3.0 - 0.5) * np.arange(grid) / grid
    for delta in deltas:
        sup_alpha = 2.0 / 3.0 - delta
        for frac in (1 - np.logspace(-1, -12, 24)):
            alpha = sup_alpha * frac
            l_count = correction_count_rule(float(delta), float(alpha))
            if l_count < best:
                best, witness = l_count, (float(delta), float(alpha))
    infimum = 0.5 / (2.0 / 3.0 - 0.5) + 1.0
    return {"minimal_count": best, "witness": witness, "infimum_of_bound": infimum}
