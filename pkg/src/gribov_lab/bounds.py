"""Numerical checks of the inequalities and growth estimates behind the trace formula.

Every check returns a :class:`BoundReport`.  Infinite sums are cut at a
finite index and an analytic upper bound for the discarded tail is stored in
``extras["tail_bound"]``, so a bounded sweep stays bounded after the tail is
added back.  Constants that the estimates leave unspecified are measured and
reported; nothing is asserted against a particular numeric value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bargmann import (
    DimPolicy,
    GribovParams,
    TruncationSpec,
    build_perturbation,
    g_eigenvalues,
)
from .errors import DomainError, InvalidParameter
from .linalg import csum, singular_values

__all__ = [
    "BoundParams",
    "BoundReport",
    "PASS_SLACK",
    "check_interpolation_inequality",
    "interpolation_ratio",
    "gap_bound_scan",
    "separation_scan",
    "resolvent_sum",
    "resolvent_sum_sweep",
    "trace_norm_on_circle",
    "trace_norm_sweep",
    "subordination_ratios",
    "subordination_constant",
    "relative_bound_check",
    "eta_sequence",
    "nuclear_norm_at",
    "nuclear_decay_fit",
    "carleman_diagnostic",
    "cubic_growth_constants",
]

PASS_SLACK = 1e-10
INTERPOLATION_SLACK = 1e-12
DEFAULT_SEED = 12345


@dataclass(frozen=True)
class BoundParams:
    """Exponents and slack shared by the estimates.

    ``delta`` must lie in ``[1/2, 2/3)``, ``alpha`` in ``[0, 2/3 - delta)``,
    ``beta`` in ``[3, 4)`` and ``epsilon`` must be positive.
    """

    delta: float = 0.5
    alpha: float = 0.1
    beta: float = 3.0
    epsilon: float = 0.1

    def __post_init__(self):
        check_delta_alpha(self.delta, self.alpha)
        if not 3.0 <= self.beta < 4.0:
            raise DomainError(f"beta must lie in [3, 4), got {self.beta}")
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")


@dataclass
class BoundReport:
    """Outcome of one bound check.

    ``max_ratio`` is the worst observed value of the checked quantity (a
    LHS/RHS ratio where the estimate has that form, otherwise the supremum
    of the swept quantity) and ``arg_max`` is the input where it occurs.
    """

    name: str
    max_ratio: float
    arg_max: object
    sample_count: int
    sequence_points: list = field(default_factory=list)
    fitted_slope: float | None = None
    constant: float | None = None
    passed: bool = False
    seed: int | None = None
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "max_ratio": self.max_ratio,
            "arg_max": self.arg_max,
            "sample_count": self.sample_count,
            "sequence_points": [list(p) for p in self.sequence_points],
            "fitted_slope": self.fitted_slope,
            "constant": self.constant,
            "passed": bool(self.passed),
            "seed": self.seed,
            "extras": self.extras,
        }


def check_delta_alpha(delta: float, alpha: float):
    if not 0.5 <= delta < 2.0 / 3.0:
        raise DomainError(f"delta must lie in [1/2, 2/3), got {delta}")
    if not 0.0 <= alpha < 2.0 / 3.0 - delta:
        raise DomainError(f"alpha must lie in [0, 2/3 - delta), got {alpha}")


def _lam(n) -> np.ndarray:
    return g_eigenvalues(n).astype(float)


# ---------------------------------------------------------------------------
# scalar interpolation inequality


def interpolation_ratio(a, b, delta, eps) -> np.ndarray:
    """``|a^delta b^eps (a^s - b^s) / (a - b)|`` with ``s = 1 - delta - eps``.

    Written as ``exp(-eps t) expm1(-s t) / expm1(-t)`` with ``t = log(a/b) > 0``
    (roles of ``delta`` and ``eps`` swap when ``b > a``)
    so that nearly equal ``a, b`` and widely separated magnitudes are both
    evaluated without cancellation.
    """
    a, b, delta, eps = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, delta, eps)))
    if np.any(a <= 0) or np.any(b <= 0):
        raise DomainError("a and b must be positive")
    if np.any(a == b):
        raise DomainError("a and b must differ")
    s = 1.0 - delta - eps
    t = np.log(a) - np.log(b)
    # divide through by the larger of a, b; the exponent on the smaller one's ratio
    # is eps when a > b and delta when b > a
    t_abs = np.abs(t)
    lead = np.where(t > 0, eps, delta)
    return np.abs(np.exp(-lead * t_abs) * np.expm1(-s * t_abs) / np.expm1(-t_abs))


def check_interpolation_inequality(samples: int = 100_000, seed: int = DEFAULT_SEED,
                                   log_range: float = 20.0) -> BoundReport:
    """Random search for violations of ``|a^d b^e (a^s - b^s)/(a - b)| <= 1``.

    ``a, b`` are log-uniform on ``[e^-L, e^L]`` and ``(delta, eps)`` uniform
    on the triangle ``delta, eps >= 0, delta + eps <= 1``.
    """
    if int(samples) != samples or samples < 1:
        raise InvalidParameter(f"samples must be a positive integer, got {samples}")
    rng = np.random.default_rng(seed)
    a = np.exp(rng.uniform(-log_range, log_range, samples))
    b = np.exp(rng.uniform(-log_range, log_range, samples))
    b = np.where(a == b, b * 2.0, b)
    u, v = rng.uniform(size=(2, samples))
    fold = u + v > 1.0
    delta = np.where(fold, 1.0 - u, u)
    eps = np.where(fold, 1.0 - v, v)
    ratio = interpolation_ratio(a, b, delta, eps)
    k = int(np.argmax(ratio))
    worst = float(ratio[k])
    return BoundReport(
        name="interpolation_inequality",
        max_ratio=worst,
        arg_max={"a": float(a[k]), "b": float(b[k]), "delta": float(delta[k]), "eps": float(eps[k])},
        sample_count=int(samples),
        passed=worst <= 1.0 + INTERPOLATION_SLACK,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# eigenvalue gaps of G


def gap_bound_scan(n_max: int = 10_000) -> BoundReport:
    """``(lambda_{n+1} - lambda_n) / n^2`` for ``2 <= n <= n_max``.

    The gap is ``3n(n-1)``, so the ratio is ``3(1 - 1/n)``; the identity is
    checked in exact integer arithmetic and the infimum (attained at n = 2)
    is reported as the constant.
    """
    if n_max < 10:
        raise InvalidParameter(f"n_max must be >= 10, got {n_max}")
    n = np.arange(2, n_max + 1, dtype=np.int64)
    gap = g_eigenvalues(n + 1) - g_eigenvalues(n)
    exact = bool(np.all(gap * n == 3 * (n - 1) * n * n))
    ratio = gap / (n.astype(float) ** 2)
    k = int(np.argmin(ratio))
    return BoundReport(
        name="gap_bound",
        max_ratio=float(ratio.max()),
        arg_max=int(n[k]),
        sample_count=int(n.size),
        constant=float(ratio[k]),
        passed=exact and ratio[k] > 0,
        extras={"closed_form_exact": exact, "ratio_at_n_max": float(ratio[-1])},
    )


def separation_scan(n_max: int = 500, epsilon: float = 0.1) -> BoundReport:
    """Minimum of ``|lambda_n - lambda_k| / min(n^3, k^3)`` over pairs with ``|n - k| >= epsilon k``.

    Indices start at 3 so that ``lambda_k > 0``.  ``sequence_points`` holds
    the running minimum as the scan limit doubles, to show it has settled.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n_max < 4:
        raise InvalidParameter(f"n_max must be >= 4, got {n_max}")
    idx = np.arange(3, n_max + 1, dtype=np.int64)
    lam = g_eigenvalues(idx)
    n = idx[:, None]
    k = idx[None, :]
    mask = np.abs(n - k) >= epsilon * k
    diff = np.abs(lam[:, None] - lam[None, :]).astype(float)
    cube = np.minimum(n, k).astype(float) ** 3
    ratio = np.where(mask, diff / cube, np.inf)
    flat = int(np.argmin(ratio))
    i, j = np.unravel_index(flat, ratio.shape)
    c_eps = float(ratio[i, j])
    points = []
    limit = 8
    while limit < n_max:
        sub = ratio[: limit - 2, : limit - 2]
        points.append((limit, float(sub.min())))
        limit *= 2
    points.append((int(n_max), c_eps))
    tail = [v for lim, v in points if lim >= n_max // 4]
    stable = (max(tail) - min(tail)) <= 0.05 * c_eps if tail else True
    return BoundReport(
        name="separation",
        max_ratio=c_eps,
        arg_max={"n": int(idx[i]), "n_m": int(idx[j])},
        sample_count=int(mask.sum()),
        sequence_points=points,
        constant=c_eps,
        passed=c_eps > 0 and stable,
        extras={"epsilon": epsilon, "stable": stable},
    )


# ---------------------------------------------------------------------------
# resolvent sums of G


def _inverse_cubic_tail(n_max: int) -> float:
    """``sum_{n > n_max} 2/lambda_n = 1/(n_max (n_max - 1))`` (telescoping)."""
    return 1.0 / (n_max * (n_max - 1))


def resolvent_sum(m: int, n_max: int = 1_000_000, lambda_pp: float = 1.0) -> BoundReport:
    """``sum_{n>=3} 1/|lambda'' lambda_n - sigma_m|`` with ``sigma_m = lambda''(lambda_m + lambda_{m+1})/2``.

    The sum is cut at ``n_max`` and ``sum_{n>n_max} 2/(lambda'' lambda_n)``
    is added as a rigorous tail bound (valid once ``lambda_n >= 2 sigma_m``).
    """
    if int(m) != m or m < 3:
        raise InvalidParameter(f"m must be an integer >= 3, got {m}")
    m = int(m)
    sigma = 0.5 * float(g_eigenvalues(m) + g_eigenvalues(m + 1))
    if n_max ** 3 < 2 * sigma * 8 or n_max <= m + 1:
        raise InvalidParameter(f"n_max={n_max} too small for the tail bound at m={m}")
    n = np.arange(3, n_max + 1, dtype=np.int64)
    terms = 1.0 / np.abs(_lam(n) - sigma)
    head = float(csum(terms)) / lambda_pp
    tail = _inverse_cubic_tail(n_max) / lambda_pp
    return BoundReport(
        name="resolvent_sum",
        max_ratio=head + tail,
        arg_max=m,
        sample_count=int(n.size),
        constant=head + tail,
        passed=math.isfinite(head + tail),
        extras={"partial_sum": head, "tail_bound": tail, "sigma": lambda_pp * sigma},
    )


def resolvent_sum_sweep(m_values=range(3, 201), n_max: int = 1_000_000) -> BoundReport:
    """Supremum of :func:`resolvent_sum` over a range of contour indices."""
    points = [(int(m), resolvent_sum(m, n_max).max_ratio) for m in m_values]
    m_star, sup = max(points, key=lambda p: p[1])
    return BoundReport(
        name="resolvent_sum_sweep",
        max_ratio=sup,
        arg_max=m_star,
        sample_count=len(points),
        sequence_points=points,
        constant=sup,
        passed=math.isfinite(sup),
        extras={"n_max": n_max, "tail_bound": _inverse_cubic_tail(n_max)},
    )


def trace_norm_on_circle(m: int, epsilon: float = 0.1, lambda_pp: float = 1.0,
                         sigma: complex | None = None, n_max: int = 200_000) -> BoundReport:
    """``||(lambda'' G - sigma)^{-1}||_1 = sum_n 1/|sigma - lambda'' lambda_n|`` on ``|sigma| = r_m``.

    Without an explicit ``sigma`` the supremum over the circle is taken,
    which sits at the positive real point ``sigma = r_m`` because every
    ``lambda_n`` is nonnegative.  The report's ``constant`` is
    ``m * ||.||_1``; ``epsilon`` only labels the constant.
    """
    if int(m) != m or m < 3:
        raise InvalidParameter(f"m must be an integer >= 3, got {m}")
    if not lambda_pp > 0:
        raise InvalidParameter(f"lambda_pp must be positive, got {lambda_pp}")
    m = int(m)
    radius = lambda_pp * 0.5 * float(g_eigenvalues(m) + g_eigenvalues(m + 1))
    sigma = radius if sigma is None else complex(sigma)
    n_max = max(n_max, 4 * m)
    n = np.arange(1, n_max + 1, dtype=np.int64)
    head = float(csum(1.0 / np.abs(sigma - lambda_pp * _lam(n))))
    tail = _inverse_cubic_tail(n_max) / lambda_pp
    norm = head + tail
    return BoundReport(
        name="trace_norm_on_circle",
        max_ratio=norm,
        arg_max=complex(sigma),
        sample_count=int(n.size),
        constant=m * norm,
        passed=math.isfinite(norm),
        extras={"radius": radius, "epsilon": epsilon, "partial_sum": head, "tail_bound": tail},
    )


def trace_norm_sweep(m_values=range(3, 301), epsilon: float = 0.1, n_max: int = 200_000) -> BoundReport:
    """Supremum of ``m ||(G - sigma)^{-1}||_1`` over ``|sigma| = r_m`` for a range of m."""
    points = [(int(m), trace_norm_on_circle(m, epsilon, n_max=n_max).constant) for m in m_values]
    m_star, sup = max(points, key=lambda p: p[1])
    return BoundReport(
        name="trace_norm_sweep",
        max_ratio=sup,
        arg_max=m_star,
        sample_count=len(points),
        sequence_points=points,
        constant=sup,
        passed=math.isfinite(sup),
        extras={"epsilon": epsilon},
    )


# ---------------------------------------------------------------------------
# subordination of H_{mu,lambda} to G + I


def _column_norms_sq(params: GribovParams, n: np.ndarray) -> np.ndarray:
    """``||H_{mu,lambda} e_n||^2 = mu^2 n^2 + lambda^2 ((n-1)^2 n + n^2 (n+1))``."""
    n = n.astype(float)
    lam2 = params.lambda_ ** 2
    return params.mu ** 2 * n * n + lam2 * ((n - 1) ** 2 * n + n * n * (n + 1))


def _random_vectors(rng, count: int, dim: int) -> np.ndarray:
    """Columns ``c_n = g_n / (n^2 + 1)`` with complex standard normal ``g_n``, normalised."""
    n = np.arange(1, dim + 1, dtype=float)[:, None]
    g = rng.standard_normal((dim, count)) + 1j * rng.standard_normal((dim, count))
    c = g / (n * n + 1.0)
    return c / np.linalg.norm(c, axis=0)


def subordination_ratios(params: GribovParams, n: np.ndarray) -> np.ndarray:
    """``||H e_n|| / ||(G+I) e_n||^{1/2}`` for basis vectors (``||e_n|| = 1``)."""
    n = np.asarray(n, dtype=np.int64)
    return np.sqrt(_column_norms_sq(params, n) / (_lam(n) + 1.0))


def subordination_constant(params: GribovParams, n_max: int = 10_000, random_trials: int = 200,
                           seed: int = DEFAULT_SEED, fit_window=(1_000, 10_000)) -> BoundReport:
    """Estimate of ``C`` in ``||H phi|| <= C ||(G+I) phi||^{1/2} ||phi||^{1/2}``.

    Basis vectors ``e_1 .. e_{n_max}`` use closed-form column norms.  Random
    vectors live on a truncation of ``n_max + 2`` states.  The squared ratio
    on ``e_n`` is regressed as ``a + b/n`` over ``fit_window`` and the
    intercept ``a`` is reported as the limit (expected ``2 lambda^2``).
    """
    n = np.arange(1, n_max + 1, dtype=np.int64)
    basis = subordination_ratios(params, n)
    k = int(np.argmax(basis))
    sup, witness = float(basis[k]), {"basis": int(n[k])}

    rng = np.random.default_rng(seed)
    if random_trials:
        dim = min(n_max + 2, 2_000)
        op = build_perturbation(params, TruncationSpec(dim))
        phi = _random_vectors(rng, random_trials, dim)
        g_plus = (_lam(np.arange(1, dim + 1)) + 1.0)[:, None] * phi
        hphi = op.matvec(phi)
        rand = np.linalg.norm(hphi, axis=0) / np.sqrt(np.linalg.norm(g_plus, axis=0))
        j = int(np.argmax(rand))
        if rand[j] > sup:
            sup, witness = float(rand[j]), {"random_trial": j}

    lo, hi = fit_window
    sel = (n >= lo) & (n <= hi)
    design = np.column_stack([np.ones(sel.sum()), 1.0 / n[sel]])
    coef, *_ = np.linalg.lstsq(design, basis[sel] ** 2, rcond=None)
    limit = float(coef[0])
    target = 2.0 * params.lambda_ ** 2
    rel = abs(limit - target) / target if target else abs(limit)

    points = [(int(c), float(basis[:c].max())) for c in sorted({10, 100, 1_000, n_max}) if c <= n_max]
    return BoundReport(
        name="subordination",
        max_ratio=sup,
        arg_max=witness,
        sample_count=int(n_max + random_trials),
        sequence_points=points,
        constant=sup,
        passed=math.isfinite(sup),
        seed=seed,
        extras={"squared_limit_fit": limit, "squared_limit_expected": target,
                "relative_deviation": rel, "fit_window": [lo, hi]},
    )


def relative_bound_check(params: GribovParams, beta: float = 3.0, epsilon_list=(1.0, 0.5, 0.1, 0.05),
                         n_max: int = 10_000, random_trials: int = 200,
                         seed: int = DEFAULT_SEED) -> BoundReport:
    """Smallest ``C_eps`` with ``||H phi|| <= eps ||(G+I) phi||^{2/beta} ||phi||^{1-2/beta} + C_eps ||phi||``.

    The sample set is ``e_1 .. e_{n_max}`` plus random decaying vectors.  For
    each ``eps`` the constant is also computed with the basis cut at
    ``n_max/2``; ``extras["stable"]`` records whether doubling the cutoff
    left every ``C_eps`` unchanged.  ``passed`` requires finite, stable
    constants with ``C_eps`` nonincreasing in ``eps``.
    """
    if not 3.0 <= beta < 4.0:
        raise DomainError(f"beta must lie in [3, 4), got {beta}")
    eps_arr = np.asarray(sorted(float(e) for e in epsilon_list), dtype=float)
    if eps_arr.size == 0 or np.any(eps_arr <= 0):
        raise DomainError("epsilon_list must contain positive values")
    expo = 2.0 / beta
    n = np.arange(1, n_max + 1, dtype=np.int64)
    h_norm = np.sqrt(_column_norms_sq(params, n))
    g_norm = _lam(n) + 1.0
    excess = h_norm[None, :] - eps_arr[:, None] * g_norm[None, :] ** expo
    c_full = np.maximum(0.0, excess.max(axis=1))
    c_half = np.maximum(0.0, excess[:, : n_max // 2].max(axis=1))
    witness = n[np.argmax(excess, axis=1)]

    rng = np.random.default_rng(seed)
    if random_trials:
        dim = min(n_max, 2_000)
        op = build_perturbation(params, TruncationSpec(dim))
        phi = _random_vectors(rng, random_trials, dim)
        gphi = np.linalg.norm((_lam(np.arange(1, dim + 1)) + 1.0)[:, None] * phi, axis=0)
        hphi = np.linalg.norm(op.matvec(phi), axis=0)
        rand = (hphi[None, :] - eps_arr[:, None] * gphi[None, :] ** expo).max(axis=1)
        c_full = np.maximum(c_full, rand)
        c_half = np.maximum(c_half, rand)

    stable = bool(np.allclose(c_full, c_half, rtol=1e-12, atol=0.0))
    monotone = bool(np.all(np.diff(c_full) <= 0))
    curve = [(float(e), float(c)) for e, c in zip(eps_arr, c_full)]
    return BoundReport(
        name="relative_bound",
        max_ratio=float(c_full.max()),
        arg_max={"epsilon": float(eps_arr[int(np.argmax(c_full))])},
        sample_count=int(n_max + random_trials),
        sequence_points=curve,
        constant=float(c_full.max()),
        passed=bool(np.all(np.isfinite(c_full))) and stable and monotone,
        seed=seed,
        extras={"beta": beta, "stable": stable, "nonincreasing_in_epsilon": monotone,
                "basis_witness": [int(w) for w in witness],
                "half_cutoff": [float(c) for c in c_half]},
    )


# ---------------------------------------------------------------------------
# nuclear decay along eta_m


def eta_sequence(m, delta: float, alpha: float) -> float:
    """``eta_m = [(lambda_m^s + lambda_{m+1}^s)/2]^{1/s}`` with ``s = 1 - delta - alpha``."""
    check_delta_alpha(delta, alpha)
    if int(m) != m or m < 3:
        raise InvalidParameter(f"m must be an integer >= 3, got {m}")
    s = 1.0 - delta - alpha
    lo, hi = float(g_eigenvalues(int(m))), float(g_eigenvalues(int(m) + 1))
    return (0.5 * (lo ** s + hi ** s)) ** (1.0 / s)


def nuclear_norm_at(params: GribovParams, sigma: complex, trunc: TruncationSpec) -> float:
    """Nuclear norm of the truncated ``H_{mu,lambda} (lambda'' G - sigma)^{-1}`` (dense SVD)."""
    op = build_perturbation(params, trunc)
    r0 = 1.0 / (params.lambda_pp * _lam(trunc.indices) - sigma)
    return float(np.sum(singular_values(op.to_dense() * r0[None, :])))


def _nuclear_tail_bound(params: GribovParams, sigma: float, dim: int, cut: int = 1_000_000) -> float:
    """Upper bound on the nuclear norm of the columns beyond ``dim``.

    ``||A||_1 <= sum_n ||A e_n||`` for the rank-one column decomposition.
    Columns up to ``cut`` are summed exactly; beyond it
    ``||H e_n|| <= (mu + 2 sqrt 2 |lambda|) n^{3/2}`` and
    ``lambda'' lambda_n - |sigma| >= lambda'' n^3 / 4`` give
    ``8 c / (lambda'' sqrt(cut))``.
    """
    n = np.arange(dim + 1, cut + 1, dtype=np.int64)
    denom = params.lambda_pp * _lam(n) - abs(sigma)
    if np.any(denom <= 0):
        return math.inf
    head = float(csum(np.sqrt(_column_norms_sq(params, n)) / denom))
    c = abs(params.mu) + 2.0 * math.sqrt(2.0) * abs(params.lambda_)
    return head + 8.0 * c / (params.lambda_pp * math.sqrt(cut))


def nuclear_decay_fit(params: GribovParams, delta: float = 0.5, alpha: float = 0.1,
                      m_list=range(10, 101), policy: DimPolicy = DimPolicy(4, 60),
                      with_tail: bool = False) -> BoundReport:
    """Log-log slope of ``||H_{mu,lambda}(lambda'' G - sigma)^{-1}||_1`` against ``eta_m`` at ``sigma = lambda'' eta_m``.

    ``sigma`` is taken on the positive real axis, the point of the circle
    closest to the spectrum.  PASS when the least-squares slope is at most
    ``-alpha``.
    """
    params.require_positive_coupling()
    check_delta_alpha(delta, alpha)
    points = []
    tails = []
    for m in m_list:
        eta = eta_sequence(m, delta, alpha)
        trunc = policy.spec_for(int(m))
        sigma = params.lambda_pp * eta
        points.append((int(m), eta, nuclear_norm_at(params, sigma, trunc)))
        if with_tail:
            tails.append(_nuclear_tail_bound(params, sigma, trunc.dim))
    log_eta = np.log([p[1] for p in points])
    log_norm = np.log([p[2] for p in points])
    slope, intercept = np.polyfit(log_eta, log_norm, 1)
    k = int(np.argmax([p[2] for p in points]))
    extras = {"delta": delta, "alpha": alpha, "intercept": float(intercept),
              "eta": [p[1] for p in points]}
    if with_tail:
        extras["tail_bound"] = tails
    return BoundReport(
        name="nuclear_decay",
        max_ratio=float(points[k][2]),
        arg_max=points[k][0],
        sample_count=len(points),
        sequence_points=[(p[0], p[2]) for p in points],
        fitted_slope=float(slope),
        passed=bool(slope <= -alpha),
        extras=extras,
    )


# ---------------------------------------------------------------------------
# Carleman class and cubic growth


def _carleman_tail(cut: int, p: float) -> float:
    """``sum_{n > cut} (lambda_n + 1)^{-p} <= (cut - 3)^{1-3p} / (3p - 1)`` using ``lambda_n >= (n-2)^3``."""
    if 3 * p <= 1:
        return math.inf
    return (cut - 3) ** (1.0 - 3.0 * p) / (3.0 * p - 1.0)


def carleman_diagnostic(p: float = 0.4, cuts=(10_000, 100_000, 1_000_000)) -> BoundReport:
    """Partial sums of ``sum_n s_n^p`` for ``(G + I)^{-1}`` with analytic tail enclosures.

    ``s_n = 1/(lambda_n + 1)``.  For each cut K the limit lies in
    ``[S(K), S(K) + tail(K)]``; the series is certified convergent when
    the tail bound is finite and the enclosures are nested and shrink.
    """
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    cuts = sorted(int(c) for c in cuts)
    n = np.arange(1, cuts[-1] + 1, dtype=np.int64)
    terms = (_lam(n) + 1.0) ** (-p)
    points = []
    for cut in cuts:
        s = float(csum(terms[:cut]))
        points.append((cut, s, s + _carleman_tail(cut, p)))
    finite = all(math.isfinite(hi) for _, _, hi in points)
    nested = finite and all(
        a[1] <= b[1] and b[2] <= a[2] + 1e-12 * a[2] for a, b in zip(points, points[1:]))
    widths = [hi - lo for _, lo, hi in points]
    return BoundReport(
        name="carleman",
        max_ratio=points[-1][2],
        arg_max=p,
        sample_count=cuts[-1],
        sequence_points=points,
        constant=points[-1][1],
        passed=bool(finite and nested and widths[-1] < widths[0]),
        extras={"p": p, "tail_bound": [_carleman_tail(c, p) for c in cuts]},
    )


def cubic_growth_constants(n_min: int = 3, n_max: int = 100_000) -> BoundReport:
    """Two-sided constants in ``c1 n^3 <= lambda_n <= c2 n^3`` measured over ``[n_min, n_max]``.

    ``lambda_n / n^3 = (1 - 1/n)(1 - 2/n)`` increases towards 1, so
    ``c1`` is attained at ``n_min`` (2/9 for ``n_min = 3``) and ``c2 = 1``
    is the supremum.
    """
    if n_min < 3:
        raise InvalidParameter("lambda_n vanishes for n < 3; use n_min >= 3")
    n = np.arange(n_min, n_max + 1, dtype=np.int64)
    ratio = _lam(n) / n.astype(float) ** 3
    c1, c2 = float(ratio.min()), float(ratio.max())
    return BoundReport(
        name="cubic_growth",
        max_ratio=c2,
        arg_max=int(n[int(np.argmax(ratio))]),
        sample_count=int(n.size),
        constant=c1,
        passed=c1 > 0 and c2 <= 1.0,
        extras={"c1": c1, "c2": c2, "c2_supremum": 1.0},
    )
