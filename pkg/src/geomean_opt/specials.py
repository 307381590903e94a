"""Closed-form constants driving the rounding analysis.

Everything here is scalar analysis: the digamma function, the rank-dependent
expected-log-loss constants of Gaussian rounding, expected logarithms of
generalized chi-squared variables, monomial maxima on the sphere, and the
classical two-form eigenvalue bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DomainError, FormulaSingular
from .fields import Field

EULER_GAMMA = 0.57721566490153286060651209008240243

# Asymptotic expansion coefficients for psi(x) ~ log x - 1/(2x) - sum c_j / x^(2j),
# c_j = B_{2j} / (2j) for Bernoulli numbers B_{2j}.
_PSI_ASYMPT = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)


def digamma(x: float) -> float:
    """psi(x) = d/dx log Gamma(x) for x > 0, absolute error below 1e-12.

    Shifts the argument up by the recurrence psi(x+1) = psi(x) + 1/x until
    x >= 10, then applies an eight-term asymptotic expansion.
    """
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"digamma requires x > 0, got {x}")
    if math.isinf(x):
        return math.inf
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    p = inv2
    for c in _PSI_ASYMPT:
        tail += c * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - tail


def L_r(field: Field, r: int | float) -> float:
    """Expected log-norm loss of Gaussian rounding at rank r.

    Non-negative and increasing in r toward gamma + log 2 (real field) or
    gamma (complex field).  Identically zero at r = 1.
    """
    if r < 1:
        raise DomainError(f"rank must be >= 1, got {r}")
    if r == 1:
        return 0.0  # analytic identity; keep it exact
    if field is Field.REAL:
        return EULER_GAMMA + math.log(2.0) + digamma(r / 2.0) - math.log(r / 2.0)
    return EULER_GAMMA + digamma(r) - math.log(r)


def approx_factor_limit(field: Field) -> float:
    """Worst-case (rank -> infinity) multiplicative rounding factor e^{-sup L_r}."""
    return math.exp(-(EULER_GAMMA + math.log(2.0))) if field is Field.REAL else math.exp(-EULER_GAMMA)


@dataclass(frozen=True)
class EigenvalueProfile:
    """Positive weights of a generalized chi-squared Z = sum_i lambda_i |z_i|^2.

    Groups of equal weights (relative tolerance 1e-9) are detected at
    construction; the grouping drives the choice of closed form.
    """

    lambdas: tuple
    groups: tuple = dc_field(init=False)

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        if not lam:
            raise DomainError("profile must contain at least one weight")
        if any(not v > 0.0 for v in lam):
            raise DomainError(f"weights must be positive, got {lam}")
        object.__setattr__(self, "lambdas", lam)
        groups = []
        for v in sorted(lam, reverse=True):
            if groups and abs(v - groups[-1][0]) <= 1e-9 * abs(groups[-1][0]):
                groups[-1][1] += 1
            else:
                groups.append([v, 1])
        object.__setattr__(self, "groups", tuple((v, c) for v, c in groups))


def _expected_log_distinct(lam: np.ndarray) -> float:
    """Ratio-of-Vandermonde form for pairwise distinct weights.

    E[log Z] = -gamma + sum_i lambda_i^{n-1} log lambda_i / prod_{j != i}(lambda_i - lambda_j),
    evaluated with log-magnitude/sign bookkeeping for the pairwise products.
    """
    n = lam.size
    if n == 1:
        return -EULER_GAMMA + math.log(lam[0])
    total = 0.0
    for i in range(n):
        diffs = lam[i] - np.delete(lam, i)
        sign = float(np.prod(np.sign(diffs)))
        log_den = float(np.sum(np.log(np.abs(diffs))))
        log_num = (n - 1) * math.log(lam[i])
        total += sign * math.exp(log_num - log_den) * math.log(lam[i])
    return -EULER_GAMMA + total


def _expected_log_two_block(lam: float, eps: float, n: int) -> float:
    """Closed form for the profile (lam, eps, ..., eps) with n - 1 copies of eps."""
    d = lam - eps
    first = lam ** (n - 1) * (-EULER_GAMMA + math.log(lam)) / d ** (n - 1)
    tail = 0.0
    for ell in range(1, n):
        tail += eps * lam ** (ell - 1) * (math.log(eps) + digamma(n - ell)) / d**ell
    return first - tail


def expected_log_genchisq(profile: EigenvalueProfile, *, _jitter: float = 1e-7) -> float:
    """E[log sum_i lambda_i |z_i|^2] for i.i.d. standard complex Gaussians z_i.

    Dispatches on the multiplicity structure: all weights equal (gamma-variable
    expectation), all distinct (Vandermonde ratio), one weight against n-1
    equal ones (two-block closed form).  Any other repetition pattern is
    resolved by a deterministic relative jitter of the tied weights followed
    by the distinct formula, with the jitter halved once to confirm stability.
    """
    lam = np.array(profile.lambdas, dtype=np.float64)
    n = lam.size
    groups = profile.groups
    if len(groups) == 1:
        return digamma(n) + math.log(groups[0][0])
    if all(c == 1 for _, c in groups):
        return _expected_log_distinct(lam)
    if len(groups) == 2 and (groups[0][1] == 1 or groups[1][1] == 1) and n >= 2:
        if groups[0][1] == 1:
            single, rep = groups[0][0], groups[1][0]
        else:
            single, rep = groups[1][0], groups[0][0]
        return _expected_log_two_block(single, rep, n)
    # general repetition: spread each tied group multiplicatively and retry
    def jittered(j: float) -> float:
        out = []
        for v, c in groups:
            if c == 1:
                out.append(v)
            else:
                out.extend(v * (1.0 + j * (t - (c - 1) / 2.0)) for t in range(c))
        return _expected_log_distinct(np.array(sorted(out, reverse=True)))

    coarse = jittered(_jitter)
    fine = jittered(_jitter / 2.0)
    if not math.isfinite(fine) or abs(fine - coarse) > 1e-4 * max(1.0, abs(fine)):
        raise DomainError("jittered evaluation did not stabilize; weights too clustered")
    return fine


def C_nk(n: int, k: int) -> float:
    """Rounding-loss constant of the level-k hierarchy under exactness.

    Equals gamma plus the expected log of the two-block profile with one
    weight k/(k+n-1) and n-1 weights sharing the remaining mass.  Decreasing
    in k, bounded above by the complex rank-n loss constant, and tending to
    zero as k grows.
    """
    if n < 1 or k < 1:
        raise DomainError(f"need n, k >= 1, got n={n}, k={k}")
    if n == 1:
        return 0.0
    if k == 1:
        raise FormulaSingular(
            "level k = 1 makes the two-block weights coincide; the closed form is singular"
        )
    top = k / (k + n - 1)
    eps = (n - 1) / (k + n - 1)
    return EULER_GAMMA + _expected_log_two_block(top, eps / (n - 1), n)


def monomial_max(beta) -> float:
    """Maximum of (x^beta)^(2/d) over the unit sphere, d = sum(beta); 0^0 = 1."""
    b = [int(v) for v in beta]
    if any(v < 0 for v in b):
        raise DomainError(f"exponents must be non-negative, got {beta}")
    d = sum(b)
    if d < 1:
        raise DomainError("total degree must be >= 1")
    log_prod = sum(v * math.log(v) for v in b if v > 0)
    return math.exp(log_prod / d) / d


def kantorovich_bound(lambda_max: float, lambda_min: float) -> float:
    """Classical bound (1/4)(sqrt(l1/ln) + sqrt(ln/l1))^2 on the two-form product."""
    if not (lambda_max > 0 and lambda_min > 0):
        raise DomainError("eigenvalues must be positive")
    if lambda_max < lambda_min:
        raise DomainError("lambda_max must dominate lambda_min")
    r = math.sqrt(lambda_max / lambda_min)
    return 0.25 * (r + 1.0 / r) ** 2
