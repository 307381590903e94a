"""Spectral relaxation of the geometric-mean objective with a certified gap.

The relaxed problem maximizes F(X) = (1/d) sum_i log <A_i, X> over the
trace-one spectrahedron.  A feasible multiplier pair for the companion
minimization program turns any feasible X into a certified upper bound, so
solver accuracy is verifiable regardless of how X was produced.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInnerProduct, InvalidInput
from .fields import DensityMatrix, Field, eigh, gram_factor, project_spectrahedron, symmetrize
from .instances import ProblemInstance

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 50_000
CERT_EVERY = 50  # certificate cadence; each check costs one eigendecomposition
ARMIJO_SHRINK = 0.5
ARMIJO_SLOPE = 0.1
FLOOR_FACTOR = 1e-14  # reject steps with <A_i, X> below FLOOR_FACTOR * tr(A_i)


class ExactnessHint(enum.Enum):
    EXACT_D2 = "exact-d2"
    EXACT_COMMUTING = "exact-commuting"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolveReport:
    value: float  # exp(F(X)), geometric-mean scale, a lower bound on the relaxation
    upper_certificate: float  # certified upper bound from the multiplier program
    gap: float
    iterations: int
    multipliers: np.ndarray  # d positive reals with geometric mean 1
    solution: DensityMatrix
    converged: bool
    rank: int
    wall_time: float


def amgm_eigen_bound(inst: ProblemInstance) -> float:
    """Quick upper bound lambda_max(sum_i A_i) / d (geometric-mean scale)."""
    g = np.sum(inst.forms, axis=0)
    return float(eigh(g).eigenvalues[0]) / inst.d


def dual_certificate(inst: ProblemInstance, x: DensityMatrix | np.ndarray):
    """Feasible multipliers (lambda, alpha) built from a feasible X.

    alpha_i = gamma / <A_i, X> with gamma the geometric mean of the inner
    products, so prod(alpha) = 1, and lambda = lambda_max((1/d) sum alpha_i A_i)
    upper-bounds the relaxation value.
    """
    mat = x.mat if isinstance(x, DensityMatrix) else np.asarray(x)
    vals = np.array([float(np.real(np.trace(a @ mat))) for a in inst.forms])
    if np.any(vals <= 0.0):
        raise DegenerateInnerProduct(f"non-positive inner product: min is {vals.min():.3e}")
    gamma = float(np.exp(np.mean(np.log(vals))))
    alpha = gamma / vals
    weighted = np.tensordot(alpha, np.array(inst.forms), axes=1) / inst.d
    lam = float(eigh(symmetrize(weighted)).eigenvalues[0])
    return lam, alpha


def exactness_hint(inst: ProblemInstance) -> ExactnessHint:
    """Cheap structural test for cases where the relaxation is known exact."""
    if inst.d == 2 and inst.field is Field.REAL:
        return ExactnessHint.EXACT_D2
    scale = max(float(np.max(np.abs(a))) for a in inst.forms)
    for i in range(inst.d):
        for j in range(i + 1, inst.d):
            comm = inst.forms[i] @ inst.forms[j] - inst.forms[j] @ inst.forms[i]
            if float(np.max(np.abs(comm))) > 1e-10 * scale * scale:
                return ExactnessHint.UNKNOWN
    return ExactnessHint.EXACT_COMMUTING


def _inner_products(inst: ProblemInstance, mat: np.ndarray) -> np.ndarray:
    return np.array([float(np.real(np.trace(a @ mat))) for a in inst.forms])


def solve_optsdp(
    inst: ProblemInstance,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolveReport:
    """Projected gradient ascent on the log objective with Armijo backtracking.

    Starts from X = I/n, projects trial points back onto the spectrahedron,
    and stops once the certified duality gap drops below tol * value.  The
    returned report satisfies value <= relaxation optimum <= upper_certificate.
    """
    if not tol > 0:
        raise InvalidInput("tol must be positive")
    t0 = time.perf_counter()
    n, d = inst.n, inst.d
    forms = np.array(inst.forms)
    floors = FLOOR_FACTOR * np.array([float(np.real(np.trace(a))) for a in inst.forms])

    x = np.eye(n, dtype=inst.field.dtype) / n
    vals = _inner_products(inst, x)
    if np.any(vals <= floors):
        raise DegenerateInnerProduct("a form is numerically zero against I/n")
    fval = float(np.mean(np.log(vals)))

    step = 1.0
    best_lam = np.inf
    best_alpha = np.ones(d)
    iterations = 0
    converged = False

    def certify(mat, f_now):
        nonlocal best_lam, best_alpha
        lam, alpha = dual_certificate(inst, mat)
        if lam < best_lam:
            best_lam, best_alpha = lam, alpha
        return best_lam - np.exp(f_now) <= tol * np.exp(f_now)

    if certify(x, fval):
        converged = True
    while not converged and iterations < max_iter:
        iterations += 1
        grad = np.tensordot(1.0 / vals, forms, axes=1) / d
        grad = symmetrize(grad)
        accepted = False
        t = step
        for _ in range(60):
            cand = project_spectrahedron(x + t * grad, inst.field).mat
            cvals = _inner_products(inst, cand)
            if np.all(cvals > floors):
                cf = float(np.mean(np.log(cvals)))
                slope = float(np.real(np.trace(grad.conj().T @ (cand - x))))
                if cf >= fval + ARMIJO_SLOPE * slope and cf >= fval:
                    accepted = True
                    break
            t *= ARMIJO_SHRINK
        if not accepted:
            # no ascent direction left at machine precision; certify and stop
            converged = certify(x, fval)
            break
        x, vals, fval = cand, cvals, cf
        step = min(t * 2.0, 1e6)
        if iterations % CERT_EVERY == 0:
            converged = certify(x, fval)

    if not converged:
        converged = certify(x, fval)

    value = float(np.exp(fval))
    density = DensityMatrix(x, inst.field)
    _, rank = gram_factor(x, inst.field)
    return SolveReport(
        value=value,
        upper_certificate=float(best_lam),
        gap=float(best_lam) - value,
        iterations=iterations,
        multipliers=best_alpha,
        solution=density,
        converged=bool(converged),
        rank=rank,
        wall_time=time.perf_counter() - t0,
    )
