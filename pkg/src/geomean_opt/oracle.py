"""Ground-truth estimators for the sphere optimum at desk scale.

`local_max_sphere` is the workhorse: multistart Riemannian gradient ascent on
the log objective.  It reports a lower bound on the optimum only; no claim of
global optimality is made anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, UnsupportedDimension
from .fields import Field, sample_sphere_uniform
from .instances import GraphSpec, ProblemInstance, evaluate, evaluate_batch, maxcut_quadratic

GRAD_TOL = 1e-10  # relative Riemannian gradient threshold
MAX_STEPS = 10_000
CUBE_GUARD = 24


@dataclass(frozen=True)
class OracleResult:
    best_value: float
    best_vector: np.ndarray
    restarts: int
    converged_fraction: float
    degenerate: bool = False


def _ascend(inst: ProblemInstance, x0: np.ndarray, fstack: np.ndarray):
    """Riemannian ascent of sum_i log <x, A_i x> on the unit sphere.

    Euclidean gradient 2 sum_i A_i x / <x, A_i x>, projected onto the tangent
    space; retraction by normalization; Armijo backtracking.
    """

    def objective(pt):
        ax = fstack @ pt  # (d, n)
        vals = np.einsum("j,dj->d", pt.conj(), ax).real
        if np.any(vals <= 0.0):
            return None, None
        return float(np.sum(np.log(vals))), ax / vals[:, None]

    x = np.array(x0)
    h, axv = objective(x)
    if h is None:
        return None
    step = 1.0
    converged = False
    h_mark = h
    for it in range(1, MAX_STEPS + 1):
        egrad = 2.0 * np.sum(axv, axis=0)
        rgrad = egrad - np.real(np.vdot(x, egrad)) * x
        gnorm = float(np.linalg.norm(rgrad))
        if gnorm <= GRAD_TOL * (1.0 + abs(h)):
            converged = True
            break
        t = step
        improved = False
        for _ in range(50):
            cand = x + t * rgrad
            cand = cand / np.linalg.norm(cand)
            ch, caxv = objective(cand)
            if ch is not None and ch >= h + 0.1 * t * gnorm * gnorm:
                x, h, axv = cand, ch, caxv
                step = min(t * 2.0, 1e3)
                improved = True
                break
            t *= 0.5
        if not improved:
            converged = gnorm <= 1e-6 * (1.0 + abs(h))
            break
        if it % 25 == 0:
            # progress below float resolution counts as stationary
            if h - h_mark <= 1e-13 * (1.0 + abs(h)):
                converged = True
                break
            h_mark = h
    return x, h, converged


def local_max_sphere(
    inst: ProblemInstance,
    restarts: int,
    rng: np.random.Generator,
    extra_starts=(),
) -> OracleResult:
    """Best local maximum of the geometric-mean objective over many starts.

    Starts are uniform sphere draws plus any caller-provided vectors (for
    example rounding outputs).  Returns the best point found, the fraction of
    starts that reached the gradient threshold, and a degeneracy flag when no
    start produced a finite objective.
    """
    if restarts < 1:
        raise InvalidInput("need at least one restart")
    starts = [sample_sphere_uniform(inst.n, inst.field, rng) for _ in range(restarts)]
    for v in extra_starts:
        v = np.asarray(v, dtype=inst.field.dtype)
        starts.append(v / np.linalg.norm(v))
    fstack = np.array(inst.forms)
    best_x = None
    best_val = -math.inf
    n_conv = 0
    attempted = 0
    for x0 in starts:
        attempted += 1
        res = _ascend(inst, x0, fstack)
        if res is None:
            continue
        x, _, conv = res
        n_conv += int(conv)
        val = evaluate(inst, x)
        if val > best_val:
            best_val, best_x = val, x
    if best_x is None:
        # every start hit a zero form value; report the best raw start
        vals = [evaluate(inst, s) for s in starts]
        i = int(np.argmax(vals))
        return OracleResult(
            best_value=float(vals[i]),
            best_vector=starts[i],
            restarts=attempted,
            converged_fraction=0.0,
            degenerate=True,
        )
    return OracleResult(
        best_value=float(best_val),
        best_vector=best_x,
        restarts=attempted,
        converged_fraction=n_conv / attempted,
    )


def grid_max_sphere(inst: ProblemInstance, resolution: int) -> float:
    """Exhaustive lower bound over an equal-area grid.

    Supports real dimensions up to 3 and complex dimension up to 2 (where the
    phase quotient reduces the search to an ordinary 2-sphere).
    """
    if resolution < 16:
        raise InvalidInput("resolution must be >= 16")
    n, field = inst.n, inst.field
    if field is Field.REAL and n == 1:
        return max(evaluate(inst, np.array([1.0])), evaluate(inst, np.array([-1.0])))
    if field is Field.REAL and n == 2:
        theta = np.linspace(0.0, 2 * np.pi, 2 * resolution, endpoint=False)
        xs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return float(np.max(evaluate_batch(inst, xs)))
    if field is Field.COMPLEX and n == 1:
        return evaluate(inst, np.array([1.0 + 0.0j]))
    if (field is Field.REAL and n == 3) or (field is Field.COMPLEX and n == 2):
        z = (2.0 * np.arange(resolution) + 1.0) / resolution - 1.0
        theta = 2 * np.pi * np.arange(2 * resolution) / (2 * resolution)
        zz, tt = np.meshgrid(z, theta, indexing="ij")
        r = np.sqrt(np.clip(1.0 - zz**2, 0.0, None))
        if field is Field.REAL:
            xs = np.stack([r * np.cos(tt), r * np.sin(tt), zz], axis=-1).reshape(-1, 3)
        else:
            # Hopf parametrization: the objective is phase invariant, so the
            # complex projective line is an ordinary sphere
            half = np.arccos(np.clip(zz, -1.0, 1.0)) / 2.0
            xs = np.stack(
                [np.cos(half) + 0.0j, np.sin(half) * np.exp(1j * tt)], axis=-1
            ).reshape(-1, 2)
        return float(np.max(evaluate_batch(inst, xs)))
    raise UnsupportedDimension(f"grid search not supported for {field.value} dimension {n}")


def cube_max(g: GraphSpec) -> float:
    """Exact maximum of the cut quadratic over the scaled sign cube.

    For a 3-regular graph the quadratic value at a sign vector equals
    2 * cut(s) / (3n), so the enumeration reduces to integer cut counting
    and the returned value is exact.
    """
    if g.n > CUBE_GUARD:
        raise UnsupportedDimension(f"cube enumeration guarded at n <= {CUBE_GUARD}")
    maxcut_quadratic(g)  # validates 3-regularity
    n = g.n
    edges = np.array(g.edges)
    best = 0
    for mask in range(1 << (n - 1)):
        s = np.ones(n, dtype=np.int64)
        for b in range(n - 1):
            if mask >> b & 1:
                s[b + 1] = -1
        cut = int(np.sum(s[edges[:, 0]] != s[edges[:, 1]]))
        if cut > best:
            best = cut
    return 2.0 * best / (3.0 * n)
