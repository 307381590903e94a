"""Gaussian rounding of relaxation solutions and its guarantee accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .fields import DensityMatrix, Field, gram_factor, sample_standard
from .instances import ProblemInstance, evaluate, evaluate_batch
from .specials import L_r


@dataclass(frozen=True)
class RoundingOutcome:
    best_vector: np.ndarray  # unit vector
    best_value: float
    empirical_mean: float
    empirical_stderr: float
    samples_used: int
    skipped: int = 0
    best_trial_mean: float | None = None  # best single-direction mean, when pooled
    samples: np.ndarray | None = None  # retained only when requested
    values: np.ndarray | None = None


def _finalize(inst, xs, vals, skipped, *, stderr=None, best_trial_mean=None, keep_samples=False):
    if vals.size == 0:
        raise InvalidInput("no usable samples survived")
    best = int(np.argmax(vals))
    best_vec = xs[best] / np.linalg.norm(xs[best])
    mean = float(np.mean(vals))
    if stderr is None:
        stderr = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else float("inf")
    return RoundingOutcome(
        best_vector=best_vec,
        best_value=evaluate(inst, best_vec),
        empirical_mean=mean,
        empirical_stderr=float(stderr),
        samples_used=int(vals.size),
        skipped=int(skipped),
        best_trial_mean=best_trial_mean,
        samples=xs if keep_samples else None,
        values=vals if keep_samples else None,
    )


def round_gaussian(
    inst: ProblemInstance,
    x: DensityMatrix | np.ndarray,
    samples: int,
    rng: np.random.Generator,
    *,
    keep_samples: bool = False,
) -> RoundingOutcome:
    """Sample from the Gaussian with covariance X, normalize, evaluate.

    Near-zero-norm draws (possible only for degenerate X) are skipped and
    counted.  Statistics are over the surviving samples.
    """
    if samples < 1:
        raise InvalidInput("need at least one sample")
    mat = x.mat if isinstance(x, DensityMatrix) else np.asarray(x)
    u, r = gram_factor(mat, inst.field)
    if r == 0:
        raise InvalidInput("covariance is numerically zero")
    z = sample_standard(r, samples, rng, inst.field)
    xs = z @ u.T
    norms = np.linalg.norm(xs, axis=1)
    keep = norms > 1e-12
    skipped = int(np.sum(~keep))
    xs = xs[keep] / norms[keep, None]
    vals = evaluate_batch(inst, xs)
    return _finalize(inst, xs, vals, skipped, keep_samples=keep_samples)


def pooled_outcome(inst: ProblemInstance, per_trial, *, keep_samples: bool = False) -> RoundingOutcome:
    """Merge per-direction sample batches (vals, best_vec[, xs]) into one outcome.

    The standard error uses the spread of per-trial means, which is the
    correct sampling error of the pooled mean when draws cluster by trial.
    """
    all_vals = np.concatenate([entry[0] for entry in per_trial])
    trial_means = np.array([float(np.mean(entry[0])) for entry in per_trial])
    bests = np.array([float(np.max(entry[0])) for entry in per_trial])
    winner = int(np.argmax(bests))
    best_vec = per_trial[winner][1]
    if len(per_trial) > 1:
        stderr = float(np.std(trial_means, ddof=1) / math.sqrt(len(per_trial)))
    else:
        vals = per_trial[0][0]
        stderr = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else float("inf")
    mean = float(np.mean(all_vals))
    xs = None
    if keep_samples and all(len(entry) > 2 and entry[2] is not None for entry in per_trial):
        xs = np.concatenate([entry[2] for entry in per_trial], axis=0)
    return RoundingOutcome(
        best_vector=best_vec / np.linalg.norm(best_vec),
        best_value=evaluate(inst, best_vec / np.linalg.norm(best_vec)),
        empirical_mean=mean,
        empirical_stderr=stderr,
        samples_used=int(all_vals.size),
        skipped=0,
        best_trial_mean=float(np.max(trial_means)),
        samples=xs,
        values=all_vals if keep_samples else None,
    )


def approx_factor(r: int, field: Field) -> float:
    """Multiplicative rounding guarantee e^{-L_r} for a rank-r solution."""
    return math.exp(-L_r(field, r))


@dataclass(frozen=True)
class GuaranteeVerdict:
    empirical_mean: float
    empirical_stderr: float
    threshold: float
    margin: float
    rank: int
    samples_used: int
    passed: bool


def check_rounding_guarantee(
    inst: ProblemInstance,
    report,
    samples: int,
    rng: np.random.Generator,
) -> GuaranteeVerdict:
    """Empirical test of the expected-value rounding guarantee.

    PASS when the empirical mean is at least e^{-L_rank} times the
    relaxation value, up to three standard errors of sampling slack.
    """
    outcome = round_gaussian(inst, report.solution, samples, rng)
    threshold = approx_factor(report.rank, inst.field) * report.value
    margin = outcome.empirical_mean - threshold
    return GuaranteeVerdict(
        empirical_mean=outcome.empirical_mean,
        empirical_stderr=outcome.empirical_stderr,
        threshold=threshold,
        margin=margin,
        rank=report.rank,
        samples_used=outcome.samples_used,
        passed=bool(margin >= -3.0 * outcome.empirical_stderr),
    )
