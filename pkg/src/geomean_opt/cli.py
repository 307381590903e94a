"""Command-line front end: solving, rounding, and the desk-scale experiments.

Exit codes: 0 success, 1 input error, 2 numerical non-convergence.
All stochastic commands are deterministic given --seed.
"""

from __future__ import annotations

import csv
import json
import math
import sys
import time

import click
import numpy as np

from .errors import GeomeanError
from .fields import DensityMatrix, Field, substream
from .instances import (
    GraphSpec,
    complete_graph,
    gen_icosahedral,
    gen_kantorovich,
    gen_maxcut,
    gen_monomial,
    gen_random_rank_one,
    parse_graph,
    parse_instance,
    prism_graph,
    serialize_instance,
)
from .oracle import local_max_sphere
from .rounding import round_gaussian
from .sdp import solve_optsdp
from .sos import moment_matrix, moments_from_doc, moments_to_doc, round_sos, solve_optsos
from .specials import C_nk, EULER_GAMMA, L_r


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_instance(path: str):
    try:
        with open(path, "rb") as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        _fail(f"cannot read instance file: {exc}")
    except GeomeanError as exc:
        _fail(str(exc))


def _matrix_doc(mat: np.ndarray, field: Field) -> dict:
    doc = {"re": np.real(mat).tolist()}
    if field is Field.COMPLEX:
        doc["im"] = np.imag(mat).tolist()
    return doc


def _write_csv(path: str, xs: np.ndarray, vals: np.ndarray, field: Field):
    n = xs.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if field is Field.REAL:
            writer.writerow([f"x_{i+1}" for i in range(n)] + ["value"])
            for row, v in zip(xs, vals):
                writer.writerow([f"{c:.17g}" for c in row.real] + [f"{v:.17g}"])
        else:
            head = []
            for i in range(n):
                head += [f"re_{i+1}", f"im_{i+1}"]
            writer.writerow(head + ["value"])
            for row, v in zip(xs, vals):
                flat = []
                for c in row:
                    flat += [f"{c.real:.17g}", f"{c.imag:.17g}"]
                writer.writerow(flat + [f"{v:.17g}"])


@click.group()
def main():
    """Bounds and feasible points for products of PSD forms on the sphere."""


@main.command("solve")
@click.argument("instance", type=click.Path(exists=False))
@click.option("--level", "-k", default=1, show_default=True, help="relaxation level k")
@click.option("--tol", default=1e-6, show_default=True)
@click.option("--max-iter", default=50_000, show_default=True)
@click.option("--out-solution", type=click.Path(), default=None,
              help="write the solution (density matrix or moments) for later rounding")
def cmd_solve(instance, level, tol, max_iter, out_solution):
    """Solve the relaxation of an instance file and print a JSON report."""
    if level < 1:
        _fail(f"relaxation level must be >= 1, got {level}")
    inst = _load_instance(instance)
    t0 = time.perf_counter()
    try:
        if level == 1:
            rep = solve_optsdp(inst, tol=tol, max_iter=max_iter)
            value, upper, gap = rep.value, rep.upper_certificate, rep.gap
            converged, iterations, rank = rep.converged, rep.iterations, rep.rank
            solution_doc = {
                "kind": "density",
                "field": inst.field.value,
                "n": inst.n,
                "X": _matrix_doc(rep.solution.mat, inst.field),
            }
        else:
            rep = solve_optsos(inst, level, tol=tol, max_iter=max_iter)
            value, upper, gap = rep.value, rep.upper_estimate, rep.gap
            converged, iterations = rep.converged, rep.iterations
            rank = int(np.sum(np.linalg.eigvalsh(moment_matrix(rep.moments)) > 1e-8))
            solution_doc = {"kind": "moments", **moments_to_doc(rep.moments)}
    except GeomeanError as exc:
        _fail(str(exc))
    report = {
        "command": "solve",
        "instance": instance,
        "level": level,
        "value": value,
        "upper_bound": upper,
        "gap": gap,
        "relative_gap": gap / value if value > 0 else None,
        "iterations": iterations,
        "converged": converged,
        "rank": rank,
        "tol": tol,
        "wall_time": time.perf_counter() - t0,
    }
    if out_solution:
        with open(out_solution, "w") as fh:
            json.dump(solution_doc, fh)
    click.echo(json.dumps(report, indent=1))
    sys.exit(0 if converged else 2)


@main.command("round")
@click.argument("instance", type=click.Path(exists=False))
@click.argument("solution", type=click.Path(exists=False))
@click.option("--samples", default=100_000, show_default=True, help="total pooled samples")
@click.option("--trials", default=64, show_default=True, help="direction draws for moment rounding")
@click.option("--seed", default=0, show_default=True)
@click.option("--dump", type=click.Path(), default=None, help="write per-sample CSV")
def cmd_round(instance, solution, samples, trials, seed, dump):
    """Round a stored relaxation solution to feasible sphere points."""
    inst = _load_instance(instance)
    try:
        with open(solution) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read solution file: {exc}")
    keep = dump is not None
    rng = substream(seed, "round")
    try:
        if "X" in doc:
            if int(doc.get("n", inst.n)) != inst.n:
                _fail(f"solution dimension {doc.get('n')} does not match instance n={inst.n}")
            x = np.array(doc["X"]["re"], dtype=np.float64)
            if inst.field is Field.COMPLEX:
                x = x + 1j * np.array(doc["X"].get("im", np.zeros_like(x)))
            out = round_gaussian(inst, DensityMatrix(x, inst.field), samples, rng, keep_samples=keep)
            level = 1
        elif "moments" in doc:
            m = moments_from_doc(doc)
            if m.n != inst.n or m.field is not inst.field:
                _fail("moment file does not match the instance dimension or field")
            out = round_sos(inst, m, trials=trials,
                            samples_per_trial=max(1, samples // trials), rng=rng,
                            keep_samples=keep)
            level = m.k
        else:
            _fail("solution file has neither an 'X' block nor a 'moments' block")
    except GeomeanError as exc:
        _fail(str(exc))
    if keep:
        _write_csv(dump, out.samples, out.values, inst.field)
    report = {
        "command": "round",
        "instance": instance,
        "level": level,
        "mean": out.empirical_mean,
        "stderr": out.empirical_stderr,
        "best": out.best_value,
        "best_trial_mean": out.best_trial_mean,
        "samples_used": out.samples_used,
        "skipped": out.skipped,
        "seed": seed,
    }
    click.echo(json.dumps(report, indent=1))


@main.command("ico-table")
@click.option("--samples", default=100_000, show_default=True, help="pooled samples per level")
@click.option("--trials", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--tol", default=1e-6, show_default=True)
def cmd_ico_table(samples, trials, seed, tol):
    """Upper bounds and rounding means for the icosahedral instance, k = 1..6."""
    inst = gen_icosahedral()
    rows = []
    t0 = time.perf_counter()
    for k in range(1, 7):
        rep = solve_optsos(inst, k, tol=tol)
        rng = substream(seed, "ico-round", k)
        if k == 1:
            out = round_gaussian(inst, DensityMatrix(moment_matrix(rep.moments), inst.field),
                                 samples, rng)
        else:
            out = round_sos(inst, rep.moments, trials=trials,
                            samples_per_trial=max(1, samples // trials), rng=rng)
        rows.append({
            "k": k,
            "upper_bound": rep.value,
            "upper_gap": rep.gap,
            "rounding_mean": out.empirical_mean,
            "rounding_stderr": out.empirical_stderr,
            "rounding_best": out.best_value,
            "samples": out.samples_used,
            "converged": rep.converged,
        })
        click.echo(f"k={k}  upper={rep.value:.5f}  mean={out.empirical_mean:.5f} "
                   f"(+-{out.empirical_stderr:.5f})  best={out.best_value:.5f}", err=True)
    record = {
        "experiment": "ico-table",
        "instance": "icosahedral",
        "seed": seed,
        "samples_per_level": samples,
        "trials": trials,
        "tol": tol,
        "rows": rows,
        "wall_time": time.perf_counter() - t0,
    }
    click.echo(json.dumps(record, indent=1))
    sys.exit(0 if all(r["converged"] for r in rows) else 2)


@main.command("gap-sweep")
@click.option("--n", default=2, show_default=True)
@click.option("--field", "field_name", default="complex", show_default=True,
              type=click.Choice(["real", "complex"]))
@click.option("--d-list", default="4,64", show_default=True)
@click.option("--seeds", default=20, show_default=True, help="instances per d")
@click.option("--restarts", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
def cmd_gap_sweep(n, field_name, d_list, seeds, restarts, seed):
    """Ratio of the relaxation value to the oracle optimum on random rank-one instances."""
    if n > 3:
        _fail("gap sweep is limited to n <= 3 where the oracle is reliable")
    field = Field.from_str(field_name)
    try:
        ds = [int(v) for v in d_list.split(",") if v.strip()]
    except ValueError:
        _fail(f"cannot parse --d-list {d_list!r}")
    if not ds:
        _fail("empty --d-list")
    t0 = time.perf_counter()
    rows = []
    for d in ds:
        ratios, sdp_vals, oracle_vals = [], [], []
        for i in range(seeds):
            inst = gen_random_rank_one(n, d, field, substream(seed, "gap-instance", d, i))
            rep = solve_optsdp(inst)
            orc = local_max_sphere(inst, restarts, substream(seed, "gap-oracle", d, i))
            ratios.append(rep.value / orc.best_value)
            sdp_vals.append(rep.value)
            oracle_vals.append(orc.best_value)
        rows.append({
            "d": d,
            "ratios": ratios,
            "median_ratio": float(np.median(ratios)),
            "sdp_values": sdp_vals,
            "oracle_values": oracle_vals,
        })
        click.echo(f"d={d}: median ratio {np.median(ratios):.4f}", err=True)
    record = {
        "experiment": "gap-sweep",
        "n": n,
        "field": field.value,
        "seed": seed,
        "seeds_per_d": seeds,
        "restarts": restarts,
        "asymptote": math.exp(L_r(field, n)),
        "rows": rows,
        "wall_time": time.perf_counter() - t0,
    }
    click.echo(json.dumps(record, indent=1))


@main.command("gen")
@click.argument("kind", type=click.Choice(
    ["rank-one-random", "monomial", "kantorovich", "icosahedral", "maxcut"]))
@click.option("--out", type=click.Path(), required=True)
@click.option("--n", default=2, show_default=True)
@click.option("--d", default=4, show_default=True)
@click.option("--field", "field_name", default="real", type=click.Choice(["real", "complex"]))
@click.option("--seed", default=0, show_default=True)
@click.option("--beta", default=None, help="comma-separated exponents for kind=monomial")
@click.option("--spectrum", default=None, help="comma-separated eigenvalues for kind=kantorovich")
@click.option("--graph", default="k4", help="k4, prism, or a graph JSON path (kind=maxcut)")
@click.option("--power", default=1, show_default=True, help="per-coordinate power (kind=maxcut)")
def cmd_gen(kind, out, n, d, field_name, seed, beta, spectrum, graph, power):
    """Write an instance file for one of the built-in generators."""
    field = Field.from_str(field_name)
    try:
        if kind == "rank-one-random":
            inst = gen_random_rank_one(n, d, field, substream(seed, "gen", kind))
        elif kind == "monomial":
            if beta is None:
                _fail("kind=monomial requires --beta")
            inst = gen_monomial([int(v) for v in beta.split(",")])
        elif kind == "kantorovich":
            if spectrum is None:
                _fail("kind=kantorovich requires --spectrum")
            lam = [float(v) for v in spectrum.split(",")]
            inst = gen_kantorovich(np.diag(lam), field)
        elif kind == "icosahedral":
            inst = gen_icosahedral()
        else:
            g = _load_graph(graph)
            inst = gen_maxcut(g, power)
    except (GeomeanError, ValueError) as exc:
        _fail(str(exc))
    with open(out, "wb") as fh:
        fh.write(serialize_instance(inst))
    click.echo(json.dumps({"command": "gen", "kind": kind, "out": out,
                           "n": inst.n, "d": inst.d, "field": inst.field.value}))


def _load_graph(spec: str) -> GraphSpec:
    if spec == "k4":
        return complete_graph(4)
    if spec == "prism":
        return prism_graph()
    with open(spec, "rb") as fh:
        return parse_graph(fh.read())


@main.command("constants")
@click.option("--n-list", default="2,3,4,5,6", show_default=True)
@click.option("--k-min", default=2, show_default=True)
@click.option("--k-max", default=50, show_default=True)
def cmd_constants(n_list, k_min, k_max):
    """Tabulate the level-k rounding-loss constant and its factor e^{-C}."""
    try:
        ns = [int(v) for v in n_list.split(",") if v.strip()]
    except ValueError:
        _fail(f"cannot parse --n-list {n_list!r}")
    if k_min < 2:
        _fail("the closed form is singular below k = 2")
    rows = []
    for n in ns:
        for k in range(k_min, k_max + 1):
            c = C_nk(n, k)
            rows.append({"n": n, "k": k, "C": c, "factor": math.exp(-c)})
    record = {
        "command": "constants",
        "rows": rows,
        "worst_case_factor": math.exp(-EULER_GAMMA),
    }
    click.echo(json.dumps(record, indent=1))


if __name__ == "__main__":
    main()
