import math

import numpy as np
import pytest

from geomean_opt.errors import UnsupportedDimension
from geomean_opt.fields import Field, substream, symmetrize
from geomean_opt.instances import (
    ProblemInstance,
    complete_graph,
    gen_icosahedral,
    gen_kantorovich,
    gen_maxcut,
    gen_monomial,
    gen_random_rank_one,
    maxcut_quadratic,
    prism_graph,
)
from geomean_opt.oracle import cube_max, grid_max_sphere, local_max_sphere
from geomean_opt.specials import monomial_max


class TestLocalMaxSphere:
    def test_monomial_closed_form(self):
        res = local_max_sphere(gen_monomial((2, 1)), 64, substream(0, "orc"))
        assert res.best_value == pytest.approx(monomial_max((2, 1)), abs=1e-8)

    def test_kantorovich(self):
        res = local_max_sphere(gen_kantorovich(np.diag([4.0, 1.0])), 32, substream(1, "orc"))
        assert res.best_value == pytest.approx(1.25, abs=1e-8)

    def test_icosahedral(self):
        res = local_max_sphere(gen_icosahedral(), 256, substream(2, "orc"))
        assert res.best_value == pytest.approx(1.0, abs=1e-8)

    def test_best_value_consistent_with_vector(self):
        from geomean_opt.instances import evaluate

        res = local_max_sphere(gen_icosahedral(), 16, substream(3, "orc"))
        assert res.best_value == pytest.approx(evaluate(gen_icosahedral(), res.best_vector), abs=1e-12)

    def test_unitary_conjugation_invariance(self):
        rng = substream(4, "orc")
        inst = gen_random_rank_one(3, 4, Field.REAL, rng)
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        rotated = ProblemInstance(
            field=Field.REAL, n=3, forms=tuple(symmetrize(q @ a @ q.T) for a in inst.forms)
        )
        r1 = local_max_sphere(inst, 64, substream(5, "orc"))
        r2 = local_max_sphere(rotated, 64, substream(5, "orc"))
        assert r1.best_value == pytest.approx(r2.best_value, abs=1e-9)

    def test_extra_starts_are_used(self):
        inst = gen_icosahedral()
        from geomean_opt.instances import icosahedral_maximizers

        res = local_max_sphere(inst, 1, substream(6, "orc"), extra_starts=[icosahedral_maximizers()[0]])
        assert res.best_value == pytest.approx(1.0, abs=1e-10)


class TestGridMaxSphere:
    def test_constant_objective(self):
        inst = ProblemInstance(Field.REAL, 3, (np.eye(3), np.eye(3)))
        assert grid_max_sphere(inst, 64) == pytest.approx(1.0, abs=1e-12)

    def test_icosahedral_near_one(self):
        assert grid_max_sphere(gen_icosahedral(), 512) >= 0.999

    def test_monomial(self):
        assert grid_max_sphere(gen_monomial((1, 1)), 256) >= 0.4999

    def test_complex_two_dim(self):
        inst = gen_random_rank_one(2, 3, Field.COMPLEX, substream(7, "grid"))
        lower = grid_max_sphere(inst, 128)
        res = local_max_sphere(inst, 32, substream(8, "grid"))
        assert lower <= res.best_value + 1e-9
        assert lower >= 0.9 * res.best_value

    def test_dimension_guard(self):
        inst = ProblemInstance(Field.REAL, 4, (np.eye(4),))
        with pytest.raises(UnsupportedDimension):
            grid_max_sphere(inst, 64)

    def test_resolution_guard(self):
        with pytest.raises(Exception):
            grid_max_sphere(gen_icosahedral(), 8)


class TestCubeMax:
    def test_k4_exact(self):
        assert cube_max(complete_graph(4)) == 2.0 / 3.0

    def test_prism(self):
        # best cut of the triangular prism cuts 7 of 9 edges... enumerate says
        val = cube_max(prism_graph())
        assert val == pytest.approx(2.0 * 7 / 18.0, abs=1e-15)

    @pytest.mark.parametrize("graph", [complete_graph(4), prism_graph()])
    def test_eigenvalue_sandwich(self, graph):
        q = maxcut_quadratic(graph)
        lam = float(np.linalg.eigvalsh(q)[-1])
        val = cube_max(graph)
        assert 0.5 * lam <= val + 1e-12
        assert val <= lam + 1e-12
        assert lam <= 1.0 + 1e-12

    @pytest.mark.parametrize("graph", [complete_graph(4), prism_graph()])
    @pytest.mark.parametrize("power", [1, 2])
    def test_relaxation_dominates_cut(self, graph, power):
        inst = gen_maxcut(graph, power)
        cube_vals = _cube_vectors(graph.n)
        res = local_max_sphere(inst, 64, substream(9, "mc", graph.n, power), extra_starts=cube_vals[:4])
        assert cube_max(graph) <= res.best_value**inst.d + 1e-8


def _cube_vectors(n):
    rng = substream(10, "cube", n)
    out = []
    for _ in range(8):
        out.append(rng.choice([-1.0, 1.0], size=n) / math.sqrt(n))
    return out
