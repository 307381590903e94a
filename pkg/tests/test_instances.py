import json
import math

import numpy as np
import pytest

from geomean_opt.errors import InvalidInput, NotPSD, NotPositiveDefinite, ParseError
from geomean_opt.fields import Field, substream
from geomean_opt.instances import (
    GraphSpec,
    ProblemInstance,
    complete_graph,
    evaluate,
    evaluate_batch,
    form_values,
    gen_icosahedral,
    gen_kantorovich,
    gen_maxcut,
    gen_monomial,
    gen_random_rank_one,
    gen_rank_one,
    icosahedral_axes,
    icosahedral_maximizers,
    maxcut_quadratic,
    parse_graph,
    parse_instance,
    prism_graph,
    serialize_graph,
    serialize_instance,
)

PHI = (1 + math.sqrt(5)) / 2


def identity_instance(n=3, d=4):
    return ProblemInstance(field=Field.REAL, n=n, forms=tuple(np.eye(n) for _ in range(d)))


class TestEvaluate:
    def test_identity_forms(self):
        inst = identity_instance()
        x = np.array([1.0, 0, 0])
        assert evaluate(inst, x) == pytest.approx(1.0, abs=1e-14)

    def test_two_diagonal_forms(self):
        inst = ProblemInstance(Field.REAL, 2, (np.diag([4.0, 1.0]), np.diag([0.25, 1.0])))
        assert evaluate(inst, np.array([1.0, 0.0])) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_unit(self):
        with pytest.raises(InvalidInput):
            evaluate(identity_instance(), np.array([1.0, 1.0, 0.0]))

    def test_zero_when_a_form_vanishes(self):
        inst = gen_monomial((1, 1))
        assert evaluate(inst, np.array([1.0, 0.0])) == 0.0

    def test_exact_phase_invariance_quarter_turns(self):
        rng = substream(0, "phase")
        inst = gen_random_rank_one(3, 4, Field.COMPLEX, rng)
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        x /= np.linalg.norm(x)
        base = evaluate(inst, x)
        for s in (1.0, -1.0, 1.0j, -1.0j):
            assert evaluate(inst, s * x) == base

    def test_general_phase_invariance(self):
        rng = substream(1, "phase")
        inst = gen_random_rank_one(3, 4, Field.COMPLEX, rng)
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        x /= np.linalg.norm(x)
        base = evaluate(inst, x)
        for theta in rng.uniform(0, 2 * np.pi, size=8):
            val = evaluate(inst, np.exp(1j * theta) * x)
            assert val == pytest.approx(base, rel=1e-12)

    def test_batch_matches_scalar(self):
        rng = substream(2, "batch")
        inst = gen_icosahedral()
        xs = rng.standard_normal((32, 3))
        xs /= np.linalg.norm(xs, axis=1, keepdims=True)
        batch = evaluate_batch(inst, xs)
        for x, v in zip(xs, batch):
            assert v == pytest.approx(evaluate(inst, x), rel=1e-12, abs=1e-300)


class TestRankOne:
    def test_standard_basis(self):
        n = 4
        inst = gen_rank_one(list(np.eye(n)))
        x = np.ones(n) / math.sqrt(n)
        assert evaluate(inst, x) == pytest.approx(1.0 / n, rel=1e-12)

    def test_single_vector_self_value(self):
        v = np.array([0.6, 0.8])
        inst = gen_rank_one([v])
        assert evaluate(inst, v) == pytest.approx(1.0, rel=1e-12)

    def test_rank_one_spectrum(self):
        rng = substream(0, "r1")
        inst = gen_random_rank_one(3, 5, Field.REAL, rng)
        for a in inst.forms:
            w = np.linalg.eigvalsh(a)
            assert w[-1] == pytest.approx(1.0, rel=1e-12)
            assert np.max(np.abs(w[:-1])) <= 1e-12

    def test_rejects_zero_vector(self):
        with pytest.raises(InvalidInput):
            gen_rank_one([np.zeros(3)])

    def test_random_reproducible_and_unit_trace(self):
        a = gen_random_rank_one(2, 4, Field.COMPLEX, substream(9, "gen"))
        b = gen_random_rank_one(2, 4, Field.COMPLEX, substream(9, "gen"))
        for fa, fb in zip(a.forms, b.forms):
            assert np.array_equal(fa, fb)
            assert np.trace(fa).real == pytest.approx(1.0, abs=1e-12)


class TestMonomial:
    def test_two_variable_split(self):
        inst = gen_monomial((1, 1))
        x = np.array([1.0, 1.0]) / math.sqrt(2)
        assert evaluate(inst, x) == pytest.approx(0.5, rel=1e-12)

    def test_single_variable(self):
        inst = gen_monomial((3,))
        assert evaluate(inst, np.array([1.0])) == pytest.approx(1.0, rel=1e-14)

    def test_power_identity(self):
        beta = (2, 1)
        inst = gen_monomial(beta)
        rng = substream(1, "mono")
        for _ in range(100):
            x = rng.standard_normal(2)
            x /= np.linalg.norm(x)
            target = float(np.prod(x ** (2 * np.array(beta))))
            assert evaluate(inst, x) ** inst.d == pytest.approx(target, rel=1e-12, abs=1e-250)

    def test_rejects_zero_degree(self):
        with pytest.raises(InvalidInput):
            gen_monomial((0, 0))


class TestKantorovich:
    def test_identity(self):
        inst = gen_kantorovich(np.eye(3))
        assert all(np.allclose(a, np.eye(3)) for a in inst.forms)

    def test_diagonal_inverse(self):
        inst = gen_kantorovich(np.diag([4.0, 1.0]))
        assert np.allclose(inst.forms[0], np.diag([4.0, 1.0]))
        assert np.allclose(inst.forms[1], np.diag([0.25, 1.0]))

    def test_rejects_singular(self):
        with pytest.raises(NotPositiveDefinite):
            gen_kantorovich(np.diag([1.0, 0.0]))


class TestIcosahedral:
    def test_twelve_maximizers_attain_one(self):
        inst = gen_icosahedral()
        pts = icosahedral_maximizers()
        assert pts.shape == (12, 3)
        for p in pts:
            assert evaluate(inst, p) == pytest.approx(1.0, abs=1e-9)

    def test_vanishes_on_factor_circles(self):
        inst = gen_icosahedral()
        # each coordinate axis is orthogonal to two factor axes
        for e in np.eye(3):
            assert evaluate(inst, e) <= 1e-12
        w = icosahedral_axes()[0]
        u = np.array([w[1], -w[0], 0.0])
        u /= np.linalg.norm(u)
        assert evaluate(inst, u) <= 1e-12

    def test_maximum_is_one(self):
        from geomean_opt.oracle import grid_max_sphere

        inst = gen_icosahedral()
        best = grid_max_sphere(inst, 512)
        assert best <= 1.0 + 1e-9
        assert best >= 1.0 - 1e-3

    def test_symmetry_invariance(self):
        inst = gen_icosahedral()
        rng = substream(2, "ico")
        for _ in range(100):
            x = rng.standard_normal(3)
            x /= np.linalg.norm(x)
            base = evaluate(inst, x)
            cyc = evaluate(inst, np.array([x[1], x[2], x[0]]))
            flip = evaluate(inst, np.array([-x[0], x[1], x[2]]))
            if base > 1e-280:
                assert cyc == pytest.approx(base, rel=1e-10)
                assert flip == pytest.approx(base, rel=1e-10)


class TestMaxCut:
    def test_k4_spectrum(self):
        q = maxcut_quadratic(complete_graph(4))
        w = np.sort(np.linalg.eigvalsh(q))
        assert np.allclose(w, [0.0, 2 / 3, 2 / 3, 2 / 3], atol=1e-12)

    def test_coordinate_forms_unit_on_cube(self):
        g = complete_graph(4)
        inst = gen_maxcut(g, 2)
        assert inst.d == 4 * 2 + 1
        x = np.array([1.0, -1.0, 1.0, -1.0]) / 2.0
        vals = form_values(inst, x)
        assert np.allclose(vals[1:], 1.0, atol=1e-12)

    def test_product_identity(self):
        g = prism_graph()
        k = 1
        inst = gen_maxcut(g, k)
        q = maxcut_quadratic(g)
        rng = substream(3, "mc")
        for _ in range(50):
            x = rng.standard_normal(6)
            x /= np.linalg.norm(x)
            direct = float(x @ q @ x) * float(np.prod((6 * x**2) ** k))
            assert evaluate(inst, x) ** inst.d == pytest.approx(direct, rel=1e-10, abs=1e-250)

    def test_rejects_irregular(self):
        g = GraphSpec(n=3, edges=((0, 1), (1, 2)))
        with pytest.raises(InvalidInput):
            gen_maxcut(g, 1)


class TestGraphSpec:
    def test_rejects_self_loop(self):
        with pytest.raises(InvalidInput):
            GraphSpec(n=3, edges=((0, 0),))

    def test_rejects_duplicate(self):
        with pytest.raises(InvalidInput):
            GraphSpec(n=3, edges=((0, 1), (1, 0)))

    def test_roundtrip(self):
        g = prism_graph()
        g2 = parse_graph(serialize_graph(g))
        assert g2 == g


class TestSerialization:
    def test_roundtrip_icosahedral(self):
        inst = gen_icosahedral()
        again = parse_instance(serialize_instance(inst))
        assert again.field is inst.field and again.n == inst.n and again.d == inst.d
        for a, b in zip(inst.forms, again.forms):
            assert np.max(np.abs(a - b)) <= 1e-15

    def test_roundtrip_complex(self):
        inst = gen_random_rank_one(2, 3, Field.COMPLEX, substream(0, "ser"))
        again = parse_instance(serialize_instance(inst))
        for a, b in zip(inst.forms, again.forms):
            assert np.max(np.abs(a - b)) <= 1e-15

    def test_non_psd_form_names_index(self):
        doc = {
            "field": "real",
            "n": 2,
            "forms": [
                {"re": [[1.0, 0.0], [0.0, 1.0]]},
                {"re": [[1.0, 0.0], [0.0, -0.1]]},
            ],
        }
        with pytest.raises(NotPSD, match="form 1"):
            parse_instance(json.dumps(doc))

    def test_non_hermitian_complex_rejected(self):
        doc = {
            "field": "complex",
            "n": 2,
            "forms": [{"re": [[1.0, 1.0], [0.0, 1.0]], "im": [[0.0, 0.5], [0.5, 0.0]]}],
        }
        with pytest.raises(ParseError):
            parse_instance(json.dumps(doc))

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            parse_instance(b"{not json")

    def test_dimension_mismatch(self):
        doc = {"field": "real", "n": 3, "forms": [{"re": [[1.0]]}]}
        with pytest.raises(ParseError):
            parse_instance(json.dumps(doc))
