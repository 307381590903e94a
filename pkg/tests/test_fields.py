import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomean_opt.errors import NotPSD
from geomean_opt.fields import (
    DensityMatrix,
    Field,
    eigh,
    gram_factor,
    project_spectrahedron,
    sample_gaussian,
    sample_sphere_uniform,
    sample_standard,
    simplex_project,
    substream,
    symmetrize,
)


def random_hermitian(n, field, rng):
    a = rng.standard_normal((n, n))
    if field is Field.COMPLEX:
        a = a + 1j * rng.standard_normal((n, n))
    return symmetrize(a)


class TestEigh:
    def test_identity(self):
        dec = eigh(np.eye(3))
        assert np.allclose(dec.eigenvalues, [1, 1, 1])

    def test_diagonal_descending(self):
        dec = eigh(np.diag([4.0, 1.0]))
        assert np.allclose(dec.eigenvalues, [4.0, 1.0])

    @pytest.mark.parametrize("field", [Field.REAL, Field.COMPLEX])
    def test_negation_symmetry(self, field):
        rng = np.random.default_rng(0)
        h = random_hermitian(5, field, rng)
        assert np.allclose(eigh(h).eigenvalues, -eigh(-h).eigenvalues[::-1], atol=1e-12)

    @pytest.mark.parametrize("field", [Field.REAL, Field.COMPLEX])
    def test_reconstruction_and_unitarity(self, field):
        rng = np.random.default_rng(1)
        h = random_hermitian(6, field, rng)
        dec = eigh(h)
        scale = 1.0 + abs(dec.eigenvalues[0])
        assert np.max(np.abs(dec.reconstruct() - h)) <= 1e-10 * scale
        eye = dec.basis.conj().T @ dec.basis
        assert np.max(np.abs(eye - np.eye(6))) <= 1e-10


def test_symmetrize_idempotent_bitwise():
    rng = np.random.default_rng(2)
    h = symmetrize(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    again = symmetrize(h)
    assert np.array_equal(again.view(np.float64), h.view(np.float64))


class TestProjectSpectrahedron:
    def test_fixed_point(self):
        out = project_spectrahedron(np.eye(4) / 4, Field.REAL)
        assert np.allclose(out.mat, np.eye(4) / 4, atol=1e-14)

    def test_projects_excess_mass(self):
        out = project_spectrahedron(np.diag([2.0, 0.0]), Field.REAL)
        assert np.allclose(out.mat, np.diag([1.0, 0.0]), atol=1e-12)

    def test_splits_evenly(self):
        out = project_spectrahedron(np.diag([0.6, 0.6]), Field.REAL)
        assert np.allclose(out.mat, np.diag([0.5, 0.5]), atol=1e-12)

    @pytest.mark.parametrize("field", [Field.REAL, Field.COMPLEX])
    def test_idempotent_and_feasible(self, field):
        rng = np.random.default_rng(3)
        for _ in range(10):
            h = random_hermitian(5, field, rng)
            x = project_spectrahedron(h, field)
            assert abs(np.trace(x.mat).real - 1.0) <= 1e-12
            assert np.linalg.eigvalsh(x.mat)[0] >= -1e-12
            twice = project_spectrahedron(x.mat, field)
            assert np.max(np.abs(twice.mat - x.mat)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8))
def test_simplex_projection_is_nearest_point(vs):
    v = np.array(vs)
    p = simplex_project(v)
    assert np.all(p >= 0) and abs(p.sum() - 1.0) <= 1e-9
    rng = np.random.default_rng(0)
    d0 = np.linalg.norm(v - p)
    for _ in range(20):
        w = rng.dirichlet(np.ones(v.size))
        assert d0 <= np.linalg.norm(v - w) + 1e-9


class TestSampleGaussian:
    def test_zero_covariance(self):
        out = sample_gaussian(np.zeros((3, 3)), 7, substream(0, "z"), Field.REAL)
        assert out.shape == (7, 3) and np.all(out == 0)

    def test_real_identity_covariance(self):
        out = sample_gaussian(np.eye(2), 1_000_000, substream(0, "cov"), Field.REAL)
        emp = out.T @ out / out.shape[0]
        # var of an off-diagonal entry estimate is 1/S, of a diagonal entry 2/S
        s = out.shape[0]
        assert abs(emp[0, 0] - 1) <= 3 * np.sqrt(2 / s)
        assert abs(emp[1, 1] - 1) <= 3 * np.sqrt(2 / s)
        assert abs(emp[0, 1]) <= 3 * np.sqrt(1 / s)

    def test_complex_unit_second_moment(self):
        out = sample_gaussian(np.eye(1, dtype=complex), 1_000_000, substream(0, "c1"), Field.COMPLEX)
        m2 = np.mean(np.abs(out) ** 2)
        assert abs(m2 - 1.0) <= 3 * np.sqrt(1.0 / out.shape[0])

    def test_indefinite_rejected(self):
        with pytest.raises(NotPSD):
            sample_gaussian(np.diag([1.0, -0.1]), 3, substream(0, "bad"), Field.REAL)

    @pytest.mark.parametrize("field", [Field.REAL, Field.COMPLEX])
    def test_linear_transform_law(self, field):
        # fixed standard normals pushed through composed factors
        rng = np.random.default_rng(5)
        u = rng.standard_normal((3, 3))
        if field is Field.COMPLEX:
            u = u + 1j * rng.standard_normal((3, 3))
        perm = np.eye(3)[[2, 0, 1]].astype(field.dtype)
        z = sample_standard(3, 200, substream(1, "law"), field)
        samples_sigma = z @ u.T
        samples_perm = z @ (perm @ u).T
        assert np.array_equal(samples_perm, samples_sigma @ perm.T)
        a = rng.standard_normal((3, 3)).astype(field.dtype)
        assert np.allclose(z @ (a @ u).T, (z @ u.T) @ a.T, rtol=1e-12, atol=1e-12)

    def test_complex_circular_symmetry(self):
        rng = substream(2, "circ")
        cov = np.array([[2.0, 0.5 + 0.25j], [0.5 - 0.25j, 1.0]])
        out = sample_gaussian(cov, 200_000, rng, Field.COMPLEX)
        phase = np.exp(1j * 0.813)
        rotated = phase * out
        second = out.conj().T @ out / out.shape[0]
        second_rot = rotated.conj().T @ rotated / rotated.shape[0]
        assert np.max(np.abs(second - second_rot)) <= 1e-10


class TestSampleSphere:
    def test_unit_norm_always(self):
        rng = substream(0, "sphere")
        for field in (Field.REAL, Field.COMPLEX):
            for n in (1, 2, 5):
                v = sample_sphere_uniform(n, field, rng)
                assert abs(np.linalg.norm(v) - 1.0) <= 1e-12

    def test_zero_sphere(self):
        rng = substream(1, "sphere")
        vals = {float(sample_sphere_uniform(1, Field.REAL, rng)[0]) for _ in range(50)}
        assert vals <= {1.0, -1.0} and len(vals) == 2

    def test_coordinate_symmetry(self):
        rng = substream(2, "sphere")
        sq = np.array([sample_sphere_uniform(2, Field.REAL, rng)[0] ** 2 for _ in range(100_000)])
        assert abs(sq.mean() - 0.5) <= 3 * sq.std() / np.sqrt(sq.size)


class TestGramFactor:
    def test_rank_one(self):
        v = np.array([1.0, 0.0, 0.0])
        u, r = gram_factor(np.outer(v, v), Field.REAL)
        assert r == 1
        assert np.allclose(np.abs(u[:, 0]), v)

    def test_full_rank(self):
        u, r = gram_factor(np.eye(4) / 4, Field.REAL)
        assert r == 4

    def test_rank_counts_thresholded_eigenvalues(self):
        _, r = gram_factor(np.diag([0.5, 0.5, 0.0]), Field.REAL)
        assert r == 2

    @pytest.mark.parametrize("field", [Field.REAL, Field.COMPLEX])
    def test_reconstruction(self, field):
        rng = np.random.default_rng(7)
        a = random_hermitian(5, field, rng)
        x = a @ a.conj().T
        x = x / np.trace(x).real
        u, r = gram_factor(x, field)
        assert np.max(np.abs(u @ u.conj().T - x)) <= 1e-9

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSD):
            gram_factor(np.diag([1.0, -0.5]), Field.REAL)


class TestDensityMatrix:
    def test_validates_trace(self):
        with pytest.raises(Exception):
            DensityMatrix(np.eye(2), Field.REAL)

    def test_accepts_feasible(self):
        d = DensityMatrix(np.eye(2) / 2, Field.REAL)
        assert d.n == 2


def test_substreams_are_deterministic_and_distinct():
    a1 = substream(42, "x", 1).standard_normal(4)
    a2 = substream(42, "x", 1).standard_normal(4)
    b = substream(42, "x", 2).standard_normal(4)
    c = substream(43, "x", 1).standard_normal(4)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)
