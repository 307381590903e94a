"""Intermediate moment relaxations between the spectral SDP and full SoS.

Level k optimizes over degree-k homogeneous pseudoexpectations, represented
by their moment coordinates.  For the real field the coordinates are the
degree-2k moments (the moment matrix entry (a, b) reads coordinate a+b); for
the complex field only the circularly symmetric moments E[x^a conj(x)^b]
with |a| = |b| = k survive, and these are in bijection with the entries of
the Hermitian moment matrix itself.

Both relaxations (the per-subset log objective and the single averaged
linear objective) are solved by one dense log-det-barrier interior-point
routine over the moment coordinates; the barrier parameter yields an
optimality-gap estimate for the concave objective.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMoments, InvalidInput, TooManySubsets
from .fields import Field, sample_standard, sample_sphere_uniform, symmetrize
from .instances import ProblemInstance, evaluate_batch
from .rounding import RoundingOutcome, pooled_outcome

SUBSET_GUARD = 100_000
MU_SHRINK = 0.2
MU_FLOOR = 1e-9
NEWTON_TOL = 1e-11
MAX_NEWTON_PER_STAGE = 60


@dataclass(frozen=True)
class MonomialBasis:
    """All multi-indices of total degree k in n variables, lexicographic."""

    n: int
    k: int
    indices: tuple

    @property
    def size(self) -> int:
        return len(self.indices)

    def index_of(self, gamma) -> int:
        return _basis_lookup(self.n, self.k)[tuple(gamma)]


def monomial_basis(n: int, k: int) -> MonomialBasis:
    if n < 1 or k < 0:
        raise InvalidInput(f"need n >= 1, k >= 0, got n={n}, k={k}")
    out = []
    for combo in itertools.combinations_with_replacement(range(n), k):
        gamma = [0] * n
        for pos in combo:
            gamma[pos] += 1
        out.append(tuple(gamma))
    return MonomialBasis(n=n, k=k, indices=tuple(out))


def _basis_lookup(n: int, k: int) -> dict:
    key = (n, k)
    cached = _LOOKUP_CACHE.get(key)
    if cached is None:
        cached = {g: i for i, g in enumerate(monomial_basis(n, k).indices)}
        _LOOKUP_CACHE[key] = cached
    return cached


_LOOKUP_CACHE: dict = {}


def multinomial(gamma) -> int:
    total = sum(gamma)
    out = math.factorial(total)
    for g in gamma:
        out //= math.factorial(g)
    return out


@dataclass(frozen=True)
class MomentVector:
    """Moments of a degree-k homogeneous pseudoexpectation.

    Real field: `values` is a vector over the degree-2k monomial basis.
    Complex field: `values` is the Hermitian moment matrix itself, indexed by
    pairs of degree-k monomials.
    """

    n: int
    k: int
    field: Field
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if self.field is Field.REAL:
            expected = monomial_basis(self.n, 2 * self.k).size
            if v.shape != (expected,):
                raise InvalidInput(f"expected {expected} moments, got shape {v.shape}")
            v = v.astype(np.float64)
        else:
            nb = monomial_basis(self.n, self.k).size
            if v.shape != (nb, nb):
                raise InvalidInput(f"expected {nb}x{nb} moment array, got {v.shape}")
            v = symmetrize(v.astype(np.complex128))
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def normalization(self) -> float:
        """The pseudoexpectation of ||x||^(2k); must equal 1."""
        if self.field is Field.REAL:
            q = _norm_functional_real(self.n, self.k)
            return float(q @ self.values)
        return float(sum(multinomial(a) * self.values[i, i].real
                         for i, a in enumerate(monomial_basis(self.n, self.k).indices)))

    def validate(self, *, norm_tol: float = 1e-8, psd_tol: float = 1e-8) -> None:
        if abs(self.normalization() - 1.0) > norm_tol:
            raise InvalidInput(f"moment normalization is {self.normalization()}, not 1")
        wmin = float(np.linalg.eigvalsh(moment_matrix(self))[0])
        if wmin < -psd_tol:
            raise InvalidInput(f"moment matrix has eigenvalue {wmin:.3e} < -{psd_tol}")


def _norm_functional_real(n: int, k: int) -> np.ndarray:
    basis2k = monomial_basis(n, 2 * k)
    q = np.zeros(basis2k.size)
    lut = _basis_lookup(n, 2 * k)
    for alpha in monomial_basis(n, k).indices:
        q[lut[tuple(2 * a for a in alpha)]] = multinomial(alpha)
    return q


def moment_matrix(m: MomentVector) -> np.ndarray:
    """Hermitian matrix over the degree-k basis encoding pEx validity."""
    if m.field is Field.COMPLEX:
        return np.array(m.values)
    basis_k = monomial_basis(m.n, m.k)
    lut = _basis_lookup(m.n, 2 * m.k)
    nb = basis_k.size
    out = np.empty((nb, nb))
    for a, alpha in enumerate(basis_k.indices):
        for b in range(a, nb):
            beta = basis_k.indices[b]
            out[a, b] = out[b, a] = m.values[lut[tuple(x + y for x, y in zip(alpha, beta))]]
    return out


def point_moments(x: np.ndarray, k: int, field: Field) -> MomentVector:
    """Moments of the point mass at a unit vector x."""
    x = np.asarray(x, dtype=field.dtype)
    n = x.size
    if field is Field.REAL:
        vals = np.array([np.prod(x**np.array(g)) for g in monomial_basis(n, 2 * k).indices])
        return MomentVector(n=n, k=k, field=field, values=vals)
    phi = np.array([np.prod(x**np.array(a)) for a in monomial_basis(n, k).indices])
    return MomentVector(n=n, k=k, field=field, values=np.outer(phi, phi.conj()))


def uniform_sphere_moments(n: int, k: int, field: Field) -> MomentVector:
    """Moments of the uniform distribution on the unit sphere of K^n."""
    if field is Field.REAL:
        basis2k = monomial_basis(n, 2 * k)
        denom = 1.0
        for j in range(1, k + 1):
            denom *= n + 2 * j - 2
        vals = np.zeros(basis2k.size)
        for i, g in enumerate(basis2k.indices):
            if all(gi % 2 == 0 for gi in g):
                num = 1.0
                for gi in g:
                    num *= math.prod(range(1, gi, 2)) if gi else 1.0
                vals[i] = num / denom
        return MomentVector(n=n, k=k, field=field, values=vals)
    basis_k = monomial_basis(n, k)
    denom = 1.0
    for j in range(k):
        denom *= n + j
    diag = [math.prod(math.factorial(a) for a in alpha) / denom for alpha in basis_k.indices]
    return MomentVector(n=n, k=k, field=field, values=np.diag(np.array(diag, dtype=np.complex128)))


# ---------------------------------------------------------------------------
# Linear functionals of the moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductFormFunctional:
    """Coefficients of pEx[prod_{i in I} <x, A_i x>] in moment coordinates."""

    n: int
    k: int
    field: Field
    subset: tuple
    coeffs: np.ndarray  # aligned with MomentVector.values

    def apply(self, m: MomentVector) -> float:
        if self.field is Field.REAL:
            return float(self.coeffs @ m.values)
        return float(np.sum(self.coeffs * m.values).real)


def _quad_terms(a: np.ndarray, field: Field):
    """Sparse term list of the quadratic form <x, A x> in monomial coordinates."""
    n = a.shape[0]
    terms = []
    if field is Field.REAL:
        for i in range(n):
            if a[i, i] != 0:
                g = [0] * n
                g[i] = 2
                terms.append((tuple(g), float(a[i, i])))
            for j in range(i + 1, n):
                if a[i, j] != 0:
                    g = [0] * n
                    g[i] = g[j] = 1
                    terms.append((tuple(g), 2.0 * float(a[i, j])))
    else:
        for j in range(n):
            for l in range(n):
                if a[j, l] != 0:
                    al = [0] * n
                    be = [0] * n
                    al[l] = 1
                    be[j] = 1
                    terms.append(((tuple(al), tuple(be)), complex(a[j, l])))
    return terms


def product_form_functional(inst: ProblemInstance, subset) -> ProductFormFunctional:
    """Expand prod_{i in I} <x, A_i x> into the degree-2k moment coordinates."""
    subset = tuple(subset)
    k = len(subset)
    if not 1 <= k <= inst.d:
        raise InvalidInput(f"subset size {k} outside 1..{inst.d}")
    n = inst.n
    if inst.field is Field.REAL:
        poly = {tuple([0] * n): 1.0}
        for i in subset:
            terms = _quad_terms(inst.forms[i], inst.field)
            new: dict = {}
            for g0, c0 in poly.items():
                for g1, c1 in terms:
                    g = tuple(x + y for x, y in zip(g0, g1))
                    new[g] = new.get(g, 0.0) + c0 * c1
            poly = new
        lut = _basis_lookup(n, 2 * k)
        coeffs = np.zeros(len(lut))
        for g, c in poly.items():
            coeffs[lut[g]] = c
        return ProductFormFunctional(n=n, k=k, field=inst.field, subset=subset, coeffs=coeffs)
    zero = tuple([0] * n)
    polyc = {(zero, zero): 1.0 + 0.0j}
    for i in subset:
        terms = _quad_terms(inst.forms[i], inst.field)
        new = {}
        for (a0, b0), c0 in polyc.items():
            for (a1, b1), c1 in terms:
                key = (tuple(x + y for x, y in zip(a0, a1)), tuple(x + y for x, y in zip(b0, b1)))
                new[key] = new.get(key, 0.0 + 0.0j) + c0 * c1
        polyc = new
    lut_k = _basis_lookup(n, k)
    nb = len(lut_k)
    cmat = np.zeros((nb, nb), dtype=np.complex128)
    for (al, be), c in polyc.items():
        cmat[lut_k[al], lut_k[be]] += c
    return ProductFormFunctional(n=n, k=k, field=inst.field, subset=subset, coeffs=symmetrize(cmat))


def elementary_symmetric(values, k: int) -> float:
    """Normalized elementary symmetric polynomial E_k = e_k / C(d, k).

    Direct dynamic program over prefix products; all additions are of
    non-negative terms when the inputs are non-negative.
    """
    vals = list(values)
    d = len(vals)
    if not 0 <= k <= d:
        raise InvalidInput(f"need 0 <= k <= {d}, got {k}")
    e = np.zeros(k + 1)
    e[0] = 1.0
    for v in vals:
        upto = min(k, d)
        e[1 : upto + 1] = e[1 : upto + 1] + v * e[0:upto]
    return float(e[k]) / math.comb(d, k)


# ---------------------------------------------------------------------------
# Moment coordinates as a real vector space
# ---------------------------------------------------------------------------


class _MomentSpace:
    """Real coordinates v, the PSD block maps, and the normalization.

    Real field: one moment matrix over the degree-k monomials, entry (a, b)
    reading coordinate a+b.  Complex field: the coordinates are the circular
    moments (the (k, 0) block), and validity additionally requires the
    mixed-bidegree blocks (p, q), p+q = k, to be PSD; each is a linear image
    of the same coordinates.
    """

    def __init__(self, n: int, k: int, field: Field):
        self.n, self.k, self.field = n, k, field
        basis_k = monomial_basis(n, k)
        self.nb = basis_k.size
        if field is Field.REAL:
            basis2k = monomial_basis(n, 2 * k)
            self.dim = basis2k.size
            lut = _basis_lookup(n, 2 * k)
            g = np.zeros((self.dim, self.nb, self.nb))
            for a, alpha in enumerate(basis_k.indices):
                for b, beta in enumerate(basis_k.indices):
                    g[lut[tuple(x + y for x, y in zip(alpha, beta))], a, b] = 1.0
            self.blocks = [g]
            self.q = _norm_functional_real(n, k)
        else:
            nb = self.nb
            self.dim = nb * nb
            q = np.zeros(self.dim)
            self._pairs = []
            coord_of = {}
            pos = 0
            for a in range(nb):
                q[pos] = multinomial(basis_k.indices[a])
                self._pairs.append(("d", a, a))
                coord_of[(a, a)] = ("d", pos)
                pos += 1
            for a in range(nb):
                for b in range(a + 1, nb):
                    self._pairs.append(("r", a, b))
                    coord_of[(a, b)] = ("u", pos)  # upper: value = v_re + i v_im
                    coord_of[(b, a)] = ("l", pos)  # lower: value = v_re - i v_im
                    pos += 2
                    self._pairs.append(("i", a, b))
            self.q = q
            lut_k = _basis_lookup(n, k)
            self.blocks = []
            for p in range(k, (k - 1) // 2, -1):
                qq = k - p
                if qq > p:
                    break
                rows = [(a, b)
                        for a in monomial_basis(n, p).indices
                        for b in monomial_basis(n, qq).indices]
                size = len(rows)
                g = np.zeros((self.dim, size, size), dtype=np.complex128)
                for r, (a, b) in enumerate(rows):
                    for c, (a2, b2) in enumerate(rows):
                        gam = lut_k[tuple(x + y for x, y in zip(a, b2))]
                        del_ = lut_k[tuple(x + y for x, y in zip(a2, b))]
                        kind, j = coord_of[(gam, del_)]
                        if kind == "d":
                            g[j, r, c] += 1.0
                        elif kind == "u":
                            g[j, r, c] += 1.0
                            g[j + 1, r, c] += 1.0j
                        else:
                            g[j, r, c] += 1.0
                            g[j + 1, r, c] += -1.0j
                self.blocks.append(g)

    @property
    def gstack(self) -> np.ndarray:
        """Map of coordinates to the principal ((k,0) for complex) moment matrix."""
        return self.blocks[0]

    @property
    def nu(self) -> int:
        """Barrier parameter: total size of the PSD blocks."""
        return int(sum(g.shape[1] for g in self.blocks))

    def to_matrix(self, v: np.ndarray) -> np.ndarray:
        return np.tensordot(v, self.gstack, axes=([0], [0]))

    def block_matrices(self, v: np.ndarray):
        return [np.tensordot(v, g, axes=([0], [0])) for g in self.blocks]

    def vector_of(self, m: MomentVector) -> np.ndarray:
        if self.field is Field.REAL:
            return np.array(m.values)
        mat = m.values
        v = np.empty(self.dim)
        for j, (kind, a, b) in enumerate(self._pairs):
            if kind == "d":
                v[j] = mat[a, a].real
            elif kind == "r":
                v[j] = mat[a, b].real
            else:
                v[j] = mat[a, b].imag
        return v

    def moments_of(self, v: np.ndarray) -> MomentVector:
        if self.field is Field.REAL:
            return MomentVector(n=self.n, k=self.k, field=self.field, values=np.array(v))
        return MomentVector(n=self.n, k=self.k, field=self.field, values=self.to_matrix(v))

    def functional_vector(self, f: ProductFormFunctional) -> np.ndarray:
        if self.field is Field.REAL:
            return np.array(f.coeffs)
        return np.tensordot(self.gstack, f.coeffs, axes=([1, 2], [0, 1])).real


# ---------------------------------------------------------------------------
# Log-det barrier interior point
# ---------------------------------------------------------------------------


class _GeoObjective:
    """w * sum_j log(C v); concave where all C v > 0."""

    def __init__(self, cmat: np.ndarray, weight: float):
        self.cmat = cmat
        self.w = weight

    def ok(self, v):
        return bool(np.all(self.cmat @ v > 0.0))

    def value(self, v):
        return self.w * float(np.sum(np.log(self.cmat @ v)))

    def grad(self, v):
        return self.w * (self.cmat.T @ (1.0 / (self.cmat @ v)))

    def hess(self, v):
        r = 1.0 / (self.cmat @ v)
        return -self.w * (self.cmat.T * r**2) @ self.cmat


class _LinObjective:
    def __init__(self, c: np.ndarray):
        self.c = c

    def ok(self, v):
        return True

    def value(self, v):
        return float(self.c @ v)

    def grad(self, v):
        return np.array(self.c)

    def hess(self, v):
        return np.zeros((self.c.size, self.c.size))


def _chol_logdet(mat: np.ndarray):
    try:
        chol = np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        return None
    return 2.0 * float(np.sum(np.log(np.diag(chol).real)))


@dataclass
class _BarrierResult:
    v: np.ndarray
    objective: float
    mu_final: float
    newton_steps: int
    converged: bool


def _solve_barrier(space: _MomentSpace, obj, v0: np.ndarray, tol_log: float, max_iter: int) -> _BarrierResult:
    """Maximize obj(v) + mu * sum_b logdet B_b(v) subject to q . v = 1.

    The outer loop shrinks mu geometrically; the final weight certifies
    obj* <= obj(v) + mu * nu for the concave objective, nu being the total
    PSD block size.
    """
    q = space.q
    nu = space.nu
    v = np.array(v0, dtype=np.float64)

    def barrier_logdet(w):
        total = 0.0
        for mat in space.block_matrices(w):
            ld = _chol_logdet(mat)
            if ld is None:
                return None
            total += ld
        return total

    if barrier_logdet(v) is None or not obj.ok(v):
        raise InvalidInput("initial moment vector is not strictly feasible")

    steps = 0
    converged = True
    mu = 1.0
    mus = []
    while True:
        mus.append(mu)
        if mu <= MU_FLOOR or mu * nu <= 0.05 * tol_log:
            break
        mu *= MU_SHRINK

    for mu in mus:
        for _ in range(MAX_NEWTON_PER_STAGE):
            if steps >= max_iter:
                converged = False
                break
            steps += 1
            grad_ld = np.zeros(space.dim)
            hess_ld = np.zeros((space.dim, space.dim))
            for g, mat in zip(space.blocks, space.block_matrices(v)):
                minv = np.linalg.inv(mat)
                minv = (minv + minv.conj().T) / 2
                grad_ld += np.tensordot(g, minv, axes=([1, 2], [1, 0])).real
                t_stack = np.einsum("ab,jbc,cd->jad", minv, g, minv, optimize=True)
                hess_ld -= np.tensordot(t_stack, g, axes=([1, 2], [2, 1])).real
            hess_ld = (hess_ld + hess_ld.T) / 2
            grad = obj.grad(v) + mu * grad_ld
            hess = obj.hess(v) + mu * hess_ld
            kkt = np.zeros((space.dim + 1, space.dim + 1))
            kkt[: space.dim, : space.dim] = hess
            kkt[: space.dim, -1] = q
            kkt[-1, : space.dim] = q
            rhs = np.zeros(space.dim + 1)
            rhs[: space.dim] = -grad
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
            delta = sol[: space.dim]
            decrement = float(-delta @ hess @ delta)
            if not np.isfinite(decrement) or decrement < 0:
                decrement = float(np.abs(delta @ grad))
            if 0.5 * decrement <= NEWTON_TOL:
                break

            def phi(w):
                ld = barrier_logdet(w)
                if ld is None or not obj.ok(w):
                    return None
                return obj.value(w) + mu * ld

            base = phi(v)
            slope = float(grad @ delta)
            t = 1.0
            for _ in range(60):
                cand = v + t * delta
                val = phi(cand)
                if val is not None and val >= base + 0.25 * t * slope:
                    v = cand
                    break
                t *= 0.5
            else:
                break
        if not converged:
            break

    return _BarrierResult(v=v, objective=obj.value(v), mu_final=mus[-1] if mus else 1.0,
                          newton_steps=steps, converged=converged)


# ---------------------------------------------------------------------------
# Hierarchy solvers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SosReport:
    value: float
    upper_estimate: float  # value plus the barrier-parameter gap estimate
    gap: float
    k: int
    moments: MomentVector
    iterations: int
    converged: bool
    mu_final: float
    wall_time: float


def _subsets(d: int, k: int):
    count = math.comb(d, k)
    if count > SUBSET_GUARD:
        raise TooManySubsets(f"C({d},{k}) = {count} exceeds the enumeration guard {SUBSET_GUARD}")
    return list(itertools.combinations(range(d), k))


def _functional_matrix(inst: ProblemInstance, k: int, space: _MomentSpace) -> np.ndarray:
    rows = [space.functional_vector(product_form_functional(inst, s)) for s in _subsets(inst.d, k)]
    return np.array(rows)


def solve_optsos(
    inst: ProblemInstance,
    k: int,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> SosReport:
    """Level-k relaxation via its pseudoexpectation form.

    Maximizes the normalized sum of log subset-product functionals over
    valid degree-k homogeneous moment vectors; the value equals the level-k
    upper bound on the sphere optimum, and `upper_estimate` adds the barrier
    optimality-gap allowance.
    """
    if not 1 <= k <= inst.d:
        raise InvalidInput(f"level k must be in 1..{inst.d}, got {k}")
    t0 = time.perf_counter()
    space = _MomentSpace(inst.n, k, inst.field)
    cmat = _functional_matrix(inst, k, space)
    weight = 1.0 / (inst.d * math.comb(inst.d - 1, k - 1))
    obj = _GeoObjective(cmat, weight)
    v0 = space.vector_of(uniform_sphere_moments(inst.n, k, inst.field))
    res = _solve_barrier(space, obj, v0, tol_log=tol, max_iter=max_iter)
    value = math.exp(res.objective)
    gap_log = res.mu_final * space.nu
    return SosReport(
        value=value,
        upper_estimate=value * math.exp(gap_log),
        gap=value * math.expm1(gap_log),
        k=k,
        moments=space.moments_of(res.v),
        iterations=res.newton_steps,
        converged=res.converged,
        mu_final=res.mu_final,
        wall_time=time.perf_counter() - t0,
    )


def solve_srel(
    inst: ProblemInstance,
    k: int,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> SosReport:
    """Multiplier-free level-k relaxation: maximize pEx of the k-th
    normalized elementary symmetric function of the form values, then take
    the k-th root."""
    if not 1 <= k <= inst.d:
        raise InvalidInput(f"level k must be in 1..{inst.d}, got {k}")
    t0 = time.perf_counter()
    space = _MomentSpace(inst.n, k, inst.field)
    cmat = _functional_matrix(inst, k, space)
    cbar = cmat.mean(axis=0)
    obj = _LinObjective(cbar)
    v0 = space.vector_of(uniform_sphere_moments(inst.n, k, inst.field))
    # tol is relative on the k-th root; convert to an absolute allowance on E_k
    res = _solve_barrier(space, obj, v0, tol_log=tol * k, max_iter=max_iter)
    ek = res.objective
    gap_abs = res.mu_final * space.nu
    value = ek ** (1.0 / k)
    upper = (ek + gap_abs) ** (1.0 / k)
    return SosReport(
        value=value,
        upper_estimate=upper,
        gap=upper - value,
        k=k,
        moments=space.moments_of(res.v),
        iterations=res.newton_steps,
        converged=res.converged,
        mu_final=res.mu_final,
        wall_time=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# Moment rounding
# ---------------------------------------------------------------------------


def contract_direction_matrix(m: MomentVector, v: np.ndarray) -> np.ndarray:
    """The n x n matrix pEx[|<v, x>|^(2k-2) x x†] as a function of the moments."""
    n, k = m.n, m.k
    if m.field is Field.REAL:
        basis_low = monomial_basis(n, 2 * k - 2)
        lut = _basis_lookup(n, 2 * k)
        w = np.array([multinomial(g) * float(np.prod(np.asarray(v) ** np.array(g)))
                      for g in basis_low.indices])
        out = np.empty((n, n))
        for a in range(n):
            for b in range(n):
                idx = [lut[_bump(g, a, b)] for g in basis_low.indices]
                out[a, b] = float(w @ m.values[idx])
        return symmetrize(out)
    basis_low = monomial_basis(n, k - 1)
    lut = _basis_lookup(n, k)
    vv = np.asarray(v, dtype=np.complex128)
    u = np.array([multinomial(a) * np.prod(vv ** np.array(a)) for a in basis_low.indices])
    out = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        rows = [lut[_bump1(g, a)] for g in basis_low.indices]
        for b in range(n):
            cols = [lut[_bump1(g, b)] for g in basis_low.indices]
            block = m.values[np.ix_(rows, cols)]
            out[a, b] = np.conj(u) @ block @ u
    return symmetrize(out)


def _bump(g, a, b):
    out = list(g)
    out[a] += 1
    out[b] += 1
    return tuple(out)


def _bump1(g, a):
    out = list(g)
    out[a] += 1
    return tuple(out)


def moments_to_doc(m: MomentVector) -> dict:
    """JSON-able form of a moment vector, keyed by multi-indices."""
    doc = {"n": m.n, "k": m.k, "field": m.field.value, "moments": {}}
    if m.field is Field.REAL:
        for g, val in zip(monomial_basis(m.n, 2 * m.k).indices, m.values):
            doc["moments"][",".join(map(str, g))] = float(val)
    else:
        basis = monomial_basis(m.n, m.k).indices
        for a, alpha in enumerate(basis):
            for b, beta in enumerate(basis):
                if b < a:
                    continue  # conjugate symmetry reconstructs the lower triangle
                key = ",".join(map(str, alpha)) + "|" + ",".join(map(str, beta))
                doc["moments"][key] = [float(m.values[a, b].real), float(m.values[a, b].imag)]
    return doc


def moments_from_doc(doc: dict) -> MomentVector:
    from .errors import ParseError

    for key in ("n", "k", "field", "moments"):
        if key not in doc:
            raise ParseError(f"moment document missing key {key!r}")
    n, k = int(doc["n"]), int(doc["k"])
    field = Field.from_str(str(doc["field"]))
    ent = doc["moments"]
    if field is Field.REAL:
        basis = monomial_basis(n, 2 * k).indices
        try:
            vals = np.array([float(ent[",".join(map(str, g))]) for g in basis])
        except KeyError as exc:
            raise ParseError(f"moment document missing entry {exc}") from exc
        return MomentVector(n=n, k=k, field=field, values=vals)
    basis = monomial_basis(n, k).indices
    nb = len(basis)
    mat = np.zeros((nb, nb), dtype=np.complex128)
    for a, alpha in enumerate(basis):
        for b in range(a, nb):
            beta = basis[b]
            key = ",".join(map(str, alpha)) + "|" + ",".join(map(str, beta))
            try:
                re, im = ent[key]
            except KeyError as exc:
                raise ParseError(f"moment document missing entry {key!r}") from exc
            mat[a, b] = re + 1j * im
            mat[b, a] = re - 1j * im
    return MomentVector(n=n, k=k, field=field, values=mat)


def round_sos(
    inst: ProblemInstance,
    m: MomentVector,
    trials: int,
    samples_per_trial: int,
    rng: np.random.Generator,
    *,
    keep_samples: bool = False,
) -> RoundingOutcome:
    """Direction-weighted Gaussian rounding from level-k moments.

    For each of `trials` uniform directions v, contracts the moments to the
    covariance pEx[|<v,x>|^(2k-2) x x†] (clipped PSD, trace-normalized),
    draws `samples_per_trial` Gaussian vectors, normalizes, and evaluates.
    Statistics are pooled across trials; the standard error accounts for the
    between-trial clustering.
    """
    if trials < 1 or samples_per_trial < 1:
        raise InvalidInput("need at least one trial and one sample per trial")
    if m.n != inst.n or (m.field is not inst.field):
        raise InvalidInput("moments and instance disagree on dimension or field")
    per_trial = []
    any_mass = False
    for t in range(trials):
        v = sample_sphere_uniform(inst.n, inst.field, rng)
        cov = contract_direction_matrix(m, v)
        w, basis = np.linalg.eigh(cov)
        w = np.clip(w.real, 0.0, None)
        tr = float(np.sum(w))
        if tr <= 1e-14 * max(1.0, float(np.max(np.abs(cov)))):
            continue
        any_mass = True
        u = basis * np.sqrt(w / tr)
        z = sample_standard(u.shape[1], samples_per_trial, rng, inst.field)
        xs = z @ u.T
        norms = np.linalg.norm(xs, axis=1)
        keep = norms > 1e-12
        xs = xs[keep] / norms[keep, None]
        if xs.shape[0] == 0:
            continue
        vals = evaluate_batch(inst, xs)
        best = int(np.argmax(vals))
        per_trial.append((vals, xs[best], xs if keep_samples else None))
    if not any_mass:
        raise DegenerateMoments("all contracted covariance matrices were numerically zero")
    return pooled_outcome(inst, per_trial, keep_samples=keep_samples)
