"""Problem instances, generators, and the on-disk instance format.

An instance is an ordered list of PSD forms A_1, ..., A_d over one field; the
objective it induces on the unit sphere is the geometric mean
(prod_i <x, A_i x>)^(1/d).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotPSD, NotPositiveDefinite, ParseError
from .fields import Field, as_hermitian, eigh, sample_sphere_uniform

PSD_TOL = 1e-10  # relative to the spectral norm of each form

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class ProblemInstance:
    field: Field
    n: int
    forms: tuple

    def __post_init__(self):
        if len(self.forms) < 1:
            raise InvalidInput("instance needs at least one form")
        checked = []
        for idx, a in enumerate(self.forms):
            h = as_hermitian(a, self.field, name=f"form {idx}")
            if h.shape[0] != self.n:
                raise InvalidInput(f"form {idx} is {h.shape[0]}x{h.shape[0]}, expected n={self.n}")
            w = np.linalg.eigvalsh(h)
            scale = max(float(w[-1]), 0.0)
            if scale <= 0.0:
                raise InvalidInput(f"form {idx} is identically zero (or negative)")
            if float(w[0]) < -PSD_TOL * scale:
                raise NotPSD(f"form {idx} has eigenvalue {w[0]:.3e}, not PSD")
            h.setflags(write=False)
            checked.append(h)
        object.__setattr__(self, "forms", tuple(checked))

    @property
    def d(self) -> int:
        return len(self.forms)


def form_values(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """The d quadratic form values <x, A_i x> at a point (no sphere check)."""
    x = np.asarray(x, dtype=inst.field.dtype)
    return np.array([float(np.real(x.conj() @ (a @ x))) for a in inst.forms])


def evaluate(inst: ProblemInstance, x: np.ndarray) -> float:
    """Geometric mean of the form values at a unit vector.

    Computed as exp of the mean of logs; returns 0.0 as soon as any form
    value is non-positive (underflow of the product).
    """
    x = np.asarray(x, dtype=inst.field.dtype)
    nrm = float(np.linalg.norm(x))
    if abs(nrm - 1.0) > 1e-9:
        raise InvalidInput(f"evaluate requires a unit vector, got norm {nrm}")
    vals = form_values(inst, x)
    if np.any(vals <= 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(vals))))


def evaluate_batch(inst: ProblemInstance, xs: np.ndarray) -> np.ndarray:
    """Vectorized geometric-mean objective over rows of unit vectors."""
    xs = np.asarray(xs, dtype=inst.field.dtype)
    vals = np.empty((inst.d, xs.shape[0]))
    for i, a in enumerate(inst.forms):
        vals[i] = np.einsum("sb,sb->s", xs.conj() @ a, xs).real
    out = np.zeros(xs.shape[0])
    ok = np.all(vals > 0.0, axis=0)
    if np.any(ok):
        out[ok] = np.exp(np.mean(np.log(vals[:, ok]), axis=0))
    return out


def gen_rank_one(vectors, scales=None, field: Field | None = None) -> ProblemInstance:
    """Instance with forms scale_i * v_i v_i† from unit vectors v_i."""
    vecs = [np.asarray(v) for v in vectors]
    if not vecs:
        raise InvalidInput("need at least one vector")
    if field is None:
        field = Field.COMPLEX if any(v.dtype.kind == "c" for v in vecs) else Field.REAL
    n = vecs[0].size
    if scales is None:
        scales = [1.0] * len(vecs)
    forms = []
    for v, s in zip(vecs, scales):
        v = v.astype(field.dtype)
        nrm = float(np.linalg.norm(v))
        if nrm < 1e-12:
            raise InvalidInput("zero vector cannot define a rank-one form")
        if abs(nrm - 1.0) > 1e-9:
            raise InvalidInput(f"vectors must be unit norm, got {nrm}")
        if not s > 0:
            raise InvalidInput("scales must be positive")
        forms.append(s * np.outer(v, v.conj()))
    return ProblemInstance(field=field, n=n, forms=tuple(forms))


def gen_random_rank_one(n: int, d: int, field: Field, rng: np.random.Generator) -> ProblemInstance:
    """d unit-scale rank-one forms with directions uniform on the sphere."""
    if n < 1 or d < 1:
        raise InvalidInput("need n, d >= 1")
    vecs = [sample_sphere_uniform(n, field, rng) for _ in range(d)]
    return gen_rank_one(vecs, field=field)


def gen_monomial(beta) -> ProblemInstance:
    """Diagonal 0/1 forms whose geometric mean to the d-th power is x^(2*beta)."""
    b = [int(v) for v in beta]
    if any(v < 0 for v in b):
        raise InvalidInput(f"exponents must be non-negative, got {beta}")
    d = sum(b)
    if d < 1:
        raise InvalidInput("monomial must have positive total degree")
    n = len(b)
    forms = []
    for i, bi in enumerate(b):
        e = np.zeros((n, n))
        e[i, i] = 1.0
        forms.extend([e] * bi)
    return ProblemInstance(field=Field.REAL, n=n, forms=tuple(forms))


def gen_kantorovich(a, field: Field = Field.REAL) -> ProblemInstance:
    """Two-form instance (A, A^{-1}) for positive definite A."""
    h = as_hermitian(a, field, name="A")
    dec = eigh(h)
    lam = dec.eigenvalues
    if float(lam[-1]) <= 1e-10 * float(lam[0]):
        raise NotPositiveDefinite(f"A has eigenvalue {lam[-1]:.3e}; needs to be positive definite")
    inv = (dec.basis / lam) @ dec.basis.conj().T
    return ProblemInstance(field=field, n=h.shape[0], forms=(h, inv))


def icosahedral_axes() -> np.ndarray:
    """Coefficient vectors of the six linear factors of the icosahedral sextic."""
    p = GOLDEN
    return np.array(
        [
            [1.0, p, 0.0],
            [1.0, -p, 0.0],
            [0.0, 1.0, p],
            [0.0, 1.0, -p],
            [p, 0.0, 1.0],
            [-p, 0.0, 1.0],
        ]
    )


def icosahedral_maximizers() -> np.ndarray:
    """The twelve unit vectors where the icosahedral objective attains 1.

    These are the icosahedron vertex directions, the cyclic permutations of
    (0, ±1, ±phi) normalized.
    """
    p = GOLDEN
    pts = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            base = np.array([0.0, s1, s2 * p])
            for shift in range(3):
                pts.append(np.roll(base, shift))
    return np.array(pts) / math.sqrt(1.0 + p * p)


def gen_icosahedral() -> ProblemInstance:
    """Six rank-one forms realizing the icosahedrally symmetric degree-12 objective.

    The product of the six form values equals the squared, normalized
    product of the six linear factors; the global constant is split evenly
    across the forms so each is c * w w^T with c = (25 (2 phi - 3)^2)^(1/6).
    The objective has maximum exactly 1 on the sphere, attained at the
    twelve vertex directions, and vanishes on the six great circles
    orthogonal to the factor axes.
    """
    p = GOLDEN
    c = (25.0 * (2.0 * p - 3.0) ** 2) ** (1.0 / 6.0)
    forms = tuple(c * np.outer(w, w) for w in icosahedral_axes())
    return ProblemInstance(field=Field.REAL, n=3, forms=forms)


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph with unit edge weights."""

    n: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            if len(e) != 2:
                raise InvalidInput(f"edge {e} must have two endpoints")
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InvalidInput(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidInput(f"edge {e} out of range for n={self.n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidInput(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def is_cubic(self) -> bool:
        return bool(np.all(self.degrees() == 3))


def complete_graph(n: int) -> GraphSpec:
    return GraphSpec(n=n, edges=tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def prism_graph() -> GraphSpec:
    """Triangular prism: two triangles joined by a perfect matching (3-regular, n=6)."""
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
    return GraphSpec(n=6, edges=tuple(edges))


def maxcut_quadratic(g: GraphSpec) -> np.ndarray:
    """The PSD matrix (I - A/3)/2 whose cube maximum is the normalized max cut."""
    if not g.is_cubic():
        raise InvalidInput("max-cut construction requires a 3-regular graph")
    return 0.5 * (np.eye(g.n) - g.adjacency() / 3.0)


def gen_maxcut(g: GraphSpec, k: int) -> ProblemInstance:
    """Cut-certifying instance: (I - A/3)/2 plus k copies of n e_i e_i^T per coordinate.

    d = n*k + 1 forms.  On the scaled hypercube {±1/sqrt(n)}^n the coordinate
    forms all equal 1, so the product reduces to the cut quadratic there.
    """
    if k < 1:
        raise InvalidInput("power per coordinate must be >= 1")
    q = maxcut_quadratic(g)
    n = g.n
    forms = [q]
    for i in range(n):
        e = np.zeros((n, n))
        e[i, i] = float(n)
        forms.extend([e] * k)
    return ProblemInstance(field=Field.REAL, n=n, forms=tuple(forms))


# ---------------------------------------------------------------------------
# On-disk formats
# ---------------------------------------------------------------------------


def _matrix_to_doc(a: np.ndarray, field: Field) -> dict:
    doc = {"re": np.real(a).tolist()}
    if field is Field.COMPLEX:
        doc["im"] = np.imag(a).tolist()
    return doc


def _matrix_from_doc(doc: dict, field: Field, name: str) -> np.ndarray:
    try:
        re = np.array(doc["re"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{name}: missing or malformed 're' block") from exc
    if re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise ParseError(f"{name}: 're' must be a square matrix, got shape {re.shape}")
    if field is Field.COMPLEX:
        im = np.array(doc.get("im", np.zeros_like(re)), dtype=np.float64)
        if im.shape != re.shape:
            raise ParseError(f"{name}: 'im' shape {im.shape} does not match 're' {re.shape}")
        mat = re + 1j * im
    else:
        if "im" in doc and np.max(np.abs(np.array(doc["im"]))) > 0:
            raise ParseError(f"{name}: real-field document carries imaginary entries")
        mat = re
    herm_err = float(np.max(np.abs(mat - mat.conj().T)))
    if herm_err > 1e-8 * max(1.0, float(np.max(np.abs(mat)))):
        raise ParseError(f"{name}: matrix is not self-adjoint (deviation {herm_err:.3e})")
    return mat


def serialize_instance(inst: ProblemInstance) -> bytes:
    doc = {
        "field": inst.field.value,
        "n": inst.n,
        "forms": [_matrix_to_doc(a, inst.field) for a in inst.forms],
    }
    return json.dumps(doc, indent=1).encode("utf-8")


def parse_instance(data: bytes | str) -> ProblemInstance:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    for key in ("field", "n", "forms"):
        if key not in doc:
            raise ParseError(f"instance document missing key {key!r}")
    field = Field.from_str(str(doc["field"]))
    n = int(doc["n"])
    mats = [_matrix_from_doc(f, field, f"form {i}") for i, f in enumerate(doc["forms"])]
    for i, m in enumerate(mats):
        if m.shape[0] != n:
            raise ParseError(f"form {i} has dimension {m.shape[0]}, header says {n}")
    # instance construction re-validates PSD-ness and names the offending form
    return ProblemInstance(field=field, n=n, forms=tuple(mats))


def serialize_graph(g: GraphSpec) -> bytes:
    return json.dumps({"n": g.n, "edges": [list(e) for e in g.edges]}).encode("utf-8")


def parse_graph(data: bytes | str) -> GraphSpec:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if "n" not in doc or "edges" not in doc:
        raise ParseError("graph document needs keys 'n' and 'edges'")
    try:
        return GraphSpec(n=int(doc["n"]), edges=tuple(tuple(e) for e in doc["edges"]))
    except InvalidInput as exc:
        raise ParseError(str(exc)) from exc
