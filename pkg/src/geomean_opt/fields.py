"""Field-generic dense self-adjoint linear algebra and sampling primitives.

Every matrix in the package is a plain numpy array whose dtype is dictated by
a :class:`Field` tag: float64 for the real field, complex128 for the complex
field.  Both fields share one code path; complex-specific behaviour (conjugate
transposes, circular symmetry of Gaussians) falls out of the dtype.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotPSD


class Field(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float64 if self is Field.REAL else np.complex128)

    @classmethod
    def from_str(cls, s: str) -> "Field":
        try:
            return cls(s.lower())
        except ValueError:
            raise InvalidInput(f"unknown field {s!r}; expected 'real' or 'complex'")


def substream(seed: int, *names) -> np.random.Generator:
    """Named, reproducible RNG substream derived from a single root seed.

    Substreams with distinct name tuples are statistically independent, and
    the mapping is stable across processes (no reliance on hash randomization).
    """
    key = tuple(
        int.from_bytes(hashlib.sha256(repr(n).encode()).digest()[:4], "little")
        for n in names
    )
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Self-adjoint part (A + A†)/2.  Bit-identical on already-Hermitian input."""
    return (a + a.conj().T) / 2


def as_hermitian(a, field: Field, *, name: str = "matrix") -> np.ndarray:
    """Validate and coerce a square array to a Hermitian matrix over `field`."""
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64) if arr.dtype.kind == "c" else arr)):
        raise InvalidInput(f"{name} has non-finite entries")
    if field is Field.REAL:
        if arr.dtype.kind == "c":
            if np.max(np.abs(arr.imag)) > 0:
                raise InvalidInput(f"{name} tagged real but has imaginary entries")
            arr = arr.real
        arr = arr.astype(np.float64, copy=False)
    else:
        arr = arr.astype(np.complex128, copy=False)
    return symmetrize(arr)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order plus the matching unitary basis."""

    eigenvalues: np.ndarray  # (n,) real, descending
    basis: np.ndarray  # (n, n), columns are eigenvectors

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ self.basis.conj().T


def eigh(h: np.ndarray) -> SpectralDecomposition:
    """Spectral decomposition of a self-adjoint matrix, eigenvalues descending."""
    h = np.asarray(h)
    if not np.all(np.isfinite(h.view(np.float64) if h.dtype.kind == "c" else h)):
        raise InvalidInput("eigh: non-finite entries")
    w, v = np.linalg.eigh(h)
    return SpectralDecomposition(eigenvalues=w[::-1].copy(), basis=v[:, ::-1].copy())


def simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex.

    Sort-and-threshold algorithm; exact in O(n log n).
    """
    v = np.asarray(v, dtype=np.float64)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


@dataclass(frozen=True)
class DensityMatrix:
    """PSD, trace-one matrix: the feasible variable of the spectral relaxation."""

    mat: np.ndarray
    field: Field

    def __post_init__(self):
        m = as_hermitian(self.mat, self.field, name="density matrix")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > 1e-9:
            raise InvalidInput(f"density matrix trace {tr} != 1")
        wmin = float(np.linalg.eigvalsh(m)[0])
        if wmin < -1e-9:
            raise NotPSD(f"density matrix has eigenvalue {wmin} < -1e-9")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def n(self) -> int:
        return self.mat.shape[0]


def project_spectrahedron(h: np.ndarray, field: Field) -> DensityMatrix:
    """Frobenius-nearest PSD trace-one matrix.

    Eigendecompose, project the eigenvalue vector onto the probability
    simplex, reconstruct in the same basis.
    """
    dec = eigh(as_hermitian(h, field))
    lam = simplex_project(dec.eigenvalues)
    x = (dec.basis * lam) @ dec.basis.conj().T
    return DensityMatrix(x, field)


RANK_EPS = 1e-8  # eigenvalues below RANK_EPS * lambda_max count as zero


def gram_factor(x: np.ndarray, field: Field, *, psd_tol: float = 1e-8):
    """Factor a PSD matrix as X = U U† with U of shape (n, r), r = numerical rank.

    Raises NotPSD when the most negative eigenvalue is below -psd_tol relative
    to the spectral norm.
    """
    dec = eigh(as_hermitian(x, field))
    lam = dec.eigenvalues
    scale = max(float(lam[0]), 0.0)
    if lam.size and float(lam[-1]) < -psd_tol * max(1.0, scale):
        raise NotPSD(f"matrix has eigenvalue {lam[-1]:.3e}, not PSD")
    r = int(np.sum(lam > RANK_EPS * scale)) if scale > 0 else 0
    u = dec.basis[:, :r] * np.sqrt(np.maximum(lam[:r], 0.0))
    return u, r


def sample_standard(n: int, count: int, rng: np.random.Generator, field: Field) -> np.ndarray:
    """`count` draws from the standard Gaussian on K^n (unit second moments)."""
    if field is Field.REAL:
        return rng.standard_normal((count, n))
    z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return z / np.sqrt(2.0)


def sample_gaussian(cov: np.ndarray, count: int, rng: np.random.Generator, field: Field) -> np.ndarray:
    """Gaussian samples with covariance `cov`, via cov = U U† and x = U z.

    Complex samples are circularly symmetric.  Returns an array of shape
    (count, n); a zero covariance yields all-zero samples.
    """
    u, r = gram_factor(cov, field, psd_tol=1e-10)
    n = np.asarray(cov).shape[0]
    if r == 0:
        return np.zeros((count, n), dtype=field.dtype)
    z = sample_standard(r, count, rng, field)
    return z @ u.T


def sample_sphere_uniform(n: int, field: Field, rng: np.random.Generator) -> np.ndarray:
    """One uniform draw from the unit sphere of K^n (Gaussian direction)."""
    if n < 1:
        raise InvalidInput("dimension must be >= 1")
    while True:
        z = sample_standard(n, 1, rng, field)[0]
        nrm = np.linalg.norm(z)
        if nrm > 1e-6:
            return z / nrm
