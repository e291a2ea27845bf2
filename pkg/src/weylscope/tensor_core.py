"""Dense multilinear algebra on a Euclidean space with an orthonormal frame.

Conventions used throughout the package:

* An endomorphism ``h`` is stored as its matrix ``M`` in the frame, so that
  ``h e_i = sum_j M[j, i] e_j``.  The associated bilinear form is
  ``beta(x, y) = g(h x, y)``, i.e. ``beta = M.T``.  Symmetric tensors are
  therefore stored identically in either reading.
* A 2-form ``alpha`` is stored as its skew endomorphism ``F`` with
  ``alpha = g(F ., .)``; hence ``F = alpha.T``.  ``wedge(e1, e2)`` maps
  ``e1 -> e2``.
* A rank-4 tensor ``T[a, b, c, d] = T(e_a, e_b, e_c, e_d)``; for curvature
  tensors ``T(x, y, z, u) = g(T(x, y) z, u)``.
* Every inner product is the plain component sum.  For rank-2 tensors this is
  the End-trace product ``<A, B> = sum_i <A e_i, B e_i> = tr(A^T B)``, under
  which a compatible almost complex structure has norm 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DIM = 8
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class EuclideanSpace:
    """Dimension and frame labelling shared by the tensor routines."""

    dim: int
    frame: tuple[str, ...] = ()

    def __post_init__(self):
        check_dim(self.dim)
        if not self.frame:
            object.__setattr__(self, "frame", tuple(f"e{i + 1}" for i in range(self.dim)))
        if len(self.frame) != self.dim:
            raise ValueError("frame labels must match the dimension")

    def identity(self) -> np.ndarray:
        return np.eye(self.dim)


def check_dim(n: int, minimum: int = 3) -> int:
    if not minimum <= n <= MAX_DIM:
        raise ValueError(f"dimension must lie in [{minimum}, {MAX_DIM}], got {n}")
    return n


def _square(a, name="tensor") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def as_endo(a) -> np.ndarray:
    a = _square(a, "endomorphism")
    if not np.all(np.isfinite(a)):
        raise ValueError("endomorphism has non-finite entries")
    return a


def as_sym(a, tol: float = ZERO_TOL) -> np.ndarray:
    a = _square(a, "symmetric tensor")
    if np.max(np.abs(a - a.T), initial=0.0) > tol * (1 + np.max(np.abs(a), initial=0.0)):
        raise ValueError("tensor is not symmetric")
    return 0.5 * (a + a.T)


def as_two_form(a, tol: float = ZERO_TOL) -> np.ndarray:
    a = _square(a, "2-form")
    if np.max(np.abs(a + a.T), initial=0.0) > tol * (1 + np.max(np.abs(a), initial=0.0)):
        raise ValueError("2-form must be skew-symmetric")
    return 0.5 * (a - a.T)


def as_curvature(t, tol: float = ZERO_TOL) -> np.ndarray:
    """Validate a rank-4 array with antisymmetry inside both index pairs."""
    t = np.asarray(t, dtype=float)
    n = t.shape[0]
    if t.shape != (n, n, n, n):
        raise ValueError(f"curvature tensor must have shape (n, n, n, n), got {t.shape}")
    scale = 1 + np.max(np.abs(t), initial=0.0)
    if (np.max(np.abs(t + t.transpose(1, 0, 2, 3))) > tol * scale
            or np.max(np.abs(t + t.transpose(0, 1, 3, 2))) > tol * scale):
        raise ValueError("tensor lacks pair antisymmetry")
    return t


def endo_to_bilinear(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(m, -1, -2)


bilinear_to_endo = endo_to_bilinear


def wedge(u, v) -> np.ndarray:
    """Skew endomorphism of the 2-form ``u ^ v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.outer(v, u) - np.outer(u, v)


def two_form_basis(n: int) -> np.ndarray:
    """The standard basis ``e_i ^ e_j`` (i < j) of skew endomorphisms, stacked."""
    eye = np.eye(n)
    return np.array([wedge(eye[i], eye[j]) for i in range(n) for j in range(i + 1, n)])


def sym_basis(n: int) -> np.ndarray:
    """Orthonormal basis of symmetric matrices under the End-trace product."""
    out = []
    for i in range(n):
        for j in range(i, n):
            e = np.zeros((n, n))
            if i == j:
                e[i, i] = 1.0
            else:
                e[i, j] = e[j, i] = np.sqrt(0.5)
            out.append(e)
    return np.array(out)


def skew_basis(n: int) -> np.ndarray:
    """Orthonormal basis of skew matrices under the End-trace product."""
    return two_form_basis(n) * np.sqrt(0.5)


def endo_basis(n: int) -> np.ndarray:
    """Elementary matrices ``E_kl``; orthonormal and ordered like ``ravel``."""
    return np.eye(n * n).reshape(n * n, n, n)


def kulkarni_nomizu(h, k) -> np.ndarray:
    """Kulkarni-Nomizu product of two symmetric bilinear forms."""
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    if h.shape != k.shape or h.ndim != 2:
        raise ValueError(f"dimension mismatch: {h.shape} vs {k.shape}")
    return (np.einsum("ac,bd->abcd", h, k) + np.einsum("bd,ac->abcd", h, k)
            - np.einsum("ad,bc->abcd", h, k) - np.einsum("bc,ad->abcd", h, k))


def bianchi_map(t) -> np.ndarray:
    """Cyclic sum ``T(x,y,z,.) + T(y,z,x,.) + T(z,x,y,.)`` as a rank-4 array."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 4:
        raise ValueError("Bianchi map needs a rank-4 tensor")
    # T[y,z,x,u] as a function of (x,y,z,u) is the transpose (2,0,1,3)
    return t + t.transpose(2, 0, 1, 3) + t.transpose(1, 2, 0, 3)


def proj_sym(h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    return 0.5 * (h + np.swapaxes(h, -1, -2))


def proj_skew(h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    return 0.5 * (h - np.swapaxes(h, -1, -2))


def inner(a, b) -> float:
    """Component-sum inner product (End-trace for rank 2)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sum(a * b))


def norm(a) -> float:
    return float(np.sqrt(np.sum(np.square(np.asarray(a, dtype=float)))))


def ricci_contraction(t) -> np.ndarray:
    """``Ric(y, u) = sum_i T(e_i, y, e_i, u)``."""
    return np.einsum("abad->bd", np.asarray(t, dtype=float))


def total_trace(t) -> float:
    return float(np.trace(ricci_contraction(t)))


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


def random_uniform(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=shape)


def random_sym(rng: np.random.Generator, n: int) -> np.ndarray:
    return proj_sym(random_uniform(rng, (n, n)))


def random_two_form(rng: np.random.Generator, n: int) -> np.ndarray:
    return proj_skew(random_uniform(rng, (n, n)))


def random_pair_antisymmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random element of Lambda^2 (x) Lambda^2 (no pair-swap symmetry imposed)."""
    t = random_uniform(rng, (n, n, n, n))
    t = t - t.transpose(1, 0, 2, 3)
    return 0.25 * (t - t.transpose(0, 1, 3, 2))


def random_rotation(rng: np.random.Generator, n: int, proper: bool = True) -> np.ndarray:
    """Haar-distributed orthogonal matrix, in SO(n) when ``proper``."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if proper and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def transform(t, frame: np.ndarray) -> np.ndarray:
    """Components of a covariant tensor in the frame ``f_a = sum_i frame[i, a] e_i``."""
    t = np.asarray(t, dtype=float)
    for axis in range(t.ndim):
        t = np.moveaxis(np.tensordot(t, frame, axes=([axis], [0])), -1, axis)
    return t
