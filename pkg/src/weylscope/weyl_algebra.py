"""Algebraic Weyl tensors and the linear spaces of endomorphisms they single out.

A Weyl tensor ``W`` acts on endomorphisms by
``W(h)(x, y) = sum_i W(e_i, x, h e_i, y)`` (returned as an endomorphism, see
:mod:`weylscope.tensor_core` for the storage convention).  The spaces solved
for here are

* ``E_W``: endomorphisms ``h`` with
  ``W(x, y, hz, .) + W(y, z, hx, .) + W(z, x, hy, .) = 0``;
* ``S_W`` / ``A_W``: the symmetric / skew elements of ``E_W``;
* ``g_W``: derivations, ``W(hx,y,z,u) + W(x,hy,z,u) + W(x,y,hz,u) + W(x,y,z,hu) = 0``.

All residual maps are linear in ``h`` and accept a leading batch axis, which is
how the kernel operators are assembled.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from . import tensor_core as tc

RANK_TOL = 1e-9
SPACE_TAGS = ("E_W", "S_W", "A_W", "g_W")


class TrivialWeylSpaceWarning(UserWarning):
    """Raised when asked for the Weyl part of a tensor in dimension < 4."""


@dataclass(frozen=True)
class SymmetrySpaceBasis:
    space_tag: str
    basis: np.ndarray  # shape (dimension, n, n), orthonormal under the End-trace product
    dimension: int

    def projector(self) -> np.ndarray:
        flat = self.basis.reshape(self.dimension, -1)
        return flat.T @ flat


# --------------------------------------------------------------------------
# Weyl tensors


def weyl_part(t) -> np.ndarray:
    """Weyl part of an algebraic curvature tensor, ``R - h . g`` (no checks)."""
    t = np.asarray(t, dtype=float)
    n = t.shape[0]
    if n < 3:
        raise ValueError("dimension must be at least 3")
    ric = tc.ricci_contraction(t)
    scal = np.trace(ric)
    h = (ric - scal / (2 * (n - 1)) * np.eye(n)) / (n - 2)
    return t - tc.kulkarni_nomizu(h, np.eye(n))


def curvature_part(t) -> np.ndarray:
    """Project onto algebraic curvature tensors (pair symmetries plus first Bianchi)."""
    t = np.asarray(t, dtype=float)
    t = 0.5 * (t - t.transpose(1, 0, 2, 3))
    t = 0.5 * (t - t.transpose(0, 1, 3, 2))
    t = 0.5 * (t + t.transpose(2, 3, 0, 1))
    # on S^2(Lambda^2) the Bianchi map is 3x the totally skew part
    return t - tc.bianchi_map(t) / 3.0


def project_to_weyl(t) -> np.ndarray:
    """Orthogonal projection of a rank-4 tensor onto algebraic Weyl tensors.

    In dimension 3 the space is zero: the zero tensor is returned and a
    :class:`TrivialWeylSpaceWarning` is emitted.
    """
    t = np.asarray(t, dtype=float)
    n = t.shape[0]
    if t.shape != (n, n, n, n):
        raise ValueError(f"expected a rank-4 square tensor, got {t.shape}")
    tc.check_dim(n)
    if n < 4:
        warnings.warn("no algebraic Weyl tensors exist for n < 4", TrivialWeylSpaceWarning,
                      stacklevel=2)
        return np.zeros_like(t)
    return weyl_part(curvature_part(t))


def weyl_defects(w) -> dict[str, float]:
    w = np.asarray(w, dtype=float)
    return {
        "pair_antisymmetry": max(tc.norm(w + w.transpose(1, 0, 2, 3)),
                                 tc.norm(w + w.transpose(0, 1, 3, 2))),
        "pair_symmetry": tc.norm(w - w.transpose(2, 3, 0, 1)),
        "bianchi": tc.norm(tc.bianchi_map(w)),
        "trace": tc.norm(tc.ricci_contraction(w)),
    }


def as_weyl(w, tol: float = 1e-12) -> np.ndarray:
    """Validate an algebraic Weyl tensor; tolerance is relative to ``1 + |W|``."""
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    if w.shape != (n, n, n, n):
        raise ValueError(f"expected shape (n, n, n, n), got {w.shape}")
    bad = {k: v for k, v in weyl_defects(w).items() if v > tol * (1 + tc.norm(w))}
    if bad:
        raise ValueError(f"not an algebraic Weyl tensor: {bad}")
    return w


def random_weyl(rng: np.random.Generator, n: int) -> np.ndarray:
    return project_to_weyl(tc.random_uniform(rng, (n, n, n, n)))


# --------------------------------------------------------------------------
# W acting on endomorphisms


def extend(w, h) -> np.ndarray:
    """``W(h) = sum_i W(e_i, ., h e_i, .)`` as an endomorphism; ``h`` may be batched."""
    beta = np.einsum("iacb,...ci->...ab", w, h)
    return np.swapaxes(beta, -1, -2)


def _slot(w, h, k):
    """``W`` with ``h`` applied in slot ``k`` (0-based), batched over ``h``."""
    spec = {0: "mbcd,...ma->...abcd", 1: "amcd,...mb->...abcd",
            2: "abmd,...mc->...abcd", 3: "abcm,...md->...abcd"}[k]
    return np.einsum(spec, w, h)


def _cyclic(t):
    """``t(x,y,z,u) + t(y,z,x,u) + t(z,x,y,u)`` on the last four axes."""
    lead = tuple(range(t.ndim - 4))
    a, b, c, d = (len(lead) + i for i in range(4))
    return t + t.transpose(*lead, c, a, b, d) + t.transpose(*lead, b, c, a, d)


def _adj(h):
    return np.swapaxes(h, -1, -2)


def _map_deg1(w, h):
    return _cyclic(_slot(w, h, 2))


def _map_deg11(w, h):
    return _slot(w, h, 0) + _slot(w, h, 1) - _slot(w, h, 2) - _slot(w, h, 3)


def _map_lie(w, h):
    return _slot(w, h, 0) + _slot(w, h, 1) + _slot(w, h, 2) + _slot(w, h, 3)


def _with_forms(w, h, forms):
    """Broadcast ``h`` (batch, n, n) against a stack of test forms and ``W`` of them."""
    return h[..., None, :, :], forms, extend(w, forms)


def _map_degplus(w, h, forms=None):
    forms = tc.two_form_basis(w.shape[0]) if forms is None else forms
    hb, f, wf = _with_forms(w, h, forms)
    return extend(w, hb @ f - f @ _adj(hb)) - (wf @ hb - _adj(hb) @ wf)


def _map_degminus(w, h, forms=None):
    forms = tc.two_form_basis(w.shape[0]) if forms is None else forms
    hb, f, wf = _with_forms(w, h, forms)
    return extend(w, hb @ f + f @ _adj(hb)) - (wf @ hb + _adj(hb) @ wf)


def _map_mainalg(w, h, forms=None):
    forms = tc.two_form_basis(w.shape[0]) if forms is None else forms
    hb, f, wf = _with_forms(w, h, forms)
    return extend(w, hb @ f) - wf @ hb


def _map_degplus_sym(w, h):
    return _map_degplus(w, h, forms=tc.sym_basis(w.shape[0]))


def _map_eqvlie(w, h, forms=None):
    # derivation condition for the induced action on 2-forms:
    # W(hF + F h*) = -W(F) h - h* W(F)
    forms = tc.two_form_basis(w.shape[0]) if forms is None else forms
    hb, f, wf = _with_forms(w, h, forms)
    return extend(w, hb @ f + f @ _adj(hb)) + wf @ hb + _adj(hb) @ wf


def _map_eqvlie_literal(w, h, forms=None):
    # the variant with h* F in place of F h*; kept for comparison only
    forms = tc.two_form_basis(w.shape[0]) if forms is None else forms
    hb, f, wf = _with_forms(w, h, forms)
    return extend(w, hb @ f + _adj(hb) @ f) + wf @ hb + _adj(hb) @ wf


RESIDUAL_MAPS = {
    "deg1": _map_deg1,
    "deg11": _map_deg11,
    "lie": _map_lie,
    "degplus": _map_degplus,
    "degminus": _map_degminus,
    "mainalg": _map_mainalg,
    "degplus_sym": _map_degplus_sym,
    "eqvlie": _map_eqvlie,
    "eqvlie_literal": _map_eqvlie_literal,
}


def _max_block_norm(res, block_axes):
    res = np.asarray(res)
    if res.ndim == block_axes:
        return float(np.sqrt(np.sum(res ** 2)))
    flat = res.reshape(-1, int(np.prod(res.shape[-block_axes:])))
    return float(np.max(np.linalg.norm(flat, axis=1)))


def residual_deg1(w, h) -> np.ndarray:
    """Cyclic residual over ``(x, y, z)``; zero exactly when ``h`` lies in ``E_W``."""
    return _map_deg1(np.asarray(w, float), np.asarray(h, float))


def residual_deg11(w, h) -> float:
    return _max_block_norm(_map_deg11(np.asarray(w, float), np.asarray(h, float)), 4)


def residual_lie(w, h) -> float:
    return _max_block_norm(_map_lie(np.asarray(w, float), np.asarray(h, float)), 4)


def residual_degplus(w, h) -> float:
    """Max over the basis ``e_i ^ e_j`` of ``|W(hF - Fh*) - W(F)h + h*W(F)|``."""
    return _max_block_norm(_map_degplus(np.asarray(w, float), np.asarray(h, float)), 2)


def residual_degminus(w, h) -> float:
    return _max_block_norm(_map_degminus(np.asarray(w, float), np.asarray(h, float)), 2)


def residual_mainalg(w, h) -> float:
    return _max_block_norm(_map_mainalg(np.asarray(w, float), np.asarray(h, float)), 2)


def residual_degplus_sym(w, h) -> float:
    return _max_block_norm(_map_degplus_sym(np.asarray(w, float), np.asarray(h, float)), 2)


def residual_eqvlie(w, h) -> float:
    return _max_block_norm(_map_eqvlie(np.asarray(w, float), np.asarray(h, float)), 2)


# --------------------------------------------------------------------------
# kernels


def _domain(n, name):
    if name == "end":
        return tc.endo_basis(n)
    if name == "sym":
        return tc.sym_basis(n)
    if name == "skew":
        return tc.skew_basis(n)
    raise ValueError(f"unknown domain {name!r}")


def residual_operator(w, name: str, domain: str = "end") -> np.ndarray:
    """Matrix of a residual map on an orthonormal basis of ``domain``."""
    w = np.asarray(w, dtype=float)
    basis = _domain(w.shape[0], domain)
    images = RESIDUAL_MAPS[name](w, basis)
    return images.reshape(len(basis), -1).T


def null_space(a: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal null space (columns); singular values below ``rank_tol * s_max`` count as zero."""
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(a.shape[1])
    rank = int(np.sum(s > rank_tol * s[0]))
    return vt[rank:].T


def kernel(w, name: str, domain: str = "end", rank_tol: float = RANK_TOL) -> np.ndarray:
    """Kernel of a residual map as a stack of orthonormal endomorphisms."""
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    basis = _domain(n, domain)
    coeffs = null_space(residual_operator(w, name, domain), rank_tol)
    return np.einsum("kb,kij->bij", coeffs, basis)


def solve_space(w, tag: str, rank_tol: float = RANK_TOL) -> SymmetrySpaceBasis:
    if tag not in SPACE_TAGS:
        raise ValueError(f"tag must be one of {SPACE_TAGS}")
    name, domain = {"E_W": ("deg1", "end"), "S_W": ("deg1", "sym"),
                    "A_W": ("deg1", "skew"), "g_W": ("lie", "end")}[tag]
    basis = kernel(w, name, domain, rank_tol)
    return SymmetrySpaceBasis(tag, basis, len(basis))


def restricted_kernel(w, domain: str, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Kernel of ``h -> W(h)`` on symmetric (``"sym"``) or skew (``"skew"``) tensors."""
    w = np.asarray(w, dtype=float)
    basis = _domain(w.shape[0], domain)
    images = extend(w, basis)
    op = np.einsum("kij,lij->kl", basis, images)
    coeffs = null_space(op, rank_tol)
    return np.einsum("kb,kij->bij", coeffs, basis)


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles between spans of two stacks of endomorphisms."""
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0)
    return subspace_angles(a.reshape(len(a), -1).T, b.reshape(len(b), -1).T)


def same_subspace(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    if len(a) != len(b):
        return False
    return bool(np.all(principal_angles(a, b) <= tol))


def contained_in(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    """Whether span(a) lies in span(b) (b orthonormal)."""
    if len(a) == 0:
        return True
    if len(b) == 0:
        return False
    fa = a.reshape(len(a), -1)
    fb = b.reshape(len(b), -1)
    resid = fa - (fa @ fb.T) @ fb
    return bool(np.max(np.linalg.norm(resid, axis=1) / np.maximum(np.linalg.norm(fa, axis=1), 1e-300)) <= tol)


# --------------------------------------------------------------------------
# structural statements about E_W and g_W


def _scale(*xs):
    return float(np.prod([1.0 + tc.norm(x) for x in xs]))


def check_bracket_closure(w, h1, h2, tol: float = 1e-8) -> float:
    """Lie-residual of ``[h1, h2]``; the commutator of two elements of ``E_W`` lies in ``g_W``."""
    _warn_unless_in_ew(w, (h1, h2), tol)
    return residual_lie(w, tc.commutator(h1, h2))


def check_anticommutator_closure(w, h1, h2, tol: float = 1e-8) -> float:
    _warn_unless_in_ew(w, (h1, h2), tol)
    return tc.norm(residual_deg1(w, tc.anticommutator(h1, h2)))


def _warn_unless_in_ew(w, hs, tol):
    for h in hs:
        r = tc.norm(residual_deg1(w, h))
        if r > tol * _scale(w, h):
            warnings.warn(f"precondition violated: h not in E_W (residual {r:.3e})", stacklevel=3)


def check_cor1(w, h) -> float:
    """Max over ``e_i ^ e_j`` of ``|W(h F h*) - h* W(F) h|``."""
    w = np.asarray(w, dtype=float)
    forms = tc.two_form_basis(w.shape[0])
    lhs = extend(w, h @ forms @ h.T)
    rhs = h.T @ extend(w, forms) @ h
    return _max_block_norm(lhs - rhs, 2)


def check_cor1_slots(w, h) -> float:
    """``|W(hx, hy, z, u) - W(x, y, hz, hu)|`` over all frame quadruples."""
    w = np.asarray(w, dtype=float)
    lhs = np.einsum("mpcd,ma,pb->abcd", w, h, h)
    rhs = np.einsum("abmp,mc,pd->abcd", w, h, h)
    return tc.norm(lhs - rhs)


@dataclass(frozen=True)
class KernelObstructionReport:
    ker_residual: float        # max |W(skew part of h)| over a basis of E_W
    ker2_residual: float       # max |W(sym part of h)| over a basis of g_W
    dim_E_W: int
    dim_g_W: int
    dim_ker_lambda2: int       # kernel of W restricted to 2-forms
    dim_ker_sym: int           # kernel of W restricted to symmetric tensors
    dim_A_W: int

    @property
    def max_residual(self) -> float:
        return max(self.ker_residual, self.ker2_residual)


def check_kernel_obstructions(w, rank_tol: float = RANK_TOL) -> KernelObstructionReport:
    w = np.asarray(w, dtype=float)
    ew = solve_space(w, "E_W", rank_tol).basis
    gw = solve_space(w, "g_W", rank_tol).basis
    ker = max((tc.norm(extend(w, tc.proj_skew(h))) for h in ew), default=0.0)
    ker2 = max((tc.norm(extend(w, tc.proj_sym(h))) for h in gw), default=0.0)
    return KernelObstructionReport(
        ker_residual=ker, ker2_residual=ker2, dim_E_W=len(ew), dim_g_W=len(gw),
        dim_ker_lambda2=len(restricted_kernel(w, "skew", rank_tol)),
        dim_ker_sym=len(restricted_kernel(w, "sym", rank_tol)),
        dim_A_W=solve_space(w, "A_W", rank_tol).dimension)


@dataclass(frozen=True)
class LatticeReport:
    """Kernels of the residual operators and how they compare with ``ker(deg1)``."""

    dims: dict[str, int]
    max_angle: dict[str, float]       # largest principal angle against ker(deg1)
    equal_to_deg1: dict[str, bool]
    degplus_in_deg1: bool
    lie_equals_eqvlie: bool
    kernels: dict[str, np.ndarray] = field(repr=False, default_factory=dict)

    @property
    def ok(self) -> bool:
        return (all(self.equal_to_deg1[k] for k in ("deg11", "degminus", "degplus_sym"))
                and self.degplus_in_deg1 and self.lie_equals_eqvlie)


def equivalence_lattice(w, rank_tol: float = RANK_TOL, angle_tol: float = 1e-8) -> LatticeReport:
    names = ("deg1", "deg11", "degplus", "degminus", "mainalg", "degplus_sym", "lie", "eqvlie")
    ks = {nm: kernel(w, nm, "end", rank_tol) for nm in names}
    ref = ks["deg1"]
    angles, equal = {}, {}
    for nm in ("deg11", "degplus", "degminus", "mainalg", "degplus_sym"):
        ang = principal_angles(ks[nm], ref)
        angles[nm] = float(ang.max(initial=0.0))
        equal[nm] = same_subspace(ks[nm], ref, angle_tol)
    return LatticeReport(
        dims={k: len(v) for k, v in ks.items()},
        max_angle=angles,
        equal_to_deg1=equal,
        degplus_in_deg1=contained_in(ks["degplus"], ref, angle_tol),
        lie_equals_eqvlie=same_subspace(ks["lie"], ks["eqvlie"], angle_tol),
        kernels=ks,
    )


def kernel_dimension_lambda2(w, rank_tol: float = RANK_TOL) -> int:
    return len(restricted_kernel(w, "skew", rank_tol))
