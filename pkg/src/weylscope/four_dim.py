"""Four-dimensional Weyl tensors: Hodge star, W = W+ + W-, spectra and the sigma basis.

Orientation is fixed by ``e1 ^ e2 ^ e3 ^ e4``.  Self-dual and anti-self-dual
forms are represented by compatible almost complex structures ``J`` (each of
End-trace norm 2) with the quaternion relations ``J3 = J1 J2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import tensor_core as tc
from . import weyl_algebra as wa

N = 4


def _levi_civita(n=N):
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


EPSILON = _levi_civita()


def _require_4d(a):
    if np.shape(a)[-1] != N:
        raise ValueError(f"four-dimensional input required, got trailing size {np.shape(a)[-1]}")


def hodge_star(f) -> np.ndarray:
    """Hodge star on 2-forms (batched over leading axes)."""
    f = np.asarray(f, dtype=float)
    _require_4d(f)
    return 0.5 * np.einsum("ijkl,...ij->...kl", EPSILON, f)


def wedge_pairing(f, g) -> float:
    """Coefficient of ``e1^e2^e3^e4`` in ``alpha ^ beta`` by brute-force antisymmetrization."""
    a = np.swapaxes(np.asarray(f, float), -1, -2)   # alpha_ij = F[j, i]
    b = np.swapaxes(np.asarray(g, float), -1, -2)
    total = 0.0
    for perm in itertools.permutations(range(4)):
        total += EPSILON[perm] * a[perm[0], perm[1]] * b[perm[2], perm[3]]
    return total / 4.0


def _pair_project(t, sign, axes):
    """Apply ``(1 + sign*star)/2`` on the index pair at ``axes``."""
    i, j = axes
    moved = np.moveaxis(t, (i, j), (-2, -1))
    out = 0.5 * (moved + sign * hodge_star(moved))
    return np.moveaxis(out, (-2, -1), (i, j))


def _standard_triples():
    e = np.eye(N)
    j1 = tc.wedge(e[0], e[1]) + tc.wedge(e[2], e[3])
    j2 = tc.wedge(e[0], e[2]) + tc.wedge(e[3], e[1])
    k1 = tc.wedge(e[0], e[1]) - tc.wedge(e[2], e[3])
    k2 = tc.wedge(e[0], e[2]) - tc.wedge(e[3], e[1])
    return np.array([j1, j2, j1 @ j2]), np.array([k1, k2, k1 @ k2])


STANDARD_PLUS, STANDARD_MINUS = _standard_triples()


@dataclass(frozen=True)
class SDBasis:
    plus: np.ndarray   # (3, 4, 4), self-dual, each of norm 2
    minus: np.ndarray  # (3, 4, 4), anti-self-dual, each of norm 2

    def defects(self) -> dict[str, float]:
        allf = np.concatenate([self.plus, self.minus])
        gram = np.einsum("aij,bij->ab", allf, allf)
        return {
            "self_dual": tc.norm(hodge_star(self.plus) - self.plus),
            "anti_self_dual": tc.norm(hodge_star(self.minus) + self.minus),
            "gram": tc.norm(gram - 4.0 * np.eye(6)),
        }


def sd_basis(frame: np.ndarray | None = None) -> SDBasis:
    """Standard self-dual/anti-self-dual triples, optionally rotated by ``frame`` in SO(4)."""
    plus, minus = STANDARD_PLUS, STANDARD_MINUS
    if frame is not None:
        q = np.asarray(frame, dtype=float)
        if np.linalg.det(q) < 0:
            raise ValueError("frame must be orientation preserving")
        plus = q @ plus @ q.T
        minus = q @ minus @ q.T
    return SDBasis(plus, minus)


@dataclass(frozen=True)
class WeylSpectrum:
    lambda_plus: np.ndarray   # ascending unless built from prescribed spectra
    lambda_minus: np.ndarray
    J_plus: np.ndarray        # (3, 4, 4): W(J_k^+) = lambda_k^+ J_k^+
    J_minus: np.ndarray

    @property
    def omega_plus(self) -> np.ndarray:
        return tc.endo_to_bilinear(self.J_plus)

    @property
    def omega_minus(self) -> np.ndarray:
        return tc.endo_to_bilinear(self.J_minus)

    def defects(self, w=None) -> dict[str, float]:
        eye = np.eye(N)
        out = {"trace_plus": abs(float(np.sum(self.lambda_plus))),
               "trace_minus": abs(float(np.sum(self.lambda_minus)))}
        js = np.concatenate([self.J_plus, self.J_minus])
        out["complex"] = max(tc.norm(j @ j + eye) for j in js)
        out["orthogonal"] = max(tc.norm(j.T @ j - eye) for j in js)
        q = 0.0
        for jj in (self.J_plus, self.J_minus):
            q = max(q, tc.norm(jj[0] @ jj[1] + jj[1] @ jj[0]), tc.norm(jj[2] - jj[0] @ jj[1]))
        out["quaternion"] = q
        out["commute"] = max(tc.norm(tc.commutator(a, b))
                             for a in self.J_plus for b in self.J_minus)
        out["duality"] = max(tc.norm(hodge_star(self.J_plus) - self.J_plus),
                             tc.norm(hodge_star(self.J_minus) + self.J_minus))
        if w is not None:
            out["eigen"] = max(
                max(tc.norm(wa.extend(w, j) - lam * j) for lam, j in zip(self.lambda_plus, self.J_plus)),
                max(tc.norm(wa.extend(w, j) - lam * j) for lam, j in zip(self.lambda_minus, self.J_minus)))
        return out


@dataclass(frozen=True)
class SigmaBasis:
    sigma: np.ndarray  # (3, 3, 4, 4), sigma[i, j] = J_i^+ J_j^-

    def defects(self) -> dict[str, float]:
        eye = np.eye(N)
        flat = self.sigma.reshape(9, N, N)
        gram = np.einsum("aij,bij->ab", flat, flat)
        return {
            "symmetric": max(tc.norm(s - s.T) for s in flat),
            "involution": max(tc.norm(s @ s - eye) for s in flat),
            "trace": max(abs(float(np.trace(s))) for s in flat),
            "gram": tc.norm(gram - 4.0 * np.eye(9)),
        }


def sigma_basis(spec: WeylSpectrum) -> SigmaBasis:
    return SigmaBasis(np.einsum("iab,jbc->ijac", spec.J_plus, spec.J_minus))


# --------------------------------------------------------------------------
# W = W+ + W-


def split_weyl(w) -> tuple[np.ndarray, np.ndarray]:
    w = np.asarray(w, dtype=float)
    _require_4d(w)
    parts = []
    for sign in (1.0, -1.0):
        t = _pair_project(w, sign, (0, 1))
        parts.append(_pair_project(t, sign, (2, 3)))
    return parts[0], parts[1]


def build_weyl_from_spectra(lambda_plus, lambda_minus, frame: np.ndarray | None = None,
                            tol: float = 1e-12):
    """Weyl tensor with ``W(J_k^pm) = lambda_k^pm J_k^pm`` for the (rotated) standard triples.

    Returns ``(W, spectrum, sigma_basis)``.
    """
    lp = np.asarray(lambda_plus, dtype=float)
    lm = np.asarray(lambda_minus, dtype=float)
    if lp.shape != (3,) or lm.shape != (3,):
        raise ValueError("each spectrum must have three entries")
    for lam in (lp, lm):
        if abs(lam.sum()) > tol * (1 + np.abs(lam).sum()):
            raise ValueError(f"spectrum {lam} does not sum to zero")
    basis = sd_basis(frame)
    # W(x,y,z,u) = 1/2 sum_k lambda_k omega_k(x,y) omega_k(z,u), omega = J^T
    w = 0.5 * (np.einsum("k,kba,kdc->abcd", lp, basis.plus, basis.plus)
               + np.einsum("k,kba,kdc->abcd", lm, basis.minus, basis.minus))
    spec = WeylSpectrum(lp, lm, basis.plus, basis.minus)
    return w, spec, sigma_basis(spec)


def random_spectrum(rng: np.random.Generator) -> np.ndarray:
    lam = rng.uniform(-1.0, 1.0, size=3)
    return lam - lam.mean()


def _eig_triples(w, triples):
    b = triples / 2.0
    m = np.einsum("kij,lij->kl", b, wa.extend(w, b))
    m = 0.5 * (m + m.T)
    vals, vecs = np.linalg.eigh(m)
    if np.linalg.det(vecs) < 0:
        vecs[:, 2] = -vecs[:, 2]
    forms = np.einsum("lk,lij->kij", vecs, triples)
    return vals, forms


def spectrum(w) -> WeylSpectrum:
    """Eigenvalues (ascending) and eigen-complex-structures of ``W+`` and ``W-``."""
    w = np.asarray(w, dtype=float)
    _require_4d(w)
    lp, jp = _eig_triples(w, STANDARD_PLUS)
    lm, jm = _eig_triples(w, STANDARD_MINUS)
    return WeylSpectrum(lp, lm, jp, jm)


# --------------------------------------------------------------------------
# executable statements


def check_shift(spec: WeylSpectrum, h) -> float:
    """Largest ``Lambda^pm`` component of ``{h, J_k^pm}`` for trace-free symmetric ``h``."""
    worst = 0.0
    for sign, js in ((1.0, spec.J_plus), (-1.0, spec.J_minus)):
        for j in js:
            a = tc.anticommutator(h, j)
            same = 0.5 * (a + sign * hodge_star(a))
            worst = max(worst, tc.norm(same), tc.norm(tc.proj_sym(a)))
    return worst


def check_eigsym(w, spec: WeylSpectrum, sigma: SigmaBasis) -> float:
    worst = 0.0
    for i in range(3):
        for j in range(3):
            s = sigma.sigma[i, j]
            lam = spec.lambda_plus[i] + spec.lambda_minus[j]
            worst = max(worst, tc.norm(wa.extend(w, s) - lam * s))
    return worst


def _anti0(a, b):
    s = tc.anticommutator(a, b)
    return s - np.trace(s) / s.shape[0] * np.eye(s.shape[0])


def check_supersym(w, f, g) -> tuple[float, float]:
    """Residuals of ``W{F,G} = {W F, G}_0 + {F, W G}_0`` and ``-W[F,G] = [W F, G] + [F, W G]``."""
    w = np.asarray(w, dtype=float)
    wf, wg = wa.extend(w, f), wa.extend(w, g)
    anti = wa.extend(w, tc.anticommutator(f, g)) - _anti0(wf, g) - _anti0(f, wg)
    comm = -wa.extend(w, tc.commutator(f, g)) - tc.commutator(wf, g) - tc.commutator(f, wg)
    return tc.norm(anti), tc.norm(comm)


def supersym_grid(w) -> tuple[float, float]:
    """Worst residuals over all pairs of basis 2-forms ``e_i ^ e_j``."""
    forms = tc.two_form_basis(np.shape(w)[0])
    ra = rc = 0.0
    for f in forms:
        for g in forms:
            a, c = check_supersym(w, f, g)
            ra, rc = max(ra, a), max(rc, c)
    return ra, rc


def supersym_search(rng: np.random.Generator, n: int = 5, trials: int = 20) -> dict:
    """Evaluate the two identities on random Weyl tensors in dimension ``n`` (reported, not asserted)."""
    ra, rc, scale = [], [], []
    for _ in range(trials):
        w = wa.random_weyl(rng, n)
        a, c = supersym_grid(w)
        ra.append(a)
        rc.append(c)
        scale.append(tc.norm(w))
    return {"dim": n, "trials": trials, "max_anti": float(max(ra)), "max_comm": float(max(rc)),
            "min_anti": float(min(ra)), "min_comm": float(min(rc)), "mean_norm_w": float(np.mean(scale))}


def ew_split_4d(w, rank_tol: float = wa.RANK_TOL) -> wa.SymmetrySpaceBasis:
    """``E_W`` assembled as ``S_W`` plus the kernel of ``W`` on 2-forms."""
    w = np.asarray(w, dtype=float)
    _require_4d(w)
    s_w = wa.solve_space(w, "S_W", rank_tol).basis
    a_w = wa.restricted_kernel(w, "skew", rank_tol)
    basis = np.concatenate([s_w, a_w]) if len(a_w) else s_w
    return wa.SymmetrySpaceBasis("E_W", basis, len(basis))


def kernel_dims_pm(w, tol: float = 1e-9) -> tuple[int, int]:
    """Dimensions of ``ker W+`` on Lambda+ and ``ker W-`` on Lambda-."""
    spec = spectrum(w)
    scale = max(np.abs(spec.lambda_plus).max(), np.abs(spec.lambda_minus).max(), 0.0)
    cut = tol * max(scale, 1e-300)
    return (int(np.sum(np.abs(spec.lambda_plus) <= cut)),
            int(np.sum(np.abs(spec.lambda_minus) <= cut)))


@dataclass(frozen=True)
class SymkerReport:
    lambda_plus: tuple[float, ...]
    lambda_minus: tuple[float, ...]
    kernel_dim_plus: int
    kernel_dim_minus: int
    h_norm: float
    preconditions_ok: bool
    violations: tuple[str, ...]
    conclusion_ok: bool   # kernel dims are 1 wherever W^pm != 0, or vacuous


def symker_report(w, h, tol: float = 1e-9) -> SymkerReport:
    w = np.asarray(w, dtype=float)
    h = np.asarray(h, dtype=float)
    scale = 1 + tc.norm(w)
    violations = []
    if tc.norm(h - h.T) > tol * (1 + tc.norm(h)):
        violations.append("h not symmetric")
    if abs(np.trace(h)) > tol * (1 + tc.norm(h)):
        violations.append("h not trace-free")
    if tc.norm(wa.residual_deg1(w, h)) > tol * scale * (1 + tc.norm(h)):
        violations.append("h not in E_W")
    if tc.norm(wa.extend(w, h)) > tol * scale * (1 + tc.norm(h)):
        violations.append("W(h) != 0")
    wp, wm = split_weyl(w)
    spec = spectrum(w)
    kp, km = kernel_dims_pm(w, tol)
    hn = tc.norm(h)
    ok = True
    if hn > tol and not violations:
        if tc.norm(wp) > tol and kp != 1:
            ok = False
        if tc.norm(wm) > tol and km != 1:
            ok = False
    return SymkerReport(tuple(map(float, spec.lambda_plus)), tuple(map(float, spec.lambda_minus)),
                        kp, km, hn, not violations, tuple(violations), ok)


def admissible_symmetric(w, rank_tol: float = wa.RANK_TOL) -> np.ndarray:
    """Basis of trace-free symmetric ``h`` in ``E_W`` with ``W(h) = 0``."""
    w = np.asarray(w, dtype=float)
    sym = tc.sym_basis(N)
    deg1 = wa.residual_operator(w, "deg1", "sym")
    wh = wa.extend(w, sym).reshape(len(sym), -1).T
    tr = np.array([[np.trace(s) for s in sym]])
    a = np.concatenate([deg1, wh, tr])
    coeffs = wa.null_space(a, rank_tol)
    return np.einsum("kb,kij->bij", coeffs, sym)


# --------------------------------------------------------------------------
# <W_X, W_Y> = c |W|^2 <X, Y>

FOUR_ID_CONSTANT = 0.25


def weyl_gram(w) -> np.ndarray:
    """``<W_X, W_Y>`` for frame vectors: full contraction over the last three slots."""
    return np.einsum("abcd,ebcd->ae", w, w)


def check_4id(w, constant: float = FOUR_ID_CONSTANT) -> float:
    w = np.asarray(w, dtype=float)
    _require_4d(w)
    gram = weyl_gram(w)
    return float(np.max(np.abs(gram - constant * tc.norm(w) ** 2 * np.eye(N))))


def four_id_constant(w) -> float:
    """Best single constant ``c`` with ``<W_X, W_Y> ~ c |W|^2 delta``."""
    n2 = tc.norm(w) ** 2
    return float(np.trace(weyl_gram(w)) / (N * n2)) if n2 > 0 else float("nan")


def nullity_singular_values(w) -> np.ndarray:
    """Singular values of ``X -> W_X``."""
    w = np.asarray(w, dtype=float)
    return np.linalg.svd(w.reshape(w.shape[0], -1), compute_uv=False)
