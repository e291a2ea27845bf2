"""Pointwise conformal C-space analysis.

Index contract between the Cotton tensor and the Weyl tensor::

    (W(zeta) + C)[u, x, y] = sum_d zeta_d W[d, u, x, y] + C[u, x, y]

i.e. ``zeta`` fills the first Weyl slot and the remaining three slots line up
with ``C(U, X, Y)`` in order.  Under a conformal change ``e^{2f} g`` of an
Einstein metric the solved field is ``zeta = -df``.

1-form fields (``zeta_field`` arguments) map coordinates to coordinate
covector components; all returned tensors are in the orthonormal frame of
:func:`curvature_field.orthonormal_frame`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import curvature_field as cf
from . import four_dim as fd
from . import tensor_core as tc
from . import weyl_algebra as wa

STATUSES = ("solved", "weyl_zero_cotton_zero", "weyl_zero_cotton_nonzero", "obstructed")
SOLVE_TOL = 1e-8
WEYL_TOL = 1e-6
CONDITIONING_WARN = 1e-6
PROBE_RADIUS = 1e-2
PROBE_TOL = 1e-3
INDEX_CONTRACT = "C[u,x,y] + sum_d zeta[d] W[d,u,x,y] = 0"


class PreconditionError(ValueError):
    """The data at the point do not satisfy an operation's precondition."""


class ConditioningWarning(UserWarning):
    pass


def _check_pair(w, c):
    w = np.asarray(w, dtype=float)
    c = np.asarray(c, dtype=float)
    n = w.shape[0]
    if w.shape != (n,) * 4 or c.shape != (n,) * 3:
        raise ValueError(f"shape mismatch: W {w.shape} vs C {c.shape}")
    return w, c


def contract_first(w, v) -> np.ndarray:
    """``W(v, ., ., .)``."""
    return np.einsum("d,duxy->uxy", np.asarray(v, dtype=float), w)


def cspace_residual(w, c, zeta) -> float:
    return tc.norm(contract_first(w, zeta) + c)


@dataclass(frozen=True)
class CSpaceSolution:
    zeta: np.ndarray
    residual: float
    status: str
    weyl_norm: float
    cotton_norm: float
    warnings: tuple[str, ...] = ()

    @property
    def is_cspace(self) -> bool:
        return self.status in ("solved", "weyl_zero_cotton_zero")


def solve_zeta(w, c, tol: float = SOLVE_TOL, weyl_tol: float = WEYL_TOL) -> CSpaceSolution:
    """Solve ``W(zeta, ., ., .) + C = 0`` at one point.

    In dimension 4 the closed form ``zeta = -(4/|W|^2) <W_X, C>`` is used;
    other dimensions fall back to least squares.  ``solved`` means the
    residual is at most ``tol * (1 + |C|)``.
    """
    w, c = _check_pair(w, c)
    n = w.shape[0]
    wn, cn = tc.norm(w), tc.norm(c)
    if wn <= weyl_tol:
        status = "weyl_zero_cotton_zero" if cn <= weyl_tol else "weyl_zero_cotton_nonzero"
        return CSpaceSolution(np.zeros(n), cn, status, wn, cn)
    notes = []
    if wn < CONDITIONING_WARN:
        notes.append("ill_conditioned_small_weyl")
        warnings.warn("solving with a nearly vanishing Weyl tensor", ConditioningWarning)
    if n == 4:
        zeta = -np.einsum("duxy,uxy->d", w, c) / (fd.FOUR_ID_CONSTANT * wn ** 2)
    else:
        a = w.reshape(n, -1).T
        zeta = np.linalg.lstsq(a, -c.ravel(), rcond=None)[0]
    res = cspace_residual(w, c, zeta)
    status = "solved" if res <= tol * (1 + cn) else "obstructed"
    return CSpaceSolution(zeta, res, status, wn, cn, tuple(notes))


def obstruction(w, c) -> np.ndarray:
    """``|W|^2 C_abc - 4 (W_dijk C_ijk) W_dabc`` (4D); vanishes exactly on solvable data.

    It equals ``|W|^2 (C + W(zeta*, ., ., .))`` for the least-squares ``zeta*``.
    """
    w, c = _check_pair(w, c)
    if w.shape[0] != 4:
        raise ValueError("the obstruction invariant is defined in dimension 4")
    pairing = np.einsum("dijk,ijk->d", w, c)
    return tc.norm(w) ** 2 * c - 4.0 * np.einsum("d,dabc->abc", pairing, w)


def obstruction_literal(w, c) -> np.ndarray:
    """The invariant with the opposite relative sign, kept for comparison."""
    w, c = _check_pair(w, c)
    pairing = np.einsum("dijk,ijk->d", w, c)
    return tc.norm(w) ** 2 * c + 4.0 * np.einsum("d,dabc->abc", pairing, w)


def obstruction_agrees(w, c, tol: float = SOLVE_TOL) -> bool:
    """Whether the obstruction test and :func:`solve_zeta` reach the same verdict."""
    sol = solve_zeta(w, c, tol)
    if sol.weyl_norm <= WEYL_TOL:
        return True
    vanishes = tc.norm(obstruction(w, c)) <= tol * (1 + sol.cotton_norm) * sol.weyl_norm ** 2
    return vanishes == (sol.status == "solved")


# --------------------------------------------------------------------------
# differential checks along a 1-form field


def _field_data(m, zeta_field, x, traceable, step, in_box=True):
    z, nab = cf.covariant_derivative_covector(m, zeta_field, x, step, traceable, in_box)
    return z, nab


def _h_zeta_bilinear(b: cf.CurvatureBundle, z, nab):
    return b.h - nab + np.outer(z, z)


def h_zeta(m: cf.ChartMetric, zeta_field: Callable, x, traceable: bool = False,
           step: float = PROBE_RADIUS, bundle: cf.CurvatureBundle | None = None) -> np.ndarray:
    """``h - nabla zeta + zeta (x) zeta`` as an endomorphism in the frame."""
    b = bundle or cf.curvature_bundle(m, x, level=2)
    z, nab = _field_data(m, zeta_field, x, traceable, step)
    return tc.bilinear_to_endo(_h_zeta_bilinear(b, z, nab))


def check_GNl(m: cf.ChartMetric, zeta_field: Callable, x, traceable: bool = False,
              step: float = PROBE_RADIUS, bundle: cf.CurvatureBundle | None = None) -> float:
    """Norm of the cyclic Weyl-contraction residual of ``h_zeta``."""
    b = bundle or cf.curvature_bundle(m, x, level=2)
    hz = h_zeta(m, zeta_field, x, traceable, step, b)
    return tc.norm(wa.residual_deg1(b.W, hz))


@dataclass(frozen=True)
class EWResidual:
    best_f: float
    residual_sym: float
    dzeta_norm: float


def _ew_from(b, z, nab) -> EWResidual:
    n = b.dim
    t = _h_zeta_bilinear(b, z, nab)
    dz = nab - nab.T
    best_f = float(np.trace(t)) / n
    tf = tc.proj_sym(t) - best_f * np.eye(n)
    return EWResidual(best_f, tc.norm(tf), tc.norm(dz))


def einstein_weyl_residual(m: cf.ChartMetric, zeta_field: Callable, x, traceable: bool = False,
                           step: float = PROBE_RADIUS) -> EWResidual:
    """Trace-free symmetric part of ``h - nabla zeta + zeta (x) zeta + d zeta / 2 - f g``."""
    b = cf.curvature_bundle(m, x, level=2)
    z, nab = _field_data(m, zeta_field, x, traceable, step)
    return _ew_from(b, z, nab)


@dataclass(frozen=True)
class BachReport:
    bach_norm: float
    extend_norm: float
    deg1_residual: float
    dzeta_norm: float
    notes: tuple[str, ...] = ()


def bach_consequence_check(m: cf.ChartMetric, zeta_field: Callable, x, traceable: bool = False,
                           step: float = PROBE_RADIUS) -> BachReport:
    """``|B|``, ``|W(h_zeta)|``, the cyclic residual of ``h_zeta`` and ``|d zeta|``."""
    b = cf.curvature_bundle(m, x, level=4)
    z, nab = _field_data(m, zeta_field, x, traceable, step)
    hz = tc.bilinear_to_endo(_h_zeta_bilinear(b, z, nab))
    notes = list(b.notes)
    if tc.norm(b.W) <= WEYL_TOL:
        notes.append("weyl_vanishes_conformally_flat" if b.dim >= 4 else "dimension_3")
    return BachReport(tc.norm(b.B), tc.norm(wa.extend(b.W, hz)),
                      tc.norm(wa.residual_deg1(b.W, hz)), tc.norm(nab - nab.T), tuple(notes))


@dataclass(frozen=True)
class DivCReport:
    residual: float
    skew_norm: float
    cspace_residual: float
    literal_residual: float   # with the opposite sign on the quadratic term


def divC_identity_check(m: cf.ChartMetric, zeta_field: Callable, x, traceable: bool = False,
                        step: float = PROBE_RADIUS, pre_tol: float = 1e-5) -> DivCReport:
    """``|hat-delta C + W(nabla zeta - (n-3) zeta (x) zeta)|`` and the skew part of hat-delta C.

    The quadratic sign follows from differentiating ``C = -W(zeta, ., ., .)``
    with ``delta W = -(n-3) C``; ``literal_residual`` reports the ``+`` form.
    Refuses (``PreconditionError``) unless ``zeta_field`` solves the C-space
    equation at ``x`` to ``pre_tol * (1 + |C|)``.
    """
    b = cf.curvature_bundle(m, x, level=4)
    z, nab = _field_data(m, zeta_field, x, traceable, step)
    pre = cspace_residual(b.W, b.C, z)
    if pre > pre_tol * (1 + tc.norm(b.C)):
        raise PreconditionError(f"zeta does not solve the C-space equation here (residual {pre:.3e})")
    def res(sign):
        rhs = tc.bilinear_to_endo(nab + sign * (b.dim - 3) * np.outer(z, z))
        return tc.norm(b.hat_delta_C + tc.endo_to_bilinear(wa.extend(b.W, rhs)))

    return DivCReport(res(-1.0), tc.norm(tc.proj_skew(b.hat_delta_C)), pre, res(1.0))


# --------------------------------------------------------------------------
# the solved field and point classification


def solved_zeta_field(m: cf.ChartMetric, tol: float = SOLVE_TOL) -> Callable:
    """Coordinate covector field ``y -> zeta(y)`` from pointwise solves (level-3 bundles)."""
    def zeta(y):
        b = cf.curvature_bundle(m, y, level=3, in_box=False)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConditioningWarning)
            sol = solve_zeta(b.W, b.C, tol)
        return cf.covector_from_frame(m, y, sol.zeta)
    return zeta


@dataclass(frozen=True)
class PointDiagnostics:
    point: tuple[float, ...]
    dim: int
    classification: str
    status: str
    weyl_norm: float
    weyl_plus_norm: Optional[float]
    weyl_minus_norm: Optional[float]
    cotton_norm: float
    bach_norm: float
    zeta: tuple[float, ...]
    residual: float
    obstruction_norm: Optional[float]
    dzeta_norm: Optional[float]
    ew_residual: Optional[float]
    ew_best_f: Optional[float]
    gnl_residual: Optional[float]
    cotton_identity_residual: float
    anomaly: bool
    notes: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _classify(sol: CSpaceSolution, zeta_tol: float) -> str:
    if sol.status == "weyl_zero_cotton_zero":
        return "conformally flat"
    if sol.status in ("obstructed", "weyl_zero_cotton_nonzero"):
        return "not a C-space"
    if tc.norm(sol.zeta) <= zeta_tol:
        return "Cotton space"
    return "conformal C-space"


def classify_point(m: cf.ChartMetric, x, tol: float | None = None,
                   probe_radius: float = PROBE_RADIUS, probe_tol: float = PROBE_TOL,
                   weyl_tol: float = WEYL_TOL, probe: bool = True) -> PointDiagnostics:
    """All pointwise C-space diagnostics at ``x``.

    ``tol`` defaults to the algebraic tolerance for exact jets and to
    ``1e-5`` for finite-difference metrics.  The ``d zeta`` probe
    differentiates the pointwise-solved field on a stencil of radius
    ``probe_radius``; ``anomaly`` flags ``|W| > weyl_tol`` together with
    ``|d zeta| > probe_tol``.
    """
    if tol is None:
        tol = SOLVE_TOL if m.strategy == "analytic" else 1e-5
    b = cf.curvature_bundle(m, x, level=4)
    notes = list(b.notes)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        sol = solve_zeta(b.W, b.C, tol, weyl_tol)
    notes.extend(sol.warnings)
    wp = wm = obs = None
    if b.dim == 4:
        plus, minus = fd.split_weyl(b.W)
        wp, wm = tc.norm(plus), tc.norm(minus)
        obs = tc.norm(obstruction(b.W, b.C))
        if wp <= weyl_tol and sol.weyl_norm > weyl_tol:
            notes.append("weyl_plus_vanishes")
        if wm <= weyl_tol and sol.weyl_norm > weyl_tol:
            notes.append("weyl_minus_vanishes")
    dz = ew = ewf = gnl = None
    anomaly = False
    if probe and sol.status == "solved":
        zf = solved_zeta_field(m, tol)
        z, nab = cf.covariant_derivative_covector(m, zf, b.point, probe_radius, False, False)
        ewr = _ew_from(b, z, nab)
        dz, ew, ewf = ewr.dzeta_norm, ewr.residual_sym, ewr.best_f
        gnl = tc.norm(wa.residual_deg1(b.W, tc.bilinear_to_endo(_h_zeta_bilinear(b, z, nab))))
        anomaly = sol.weyl_norm > weyl_tol and dz > probe_tol
    elif sol.status == "weyl_zero_cotton_zero":
        dz = 0.0
    return PointDiagnostics(
        point=tuple(float(v) for v in b.point), dim=b.dim,
        classification=_classify(sol, max(tol, 1e-9) * 10), status=sol.status,
        weyl_norm=sol.weyl_norm, weyl_plus_norm=wp, weyl_minus_norm=wm,
        cotton_norm=sol.cotton_norm, bach_norm=tc.norm(b.B),
        zeta=tuple(float(v) for v in sol.zeta), residual=sol.residual, obstruction_norm=obs,
        dzeta_norm=dz, ew_residual=ew, ew_best_f=ewf, gnl_residual=gnl,
        cotton_identity_residual=b.cotton_identity_residual(), anomaly=anomaly,
        notes=tuple(notes))
