"""Pointwise curvature of a metric given on a coordinate box.

Every quantity at a point ``x`` depends only on the 4-jet of the metric at
``x``.  A :class:`ChartMetric` produces that jet either exactly (automatic
differentiation of jax-traceable component functions, strategy ``"analytic"``)
or by central finite differences with one Richardson level (strategy
``"fd"``).  The jet is turned into a Taylor polynomial and pushed through a
single jitted pipeline (Christoffel symbols through the Bach tensor), after
which everything is expressed in the orthonormal frame obtained from the
Cholesky factor of ``g(x)``.

Curvature sign: ``R(X, Y)Z = -nabla^2_{X,Y} Z + nabla^2_{Y,X} Z`` and
``R(x, y, z, u) = g(R(x, y)z, u)``, so a round sphere has ``R(e1,e2,e1,e2) > 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import jax
import jax.numpy as jnp
import numpy as np

from . import tensor_core as tc

jax.config.update("jax_enable_x64", True)

TOL_FD_LOW = 1e-6    # quantities built from <= 2 metric derivatives
TOL_FD_HIGH = 1e-4   # Cotton/Bach-level quantities
FD_NOISE_LIMIT = 1e-4
# step multipliers per derivative order; roundoff grows like eps / h^k
FD_ORDER_SCALE = {1: 1.0, 2: 3.0, 3: 8.0, 4: 20.0}
MIN_FD_STEP = 1e-10

_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


# --------------------------------------------------------------------------
# metrics


@dataclass
class ChartMetric:
    """Metric components ``g_ij(x)`` on a coordinate box.

    ``components`` maps a coordinate vector to an ``(n, n)`` array.  With the
    ``"analytic"`` strategy it must be traceable by jax (written with
    ``jax.numpy``); ``"fd"`` accepts any callable.
    """

    dim: int
    components: Callable
    box: Optional[np.ndarray] = None
    strategy: str = "analytic"
    fd_step: float = 1e-3
    richardson: bool = True
    name: str = ""
    log_factor: Optional[Callable] = None   # g = exp(2 f) * base when set
    base: Optional["ChartMetric"] = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        tc.check_dim(self.dim)
        if self.strategy not in ("analytic", "fd"):
            raise ValueError(f"unknown derivative strategy {self.strategy!r}")
        if self.fd_step < MIN_FD_STEP:
            raise ValueError(f"finite-difference step {self.fd_step} underflows")
        if self.box is not None:
            self.box = np.asarray(self.box, dtype=float)
            if self.box.shape != (self.dim, 2) or np.any(self.box[:, 0] >= self.box[:, 1]):
                raise ValueError("box must be an (n, 2) array of increasing bounds")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        fast = self._cache.get("eval")
        if fast is None:
            fast = self._cache["eval"] = _fast_evaluator(self.components, x)
        return np.asarray(fast(x), dtype=float)

    def with_strategy(self, strategy: str, **kw) -> "ChartMetric":
        return replace(self, strategy=strategy, **kw)

    def check_point(self, x, in_box: bool = True) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"point must have {self.dim} coordinates")
        if in_box and self.box is not None and (np.any(x < self.box[:, 0]) or np.any(x > self.box[:, 1])):
            raise ValueError(f"point {x.tolist()} lies outside the chart box")
        g = self(x)
        if np.max(np.abs(g - g.T)) > 1e-12 * (1 + np.max(np.abs(g))):
            raise ValueError("metric components are not symmetric")
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise ValueError(f"metric is not positive definite at {x.tolist()}") from None
        return x

    def jet(self, x, order: int = 4, in_box: bool = True) -> tuple[np.ndarray, ...]:
        """``(g, dg, d2g, ...)``; derivative axes are appended last."""
        return self.jet_with_noise(x, order, in_box)[0]

    def jet_with_noise(self, x, order: int = 4, in_box: bool = True):
        """The jet and, for finite differences, the top-order Richardson discrepancy."""
        x = self.check_point(x, in_box)
        if self.strategy == "analytic":
            key = ("jet", order)
            if key not in self._cache:
                self._cache[key] = jax.jit(_nested_jacobians(self.components, order))
            return tuple(np.asarray(a) for a in self._cache[key](jnp.asarray(x))), 0.0
        return fd_jet(self, x, order, self.fd_step, self.richardson)


def _fast_evaluator(fun, x):
    """Jit ``fun`` when it traces; otherwise evaluate it directly."""
    try:
        jitted = jax.jit(fun)
        ref = np.asarray(fun(x), dtype=float)
        if np.allclose(np.asarray(jitted(x)), ref, rtol=1e-14, atol=1e-14):
            return jitted
    except Exception:  # noqa: BLE001 - untraceable callables fall back
        pass
    return fun


def _nested_jacobians(fun, order):
    def jets(y):
        out = [fun(y)]
        f = fun
        for _ in range(order):
            f = jax.jacfwd(f)
            out.append(f(y))
        return tuple(out)
    return jets


def _multi_indices(n, k):
    return itertools.combinations_with_replacement(range(n), k)


def _fd_derivative(evaluate, n, combo, h):
    counts = [combo.count(i) for i in range(n)]
    axes = [i for i in range(n) if counts[i]]
    stencils = [_STENCILS[counts[i]] for i in axes]
    total = 0.0
    for choice in itertools.product(*[list(zip(*s)) for s in stencils]):
        offset = [0] * n
        weight = 1.0
        for ax, (off, wt) in zip(axes, choice):
            offset[ax] = off
            weight *= wt
        total = total + weight * evaluate(tuple(offset), h)
    return total / h ** len(combo)


def fd_jet(metric: ChartMetric, x, order: int, step: float, richardson: bool = True):
    """Metric jet by product central-difference stencils; returns ``(jet, noise)``.

    ``noise`` bounds the rounding error of the highest-order derivatives.
    """
    n = metric.dim
    x = np.asarray(x, dtype=float)
    values: dict = {}

    def evaluate(offset, h):
        key = (h, offset)
        if key not in values:
            values[key] = metric(x + h * np.asarray(offset, dtype=float))
        return values[key]

    jet = [metric(x)]
    noise = 0.0
    for k in range(1, order + 1):
        h = step * FD_ORDER_SCALE[k]
        if h < MIN_FD_STEP:
            raise ValueError("finite-difference step underflow")
        d = np.zeros((n, n) + (n,) * k)
        for combo in _multi_indices(n, k):
            coarse = _fd_derivative(evaluate, n, combo, h)
            if richardson:
                fine = _fd_derivative(evaluate, n, combo, h / 2)
                val = (4.0 * fine - coarse) / 3.0
            else:
                val = coarse
            for perm in set(itertools.permutations(combo)):
                d[(slice(None), slice(None)) + perm] = val
        jet.append(d)
        if k == order:
            noise = _roundoff_estimate(values, combo_order=k, h=h / 2 if richardson else h)
    return tuple(jet), noise


def _roundoff_estimate(values, combo_order, h):
    """Rounding error bound of the top-order stencils: eps |g| (sum |weights|) / h^k."""
    scale = max(float(np.max(np.abs(v))) for v in values.values())
    weight = 2.0 ** combo_order * (5.0 / 3.0)
    return float(np.finfo(float).eps * scale * weight / h ** combo_order)


def conformal_rescale(m: ChartMetric, f: Callable, name: str | None = None) -> ChartMetric:
    """The metric ``exp(2 f) g``; rescalings compose by adding the log-factors."""
    base = m.base if m.base is not None else m
    if m.log_factor is not None:
        prev = m.log_factor

        def total(y, prev=prev, f=f):
            return prev(y) + f(y)
    else:
        total = f
    numpy_mode = m.strategy == "fd"

    def comps(y, base=base, total=total):
        if numpy_mode and not isinstance(y, jax.core.Tracer):
            return np.exp(2.0 * np.asarray(total(y), dtype=float)) * np.asarray(base.components(y))
        return jnp.exp(2.0 * total(y)) * base.components(y)

    return ChartMetric(dim=m.dim, components=comps, box=m.box, strategy=m.strategy,
                       fd_step=m.fd_step, richardson=m.richardson,
                       name=name or f"{base.name}-conformal", log_factor=total, base=base)


# --------------------------------------------------------------------------
# the jitted geometric pipeline


def _taylor(jet):
    def poly(d):
        acc = jet[0]
        fact = 1.0
        for k in range(1, len(jet)):
            fact *= k
            t = jet[k]
            for _ in range(k):
                t = t @ d
            acc = acc + t / fact
        return acc
    return poly


_LETTERS = "abcdefghijpqrstuvw"


def _nabla(t, dt, gam):
    """Covariant derivative of a covariant tensor; derivative index first."""
    r = t.ndim
    idx = _LETTERS[:r]
    out = jnp.moveaxis(dt, -1, 0)
    for s in range(r):
        src = idx[:s] + "m" + idx[s + 1:]
        out = out - jnp.einsum(f"mk{idx[s]},{src}->k{idx}", gam, t)
    return out


def _kn(h, k):
    return (jnp.einsum("ac,bd->abcd", h, k) + jnp.einsum("bd,ac->abcd", h, k)
            - jnp.einsum("ad,bc->abcd", h, k) - jnp.einsum("bc,ad->abcd", h, k))


def _geometry(jet, level):
    n = jet[0].shape[0]
    metric = _taylor(jet)

    def christoffel(y):
        gi = jnp.linalg.inv(metric(y))
        dg = jax.jacfwd(metric)(y)
        return 0.5 * (jnp.einsum("kl,jli->kij", gi, dg) + jnp.einsum("kl,ilj->kij", gi, dg)
                      - jnp.einsum("kl,ijl->kij", gi, dg))

    def riemann(y):
        gam = christoffel(y)
        dgam = jax.jacfwd(christoffel)(y)
        usual = (jnp.einsum("rvsm->rsmv", dgam) - jnp.einsum("rmsv->rsmv", dgam)
                 + jnp.einsum("rml,lvs->rsmv", gam, gam) - jnp.einsum("rvl,lms->rsmv", gam, gam))
        return -jnp.einsum("ua,asmv->mvsu", metric(y), usual)

    def parts(y):
        g = metric(y)
        gi = jnp.linalg.inv(g)
        rm = riemann(y)
        ric = jnp.einsum("ac,abcd->bd", gi, rm)
        scal = jnp.einsum("bd,bd->", gi, ric)
        h = (ric - scal / (2.0 * (n - 1)) * g) / (n - 2)
        return rm, ric, scal, h, rm - _kn(h, g)

    def h_field(y):
        return parts(y)[3]

    def w_field(y):
        return parts(y)[4]

    def nabla_h(y):
        return _nabla(h_field(y), jax.jacfwd(h_field)(y), christoffel(y))

    def cotton(y):
        nh = nabla_h(y)
        return jnp.einsum("xyu->uxy", nh) - jnp.einsum("yxu->uxy", nh)

    def nabla_w(y):
        return _nabla(w_field(y), jax.jacfwd(w_field)(y), christoffel(y))

    def delta_w(y):
        return -jnp.einsum("ka,kabcd->bcd", jnp.linalg.inv(metric(y)), nabla_w(y))

    y0 = jnp.zeros(n)
    g = metric(y0)
    gi = jnp.linalg.inv(g)
    rm, ric, scal, h, w = parts(y0)
    out = {"g": g, "christoffel": christoffel(y0), "R": rm, "ric": ric, "scalar": scal,
           "h": h, "W": w}
    if level >= 3:
        out.update(nabla_h=nabla_h(y0), C=cotton(y0), nabla_W=nabla_w(y0), delta_W=delta_w(y0))
    if level >= 4:
        gam = christoffel(y0)
        ndw = _nabla(delta_w(y0), jax.jacfwd(delta_w)(y0), gam)
        nc = _nabla(cotton(y0), jax.jacfwd(cotton)(y0), gam)
        out["B"] = (jnp.einsum("ki,kxiy->xy", gi, ndw)
                    + jnp.einsum("ia,jb,ab,xijy->xy", gi, gi, h, w))
        out["nabla_C"] = nc
        out["hat_delta_C"] = jnp.einsum("ki,kaib->ab", gi, nc)
    return out


_geometry_jit = jax.jit(_geometry, static_argnums=1)


# --------------------------------------------------------------------------
# frame-level results


@dataclass(frozen=True)
class CurvatureBundle:
    """Curvature at a point, all components in the orthonormal frame ``frame``.

    ``frame[:, a]`` holds the coordinate components of ``e_a``.  ``C`` is stored
    in ``(U, X, Y)`` slot order, ``nabla_*`` arrays put the derivative direction
    first.  Fields past ``level`` are ``None``.
    """

    point: np.ndarray
    frame: np.ndarray
    level: int
    R: np.ndarray
    ric: np.ndarray
    scalar: float
    h: np.ndarray
    S: np.ndarray
    W: np.ndarray
    C: Optional[np.ndarray] = None
    nabla_h: Optional[np.ndarray] = None
    nabla_W: Optional[np.ndarray] = None
    delta_W: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None
    nabla_C: Optional[np.ndarray] = None
    hat_delta_C: Optional[np.ndarray] = None
    notes: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.R.shape[0]

    def cotton_identity_residual(self) -> float:
        """``|delta W + (n - 3) C|``."""
        return tc.norm(self.delta_W + (self.dim - 3) * self.C)

    def decomposition_residual(self) -> float:
        return tc.norm(self.R - self.W - self.S)

    def second_bianchi_residual(self) -> float:
        return tc.norm(second_bianchi(self.nabla_W, self.C))

    def bach_defects(self) -> tuple[float, float]:
        """Norm of the skew part and trace of ``B``."""
        return tc.norm(tc.proj_skew(self.B)), abs(float(np.trace(self.B)))


def second_bianchi(nabla_w, c) -> np.ndarray:
    """Cyclic sum of ``(nabla_X W)(Y, Z, U, T)`` plus ``(C_U ^ T - C_T ^ U)(X, Y, Z)``."""
    n = c.shape[0]
    eye = np.eye(n)
    cyc = nabla_w + nabla_w.transpose(2, 0, 1, 3, 4) + nabla_w.transpose(1, 2, 0, 3, 4)

    def wedge_t(cc):
        # (C_U ^ T)(X,Y,Z) = C(U,X,Y) g(Z,T) + C(U,Y,Z) g(X,T) + C(U,Z,X) g(Y,T)
        return (np.einsum("uxy,zt->xyzut", cc, eye) + np.einsum("uyz,xt->xyzut", cc, eye)
                + np.einsum("uzx,yt->xyzut", cc, eye))

    corr = wedge_t(c) - wedge_t(c).transpose(0, 1, 2, 4, 3)
    return cyc + corr


def orthonormal_frame(g: np.ndarray, rotation: Optional[np.ndarray] = None) -> np.ndarray:
    """Columns are a g-orthonormal frame: ``E^T g E = I`` (Cholesky based)."""
    try:
        lower = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise ValueError("metric is not positive definite") from None
    frame = np.linalg.inv(lower).T
    if rotation is not None:
        frame = frame @ np.asarray(rotation, dtype=float)
    return frame


def _run_pipeline(m: ChartMetric, x, level: int, in_box: bool = True):
    x = m.check_point(x, in_box)
    jet, noise = m.jet_with_noise(x, level, in_box)
    notes = []
    if m.strategy == "fd" and level >= 4:
        notes.append("bach_from_finite_differences")
        if noise > FD_NOISE_LIMIT:
            notes.append(f"fd_noise_exceeds_limit:{noise:.2e}")
    out = _geometry_jit(tuple(jnp.asarray(a) for a in jet), level)
    return x, {k: np.asarray(v) for k, v in out.items()}, tuple(notes)


def christoffel(m: ChartMetric, x, in_box: bool = True) -> np.ndarray:
    """Coordinate Christoffel symbols ``Gamma[k, i, j] = Gamma^k_ij``."""
    g, dg = m.jet(x, 1, in_box)
    gi = np.linalg.inv(g)
    return 0.5 * (np.einsum("kl,jli->kij", gi, dg) + np.einsum("kl,ilj->kij", gi, dg)
                  - np.einsum("kl,ijl->kij", gi, dg))


def riemann(m: ChartMetric, x, rotation=None) -> np.ndarray:
    """Riemann tensor in an orthonormal frame at ``x``."""
    return curvature_bundle(m, x, level=2, rotation=rotation).R


def curvature_bundle(m: ChartMetric, x, level: int = 4, rotation=None,
                     in_box: bool = True) -> CurvatureBundle:
    """Curvature quantities at ``x`` up to ``level`` metric derivatives (2, 3 or 4).

    ``in_box=False`` lets derivative probes step slightly past the chart box.
    """
    if level not in (2, 3, 4):
        raise ValueError("level must be 2, 3 or 4")
    x, q, notes = _run_pipeline(m, x, level, in_box)
    e = orthonormal_frame(q["g"], rotation)
    n = m.dim
    fr = lambda key: tc.transform(q[key], e) if key in q else None  # noqa: E731
    h = fr("h")
    return CurvatureBundle(
        point=x, frame=e, level=level, R=fr("R"), ric=fr("ric"), scalar=float(q["scalar"]),
        h=h, S=tc.kulkarni_nomizu(h, np.eye(n)), W=fr("W"), C=fr("C"), nabla_h=fr("nabla_h"),
        nabla_W=fr("nabla_W"), delta_W=fr("delta_W"), B=fr("B"), nabla_C=fr("nabla_C"),
        hat_delta_C=fr("hat_delta_C"), notes=notes)


# --------------------------------------------------------------------------
# 1-form fields


def fd_jacobian(fun: Callable, x, step: float = 1e-2, richardson: bool = True) -> np.ndarray:
    """``J[i, k] = d_k fun_i`` by central differences."""
    x = np.asarray(x, dtype=float)
    if step < MIN_FD_STEP:
        raise ValueError("finite-difference step underflow")

    def central(h):
        cols = []
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = h
            cols.append((np.asarray(fun(x + e)) - np.asarray(fun(x - e))) / (2 * h))
        return np.stack(cols, axis=-1)

    coarse = central(step)
    if not richardson:
        return coarse
    return (4.0 * central(step / 2) - coarse) / 3.0


def covector_in_frame(m: ChartMetric, x, zeta_coord) -> np.ndarray:
    return orthonormal_frame(m(x)).T @ np.asarray(zeta_coord, dtype=float)


def covector_from_frame(m: ChartMetric, x, zeta_frame) -> np.ndarray:
    g = m(x)
    return g @ orthonormal_frame(g) @ np.asarray(zeta_frame, dtype=float)


def covariant_derivative_covector(m: ChartMetric, zeta: Callable, x, step: float = 1e-2,
                                  traceable: bool = False,
                                  in_box: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Frame components of ``zeta`` and of ``(nabla zeta)(X, Y) = (nabla_X zeta)(Y)``.

    ``zeta`` maps coordinates to coordinate covector components.  Traceable
    fields are differentiated exactly, others by finite differences of radius
    ``step``.
    """
    x = m.check_point(x, in_box)
    if traceable:
        jac = np.asarray(jax.jacfwd(zeta)(jnp.asarray(x)))
    else:
        jac = fd_jacobian(zeta, x, step)
    z = np.asarray(zeta(x), dtype=float)
    gam = christoffel(m, x, in_box)
    nab = jac.T - np.einsum("mkj,m->kj", gam, z)
    e = orthonormal_frame(m(x))
    return e.T @ z, e.T @ nab @ e


# --------------------------------------------------------------------------
# builtin catalog


def _sphere_factor(y, radius=1.0):
    return 4.0 * radius ** 4 / (radius ** 2 + jnp.sum(y ** 2)) ** 2


def flat(n: int = 4) -> ChartMetric:
    return ChartMetric(n, lambda y: jnp.eye(n) + 0.0 * jnp.sum(y), box=_box(n, 2.0), name="flat")


def round_sphere(n: int = 4, radius: float = 1.0) -> ChartMetric:
    """Stereographic chart of the round sphere of the given radius."""
    return ChartMetric(n, lambda y: _sphere_factor(y, radius) * jnp.eye(n), box=_box(n, 2.0),
                       name=f"s{n}")


def s2xs2(r1: float = 1.0, r2: float = 1.0) -> ChartMetric:
    """Product of two round 2-spheres in stereographic coordinates."""
    def comps(y):
        a = _sphere_factor(y[:2], r1)
        b = _sphere_factor(y[2:], r2)
        return jnp.diag(jnp.stack([a, a, b, b]))
    return ChartMetric(4, comps, box=_box(4, 2.0), name="s2xs2")


def default_log_factor(n: int) -> Callable:
    """A fixed smooth, non-symmetric conformal log-factor used by the ``*-conformal`` entries."""
    def f(y):
        out = 0.2 * y[0] - 0.15 * y[1] * y[n - 1] + 0.1 * y[n - 2] ** 2
        return out + 0.05 * jnp.sin(y[0] + y[n - 1])
    return f


def diag_poly(n: int = 4) -> ChartMetric:
    """``diag(1 + x1^2, 1 + x2^2, 1, ...)``: flat, but with non-trivial Christoffel symbols."""
    def comps(y):
        d = jnp.ones(n).at[0].set(1 + y[0] ** 2).at[1].set(1 + y[1] ** 2)
        return jnp.diag(d)
    return ChartMetric(n, comps, box=_box(n, 2.0), name="diag-poly")


def warped_poly(n: int = 4) -> ChartMetric:
    """A non-Einstein, non-conformally-flat polynomial metric."""
    def comps(y):
        g = jnp.eye(n)
        g = g.at[0, 0].add(0.3 * y[1] ** 2 + 0.1 * y[2])
        g = g.at[1, 1].add(0.2 * y[2] ** 2 - 0.1 * y[0] * y[n - 1])
        g = g.at[n - 1, n - 1].add(0.25 * y[0] ** 2 + 0.1 * y[1] * y[2])
        off = 0.1 * y[0] * y[1] + 0.05 * y[n - 1] ** 2
        return g.at[0, 1].add(off).at[1, 0].add(off)
    return ChartMetric(n, comps, box=_box(n, 1.0), name="warped-poly")


def random_poly_metric(seed: int, n: int = 4, amplitude: float = 0.3) -> ChartMetric:
    """Seeded metric ``delta + quadratic + cubic`` perturbation; generic at generic points."""
    rng = np.random.default_rng(seed)
    quad = tc.random_uniform(rng, (n, n, n, n))
    quad = 0.5 * (quad + quad.transpose(1, 0, 2, 3))
    cub = tc.random_uniform(rng, (n, n, n, n, n))
    cub = 0.5 * (cub + cub.transpose(1, 0, 2, 3, 4))
    quad_j, cub_j = jnp.asarray(quad), jnp.asarray(cub)

    def comps(y):
        return (jnp.eye(n) + amplitude * jnp.einsum("ijkl,k,l->ij", quad_j, y, y)
                + amplitude * jnp.einsum("ijklm,k,l,m->ij", cub_j, y, y, y))
    return ChartMetric(n, comps, box=_box(n, 0.5), name=f"random-{seed}")


def _box(n, half):
    return np.array([[-half, half]] * n)


def catalog_metric(key: str, dim: int | None = None, **params) -> ChartMetric:
    """Builtin metrics by name; ``*-conformal`` keys apply :func:`default_log_factor`."""
    base_key, _, suffix = key.partition("-conformal")
    if suffix:
        raise KeyError(key)
    factories = {
        "flat": lambda: flat(dim or 4),
        "s4": lambda: round_sphere(4, **params),
        "sphere": lambda: round_sphere(dim or 4, **params),
        "s2xs2": lambda: s2xs2(**params),
        "diag-poly": lambda: diag_poly(dim or 4),
        "warped-poly": lambda: warped_poly(dim or 4),
        "random": lambda: random_poly_metric(params.get("seed", 0), dim or 4,
                                             params.get("amplitude", 0.3)),
    }
    if base_key not in factories:
        raise KeyError(f"unknown catalog metric {key!r}")
    m = factories[base_key]()
    if key.endswith("-conformal"):
        m = conformal_rescale(m, default_log_factor(m.dim), name=key)
    return m


CATALOG_KEYS = ("flat", "s4", "s2xs2", "diag-poly", "warped-poly", "random",
                "flat-conformal", "s4-conformal", "s2xs2-conformal", "warped-poly-conformal")
