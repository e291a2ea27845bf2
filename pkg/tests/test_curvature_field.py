import jax.numpy as jnp
import numpy as np
import pytest

from weylscope import curvature_field as cf
from weylscope import four_dim as fd
from weylscope import tensor_core as tc
from weylscope import weyl_algebra as wa

from oracles import symbolic_curvature

X4 = np.array([0.3, -0.2, 0.4, 0.1])


def sphere_tensor(n, k):
    eye = np.eye(n)
    return k * (np.einsum("ac,bd->abcd", eye, eye) - np.einsum("ad,bc->abcd", eye, eye))


@pytest.mark.parametrize("strategy", ["analytic", "fd"])
def test_flat_metric_is_flat(strategy):
    m = cf.flat(4).with_strategy(strategy)
    b = cf.curvature_bundle(m, X4)
    for t in (b.R, b.W, b.h, b.C, b.B, b.delta_W, b.nabla_W):
        assert np.max(np.abs(t)) <= 1e-10


@pytest.mark.parametrize("n, radius", [(3, 1.0), (4, 1.0), (4, 2.0), (5, 0.5)])
def test_round_sphere(n, radius):
    m = cf.round_sphere(n, radius)
    x = np.linspace(-0.3, 0.4, n)
    b = cf.curvature_bundle(m, x)
    k = 1.0 / radius ** 2
    assert np.allclose(b.R, sphere_tensor(n, k), atol=1e-10)
    assert b.R[0, 1, 0, 1] == pytest.approx(k)
    assert b.scalar == pytest.approx(n * (n - 1) * k)
    assert np.max(np.abs(b.W)) <= 1e-6
    assert np.max(np.abs(b.C)) <= 1e-10


def test_riemann_matches_symbolic_oracle():
    def g_fn(y, xp):
        return [[1 + 0.3 * y[1] ** 2 + 0.1 * y[2], 0.1 * y[0] * y[1], 0],
                [0.1 * y[0] * y[1], 1 + 0.2 * y[2] ** 2, 0],
                [0, 0, 1 + 0.25 * y[0] ** 2]]

    m = cf.ChartMetric(3, lambda y: jnp.array(g_fn(y, jnp)), box=[[-1, 1]] * 3)
    x = np.array([0.2, -0.4, 0.3])
    gam, r_coord, g = symbolic_curvature(g_fn, 3, x)
    assert np.allclose(cf.christoffel(m, x), gam, atol=1e-12)
    e = cf.orthonormal_frame(g)
    assert np.allclose(cf.riemann(m, x), tc.transform(r_coord, e), atol=1e-10)


def test_diag_poly_christoffel_oracle():
    def g_fn(y, xp):
        return [[1 + y[0] ** 2, 0, 0, 0], [0, 1 + y[1] ** 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]

    m = cf.diag_poly(4)
    mfd = m.with_strategy("fd")
    rng = np.random.default_rng(3)
    for x in rng.uniform(-1.5, 1.5, size=(10, 4)):
        gam, r, _ = symbolic_curvature(g_fn, 4, x)
        assert np.allclose(cf.christoffel(m, x), gam, atol=1e-13)
        assert np.max(np.abs(cf.christoffel(mfd, x) - gam)) <= 1e-7
        assert np.max(np.abs(cf.riemann(mfd, x))) <= 1e-7
        assert np.max(np.abs(r)) < 1e-12


def test_s2xs2_product():
    m = cf.s2xs2()
    b = cf.curvature_bundle(m, X4)
    r = np.zeros((4,) * 4)
    r[:2, :2, :2, :2] = sphere_tensor(2, 1.0)
    r[2:, 2:, 2:, 2:] = sphere_tensor(2, 1.0)
    assert np.allclose(b.R, r, atol=1e-10)
    tf_ric = b.ric - b.scalar / 4 * np.eye(4)
    assert np.max(np.abs(tf_ric)) <= 1e-6
    assert np.max(np.abs(b.C)) <= 1e-5
    assert np.allclose(b.W, wa.project_to_weyl(r), atol=1e-10)
    assert tc.norm(b.W) == pytest.approx(4 / np.sqrt(3))
    assert np.max(np.abs(b.B)) <= 1e-4


def test_s2xs2_unequal_radii_spectrum():
    b = cf.curvature_bundle(cf.s2xs2(1.0, 2.0), X4, level=2)
    spec = fd.spectrum(b.W)
    # W+ and W- carry the same spectrum for a product of surfaces
    assert np.allclose(spec.lambda_plus, spec.lambda_minus)
    assert np.ptp(spec.lambda_plus) > 0.1


def test_conformally_flat_polynomial_factor():
    rng = np.random.default_rng(11)
    c = rng.uniform(-0.3, 0.3, size=6)

    def f(y):
        return c[0] * y[0] + c[1] * y[1] * y[2] + c[2] * y[3] ** 2 + c[3] * y[0] ** 3 + c[4] * y[1] * y[3]

    m = cf.conformal_rescale(cf.flat(4), f)
    for strategy in ("analytic", "fd"):
        b = cf.curvature_bundle(m.with_strategy(strategy), X4)
        assert np.max(np.abs(b.W)) <= 1e-6
        assert np.max(np.abs(b.C)) <= 1e-5
        assert tc.norm(b.R) > 0.1


@pytest.mark.parametrize("key", cf.CATALOG_KEYS)
def test_catalog_invariants(key):
    m = cf.catalog_metric(key)
    b = cf.curvature_bundle(m, 0.5 * X4)
    assert b.decomposition_residual() <= 1e-10
    assert np.allclose(wa.project_to_weyl(b.R), b.W, atol=1e-10)
    assert max(wa.weyl_defects(b.R - b.S).values()) <= 1e-10
    assert np.allclose(b.C, -b.C.transpose(0, 2, 1))
    skew, trace = b.bach_defects()
    assert skew <= 1e-10 and trace <= 1e-10
    assert b.cotton_identity_residual() <= 1e-10
    assert b.second_bianchi_residual() <= 1e-10
    assert b.hat_delta_C.shape == (4, 4)


@pytest.mark.parametrize("n", [3, 5])
def test_cotton_identity_other_dimensions(n):
    m = cf.warped_poly(n)
    b = cf.curvature_bundle(m, np.linspace(-0.2, 0.3, n))
    assert b.cotton_identity_residual() <= 1e-10
    if n == 3:
        assert np.max(np.abs(b.W)) <= 1e-12
        assert tc.norm(b.C) > 1e-3
    else:
        assert b.second_bianchi_residual() <= 1e-10


def test_fd_matches_analytic_on_generic_metric():
    m = cf.warped_poly(4)
    a = cf.curvature_bundle(m, X4)
    f = cf.curvature_bundle(m.with_strategy("fd"), X4)
    assert np.max(np.abs(a.R - f.R)) <= cf.TOL_FD_LOW
    assert np.max(np.abs(a.C - f.C)) <= cf.TOL_FD_HIGH
    assert np.max(np.abs(a.B - f.B)) <= cf.TOL_FD_HIGH
    assert "bach_from_finite_differences" in f.notes
    assert f.second_bianchi_residual() <= 1e-5


def test_fd_noise_is_reported():
    m = cf.warped_poly(4).with_strategy("fd", fd_step=2e-5)
    b = cf.curvature_bundle(m, X4)
    assert any(n.startswith("fd_noise_exceeds_limit") for n in b.notes)


def test_frame_covariance(rng):
    m = cf.warped_poly(4)
    q = tc.random_rotation(rng, 4)
    b0 = cf.curvature_bundle(m, X4)
    b1 = cf.curvature_bundle(m, X4, rotation=q)
    assert np.allclose(b1.W, tc.transform(b0.W, q), atol=1e-12)
    assert tc.norm(b1.W) == pytest.approx(tc.norm(b0.W), abs=1e-9)
    assert tc.norm(b1.C) == pytest.approx(tc.norm(b0.C), abs=1e-9)
    s0, s1 = fd.spectrum(b0.W), fd.spectrum(b1.W)
    assert np.allclose(s0.lambda_plus, s1.lambda_plus, atol=1e-9)
    assert np.allclose(s0.lambda_minus, s1.lambda_minus, atol=1e-9)


def test_weyl_and_bach_conformal_weights():
    m = cf.warped_poly(4)
    f = cf.default_log_factor(4)
    mc = cf.conformal_rescale(m, f)
    b, bc = cf.curvature_bundle(m, X4), cf.curvature_bundle(mc, X4)
    fx = float(f(jnp.asarray(X4)))
    assert np.allclose(bc.frame, np.exp(-fx) * b.frame)
    assert np.max(np.abs(bc.W - np.exp(-2 * fx) * b.W)) <= 1e-5
    # frame components of the Bach tensor scale with exp(-4f)
    assert np.max(np.abs(bc.B - np.exp(-4 * fx) * b.B)) <= 1e-4
    assert np.max(np.abs(bc.B - np.exp(-2 * fx) * b.B)) > 1e-3
    mfd = mc.with_strategy("fd")
    bf = cf.curvature_bundle(mfd, X4)
    assert np.max(np.abs(bf.B - np.exp(-4 * fx) * b.B)) <= 1e-4


def test_conformal_rescale_composition():
    m = cf.warped_poly(4)
    zero = cf.conformal_rescale(m, lambda y: 0.0 * y[0])
    assert np.allclose(zero(X4), m(X4))
    f1 = lambda y: 0.1 * y[0]  # noqa: E731
    f2 = lambda y: -0.2 * y[1] ** 2  # noqa: E731
    twice = cf.conformal_rescale(cf.conformal_rescale(m, f1), f2)
    assert twice.base is m
    assert twice.log_factor(X4) == pytest.approx(f1(X4) + f2(X4))
    assert np.allclose(twice(X4), np.exp(2 * (f1(X4) + f2(X4))) * m(X4))


def test_covector_derivative_of_gradient_is_hessian():
    m = cf.warped_poly(4)
    f = cf.default_log_factor(4)
    import jax

    df = jax.grad(f)
    z1, n1 = cf.covariant_derivative_covector(m, df, X4, traceable=True)
    z2, n2 = cf.covariant_derivative_covector(m, lambda y: np.asarray(df(jnp.asarray(y))), X4)
    assert np.allclose(n1, n1.T, atol=1e-12)
    assert np.allclose(n1, n2, atol=1e-7)
    assert np.allclose(cf.covector_from_frame(m, X4, z1), np.asarray(df(jnp.asarray(X4))))
    assert np.allclose(cf.covector_in_frame(m, X4, cf.covector_from_frame(m, X4, z1)), z1)


def test_errors():
    m = cf.round_sphere(4)
    with pytest.raises(ValueError, match="outside"):
        cf.curvature_bundle(m, [5.0, 0, 0, 0])
    with pytest.raises(ValueError, match="coordinates"):
        cf.curvature_bundle(m, [0.0, 0.0])
    bad = cf.ChartMetric(4, lambda y: jnp.diag(jnp.array([1.0, -1.0, 1.0, 1.0])) + 0 * y[0])
    with pytest.raises(ValueError, match="positive definite"):
        cf.curvature_bundle(bad, np.zeros(4))
    skew = cf.ChartMetric(3, lambda y: jnp.eye(3).at[0, 1].set(0.5) + 0 * y[0])
    with pytest.raises(ValueError, match="symmetric"):
        cf.christoffel(skew, np.zeros(3))
    with pytest.raises(ValueError, match="underflow"):
        cf.ChartMetric(4, m.components, fd_step=1e-12)
    with pytest.raises(ValueError, match="underflow"):
        cf.fd_jacobian(lambda y: y, np.zeros(2), step=0.0)
    with pytest.raises(ValueError):
        cf.ChartMetric(4, m.components, strategy="spline")
    with pytest.raises(ValueError):
        cf.ChartMetric(4, m.components, box=[[0, 1]] * 3)
    with pytest.raises(ValueError):
        cf.curvature_bundle(m, np.zeros(4), level=5)
    with pytest.raises(KeyError):
        cf.catalog_metric("torus")
    with pytest.raises(ValueError):
        cf.orthonormal_frame(-np.eye(3))


def test_catalog_dimensions():
    assert cf.catalog_metric("sphere", dim=5).dim == 5
    assert cf.catalog_metric("s4", dim=5).dim == 4
    assert cf.catalog_metric("random", seed=3).name == "random-3"
    assert cf.catalog_metric("s2xs2-conformal").log_factor is not None
