import numpy as np
import pytest

from weylscope import four_dim as fd
from weylscope import suites
from weylscope import tensor_core as tc
from weylscope import weyl_algebra as wa

E = np.eye(4)


def test_hodge_star_on_basis():
    assert np.allclose(fd.hodge_star(tc.wedge(E[0], E[1])), tc.wedge(E[2], E[3]))
    assert np.allclose(fd.hodge_star(tc.wedge(E[0], E[2])), tc.wedge(E[3], E[1]))
    forms = tc.two_form_basis(4)
    assert np.allclose(fd.hodge_star(fd.hodge_star(forms)), forms)


def test_hodge_star_matches_wedge_pairing(rng):
    # alpha ^ *beta = <alpha, beta> vol, with <e_i^e_j, e_i^e_j> = 1
    for _ in range(5):
        a, b = tc.random_two_form(rng, 4), tc.random_two_form(rng, 4)
        assert fd.wedge_pairing(a, fd.hodge_star(b)) == pytest.approx(0.5 * tc.inner(a, b))


def test_hodge_star_rejects_other_dimensions():
    with pytest.raises(ValueError):
        fd.hodge_star(np.zeros((5, 5)))


def test_sd_basis_rotates(rng):
    q = tc.random_rotation(rng, 4)
    basis = fd.sd_basis(q)
    assert np.allclose(fd.hodge_star(basis.plus), basis.plus)
    assert np.allclose(fd.hodge_star(basis.minus), -basis.minus)
    with pytest.raises(ValueError):
        fd.sd_basis(q @ np.diag([-1, 1, 1, 1]))


def test_split_is_orthogonal(rng):
    w = wa.random_weyl(rng, 4)
    plus, minus = fd.split_weyl(w)
    assert np.allclose(plus + minus, w)
    assert tc.inner(plus, minus) == pytest.approx(0.0, abs=1e-13)
    assert max(wa.weyl_defects(plus).values()) < 1e-13


def test_built_spectrum_is_recovered(rng):
    lp, lm = fd.random_spectrum(rng), fd.random_spectrum(rng)
    w, spec, sigma = fd.build_weyl_from_spectra(lp, lm, tc.random_rotation(rng, 4))
    assert max(wa.weyl_defects(w).values()) < 1e-13
    assert max(spec.defects(w).values()) < 1e-13
    got = fd.spectrum(w)
    assert np.allclose(got.lambda_plus, np.sort(lp))
    assert np.allclose(got.lambda_minus, np.sort(lm))
    assert max(got.defects(w).values()) < 1e-12
    assert max(sigma.defects().values()) < 1e-13


def test_spectrum_rejects_bad_input():
    with pytest.raises(ValueError, match="sum to zero"):
        fd.build_weyl_from_spectra((1, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        fd.build_weyl_from_spectra((1, -1), (0, 0, 0))


def test_eigsym_and_shift(rng):
    w, spec, sigma = fd.build_weyl_from_spectra(fd.random_spectrum(rng), fd.random_spectrum(rng),
                                                tc.random_rotation(rng, 4))
    assert fd.check_eigsym(w, spec, sigma) < 1e-13
    h = tc.random_sym(rng, 4)
    h -= np.trace(h) / 4 * np.eye(4)
    assert fd.check_shift(spec, h) < 1e-13


def test_supersymmetry_in_dimension_four(rng):
    w = wa.random_weyl(rng, 4)
    anti, comm = fd.supersym_grid(w)
    assert anti < 1e-12 and comm < 1e-12


def test_supersymmetry_fails_in_dimension_five(rng):
    rep = fd.supersym_search(rng, n=5, trials=3)
    assert rep["min_anti"] > 1e-3 or rep["min_comm"] > 1e-3


@pytest.mark.parametrize("key", sorted(suites.DEGENERATE_PATTERNS))
def test_split_dimension_formula(rng, key):
    lp, lm = suites.DEGENERATE_PATTERNS[key]
    w, _, _ = fd.build_weyl_from_spectra(lp, lm, tc.random_rotation(rng, 4))
    e, s, a = (wa.solve_space(w, t).dimension for t in ("E_W", "S_W", "A_W"))
    assert e == s + a
    assert wa.same_subspace(fd.ew_split_4d(w).basis, wa.solve_space(w, "E_W").basis)


def test_zero_pair_gives_four_dimensional_space():
    w, _, _ = fd.build_weyl_from_spectra((0.0, 0.7, -0.7), (0.0, 0.2, -0.2))
    assert wa.solve_space(w, "E_W").dimension == 4


def test_symmetric_kernel_generic_vs_constructed(rng):
    w, _, _ = fd.build_weyl_from_spectra((1.0, 2.0, -3.0), (4.0, 5.0, -9.0))
    assert len(fd.admissible_symmetric(w)) == 0
    w, spec, sigma = fd.build_weyl_from_spectra((0.0, 1.0, -1.0), (0.0, -1.0, 1.0),
                                                tc.random_rotation(rng, 4))
    adm = fd.admissible_symmetric(w)
    assert len(adm) == 1
    assert wa.same_subspace(adm, sigma.sigma[0, 0][None] / 2)
    rep = fd.symker_report(w, sigma.sigma[0, 0])
    assert rep.preconditions_ok and rep.conclusion_ok
    assert (rep.kernel_dim_plus, rep.kernel_dim_minus) == (1, 1)
    bad = fd.symker_report(w, np.diag([1.0, 0, 0, 0]))
    assert not bad.preconditions_ok


def test_gram_identity_constant(rng):
    for _ in range(10):
        w = wa.random_weyl(rng, 4)
        assert fd.four_id_constant(w) == pytest.approx(0.25, rel=1e-13)
        assert fd.check_4id(w) < 1e-13 * tc.norm(w) ** 2
        sv = fd.nullity_singular_values(w)
        assert np.allclose(sv, 0.5 * tc.norm(w))


def test_gram_identity_fails_in_dimension_five(rng):
    w = wa.random_weyl(rng, 5)
    gram = fd.weyl_gram(w)
    assert np.ptp(np.linalg.eigvalsh(gram)) > 1e-3
