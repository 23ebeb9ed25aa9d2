import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permkit import kernelcheck as kc
from permkit.errors import (DimensionError, MixedSignsError, NegativePairProductError,
                            NotNormalizableError)
from permkit.families import (half_zero_positive, random_negative_kernel, random_psd,
                              sign_coupled_perturbation)
from permkit.matcore import char_poly, det, diag_conjugate
from permkit.spectra import negative_case_dichotomy

pos = st.floats(0.05, 0.95)


# ---------------------------------------------------------------- necessary conditions


def test_necessary_identity():
    rep = kc.check_necessary(np.eye(3))
    assert rep.overall and rep.failures() == []


def test_necessary_cyclic_obstruction_shape_passes():
    g = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    rep = kc.check_necessary(g)
    assert all(rep.pair_products_nonneg.values())
    assert rep.values["det"] == pytest.approx(2.0)
    assert rep.overall


def test_necessary_minor_failure():
    rep = kc.check_necessary([[1, 2], [2, 1]])
    assert rep.minors2_nonneg[(0, 1)] is False
    assert not rep.overall
    assert "MinorNegative(0, 1)" in rep.failures()


def test_necessary_named_failures():
    assert kc.check_necessary(np.diag([-1.0, 1.0])).failures()[0] == "DiagonalNegative0"
    rep = kc.check_necessary([[1, .3], [-.3, 1]])
    assert rep.failures() == ["PairProductNegative(0, 1)"]


def test_necessary_invariant_under_signature():
    rng = np.random.default_rng(0)
    fields = ("diag_nonneg", "pair_products_nonneg", "minors2_nonneg", "det_nonneg",
              "real_eigs_positive")
    for _ in range(1000):
        g = sign_coupled_perturbation(rng, random_psd(rng), spread=1.0)
        s = rng.choice((-1.0, 1.0), size=3)
        a = kc.check_necessary(g)
        b = kc.check_necessary(s[:, None] * g * s[None, :])
        for f in fields:
            assert getattr(a, f) == getattr(b, f)


# ---------------------------------------------------------------- sign normalization


def test_sign_normalize_to_positive_pattern():
    a, b, c = .3, .4, .5
    g = np.array([[1, -a, -c], [-a, 1, b], [-c, b, 1]])
    h, s = kc.sign_normalize(g)
    np.testing.assert_array_equal(s, [1, -1, -1])
    assert h.m[~np.eye(3, dtype=bool)].min() > 0


def test_sign_normalize_positive_input():
    h, s = kc.sign_normalize(np.full((3, 3), 0.5) + 0.5 * np.eye(3))
    np.testing.assert_array_equal(s, [1, 1, 1])


def test_sign_normalize_to_negative_pattern():
    a, b, c = .3, .4, .5
    g = np.array([[1, -a, c], [-a, 1, b], [c, b, 1]])
    h, s = kc.sign_normalize(g)
    assert h.m[~np.eye(3, dtype=bool)].max() < 0
    np.testing.assert_array_equal(s, [1, 1, -1])


def test_sign_normalize_mixed_pattern_fails():
    with pytest.raises(NotNormalizableError):
        kc.sign_normalize([[1, 1, 1], [-1, 1, 1], [1, 1, 1]])


def test_sign_normalize_needs_3x3():
    with pytest.raises(DimensionError):
        kc.sign_normalize(np.eye(2))


# ---------------------------------------------------------------- balance


def test_balance_symmetric_is_identity():
    g = np.array([[1, .2, .3], [.2, 1, .4], [.3, .4, 1]])
    e, d = kc.balance(g)
    np.testing.assert_allclose(e.m, g)
    np.testing.assert_allclose(d, np.ones(3))


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_balance_example(sign):
    g = np.array([[1, 4, 1], [1, 1, 1], [1, 1, 1]]) * np.where(np.eye(3) > 0, 1.0, sign)
    e, d = kc.balance(g)
    assert e.m[0, 1] == e.m[1, 0] == pytest.approx(2.0 * sign)
    assert e.m[0, 2] == e.m[2, 0] == pytest.approx(1.0 * sign)
    assert e.m[1, 2] * e.m[2, 1] == pytest.approx(1.0)
    np.testing.assert_allclose(diag_conjugate(d, g), e.m, atol=1e-15)


def test_balance_rejects_mixed_signs():
    with pytest.raises(MixedSignsError):
        kc.balance([[1, 1, -1], [1, 1, 1], [1, 1, 1]])


@given(st.lists(pos, min_size=6, max_size=6), st.booleans())
def test_balance_preserves_invariants(v, negative):
    sgn = -1.0 if negative else 1.0
    g = np.eye(3)
    g[0, 1], g[1, 0], g[1, 2], g[2, 1], g[2, 0], g[0, 2] = sgn * np.array(v)
    e, _ = kc.balance(g)
    assert det(e.m) == pytest.approx(det(g), abs=1e-10)
    np.testing.assert_allclose(char_poly(e.m), char_poly(g), atol=1e-10)
    np.testing.assert_allclose(e.m * e.m.T, g * g.T, atol=1e-10)
    np.testing.assert_allclose(np.diag(e.m), np.diag(g))


# ---------------------------------------------------------------- cycles and equivalence


def test_cycle_condition_examples():
    assert kc.cycle_condition(np.eye(3) + .2) == pytest.approx((0.008, 0.008))
    p = kc.cycle_condition([[1, .9, .1], [.1, 1, .9], [.9, .1, 1]])
    assert p == pytest.approx((0.729, 0.001))
    assert kc.cycle_condition([[1, .3, .2], [.4, 1, 0], [.5, 0, 1]]) == (0.0, 0.0)


def test_diag_equiv_not_equivalent():
    w = kc.diag_equiv_symmetric([[1, 2, 1], [0.5, 1, 1], [1, 1, 1]])
    assert w.kind == "NotEquivalent"
    assert w.cycles == pytest.approx((2.0, 0.5))


def test_diag_equiv_symmetric_rank_one_target():
    g = np.array([[1, 2, 2], [0.5, 1, 1], [0.5, 1, 1]])
    w = kc.diag_equiv_symmetric(g)
    assert w.kind == "Symmetric"
    np.testing.assert_allclose(w.target, np.ones((3, 3)), atol=1e-15)
    np.testing.assert_allclose(diag_conjugate(w.scaling, g), w.target, atol=1e-15)


def test_diag_equiv_one_full_pair_is_symmetric():
    # only the (0, 2) pair is nonzero, so a diagonal scaling symmetrizes it
    g = np.array([[1, 0, 2], [0, 1, 0], [0.5, 0, 1]])
    w = kc.diag_equiv_symmetric(g)
    assert w.kind == "Symmetric"
    assert w.target[0, 2] == pytest.approx(1.0)


def test_diag_equiv_half_zero_pairs_effective():
    g = half_zero_positive(.3, .4, .5, .6)
    w = kc.diag_equiv_symmetric(g)
    assert w.kind == "EffectivelySymmetric"
    assert w.scaling is None
    expected = np.array([[1, 0, np.sqrt(.3)], [0, 1, 0], [np.sqrt(.3), 0, 1]])
    np.testing.assert_allclose(w.target, expected)
    # same Laplace transform on a grid of alphas
    for alpha in np.random.default_rng(0).uniform(0, 3, size=(20, 3)):
        assert det(np.eye(3) + alpha[:, None] * g) == pytest.approx(
            det(np.eye(3) + alpha[:, None] * w.target), rel=1e-12)


def test_diag_equiv_half_zero_nonzero_cycle_sum():
    g = np.array([[1, 0, .5], [.4, 1, .3], [.2, .6, 1]])
    assert kc.diag_equiv_symmetric(g).kind == "NotEquivalent"


def test_diag_equiv_negative_pair_product():
    with pytest.raises(NegativePairProductError):
        kc.diag_equiv_symmetric([[1, .2, 0], [-.2, 1, 0], [0, 0, 1]])


def test_symmetric_witness_properties():
    rng = np.random.default_rng(1)
    for _ in range(500):
        s = random_psd(rng)
        d = np.exp(rng.uniform(-1, 1, size=3))
        g = diag_conjugate(d, s)
        w = kc.diag_equiv_symmetric(g)
        assert w.kind == "Symmetric"
        t = diag_conjugate(w.scaling, g)
        assert np.max(np.abs(t - t.T)) <= 1e-9
        p1, p2 = w.cycles
        assert abs(p1 - p2) <= 1e-9


def test_symmetrize_examples():
    np.testing.assert_allclose(kc.symmetrize(np.eye(3)), np.eye(3))
    g = np.array([[1, .2, .3], [.2, 1, .4], [.3, .4, 1]])
    np.testing.assert_allclose(kc.symmetrize(g), g)
    got = kc.symmetrize([[1, 4, 0], [0.25, 1, 2], [0, 0.5, 1]])
    np.testing.assert_allclose(got, [[1, 1, 0], [1, 1, 1], [0, 1, 1]])
    with pytest.raises(NegativePairProductError):
        kc.symmetrize([[1, 1], [-1, 1]])


def test_symmetrize_keeps_det_for_positive_patterns():
    rng = np.random.default_rng(2)
    for _ in range(500):
        s = np.abs(random_psd(rng))
        np.fill_diagonal(s, 1.0)
        d = np.exp(rng.uniform(-1, 1, size=3))
        g = diag_conjugate(d, s)
        assert kc.diag_equiv_symmetric(g).kind == "Symmetric"
        assert abs(det(kc.symmetrize(g)) - det(g)) <= 1e-9


def test_symmetrize_changes_det_for_odd_sign_parity():
    # negative cyclic product: the square roots lose the sign of the 2abc term
    g = np.array([[1, -.3, -.2], [-.3, 1, -.4], [-.2, -.4, 1]])
    assert kc.diag_equiv_symmetric(g).kind == "Symmetric"
    assert det(kc.symmetrize(g)) - det(g) == pytest.approx(4 * .3 * .4 * .2)


# ---------------------------------------------------------------- row-scaled Perron test


def test_perron_identity_passes():
    for seed in range(5):
        assert kc.row_scaled_perron_test(np.eye(3), 200, seed).passed


def test_perron_positive_matrix_passes():
    rng = np.random.default_rng(3)
    for _ in range(50):
        g = rng.uniform(0.01, 1.0, size=(3, 3))
        assert kc.row_scaled_perron_test(g, 200, 0).passed


def test_perron_is_deterministic():
    g = [[1, .9, .1], [.1, 1, .9], [.9, .1, 1]]
    a = kc.row_scaled_perron_test(g, 300, 7)
    b = kc.row_scaled_perron_test(g, 300, 7)
    assert a.passed == b.passed
    if a.counterexample is not None:
        np.testing.assert_array_equal(a.counterexample, b.counterexample)


def test_perron_planted_spectral_scaling_fails():
    a, c, b1, b2 = .5, .5, .3, .48
    g = np.array([[1, -a, -c], [-a, 1, -b1], [-c, -b2, 1]])
    phi = negative_case_dichotomy(g).scaling
    res = kc.row_scaled_perron_test(g, trials=0, planted=[phi])
    assert not res.passed
    np.testing.assert_allclose(res.counterexample, phi)


def test_perron_random_negative_kernels_fail_with_planted_scaling():
    rng = np.random.default_rng(4)
    for _ in range(200):
        g = random_negative_kernel(rng, gap=1e-4)
        phi = negative_case_dichotomy(g).scaling
        assert not kc.row_scaled_perron_test(g, trials=0, planted=[phi]).passed


def test_perron_strictly_positive_u_on_nonnegative_irreducible():
    rng = np.random.default_rng(5)
    for _ in range(100):
        g = rng.uniform(0, 1, size=(4, 4)) * (rng.random((4, 4)) < 0.7)
        g[np.arange(4), (np.arange(4) + 1) % 4] = rng.uniform(0.1, 1, size=4)  # cycle: irreducible
        us = rng.uniform(0.1, 5.0, size=(20, 4))
        assert kc.row_scaled_perron_test(g, trials=0, planted=list(us)).passed
