import numpy as np
import pytest

from helpers import brute_series
from permkit.classify import classify3, is_class2
from permkit.divisibility import (ReductionSpec, certify_all_beta, dominance_pd_check,
                                  log_det_series, mmatrix_decompose,
                                  poisson_series_certificate, reduce_kernel,
                                  reduction_sign_test)
from permkit.errors import (DegreeTooLargeError, DimensionError, NotMMatrixError,
                            PreconditionError)
from permkit.families import random_inverse_m, random_mmatrix, random_psd
from permkit.kernelcheck import check_necessary
from permkit.matcore import diag_conjugate, spectral_radius

CLASS2_EXAMPLE = np.array([[1, .5, .2], [.5, 1, .4], [.2, .4, 1]])
CYCLIC = np.array([[1, .9, .1], [.1, 1, .9], [.9, .1, 1]])


def class1_only_psd(rng, odd_parity=True):
    """Symmetric PSD sample whose inverse is not an M-matrix."""
    while True:
        g = random_psd(rng)
        if classify3(g).verdict != "Class1":
            continue
        if odd_parity and np.prod(g[np.triu_indices(3, 1)]) > -1e-3:
            continue
        return g


# ---------------------------------------------------------------- M-matrix decomposition


def test_decompose_2x2():
    dec = mmatrix_decompose([[2, -1], [-1, 2]])
    np.testing.assert_allclose(dec.d, [1, 1])
    assert dec.delta0 == 0.0
    assert dec.lam == pytest.approx(2.0)
    np.testing.assert_allclose(dec.c, [[0, 1], [1, 0]], atol=1e-15)
    assert dec.lam > spectral_radius(dec.c)


def test_decompose_identity():
    dec = mmatrix_decompose(np.eye(3))
    np.testing.assert_allclose(dec.d, 1)
    assert dec.lam == pytest.approx(1.0)
    np.testing.assert_allclose(dec.c, 0, atol=1e-15)


def test_decompose_rejects_non_m():
    with pytest.raises(NotMMatrixError):
        mmatrix_decompose([[1, 1], [1, 1]])


def test_decompose_random():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        b = random_mmatrix(rng, n=int(rng.integers(2, 5)), sparsity=0.2)
        dec = mmatrix_decompose(b)
        bd = b * dec.d[None, :]
        n = b.shape[0]
        np.testing.assert_allclose(dec.d, np.linalg.inv(b).sum(axis=1), rtol=1e-10)
        assert dec.d.min() > 0
        assert np.max(np.abs(bd - (dec.lam * np.eye(n) - dec.c))) <= 1e-10
        assert dec.c.min() >= -1e-12
        assert dec.lam - spectral_radius(dec.c) > 0
        np.testing.assert_allclose(bd.sum(axis=1), 1.0, atol=1e-10)


# ---------------------------------------------------------------- dominance


def test_dominance_examples():
    assert dominance_pd_check(np.eye(3))
    chk = dominance_pd_check([[1, -2], [0, 1]])
    assert not chk.dominant
    bd = np.array([[2, -1], [-1, 2]]) * mmatrix_decompose([[2, -1], [-1, 2]]).d[None, :]
    chk = dominance_pd_check(bd)
    assert chk and chk.min_real_eigenvalue > 0


def test_dominant_but_symmetric_part_indefinite():
    chk = dominance_pd_check([[1, 0], [-5, 6]])
    assert chk.dominant and not chk.symmetric_part_pd
    assert chk.min_real_eigenvalue > 0


def test_dominance_implies_positive_real_parts():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        a = rng.uniform(-1, 1, size=(3, 3))
        chk = dominance_pd_check(a)
        if chk:
            assert chk.min_real_eigenvalue > 0


# ---------------------------------------------------------------- series


def test_series_identity():
    cert = log_det_series(np.eye(2), 6)
    for e, v in cert.coefficients.items():
        if sum(e) == 0:
            assert v == 0.0
        elif max(e) == sum(e):
            assert v == pytest.approx(1 / sum(e))
        else:
            assert v == 0.0
    assert cert.verdict == "Nonneg"


def test_series_two_by_two():
    t = 0.3
    cert = log_det_series([[1, t], [t, 1]], 4)
    assert cert.coefficients[(1, 1)] == pytest.approx(t * t)


def test_series_class1_only_negative():
    g = class1_only_psd(np.random.default_rng(2))
    assert is_class2(g) is None
    cert = log_det_series(g, 8)
    assert cert.verdict == "NegativeAt"
    assert cert.coefficients[cert.negative_at] < -cert.tol


def test_series_low_degree_coefficients():
    rng = np.random.default_rng(3)
    for _ in range(50):
        g = rng.uniform(-1, 1, size=(3, 3))
        c = log_det_series(g, 4).coefficients
        assert c[(0, 0, 0)] == 0.0
        for i in range(3):
            e = [0, 0, 0]
            e[i] = 1
            assert c[tuple(e)] == pytest.approx(g[i, i])
        for i in range(3):
            for j in range(i + 1, 3):
                e = [0, 0, 0]
                e[i] = e[j] = 1
                assert c[tuple(e)] == pytest.approx(g[i, j] * g[j, i])


def test_series_matches_naive_enumeration():
    rng = np.random.default_rng(4)
    g = rng.uniform(-1, 1, size=(3, 3))
    c = log_det_series(g, 5).coefficients
    for e, v in brute_series(g, 5).items():
        assert c[e] == pytest.approx(v, abs=1e-12)


def test_series_invariant_under_conjugation():
    rng = np.random.default_rng(5)
    for _ in range(100):
        g = rng.uniform(-1, 1, size=(3, 3))
        d = np.exp(rng.uniform(-1, 1, 3)) * rng.choice((-1, 1), 3)
        a = log_det_series(g, 6).coefficients
        b = log_det_series(diag_conjugate(d, g), 6).coefficients
        for e in a:
            assert abs(a[e] - b[e]) <= 1e-10


def test_series_matches_log_det_at_small_z():
    rng = np.random.default_rng(6)
    for _ in range(20):
        g = rng.uniform(-1, 1, size=(3, 3))
        z = rng.uniform(0, 0.05, size=3)
        c = log_det_series(g, 10).coefficients
        approx = sum(v * np.prod(z ** np.array(e)) for e, v in c.items())
        exact = -np.log(np.linalg.det(np.eye(3) - z[:, None] * g))
        assert approx == pytest.approx(exact, abs=1e-12)


def test_series_limits():
    with pytest.raises(DegreeTooLargeError):
        log_det_series(np.eye(2), 13)
    with pytest.raises(DimensionError):
        log_det_series(np.eye(5), 4)


def test_series_nonneg_for_class2():
    rng = np.random.default_rng(7)
    for _ in range(200):
        g = random_inverse_m(rng, sparsity=0.2)
        assert log_det_series(g, 8).verdict == "Nonneg"


def test_poisson_certificate_separates_symmetric_psd():
    # class 2 => nonnegative is exact; the converse is only probed by truncation
    rng = np.random.default_rng(8)
    agree = total = 0
    while total < 200:
        g = random_psd(rng)
        if np.linalg.eigvalsh(g).min() < 0.05:
            continue
        total += 1
        certified = poisson_series_certificate(g, 8).verdict == "Nonneg"
        class2 = is_class2(g) is not None
        if class2:
            assert certified
        agree += certified == class2
    assert agree / total >= 0.95


# ---------------------------------------------------------------- certification


def test_certify_examples():
    assert certify_all_beta(np.eye(3)).verdict == "CertifiedAllBeta"
    cert = certify_all_beta(CLASS2_EXAMPLE)
    assert cert.verdict == "CertifiedAllBeta" and cert.series.verdict == "Nonneg"
    cert = certify_all_beta(class1_only_psd(np.random.default_rng(9)))
    assert cert.verdict == "NotCertified" and cert.reason == "InverseNotM"
    assert cert.poisson.verdict == "NegativeAt"


def test_certify_without_series():
    cert = certify_all_beta(CLASS2_EXAMPLE, max_degree=0)
    assert cert.verdict == "CertifiedAllBeta" and cert.series is None


# ---------------------------------------------------------------- reduction


def test_reduce_zero_pin_keeps_submatrix():
    rng = np.random.default_rng(10)
    g = rng.uniform(0, 1, size=(4, 4))
    red = reduce_kernel(g, ReductionSpec.pin(4, {3: 0.0}))
    np.testing.assert_allclose(red.m, g[:3, :3])


def test_reduce_identity():
    red = reduce_kernel(np.eye(3), ReductionSpec.pin(3, {2: 1.0}))
    np.testing.assert_allclose(red.m, np.eye(2))


def test_reduce_matches_closed_form():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a1, a2, b1, b2, c1, c2 = rng.uniform(0, 1, 6)
        u = rng.uniform(0, 10)
        v = u / (1 + u)
        g = np.array([[1, a1, c2], [a2, 1, b1], [c1, b2, 1]])
        expected = [[1 - v * c1 * c2, a1 - v * c2 * b2],
                    [a2 - v * b1 * c1, 1 - v * b1 * b2]]
        got = reduce_kernel(g, ReductionSpec.pin(3, {2: u})).m
        np.testing.assert_allclose(got, expected, atol=1e-12)


def test_reduce_validates_spec():
    with pytest.raises(ValueError):
        reduce_kernel(np.eye(3), ReductionSpec({2: 1.0}, (0,)))
    with pytest.raises(ValueError):
        reduce_kernel(np.eye(3), ReductionSpec.pin(3, {2: -1.0}))


def test_reduce_several_pins_order_independent_result():
    rng = np.random.default_rng(12)
    g = random_inverse_m(rng, n=4)
    both = reduce_kernel(g, ReductionSpec.pin(4, {2: 0.7, 3: 1.3})).m
    step = reduce_kernel(g, ReductionSpec.pin(4, {3: 1.3}))
    step = reduce_kernel(step, ReductionSpec.pin(3, {2: 0.7})).m
    np.testing.assert_allclose(both, step, atol=1e-14)


def test_reduced_class2_passes_necessary():
    rng = np.random.default_rng(13)
    for _ in range(300):
        g = random_inverse_m(rng, n=4, sparsity=0.2)
        pins = {int(i): float(rng.uniform(0, 5)) for i in rng.choice(4, 2, replace=False)}
        red = reduce_kernel(g, ReductionSpec.pin(4, pins))
        assert check_necessary(red).overall


def test_reduction_sign_test_examples():
    assert reduction_sign_test(np.full((3, 3), .5) + .5 * np.eye(3)).branch == "Inequalities"
    sym = np.array([[1, .9, .8], [.9, 1, .7], [.8, .7, 1]])
    assert reduction_sign_test(sym).branch == "CycleEquality"
    assert reduction_sign_test(CLASS2_EXAMPLE).branch == "Inequalities"
    rep = reduction_sign_test(CYCLIC)
    assert rep.branch == "Violation" and rep.worst_value < 0


def test_reduction_sign_test_class2_never_violates():
    rng = np.random.default_rng(14)
    for _ in range(300):
        g = np.abs(random_inverse_m(rng, sparsity=0.3))
        if is_class2(g) is None:
            continue
        assert reduction_sign_test(g).branch != "Violation"


def test_reduction_sign_test_scale_free():
    for scale in (1e-6, 1.0, 1e6):
        assert reduction_sign_test(scale * CYCLIC).branch == "Violation"


def test_reduction_sign_test_preconditions():
    with pytest.raises(DimensionError):
        reduction_sign_test(np.eye(2))
    with pytest.raises(PreconditionError):
        reduction_sign_test(-CYCLIC)
