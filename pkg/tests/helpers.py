"""Independent oracles and random populations shared by the tests."""
from fractions import Fraction
from itertools import combinations, permutations, product

import numpy as np

from permkit import families as F


# ---------------------------------------------------------------- oracles


def perm_parity(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def leibniz_det(m) -> float:
    """Determinant by the permutation sum, in exact rational arithmetic."""
    m = [[Fraction(float(x)) for x in row] for row in np.asarray(m, dtype=float)]
    n = len(m)
    total = Fraction(0)
    for p in permutations(range(n)):
        term = Fraction(perm_parity(p))
        for i in range(n):
            term *= m[i][p[i]]
        total += term
    return float(total)


def exact_adjugate(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, j, axis=0), i, axis=1)
            out[i, j] = (-1) ** (i + j) * (leibniz_det(minor) if n > 1 else 1.0)
    return out


def brute_series(g, max_degree: int) -> dict:
    """-log det(I - Z G) coefficients by naive enumeration of index sequences."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    coefs = {}
    for k in range(1, max_degree + 1):
        for seq in product(range(n), repeat=k):
            w = 1.0
            for t in range(k):
                w *= g[seq[t], seq[(t + 1) % k]]
            e = tuple(seq.count(i) for i in range(n))
            coefs[e] = coefs.get(e, 0.0) + w / k
    return coefs


def exact_minors_nonnegative(g) -> bool:
    """All principal minors of the float matrix are >= 0 in exact arithmetic."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    for r in range(1, n + 1):
        for idx in combinations(range(n), r):
            if leibniz_det(g[np.ix_(idx, idx)]) < 0:
                return False
    return True


def power_iteration_radius(m, iters: int = 2000) -> float:
    m = np.asarray(m, dtype=float)
    x = np.ones(m.shape[0])
    lam = 0.0
    for _ in range(iters):
        y = m @ x
        lam = np.linalg.norm(y) / np.linalg.norm(x)
        x = y / np.linalg.norm(y)
    return float(lam)


# ---------------------------------------------------------------- populations


def psd_member(rng) -> np.ndarray:
    return F.random_psd(rng, 3, extra_rank=int(rng.integers(-2, 3)),
                        correlation=bool(rng.random() < 0.5))


def inverse_m_member(rng) -> np.ndarray:
    g = F.random_inverse_m(rng, 3, sparsity=float(rng.choice([0.0, 0.3])))
    d = F.random_diagonal(rng)
    return d[:, None] * g / d[None, :]


def perturbed_member(rng) -> np.ndarray:
    base = psd_member(rng) if rng.random() < 0.5 else inverse_m_member(rng)
    return F.sign_coupled_perturbation(rng, base, spread=rng.uniform(0.05, 1.0))


def named_family_member(rng) -> np.ndarray:
    j = int(rng.integers(0, 9))
    u = rng.uniform
    if j == 0:
        return F.singular_family(u(0, np.pi / 2), u(0, np.pi / 2 - 1e-9), "+")
    if j == 1:
        return F.negative_symmetric(*u(0, 0.6, 3))
    if j == 2:
        return F.rank_one_block(u(0, 1))
    if j in (3, 4, 5):
        return F.random_negative_kernel(rng)
    if j == 6:
        return F.cyclic_obstruction(*u(-1, 1, 3))
    if j == 7:
        return F.half_zero_positive(*u(0, 1, 4))
    return F.unit_symmetric(*u(0, 1, 3))


POPULATIONS = {
    "psd": psd_member,
    "inverse_m": inverse_m_member,
    "perturbed": perturbed_member,
    "named": named_family_member,
}
