"""Named 3x3 matrix families and seeded random generators.

The named families are the worked examples used across tests, the shipped
data file and the acceptance suite. The generators produce the random
populations (PSD, inverse M-matrix, sign-coupled perturbations, ...).
"""
import numpy as np

from .classify import singular_family  # noqa: F401  (re-exported)


def unit_symmetric(a: float, b: float, c: float) -> np.ndarray:
    """[[1, a, c], [a, 1, b], [c, b, 1]]."""
    return np.array([[1.0, a, c], [a, 1.0, b], [c, b, 1.0]])


def negative_symmetric(a: float, b: float, c: float) -> np.ndarray:
    """Unit diagonal with off-diagonals -a, -b, -c in the same layout."""
    return unit_symmetric(-a, -b, -c)


def from_pairs(a1, a2, b1, b2, c1, c2, diag=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Place the six named off-diagonal entries positionally."""
    g = np.diag(np.asarray(diag, dtype=float))
    g[0, 1], g[1, 0] = a1, a2
    g[1, 2], g[2, 1] = b1, b2
    g[2, 0], g[0, 2] = c1, c2
    return g


def rank_one_block(a: float) -> np.ndarray:
    """[[1, a, a], [a, 1, 1], [a, 1, 1]], singular for every a."""
    return np.array([[1.0, a, a], [a, 1.0, 1.0], [a, 1.0, 1.0]])


def cyclic_obstruction(a: float, b: float, c: float) -> np.ndarray:
    """[[1, 0, a], [b, 1, 0], [0, c, 1]]: pairwise products vanish, det = 1 + abc."""
    return np.array([[1.0, 0.0, a], [b, 1.0, 0.0], [0.0, c, 1.0]])


def zero_pattern_one(a: float, c: float, bp: float) -> np.ndarray:
    """Negative pattern missing only the (2, 1) entry."""
    return np.array([[1.0, -a, -c], [-a, 1.0, -bp], [-c, 0.0, 1.0]])


def zero_pattern_two(a: float, bp: float, cp: float) -> np.ndarray:
    """Negative pattern with one full pair plus a one-way path closing the cycle."""
    return np.array([[1.0, -a, 0.0], [-a, 1.0, -bp], [-cp, 0.0, 1.0]])


def zero_pattern_three(ap: float, bp: float, cp: float) -> np.ndarray:
    """Negative pure 3-cycle on top of the identity."""
    return np.array([[1.0, -ap, 0.0], [0.0, 1.0, -bp], [-cp, 0.0, 1.0]])


def half_zero_positive(a2: float, b1: float, c1: float, c2: float) -> np.ndarray:
    """[[1, 0, c2], [a2, 1, b1], [c1, 0, 1]]: both cycles vanish."""
    return np.array([[1.0, 0.0, c2], [a2, 1.0, b1], [c1, 0.0, 1.0]])


# ------------------------------------------------------------ random families


def random_psd(rng, n: int = 3, extra_rank: int = 2, correlation: bool = True) -> np.ndarray:
    """Wishart-type PSD matrix; rank may be deficient when ``extra_rank`` < 0."""
    cols = max(1, n + int(rng.integers(min(0, extra_rank), max(1, extra_rank + 1))))
    g = rng.normal(size=(n, cols))
    s = g @ g.T
    if correlation:
        d = 1.0 / np.sqrt(np.diag(s))
        s = d[:, None] * s * d[None, :]
    return 0.5 * (s + s.T)


def random_mmatrix(rng, n: int = 3, sparsity: float = 0.0, margin: float = 0.05) -> np.ndarray:
    """s I - C with C >= 0 and s > (1 + margin) rho(C)."""
    c = rng.uniform(0.0, 1.0, size=(n, n))
    if sparsity:
        c *= rng.random(size=(n, n)) >= sparsity
    np.fill_diagonal(c, rng.uniform(0.0, 1.0, size=n))
    rho = float(np.max(np.abs(np.linalg.eigvals(c))))
    s = (1.0 + margin + rng.uniform(0.0, 1.0)) * max(rho, 1e-3)
    return s * np.eye(n) - c


def random_inverse_m(rng, n: int = 3, sparsity: float = 0.0) -> np.ndarray:
    return np.linalg.inv(random_mmatrix(rng, n, sparsity))


def random_diagonal(rng, n: int = 3, signs: bool = True) -> np.ndarray:
    d = np.exp(rng.uniform(-1.0, 1.0, size=n))
    if signs:
        d *= rng.choice((-1.0, 1.0), size=n)
    return d


def sign_coupled_perturbation(rng, g: np.ndarray, spread: float = 0.5) -> np.ndarray:
    """Multiply each off-diagonal entry by its own factor exp(U), keeping signs."""
    n = g.shape[0]
    f = np.exp(rng.uniform(-spread, spread, size=(n, n)))
    np.fill_diagonal(f, 1.0)
    return g * f


def _asymmetry_ok(a1, a2, b1, b2, c1, c2, gap: float) -> bool:
    # balanced form: b-pair asymmetry (sqrt(P1) - sqrt(P2))^2 with P = cyclic products
    p1, p2 = a1 * b1 * c1, a2 * b2 * c2
    return (np.sqrt(p1) - np.sqrt(p2)) ** 2 >= gap


def random_negative_kernel(rng, gap: float = 1e-6, zero_patterns: bool = True) -> np.ndarray:
    """Non-symmetric unit-diagonal kernel with off-diagonals <= 0, det >= 0.

    About a quarter of the draws use the zero patterns that still carry a
    cycle; the rest have all six entries nonzero.
    """
    while True:
        kind = int(rng.integers(0, 8)) if zero_patterns else 7
        v = rng.uniform(0.02, 1.0, size=6)
        if kind == 0:
            g = zero_pattern_one(*v[:3])
        elif kind == 1:
            g = zero_pattern_two(*v[:3])
        elif kind == 2:
            g = zero_pattern_three(*v[:3])
        else:
            g = from_pairs(*(-v))
        perm = rng.permutation(3)
        g = g[np.ix_(perm, perm)]
        if rng.random() < 0.5:
            g = g.T.copy()
        off = ~np.eye(3, dtype=bool)
        if np.max((g * g.T)[off]) > 1.0 or np.linalg.det(g) < 0:
            continue
        cyc1 = -g[0, 1] * g[1, 2] * g[2, 0]
        cyc2 = -g[1, 0] * g[2, 1] * g[0, 2]
        if (np.sqrt(cyc1) - np.sqrt(cyc2)) ** 2 < gap:
            continue
        return g


def random_positive_class2(rng, gap: float = 1e-6) -> np.ndarray:
    """Non-symmetric unit-diagonal inverse M-matrix (entrywise positive)."""
    while True:
        g = random_inverse_m(rng)
        d = 1.0 / np.sqrt(np.diag(g))
        g = d[:, None] * g * d[None, :]
        if not _asymmetry_ok(g[0, 1], g[1, 0], g[1, 2], g[2, 1], g[2, 0], g[0, 2], gap):
            continue
        return g
