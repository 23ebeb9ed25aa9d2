"""Monte Carlo checks of class-1 kernels and the permanental metric.

For beta = m/2 a class-1 kernel with symmetric PSD target S is realised by
theta_i = (1/2) * sum_{r=1..m} G_{r,i}^2, where G_1..G_m are independent
N(0, S) vectors. Draws come in fixed-size blocks, each with its own Philox
stream spawned from the seed, so results do not depend on how blocks are
scheduled.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Optional

import numpy as np

from .classify import is_class1, is_psd
from .errors import BadBetaError, DimensionError, NegativePairProductError, NotClass1Error
from .kernelcheck import Kernel, as_kernel, check_necessary, symmetrize
from .matcore import det

BLOCK = 65536


@dataclass(frozen=True)
class SampleBatch:
    kernel: Kernel
    beta: float
    count: int
    seed: int
    draws: np.ndarray = field(repr=False)
    target: np.ndarray = field(repr=False, default=None)


def half_integer_order(beta: float) -> int:
    """Return m with beta = m/2, or raise BadBetaError."""
    m = round(2.0 * float(beta))
    if m < 1 or abs(2.0 * beta - m) > 1e-12:
        raise BadBetaError(f"beta={beta} is not a positive half-integer")
    return int(m)


def gaussian_factor(sigma: np.ndarray) -> np.ndarray:
    """L with L L^T = sigma, via eigh; small negative eigenvalues are clipped to 0."""
    w, v = np.linalg.eigh(0.5 * (sigma + sigma.T))
    return v * np.sqrt(np.clip(w, 0.0, None))[None, :]


def _block(factor: np.ndarray, m: int, size: int, seed_seq) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    z = rng.standard_normal((size, m, factor.shape[0]))
    g = z @ factor.T
    return 0.5 * np.einsum("bmi,bmi->bi", g, g)


def sample_gaussian_squares(k, beta: float, n_samples: int, seed: int = 0,
                            threads: int = 1) -> SampleBatch:
    k = as_kernel(k)
    m = half_integer_order(beta)
    w = is_class1(k)
    if w is None:
        raise NotClass1Error("kernel is not diagonally equivalent to a symmetric PSD matrix")
    factor = gaussian_factor(w.target)
    n_samples = int(n_samples)
    sizes = [min(BLOCK, n_samples - s) for s in range(0, n_samples, BLOCK)]
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, children))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda j: _block(factor, m, j[0], j[1]), jobs))
    else:
        parts = [_block(factor, m, s, c) for s, c in jobs]
    draws = np.concatenate(parts) if parts else np.zeros((0, k.n))
    return SampleBatch(k, float(beta), n_samples, int(seed), draws, w.target)


def analytic_laplace(k, alpha, beta: float) -> float:
    """det(I + diag(alpha) G)^(-beta)."""
    k = as_kernel(k)
    alpha = np.asarray(alpha, dtype=float)
    return float(det(np.eye(k.n) + alpha[:, None] * k.m) ** (-beta))


def empirical_laplace(batch: SampleBatch, alpha):
    """(mean of exp(-alpha . theta), its CLT standard error, analytic value)."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ValueError("alpha must be nonnegative")
    analytic = analytic_laplace(batch.kernel, alpha, batch.beta)
    if not np.any(alpha):
        return 1.0, 0.0, analytic
    x = np.exp(-batch.draws @ alpha)
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size)), analytic


def alpha_grid(n: int, points: int = 20) -> np.ndarray:
    """``points`` log-spaced magnitudes cycled over four direction patterns."""
    ramp = np.arange(1, n + 1, dtype=float) / n
    unit = np.zeros(n)
    unit[0] = 1.0
    patterns = [np.ones(n), ramp, unit, ramp[::-1]]
    scales = np.logspace(-1.0, 1.0, points)
    return np.array([s * patterns[i % 4] for i, s in enumerate(scales)])


def _zscore(diff: np.ndarray, se: np.ndarray) -> np.ndarray:
    safe = np.where(se > 0, se, 1.0)
    return np.where(se > 0, diff / safe, np.where(diff == 0, 0.0, np.sign(diff) * 1e300))


@dataclass(frozen=True)
class MomentReport:
    means: np.ndarray
    analytic_means: np.ndarray
    mean_se: np.ndarray
    mean_z: np.ndarray
    cov: np.ndarray
    analytic_cov: np.ndarray
    cov_se: np.ndarray
    cov_z: np.ndarray

    @property
    def max_abs_z(self) -> float:
        return float(max(np.abs(self.mean_z).max(), np.abs(self.cov_z).max()))


def moment_report(batch: SampleBatch) -> MomentReport:
    """Means beta*G_ii and covariances beta*G_ij*G_ji against the draws."""
    x = batch.draws
    n_obs = x.shape[0]
    if n_obs < 10_000:
        raise ValueError("moment_report needs at least 1e4 draws")
    g = batch.kernel.m
    beta = batch.beta
    means = x.mean(axis=0)
    mean_se = x.std(axis=0, ddof=1) / np.sqrt(n_obs)
    centered = x - means
    cov = centered.T @ centered / (n_obs - 1)
    nd = x.shape[1]
    cov_se = np.empty((nd, nd))
    for i in range(nd):
        for j in range(i, nd):
            p = centered[:, i] * centered[:, j]
            cov_se[i, j] = cov_se[j, i] = p.std(ddof=1) / np.sqrt(n_obs)
    a_means = beta * np.diag(g)
    a_cov = beta * g * g.T
    return MomentReport(means, a_means, mean_se, _zscore(means - a_means, mean_se),
                        cov, a_cov, cov_se, _zscore(cov - a_cov, cov_se))


@dataclass(frozen=True)
class MetricTable:
    d: np.ndarray
    worst_slack: Optional[float]
    worst_triple: Optional[tuple]
    necessary_ok: bool
    notes: tuple = ()


def _exact_minor(a: float, b: float, c: float, d: float) -> float:
    """a*b - c*d rounded once, via exact rational arithmetic."""
    return float(Fraction(a) * Fraction(b) - Fraction(c) * Fraction(d))


def _squared_distance(gxx: float, gyy: float, gxy: float, gyx: float) -> float:
    # gxx + gyy - 2 sqrt(gxy gyx) rewritten so that nothing cancels:
    # (sqrt gxx - sqrt gyy)^2 + 2 (gxx gyy - gxy gyx) / (sqrt(gxx gyy) + sqrt(gxy gyx))
    if gxx < 0 or gyy < 0:
        return gxx + gyy - 2.0 * np.sqrt(max(gxy * gyx, 0.0))
    minor = _exact_minor(gxx, gyy, gxy, gyx)
    root_pp = np.sqrt(max(gxy * gyx, 0.0))
    denom = np.sqrt(gxx * gyy) + root_pp
    lead = (np.sqrt(gxx) - np.sqrt(gyy)) ** 2
    if denom == 0.0:
        return lead
    return lead + 2.0 * minor / denom


def metric_table(k) -> MetricTable:
    """d(x, y) = sqrt(G_xx + G_yy - 2 sqrt(G_xy G_yx)) and the worst triangle slack."""
    k = as_kernel(k)
    g = k.m
    n = k.n
    pp = g * g.T
    if np.any(pp < -k.atol(2)):
        raise NegativePairProductError("metric needs G_ij G_ji >= 0")
    d2 = np.zeros((n, n))
    for x in range(n):
        for y in range(x + 1, n):
            d2[x, y] = d2[y, x] = _squared_distance(g[x, x], g[y, y], g[x, y], g[y, x])
    notes = []
    if d2.min() < -k.atol(1):
        notes.append("negative squared distance clipped to 0")
    d = np.sqrt(np.clip(d2, 0.0, None))
    worst, triple = None, None
    for x, y, z in permutations(range(n), 3):
        s = d[x, z] + d[z, y] - d[x, y]
        if worst is None or s < worst:
            worst, triple = float(s), (x, y, z)
    return MetricTable(d, worst, triple, check_necessary(k).overall, tuple(notes))


def symmetrized_psd_check(k) -> bool:
    """Is the entrywise sqrt(G_ij G_ji) symmetrization positive semidefinite?"""
    k = as_kernel(k)
    if k.n != 3:
        raise DimensionError("symmetrized_psd_check is stated for 3x3 kernels")
    return is_psd(symmetrize(k), k.tol)
