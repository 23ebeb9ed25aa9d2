"""M-matrix decompositions, log-det series certificates and kernel reduction.

Two series are available:

* :func:`log_det_series` expands ``-log det(I - Z G)`` in ``z``. Cyclic
  products are invariant under signature conjugation, so this series is
  nonnegative for every kernel that is signature-equivalent to a
  nonnegative matrix, class 2 in particular.
* :func:`poisson_series_certificate` expands ``-log det(I - S Q_t)`` with
  ``Q_t = t G (I + t G)^{-1}``. Up to the factor ``beta`` this is the log
  generating function of Poisson counts with intensity ``t * theta``, so its
  coefficients must be nonnegative whenever the law is infinitely
  divisible. This is the series that separates symmetric kernels with and
  without an M-matrix inverse.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from . import _kernels
from .classify import is_class2, is_mmatrix
from .errors import (DegreeTooLargeError, DimensionError, NotMMatrixError,
                     PreconditionError, SingularError)
from .kernelcheck import as_kernel, cycle_condition, cycles_equal
from .matcore import inverse, spectral_radius
from .spectra import modified_resolvent

MAX_SERIES_DEGREE = 12
MAX_SERIES_DIM = 4


@dataclass(frozen=True)
class MDecomposition:
    d: np.ndarray
    lam: float
    c: np.ndarray
    residual: float
    delta0: float = 0.0


def mmatrix_decompose(b) -> MDecomposition:
    """Write B D = lam I - C with D from the row sums of B^-1 and C >= 0.

    B D has unit row sums, so C' = lam I - B D with lam = max diag(B D) is
    nonnegative with constant row sums lam - 1 and spectral radius lam - 1.
    The shift delta0 is therefore always 0.
    """
    b = np.asarray(b, dtype=float)
    check = is_mmatrix(b)
    if not check:
        raise NotMMatrixError(f"not an M-matrix ({check.diagnosis})")
    d = inverse(b).sum(axis=1)
    bd = b * d[None, :]
    lam = float(np.max(np.diag(bd)))
    c = lam * np.eye(b.shape[0]) - bd
    delta0 = 0.0
    step = max(1.0, float(np.max(np.abs(c))))
    k = 0
    while not lam + delta0 > spectral_radius(c + delta0 * np.eye(b.shape[0])) + 1e-6:
        k += 1
        delta0 = k * step
    lam += delta0
    c = c + delta0 * np.eye(b.shape[0])
    resid = float(np.max(np.abs(bd - (lam * np.eye(b.shape[0]) - c))))
    return MDecomposition(d, lam, c, resid, delta0)


@dataclass(frozen=True)
class DominanceCheck:
    dominant: bool
    symmetric_part_pd: bool
    min_real_eigenvalue: float

    @property
    def ok(self) -> bool:
        return self.dominant and self.symmetric_part_pd

    def __bool__(self):
        return self.ok


def dominance_pd_check(bd) -> DominanceCheck:
    """Strict row diagonal dominance and positive definiteness of bd + bd^T."""
    a = np.asarray(bd, dtype=float)
    diag = np.diag(a)
    offsum = np.abs(a).sum(axis=1) - np.abs(diag)
    dominant = bool(np.all(offsum < diag))
    sym_pd = bool(np.linalg.eigvalsh(a + a.T).min() > 0)
    min_re = float(np.linalg.eigvals(a).real.min())
    return DominanceCheck(dominant, sym_pd, min_re)


@dataclass(frozen=True)
class SeriesCertificate:
    max_degree: int
    coefficients: dict
    min_coefficient: float
    verdict: str  # "Nonneg" | "NegativeAt"
    negative_at: Optional[tuple] = None
    tol: float = 0.0


def multi_indices(n: int, max_degree: int):
    """All exponent tuples of total degree <= max_degree, by degree then lexicographic."""
    out = [e for e in product(range(max_degree + 1), repeat=n) if sum(e) <= max_degree]
    return sorted(out, key=lambda e: (sum(e), e))


def _series_of(g: np.ndarray, max_degree: int) -> dict:
    n = g.shape[0]
    flat = _kernels.cycle_series(g, max_degree)
    base = max_degree + 1
    powers = base ** np.arange(n)
    return {e: float(flat[int(np.dot(e, powers))]) for e in multi_indices(n, max_degree)}


def _certificate(coefs: dict, max_degree: int, scale: float) -> SeriesCertificate:
    tol = 1e-10 * (1.0 + scale) ** max_degree
    worst = min(coefs, key=lambda e: (coefs[e], sum(e), e))
    mn = coefs[worst]
    if mn >= -tol:
        return SeriesCertificate(max_degree, coefs, mn, "Nonneg", None, tol)
    return SeriesCertificate(max_degree, coefs, mn, "NegativeAt", worst, tol)


def _check_series_args(k, max_degree: int):
    if max_degree > MAX_SERIES_DEGREE or max_degree < 1:
        raise DegreeTooLargeError(f"max_degree must be in 1..{MAX_SERIES_DEGREE}")
    if k.n > MAX_SERIES_DIM:
        raise DimensionError(f"series enumeration is limited to n <= {MAX_SERIES_DIM}")


def log_det_series(k, max_degree: int = 8) -> SeriesCertificate:
    """Coefficients of -log det(I - Z G) = sum_k tr((Z G)^k)/k up to total degree K."""
    k = as_kernel(k)
    _check_series_args(k, max_degree)
    coefs = _series_of(k.m, max_degree)
    return _certificate(coefs, max_degree, float(np.max(np.abs(k.m))))


def default_t_grid(k) -> np.ndarray:
    scale = float(np.mean(np.abs(np.diag(k.m))))
    scale = scale if scale > 0 else 1.0
    return np.logspace(-1.0, 2.0, 13) / scale


@dataclass(frozen=True)
class PoissonCertificate:
    verdict: str  # "Nonneg" | "NegativeAt"
    min_coefficient: float
    t: Optional[float]
    negative_at: Optional[tuple]
    per_t: tuple = field(default_factory=tuple, repr=False)
    tol: float = 0.0

    @property
    def near_zero(self) -> bool:
        """Smallest coefficient within 100 tolerances of 0: truncation cannot settle it."""
        return abs(self.min_coefficient) <= 100.0 * self.tol


def poisson_series_certificate(k, max_degree: int = 8, t_grid=None) -> PoissonCertificate:
    """Nonnegativity of -log det(I - S Q_t) coefficients over a grid of t."""
    k = as_kernel(k)
    _check_series_args(k, max_degree)
    grid = default_t_grid(k) if t_grid is None else np.asarray(t_grid, dtype=float)
    per_t = []
    worst = None
    for t in grid:
        try:
            q = t * modified_resolvent(k, t)
        except SingularError:
            continue
        cert = _certificate(_series_of(q, max_degree), max_degree, float(np.max(np.abs(q))))
        per_t.append((float(t), cert))
        if worst is None or cert.min_coefficient < worst[1].min_coefficient:
            worst = (float(t), cert)
    if worst is None:
        raise SingularError("I + tG is singular on the whole grid")
    bad = [(t, c) for t, c in per_t if c.verdict == "NegativeAt"]
    if bad:
        t, c = min(bad, key=lambda tc: tc[1].min_coefficient)
        return PoissonCertificate("NegativeAt", c.min_coefficient, t, c.negative_at,
                                  tuple(per_t), c.tol)
    t, c = worst
    return PoissonCertificate("Nonneg", c.min_coefficient, t, None, tuple(per_t), c.tol)


@dataclass(frozen=True)
class Certification:
    verdict: str  # "CertifiedAllBeta" | "NotCertified"
    reason: Optional[str]
    class2_witness: object = None
    series: Optional[SeriesCertificate] = None
    poisson: Optional[PoissonCertificate] = None


def certify_all_beta(k, max_degree: int = 8) -> Certification:
    """M-matrix witness plus a consistent nonnegative series on the normalized kernel.

    ``max_degree=0`` skips both series and relies on the witness alone.
    """
    k = as_kernel(k)
    w = is_class2(k)
    use_series = max_degree > 0 and k.n <= MAX_SERIES_DIM
    if w is None:
        poisson = None
        if use_series:
            poisson = poisson_series_certificate(k, max_degree)
        return Certification("NotCertified", "InverseNotM", None, None, poisson)
    s = w.signature
    normalized = s[:, None] * k.m * s[None, :]
    series = None
    if use_series:
        series = log_det_series(k.with_matrix(normalized), max_degree)
        if series.verdict != "Nonneg":
            return Certification("NotCertified", "SeriesNegative", w, series)
    return Certification("CertifiedAllBeta", None, w, series)


@dataclass(frozen=True)
class ReductionSpec:
    fixed: dict  # index -> pin value u >= 0
    remaining: tuple

    @classmethod
    def pin(cls, n: int, fixed: dict) -> "ReductionSpec":
        return cls(dict(fixed), tuple(i for i in range(n) if i not in fixed))


def _eliminate(g: np.ndarray, p: int, u: float) -> np.ndarray:
    v = u / (1.0 + u * g[p, p])
    keep = [i for i in range(g.shape[0]) if i != p]
    out = g - v * np.outer(g[:, p], g[p, :])
    return out[np.ix_(keep, keep)]


def reduce_kernel(k, spec: ReductionSpec):
    """Condition on pinned indices, last index first.

    Eliminating index p at pin u replaces G_ij by G_ij - v G_ip G_pj with
    v = u / (1 + u G_pp); for a unit diagonal this is v = u / (1 + u).
    """
    k = as_kernel(k)
    if set(spec.fixed) | set(spec.remaining) != set(range(k.n)) or set(spec.fixed) & set(spec.remaining):
        raise ValueError("fixed and remaining must partition the index set")
    if any(u < 0 for u in spec.fixed.values()):
        raise ValueError("pin values must be nonnegative")
    g = k.m.copy()
    labels = list(range(k.n))
    for p in sorted(spec.fixed, reverse=True):
        pos = labels.index(p)
        g = _eliminate(g, pos, spec.fixed[p])
        labels.pop(pos)
    order = [labels.index(i) for i in spec.remaining]
    return k.with_matrix(g[np.ix_(order, order)])


@dataclass(frozen=True)
class ReductionVerdict:
    branch: str  # "Inequalities" | "CycleEquality" | "Violation" | "Inconclusive"
    worst_value: float
    worst_pin: int
    worst_v: float
    grid_size: int


def _sign_change(x, y, s1, s2, top, tol) -> bool:
    """Does (x - v s1)(y - v s2) go negative for some v in [0, top)?

    Decided from the roots x/s1 and y/s2 with a relative separation test,
    so it does not depend on the overall scale of the entries.
    """
    roots = [r for r, s in ((x / s1 if s1 > 0 else np.inf, s1), (y / s2 if s2 > 0 else np.inf, s2))]
    lo, hi = min(roots), max(roots)
    if not lo < top * (1.0 - tol):
        return False
    if np.isinf(hi):
        # one factor stays at its positive constant, the other crosses zero at lo
        const = x if s1 == 0 else y
        return bool(const > 0)
    return bool(hi - lo > tol * hi)


def reduction_sign_test(k, grid: int = 257) -> ReductionVerdict:
    """Sign of the reduced pair products as the pin value sweeps [0, inf).

    Pinning index p turns the remaining pair (i, j) into
    q(v) = (G_ij - v G_ip G_pj)(G_ji - v G_jp G_pi) for v in [0, 1/G_pp).
    q is evaluated on a grid and at its vertex; a Violation is declared when
    the two roots are separated and the first lies inside the range.
    Zero off-diagonal entries are allowed.
    """
    k = as_kernel(k)
    if k.n != 3:
        raise DimensionError("reduction_sign_test needs a 3x3 kernel")
    g = k.m
    if g.min() < -k.atol(1):
        raise PreconditionError("needs an entrywise nonnegative kernel")
    # entries within tolerance are zeros, as in sign normalization
    g = np.where(g <= k.atol(1), 0.0, g)
    worst = (np.inf, -1, 0.0)
    below = True
    violation = False
    for p in range(3):
        i, j = [x for x in range(3) if x != p]
        x, y = g[i, j], g[j, i]
        s1, s2 = g[i, p] * g[p, j], g[j, p] * g[p, i]
        if g[p, p] > 0:
            top = 1.0 / g[p, p]
        else:
            roots = [r for r in (x / s1 if s1 else None, y / s2 if s2 else None) if r is not None]
            top = 2.0 * max(roots) if roots else 1.0
            below = False
        vs = np.linspace(0.0, top, grid)
        if s1 > 0 and s2 > 0:
            vertex = 0.5 * (x / s1 + y / s2)
            vs = np.append(vs, min(max(vertex, 0.0), top))
        q = (x - vs * s1) * (y - vs * s2)
        idx = int(np.argmin(q))
        if q[idx] < worst[0]:
            worst = (float(q[idx]), p, float(vs[idx]))
        violation |= _sign_change(x, y, s1, s2, top if g[p, p] > 0 else np.inf, k.tol)
        if g[p, p] > 0:
            below &= bool(x * g[p, p] >= s1 * (1 - k.tol) and y * g[p, p] >= s2 * (1 - k.tol))
    if violation or worst[0] < -k.atol(2):
        branch = "Violation"
    elif below:
        branch = "Inequalities"
    else:
        p1, p2 = cycle_condition(k)
        # "Inconclusive" is only reachable when a sign change is below tolerance
        branch = "CycleEquality" if cycles_equal(k, p1, p2) else "Inconclusive"
    return ReductionVerdict(branch, worst[0], worst[1], worst[2], len(vs))
