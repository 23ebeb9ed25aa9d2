"""Necessary conditions, sign normalization, balancing and diagonal equivalence.

For 3x3 kernels the six off-diagonal entries are named positionally::

    a1 = G[0, 1]   a2 = G[1, 0]
    b1 = G[1, 2]   b2 = G[2, 1]
    c1 = G[2, 0]   c2 = G[0, 2]

so the two cyclic products are ``a1*b1*c1`` and ``a2*b2*c2``.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from . import _kernels
from .errors import (DimensionError, MixedSignsError, NegativePairProductError,
                     NotNormalizableError)
from .matcore import as_matrix, det, diag_conjugate, eigenvalues, is_real, sort_eigenvalues

DEFAULT_TOL = 1e-9
PAIRS3 = ((0, 1), (1, 2), (0, 2))


@dataclass(frozen=True)
class Kernel:
    """A candidate kernel: a square matrix plus a relative tolerance."""

    m: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        a = as_matrix(self.m).copy()
        a.setflags(write=False)
        object.__setattr__(self, "m", a)

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.m))))

    def atol(self, degree: int = 1) -> float:
        """Absolute tolerance for a quantity homogeneous of ``degree`` in the entries."""
        return self.tol * self.scale ** degree

    def with_matrix(self, m) -> "Kernel":
        return Kernel(m, self.tol)


def as_kernel(k, tol: Optional[float] = None) -> Kernel:
    if isinstance(k, Kernel):
        return k if tol is None else Kernel(k.m, tol)
    return Kernel(k, DEFAULT_TOL if tol is None else tol)


def _require_dim3(k: Kernel, what: str):
    if k.n != 3:
        raise DimensionError(f"{what} is defined for 3x3 kernels, got n={k.n}")


@dataclass(frozen=True)
class NecessaryReport:
    diag_nonneg: dict
    pair_products_nonneg: dict
    minors2_nonneg: dict
    det_nonneg: bool
    real_eigs_positive: bool
    values: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return (all(self.diag_nonneg.values()) and all(self.pair_products_nonneg.values())
                and all(self.minors2_nonneg.values()) and self.det_nonneg
                and self.real_eigs_positive)

    def failures(self) -> list:
        out = [f"DiagonalNegative{i}" for i, ok in self.diag_nonneg.items() if not ok]
        out += [f"PairProductNegative{p}" for p, ok in self.pair_products_nonneg.items() if not ok]
        out += [f"MinorNegative{p}" for p, ok in self.minors2_nonneg.items() if not ok]
        if not self.det_nonneg:
            out.append("DeterminantNegative")
        if not self.real_eigs_positive:
            out.append("NegativeRealEigenvalue")
        return out


def check_necessary(k) -> NecessaryReport:
    """Evaluate the elementary necessary conditions; values >= -tol pass."""
    k = as_kernel(k)
    g = k.m
    n = k.n
    diag = {i: bool(g[i, i] >= -k.atol(1)) for i in range(n)}
    pairs, minors = {}, {}
    for i in range(n):
        for j in range(i + 1, n):
            p = g[i, j] * g[j, i]
            pairs[(i, j)] = bool(p >= -k.atol(2))
            minors[(i, j)] = bool(g[i, i] * g[j, j] - p >= -k.atol(2))
    d = det(g)
    spec = eigenvalues(g).values
    real = spec[is_real(spec)].real
    nonzero = real[np.abs(real) > k.atol(1)]
    return NecessaryReport(
        diag_nonneg=diag,
        pair_products_nonneg=pairs,
        minors2_nonneg=minors,
        det_nonneg=bool(d >= -k.atol(n)),
        real_eigs_positive=bool(np.all(nonzero > 0)),
        values={"det": d, "min_real_eigenvalue": float(real.min()) if real.size else None},
    )


def sign_normalize(k):
    """Find a signature S with S G S off-diagonals all >= 0 or all <= 0.

    Zero entries count as either sign. Positive patterns are preferred, and
    signatures are tried in ``itertools.product((1, -1), repeat=3)`` order.
    Returns ``(Kernel(S G S), S)``.
    """
    k = as_kernel(k)
    _require_dim3(k, "sign_normalize")
    g = k.m
    off = ~np.eye(3, dtype=bool)
    zt = k.atol(1)
    for target in (1.0, -1.0):
        for s in product((1.0, -1.0), repeat=3):
            s = np.array(s)
            h = s[:, None] * g * s[None, :]
            if np.all(target * h[off] >= -zt):
                return k.with_matrix(h), s
    raise NotNormalizableError("no signature gives a uniform off-diagonal sign pattern")


def cycle_condition(k):
    """The two cyclic products (a1 b1 c1, a2 b2 c2)."""
    k = as_kernel(k)
    _require_dim3(k, "cycle_condition")
    g = k.m
    return float(g[0, 1] * g[1, 2] * g[2, 0]), float(g[1, 0] * g[2, 1] * g[0, 2])


def cycles_equal(k, p1: float, p2: float) -> bool:
    """Relative comparison with an absolute floor matching the zero-entry test."""
    k = as_kernel(k)
    return abs(p1 - p2) <= k.tol * max(abs(p1), abs(p2)) + k.atol(3)


def balance(k):
    """Diagonally conjugate so the a- and c-pairs become symmetric.

    Needs all off-diagonals of one strict sign. Returns ``(Kernel(E'), d)``
    with ``E' = D G D^{-1}``; the b-pair keeps its product b1*b2.
    """
    k = as_kernel(k)
    _require_dim3(k, "balance")
    g = k.m
    off = g[~np.eye(3, dtype=bool)]
    if not (np.all(off > 0) or np.all(off < 0)):
        raise MixedSignsError("balance needs off-diagonals all > 0 or all < 0")
    d = np.array([1.0, np.sqrt(g[0, 1] / g[1, 0]), np.sqrt(g[0, 2] / g[2, 0])])
    e = diag_conjugate(d, g)
    # remove rounding asymmetry on the two balanced pairs
    for i, j in ((0, 1), (0, 2)):
        v = np.copysign(np.sqrt(g[i, j] * g[j, i]), g[i, j])
        e[i, j] = e[j, i] = v
    return k.with_matrix(e), d


@dataclass(frozen=True)
class EquivalenceWitness:
    kind: str  # "Symmetric" | "EffectivelySymmetric" | "NotEquivalent"
    scaling: Optional[np.ndarray] = None
    target: Optional[np.ndarray] = None
    cycles: tuple = (0.0, 0.0)
    notes: tuple = ()


def _pair_status(k: Kernel):
    g = k.m
    zt = k.atol(1)
    status = {}
    for i, j in PAIRS3:
        nz = (abs(g[i, j]) > zt, abs(g[j, i]) > zt)
        status[(i, j)] = "full" if all(nz) else ("half" if any(nz) else "zero")
    return status


def _tree_scaling(g: np.ndarray, full_pairs) -> np.ndarray:
    # propagate (d_i/d_j)^2 = G[j,i]/G[i,j] along full pairs from node 0
    d = np.full(3, np.nan)
    for root in range(3):
        if not np.isnan(d[root]):
            continue
        d[root] = 1.0
        changed = True
        while changed:
            changed = False
            for i, j in full_pairs:
                if np.isnan(d[i]) ^ np.isnan(d[j]):
                    if np.isnan(d[j]):
                        d[j] = d[i] * np.sqrt(abs(g[i, j] / g[j, i]))
                    else:
                        d[i] = d[j] * np.sqrt(abs(g[j, i] / g[i, j]))
                    changed = True
    return d


def diag_equiv_symmetric(k) -> EquivalenceWitness:
    """Decide diagonal (or effective) equivalence to a symmetric matrix at n = 3."""
    k = as_kernel(k)
    _require_dim3(k, "diag_equiv_symmetric")
    g = k.m
    for i, j in PAIRS3:
        if g[i, j] * g[j, i] < -k.atol(2):
            raise NegativePairProductError(f"pair ({i},{j}) has a negative product")
    p1, p2 = cycle_condition(k)
    status = _pair_status(k)
    full = [p for p, s in status.items() if s == "full"]
    half = [p for p, s in status.items() if s == "half"]

    if not half:
        if len(full) == 3 and not cycles_equal(k, p1, p2):
            return EquivalenceWitness("NotEquivalent", cycles=(p1, p2),
                                      notes=("CycleConditionFails",))
        d = _tree_scaling(g, full)
        t = diag_conjugate(d, g)
        for i, j in PAIRS3:
            if status[(i, j)] == "zero":
                t[i, j] = t[j, i] = 0.0
        t = 0.5 * (t + t.T)
        return EquivalenceWitness("Symmetric", scaling=d, target=t, cycles=(p1, p2))

    # A half-zero pair forces a zero pair product, so any symmetric matrix with
    # the same principal minors has a zero cyclic product. Matching the
    # Laplace transform then needs p1 + p2 = 0.
    if not cycles_equal(k, p1 + p2, 0.0):
        return EquivalenceWitness("NotEquivalent", cycles=(p1, p2),
                                  notes=("CycleSumNonzeroWithHalfZeroPair",))
    t = np.diag(np.diag(g)).astype(float)
    for i, j in PAIRS3:
        if status[(i, j)] == "full":
            v = np.copysign(np.sqrt(g[i, j] * g[j, i]), g[i, j])
            t[i, j] = t[j, i] = v
    notes = tuple(f"half-zero pair {p} replaced by 0 (sqrt of product, nonnegative sign)"
                  for p in half)
    return EquivalenceWitness("EffectivelySymmetric", scaling=None, target=t,
                              cycles=(p1, p2), notes=notes)


def symmetrize(k) -> np.ndarray:
    """Entrywise sqrt(G_ij G_ji) off the diagonal, diagonal unchanged."""
    k = as_kernel(k)
    g = k.m
    prod_ = g * g.T
    if np.any(prod_ < -k.atol(2)):
        raise NegativePairProductError("symmetrize needs G_ij G_ji >= 0")
    h = np.sqrt(np.clip(prod_, 0.0, None))
    np.fill_diagonal(h, np.diag(g))
    return h


@dataclass(frozen=True)
class PerronTestResult:
    passed: bool
    counterexample: Optional[np.ndarray]
    trials: int
    planted: int


def sample_row_scalings(n: int, trials: int, seed) -> np.ndarray:
    """Nonnegative diagonals from a fixed three-way mixture (rows of the result)."""
    rng = np.random.default_rng(seed)
    comp = rng.integers(0, 3, size=trials)
    unit = rng.uniform(0.0, 1.0, size=(trials, n))
    wide = rng.uniform(0.0, 10.0, size=(trials, n))
    keep = rng.random(size=(trials, n)) < 0.5
    out = np.where(comp[:, None] == 0, unit, wide)
    return np.where(comp[:, None] == 2, unit * keep, out)


def _max_modulus_has_positive_real(vals: np.ndarray, scale: float) -> np.ndarray:
    mods = np.abs(vals)
    top = mods.max(axis=1, keepdims=True)
    cand = mods >= top * (1 - 1e-9) - 1e-14 * scale
    good = cand & is_real(vals) & (vals.real > 0)
    degenerate = top[:, 0] <= 1e-12 * scale
    return good.any(axis=1) | degenerate


def row_scaled_perron_test(k, trials: int = 1000, rng_seed=0, planted=()) -> PerronTestResult:
    """Check that U G has a positive eigenvalue of maximal modulus for sampled U.

    ``planted`` diagonals are evaluated before the random ones, so known thin
    counterexamples are always exercised. Returns the first failing diagonal.
    """
    k = as_kernel(k)
    g = k.m
    n = k.n
    planted = [np.asarray(u, dtype=float) for u in planted]
    us = sample_row_scalings(n, trials, rng_seed)
    if planted:
        us = np.vstack([np.array(planted).reshape(-1, n), us])
    mats = us[:, :, None] * g[None, :, :]
    if n == 3:
        vals = _kernels.eig3_batch(mats)
    else:
        vals = np.linalg.eigvals(mats)
    vals = sort_eigenvalues(vals)
    scale = k.scale * max(1.0, float(us.max(initial=1.0)))
    ok = _max_modulus_has_positive_real(vals, scale)
    bad = np.flatnonzero(~ok)
    return PerronTestResult(
        passed=bad.size == 0,
        counterexample=us[bad[0]].copy() if bad.size else None,
        trials=trials,
        planted=len(planted),
    )
