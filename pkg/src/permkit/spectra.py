"""Eigenvalue structure of rescaled 3x3 kernels and the modified resolvent.

The unit-diagonal symmetric form used throughout is::

    H = [[1, a, c],
         [a, 1, b],
         [c, b, 1]]

Two diagonal rescalings of it matter:

* ``rho = (b/(b-ac), c/(c-ab), a/(a-bc))``: ``rho*H`` has 1 as a double
  eigenvalue, with the third eigenvalue ``rho1*rho2*rho3*det(H)``.
* ``phi = (b/(b+ac), c/(c+ab), a/(a+bc))``: the same construction for the
  matrix with off-diagonals ``-a, -b, -c``.

For a non-symmetric kernel the balanced magnitudes feed the same formulas,
and the rescaled kernel then has exactly one real eigenvalue.
"""
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Optional

import numpy as np

from .classify import is_mmatrix
from .errors import (DimensionError, NonPositiveInputError, PreconditionError,
                     SingularError, ZeroDenominatorError)
from .kernelcheck import as_kernel
from .matcore import as_matrix, char_poly, det, eigenvalues, inverse, is_real


@dataclass(frozen=True)
class SpectralScaling:
    entries: np.ndarray
    kind: str  # "Rho" | "Phi"


def rho_scaling(a: float, b: float, c: float) -> SpectralScaling:
    dens = np.array([b - a * c, c - a * b, a - b * c])
    if np.any(np.abs(dens) <= 1e-15 * max(1.0, abs(a), abs(b), abs(c)) ** 2):
        raise ZeroDenominatorError("rho scaling has a zero denominator")
    return SpectralScaling(np.array([b, c, a]) / dens, "Rho")


def phi_scaling(a: float, b: float, c: float) -> SpectralScaling:
    if min(a, b, c) <= 0:
        raise NonPositiveInputError("phi scaling needs a, b, c > 0")
    return SpectralScaling(np.array([b / (b + a * c), c / (c + a * b), a / (a + b * c)]), "Phi")


def _unit_symmetric_params(h: np.ndarray, tol: float = 1e-12):
    if h.shape != (3, 3):
        raise DimensionError("expected a 3x3 matrix")
    if np.max(np.abs(np.diag(h) - 1.0)) > tol or np.max(np.abs(h - h.T)) > tol:
        raise PreconditionError("expected a symmetric unit-diagonal matrix")
    return h[0, 1], h[1, 2], h[0, 2]


def rho_factorization_check(h):
    """Compare char_poly(rho H) with the expansion of (x-1)^2 (k - x).

    Returns ``(scaling, residual)``, the residual being the largest absolute
    coefficient difference.
    """
    h = as_matrix(h)
    a, b, c = _unit_symmetric_params(h)
    s = rho_scaling(a, b, c)
    cp = char_poly(s.entries[:, None] * h)
    k = float(np.prod(s.entries) * det(h))
    expected = np.array([-1.0, k + 2.0, -(2.0 * k + 1.0), k])
    resid = float(np.max(np.abs(cp - expected)))
    return s, resid


@dataclass(frozen=True)
class EigenDichotomy:
    real_count: int
    real_value: Optional[float]
    complex_real_part: Optional[float]
    ordering: str  # "RealBelow" | "RealAbove" | "NotApplicable"
    eigenvalues: np.ndarray = field(repr=False, default=None)
    scaling: np.ndarray = field(default=None)
    notes: tuple = ()


def _dichotomy(vals: np.ndarray, scaling: np.ndarray, notes) -> EigenDichotomy:
    real = is_real(vals)
    count = int(np.count_nonzero(real))
    if count == 1:
        rv = float(vals[real][0].real)
        cr = float(np.mean(vals[~real].real))
        order = "RealBelow" if cr > rv else ("RealAbove" if cr < rv else "NotApplicable")
        return EigenDichotomy(1, rv, cr, order, vals, scaling, tuple(notes))
    return EigenDichotomy(count, None, None, "NotApplicable", vals, scaling, tuple(notes))


def _unit_diagonal(a: np.ndarray, tol: float):
    d = np.diag(a)
    if np.any(d <= 0):
        raise PreconditionError("diagonal entries must be positive")
    s = 1.0 / np.sqrt(d)
    a1 = s[:, None] * a * s[None, :]
    off = ~np.eye(3, dtype=bool)
    pp = (a1 * a1.T)[off]
    if pp.max() > 1.0 + tol:
        raise PreconditionError("normalized pair products must be <= 1")
    return a1, d


# Off-diagonal supports of the three zero patterns that still carry a cycle.
_F_PATTERNS = {
    "F1": {(0, 1), (1, 0), (0, 2), (2, 0), (1, 2)},
    "F2": {(0, 1), (1, 0), (1, 2), (2, 0)},
    "F3": {(0, 1), (1, 2), (2, 0)},
}


def _f_scaling(kind: str, p: np.ndarray) -> np.ndarray:
    """Phi for a canonical magnitude matrix p of pattern F1/F2/F3."""
    if kind == "F1":
        a = np.sqrt(p[0, 1] * p[1, 0])
        c = np.sqrt(p[0, 2] * p[2, 0])
        d1 = np.sqrt(p[0, 1] / p[1, 0])
        d2 = np.sqrt(p[0, 2] / p[2, 0])
        bp = d1 * p[1, 2] / d2
        b = -a * c + np.sqrt(a * a * c * c + a * c * bp)
        return phi_scaling(a, b, c).entries
    if kind == "F2":
        a = np.sqrt(p[0, 1] * p[1, 0])
        bp = np.sqrt(p[0, 1] / p[1, 0]) * p[1, 2]
        cp = p[2, 0]
        b = np.sqrt(a * cp * bp / (2.0 + 2.0 * a))
        return phi_scaling(a, b, b).entries
    ap, bp, cp = p[0, 1], p[1, 2], p[2, 0]
    s = bp * cp
    a = 0.5 * (-s + np.sqrt(s * s + 4.0 * ap * s))
    b = np.sqrt(a * cp * bp / (2.0 + 2.0 * a))
    return phi_scaling(a, b, b).entries


def _match_pattern(mag: np.ndarray, zt: float):
    for perm in permutations(range(3)):
        perm = list(perm)
        for transpose in (False, True):
            q = mag.T if transpose else mag
            qp = q[np.ix_(perm, perm)]
            support = {(i, j) for i in range(3) for j in range(3) if i != j and qp[i, j] > zt}
            for kind, pat in _F_PATTERNS.items():
                if support == pat:
                    phi_c = _f_scaling(kind, qp)
                    phi = np.empty(3)
                    phi[perm] = phi_c
                    return kind, phi
    return None, None


def negative_case_dichotomy(a_minus, tol: float = 1e-9) -> EigenDichotomy:
    """Eigenvalue layout of Phi * A for a kernel with nonpositive off-diagonals.

    Phi comes from the balanced magnitudes, or from the zero-pattern recipes
    when some entries vanish. For a non-symmetric input the expected outcome
    is one real eigenvalue lying below the real part of the complex pair.
    ``scaling`` in the result is Phi in the coordinates of the input.
    """
    a = as_matrix(a_minus)
    if a.shape != (3, 3):
        raise DimensionError("expected a 3x3 matrix")
    scale = max(1.0, float(np.max(np.abs(a))))
    off = ~np.eye(3, dtype=bool)
    if a[off].max() > tol * scale:
        raise PreconditionError("off-diagonal entries must be <= 0")
    if det(a) < -tol * scale ** 3:
        raise PreconditionError("determinant must be >= 0")
    a1, d = _unit_diagonal(a, tol)
    mag = np.clip(-a1, 0.0, None)
    np.fill_diagonal(mag, 0.0)
    notes = []
    if np.all(mag[off] > tol):
        av = np.sqrt(mag[0, 1] * mag[1, 0])
        bv = np.sqrt(mag[1, 2] * mag[2, 1])
        cv = np.sqrt(mag[0, 2] * mag[2, 0])
        phi = phi_scaling(av, bv, cv).entries
    else:
        kind, phi = _match_pattern(mag, tol)
        if kind is None:
            phi = np.ones(3)
            notes.append("zero pattern without a cycle; identity scaling")
        else:
            notes.append(f"zero pattern {kind}")
    vals = eigenvalues(phi[:, None] * a1).values
    return _dichotomy(vals, phi / d, notes)


def positive_case_dichotomy(a_plus, tol: float = 1e-9) -> EigenDichotomy:
    """Eigenvalue layout of rho * A for a class-2 kernel with nonnegative off-diagonals.

    Expected for non-symmetric input: one real eigenvalue lying above the
    real part of the complex pair.
    """
    a = as_matrix(a_plus)
    if a.shape != (3, 3):
        raise DimensionError("expected a 3x3 matrix")
    scale = max(1.0, float(np.max(np.abs(a))))
    off = ~np.eye(3, dtype=bool)
    if a[off].min() < -tol * scale:
        raise PreconditionError("off-diagonal entries must be >= 0")
    a1, d = _unit_diagonal(a, tol)
    try:
        b = inverse(a1)
    except SingularError as exc:
        raise PreconditionError("kernel must be invertible") from exc
    if not is_mmatrix(b, tol, inverse_hint=a1):
        raise PreconditionError("inverse must be an M-matrix")
    notes = []
    if np.all(a1[off] > tol):
        av = np.sqrt(a1[0, 1] * a1[1, 0])
        bv = np.sqrt(a1[1, 2] * a1[2, 1])
        cv = np.sqrt(a1[0, 2] * a1[2, 0])
        try:
            rho = rho_scaling(av, bv, cv).entries
        except ZeroDenominatorError:
            rho = None
        if rho is None or np.any(rho <= 0):
            rho = np.ones(3)
            notes.append("rho not positive; identity scaling")
    else:
        rho = np.ones(3)
        notes.append("zero entries; identity scaling")
    vals = eigenvalues(rho[:, None] * a1).values
    return _dichotomy(vals, rho / d, notes)


def modified_resolvent(k, r: float) -> np.ndarray:
    """G (I + r G)^{-1}."""
    k = as_kernel(k)
    g = k.m
    m = np.eye(k.n) + r * g
    if abs(det(m)) <= 1e-12 * max(1.0, float(np.max(np.abs(m)))) ** k.n:
        raise SingularError("I + rG is singular")
    # G and (I + rG)^-1 commute
    return np.linalg.solve(m, g)


@dataclass(frozen=True)
class ResolventSweep:
    r_grid: np.ndarray
    dets: np.ndarray
    min_entries: np.ndarray
    verdict: str  # "AllNonneg" | "FailsAt" | "DetFailsAt" | "EigenFails"
    fail_r: Optional[float] = None
    fail_subset: Optional[tuple] = None
    real_eigs_positive: bool = True
    notes: tuple = ("grid check; a semi-decision, not a proof",)

    @property
    def contradicts_kernel(self) -> bool:
        """True for failures of the necessary conditions (det or eigenvalue)."""
        return self.verdict in ("DetFailsAt", "EigenFails")


def sweep_grid(r_max: float, steps: int) -> np.ndarray:
    geo = np.geomspace(1e-3 * r_max, r_max, steps)
    lin = np.linspace(0.0, r_max, 16)
    return np.unique(np.concatenate([[0.0], geo, lin]))


def _subsets(n: int):
    full = tuple(range(n))
    if n <= 4:
        rest = [s for size in range(n - 1, 0, -1) for s in combinations(range(n), size)]
    else:
        rest = list(combinations(range(n), 2)) + [(i,) for i in range(n)]
    return [full] + rest


def _sweep_one(g: np.ndarray, grid: np.ndarray, tol: float):
    n = g.shape[0]
    m = np.eye(n)[None] + grid[:, None, None] * g[None]
    dets = np.linalg.det(m)
    mins = np.full(grid.size, np.nan)
    good = dets > 0
    if np.any(good):
        gr = np.linalg.solve(m[good], np.broadcast_to(g, (int(good.sum()), n, n)))
        mins[good] = gr.min(axis=(1, 2))
        scales = np.maximum(1.0, np.abs(gr).max(axis=(1, 2)))
        neg = np.zeros(grid.size, dtype=bool)
        neg[good] = mins[good] < -tol * scales
    else:
        neg = np.zeros(grid.size, dtype=bool)
    return dets, mins, neg


def nonneg_signature(g: np.ndarray, tol: float = 0.0) -> Optional[np.ndarray]:
    """A signature N with N G N having off-diagonals >= -tol, if one exists.

    Two-colouring over the support graph; entries within tol count as zero.
    """
    n = g.shape[0]
    s = np.zeros(n)
    for root in range(n):
        if s[root]:
            continue
        s[root] = 1.0
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j == i:
                    continue
                for v in (g[i, j], g[j, i]):
                    if abs(v) <= tol:
                        continue
                    want = s[i] * np.sign(v)
                    if s[j] == 0:
                        s[j] = want
                        stack.append(j)
                    elif s[j] != want:
                        return None
    return s


def vere_jones_sweep(k, r_max: float = 1e3, steps: int = 64) -> ResolventSweep:
    """Check det(I + rG) > 0 and G_r >= 0 entrywise on a grid of r in [0, r_max].

    The kernel is first conjugated by a signature making its off-diagonals
    nonnegative when one exists (this leaves the Laplace transform unchanged).
    Principal submatrices are swept too, since sub-vectors of a permanental
    vector are permanental with the corresponding submatrix as kernel.

    Only ``DetFailsAt`` and ``EigenFails`` contradict kernel-hood; ``FailsAt``
    means the entrywise sufficient condition is not met.
    """
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    k = as_kernel(k)
    g = k.m
    notes = ["grid check; a semi-decision, not a proof"]
    sig = nonneg_signature(g, k.atol(1))
    if sig is not None:
        g = sig[:, None] * g * sig[None, :]
        if np.any(sig < 0):
            notes.append(f"swept under signature {tuple(int(v) for v in sig)}")
    grid = sweep_grid(r_max, steps)
    verdict, fail_r, fail_subset = "AllNonneg", None, None
    full_dets = full_mins = None
    for subset in _subsets(k.n):
        sub = g[np.ix_(subset, subset)]
        dets, mins, neg = _sweep_one(sub, grid, k.tol)
        if full_dets is None:
            full_dets, full_mins = dets, mins
        dfail = np.flatnonzero(dets <= 0)
        efail = np.flatnonzero(neg)
        if dfail.size:
            # a determinant failure is the stronger statement; prefer it
            verdict, fail_r, fail_subset = "DetFailsAt", float(grid[dfail[0]]), subset
            break
        if efail.size and verdict == "AllNonneg":
            verdict, fail_r, fail_subset = "FailsAt", float(grid[efail[0]]), subset
    spec = eigenvalues(g).values
    real = spec[is_real(spec)].real
    eig_ok = bool(np.all(real[np.abs(real) > k.atol(1)] > 0))
    if verdict in ("AllNonneg", "FailsAt") and not eig_ok:
        verdict, fail_r, fail_subset = "EigenFails", None, tuple(range(k.n))
    return ResolventSweep(grid, full_dets, full_mins, verdict, fail_r, fail_subset, eig_ok,
                          tuple(notes))

