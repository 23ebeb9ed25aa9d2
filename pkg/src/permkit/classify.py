"""Class-1 / class-2 membership and the 3x3 classifier.

Class 1: diagonally equivalent to a symmetric positive semidefinite matrix.
Class 2: the inverse is diagonally equivalent to an M-matrix.
At n = 3 every kernel lies in one of the two classes, so a 3x3 matrix that
is in neither is reported as ``NotKernel``.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .errors import (DimensionError, NegativePairProductError, NotNormalizableError,
                     NotSymmetricError, SignConstraintError, SingularError)
from .kernelcheck import (as_kernel, balance, check_necessary, diag_equiv_symmetric,
                          sign_normalize)
from .matcore import as_matrix, det, inverse, singular_tol

MAX_SIGNATURE_DIM = 8


def is_psd(m, tol: float = 1e-9) -> bool:
    """All eigenvalues >= -tol (relative to the entry scale); semidefinite counts."""
    a = as_matrix(m)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > tol * scale:
        raise NotSymmetricError("is_psd needs a symmetric matrix")
    w = np.linalg.eigvalsh(0.5 * (a + a.T))
    return bool(w.min() >= -tol * scale)


@dataclass(frozen=True)
class Class1Witness:
    scaling: Optional[np.ndarray]  # D with D G D^-1 = target; None for effective equivalence
    target: np.ndarray
    kind: str


def is_class1(k) -> Optional[Class1Witness]:
    k = as_kernel(k)
    g = k.m
    if k.n != 3:
        if np.max(np.abs(g - g.T)) <= k.atol(1) and is_psd(g, k.tol):
            return Class1Witness(np.ones(k.n), 0.5 * (g + g.T), "Symmetric")
        return None
    try:
        normalized, sig = sign_normalize(k)
        w = diag_equiv_symmetric(normalized)
    except (NotNormalizableError, NegativePairProductError):
        return None
    if w.kind == "NotEquivalent" or not is_psd(w.target, k.tol):
        return None
    if w.kind == "Symmetric":
        # T = D (S G S) D^-1 = (D S) G (D S)^-1
        return Class1Witness(w.scaling * sig, w.target, "Symmetric")
    return Class1Witness(None, w.target, w.kind)


@dataclass(frozen=True)
class MMatrixCheck:
    ok: bool
    diagnosis: str  # "MMatrix" | "PositiveOffDiagonal" | "Singular" | "InverseNegative"

    def __bool__(self):
        return self.ok


def is_mmatrix(b, tol: float = 1e-9, inverse_hint=None) -> MMatrixCheck:
    """Off-diagonals <= 0, nonsingular, inverse entrywise >= 0 (all up to tol).

    ``inverse_hint`` lets callers that already hold the inverse skip the solve.
    """
    a = as_matrix(b)
    scale = max(1.0, float(np.max(np.abs(a))))
    off = a[~np.eye(a.shape[0], dtype=bool)]
    if off.size and off.max() > tol * scale:
        return MMatrixCheck(False, "PositiveOffDiagonal")
    if inverse_hint is None:
        try:
            inv = inverse(a)
        except SingularError:
            return MMatrixCheck(False, "Singular")
    else:
        if abs(det(a)) <= singular_tol(a):
            return MMatrixCheck(False, "Singular")
        inv = np.asarray(inverse_hint, dtype=float)
    iscale = max(1.0, float(np.max(np.abs(inv))))
    if inv.min() < -tol * iscale:
        return MMatrixCheck(False, "InverseNegative")
    return MMatrixCheck(True, "MMatrix")


@dataclass(frozen=True)
class Class2Witness:
    signature: np.ndarray
    scaling: np.ndarray
    mmatrix: np.ndarray  # D N B N D^-1 with B = G^-1


def is_class2(k) -> Optional[Class2Witness]:
    """Search signatures N for N G^-1 N an M-matrix. Raises SingularError."""
    k = as_kernel(k)
    g = k.m
    n = k.n
    if n > MAX_SIGNATURE_DIM:
        raise DimensionError(f"signature search is limited to n <= {MAX_SIGNATURE_DIM}")
    b = inverse(g)
    bscale = max(1.0, float(np.max(np.abs(b))))
    off = ~np.eye(n, dtype=bool)
    # N and -N give the same conjugate, so fix the first sign
    for rest in product((1.0, -1.0), repeat=n - 1):
        s = np.array((1.0,) + rest)
        nbn = s[:, None] * b * s[None, :]
        if np.any(nbn[off] > k.tol * bscale):
            continue
        nan = s[:, None] * g * s[None, :]
        if not is_mmatrix(nbn, k.tol, inverse_hint=nan):
            continue
        d = np.ones(n)
        if n == 3:
            try:
                _, d = balance(nan)
            except Exception:
                d = np.ones(n)
        m = d[:, None] * nbn / d[None, :]
        return Class2Witness(s, d, m)
    return None


VERDICTS = ("Class1", "Class2", "Both", "NotKernel", "Undetermined")


@dataclass(frozen=True)
class ClassificationReport:
    verdict: str
    class1_witness: Optional[Class1Witness] = None
    class2_witness: Optional[Class2Witness] = None
    failure: Optional[str] = None
    notes: tuple = ()
    admissible_beta: str = ""


def _beta_text(verdict: str) -> str:
    if verdict in ("Class2", "Both"):
        return "all beta > 0"
    if verdict == "Class1":
        return "beta in {k/2 : k = 1, 2, ...} (finer set unresolved)"
    return ""


def _class_flags(k):
    notes = []
    c1 = is_class1(k)
    try:
        c2 = is_class2(k)
    except SingularError:
        c2 = None
        notes.append("class2: singular, no inverse")
    return c1, c2, notes


def _target_is_class2(target: np.ndarray, tol: float) -> bool:
    try:
        return is_class2(as_kernel(target, tol)) is not None
    except SingularError:
        return False


def _verdict_from_flags(c1, c2) -> Optional[str]:
    if c1 is not None and c2 is not None:
        return "Both"
    if c1 is not None:
        return "Class1"
    if c2 is not None:
        return "Class2"
    return None


def classify3(k) -> ClassificationReport:
    k = as_kernel(k)
    if k.n != 3:
        raise DimensionError(f"classify3 needs a 3x3 matrix, got n={k.n}")
    nec = check_necessary(k)
    if not nec.overall:
        fails = nec.failures()
        return ClassificationReport("NotKernel", failure=fails[0],
                                    notes=tuple(f"necessary: {f}" for f in fails))
    notes = []
    try:
        normalized, sig = sign_normalize(k)
        notes.append(f"signature {tuple(int(v) for v in sig)}")
    except NotNormalizableError:
        return ClassificationReport("Undetermined", failure="NotNormalizable",
                                    notes=("no uniform sign pattern",))
    c1, c2, extra = _class_flags(k)
    notes += extra
    verdict = _verdict_from_flags(c1, c2)
    if verdict is not None:
        beta = _beta_text(verdict)
        if verdict == "Class1" and c1.scaling is None and _target_is_class2(c1.target, k.tol):
            # same Laplace transform as the target, so the target's beta set applies
            notes.append("effective target is class 2")
            beta = "all beta > 0 (through the effective target)"
        return ClassificationReport(verdict, c1, c2, notes=tuple(notes), admissible_beta=beta)
    w = diag_equiv_symmetric(normalized)
    reasons = []
    if w.kind == "NotEquivalent":
        reasons.append("CycleConditionFails")
    else:
        reasons.append("EquivalentTargetNotPSD")
    reasons.append("InverseNotM")
    return ClassificationReport("NotKernel", failure=reasons[0],
                                notes=tuple(notes + reasons))


def classify(k) -> ClassificationReport:
    """3x3 goes through :func:`classify3`; other sizes report the class flags."""
    k = as_kernel(k)
    if k.n == 3:
        return classify3(k)
    nec = check_necessary(k)
    if not nec.overall:
        fails = nec.failures()
        return ClassificationReport("NotKernel", failure=fails[0],
                                    notes=tuple(f"necessary: {f}" for f in fails))
    if k.n > MAX_SIGNATURE_DIM:
        c1 = is_class1(k)
        c2, notes = None, ["class2: dimension above signature-search limit"]
    else:
        c1, c2, notes = _class_flags(k)
    verdict = _verdict_from_flags(c1, c2) or "Undetermined"
    return ClassificationReport(verdict, c1, c2, notes=tuple(notes),
                                admissible_beta=_beta_text(verdict))


@dataclass(frozen=True)
class IndependenceReport:
    pairwise_independent: bool
    product_form: bool
    c_coefficient: float
    fully_independent: bool
    fit_residual: float = 0.0
    notes: tuple = field(default_factory=tuple)


def _alpha_design(n: int) -> np.ndarray:
    if n <= 4:
        return np.array(list(product((0.0, 1.0, 2.0), repeat=n)))
    rng = np.random.default_rng(12345)
    return rng.uniform(0.0, 2.0, size=(200, n))


def independence_report(k) -> IndependenceReport:
    """Pairwise test G_ij G_ji = 0 and extraction of the leftover coefficient.

    With D(alpha) = det(I + alpha G) and P(alpha) = prod(1 + alpha_i G_ii), a
    kernel has the product shape when D - P = C * prod(alpha_i). C is fitted by
    least squares over a grid of alpha and reported at alpha = (1, ..., 1).
    """
    k = as_kernel(k)
    g = k.m
    n = k.n
    pi = g * g.T
    np.fill_diagonal(pi, 0.0)
    pairwise = bool(np.all(np.abs(pi) <= k.atol(2)))
    alphas = _alpha_design(n)
    eye = np.eye(n)
    dets = np.array([det(eye + a[:, None] * g) for a in alphas])
    base = np.prod(1.0 + alphas * np.diag(g)[None, :], axis=1)
    diff = dets - base
    mono = np.prod(alphas, axis=1)
    c_fit = float(diff @ mono / (mono @ mono))
    resid = float(np.max(np.abs(diff - c_fit * mono)))
    product_form = resid <= 1e-8 * k.scale ** n
    ones = np.ones(n)
    c_val = float(det(eye + g) - np.prod(1.0 + np.diag(g)))
    full = pairwise and product_form and abs(c_val) <= k.atol(n)
    notes = () if product_form else ("determinant is not of product-plus-monomial shape",)
    return IndependenceReport(pairwise, bool(product_form), c_val, bool(full), resid, notes)


def singular_family(x: float, y: float, branch: str = "+") -> np.ndarray:
    """Symmetric unit-diagonal matrix with entries sin x, cos y, sin(x +/- y); det 0.

    Layout: ``[[1, sin x, cos y], [sin x, 1, sin(x+-y)], [cos y, sin(x+-y), 1]]``.
    """
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    a = np.sin(x)
    b = np.cos(y)
    c = np.sin(x + y) if branch == "+" else np.sin(x - y)
    # (c - ab)^2 = cos^2 x sin^2 y = (1 - a^2)(1 - b^2), so det = 0 on both branches
    if min(a, b, c) < -1e-12:
        raise SignConstraintError("need sin x, cos y, sin(x +/- y) >= 0 on the chosen branch")
    return np.array([[1.0, a, b], [a, 1.0, c], [b, c, 1.0]])
