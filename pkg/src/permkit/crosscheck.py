"""Independent evidence that a matrix is not a permanental kernel.

The classifier's NotKernel verdict rests on the class-1 / class-2 tests.
The routines here reach the same conclusion through separate necessary
conditions, so a disagreement between the two routes flags a bug.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .divisibility import reduction_sign_test
from .errors import NotNormalizableError, PermkitError
from .kernelcheck import as_kernel, row_scaled_perron_test, sign_normalize
from .spectra import negative_case_dichotomy, vere_jones_sweep


@dataclass(frozen=True)
class Evidence:
    method: str  # "VereJones" | "Reduction" | "Perron"
    detail: str


def planted_row_scalings(k) -> list:
    """Row scalings worth trying first in the Perron test.

    For each pair (i, j) with positive diagonal entries and G_ij G_ji clearly
    negative, U = e_i/G_ii + e_j/G_jj equalises the two diagonal entries of
    the 2x2 block, which makes its eigenvalues complex. Pairs whose product
    is only rounding noise are skipped: at a double eigenvalue that noise
    would be amplified to its square root. For 3x3 kernels with a
    negative sign pattern the spectral scaling Phi is added as well.
    """
    k = as_kernel(k)
    g = k.m
    diag = np.diag(g)
    out = []
    for i, j in combinations(range(k.n), 2):
        if diag[i] > 0 and diag[j] > 0 and g[i, j] * g[j, i] < -k.atol(2):
            u = np.zeros(k.n)
            u[i], u[j] = 1.0 / diag[i], 1.0 / diag[j]
            out.append(u)
    if k.n == 3:
        try:
            normalized, _ = sign_normalize(k)
            off = normalized.m[~np.eye(3, dtype=bool)]
            if off.max() <= normalized.atol(1) and np.any(off < 0):
                phi = negative_case_dichotomy(normalized.m, k.tol).scaling
                if np.all(phi >= 0):
                    out.append(np.asarray(phi, dtype=float))
        except (NotNormalizableError, PermkitError):
            pass
    return out


def corroborate_not_kernel(k, perron_trials: int = 200, seed: int = 0,
                           first_only: bool = True) -> list:
    """Collect failures of independent necessary conditions.

    Counted as evidence: a determinant or eigenvalue failure in the resolvent
    sweep, a sign violation in the reduced pair products, and a row scaling
    whose maximal-modulus eigenvalue is not positive. An entrywise-negative
    resolvent alone is not counted, since that condition is only sufficient.
    """
    k = as_kernel(k)
    found = []

    sweep = vere_jones_sweep(k)
    if sweep.contradicts_kernel:
        found.append(Evidence("VereJones", f"{sweep.verdict} r={sweep.fail_r} subset={sweep.fail_subset}"))
        if first_only:
            return found

    if k.n == 3:
        try:
            normalized, _ = sign_normalize(k)
            if normalized.m.min() >= -normalized.atol(1):
                red = reduction_sign_test(normalized)
                if red.branch == "Violation":
                    found.append(Evidence("Reduction", f"pin {red.worst_pin} v={red.worst_v!r} "
                                                       f"q={red.worst_value!r}"))
                    if first_only:
                        return found
        except (NotNormalizableError, PermkitError):
            pass

    perron = row_scaled_perron_test(k, perron_trials, seed, planted_row_scalings(k))
    if not perron.passed:
        found.append(Evidence("Perron", f"U={tuple(float(x) for x in perron.counterexample)}"))
    return found
