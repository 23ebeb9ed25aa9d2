"""Tools for deciding whether a matrix is the kernel of a permanental vector.

A nonnegative random vector theta is permanental with kernel G and index
beta > 0 when E exp(-sum alpha_i theta_i) = det(I + diag(alpha) G)^(-beta).
"""
from ._accel import jit_enabled
from .classify import (ClassificationReport, Class1Witness, Class2Witness, IndependenceReport,
                       MMatrixCheck, classify, classify3, independence_report, is_class1,
                       is_class2, is_mmatrix, is_psd, singular_family)
from .crosscheck import Evidence, corroborate_not_kernel, planted_row_scalings
from .divisibility import (Certification, DominanceCheck, MDecomposition, PoissonCertificate,
                           ReductionSpec, ReductionVerdict, SeriesCertificate, certify_all_beta,
                           dominance_pd_check, log_det_series, mmatrix_decompose,
                           poisson_series_certificate, reduce_kernel, reduction_sign_test)
from .errors import *  # noqa: F401,F403
from .kernelcheck import (EquivalenceWitness, Kernel, NecessaryReport, PerronTestResult,
                          as_kernel, balance, check_necessary, cycle_condition,
                          diag_equiv_symmetric, row_scaled_perron_test, sign_normalize,
                          symmetrize)
from .matcore import (Spectrum, adjugate, char_poly, det, diag_conjugate, eigenvalues, inverse,
                      row_scale, spectral_radius)
from .sampleverify import (MetricTable, MomentReport, SampleBatch, alpha_grid, analytic_laplace,
                           empirical_laplace, metric_table, moment_report,
                           sample_gaussian_squares, symmetrized_psd_check)
from .spectra import (EigenDichotomy, ResolventSweep, SpectralScaling, modified_resolvent,
                      negative_case_dichotomy, nonneg_signature, phi_scaling,
                      positive_case_dichotomy, rho_factorization_check, rho_scaling,
                      vere_jones_sweep)

__version__ = "0.1.0"
