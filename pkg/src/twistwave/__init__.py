"""Twisted translations, Weyl kernels, Weyl-Zak transforms and twisted wavelet checks."""
from .bracket import BracketMap, frame_bounds, membership_residual
from .field import (ChirpField, Field2D, FunctionField, Grid, GridError, GridSpec,
                    SampledField, gaussian, inner, l2_norm, sample, zero_field)
from .ops import TwistIndex, composition_phase, dilate, twisted_translate, wavelet_op
from .report import VerificationReport
from .spectral import (SpectralFunction, calderon_sum, mainineq_check, sigma_general,
                       sigma_l1, sigma_principal, sigma_sum, sigma_w0j)
from .wavelet import (GeneratorFamily, GramResult, SystemIndex, build_system, coset_decompose,
                      design_tiling_family, gram_check, haar_generator, w0j_parseval_check)
from .weyl import WeylKernel, check_dilation_kernel, hs_norm, inverse_weyl_kernel, weyl_kernel
from .zak import (ZakField, ZakParams, check_isometry, check_zak_marginal,
                  check_zak_translation, weyl_zak)

__version__ = "0.1.0"
