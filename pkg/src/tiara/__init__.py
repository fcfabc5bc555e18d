"""Temporal-attention reweighting, spectral consistency metrics, and
aligned multi-prompt blending."""

from .attention import (MotionProfile, ReweightMatrix, TiaraResult,
                        build_reweight_matrix, motion_intensity, motion_profile,
                        reweighted_attention, row_spectrum, softmax_rows, tiara)
from .consistency import (InconsistencyReport, dynamic_component, estimate_kappa,
                          homogeneity_deviation, inconsistency_error,
                          inconsistency_profile)
from .errors import (AlignmentError, ConfigError, PromptParseError,
                     TensorFileError, ValidationError)
from .promptblend import (AlignedPromptSet, BlendSchedule, OrganizedPrompt,
                          TokenTable, align, conditioning, embed_aligned,
                          interpolation_weight, make_schedule, parse_organized)
from .spectral import (Spectrogram, Window, dft, dstft, make_window,
                       pad_periodic, spectrogram)
from .tensorfile import read_tensor, write_tensor
from .verifier import (TheoremInstance, TheoremReport, alpha_from_closed_form,
                       format_report, gen_homogeneous_attention,
                       gen_inconsistent_values, iota, lambda_coef, make_instance,
                       verify_theorem)

__version__ = "0.1.0"
