"""Least-squares SVMs with anisotropic Gaussian kernels.

Modules: ``kernel`` (kernel, ONB, RKHS norms), ``solver`` (LS-SVM fit and
clipping), ``besov`` (moduli of smoothness), ``smoothing`` (the convolution
smoother), ``bounds`` (rate and oracle-inequality calculators), ``synth``
(targets and sampling) and ``harness`` (experiments and reports).
"""

from .besov import SmoothnessProfile, effective_smoothness, effective_smoothness_subset
from .bounds import build_schedule, optimal_bandwidths, rate_exponent
from .config import ExperimentConfig, load_config
from .errors import ConfigError, DegenerateFitError, InvalidArgumentError, NumericalFailureError
from .harness import compare_iso_aniso, fit_loglog_slope, run_rate_experiment, run_subset_experiment
from .kernel import Bandwidths, eval_kernel, gram_matrix, kernel_matrix
from .solver import Dataset, TrainedModel, fit, predict
from .synth import FactorSpec, SamplingSpec, TargetSpec, make_target, sample_dataset

__version__ = "0.1.0"
