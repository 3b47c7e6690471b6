"""Singular integral operators with homogeneous kernels on self-similar sets.

Build an IFS attractor with its natural measure, evaluate truncated and
symbolic singular integrals with certified error brackets, test periodic
points for nonvanishing, assemble divergence certificates, perturb kernels,
and sample orbits ergodically.  The ``fractalsio`` console script exposes the
same drivers over JSON configs.
"""

from .errors import (ConfigError, EvaluationError, FractalsioError, InputError,
                     ResourceLimitError)
from .geometry import Euclidean, Heisenberg1, geometry_from_config
from .symbolic import (EPWord, concat, cylinder_prob, is_prefix, power,
                       validate_word)
from .ifs import IFS, SeparationReport, Similarity, similarity_dimension
from .measure import (CellBlock, CylinderNet, ModulusSpec, QuadratureResult,
                      cells_for_words, complement_base_words, export_net_csv,
                      integrate, integrate_ball_complement, integrate_cells,
                      integrate_complement, integrate_cylinder, mc_integrate,
                      net, pairwise_sum, refine, region_cells)
from .kernels import (ConstantOmega, HomogeneousKernel, PerturbedOmega,
                      PolynomialOverNorm, RieszComponent, SignOmega,
                      bump_profile, eval_kernel, kernel_modulus_on,
                      omega_from_config, perturb)
from .sio import (CriterionReport, DivergenceReport, MaximalEstimate, PVRow,
                  PVTrace, WitnessIntegrand, ball_cylinder_gap, criterion,
                  divergence_certificate, maximal_symbolic, pv_trace,
                  truncated, witness_g)
from .ergodic import OrbitSample, birkhoff_frequency, hitting_times, sample_orbit

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "EvaluationError", "FractalsioError", "InputError",
    "ResourceLimitError",
    "Euclidean", "Heisenberg1", "geometry_from_config",
    "EPWord", "concat", "cylinder_prob", "is_prefix", "power", "validate_word",
    "IFS", "SeparationReport", "Similarity", "similarity_dimension",
    "CellBlock", "CylinderNet", "ModulusSpec", "QuadratureResult",
    "cells_for_words", "complement_base_words", "export_net_csv", "integrate",
    "integrate_ball_complement", "integrate_cells", "integrate_complement",
    "integrate_cylinder", "mc_integrate", "net", "pairwise_sum", "refine",
    "region_cells",
    "ConstantOmega", "HomogeneousKernel", "PerturbedOmega",
    "PolynomialOverNorm", "RieszComponent", "SignOmega", "bump_profile",
    "eval_kernel", "kernel_modulus_on", "omega_from_config", "perturb",
    "CriterionReport", "DivergenceReport", "MaximalEstimate", "PVRow",
    "PVTrace", "WitnessIntegrand", "ball_cylinder_gap", "criterion",
    "divergence_certificate", "maximal_symbolic", "pv_trace", "truncated",
    "witness_g",
    "OrbitSample", "birkhoff_frequency", "hitting_times", "sample_orbit",
    "__version__",
]
