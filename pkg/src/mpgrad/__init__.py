"""Differentiable multiparameter persistence: descriptors, transport and subgradient optimization."""

from .autodiff import (
    DistanceToMeasure,
    FiltrationGradient,
    GaussianMixture,
    Integration,
    LandscapeTarget,
    LossSpec,
    NormPower,
    PipelineSpec,
    loss_gradient,
    loss_value,
    pointcloud_gradient,
)
from .complex import SimplicialComplex, Subcomplex, homology_dimension, inclusion_rank, validate_complex
from .descriptors import (
    Landscape,
    hilbert_grid,
    hilbert_measure,
    landscape,
    rank_grid,
    rank_measure,
    sorted_hilbert,
)
from .errors import MpgradError
from .filtrations import Filtration, function_rips, gaussian_kde, lower_star, vietoris_rips
from .measures import SignedMeasure
from .optimizer import Constant, Harmonic, PolynomialDecay, optimize_filtration, optimize_pointcloud
from .stratification import cell_id, from_incl, its_incl, same_cell, stratify
from .transport import GroundMetric, ot_distance, ot_subgradient

__version__ = "0.1.0"
