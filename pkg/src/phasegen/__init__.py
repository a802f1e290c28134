"""Generating-function toolbox for Wigner functions of photon-subtracted
Gaussian states, squeezed Fock states and their photon statistics."""

from .fock import fock_wigner, squeezed_fock_wigner
from .gaussian import GaussianForm, PhasePoint, PolyGaussian, evaluate, marginal, phase_space_integral
from .jets import Jet, JetSpace
from .states import SqueezeParams, StateSpec, make_state, squeezed_thermal
from .statistics import PhotonDistribution, distribution
from .subtraction import SubtractionResult, subtract

__all__ = [
    "GaussianForm",
    "Jet",
    "JetSpace",
    "PhasePoint",
    "PhotonDistribution",
    "PolyGaussian",
    "SqueezeParams",
    "StateSpec",
    "SubtractionResult",
    "distribution",
    "evaluate",
    "fock_wigner",
    "make_state",
    "marginal",
    "phase_space_integral",
    "squeezed_fock_wigner",
    "squeezed_thermal",
    "subtract",
]

__version__ = "0.1.0"
