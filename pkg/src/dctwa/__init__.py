"""Simulation toolkit for driven, dissipative interacting spin-1/2 systems.

The package couples a discrete/continuous phase-space representation of spin
states (Wootters phase points embedded in a spherical kernel) with stochastic
trajectory engines, a quantum-jump variant, mean-field dynamics, and a dense
Lindblad master-equation oracle for cross-validation at small sizes.
"""

from .errors import Error
from .models import LindbladModel, ModelPreset, preset
from .engines import EnsembleConfig, run_ensemble
from .observables import ObservableSeries

__version__ = "0.1.0"

__all__ = [
    "Error",
    "LindbladModel",
    "ModelPreset",
    "preset",
    "EnsembleConfig",
    "run_ensemble",
    "ObservableSeries",
    "__version__",
]
