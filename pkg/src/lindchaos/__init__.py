"""Mean-field limits of interacting Lindblad dynamics: numerics for the relative-entropy method.

Dense-matrix kernels for N-body and mean-field Lindblad flows, quantum relative
entropy, the explicit constants of the O(1/N) entropy estimate, and
combinatorial oracles, plus a CLI that runs simulations, N-sweeps and
verification suites.
"""

__version__ = "0.1.0"

from .bounds import BoundParams, bound_constants, k_constant, theorem_rhs_log
from .dynamics import ModelParams, duhamel_decompose, integrate, lindblad_rhs_n, meanfield_rhs
from .entropy import EntropyResult, normalized_entropy, relative_entropy
from .errors import LindchaosError
from .tensor import Tolerances

__all__ = [
    "__version__",
    "BoundParams",
    "EntropyResult",
    "LindchaosError",
    "ModelParams",
    "Tolerances",
    "bound_constants",
    "duhamel_decompose",
    "integrate",
    "k_constant",
    "lindblad_rhs_n",
    "meanfield_rhs",
    "normalized_entropy",
    "relative_entropy",
    "theorem_rhs_log",
]
