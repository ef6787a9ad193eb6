"""Quantization, Heisenberg evolution and crossed products on global-quotient orbifolds.

The model space is a flat torus (mostly the circle) acted on by a finite
group of isometries; operators are matrices on a truncated Fourier window.
"""
__version__ = "0.1.0"

from .errors import (ConfigError, ConicSingularityError, ConvergenceError,  # noqa: E402
                     DecompositionError, GroupError, HermiticityError, InvarianceError,
                     NotConormalError, OrbiquantError, ShapeError)
from .trigpoly import TrigPoly  # noqa: E402
from .group_actions import (AffineIsometryAction, CircleAction, FiniteGroup,  # noqa: E402
                            builtin_action, mode_action)
from .symplectic_flows import (CotangentPoint, FlowConfig, HamiltonianSpec,  # noqa: E402
                               hamiltonian_flow)
from .quantization import (CompleteSymbolOrder1, HomogeneousSymbol, OperatorMatrix,  # noqa: E402
                           Truncation, op_quantize, symbol_from_matrix)
from .heisenberg import (SpectralDecomposition, ad_transport_symbol, heisenberg,  # noqa: E402
                         orbifold_heisenberg, transport_frame)
from .crossed_product import (CrossedFunction, CrossedSymbol, GroupoidElement,  # noqa: E402
                              convolve, crossed_quantize, crossed_symbol_of, involution,
                              nc_flow_pullback, represent)

__all__ = [
    "AffineIsometryAction", "CircleAction", "CompleteSymbolOrder1", "ConfigError",
    "ConicSingularityError", "ConvergenceError", "CotangentPoint", "CrossedFunction",
    "CrossedSymbol", "DecompositionError", "FiniteGroup", "FlowConfig", "GroupError",
    "GroupoidElement", "HamiltonianSpec", "HermiticityError", "HomogeneousSymbol",
    "InvarianceError", "NotConormalError", "OperatorMatrix", "OrbiquantError", "ShapeError",
    "SpectralDecomposition", "TrigPoly", "Truncation", "ad_transport_symbol",
    "builtin_action", "convolve", "crossed_quantize", "crossed_symbol_of", "hamiltonian_flow",
    "heisenberg", "involution", "mode_action", "nc_flow_pullback", "op_quantize",
    "orbifold_heisenberg", "represent", "symbol_from_matrix", "transport_frame",
]
