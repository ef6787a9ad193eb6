"""Exception types raised by orbiquant."""


class OrbiquantError(Exception):
    """Base class for all library errors."""


class GroupError(OrbiquantError, ValueError):
    """Invalid group table, action data or element id."""


class ConicSingularityError(OrbiquantError, ValueError):
    """A homogeneous Hamiltonian was evaluated on the zero section."""


class ConvergenceError(OrbiquantError, RuntimeError):
    """An implicit solver did not converge."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NotConormalError(OrbiquantError, ValueError):
    """Point is not on the zero level of the momentum map."""


class InvarianceError(OrbiquantError, ValueError):
    """A declared symmetry does not hold."""


class HermiticityError(OrbiquantError, ValueError):
    """Operator or symbol expected to be Hermitian is not."""


class ShapeError(OrbiquantError, ValueError):
    """Mismatched sizes between symbols, truncations or matrices."""


class DecompositionError(OrbiquantError, ValueError):
    """Crossed-product components cannot be separated."""


class ConfigError(OrbiquantError, ValueError):
    """Experiment configuration failed validation."""
