"""Exception hierarchy shared across the package.

Two families matter to callers: :class:`ConfigError` for invalid inputs
(bad geometry, malformed files, out-of-range parameters) and
:class:`NumericsError` for computations that started from valid inputs but
cannot be completed reliably (degenerate targets, lost resonances, grids
too coarse to trust). The command-line driver maps the first family to
exit code 1 and the second to exit code 2.
"""


class TwistresError(Exception):
    """Base class for all package errors."""


class ConfigError(TwistresError):
    """Invalid input: configuration, file contents, or parameter ranges."""


class GridMismatchError(ConfigError):
    """Grid functions that must share a grid were built on different ones."""


class NumericsError(TwistresError):
    """A numeric computation failed or cannot be certified."""


class MeshResolutionError(NumericsError):
    """The requested grid cannot resolve the requested quantity."""


class DegenerateTargetError(NumericsError):
    """The target eigenvalue is degenerate; the perturbative width formula
    assumes a simple eigenvalue."""


class ThresholdCollisionError(NumericsError):
    """The target energy sits too close to a channel threshold."""


class ResolventPoleError(NumericsError):
    """A resolvent boundary value was requested at an eigenvalue without
    asking for the reduced (deflated) resolvent."""


class ResonanceLostError(NumericsError):
    """Shift-invert iteration found no acceptable eigenvalue in the disk,
    or continuation between scan steps lost track of the resonance."""
