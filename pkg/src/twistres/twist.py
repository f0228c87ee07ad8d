"""Twist profiles alpha(x) and the coupling vector they induce.

A twist is described by its angular velocity alpha_dot. Three profiles:

* ``linear``: alpha_dot = 1 (alpha(x) = x), the constant-rate twist whose
  perturbation theory closes in the deep-well limit.
* ``compact``: alpha_dot = 1 on a plateau |x| <= X, then eased to zero by
  a quintic smoothstep over (X, 2X). The twist velocity has compact
  support, alpha is odd and saturates at 1.5 X.
* ``sampled``: tabulated alpha_dot, for feeding measured profiles to the
  coupled-channel solver. Off the real axis each linear piece of the
  table extends in the complex step, which keeps the slope exactly but
  has no curvature to offer; callers flag the lowered accuracy.

The longitudinal perturbation enters through the vector

    v_j(x) = -2 alpha_dot(x) phi_j'(x) - alpha_ddot(x) phi_j(x),

bundled here as :class:`CouplingVector` with the decay bookkeeping the
resolvent engines need. The analytic profiles evaluate on the bent
contour through the fold w = sign(Re x) * x, matching the symmetric
continuation used for the bound states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConfigError
from .longitudinal import _interp_continued


def _smoothstep(u):
    return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)


def _smoothstep_prime(u):
    return 30.0 * u**2 * (1.0 - u) ** 2


def _smoothstep_integral(u):
    return 2.5 * u**4 - 3.0 * u**5 + u**6


@dataclass(frozen=True, eq=False)
class TwistProfile:
    """Twist velocity profile. Build via linear(), compact(), sampled()."""

    kind: str
    X: float = 0.0
    x: np.ndarray | None = None
    alpha_dot_values: np.ndarray | None = None
    alpha_ddot_values: np.ndarray | None = None
    alpha_values: np.ndarray | None = None

    @classmethod
    def linear(cls):
        return cls(kind="linear")

    @classmethod
    def compact(cls, X):
        X = float(X)
        if X <= 0:
            raise ConfigError("compact twist plateau X must be positive")
        return cls(kind="compact", X=X)

    @classmethod
    def sampled(cls, x, alpha_dot, alpha_ddot=None):
        x = np.asarray(x, dtype=float)
        ad = np.asarray(alpha_dot, dtype=float)
        if x.ndim != 1 or x.shape != ad.shape or x.size < 2:
            raise ConfigError("sampled twist needs matching 1-d x, alpha_dot")
        if not np.all(np.diff(x) > 0):
            raise ConfigError("sampled twist x grid must be strictly increasing")
        if not np.all(np.isfinite(ad)):
            raise ConfigError("sampled alpha_dot has non-finite entries")
        if np.any(ad < 0):
            raise ConfigError("sampled alpha_dot must be nonnegative")
        if alpha_ddot is None:
            add = np.gradient(ad, x)
        else:
            add = np.asarray(alpha_ddot, dtype=float)
            if add.shape != x.shape:
                raise ConfigError("alpha_ddot length must match x")
        al = cumulative_trapezoid(ad, x, initial=0.0)
        al = al - np.interp(0.0, x, al)
        return cls(kind="sampled", x=x, alpha_dot_values=ad,
                   alpha_ddot_values=add, alpha_values=al)

    @property
    def analytic(self):
        """True when the profile continues off the real axis exactly."""
        return self.kind in ("linear", "compact")

    def _fold(self, x):
        x = np.asarray(x, dtype=complex)
        s = np.where(np.real(x) >= 0, 1.0, -1.0)
        return s, s * x

    def ad(self, x):
        """alpha_dot, complex-capable for the analytic kinds."""
        if self.kind == "linear":
            return np.ones_like(np.asarray(x, dtype=complex))
        if self.kind == "compact":
            _, w = self._fold(x)
            rw = np.real(w)
            u = (w - self.X) / self.X
            ramp = 1.0 - _smoothstep(u)
            return np.where(rw <= self.X, 1.0 + 0j,
                            np.where(rw >= 2 * self.X, 0.0 + 0j, ramp))
        return _interp_continued(x, self.x, self.alpha_dot_values,
                                 self.alpha_dot_values[0],
                                 self.alpha_dot_values[-1])

    def add(self, x):
        """alpha_ddot; zero off the ramp for the analytic kinds."""
        if self.kind == "linear":
            return np.zeros_like(np.asarray(x, dtype=complex))
        if self.kind == "compact":
            s, w = self._fold(x)
            rw = np.real(w)
            u = (w - self.X) / self.X
            on_ramp = (rw > self.X) & (rw < 2 * self.X)
            return np.where(on_ramp, -s * _smoothstep_prime(np.where(on_ramp, u, 0.0)) / self.X,
                            0.0 + 0j)
        return _interp_continued(x, self.x, self.alpha_ddot_values, 0.0, 0.0)

    def alpha(self, x):
        """The twist angle itself, alpha(0) = 0, odd for the analytic kinds."""
        if self.kind == "linear":
            return np.asarray(x, dtype=complex) if np.iscomplexobj(x) else np.asarray(x, dtype=float)
        if self.kind == "compact":
            s, w = self._fold(x)
            rw = np.real(w)
            X = self.X
            u = (w - X) / X
            ramp = X + X * (u - _smoothstep_integral(u))
            half = np.where(rw <= X, w, np.where(rw >= 2 * X, 1.5 * X + 0j, ramp))
            out = s * half
            return out if np.iscomplexobj(np.asarray(x)) else np.real(out)
        xr = np.real(np.asarray(x))
        core = np.interp(xr, self.x, self.alpha_values)
        lo = self.alpha_values[0] + (xr - self.x[0]) * self.alpha_dot_values[0]
        hi = self.alpha_values[-1] + (xr - self.x[-1]) * self.alpha_dot_values[-1]
        return np.where(xr < self.x[0], lo, np.where(xr > self.x[-1], hi, core))


@dataclass(frozen=True, eq=False)
class CouplingVector:
    """v_j = -2 alpha_dot phi_j' - alpha_ddot phi_j, ready for the resolvent."""

    twist: TwistProfile
    state: object

    @property
    def decay_radius(self):
        if self.twist.kind == "compact":
            return 2.0 * self.twist.X
        return self.state.decay_radius

    def __call__(self, x):
        return (-2.0 * self.twist.ad(x) * self.state.dphi(x)
                - self.twist.add(x) * self.state.phi(x))


def coupling_vector(twist, state):
    """Bundle a twist and a bound state into the longitudinal test vector.

    Sampled twists are refused here: the resolvent engines need values on
    the complex contour, and a table has none to give.
    """
    if not twist.analytic:
        raise ConfigError("the width formula needs an analytic twist "
                          "(linear or compact)")
    return CouplingVector(twist=twist, state=state)
