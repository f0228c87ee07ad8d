"""Longitudinal line problem: potentials, bound states, resolvent boundary values.

The effective one-dimensional operator is h = -d^2/dx^2 + V on the real
line. Three analytic potential families are supported, plus tabulated data:

* ``poschl_teller``: V_nu(x) = -nu / (2 cosh^2(nu x)), the deepening well
  whose nu -> infinity limit is the delta well below.
* ``delta_limit``: the attractive point interaction -delta(x) of coupling
  one, with the single bound state mu = -1/4, phi = sqrt(1/2) e^{-|x|/2}.
* ``free``: V = 0.
* ``sampled``: piecewise-linear data on a finite grid, zero outside.

The quantity everything else consumes is the boundary value of the
resolvent form

    F(lam +- i0) = <v, (h - lam -+ i0)^{-1} v>,

computed by exterior complex scaling (the default, works for every
analytic potential), by the explicit integral kernel of the delta/free
resolvent, or by off-axis evaluation with Richardson extrapolation in the
offset rho. With the (h - zeta)^{-1} sign convention used throughout,
Im F(lam + i0) >= 0 for real v.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BarycentricInterpolator
from scipy.linalg import solve_banded
from scipy.special import gammaln, roots_jacobi

from ._accel import phase_pairwise
from .errors import ConfigError, ResolventPoleError

_ECS_ANGLE = 0.35
_DECAY_TARGET = np.log(1e10)
_POLE_WINDOW = 1e-6
_DEFLATE_WINDOW = 1e-3
_RHO_LADDER = (1e-2, 1e-3, 1e-4)


def _logcosh(z):
    """log cosh z, overflow-safe for large |Re z|, complex-capable."""
    z = np.asarray(z, dtype=complex)
    s = np.where(np.real(z) >= 0, 1.0, -1.0)
    zs = s * z
    return zs + np.log1p(np.exp(-2 * zs)) - np.log(2.0)


def _tanh(z):
    z = np.asarray(z, dtype=complex)
    s = np.where(np.real(z) >= 0, 1.0, -1.0)
    e = np.exp(-2 * s * z)
    return s * (1 - e) / (1 + e)


# ---------------------------------------------------------------------------
# potentials

@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """Potential on the line. Build via the class methods."""

    kind: str
    nu: float = 0.0
    x: np.ndarray | None = None
    values: np.ndarray | None = None
    decay_radius: float = 0.0

    @classmethod
    def poschl_teller(cls, nu):
        nu = float(nu)
        if nu <= 0:
            raise ConfigError("nu must be positive")
        return cls(kind="poschl_teller", nu=nu,
                   decay_radius=_DECAY_TARGET / (2.0 * nu))

    @classmethod
    def delta_limit(cls):
        return cls(kind="delta_limit", decay_radius=0.0)

    @classmethod
    def free(cls):
        return cls(kind="free", decay_radius=0.0)

    @classmethod
    def sampled(cls, x, values):
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.shape != values.shape or x.size < 2:
            raise ConfigError("sampled potential needs matching 1-d x, V arrays")
        if not np.all(np.diff(x) > 0):
            raise ConfigError("sampled x grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ConfigError("sampled potential has non-finite entries")
        return cls(kind="sampled", x=x, values=values,
                   decay_radius=float(max(abs(x[0]), abs(x[-1]))))

    def V(self, x):
        """Evaluate the potential; complex arguments are accepted for the
        analytic kinds (the point interaction itself returns 0, its action
        is applied separately by the solvers)."""
        if self.kind == "poschl_teller":
            return -(self.nu / 2.0) * np.exp(-2.0 * _logcosh(self.nu * np.asarray(x, dtype=complex)))
        if self.kind == "sampled":
            return _interp_continued(x, self.x, self.values, 0.0, 0.0)
        return np.zeros_like(np.asarray(x, dtype=complex))


def _interp_continued(z, xt, vt, left, right):
    """Piecewise-linear table lookup that extends to complex arguments.

    The bracketing interval is chosen by the real part and the linear
    piece is evaluated at the complex point itself, the analytic
    continuation of the interpolant into the strip. Curvature of the
    underlying function between nodes is lost off the axis, which is why
    every consumer of tabulated data on a rotated contour reports itself
    as low accuracy.
    """
    z = np.asarray(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    r = np.real(z)
    idx = np.clip(np.searchsorted(xt, r) - 1, 0, len(xt) - 2)
    x0 = xt[idx]
    slope = (vt[idx + 1] - vt[idx]) / (xt[idx + 1] - x0)
    out = np.where(r < xt[0], left,
                   np.where(r > xt[-1], right, vt[idx] + slope * (z - x0)))
    if not np.iscomplexobj(z):
        out = np.real(out)
    return out[0] if scalar else out


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Tabulated real function of x, zero outside [x[0], x[-1]].

    Cleared for use inside the complex-scaling engine only when its support
    ends before the contour bends, which holds whenever ``decay_radius``
    is honest; evaluation off the real axis where the table is nonzero is
    refused.
    """

    x: np.ndarray
    values: np.ndarray

    @property
    def decay_radius(self):
        return float(max(abs(self.x[0]), abs(self.x[-1])))

    def __call__(self, z):
        z = np.asarray(z)
        out = np.interp(np.real(z), self.x, self.values, left=0.0, right=0.0)
        if np.iscomplexobj(z):
            off = np.abs(np.imag(z)) > 1e-12
            if np.any(np.abs(out[off]) > 1e-9 * (np.max(np.abs(self.values)) or 1.0)):
                raise ConfigError("sampled function is nonzero on the bent "
                                  "part of the contour; increase X")
            out = np.where(off, 0.0, out) + 0j
        return out


# ---------------------------------------------------------------------------
# bound states

@dataclass(frozen=True, eq=False)
class BoundState:
    """Normalized bound state of h with eigenvalue mu < 0.

    For the smooth well the eigenfunction is sech^e(nu x) times a
    terminating hypergeometric polynomial in u = (1 - tanh(nu x))/2; both
    factors extend to complex x through the overflow-safe log-cosh form,
    which is what lets the complex-scaling engine sample them on the bent
    contour. ``coeffs`` are the polynomial coefficients in ascending powers
    of u; the delta-well state stores none.
    """

    kind: str
    j: int
    mu: float
    nu: float = 0.0
    e: float = 0.0
    coeffs: tuple[float, ...] = (1.0,)
    norm: float = 1.0

    @property
    def decay_rate(self):
        """Exponential decay rate: |phi| ~ e^{-rate |x|} far out."""
        if self.kind == "delta":
            return 0.5
        return self.nu * self.e

    @property
    def decay_radius(self):
        return _DECAY_TARGET / self.decay_rate

    def _poly(self, u, deriv=False):
        c = np.asarray(self.coeffs, dtype=float)
        if deriv:
            if c.size == 1:
                return np.zeros_like(u)
            c = c[1:] * np.arange(1, c.size)
        out = np.zeros_like(u)
        for ck in c[::-1]:
            out = out * u + ck
        return out

    def phi(self, x):
        x = np.asarray(x, dtype=complex)
        if self.kind == "delta":
            w = np.where(np.real(x) >= 0, 1.0, -1.0) * x
            return np.sqrt(0.5) * np.exp(-w / 2.0)
        u = 0.5 * (1.0 - _tanh(self.nu * x))
        return np.exp(-self.e * _logcosh(self.nu * x)) * self._poly(u) / self.norm

    def dphi(self, x):
        x = np.asarray(x, dtype=complex)
        if self.kind == "delta":
            s = np.where(np.real(x) >= 0, 1.0, -1.0)
            return -0.5 * s * np.sqrt(0.5) * np.exp(-s * x / 2.0)
        th = _tanh(self.nu * x)
        sech2 = np.exp(-2.0 * _logcosh(self.nu * x))
        u = 0.5 * (1.0 - th)
        base = np.exp(-self.e * _logcosh(self.nu * x)) / self.norm
        return base * (-self.e * self.nu * th * self._poly(u)
                       - 0.5 * self.nu * sech2 * self._poly(u, deriv=True))


def poschl_teller_levels(nu):
    """Exact eigenvalues mu_1 < mu_2 < ... of the smooth well, as an array."""
    nu = float(nu)
    t = 0.5 * (-1.0 + np.sqrt(1.0 + 2.0 / nu))
    j_max = int(np.floor(t + 1.0 - 1e-12))
    js = np.arange(1, j_max + 1)
    return -(nu**2 / 4.0) * (-(2 * js - 1) + np.sqrt(1.0 + 2.0 / nu)) ** 2


@functools.lru_cache(maxsize=64)
def poschl_teller_spectrum(nu):
    """All bound states of the smooth well at steepness nu, ground state first.

    Normalization is exact: in the variable xi = tanh(nu x) the squared
    state is a polynomial against the Jacobi weight (1-xi^2)^(e-1), so a
    Gauss-Jacobi rule with a couple of spare nodes integrates it without
    discretization error.
    """
    nu = float(nu)
    mus = poschl_teller_levels(nu)
    t = 0.5 * (-1.0 + np.sqrt(1.0 + 2.0 / nu))
    states = []
    for j, mu in enumerate(mus, start=1):
        e = t + 1.0 - j
        # terminating series F(1-j, 2t+2-j; e+1; u): degree j-1 in u
        a, b, c = 1.0 - j, 2.0 * t + 2.0 - j, e + 1.0
        coeffs = [1.0]
        term = 1.0
        for n in range(j - 1):
            term *= (a + n) * (b + n) / ((c + n) * (n + 1.0))
            coeffs.append(term)
        xi, w = roots_jacobi(j + 2, e - 1.0, e - 1.0)
        u = 0.5 * (1.0 - xi)
        poly = np.zeros_like(u)
        for ck in coeffs[::-1]:
            poly = poly * u + ck
        norm = np.sqrt(np.sum(w * poly**2) / nu)
        states.append(BoundState(kind="poschl_teller", j=j, mu=float(mu),
                                 nu=nu, e=float(e), coeffs=tuple(coeffs),
                                 norm=float(norm)))
    return tuple(states)


def delta_limit_bound_state():
    return BoundState(kind="delta", j=1, mu=-0.25)


def bound_states(potential):
    """Bound states of the potential; empty for free, numeric kinds refused.

    Sampled potentials have no closed-form states; use
    :func:`numeric_bound_levels` for their eigenvalues.
    """
    if potential.kind == "poschl_teller":
        return poschl_teller_spectrum(potential.nu)
    if potential.kind == "delta_limit":
        return (delta_limit_bound_state(),)
    if potential.kind == "free":
        return ()
    raise ConfigError("sampled potentials have no analytic bound states; "
                      "use numeric_bound_levels")


def bound_levels(potential):
    """Eigenvalues below zero, analytically where possible."""
    if potential.kind == "sampled":
        return numeric_bound_levels(potential)
    return np.array([s.mu for s in bound_states(potential)])


def numeric_bound_levels(potential, L=None, h=None, k=None):
    """Discrete spectrum below zero by fourth-order finite differences.

    Returns the sorted negative eigenvalues. The box size follows the
    shallowest expected state for the smooth well; sampled data uses its
    own range plus a decay margin.
    """
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    if potential.kind == "free":
        return np.array([])
    if potential.kind == "delta_limit":
        raise ConfigError("the point interaction is not a finite-difference "
                          "potential; its level is mu = -1/4 exactly")
    if potential.kind == "poschl_teller":
        mus = poschl_teller_levels(potential.nu)
        rate = np.sqrt(-mus[-1])
        L = L or max(60.0, 12.8 / rate)
        h = h or min(0.02, 0.1 / potential.nu)
        k = k or len(mus) + 2
    else:
        L = L or potential.decay_radius + 30.0
        h = h or 0.02
        k = k or 8

    n = int(round(2 * L / h)) - 1
    xs = (np.arange(n) - (n - 1) / 2) * h
    V = np.real(potential.V(xs))
    D2 = sp.diags([-1.0, 16.0, -30.0, 16.0, -1.0], [-2, -1, 0, 1, 2],
                  shape=(n, n)) / (12.0 * h * h)
    H = (-D2 + sp.diags(V)).tocsc()
    sigma = float(V.min()) - 0.1
    k = min(k, n - 2)
    vals = spla.eigsh(H, k=k, sigma=sigma, which="LM", v0=np.ones(n),
                      return_eigenvectors=False)
    vals = np.sort(vals)
    return vals[vals < -1e-10]


# ---------------------------------------------------------------------------
# integrability check

@dataclass(frozen=True)
class MomentReport:
    """First-moment integrability of the potential: finite
    int (1 + x^2) |V| dx is what the width theory assumes."""

    kind: str
    integral: float
    weighted_moment: float
    finite: bool
    note: str


def validate_assumption_moment(potential):
    """Check int (1+x^2)|V(x)| dx < infinity and report both integrals.

    Exact for the analytic families; trapezoid on the data for sampled
    potentials (finite by construction there).
    """
    if potential.kind == "poschl_teller":
        nu = potential.nu
        return MomentReport(kind=potential.kind, integral=-1.0,
                            weighted_moment=1.0 + np.pi**2 / (12.0 * nu**2),
                            finite=True, note="closed form")
    if potential.kind == "delta_limit":
        return MomentReport(kind=potential.kind, integral=-1.0,
                            weighted_moment=1.0, finite=True,
                            note="distributional: the weight is 1 at x = 0")
    if potential.kind == "free":
        return MomentReport(kind=potential.kind, integral=0.0,
                            weighted_moment=0.0, finite=True, note="V = 0")
    x, V = potential.x, potential.values
    return MomentReport(kind=potential.kind,
                        integral=float(np.trapezoid(V, x)),
                        weighted_moment=float(np.trapezoid((1 + x**2) * np.abs(V), x)),
                        finite=True, note="trapezoid on the tabulated range")


# ---------------------------------------------------------------------------
# resolvent boundary values

@dataclass(frozen=True, eq=False)
class ResolventBoundaryValue:
    """Result of one resolvent form evaluation <v, (h - zeta)^{-1} v>."""

    zeta: complex
    side: str | None
    value: complex
    reduced: bool
    engine: str
    h: float
    X: float
    extrapolation_error: float | None = None


def _decay_radius_of(v):
    r = getattr(v, "decay_radius", None)
    if r is not None:
        return float(r)
    xs = np.linspace(0.0, 400.0, 8001)
    mags = np.abs(np.asarray(v(xs + 0j)))
    top = mags.max()
    if top == 0.0:
        raise ConfigError("test vector is identically zero on [0, 400]")
    big = np.flatnonzero(mags > 1e-9 * top)
    return float(xs[big[-1]] + 2.0)


def _ecs_nodes(X, L, h):
    """Uniform interior nodes on (-L, L) containing 0 and +-X exactly."""
    nX = int(round(X / h))
    nL = int(round(L / h))
    if nX + 2 > nL:
        nL = nX + 2
    t = np.arange(-nL + 1, nL) * h
    return t, nX * h, nL * h, nL - 1 + nX


def _ecs_once(zeta, sign, vfun, potential, X, L, h, deflate):
    """One P1 finite-element solve on the bent contour; bilinear value."""
    t, X, L, _ = _ecs_nodes(X, L, h)
    rot = np.exp(1j * _ECS_ANGLE * sign)
    inside = np.abs(t) <= X + 0.5 * h
    x = np.where(inside, t + 0j,
                 np.sign(t) * X + (t - np.sign(t) * X) * rot)

    n = t.size
    mid = 0.5 * (np.concatenate(([t[0] - h], t)) + np.concatenate((t, [t[-1] + h])))
    g_half = np.where(np.abs(mid) > X, rot, 1.0 + 0j)

    inv = 1.0 / g_half
    stiff_diag = (inv[:-1] + inv[1:]) / h
    off = -inv[1:-1] / h
    M = h * (g_half[:-1] + g_half[1:]) / 2.0

    Vdiag = potential.V(x) if potential.kind != "delta_limit" else np.zeros(n, dtype=complex)
    A_diag = stiff_diag + (Vdiag - zeta) * M
    if potential.kind == "delta_limit":
        A_diag[n // 2] -= 1.0  # -delta(x) acts on the node at x = 0

    vn = np.asarray(vfun(x), dtype=complex)
    for state in deflate:
        ph = state.phi(x)
        nrm = np.sum(ph * M * ph)
        vn = vn - ph * (np.sum(ph * M * vn) / nrm)

    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = off
    ab[1, :] = A_diag
    ab[2, :-1] = off
    u = solve_banded((1, 1), ab, M * vn)
    return complex(np.sum(vn * M * u))


def _ecs_form(zeta, sign, vfun, potential, X, L, h, deflate):
    f1 = _ecs_once(zeta, sign, vfun, potential, X, L, h, deflate)
    f2 = _ecs_once(zeta, sign, vfun, potential, X, L, h / 2, deflate)
    return (4.0 * f2 - f1) / 3.0


def _branch_k(zeta, side):
    if side == "+i0":
        return complex(np.sqrt(float(np.real(zeta))))
    if side == "-i0":
        return complex(-np.sqrt(float(np.real(zeta))))
    k = np.sqrt(complex(zeta))
    return -k if k.imag < 0 else k


def _kernel_form(potential, zeta, side, v, reduced):
    """Delta or free resolvent by its explicit kernel.

    (h - zeta)^{-1} = -(K0 + K1) with K0 = e^{ik|x-x'|}/(2ik) and, for the
    point interaction only, K1 = e^{ik(|x|+|x'|)} / (2k(2k - i)); k is the
    Im k > 0 square root of zeta, taken as +-sqrt(lam) on the two edges of
    the positive axis.
    """
    k = _branch_k(zeta, side)
    deflate_den = None
    if reduced and potential.kind == "delta_limit":
        mu = delta_limit_bound_state().mu
        den = mu - (zeta if side is None else np.real(zeta))
        if abs(den) < 1e-9:
            raise ConfigError("the kernel engine cannot deflate exactly at "
                              "the pole; use engine='ecs'")
        if abs(den) < _DEFLATE_WINDOW:
            deflate_den = den
    Xv = _decay_radius_of(v) + 2.0
    h = min(0.004, 0.1 / max(1.0, abs(k)))
    nX = int(round(Xv / h))
    x = np.arange(-nX, nX + 1) * h
    w = np.full(x.size, h)
    w[0] = w[-1] = h / 2
    vn = np.real(np.asarray(v(x + 0j)))
    f = (w * vn).astype(complex)

    q0 = phase_pairwise(x, f, k) / (2j * k)
    if potential.kind == "delta_limit":
        W = np.sum(f * np.exp(1j * k * np.abs(x)))
        q1 = W * W / (2 * k * (2 * k - 1j))
    else:
        q1 = 0.0
    val = -(q0 + q1)
    if deflate_den is not None:
        st = delta_limit_bound_state()
        c = np.sum(w * vn * np.real(st.phi(x + 0j)))
        val = val - c * c / deflate_den
    return complex(val), h, Xv


def resolvent_form(potential, zeta, v, side=None, reduced=False, engine="auto"):
    """Boundary (or off-axis) value of <v, (h - zeta)^{-1} v>.

    Parameters
    ----------
    potential : PotentialSpec (analytic kinds only; sampled is refused).
    zeta : real energy lam when `side` names the edge, else a complex
        point off the positive half-axis.
    v : callable, complex-capable on the scaling contour; a
        ``decay_radius`` attribute sizes the real window, otherwise the
        decay is measured on the real axis.
    side : "+i0", "-i0", or None for complex zeta.
    reduced : subtract the bound-state contribution when zeta sits within
        1e-3 of an eigenvalue (the reduced resolvent); without it an
        evaluation within 1e-6 of a pole raises ResolventPoleError.
    engine : "ecs" (default through "auto"), "kernel" (delta/free),
        or "rho" (delta/free, off-axis ladder extrapolated to the edge).

    The returned value satisfies Im F(lam + i0) >= 0 for real v and
    F(lam - i0) = conj(F(lam + i0)).
    """
    if side not in (None, "+i0", "-i0"):
        raise ConfigError(f"side must be '+i0', '-i0', or None, got {side!r}")
    zeta = complex(zeta)
    if side is None and abs(zeta.imag) == 0.0 and zeta.real >= 0.0:
        raise ConfigError("on the essential spectrum a side is required")
    if side is not None:
        zeta = complex(zeta.real)
        if zeta.real <= 0:
            raise ConfigError("boundary values need lam > 0")
    if engine not in ("auto", "ecs", "kernel", "rho"):
        raise ConfigError(f"unknown engine {engine!r}")
    if engine == "auto":
        engine = "ecs"
    if engine in ("kernel", "rho") and potential.kind not in ("delta_limit", "free"):
        raise ConfigError(f"engine {engine!r} supports only the point "
                          "interaction and the free line")
    if potential.kind == "sampled":
        raise ConfigError("resolvent boundary values need an analytic "
                          "potential; sampled data cannot be continued off "
                          "the real axis")

    levels = bound_levels(potential)
    near = [s for s, mu in zip(bound_states(potential), levels)
            if abs(zeta - mu) < _DEFLATE_WINDOW] if levels.size else []
    if not reduced and any(abs(zeta - mu) < _POLE_WINDOW for mu in levels):
        raise ResolventPoleError(
            f"zeta = {zeta:.6g} sits on a bound-state pole; pass reduced=True")
    deflate = tuple(near) if reduced else ()

    if engine == "ecs":
        sign = +1 if (side == "+i0" or zeta.imag > 0) else -1
        X = max(_decay_radius_of(v), 1.0)
        L = X + 40.0
        h = min(0.01, 0.1 / max(1.0, np.sqrt(abs(zeta))))
        if potential.kind == "poschl_teller":
            h = min(h, 0.1 / potential.nu)
        val = _ecs_form(zeta, sign, v, potential, X, L, h, deflate)
        return ResolventBoundaryValue(zeta=zeta, side=side, value=val,
                                      reduced=reduced, engine="ecs", h=h, X=X)

    if engine == "kernel":
        val, h, X = _kernel_form(potential, zeta, side, v, reduced)
        return ResolventBoundaryValue(zeta=zeta, side=side, value=val,
                                      reduced=reduced, engine="kernel",
                                      h=h, X=X)

    # rho ladder: evaluate off axis on the approach side, extrapolate to 0
    if side is None:
        raise ConfigError("the rho engine computes boundary values; pass a side")
    s = +1.0 if side == "+i0" else -1.0
    rhos = np.array(_RHO_LADDER)
    vals = []
    for rho in rhos:
        val, h, X = _kernel_form(potential, zeta + 1j * s * rho, None, v, reduced)
        vals.append(val)
    vals = np.array(vals)
    quad = complex(BarycentricInterpolator(rhos, vals)(0.0))
    lin = complex(BarycentricInterpolator(rhos[1:], vals[1:])(0.0))
    return ResolventBoundaryValue(zeta=zeta, side=side, value=quad,
                                  reduced=reduced, engine="rho", h=h, X=X,
                                  extrapolation_error=abs(quad - lin))


@dataclass(frozen=True, eq=False)
class _MinusTwoDPhi:
    """v = -2 phi' for a bound state, with the decay bookkeeping attached."""

    state: BoundState

    @property
    def decay_radius(self):
        return self.state.decay_radius

    def __call__(self, x):
        return -2.0 * self.state.dphi(x)


def resolvent_convergence_probe(nus, zeta):
    """Watch the smooth-well resolvent form approach the point-interaction one.

    For each steepness nu the probe evaluates F_nu(zeta) = <v_nu,
    (h_nu - zeta)^{-1} v_nu> with v_nu = -2 phi_1' and compares against the
    same form for the delta well. zeta must be complex (off the positive
    axis) so that both sides are plain resolvents. Returns (rows, limit)
    where rows are (nu, value, |value - limit|).
    """
    zeta = complex(zeta)
    if zeta.imag == 0.0 and zeta.real >= 0:
        raise ConfigError("probe zeta must lie off the essential spectrum")
    limit = resolvent_form(PotentialSpec.delta_limit(), zeta,
                           _MinusTwoDPhi(delta_limit_bound_state())).value
    rows = []
    for nu in nus:
        pot = PotentialSpec.poschl_teller(nu)
        st = poschl_teller_spectrum(nu)[0]
        val = resolvent_form(pot, zeta, _MinusTwoDPhi(st)).value
        rows.append((float(nu), val, abs(val - limit)))
    return rows, limit
