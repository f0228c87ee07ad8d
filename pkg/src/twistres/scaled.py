"""Coupled-channel complex-scaled solver for the twisted guide.

Projecting the twisted waveguide onto the first K transverse modes and
dilating the axis variable, x -> e^theta x, turns the resonance problem
into a non-selfadjoint but complex-symmetric eigenproblem on a finite
grid. In block form (channel index k, grid index i):

    H(eps) = -e^{-2 theta} D2 (x) I_K
             + diag(V(e^theta x)) (x) I_K  +  I_N (x) diag(E_k)
             - 2 eps e^{-theta} S (x) T1
             - eps^2 diag(alpha_dot(e^theta x)^2) (x) T2

with S = (diag(alpha_dot) D1 + D1 diag(alpha_dot)) / 2. The symmetrized S
is exactly half of the first-order operator 2 alpha_dot d/dx + alpha_ddot,
which is why the factor in front is 2 eps: the twist acceleration never
needs to be tabulated separately, and H(eps)^T = H(eps) holds by
construction (D1 and T1 are antisymmetric).

Essential spectrum rotates into the rays E_k + e^{-2 theta} [0, infinity);
eigenvalues of H(eps) uncovered between the rays and the real axis are the
resonances. The locator is shift-invert Arnoldi with an explicit residual
check; the epsilon scan walks the resonance away from the embedded
eigenvalue with warm-started targets and fits Im E = -a eps^2.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigError, MeshResolutionError, ResonanceLostError
from .longitudinal import bound_states

_THETA_CAP = 0.6
_THETA_CAP_SAMPLED = 0.3
_COARSE_LIMIT = 0.6
_RESIDUAL_TOL = 1e-8
_SEED = 7


@dataclass(frozen=True)
class Ray:
    """Essential-spectrum ray E_k + t * direction, t >= 0."""

    origin: complex
    direction: complex

    def distance_to(self, z):
        d = complex(z) - self.origin
        t = (d * np.conj(self.direction)).real
        if t <= 0:
            return abs(d)
        return abs(d - t * self.direction)


def essential_rays(theta, thresholds):
    direction = np.exp(-2.0 * 1j * complex(theta).imag)
    return tuple(Ray(origin=complex(E), direction=direction)
                 for E in np.asarray(thresholds, dtype=float))


@dataclass(frozen=True, eq=False)
class ChannelSystem:
    """Assembled blocks of H(eps) on a fixed grid and channel basis.

    The three parts are combined per epsilon, so scanning in eps reuses
    the expensive pieces. ``low_accuracy`` marks tabulated inputs continued
    onto the contour by their piecewise-linear interpolant, which drops
    the off-axis curvature of the underlying function.
    """

    K: int
    L: float
    N: int
    h: float
    theta: complex
    epsilon: float
    thresholds: np.ndarray
    x: np.ndarray
    H0: sp.spmatrix
    C1: sp.spmatrix
    C2: sp.spmatrix
    order: int
    low_accuracy: bool

    def matrix(self, eps=None):
        eps = self.epsilon if eps is None else float(eps)
        return (self.H0 + eps * self.C1 + (eps * eps) * self.C2).tocsc()

    def with_epsilon(self, eps):
        return dataclasses.replace(self, epsilon=float(eps))

    @property
    def rays(self):
        return essential_rays(self.theta, self.thresholds)


def _stencils(N, h, order):
    if order == 4:
        D2 = sp.diags([-1.0, 16.0, -30.0, 16.0, -1.0], [-2, -1, 0, 1, 2],
                      shape=(N, N)) / (12.0 * h * h)
        D1 = sp.diags([1.0, -8.0, 8.0, -1.0], [-2, -1, 1, 2],
                      shape=(N, N)) / (12.0 * h)
    elif order == 2:
        D2 = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(N, N)) / (h * h)
        D1 = sp.diags([-1.0, 1.0], [-1, 1], shape=(N, N)) / (2.0 * h)
    else:
        raise ConfigError("stencil order must be 2 or 4")
    return D2.tocsr(), D1.tocsr()


def assemble_channel_system(potential, twist, modes, coupling, K, L, N,
                            theta, epsilon=0.0, order=4):
    """Build the complex-scaled K-channel system on [-L, L] with N points.

    N must be odd so the grid contains x = 0 (the point interaction needs
    the node; everything else just benefits from the symmetry). Tabulated
    potentials or twists cap Im theta at 0.3 and set the low-accuracy
    flag. For the smooth well the grid must resolve the scaled steepness:
    nu * h * e^{Im theta} <= 0.6, else the assembly refuses. A delta-limit
    potential overrides ``order`` to 2; see the inline note.
    """
    K = int(K)
    N = int(N)
    theta = complex(theta)
    if K < 1:
        raise ConfigError("K must be at least 1")
    if K > len(modes.modes) or K > coupling.K:
        raise ConfigError(f"K={K} exceeds the available {min(len(modes.modes), coupling.K)} "
                          "modes/couplings")
    if N % 2 == 0:
        raise ConfigError("N must be odd so the grid contains x = 0")
    if N < 9:
        raise ConfigError("N is too small for the stencils")
    if L <= 0:
        raise ConfigError("L must be positive")
    beta = theta.imag
    if not 0.0 < beta <= _THETA_CAP:
        raise ConfigError(f"Im theta must lie in (0, {_THETA_CAP}]")
    sampled = potential.kind == "sampled" or twist.kind == "sampled"
    if sampled and beta > _THETA_CAP_SAMPLED:
        raise ConfigError("tabulated inputs are only trusted up to "
                          f"Im theta = {_THETA_CAP_SAMPLED}")

    x = np.linspace(-L, L, N)
    h = x[1] - x[0]
    if potential.kind == "poschl_teller" and \
            potential.nu * h * np.exp(beta) > _COARSE_LIMIT:
        raise MeshResolutionError(
            f"nu h e^(Im theta) = {potential.nu * h * np.exp(beta):.3g} > "
            f"{_COARSE_LIMIT}; increase N to resolve the scaled well")

    scale = np.exp(theta)
    if potential.kind == "delta_limit":
        # The kink at x = 0 defeats any stencil wider than 3 points (the
        # wide one converges at first order only, with the error leaking
        # into Im E), so the point interaction pins the stencil to order
        # 2. The site strength carries the lattice renormalization
        # 1 + (e^theta h)^2/32 that cancels the exact 3-point lattice
        # bound-state error e^{2 theta} h^2/64, leaving O(h^4).
        order = 2
        Vx = np.zeros(N, dtype=complex)
        w2 = (scale * h) ** 2
        Vx[N // 2] = -np.exp(-theta) * (1.0 + w2 / 32.0) / h
    else:
        Vx = np.asarray(potential.V(scale * x), dtype=complex)
    ad = np.asarray(twist.ad(scale * x), dtype=complex)

    D2, D1 = _stencils(N, h, order)
    Ad = sp.diags(ad)
    S = 0.5 * (Ad @ D1 + D1 @ Ad)

    thr = modes.eigenvalues[:K]
    I_K = sp.identity(K, format="csr")
    H0 = (-np.exp(-2.0 * theta)) * sp.kron(D2, I_K) \
        + sp.kron(sp.diags(Vx), I_K) \
        + sp.kron(sp.identity(N, format="csr"), sp.diags(thr))
    C1 = -2.0 * np.exp(-theta) * sp.kron(S, coupling.T1[:K, :K])
    C2 = -sp.kron(sp.diags(ad * ad), coupling.T2[:K, :K])

    return ChannelSystem(K=K, L=float(L), N=N, h=float(h), theta=theta,
                         epsilon=float(epsilon), thresholds=np.asarray(thr, dtype=float),
                         x=x, H0=H0.tocsr(), C1=C1.tocsr(), C2=C2.tocsr(),
                         order=order, low_accuracy=sampled)


def default_length(theta, gap, twist=None, potential=None, j=1):
    """Box size from the Dirichlet decay rule e^{-sin(Im theta) k L} < 1e-10.

    ``gap`` is E - E_1, the open-channel momentum squared scale. A compact
    twist additionally keeps the box clear of its support. When the
    potential is given, the box is also sized so the tail of its j-th
    bound state is below 1e-5 at the wall; the eigenvalue error from
    truncating that tail scales with the tail squared, and a weakly bound
    state (small nu) otherwise leaks enough amplitude to push resonances
    above the real axis by more than the confinement tolerance.
    """
    if gap <= 0:
        raise ConfigError("gap must be positive to size the box")
    beta = complex(theta).imag
    L = np.log(1e10) / (np.sin(beta) * np.sqrt(gap))
    if twist is not None and twist.kind == "compact":
        L = max(L, 2.0 * twist.X + 10.0)
    if potential is not None and potential.kind != "sampled":
        states = bound_states(potential)
        rate = states[min(j, len(states)) - 1].decay_rate
        L = max(L, np.log(1e10) / (2.0 * rate))
    return float(L)


def default_points(potential, L, theta, E_scale=1.0):
    """Grid size from the coarseness rules, always odd."""
    beta = complex(theta).imag
    h = 0.05
    if potential.kind == "poschl_teller":
        h = min(h, 0.4 / (potential.nu * np.exp(beta)))
    h = min(h, 0.5 / max(1.0, np.sqrt(abs(E_scale))))
    n_half = int(np.ceil(L / h))
    return 2 * n_half + 1


@dataclass(frozen=True, eq=False)
class ComplexEigenpair:
    value: complex
    vector: np.ndarray  # shape (N, K), channel-resolved
    residual: float


def locate_resonance(system, target, radius):
    """Find the eigenvalue of H(eps) inside the disk around target.

    The target must keep a distance greater than the disk radius from
    every essential ray, otherwise discretized continuum eigenvalues
    would pollute the disk and the request is refused. The eigenpair is
    accepted only with relative residual below 1e-8; a converged pair
    outside the disk reports the resonance as lost.
    """
    target = complex(target)
    radius = float(radius)
    if radius <= 0:
        raise ConfigError("radius must be positive")
    for ray in system.rays:
        d = ray.distance_to(target)
        if d <= radius:
            raise ConfigError(
                f"target {target:.6g} lies within {d:.3g} of the essential "
                f"ray from E_k = {ray.origin.real:.6g}; shrink the radius "
                "or increase Im theta")

    M = system.matrix()
    rng = np.random.default_rng(_SEED)
    v0 = rng.standard_normal(M.shape[0])
    try:
        vals, vecs = spla.eigs(M, k=1, sigma=target, which="LM", v0=v0,
                               tol=1e-12)
    except spla.ArpackNoConvergence as err:
        raise ResonanceLostError(f"iteration stagnation near {target:.6g}: "
                                 f"{err}") from err
    lam = complex(vals[0])
    vec = vecs[:, 0]
    res = float(np.linalg.norm(M @ vec - lam * vec) / np.linalg.norm(vec))
    if res > _RESIDUAL_TOL:
        raise ResonanceLostError(
            f"eigenpair residual {res:.3e} exceeds {_RESIDUAL_TOL:g}")
    if abs(lam - target) > radius:
        raise ResonanceLostError(
            f"no eigenvalue in the disk: nearest is {lam:.9g}, "
            f"|lam - target| = {abs(lam - target):.3g} > radius {radius:g}")
    return ComplexEigenpair(value=lam, vector=vec.reshape(system.N, system.K),
                            residual=res)


@dataclass(frozen=True)
class ScanRow:
    eps: float
    re_E: float
    im_E: float
    residual: float


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Epsilon scan rows plus the quadratic fit of the imaginary part.

    a_fit solves the least-squares problem Im E ~ -a eps^2 through the
    origin over the nonzero-eps rows. cubic_residual estimates how much a
    cubic term |c| eps^3 in the remainder would bias a_fit: it is
    |c| * sum eps^5 / sum eps^4, directly comparable to a_fit shifts seen
    when halving the largest eps.
    """

    rows: tuple[ScanRow, ...]
    a_fit: float
    cubic_residual: float
    target: complex
    radius: float


def epsilon_scan(system, eps_list, target, radius):
    """Track the resonance over the eps ladder and fit the width.

    Targets are warm-started from the previous eigenvalue, so the ladder
    should be ordered. A step where the locator loses the disk reports
    which interval broke.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ConfigError("empty epsilon list")
    rows = []
    current = complex(target)
    prev_eps = None
    for e in eps_list:
        sys_e = system.with_epsilon(e)
        try:
            pair = locate_resonance(sys_e, current, radius)
        except ResonanceLostError as err:
            where = (f"between eps = {prev_eps:g} and eps = {e:g}"
                     if prev_eps is not None else f"at eps = {e:g}")
            raise ResonanceLostError(f"resonance lost {where}: {err}") from err
        rows.append(ScanRow(eps=e, re_E=pair.value.real, im_E=pair.value.imag,
                            residual=pair.residual))
        current = pair.value
        prev_eps = e

    fit = [(r.eps, r.im_E) for r in rows if r.eps != 0.0]
    if fit:
        eps_arr = np.array([e for e, _ in fit])
        im = np.array([v for _, v in fit])
        e2 = eps_arr**2
        a_fit = float(-(im @ e2) / (e2 @ e2))
        rem = im + a_fit * e2
        e3 = eps_arr**3
        c = float((rem @ e3) / (e3 @ e3))
        cubic_residual = float(abs(c) * np.sum(np.abs(eps_arr) ** 5)
                               / np.sum(e2 * e2))
    else:
        a_fit = 0.0
        cubic_residual = 0.0
    return ScanResult(rows=tuple(rows), a_fit=a_fit,
                      cubic_residual=cubic_residual, target=complex(target),
                      radius=float(radius))


def nearby_spectrum(system, center, count=40):
    """A cloud of eigenvalues around `center`, for dumps and ray checks."""
    M = system.matrix()
    k = min(int(count), M.shape[0] - 2)
    rng = np.random.default_rng(_SEED)
    v0 = rng.standard_normal(M.shape[0])
    vals = spla.eigs(M, k=k, sigma=complex(center), which="LM", v0=v0,
                     tol=1e-10, return_eigenvectors=False)
    return np.asarray(vals)
