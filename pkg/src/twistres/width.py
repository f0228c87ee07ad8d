"""Embedded eigenvalues of the straight guide and their second-order width.

Before twisting, the operator separates: its eigenvalues are the sums
E_{n,j} = E_n + mu_j of a transverse threshold and a longitudinal bound
level. Values below the first threshold E_1 are ordinary discrete
spectrum; values above it are embedded in the essential spectrum and a
twist generically dissolves them into resonances. To second order in the
twist strength eps the resonance sits at

    E(eps) = E_{n,j} + eps^2 (shift) - i eps^2 a + o(eps^2),

and this module computes the width coefficient

    a = sum_{k: E_k < E} T1[k][n]^2 * Im <v_j, (h - (E - E_k) - i0)^{-1} v_j>

channel by channel, with v_j the twist coupling vector of the target
bound state. Closed channels (E_k > E) contribute nothing to the width;
their real parts are reported as diagnostics, through the reduced
resolvent where the energy sits on a bound-state pole.

The deep-well limit is tracked explicitly: for the point interaction the
open-channel boundary value is known in closed form, which pins the
limiting width that the nu-scan approaches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ConfigError, DegenerateTargetError,
                     ThresholdCollisionError)
from .longitudinal import (PotentialSpec, bound_levels, bound_states,
                           numeric_bound_levels, resolvent_form)
from .twist import coupling_vector

_THRESHOLD_WINDOW = 1e-4
_COLLISION_RTOL = 1e-8
_NEAR_POLE = 1e-3


@dataclass(frozen=True)
class EmbeddedEigenvalue:
    """One eigenvalue E_n + mu_j of the straight guide."""

    n: int
    j: int
    E: float
    embedded: bool
    simple: bool


@dataclass(frozen=True)
class SpectrumClassification:
    entries: tuple[EmbeddedEigenvalue, ...]
    sigma_minus: tuple[EmbeddedEigenvalue, ...]
    sigma_plus: tuple[EmbeddedEigenvalue, ...]
    thresholds: tuple[float, ...]


def classify_spectrum(modes, potential):
    """Split the unperturbed point spectrum at the first threshold.

    Simplicity is checked two ways: the transverse mode must be
    non-degenerate, and no other (k, i) combination may produce the same
    total energy within 1e-8 relative tolerance.
    """
    thresholds = modes.eigenvalues
    if potential.kind == "sampled":
        levels = np.asarray(numeric_bound_levels(potential), dtype=float)
    else:
        levels = np.asarray(bound_levels(potential), dtype=float)
    combos = []
    for n in range(1, thresholds.size + 1):
        for j in range(1, levels.size + 1):
            combos.append((n, j, float(thresholds[n - 1] + levels[j - 1])))
    entries = []
    for n, j, E in combos:
        tol = _COLLISION_RTOL * max(1.0, abs(E))
        clash = any((nn, jj) != (n, j) and abs(EE - E) < tol
                    for nn, jj, EE in combos)
        simple = not modes.degenerate[n - 1] and not clash
        entries.append(EmbeddedEigenvalue(n=n, j=j, E=E,
                                          embedded=E > float(thresholds[0]),
                                          simple=simple))
    entries.sort(key=lambda e: (e.E, e.n, e.j))
    entries = tuple(entries)
    return SpectrumClassification(
        entries=entries,
        sigma_minus=tuple(e for e in entries if not e.embedded),
        sigma_plus=tuple(e for e in entries if e.embedded),
        thresholds=tuple(float(t) for t in thresholds))


def threshold_index(E, thresholds):
    """Number of open channels: k* = #{k : E_k < E}, strict inequality."""
    return int(np.sum(np.asarray(thresholds, dtype=float) < float(E)))


@dataclass(frozen=True)
class ChannelContribution:
    """One transverse channel's share of the width formula.

    ``im_resolvent``/``re_resolvent`` are None when the coupling entry is
    numerically zero and the solve was skipped. Closed channels carry
    im_resolvent = 0 by definition and a diagnostic real part.
    """

    k: int
    E_k: float
    lam: float
    coupling: float
    open: bool
    im_resolvent: float | None
    re_resolvent: float | None
    contribution: float


@dataclass(frozen=True)
class WidthResult:
    E: float
    n: int
    j: int
    k_star: int
    a: float
    C0: float
    channels: tuple[ChannelContribution, ...]
    engine: str


def _alpha_sq_overlap(twist, state):
    """<phi_j, alpha_dot^2 phi_j> by trapezoid on the real line."""
    if twist.kind == "linear":
        return 1.0
    R = state.decay_radius
    h = min(0.005, 0.1 / state.nu) if state.kind == "poschl_teller" else 0.005
    n = 2 * int(round(R / h)) + 1
    x = np.linspace(-R, R, n)
    ph = np.real(state.phi(x + 0j))
    ad = np.real(twist.ad(x + 0j))
    return float(np.trapezoid(ad**2 * ph**2, x))


def width_coefficient(modes, coupling, potential, twist, n, j=1, engine="auto"):
    """Second-order width coefficient a for the target eigenvalue E_n + mu_j.

    Parameters
    ----------
    modes : TransverseModeSet with at least coupling.K modes.
    coupling : CouplingMatrices on the same mode set.
    potential, twist : analytic longitudinal data (sampled kinds are
        refused; tables cannot be continued to the scaling contour).
    n, j : target indices, both 1-based.
    engine : forwarded to the resolvent evaluations of open channels.

    Raises DegenerateTargetError when the target eigenvalue is not simple
    and ThresholdCollisionError when it sits within 1e-4 of a threshold,
    where the square-root branch point makes second order meaningless.
    """
    K = coupling.K
    if not 1 <= n <= K:
        raise ConfigError(f"target n={n} outside the {K} coupled channels")
    states = bound_states(potential)
    if not 1 <= j <= len(states):
        raise ConfigError(f"the potential has {len(states)} bound states; "
                          f"j={j} does not exist")
    state = states[j - 1]
    thresholds = modes.eigenvalues
    E = float(thresholds[n - 1] + state.mu)

    levels = np.asarray(bound_levels(potential), dtype=float)
    if modes.degenerate[n - 1]:
        raise DegenerateTargetError(
            f"transverse mode n={n} is degenerate; the target eigenvalue "
            "is not simple")
    tol = _COLLISION_RTOL * max(1.0, abs(E))
    for nn in range(1, thresholds.size + 1):
        for jj in range(1, levels.size + 1):
            if (nn, jj) != (n, j) and abs(thresholds[nn - 1] + levels[jj - 1] - E) < tol:
                raise DegenerateTargetError(
                    f"target E={E:.9g} collides with the ({nn},{jj}) "
                    "eigenvalue; it is not simple")
    if E <= float(thresholds[0]):
        raise ConfigError(f"target E={E:.9g} lies below the first threshold; "
                          "it is not embedded")
    gaps = np.abs(thresholds - E)
    if np.min(gaps) < _THRESHOLD_WINDOW:
        k_bad = int(np.argmin(gaps)) + 1
        raise ThresholdCollisionError(
            f"target E={E:.9g} sits within {_THRESHOLD_WINDOW:g} of "
            f"threshold k={k_bad}")

    v = coupling_vector(twist, state)
    k_star = threshold_index(E, thresholds[:K])
    channels = []
    total = 0.0
    for k in range(1, K + 1):
        E_k = float(thresholds[k - 1])
        lam = E - E_k
        c = float(coupling.T1[k - 1, n - 1])
        is_open = E_k < E
        if abs(c) < 1e-13:
            channels.append(ChannelContribution(
                k=k, E_k=E_k, lam=lam, coupling=c, open=is_open,
                im_resolvent=None, re_resolvent=None, contribution=0.0))
            continue
        if is_open:
            r = resolvent_form(potential, lam, v, side="+i0", engine=engine)
            im = float(r.value.imag)
            re = float(r.value.real)
            contrib = c * c * im
            total += contrib
        else:
            reduced = bool(np.any(np.abs(lam - levels) < _NEAR_POLE))
            r = resolvent_form(potential, complex(lam), v, side=None,
                               reduced=reduced, engine=engine)
            im = 0.0
            re = float(r.value.real)
            contrib = 0.0
        channels.append(ChannelContribution(
            k=k, E_k=E_k, lam=lam, coupling=c, open=is_open,
            im_resolvent=im, re_resolvent=re, contribution=contrib))

    C0 = _alpha_sq_overlap(twist, state) * float(coupling.T2[n - 1, n - 1])
    return WidthResult(E=E, n=n, j=j, k_star=k_star, a=total, C0=C0,
                       channels=tuple(channels), engine=engine)


# ---------------------------------------------------------------------------
# the deep-well limit

def delta_gradient_im(lam):
    """Im <phi', (h_delta - lam - i0)^{-1} phi'> in closed form.

    For the point interaction with phi = sqrt(1/2) e^{-|x|/2} the
    open-channel boundary value of the gradient vector is

        4 sqrt(lam) / (1 + 4 lam)^2,  lam > 0.
    """
    lam = float(lam)
    if lam <= 0:
        raise ConfigError("the closed form needs lam > 0")
    return 4.0 * np.sqrt(lam) / (1.0 + 4.0 * lam) ** 2


@dataclass(frozen=True)
class LimitWidth:
    a: float
    lam: float
    im_form: float
    C1: float
    trivial: bool


def limit_width_delta(E1, E2, C1):
    """Width of the point-interaction eigenvalue E_2 - 1/4 in closed form.

    The eigenvalue is embedded only when the gap E_2 - E_1 exceeds the
    binding energy 1/4; below that the construction has no open channel
    and the request is refused. ``trivial`` marks a vanishing coupling
    entry C_1, in which case the leading order contributes nothing.
    """
    lam = float(E2) - float(E1) - 0.25
    if lam <= 0:
        raise ConfigError("E_2 - 1/4 is not embedded: the threshold gap "
                          "must exceed 1/4")
    im_form = delta_gradient_im(lam)
    a = 4.0 * C1 * C1 * im_form
    return LimitWidth(a=float(a), lam=lam, im_form=float(im_form),
                      C1=float(C1), trivial=abs(C1) < 1e-12)


@dataclass(frozen=True)
class NuScanRow:
    nu: float
    E: float
    a: float
    distance: float


@dataclass(frozen=True)
class NuScanResult:
    rows: tuple[NuScanRow, ...]
    a_limit: float
    E_limit: float
    monotone: bool


def width_vs_nu(modes, coupling, twist, n, nus, engine="auto"):
    """Track the ground-state width across well steepness toward the limit.

    For each nu the width coefficient of E_n + mu_1(nu) is computed with
    the smooth well; the limit row uses the point interaction with the
    same twist, which for the linear twist reproduces the closed form of
    :func:`limit_width_delta`. Rows report |a(nu) - a_limit| so the
    approach is visible; ``monotone`` states whether those distances
    decrease along the given nu order.
    """
    nus = [float(v) for v in nus]
    if not nus:
        raise ConfigError("empty nu list")
    limit = width_coefficient(modes, coupling, PotentialSpec.delta_limit(),
                              twist, n, 1, engine=engine)
    rows = []
    for nu in nus:
        res = width_coefficient(modes, coupling,
                                PotentialSpec.poschl_teller(nu), twist, n, 1,
                                engine=engine)
        rows.append(NuScanRow(nu=nu, E=res.E, a=res.a,
                              distance=abs(res.a - limit.a)))
    dists = [r.distance for r in rows]
    mono = all(d2 < d1 for d1, d2 in zip(dists, dists[1:]))
    return NuScanResult(rows=tuple(rows), a_limit=limit.a, E_limit=limit.E,
                        monotone=mono)
