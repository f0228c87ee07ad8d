"""Dirichlet eigenproblem on the cross-section and the angular couplings.

The waveguide cross-section ``omega`` lives in the (y, z) plane; the tube
axis is the x-axis. Everything downstream couples to the transverse modes
through the angular derivative about the rotation axis,

    d_tau = (y - c_y) d_z - (z - c_z) d_y,

and the two matrices T1[n][k] = <chi_n, d_tau chi_k> and
T2[n][k] = <chi_n, d_tau^2 chi_k>. This module computes the modes (closed
form where the geometry allows it, 5-point finite differences otherwise),
the angular derivative, the coupling matrices, and the twisted-surface
point cloud used for plotting.

Conventions
-----------
* rectangle(a, b) occupies [0, b] x [0, a] in (y, z): the long side runs
  along z, the rotation axis passes through the corner (0, 0). This is the
  orientation in which the first coupling entry on rectangle(pi, pi/2)
  equals -2/3.
* the disk is centered on the rotation axis.
* eigenfunctions are normalized in L2(omega) against the grid quadrature
  and their sign is fixed deterministically (see ``_fix_sign``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import jn_zeros, jv, jvp

from .errors import ConfigError, GridMismatchError, MeshResolutionError, NumericsError

_DEGENERACY_RTOL = 1e-8


@dataclass(frozen=True)
class CrossSectionSpec:
    """Geometry of the cross-section plus the numeric grid resolution.

    Use the constructors :meth:`rectangle`, :meth:`disk`, :meth:`polygon`
    rather than filling fields by hand. ``axis_offset`` moves the rotation
    axis away from the origin of the (y, z) plane; the default (0, 0) is
    the corner for rectangles and the center for disks.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    radius: float = 0.0
    vertices: tuple[tuple[float, float], ...] = ()
    grid_n: int = 128
    axis_offset: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("rectangle", "disk", "polygon"):
            raise ConfigError(f"unknown cross-section kind {self.kind!r}")
        if self.grid_n < 16:
            raise ConfigError("grid_n must be at least 16")
        if self.kind == "rectangle" and not (self.a > 0 and self.b > 0):
            raise ConfigError("rectangle sides must be positive")
        if self.kind == "disk" and not self.radius > 0:
            raise ConfigError("disk radius must be positive")
        if self.kind == "polygon":
            _validate_polygon(self.vertices)

    @classmethod
    def rectangle(cls, a, b, grid_n=128, axis_offset=(0.0, 0.0)):
        return cls(kind="rectangle", a=float(a), b=float(b), grid_n=int(grid_n),
                   axis_offset=(float(axis_offset[0]), float(axis_offset[1])))

    @classmethod
    def disk(cls, radius, grid_n=128, axis_offset=(0.0, 0.0)):
        return cls(kind="disk", radius=float(radius), grid_n=int(grid_n),
                   axis_offset=(float(axis_offset[0]), float(axis_offset[1])))

    @classmethod
    def polygon(cls, vertices, grid_n=128, axis_offset=(0.0, 0.0)):
        verts = tuple((float(y), float(z)) for y, z in vertices)
        return cls(kind="polygon", vertices=verts, grid_n=int(grid_n),
                   axis_offset=(float(axis_offset[0]), float(axis_offset[1])))


def _validate_polygon(vertices):
    if len(vertices) < 3:
        raise ConfigError("polygon needs at least three vertices")
    from shapely.geometry import Polygon

    poly = Polygon(vertices)
    if not poly.is_valid or poly.area <= 0:
        raise ConfigError("polygon must be simple (non-self-intersecting) "
                          "with positive area")


@dataclass(frozen=True)
class TransverseMode:
    """One Dirichlet eigenpair (E_n, chi_n) sampled on the shared grid.

    ``values`` holds chi_n on the tensor grid ``y`` x ``z`` (zero outside
    the domain). ``tag`` carries closed-form evaluation data when the mode
    comes from the separable or Bessel path: ``("rect", m_y, m_z, b, a)`` or
    ``("disk", m, root, parity)``; it is None for finite-difference modes.
    ``sign_convention`` records how the overall sign was fixed.
    """

    index: int
    eigenvalue: float
    values: np.ndarray
    y: np.ndarray
    z: np.ndarray
    axis_offset: tuple[float, float]
    tag: tuple | None = None
    sign_convention: str = "lexicographic"


@dataclass(frozen=True)
class TransverseModeSet:
    """Modes on one shared grid, with quadrature weights and degeneracy flags."""

    spec: CrossSectionSpec
    modes: tuple[TransverseMode, ...]
    wy: np.ndarray
    wz: np.ndarray
    mask: np.ndarray
    degenerate: tuple[bool, ...]
    path: str

    @property
    def eigenvalues(self):
        return np.array([m.eigenvalue for m in self.modes])

    def inner(self, f, g):
        """Quadrature inner product <f, g> over the cross-section."""
        return float(np.einsum("i,j,ij,ij->", self.wy, self.wz,
                               np.where(self.mask, f, 0.0), g))


@dataclass(frozen=True)
class CouplingMatrices:
    """Angular coupling matrices in the transverse eigenbasis.

    T1 is stored antisymmetrized; ``asymmetry_residual`` is the largest
    deviation max |T1_raw[n,k] + T1_raw[k,n]| seen before antisymmetrizing,
    a direct measure of quadrature quality. T2 is assembled by parts as
    -<d_tau chi_n, d_tau chi_k>, which is exact for Dirichlet modes and
    symmetric by construction.
    """

    T1: np.ndarray
    T2: np.ndarray
    K: int
    asymmetry_residual: float

    def completeness_defect(self):
        """|T2[n][n] + sum_k T1[k][n]^2| per mode; shrinks as K grows."""
        return np.abs(np.diag(self.T2) + np.sum(self.T1**2, axis=0))


# ---------------------------------------------------------------------------
# mode construction

def _gauss_nodes(lo, hi, n=64):
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (t + 1.0), half * w


def _fix_sign(values, mask):
    """Make the first significant interior sample positive (C order).

    The first strictly interior grid sample can legitimately be a numerical
    zero (a nodal line, or a staircase corner), so the rule skips entries
    below 1e-8 of the max amplitude before picking the anchor.
    """
    flat = np.where(mask, values, 0.0).ravel()
    big = np.flatnonzero(np.abs(flat) > 1e-8 * np.max(np.abs(flat)))
    if big.size and flat[big[0]] < 0:
        return -values
    return values


def _rectangle_closed(spec, count):
    b, a = spec.b, spec.a
    y, wy = _gauss_nodes(0.0, b)
    z, wz = _gauss_nodes(0.0, a)
    m_max = int(np.ceil(np.sqrt(count))) + 6
    cands = []
    for my in range(1, m_max + 1):
        for mz in range(1, m_max + 1):
            cands.append(((my * np.pi / b) ** 2 + (mz * np.pi / a) ** 2, my, mz))
    cands.sort()
    mask = np.ones((y.size, z.size), dtype=bool)
    modes = []
    for idx, (E, my, mz) in enumerate(cands[:count], start=1):
        vals = (2.0 / np.sqrt(a * b)
                * np.sin(my * np.pi * y / b)[:, None]
                * np.sin(mz * np.pi * z / a)[None, :])
        modes.append(TransverseMode(index=idx, eigenvalue=E, values=vals,
                                    y=y, z=z, axis_offset=spec.axis_offset,
                                    tag=("rect", my, mz, b, a),
                                    sign_convention="canonical"))
    eigs = np.array([c[0] for c in cands[:count + 1]])
    return modes, y, z, wy, wz, mask, eigs


def _disk_closed(spec, count):
    R = spec.radius
    n_roots = count + 2
    m_max = count + 2
    cands = []
    for m in range(0, m_max + 1):
        for i, root in enumerate(jn_zeros(m, n_roots), start=1):
            E = (root / R) ** 2
            if m == 0:
                cands.append((E, m, i, root, "cos"))
            else:
                cands.append((E, m, i, root, "cos"))
                cands.append((E, m, i, root, "sin"))
    cands.sort(key=lambda c: (c[0], c[1], c[4]))

    n = spec.grid_n
    y = np.linspace(-R, R, n + 1)
    z = np.linspace(-R, R, n + 1)
    hy = y[1] - y[0]
    hz = z[1] - z[0]
    Y, Z = np.meshgrid(y, z, indexing="ij")
    r = np.hypot(Y, Z)
    phi = np.arctan2(Z, Y)
    mask = r < R
    wy = np.full(y.size, hy)
    wz = np.full(z.size, hz)

    modes = []
    for idx, (E, m, i, root, parity) in enumerate(cands[:count], start=1):
        ang = 2.0 * np.pi if m == 0 else np.pi
        norm = np.sqrt(ang * 0.5 * R**2 * jv(m + 1, root) ** 2)
        radial = jv(m, root * r / R)
        trig = np.cos(m * phi) if parity == "cos" else np.sin(m * phi)
        vals = np.where(mask, radial * trig / norm, 0.0)
        modes.append(TransverseMode(index=idx, eigenvalue=E, values=vals,
                                    y=y, z=z, axis_offset=spec.axis_offset,
                                    tag=("disk", m, root, parity),
                                    sign_convention="canonical"))
    eigs = np.array([c[0] for c in cands[:count + 1]])
    return modes, y, z, wy, wz, mask, eigs


def _domain_mask(spec, Y, Z):
    if spec.kind == "rectangle":
        return np.ones_like(Y, dtype=bool)
    if spec.kind == "disk":
        return np.hypot(Y, Z) < spec.radius
    import shapely
    from shapely.geometry import Polygon

    poly = Polygon(spec.vertices)
    return shapely.contains_xy(poly, Y.ravel(), Z.ravel()).reshape(Y.shape)


def _fd_solve(spec, count):
    n = spec.grid_n
    if spec.kind == "rectangle":
        ylo, yhi, zlo, zhi = 0.0, spec.b, 0.0, spec.a
    elif spec.kind == "disk":
        R = spec.radius
        ylo, yhi, zlo, zhi = -R, R, -R, R
    else:
        vy = [v[0] for v in spec.vertices]
        vz = [v[1] for v in spec.vertices]
        ylo, yhi, zlo, zhi = min(vy), max(vy), min(vz), max(vz)

    y = np.linspace(ylo, yhi, n + 1)
    z = np.linspace(zlo, zhi, n + 1)
    hy = y[1] - y[0]
    hz = z[1] - z[0]
    Y, Z = np.meshgrid(y, z, indexing="ij")
    inside = _domain_mask(spec, Y, Z)
    inside[0, :] = inside[-1, :] = False
    inside[:, 0] = inside[:, -1] = False

    n_int = int(inside.sum())
    if count + 1 > n_int // 4:
        raise MeshResolutionError(
            f"grid has only {n_int} interior points; cannot resolve "
            f"{count} modes")

    idx = -np.ones(inside.shape, dtype=int)
    idx[inside] = np.arange(n_int)
    iy, iz = np.nonzero(inside)

    diag = np.full(n_int, 2.0 / hy**2 + 2.0 / hz**2)
    rows, cols, vals = [list(range(n_int))], [list(range(n_int))], [diag]
    for diy, diz, coeff in ((1, 0, -1.0 / hy**2), (-1, 0, -1.0 / hy**2),
                            (0, 1, -1.0 / hz**2), (0, -1, -1.0 / hz**2)):
        nb = idx[iy + diy, iz + diz]
        ok = nb >= 0
        rows.append(idx[iy, iz][ok])
        cols.append(nb[ok])
        vals.append(np.full(ok.sum(), coeff))
    A = sp.csr_matrix((np.concatenate(vals),
                       (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n_int, n_int))

    k = min(count + 1, n_int - 2)
    v0 = np.ones(n_int)
    eigvals, eigvecs = spla.eigsh(A, k=k, sigma=0.0, which="LM", v0=v0)
    order = np.argsort(eigvals)
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]

    for i in range(min(count, k)):
        r = np.linalg.norm(A @ eigvecs[:, i] - eigvals[i] * eigvecs[:, i])
        if r > 1e-10 * max(1.0, abs(eigvals[i])):
            raise NumericsError(f"eigensolver residual {r:.2e} for mode {i + 1}")

    if eigvals[count - 1] * max(hy, hz) ** 2 > 0.5:
        raise MeshResolutionError(
            f"mode {count} has E*h^2 = {eigvals[count - 1] * max(hy, hz)**2:.2f}; "
            "refine grid_n to resolve the requested modes")

    mask = inside
    wy = np.full(y.size, hy)
    wz = np.full(z.size, hz)
    modes = []
    for i in range(count):
        full = np.zeros(inside.shape)
        full[inside] = eigvecs[:, i] / np.sqrt(hy * hz)
        full = _fix_sign(full, mask)
        modes.append(TransverseMode(index=i + 1, eigenvalue=float(eigvals[i]),
                                    values=full, y=y, z=z,
                                    axis_offset=spec.axis_offset, tag=None))
    return modes, y, z, wy, wz, mask, eigvals[:count + 1]


def solve_transverse_modes(spec, count, path="auto"):
    """Compute the lowest `count` Dirichlet eigenpairs on the cross-section.

    Parameters
    ----------
    spec : CrossSectionSpec
    count : number of modes, ordered by nondecreasing eigenvalue.
    path : "auto" picks the closed form for rectangles and centered disks
        and 5-point finite differences otherwise; "closed" and "fd" force
        the respective route (AC studies compare the two on the rectangle).

    Degeneracy is flagged per mode whenever a neighboring gap falls below
    1e-8 * E_1; a degenerate target later blocks the width formula.
    """
    if count < 1:
        raise ConfigError("count must be at least 1")
    if path not in ("auto", "closed", "fd"):
        raise ConfigError(f"unknown path {path!r}")
    if path == "auto":
        closed_ok = spec.kind == "rectangle" or (
            spec.kind == "disk" and spec.axis_offset == (0.0, 0.0))
        path = "closed" if closed_ok else "fd"
    if path == "closed":
        if spec.kind == "rectangle":
            built = _rectangle_closed(spec, count)
        elif spec.kind == "disk":
            if spec.axis_offset != (0.0, 0.0):
                raise ConfigError("closed disk path requires the rotation "
                                  "axis at the center; use path='fd'")
            built = _disk_closed(spec, count)
        else:
            raise ConfigError("no closed form for polygons; use path='fd'")
    else:
        built = _fd_solve(spec, count)

    modes, y, z, wy, wz, mask, eigs = built
    tol = _DEGENERACY_RTOL * eigs[0]
    flags = []
    for i in range(count):
        lo = i > 0 and (eigs[i] - eigs[i - 1]) < tol
        hi = i + 1 < len(eigs) and (eigs[i + 1] - eigs[i]) < tol
        flags.append(bool(lo or hi))

    return TransverseModeSet(spec=spec, modes=tuple(modes), wy=wy, wz=wz,
                             mask=mask, degenerate=tuple(flags), path=path)


# ---------------------------------------------------------------------------
# angular derivative and couplings

def angular_derivative(mode):
    """Return (y - c_y) d_z chi - (z - c_z) d_y chi on the mode's grid.

    Closed-form modes are differentiated analytically; grid modes use
    central differences with the Dirichlet zero extension.
    """
    cy, cz = mode.axis_offset
    y, z = mode.y, mode.z
    Y, Z = np.meshgrid(y, z, indexing="ij")
    if mode.tag is not None and mode.tag[0] == "rect":
        _, my, mz, b, a = mode.tag
        ky = my * np.pi / b
        kz = mz * np.pi / a
        c = 2.0 / np.sqrt(a * b)
        dy = c * ky * np.cos(ky * y)[:, None] * np.sin(kz * z)[None, :]
        dz = c * kz * np.sin(ky * y)[:, None] * np.cos(kz * z)[None, :]
        return (Y - cy) * dz - (Z - cz) * dy
    if mode.tag is not None and mode.tag[0] == "disk":
        _, m, root, parity = mode.tag
        if (cy, cz) != (0.0, 0.0):
            raise ConfigError("closed disk modes assume the axis at the center")
        if m == 0:
            return np.zeros_like(mode.values)
        r = np.hypot(Y, Z)
        phi = np.arctan2(Z, Y)
        R = y[-1]
        ang = np.pi
        norm = np.sqrt(ang * 0.5 * R**2 * jv(m + 1, root) ** 2)
        radial = jv(m, root * r / R)
        mask = r < R
        if parity == "cos":
            out = -m * radial * np.sin(m * phi) / norm
        else:
            out = m * radial * np.cos(m * phi) / norm
        return np.where(mask, out, 0.0)

    vals = mode.values
    hy = y[1] - y[0]
    hz = z[1] - z[0]
    pad = np.pad(vals, 1)
    dy = (pad[2:, 1:-1] - pad[:-2, 1:-1]) / (2 * hy)
    dz = (pad[1:-1, 2:] - pad[1:-1, :-2]) / (2 * hz)
    return (Y - cy) * dz - (Z - cz) * dy


def coupling_matrices(modes, K=None):
    """Assemble T1 and T2 for the first K modes of one mode set.

    The centered-disk closed path is filled analytically: the angular
    derivative couples only the two partners of a degenerate +-m pair,
    <cos, d_tau sin> = m, and d_tau^2 is diagonal with -m^2. Everything
    else goes through grid quadrature. T2 uses the by-parts identity
    T2[n][k] = -<d_tau chi_n, d_tau chi_k>.
    """
    K = len(modes.modes) if K is None else int(K)
    if K > len(modes.modes):
        raise ConfigError(f"K={K} exceeds the {len(modes.modes)} computed modes")
    sub = modes.modes[:K]
    base = sub[0]
    for m in sub[1:]:
        if m.y.shape != base.y.shape or m.z.shape != base.z.shape or \
                not (np.shares_memory(m.y, base.y) or np.array_equal(m.y, base.y)):
            raise GridMismatchError("modes were built on different grids")

    if modes.path == "closed" and modes.spec.kind == "disk":
        T1 = np.zeros((K, K))
        T2 = np.zeros((K, K))
        for i, mi in enumerate(sub):
            _, m, root, parity = mi.tag
            T2[i, i] = -float(m) ** 2
            if parity == "cos":
                for jx, mj in enumerate(sub):
                    if mj.tag == ("disk", m, root, "sin"):
                        T1[i, jx] = float(m)
                        T1[jx, i] = -float(m)
        return CouplingMatrices(T1=T1, T2=T2, K=K, asymmetry_residual=0.0)

    dtau = [angular_derivative(m) for m in sub]
    T1_raw = np.empty((K, K))
    T2 = np.empty((K, K))
    for i in range(K):
        for j in range(K):
            T1_raw[i, j] = modes.inner(sub[i].values, dtau[j])
        for j in range(i, K):
            val = -modes.inner(dtau[i], dtau[j])
            T2[i, j] = T2[j, i] = val
    residual = float(np.max(np.abs(T1_raw + T1_raw.T)))
    T1 = 0.5 * (T1_raw - T1_raw.T)
    return CouplingMatrices(T1=T1, T2=T2, K=K, asymmetry_residual=residual)


# ---------------------------------------------------------------------------
# surface export

def boundary_points(spec, n_boundary):
    """Sample n_boundary points along the boundary of the cross-section."""
    t = np.arange(n_boundary) / n_boundary
    if spec.kind == "rectangle":
        b, a = spec.b, spec.a
        per = 2.0 * (a + b)
        s = t * per
        pts = np.empty((n_boundary, 2))
        for i, si in enumerate(s):
            if si < b:
                pts[i] = (si, 0.0)
            elif si < b + a:
                pts[i] = (b, si - b)
            elif si < 2 * b + a:
                pts[i] = (b - (si - b - a), a)
            else:
                pts[i] = (0.0, a - (si - 2 * b - a))
        return pts
    if spec.kind == "disk":
        ang = 2 * np.pi * t
        return spec.radius * np.column_stack([np.cos(ang), np.sin(ang)])
    verts = np.array(spec.vertices + (spec.vertices[0],))
    seg = np.diff(verts, axis=0)
    lens = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    s = t * cum[-1]
    pts = np.empty((n_boundary, 2))
    for i, si in enumerate(s):
        k = min(np.searchsorted(cum, si, side="right") - 1, len(seg) - 1)
        u = (si - cum[k]) / lens[k]
        pts[i] = verts[k] + u * seg[k]
    return pts


def twisted_surface_points(spec, eps, twist, x_range=(-10.0, 10.0),
                           n_x=101, n_boundary=64):
    """Point cloud of the twisted tube boundary.

    Each cross-section slice at position x is the boundary of omega rotated
    by the angle eps * alpha(x) about the rotation axis:

        y' = c_y + (y - c_y) cos(t) + (z - c_z) sin(t)
        z' = c_z + (z - c_z) cos(t) - (y - c_y) sin(t),   t = eps * alpha(x).

    Returns an (n_x * n_boundary, 3) array of (x, y', z') rows. The map is
    an isometry of each slice, so y'^2 + z'^2 is preserved when the axis
    sits at the origin.
    """
    pts = boundary_points(spec, n_boundary)
    cy, cz = spec.axis_offset
    xs = np.linspace(x_range[0], x_range[1], n_x)
    out = np.empty((n_x * n_boundary, 3))
    for i, x in enumerate(xs):
        t = eps * twist.alpha(x)
        c, s = np.cos(t), np.sin(t)
        dy = pts[:, 0] - cy
        dz = pts[:, 1] - cz
        rows = slice(i * n_boundary, (i + 1) * n_boundary)
        out[rows, 0] = x
        out[rows, 1] = cy + dy * c + dz * s
        out[rows, 2] = cz + dz * c - dy * s
    return out
