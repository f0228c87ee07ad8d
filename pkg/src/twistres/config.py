"""INI run configuration: parsing, validation, and the config hash.

One file drives every command, with optional sections; a command reads
the sections it needs and ignores the rest. Unknown sections or keys are
errors rather than silently dropped, since a typo there usually means a
silently different computation. All file references (sampled potentials
and twists) are resolved relative to the config file itself.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cross_section import CrossSectionSpec
from .errors import ConfigError
from .longitudinal import PotentialSpec
from .report import read_potential_csv, read_twist_csv
from .twist import TwistProfile

_ALLOWED = {
    "cross_section": {"shape", "a", "b", "radius", "vertices", "grid_n",
                      "axis_offset", "path", "count"},
    "potential": {"kind", "nu", "file"},
    "twist": {"kind", "x_plateau", "file"},
    "target": {"n", "j"},
    "solver": {"k", "l", "n", "im_theta", "order", "engine",
               "dump_spectrum", "spectrum_count"},
    "scan": {"eps", "nu", "radius"},
    "surface": {"eps", "x_min", "x_max", "n_x", "n_boundary"},
}


@dataclass(frozen=True)
class SurfaceParams:
    eps: float = 0.1
    x_min: float = -10.0
    x_max: float = 10.0
    n_x: int = 101
    n_boundary: int = 64


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Everything a command can ask for, with the raw text it came from."""

    path: str
    raw_text: str
    config_hash: str
    cross_section: CrossSectionSpec | None
    mode_count: int
    mode_path: str
    potential: PotentialSpec | None
    twist: TwistProfile | None
    target_n: int
    target_j: int
    K: int
    L: float | None
    N: int | None
    im_theta: float
    order: int
    engine: str
    dump_spectrum: bool
    spectrum_count: int
    scan_eps: tuple[float, ...]
    scan_nu: tuple[float, ...]
    scan_radius: float | None
    surface: SurfaceParams

    def require(self, *names):
        """Assert the named inputs were configured; error names the gap."""
        for name in names:
            if getattr(self, name) is None:
                section = {"cross_section": "cross_section",
                           "potential": "potential",
                           "twist": "twist"}[name]
                raise ConfigError(f"this command needs a [{section}] section")


def _get(section, key, cast, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"missing key '{key}' in [{section.name}]")
        return default
    raw = section[key].strip()
    try:
        return cast(raw)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"bad value for '{key}' in [{section.name}]: "
                          f"{raw!r} ({err})") from err


def _float_list(raw):
    parts = raw.replace(",", " ").split()
    return tuple(float(p) for p in parts)


def _pair(raw):
    vals = _float_list(raw)
    if len(vals) != 2:
        raise ValueError("expected two numbers")
    return (vals[0], vals[1])


def _bool(raw):
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _auto_or(cast):
    def inner(raw):
        if raw.lower() == "auto":
            return None
        return cast(raw)
    return inner


def _vertices(raw):
    pts = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = chunk.split()
        if len(vals) != 2:
            raise ValueError(f"vertex {chunk!r} is not a 'y z' pair")
        pts.append((float(vals[0]), float(vals[1])))
    return tuple(pts)


def _parse_cross_section(section):
    shape = _get(section, "shape", str, required=True).lower()
    grid_n = _get(section, "grid_n", int, default=128)
    offset = _get(section, "axis_offset", _pair, default=(0.0, 0.0))
    if shape == "rectangle":
        a = _get(section, "a", float, required=True)
        b = _get(section, "b", float, required=True)
        return CrossSectionSpec.rectangle(a, b, grid_n=grid_n, axis_offset=offset)
    if shape == "disk":
        radius = _get(section, "radius", float, required=True)
        return CrossSectionSpec.disk(radius, grid_n=grid_n, axis_offset=offset)
    if shape == "polygon":
        verts = _get(section, "vertices", _vertices, required=True)
        return CrossSectionSpec.polygon(verts, grid_n=grid_n, axis_offset=offset)
    raise ConfigError(f"unknown cross-section shape {shape!r}")


def _parse_potential(section, base_dir):
    kind = _get(section, "kind", str, required=True).lower()
    if kind == "poschl_teller":
        return PotentialSpec.poschl_teller(_get(section, "nu", float, required=True))
    if kind == "delta_limit":
        return PotentialSpec.delta_limit()
    if kind == "free":
        return PotentialSpec.free()
    if kind == "sampled":
        rel = _get(section, "file", str, required=True)
        x, V = read_potential_csv(base_dir / rel)
        return PotentialSpec.sampled(x, V)
    raise ConfigError(f"unknown potential kind {kind!r}")


def _parse_twist(section, base_dir):
    kind = _get(section, "kind", str, required=True).lower()
    if kind == "linear":
        return TwistProfile.linear()
    if kind == "compact":
        return TwistProfile.compact(_get(section, "x_plateau", float, required=True))
    if kind == "sampled":
        rel = _get(section, "file", str, required=True)
        x, ad, add = read_twist_csv(base_dir / rel)
        return TwistProfile.sampled(x, ad, alpha_ddot=add)
    raise ConfigError(f"unknown twist kind {kind!r}")


def parse_config(path):
    """Read and validate one INI file into a RunConfig."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    digest = hashlib.sha256(raw.encode()).hexdigest()

    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=("#",))
    try:
        parser.read_string(raw, source=str(path))
    except configparser.Error as err:
        raise ConfigError(f"config syntax: {err}") from err

    for name in parser.sections():
        if name not in _ALLOWED:
            raise ConfigError(f"unknown section [{name}]")
        for key in parser[name]:
            if key not in _ALLOWED[name]:
                raise ConfigError(f"unknown key '{key}' in [{name}]")

    base_dir = path.resolve().parent

    cross = mode_count = None
    mode_path = "auto"
    if parser.has_section("cross_section"):
        sec = parser["cross_section"]
        cross = _parse_cross_section(sec)
        mode_count = _get(sec, "count", int, default=6)
        mode_path = _get(sec, "path", str, default="auto").lower()
        if mode_path not in ("auto", "closed", "fd"):
            raise ConfigError(f"unknown mode path {mode_path!r}")
    mode_count = mode_count if mode_count is not None else 6

    potential = (_parse_potential(parser["potential"], base_dir)
                 if parser.has_section("potential") else None)
    twist = (_parse_twist(parser["twist"], base_dir)
             if parser.has_section("twist") else None)

    target_n, target_j = 2, 1
    if parser.has_section("target"):
        sec = parser["target"]
        target_n = _get(sec, "n", int, default=2)
        target_j = _get(sec, "j", int, default=1)
    if target_n < 1 or target_j < 1:
        raise ConfigError("target indices are 1-based positive integers")

    K, L, N = 6, None, None
    im_theta, order, engine = 0.35, 4, "auto"
    dump_spectrum, spectrum_count = False, 40
    if parser.has_section("solver"):
        sec = parser["solver"]
        K = _get(sec, "k", int, default=6)
        L = _get(sec, "l", _auto_or(float), default=None)
        N = _get(sec, "n", _auto_or(int), default=None)
        im_theta = _get(sec, "im_theta", float, default=0.35)
        order = _get(sec, "order", int, default=4)
        engine = _get(sec, "engine", str, default="auto").lower()
        dump_spectrum = _get(sec, "dump_spectrum", _bool, default=False)
        spectrum_count = _get(sec, "spectrum_count", int, default=40)
    if engine not in ("auto", "ecs", "kernel", "rho"):
        raise ConfigError(f"unknown engine {engine!r}")

    scan_eps, scan_nu, scan_radius = (), (), None
    if parser.has_section("scan"):
        sec = parser["scan"]
        scan_eps = _get(sec, "eps", _float_list, default=())
        scan_nu = _get(sec, "nu", _float_list, default=())
        scan_radius = _get(sec, "radius", float, default=None)

    surface = SurfaceParams()
    if parser.has_section("surface"):
        sec = parser["surface"]
        surface = SurfaceParams(
            eps=_get(sec, "eps", float, default=0.1),
            x_min=_get(sec, "x_min", float, default=-10.0),
            x_max=_get(sec, "x_max", float, default=10.0),
            n_x=_get(sec, "n_x", int, default=101),
            n_boundary=_get(sec, "n_boundary", int, default=64))
    if surface.n_x < 2 or surface.n_boundary < 3:
        raise ConfigError("surface sampling needs n_x >= 2, n_boundary >= 3")

    if not np.all(np.diff(scan_eps) > 0) and len(scan_eps) > 1:
        raise ConfigError("scan eps ladder must be strictly increasing")

    return RunConfig(path=str(path), raw_text=raw, config_hash=digest,
                     cross_section=cross, mode_count=mode_count,
                     mode_path=mode_path, potential=potential, twist=twist,
                     target_n=target_n, target_j=target_j, K=K, L=L, N=N,
                     im_theta=im_theta, order=order, engine=engine,
                     dump_spectrum=dump_spectrum,
                     spectrum_count=spectrum_count, scan_eps=scan_eps,
                     scan_nu=scan_nu, scan_radius=scan_radius,
                     surface=surface)
