"""Deterministic escape-time images with ray, equipotential and puzzle overlays."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from matplotlib.path import Path as MplPath

from .errors import DomainError, QuadynError
from .potential import equipotential, trace_ray
from .puzzle import build_puzzle

ESCAPE_RADIUS = 1e10
RAY_COLOR = (255, 64, 32)
EQUI_COLOR = (32, 160, 255)
PUZZLE_COLOR = (255, 220, 0)
HIGHLIGHT_COLOR = (80, 200, 120)


@dataclass(frozen=True)
class RenderSpec:
    target: str = "julia"              # "julia" or "mandelbrot"
    c: complex = 0j
    center: complex = 0j
    width: float = 4.0
    resolution: tuple = (256, 256)     # (w, h) in pixels
    max_iter: int = 256
    rays: tuple = ()                   # angles
    equipotentials: tuple = ()         # levels R > 1 (curve G = log R)
    puzzle_depth: int | None = None
    highlight: tuple = ()              # (depth, piece id) pairs

    def __post_init__(self):
        if self.target not in ("julia", "mandelbrot"):
            raise DomainError("target must be 'julia' or 'mandelbrot'")
        w, h = self.resolution
        if w < 16 or h < 16:
            raise DomainError("resolution must be at least 16x16")
        if not self.width > 0:
            raise DomainError("window width must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be positive")
        if self.target == "mandelbrot" and (self.rays or self.equipotentials
                                            or self.puzzle_depth is not None or self.highlight):
            raise DomainError("overlays are only available for Julia sets")

    @property
    def pixel(self) -> float:
        return self.width / self.resolution[0]


@dataclass
class Rendering:
    spec: RenderSpec
    rgb: np.ndarray                    # (h, w, 3) uint8, row 0 at the top
    interior: np.ndarray               # (h, w) bool
    potential: np.ndarray              # (h, w) estimated Green's function, 0 inside
    warnings: list = field(default_factory=list)


def pixel_grid(spec: RenderSpec) -> np.ndarray:
    """Complex coordinate of every pixel center, row 0 at the top."""
    w, h = spec.resolution
    px = spec.pixel
    x = spec.center.real + (np.arange(w) - (w - 1) / 2) * px
    y = spec.center.imag - (np.arange(h) - (h - 1) / 2) * px
    return x[None, :] + 1j * y[:, None]


def pixel_of(spec: RenderSpec, z):
    """(row, column) floats of points z."""
    w, h = spec.resolution
    z = np.asarray(z, dtype=complex)
    col = (z.real - spec.center.real) / spec.pixel + (w - 1) / 2
    row = -(z.imag - spec.center.imag) / spec.pixel + (h - 1) / 2
    return row, col


def escape_time(spec: RenderSpec):
    """(interior mask, Green's function estimate) over the pixel grid."""
    Z = pixel_grid(spec)
    if spec.target == "julia":
        z = Z.copy()
        c = np.full_like(Z, complex(spec.c))
    else:
        z = np.zeros_like(Z)
        c = Z
    alive = np.ones(Z.shape, dtype=bool)
    g = np.zeros(Z.shape)
    for n in range(spec.max_iter):
        z[alive] = z[alive] ** 2 + c[alive]
        out = alive & (np.abs(z) > ESCAPE_RADIUS)
        if out.any():
            g[out] = np.log(np.abs(z[out])) / 2.0 ** (n + 1)
            alive &= ~out
        if not alive.any():
            break
    return alive, g


def _shade(interior, g):
    """Smooth colouring by log of the potential; interior is black."""
    rgb = np.zeros(interior.shape + (3,), dtype=np.uint8)
    t = np.zeros(interior.shape)
    out = ~interior
    t[out] = np.log(g[out])
    t = 0.5 + 0.5 * np.cos(0.6 * t)
    rgb[..., 0] = np.where(out, np.rint(40 + 200 * t), 0).astype(np.uint8)
    rgb[..., 1] = np.where(out, np.rint(30 + 120 * t * t), 0).astype(np.uint8)
    rgb[..., 2] = np.where(out, np.rint(90 + 160 * (1 - t)), 0).astype(np.uint8)
    return rgb


def _draw_polyline(rgb, spec, z, color):
    z = np.asarray(z, dtype=complex)
    z = z[np.isfinite(z)]
    if z.size < 2:
        return
    h, w = rgb.shape[:2]
    row, col = pixel_of(spec, z)
    seg = np.maximum(np.abs(np.diff(row)), np.abs(np.diff(col)))
    steps = np.maximum(np.ceil(seg).astype(int), 1)
    rr, cc = [], []
    for k in range(z.size - 1):
        if not (np.isfinite(seg[k]) and steps[k] < 4 * (w + h)):
            continue
        t = np.arange(steps[k] + 1) / steps[k]
        rr.append(row[k] + t * (row[k + 1] - row[k]))
        cc.append(col[k] + t * (col[k + 1] - col[k]))
    if not rr:
        return
    rr = np.rint(np.concatenate(rr)).astype(int)
    cc = np.rint(np.concatenate(cc)).astype(int)
    ok = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
    rgb[rr[ok], cc[ok]] = color


def _fill(rgb, spec, poly, color):
    path = MplPath(np.column_stack([poly.real, poly.imag]))
    Z = pixel_grid(spec).ravel()
    inside = path.contains_points(np.column_stack([Z.real, Z.imag])).reshape(rgb.shape[:2])
    mix = (rgb[inside].astype(np.uint16) + np.array(color, dtype=np.uint16)) // 2
    rgb[inside] = mix.astype(np.uint8)


def render(spec: RenderSpec) -> Rendering:
    """Escape-time image; overlay failures become warnings, the image is still made."""
    interior, g = escape_time(spec)
    rgb = _shade(interior, g)
    warnings = []
    c = complex(spec.c)
    if spec.puzzle_depth is not None or spec.highlight:
        depth = max([spec.puzzle_depth or 0] + [d for d, _ in spec.highlight])
        try:
            p = build_puzzle(c, depth)
            for d, pid in spec.highlight:
                _fill(rgb, spec, p.boundary(p.piece(d, pid)), HIGHLIGHT_COLOR)
            if spec.puzzle_depth is not None:
                for piece in p.pieces(spec.puzzle_depth):
                    poly = p.boundary(piece)
                    _draw_polyline(rgb, spec, np.append(poly, poly[0]), PUZZLE_COLOR)
        except (QuadynError, IndexError) as exc:
            warnings.append(f"puzzle overlay: {type(exc).__name__}: {exc}")
    for R in spec.equipotentials:
        try:
            curve = equipotential(c, float(R), samples=1024)
            _draw_polyline(rgb, spec, np.append(curve.points, curve.points[0]), EQUI_COLOR)
        except (QuadynError, ValueError) as exc:
            warnings.append(f"equipotential {R}: {type(exc).__name__}: {exc}")
    for theta in spec.rays:
        try:
            ray = trace_ray(c, theta)
            pts = ray.points if ray.landing is None else np.append(ray.points, ray.landing)
            _draw_polyline(rgb, spec, pts, RAY_COLOR)
        except (QuadynError, ValueError) as exc:
            ray = getattr(exc, "ray", None)
            if ray is not None:
                _draw_polyline(rgb, spec, ray.points, RAY_COLOR)
            warnings.append(f"ray {theta}: {type(exc).__name__}: {exc}")
    return Rendering(spec, rgb, interior, g, warnings)


def ppm_bytes(rgb: np.ndarray) -> bytes:
    h, w = rgb.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()


def save_image(rendering: Rendering, path) -> None:
    """PPM for .ppm paths, PNG otherwise."""
    path = str(path)
    if path.lower().endswith(".ppm"):
        with open(path, "wb") as fh:
            fh.write(ppm_bytes(rendering.rgb))
        return
    from PIL import Image
    Image.fromarray(rendering.rgb, "RGB").save(path, format="PNG", optimize=False)


def interior_fraction(rendering: Rendering) -> float:
    return float(rendering.interior.mean())


def nearest_pixel(spec: RenderSpec, z: complex) -> tuple:
    row, col = pixel_of(spec, complex(z))
    return int(math.floor(float(row) + 0.5)), int(math.floor(float(col) + 0.5))
