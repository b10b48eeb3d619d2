"""Planar test sets: shape specifications, rasterization, and set-level estimators.

Shapes are closed-form regions (disks, rectangles, convex polygons and
boolean combinations) rasterized by cell-center membership.  The module also
provides the line-integral (Crofton) perimeter estimator, the convex hull of
an occupied grid, and a local-density filter that strips rasterization fuzz.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .grids import BinaryGrid, GridError, GridSpec


class MarginViolation(GridError):
    """Shape support does not keep the required distance from the grid edge."""


class ShapeError(ValueError):
    pass


# --- shape specifications ----------------------------------------------------


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ShapeError(f"disk radius must be positive, got {self.radius}")

    def bounds(self):
        (cx, cy), r = self.center, self.radius
        return (cx - r, cy - r, cx + r, cy + r)

    def contains(self, x, y):
        cx, cy = self.center
        return (x - cx) ** 2 + (y - cy) ** 2 <= self.radius ** 2


@dataclass(frozen=True)
class Rect:
    """Rectangle given by center, half-widths and CCW rotation angle."""

    center: tuple[float, float]
    half_widths: tuple[float, float]
    angle: float = 0.0

    def __post_init__(self):
        hx, hy = self.half_widths
        if not (hx > 0 and hy > 0):
            raise ShapeError(f"rect half-widths must be positive, got {self.half_widths}")

    def _corners(self):
        cx, cy = self.center
        hx, hy = self.half_widths
        c, s = np.cos(self.angle), np.sin(self.angle)
        local = np.array([[-hx, -hy], [hx, -hy], [hx, hy], [-hx, hy]])
        rot = local @ np.array([[c, s], [-s, c]])
        return rot + np.array([cx, cy])

    def bounds(self):
        corners = self._corners()
        return (*corners.min(axis=0), *corners.max(axis=0))

    def contains(self, x, y):
        cx, cy = self.center
        hx, hy = self.half_widths
        c, s = np.cos(self.angle), np.sin(self.angle)
        u = (x - cx) * c + (y - cy) * s
        v = -(x - cx) * s + (y - cy) * c
        return (np.abs(u) <= hx) & (np.abs(v) <= hy)


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon; vertices must be in convex position (any orientation)."""

    vertices: tuple

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise ShapeError("polygon needs at least 3 planar vertices")
        verts = _orient_ccw(verts)
        cross = _turn_cross(verts)
        if np.any(cross <= 0):
            raise ShapeError("polygon vertices are not in strictly convex position")
        object.__setattr__(self, "vertices", tuple(map(tuple, verts)))

    def _verts(self):
        return np.asarray(self.vertices)

    def bounds(self):
        verts = self._verts()
        return (*verts.min(axis=0), *verts.max(axis=0))

    def contains(self, x, y):
        return _in_convex_polygon(x, y, self._verts())


@dataclass(frozen=True)
class SmoothBump:
    """Radial C^inf bump of compact support; emitted as field samples, not a mask."""

    center: tuple[float, float]
    radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not (self.radius > 0):
            raise ShapeError(f"bump radius must be positive, got {self.radius}")

    def bounds(self):
        (cx, cy), r = self.center, self.radius
        return (cx - r, cy - r, cx + r, cy + r)

    def sample(self, x, y):
        cx, cy = self.center
        u2 = ((x - cx) ** 2 + (y - cy) ** 2) / self.radius ** 2
        vals = np.zeros(np.broadcast(x, y).shape, dtype=np.float64)
        inside = u2 < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            vals[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - u2[inside]))
        return vals


@dataclass(frozen=True)
class Difference:
    a: object
    b: object

    def bounds(self):
        return self.a.bounds()  # conservative: removal cannot grow the support

    def contains(self, x, y):
        return self.a.contains(x, y) & ~self.b.contains(x, y)


@dataclass(frozen=True)
class Union:
    a: object
    b: object

    def bounds(self):
        ax0, ay0, ax1, ay1 = self.a.bounds()
        bx0, by0, bx1, by1 = self.b.bounds()
        return (min(ax0, bx0), min(ay0, by0), max(ax1, bx1), max(ay1, by1))

    def contains(self, x, y):
        return self.a.contains(x, y) | self.b.contains(x, y)


_CRISP = (Disk, Rect, ConvexPolygon, Difference, Union)


def rotate_shape(shape, angle: float, about=(0.0, 0.0)):
    """Rotate a shape specification by ``angle`` (CCW) about a point."""

    def rot_point(p):
        c, s = np.cos(angle), np.sin(angle)
        dx, dy = p[0] - about[0], p[1] - about[1]
        return (about[0] + c * dx - s * dy, about[1] + s * dx + c * dy)

    if isinstance(shape, Disk):
        return Disk(rot_point(shape.center), shape.radius)
    if isinstance(shape, Rect):
        return Rect(rot_point(shape.center), shape.half_widths, shape.angle + angle)
    if isinstance(shape, ConvexPolygon):
        return ConvexPolygon(tuple(rot_point(v) for v in shape.vertices))
    if isinstance(shape, SmoothBump):
        return SmoothBump(rot_point(shape.center), shape.radius, shape.amplitude)
    if isinstance(shape, Difference):
        return Difference(rotate_shape(shape.a, angle, about), rotate_shape(shape.b, angle, about))
    if isinstance(shape, Union):
        return Union(rotate_shape(shape.a, angle, about), rotate_shape(shape.b, angle, about))
    raise ShapeError(f"cannot rotate {type(shape).__name__}")


def shape_to_json(shape) -> dict:
    if isinstance(shape, Disk):
        return {"type": "disk", "center": list(shape.center), "radius": shape.radius}
    if isinstance(shape, Rect):
        return {
            "type": "rect",
            "center": list(shape.center),
            "half_widths": list(shape.half_widths),
            "angle": shape.angle,
        }
    if isinstance(shape, ConvexPolygon):
        return {"type": "convex_polygon", "vertices": [list(v) for v in shape.vertices]}
    if isinstance(shape, SmoothBump):
        return {
            "type": "smooth_bump",
            "center": list(shape.center),
            "radius": shape.radius,
            "amplitude": shape.amplitude,
        }
    if isinstance(shape, Difference):
        return {"type": "difference", "a": shape_to_json(shape.a), "b": shape_to_json(shape.b)}
    if isinstance(shape, Union):
        return {"type": "union", "a": shape_to_json(shape.a), "b": shape_to_json(shape.b)}
    raise ShapeError(f"cannot serialize {type(shape).__name__}")


def shape_from_json(doc: dict):
    if not isinstance(doc, dict) or "type" not in doc:
        raise ShapeError("shape document must be an object with a 'type' tag")
    kind = doc["type"]
    try:
        if kind == "disk":
            return Disk(tuple(doc["center"]), float(doc["radius"]))
        if kind == "rect":
            return Rect(tuple(doc["center"]), tuple(doc["half_widths"]), float(doc.get("angle", 0.0)))
        if kind == "convex_polygon":
            return ConvexPolygon(tuple(map(tuple, doc["vertices"])))
        if kind == "smooth_bump":
            return SmoothBump(tuple(doc["center"]), float(doc["radius"]), float(doc.get("amplitude", 1.0)))
        if kind == "difference":
            return Difference(shape_from_json(doc["a"]), shape_from_json(doc["b"]))
        if kind == "union":
            return Union(shape_from_json(doc["a"]), shape_from_json(doc["b"]))
    except KeyError as exc:
        raise ShapeError(f"shape '{kind}' is missing field {exc}") from None
    raise ShapeError(f"unknown shape type {kind!r}")


def load_shape(text_or_path: str) -> object:
    """Parse a shape from inline JSON or from a JSON file path."""
    text = text_or_path.strip()
    if not text.startswith("{"):
        text = Path(text_or_path).read_text()
    return shape_from_json(json.loads(text))


def random_convex_polygon(rng: np.random.Generator, radius: float = 0.3, center=(0.0, 0.0),
                          n_vertices: int = 7) -> ConvexPolygon:
    """Seeded random convex polygon: hull of jittered points on a circle."""
    for _ in range(64):
        k = max(int(n_vertices), 5)
        ang = np.sort(rng.uniform(0.0, 2 * np.pi, size=k))
        rad = radius * rng.uniform(0.6, 1.0, size=k)
        pts = np.column_stack([center[0] + rad * np.cos(ang), center[1] + rad * np.sin(ang)])
        hull = hull_vertices(pts)
        if hull.shape[0] >= 5:
            return ConvexPolygon(tuple(map(tuple, hull)))
    raise ShapeError("could not draw a convex polygon with enough vertices")


# --- rasterization -----------------------------------------------------------


def rasterize(shape, spec: GridSpec) -> BinaryGrid:
    """Cell-center rasterization of a crisp shape onto ``spec``.

    The shape's bounding box must keep the grid's padding margin; otherwise a
    MarginViolation reporting both boxes is raised.
    """
    if not isinstance(shape, _CRISP):
        raise ShapeError(f"{type(shape).__name__} does not rasterize to a binary grid")
    check_margin(shape, spec)
    x, y = spec.cell_centers()
    return BinaryGrid(spec, shape.contains(x, y).astype(np.uint8))


def check_margin(shape, spec: GridSpec) -> None:
    bx0, by0, bx1, by1 = shape.bounds()
    ix0, iy0, ix1, iy1 = spec.interior_bounds()
    if bx0 < ix0 or by0 < iy0 or bx1 > ix1 or by1 > iy1:
        raise MarginViolation(
            "shape support [{:.4g}, {:.4g}] x [{:.4g}, {:.4g}] leaves the padded interior "
            "[{:.4g}, {:.4g}] x [{:.4g}, {:.4g}] (margin {:.4g} on a side-{:.4g} grid)".format(
                bx0, bx1, by0, by1, ix0, ix1, iy0, iy1, spec.padding, spec.length
            )
        )


def sample_bump(bump: SmoothBump, spec: GridSpec) -> np.ndarray:
    """Sample a smooth bump at cell centers (margin-checked)."""
    check_margin(bump, spec)
    x, y = spec.cell_centers()
    return bump.sample(x, y)


# --- perimeter by line crossings ---------------------------------------------


@dataclass(frozen=True)
class PerimeterEstimate:
    value: float
    method: str  # "analytic" | "crofton"
    crossings: tuple = ()  # per-angle 0/1 transition counts
    empty: bool = False

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "crossings": list(map(int, self.crossings)),
            "empty": self.empty,
        }


def _rotated_index_coords(n: int, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Index coordinates sampling the grid rotated by ``theta`` about its center."""
    c0 = (n - 1) / 2.0
    idx = np.arange(n, dtype=np.float64) - c0
    jj, ii = np.meshgrid(idx, idx)  # ii rows (y), jj cols (x)
    ct, st = np.cos(theta), np.sin(theta)
    # inverse rotation of output coords gives the source sample location
    src_x = ct * jj - st * ii + c0
    src_y = st * jj + ct * ii + c0
    return src_y, src_x


def crofton_perimeter(grid: BinaryGrid, n_angles: int = 180) -> PerimeterEstimate:
    """Perimeter via averaged line-crossing counts.

    For each angle the grid is resampled on a rotated lattice (bilinear) and
    transitions are counted along rows with hysteresis: a crossing registers
    only when the value moves from below 1/3 to above 2/3 or back, which
    suppresses the staircase chatter of rows nearly tangent to the boundary.
    The total is scaled by (pi / 2) * h / n_angles.
    """
    if n_angles < 16:
        raise ValueError(f"crofton estimator needs at least 16 angles, got {n_angles}")
    if grid.is_empty():
        return PerimeterEstimate(0.0, "crofton", (), empty=True)
    n = grid.spec.n
    cells = grid.cells
    col = np.arange(n, dtype=np.intp)
    counts = []
    for k in range(n_angles):
        theta = np.pi * k / n_angles
        if k == 0:
            rot = cells.astype(np.uint8)
        else:
            src_y, src_x = _rotated_index_coords(n, theta)
            smooth = ndimage.map_coordinates(cells.astype(np.float64), [src_y, src_x],
                                             order=1, mode="constant", cval=0.0)
            state = np.where(smooth > 2.0 / 3.0, 1, np.where(smooth < 1.0 / 3.0, 0, -1))
            # carry the last definite state across the indeterminate band
            definite = np.where(state >= 0, col[None, :], 0)
            last = np.maximum.accumulate(definite, axis=1)
            rot = state[np.arange(n)[:, None], last].astype(np.uint8)  # row borders are 0
        inner = np.abs(np.diff(rot.astype(np.int16), axis=1)).sum()
        edges = int(rot[:, 0].sum() + rot[:, -1].sum())  # support never reaches the edge; belt and braces
        counts.append(int(inner + edges))
    total = float(sum(counts))
    value = 0.5 * np.pi * grid.spec.h * total / n_angles
    return PerimeterEstimate(value, "crofton", tuple(counts))


# --- convex hull and density filtering ---------------------------------------


def _orient_ccw(verts: np.ndarray) -> np.ndarray:
    area2 = np.sum(verts[:, 0] * np.roll(verts[:, 1], -1) - np.roll(verts[:, 0], -1) * verts[:, 1])
    return verts if area2 > 0 else verts[::-1]


def _turn_cross(verts: np.ndarray) -> np.ndarray:
    a = verts
    b = np.roll(verts, -1, axis=0)
    c = np.roll(verts, -2, axis=0)
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def hull_vertices(points: np.ndarray) -> np.ndarray:
    """Monotone-chain convex hull; returns CCW extreme points only."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)  # sorts lexicographically
    if pts.shape[0] <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _in_convex_polygon(x, y, verts: np.ndarray, pad: float = 0.0):
    """Vectorized membership for a CCW convex polygon, boundary inclusive.

    ``pad`` > 0 shrinks the polygon: points must be at least ``pad`` inside
    every edge.
    """
    if verts.shape[0] == 0:
        return np.zeros(np.broadcast(x, y).shape, dtype=bool)
    if verts.shape[0] == 1:
        return (np.abs(x - verts[0, 0]) <= pad) & (np.abs(y - verts[0, 1]) <= pad)
    inside = np.ones(np.broadcast(x, y).shape, dtype=bool)
    m = verts.shape[0]
    for i in range(m):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % m]
        ex, ey = bx - ax, by - ay
        norm = np.hypot(ex, ey)
        if norm == 0:
            continue
        side = (ex * (y - ay) - ey * (x - ax)) / norm  # signed distance, CCW interior >= 0
        inside &= side >= pad - 1e-12
    return inside


def hull_polygon(grid: BinaryGrid) -> np.ndarray:
    """CCW hull vertices of the occupied cell centers ((0, 2) if empty)."""
    if grid.is_empty():
        return np.zeros((0, 2))
    return hull_vertices(grid.occupied_centers())


def convex_hull(grid: BinaryGrid) -> BinaryGrid:
    """Rasterized convex hull of the occupied cell centers.

    Cellwise superset of the input and idempotent: re-rasterization keeps
    every center on or inside the hull polygon.
    """
    if grid.is_empty():
        return BinaryGrid(grid.spec, np.zeros_like(grid.cells))
    verts = hull_polygon(grid)
    x, y = grid.spec.cell_centers()
    inside = _in_convex_polygon(x, y, verts)
    cells = (inside | (grid.cells != 0)).astype(np.uint8)
    return BinaryGrid(grid.spec, cells)


def density_one_filter(grid: BinaryGrid, radius_cells: int = 2, threshold: float = 0.7) -> BinaryGrid:
    """Keep occupied cells whose disk neighborhood is mostly occupied.

    The occupancy fraction over the disk of ``radius_cells`` around each cell
    must reach ``threshold``; the filter never adds cells and is monotone in
    the threshold.
    """
    if radius_cells < 1:
        raise ValueError(f"radius_cells must be >= 1, got {radius_cells}")
    if not (0.5 < threshold <= 1.0):
        raise ValueError(f"threshold must lie in (0.5, 1], got {threshold}")
    r = int(radius_cells)
    span = np.arange(-r, r + 1)
    dj, di = np.meshgrid(span, span)
    footprint = (di ** 2 + dj ** 2) <= r ** 2
    occupancy = ndimage.convolve(grid.cells.astype(np.float64), footprint.astype(np.float64),
                                 mode="constant", cval=0.0)
    frac = occupancy / footprint.sum()
    keep = (grid.cells != 0) & (frac >= threshold - 1e-12)
    return BinaryGrid(grid.spec, keep.astype(np.uint8))


def symmetric_difference_area(a: BinaryGrid, b: BinaryGrid) -> float:
    if a.spec != b.spec:
        raise GridError("grids live on different specs")
    return float(np.count_nonzero(a.cells != b.cells)) * a.spec.h ** 2
