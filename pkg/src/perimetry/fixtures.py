"""Named test shapes with exact perimeter and area where a formula exists.

The suite is sized for an N=512 grid of side 2: every shape, at every listed
rotation about the origin, stays inside the padded interior |x|,|y| <= 0.75.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolygon, Difference, Disk, Rect, Union, random_convex_polygon, rotate_shape


@dataclass(frozen=True)
class Fixture:
    name: str
    shape: object
    convex: bool
    perimeter: float   # exact boundary length, holes included
    area: float
    rotation: float = 0.0

    def rotated(self, angle: float) -> "Fixture":
        if angle == 0.0:
            return self
        return Fixture(f"{self.name}+rot{angle:.3f}", rotate_shape(self.shape, angle),
                       self.convex, self.perimeter, self.area, self.rotation + angle)


def _poly_metrics(poly: ConvexPolygon) -> tuple[float, float]:
    v = np.asarray(poly.vertices)
    d = np.diff(np.vstack([v, v[:1]]), axis=0)
    perimeter = float(np.hypot(d[:, 0], d[:, 1]).sum())
    x, y = v[:, 0], v[:, 1]
    area = 0.5 * float(np.abs(x @ np.roll(y, -1) - y @ np.roll(x, -1)))
    return perimeter, area


def _lens_area(big_r: float, small_r: float, d: float) -> float:
    # area of the intersection of two overlapping disks at center distance d
    a1 = math.acos((d * d + big_r * big_r - small_r * small_r) / (2 * d * big_r))
    a2 = math.acos((d * d + small_r * small_r - big_r * big_r) / (2 * d * small_r))
    tri = 0.5 * math.sqrt((-d + big_r + small_r) * (d + big_r - small_r)
                          * (d - big_r + small_r) * (d + big_r + small_r))
    return big_r * big_r * a1 + small_r * small_r * a2 - tri


def _crescent(big_r: float, small_r: float, d: float) -> tuple[object, float, float]:
    shape = Difference(Disk((0.0, 0.0), big_r), Disk((d, 0.0), small_r))
    a1 = math.acos((d * d + big_r * big_r - small_r * small_r) / (2 * d * big_r))
    a2 = math.acos((d * d + small_r * small_r - big_r * big_r) / (2 * d * small_r))
    perimeter = big_r * (2 * math.pi - 2 * a1) + small_r * (2 * math.pi - 2 * a2)
    area = math.pi * big_r * big_r - _lens_area(big_r, small_r, d)
    return shape, perimeter, area


def _convex_fixtures() -> list[Fixture]:
    out = [
        Fixture("disk", Disk((0.0, 0.0), 0.7), True, 2 * math.pi * 0.7, math.pi * 0.49),
        Fixture("small_disk", Disk((0.1, -0.08), 0.45), True, 2 * math.pi * 0.45,
                math.pi * 0.45 ** 2),
        Fixture("square", Rect((0.0, 0.0), (0.5, 0.5)), True, 4.0, 1.0),
        Fixture("rectangle", Rect((0.0, 0.0), (0.6, 0.35)), True, 3.8, 0.84),
        Fixture("thin_rect", Rect((0.05, 0.0), (0.62, 0.17)), True, 4 * 0.79,
                4 * 0.62 * 0.17),
    ]
    tri = ConvexPolygon(((-0.55, -0.4), (0.6, -0.35), (0.0, 0.6)))
    p, a = _poly_metrics(tri)
    out.append(Fixture("triangle", tri, True, p, a))
    pent = random_convex_polygon(np.random.default_rng(11), radius=0.68, n_vertices=5)
    p, a = _poly_metrics(pent)
    out.append(Fixture("pentagon", pent, True, p, a))
    hept = random_convex_polygon(np.random.default_rng(29), radius=0.7, n_vertices=8)
    p, a = _poly_metrics(hept)
    out.append(Fixture("polygon", hept, True, p, a))
    return out


def _nonconvex_fixtures() -> list[Fixture]:
    holed = Difference(Disk((0.0, 0.0), 0.7), Rect((0.0, 0.0), (0.15, 0.15)))
    two = Union(Disk((-0.45, 0.0), 0.28), Disk((0.45, 0.0), 0.28))
    crescent, cres_p, cres_a = _crescent(0.7, 0.5, 0.35)
    ell = Union(Rect((-0.25, 0.0), (0.25, 0.5)), Rect((0.25, -0.25), (0.25, 0.25)))
    return [
        Fixture("holed_disk", holed, False, 2 * math.pi * 0.7 + 8 * 0.15,
                math.pi * 0.49 - 0.3 ** 2),
        Fixture("two_disks", two, False, 4 * math.pi * 0.28, 2 * math.pi * 0.28 ** 2),
        Fixture("crescent", crescent, False, cres_p, cres_a),
        Fixture("l_shape", ell, False, 4.0, 0.75),
    ]


def standard_fixture_suite(rotations=(0.0, math.pi / 7)) -> list[Fixture]:
    """All fixtures at every listed rotation; default 24 entries."""
    base = _convex_fixtures() + _nonconvex_fixtures()
    return [f.rotated(angle) for f in base for angle in rotations]
