"""Core data model: uniform square grids, rasterized sets, scalar fields, 1D profiles.

Conventions used throughout the package:

* arrays are indexed ``[iy, ix]`` (row = y), cell centers at
  ``origin + (index + 0.5) * h``;
* the physical origin (0, 0) sits at the grid center for the default
  ``origin``, and every rotation/projection is taken about it;
* the support of any set or field must keep a margin of ``length / 8``
  from the grid boundary so that circular FFT convolution has no visible
  wraparound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PADDING_FRACTION = 1.0 / 8.0


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform n x n grid covering a square of side ``length``."""

    n: int
    length: float
    origin: tuple[float, float] = None  # defaults to centering the grid on (0, 0)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8:
            raise GridError(f"grid resolution must be an integer >= 8, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not (self.length > 0):
            raise GridError(f"grid side length must be positive, got {self.length!r}")
        if self.origin is None:
            object.__setattr__(self, "origin", (-self.length / 2.0, -self.length / 2.0))
        else:
            object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def h(self) -> float:
        """Cell width."""
        return self.length / self.n

    @property
    def padding(self) -> float:
        """Required distance between any support and the grid boundary."""
        return self.length * PADDING_FRACTION

    def x_centers(self) -> np.ndarray:
        return self.origin[0] + (np.arange(self.n) + 0.5) * self.h

    def y_centers(self) -> np.ndarray:
        return self.origin[1] + (np.arange(self.n) + 0.5) * self.h

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid (X, Y) of cell centers, each of shape (n, n)."""
        return np.meshgrid(self.x_centers(), self.y_centers())

    def interior_bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) box that supports must stay inside."""
        x0, y0 = self.origin
        pad = self.padding
        return (x0 + pad, y0 + pad, x0 + self.length - pad, y0 + self.length - pad)

    def to_json(self) -> dict:
        return {"N": self.n, "L": self.length, "origin": list(self.origin)}

    @classmethod
    def from_json(cls, doc: dict) -> "GridSpec":
        origin = doc.get("origin")
        return cls(n=doc["N"], length=doc["L"], origin=None if origin is None else tuple(origin))


@dataclass(eq=False)
class BinaryGrid:
    """Rasterized indicator of a bounded planar set (cells in {0, 1})."""

    spec: GridSpec
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells)
        if cells.shape != (self.spec.n, self.spec.n):
            raise GridError(f"cells shape {cells.shape} does not match spec n={self.spec.n}")
        self.cells = (cells != 0).astype(np.uint8)

    @property
    def area(self) -> float:
        """Occupied area, count of ones times h^2."""
        return float(self.cells.sum()) * self.spec.h ** 2

    def is_empty(self) -> bool:
        return not self.cells.any()

    def occupied_centers(self) -> np.ndarray:
        """(k, 2) array of (x, y) centers of occupied cells."""
        iy, ix = np.nonzero(self.cells)
        return np.column_stack([self.spec.x_centers()[ix], self.spec.y_centers()[iy]])


@dataclass(eq=False)
class ScalarField:
    """Real-valued grid function (mollified indicator, cutoff, test function)."""

    spec: GridSpec
    values: np.ndarray
    provenance: str = "synthetic"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.spec.n, self.spec.n):
            raise GridError(f"values shape {values.shape} does not match spec n={self.spec.n}")
        if not np.all(np.isfinite(values)):
            raise GridError("scalar field contains non-finite values")
        self.values = values

    @property
    def mass(self) -> float:
        return float(self.values.sum()) * self.spec.h ** 2


@dataclass(eq=False)
class Profile1D:
    """Real function sampled on a uniform 1D lattice t_j = t0 + j * dt."""

    dt: float
    t0: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 4:
            raise GridError("profile must be a 1D array with at least 4 samples")
        if not np.all(np.isfinite(values)):
            raise GridError("profile contains non-finite values")
        self.values = values

    @property
    def m(self) -> int:
        return self.values.size

    def t(self) -> np.ndarray:
        return self.t0 + np.arange(self.m) * self.dt

    @property
    def mass(self) -> float:
        return float(self.values.sum()) * self.dt


def field_from_grid(grid: BinaryGrid) -> ScalarField:
    return ScalarField(grid.spec, grid.cells.astype(np.float64), provenance="indicator")


# --- serialization -----------------------------------------------------------
#
# Masks travel as 8-bit PGM (0/255) plus a JSON sidecar with the grid spec;
# scalar fields as flat little-endian float64 plus the same sidecar.


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(path.suffix + ".json") if path.suffix != ".json" else path


def save_mask(grid: BinaryGrid, path: str | Path) -> Path:
    path = Path(path)
    if path.suffix != ".pgm":
        path = path.with_suffix(".pgm")
    header = f"P5\n{grid.spec.n} {grid.spec.n}\n255\n".encode("ascii")
    data = (grid.cells * np.uint8(255)).tobytes()
    path.write_bytes(header + data)
    _sidecar_path(path).write_text(json.dumps(grid.spec.to_json(), sort_keys=True) + "\n")
    return path


def load_mask(path: str | Path) -> BinaryGrid:
    path = Path(path)
    raw = path.read_bytes()
    if not raw.startswith(b"P5"):
        raise GridError(f"{path}: not a binary PGM (P5) file")
    # Header: magic, width, height, maxval; '#' comment lines allowed.
    tokens: list[bytes] = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise GridError(f"{path}: truncated PGM header")
        tokens.append(raw[start:pos])
    pos += 1  # single whitespace after maxval
    width, height, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise GridError(f"{path}: expected 8-bit PGM, maxval={maxval}")
    data = np.frombuffer(raw[pos:], dtype=np.uint8)
    if data.size != width * height:
        raise GridError(f"{path}: pixel payload has {data.size} bytes, expected {width * height}")
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise GridError(f"{path}: missing JSON sidecar {sidecar.name}")
    spec = GridSpec.from_json(json.loads(sidecar.read_text()))
    if spec.n != width or spec.n != height:
        raise GridError(f"{path}: sidecar N={spec.n} does not match image {width}x{height}")
    cells = (data.reshape(height, width) >= 128).astype(np.uint8)
    return BinaryGrid(spec, cells)


def save_field(fld: ScalarField, path: str | Path) -> Path:
    path = Path(path)
    if path.suffix != ".f64":
        path = path.with_suffix(".f64")
    fld.values.astype("<f8").tofile(path)
    doc = fld.spec.to_json()
    doc["provenance"] = fld.provenance
    _sidecar_path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")
    return path


def load_field(path: str | Path) -> ScalarField:
    path = Path(path)
    sidecar = _sidecar_path(path)
    doc = json.loads(sidecar.read_text())
    spec = GridSpec.from_json(doc)
    values = np.fromfile(path, dtype="<f8").reshape(spec.n, spec.n)
    return ScalarField(spec, values, provenance=doc.get("provenance", "synthetic"))
