"""Cell-centered grids, regions, and space-time velocity containers.

Fields are stored cell-centered on axis-aligned boxes: the cell (i, j, k)
of a box with spacing h owns the sample at ``lo + (index + 1/2) * h``.
Data arrays are indexed ``data[ix, iy, iz]``; serialization flattens them
x-fastest (Fortran order).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Box3",
    "ScalarGrid",
    "VectorGrid",
    "SpaceTimeField",
    "Ball",
    "Cube",
    "Cylinder",
    "region_measure",
    "restrict",
    "gradient",
    "scalar_gradient",
]


@dataclass(frozen=True)
class Box3:
    """Axis-aligned box [lo, hi] discretized into n cells per axis."""

    lo: tuple
    hi: tuple
    n: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        n = tuple(int(v) for v in self.n)
        if len(lo) != 3 or len(hi) != 3 or len(n) != 3:
            raise ValueError("Box3 requires 3 components for lo, hi, n")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError(f"box must satisfy hi > lo componentwise, got lo={lo} hi={hi}")
        if any(m <= 0 for m in n):
            raise ValueError(f"cell counts must be positive, got n={n}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "n", n)

    @property
    def spacing(self):
        return tuple((h - l) / m for l, h, m in zip(self.lo, self.hi, self.n))

    @property
    def cell_volume(self):
        hx, hy, hz = self.spacing
        return hx * hy * hz

    @property
    def extent(self):
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    def centers(self):
        """Per-axis arrays of cell-center coordinates."""
        return tuple(
            l + (np.arange(m) + 0.5) * h
            for l, h, m in zip(self.lo, self.spacing, self.n)
        )

    def center_mesh(self):
        """Cell-center coordinates broadcast to the full (3, nx, ny, nz) mesh."""
        cx, cy, cz = self.centers()
        return np.stack(np.meshgrid(cx, cy, cz, indexing="ij"))

    def contains_points(self, pts):
        pts = np.asarray(pts, dtype=float)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts >= lo) & (pts <= hi), axis=-1)


def _check_data(box, data):
    data = np.asarray(data, dtype=float)
    if data.shape != box.n:
        raise ValueError(f"data shape {data.shape} does not match cell counts {box.n}")
    return data


@dataclass
class ScalarGrid:
    """One real sample per cell of a Box3."""

    box: Box3
    data: np.ndarray

    def __post_init__(self):
        self.data = _check_data(self.box, self.data)

    @classmethod
    def sample(cls, box, fn):
        """Sample fn(x, y, z) at cell centers (fn must broadcast)."""
        x, y, z = box.center_mesh()
        return cls(box, np.asarray(fn(x, y, z), dtype=float))

    def cell_sum(self, mask=None):
        """Integral of the field: sum of cell values times cell volume."""
        if mask is None:
            return float(np.sum(self.data) * self.box.cell_volume)
        return float(np.sum(self.data[mask]) * self.box.cell_volume)


@dataclass
class VectorGrid:
    """Three ScalarGrids sharing a box (a sampled velocity field)."""

    box: Box3
    components: tuple

    def __post_init__(self):
        if len(self.components) != 3:
            raise ValueError("VectorGrid needs exactly 3 components")
        comps = []
        for c in self.components:
            if isinstance(c, ScalarGrid):
                if c.box != self.box:
                    raise ValueError("components must share the VectorGrid box")
                comps.append(c)
            else:
                comps.append(ScalarGrid(self.box, c))
        self.components = tuple(comps)

    @classmethod
    def from_array(cls, box, arr):
        """Build from an array of shape (3, nx, ny, nz)."""
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (3, *box.n):
            raise ValueError(f"expected shape {(3, *box.n)}, got {arr.shape}")
        return cls(box, tuple(ScalarGrid(box, a) for a in arr))

    @classmethod
    def sample(cls, box, fn):
        """Sample fn(x, y, z) -> (u1, u2, u3) at cell centers."""
        x, y, z = box.center_mesh()
        u1, u2, u3 = fn(x, y, z)
        return cls.from_array(box, np.stack([
            np.broadcast_to(np.asarray(u1, dtype=float), box.n),
            np.broadcast_to(np.asarray(u2, dtype=float), box.n),
            np.broadcast_to(np.asarray(u3, dtype=float), box.n),
        ]))

    def stack(self):
        return np.stack([c.data for c in self.components])

    def magnitude(self):
        """|u| as a ScalarGrid."""
        sq = sum(c.data ** 2 for c in self.components)
        return ScalarGrid(self.box, np.sqrt(sq))


@dataclass
class SpaceTimeField:
    """Velocity frames u(., t_i) on a shared box at strictly increasing times."""

    times: np.ndarray
    frames: list

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or len(self.times) != len(self.frames):
            raise ValueError("times must be 1-d and match the number of frames")
        if len(self.frames) == 0:
            raise ValueError("need at least one frame")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        box = self.frames[0].box
        if any(f.box != box for f in self.frames):
            raise ValueError("all frames must share one box")

    @property
    def box(self):
        return self.frames[0].box

    def frame_index_at(self, t, atol=1e-9):
        """Index of the frame nearest to t (warn when not an exact sample time)."""
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > atol * max(1.0, abs(t)):
            warnings.warn(
                f"time {t} is not a sample time; using nearest frame t={self.times[i]}"
            )
        return i


@dataclass(frozen=True)
class Ball:
    """Open ball B(center, r)."""

    center: tuple
    r: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "r", float(self.r))
        if self.r <= 0:
            raise ValueError("ball radius must be positive")

    def mask(self, box):
        x, y, z = box.center_mesh()
        cx, cy, cz = self.center
        return (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2 < self.r ** 2

    @property
    def volume(self):
        return 4.0 / 3.0 * np.pi * self.r ** 3


@dataclass(frozen=True)
class Cube:
    """Half-open axis cube [corner, corner + side)^3."""

    corner: tuple
    side: float

    def __post_init__(self):
        object.__setattr__(self, "corner", tuple(float(v) for v in self.corner))
        object.__setattr__(self, "side", float(self.side))
        if self.side <= 0:
            raise ValueError("cube side must be positive")

    def mask(self, box):
        x, y, z = box.center_mesh()
        m = np.ones(box.n, dtype=bool)
        for coord, c in zip((x, y, z), self.corner):
            m &= (coord >= c) & (coord < c + self.side)
        return m

    @property
    def volume(self):
        return self.side ** 3


@dataclass(frozen=True)
class Cylinder:
    """Parabolic cylinder Q(z0, r) = B(x0, r) x (t0 - r^2, t0]."""

    center: tuple   # (x0, y0, z0)
    t0: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "r", float(self.r))
        if self.r <= 0:
            raise ValueError("cylinder radius must be positive")

    @property
    def ball(self):
        return Ball(self.center, self.r)

    @property
    def t_start(self):
        return self.t0 - self.r ** 2


def region_measure(f, region, h):
    """Measure of {x in region : |f(x)| > h} by cell counting.

    Cells belong to the region iff their center does; the result is the
    count times the cell volume. A region disjoint from the sampled box
    yields 0.0 with a warning.
    """
    if h < 0:
        raise ValueError("level h must be nonnegative")
    mask = region.mask(f.box)
    if not mask.any():
        warnings.warn("region contains no cell centers of the sampled box")
        return 0.0
    over = np.abs(f.data) > h
    return float(np.count_nonzero(mask & over) * f.box.cell_volume)


def restrict(f, cyl):
    """Restrict a SpaceTimeField to a cylinder.

    Keeps frames with t in (t0 - r^2, t0] and zeroes values outside
    B(x0, r). Raises when the cylinder misses the sampled data entirely.
    """
    keep = (f.times > cyl.t_start) & (f.times <= cyl.t0 + 1e-12)
    mask = cyl.ball.mask(f.box)
    if not keep.any() or not mask.any():
        raise ValueError("empty region: cylinder does not intersect the sampled field")
    frames = []
    for i in np.nonzero(keep)[0]:
        arr = f.frames[i].stack() * mask
        frames.append(VectorGrid.from_array(f.box, arr))
    return SpaceTimeField(f.times[keep], frames)


def scalar_gradient(g):
    """Gradient of a ScalarGrid: central differences inside, one-sided at faces.

    Returns an array of shape (3, nx, ny, nz). Requires >= 3 cells per axis.
    """
    if any(m < 3 for m in g.box.n):
        raise ValueError("gradient needs at least 3 cells per axis")
    hx, hy, hz = g.box.spacing
    gx, gy, gz = np.gradient(g.data, hx, hy, hz, edge_order=2)
    return np.stack([gx, gy, gz])


def gradient(v):
    """Velocity gradient tensor: out[i, j] = d u_i / d x_j, shape (3, 3, nx, ny, nz)."""
    return np.stack([scalar_gradient(c) for c in v.components])
